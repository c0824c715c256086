"""Recursive 4-way decomposition and the entropy feature vector (EFV).

Level 1 is the whole image; each further level splits every axis in two, so
level l is a 2^(l-1) x 2^(l-1) grid of cells (floor-based boundaries, no
pixel ever dropped). Per level we take the componentwise mean and population
standard deviation of the cells' descriptor vectors, condense each
component's across-level trajectory to one entropy value, and concatenate
the mean entropies followed by the deviation entropies.

The entropy is the plain sum of u*ln(u) over the trajectory (inputs are
non-negative by construction; 0*ln(0) counts as 0). No normalization or sign
flip is applied, which only reparameterizes each feature monotonically and
leaves classification behavior unchanged.
"""

from dataclasses import dataclass

import numpy as np

from .dilation import DEFAULT_MEMORY_BUDGET, achievable_distances
from .descriptors import DescriptorVector, bm_descriptors


@dataclass(frozen=True)
class DecompositionPlan:
    """Cell rectangles (x0, y0, x1, y1), half-open, for levels 1..levels."""

    levels: int
    min_cell_side: int
    bounds: list


@dataclass(frozen=True)
class MultilevelFeatures:
    """Per-level mean/deviation descriptors and the condensed entropy vector."""

    means: np.ndarray       # (levels, n) mean descriptors per level
    deviations: np.ndarray  # (levels, n) population standard deviations
    efv: np.ndarray         # (2n,) entropy feature vector
    r_max: int
    levels: int


def _level_bounds(width, height, level, min_cell_side):
    grid = 2 ** (level - 1)
    if width // grid < min_cell_side or height // grid < min_cell_side:
        raise ValueError(
            f"level {level} too deep: cells of a {width}x{height} image fall "
            f"below min_cell_side={min_cell_side}"
        )
    xs = [j * width // grid for j in range(grid + 1)]
    ys = [k * height // grid for k in range(grid + 1)]
    return [
        (xs[j], ys[k], xs[j + 1], ys[k + 1])
        for k in range(grid)
        for j in range(grid)
    ]


def decomposition_plan(width, height, levels, min_cell_side=1):
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    bounds = [
        _level_bounds(width, height, level, min_cell_side)
        for level in range(1, levels + 1)
    ]
    return DecompositionPlan(levels=levels, min_cell_side=min_cell_side, bounds=bounds)


def decompose(img, level, min_cell_side=1):
    """Cells of ``img`` at one decomposition level, reading order."""
    img = np.asarray(img)
    height, width = img.shape
    bounds = _level_bounds(width, height, level, min_cell_side)
    return [img[y0:y1, x0:x1] for x0, y0, x1, y1 in bounds]


def level_descriptors(img, level, r_max, min_cell_side=1,
                      memory_budget=DEFAULT_MEMORY_BUDGET):
    """Componentwise mean and population deviation of the cells' descriptors."""
    cells = decompose(img, level, min_cell_side)
    stacked = np.stack(
        [bm_descriptors(cell, r_max, memory_budget).values for cell in cells]
    )
    mean = DescriptorVector(values=stacked.mean(axis=0), r_max=r_max)
    deviation = stacked.std(axis=0)
    return mean, deviation


def shannon_entropy(u):
    """Sum of u(i) * ln(u(i)) with the 0 * ln(0) = 0 convention."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(u < 0):
        raise ValueError("entropy input must be non-negative")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(u > 0, u * np.log(u), 0.0)
    return float(terms.sum())


def build_efv(img, r_max=10, levels=3, min_cell_side=1,
              memory_budget=DEFAULT_MEMORY_BUDGET):
    """Mean/deviation descriptors for levels 1..levels plus their EFV.

    The EFV holds one entropy per descriptor component: first over the
    across-level mean trajectories, then over the deviation trajectories,
    giving 2n components for n achievable radii.
    """
    n = len(achievable_distances(r_max))
    means = np.empty((levels, n), dtype=np.float64)
    deviations = np.empty((levels, n), dtype=np.float64)
    for level in range(1, levels + 1):
        mean, deviation = level_descriptors(
            img, level, r_max, min_cell_side, memory_budget
        )
        means[level - 1] = mean.values
        deviations[level - 1] = deviation
    efv = np.array(
        [shannon_entropy(means[:, i]) for i in range(n)]
        + [shannon_entropy(deviations[:, i]) for i in range(n)]
    )
    return MultilevelFeatures(
        means=means, deviations=deviations, efv=efv, r_max=r_max, levels=levels
    )


def efv_header(n):
    avg = ",".join(f"K_avg_{i}" for i in range(1, n + 1))
    dev = ",".join(f"K_dev_{i}" for i in range(1, n + 1))
    return f"{avg},{dev}"
