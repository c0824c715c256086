"""Log dilation-volume descriptor vectors and a fractal-dimension estimate."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dilation import DEFAULT_MEMORY_BUDGET, dilation_curve


@dataclass(frozen=True)
class DescriptorVector:
    """ln V(d2) at each achievable radius, ascending radius order."""

    values: np.ndarray
    r_max: int

    def __len__(self):
        return len(self.values)


class FdEstimate(NamedTuple):
    fd: float
    residual: float


def bm_descriptors(img, r_max=10, memory_budget=DEFAULT_MEMORY_BUDGET):
    """Descriptor vector of ``img``: componentwise ln of the dilation volumes."""
    curve = dilation_curve(img, r_max, memory_budget)
    return DescriptorVector(
        values=np.log(curve.volumes.astype(np.float64)), r_max=curve.radii.r_max
    )


def estimate_fd(curve, min_d2=None, max_d2=None):
    """Fractal dimension 3 - slope of the least-squares ln V vs ln r fit.

    ``min_d2``/``max_d2`` optionally restrict the fitted radius window;
    the smallest radii are lattice-dominated and can be excluded this way.
    Returns the dimension together with the sum of squared fit residuals.
    """
    d2 = np.asarray(curve.radii.d2, dtype=np.float64)
    vol = np.asarray(curve.volumes, dtype=np.float64)
    keep = np.ones(len(d2), dtype=bool)
    if min_d2 is not None:
        keep &= d2 >= min_d2
    if max_d2 is not None:
        keep &= d2 <= max_d2
    d2, vol = d2[keep], vol[keep]
    log_r = 0.5 * np.log(d2)
    if len(np.unique(log_r)) < 2:
        raise ValueError("fractal dimension fit needs >= 2 distinct radii")
    coeffs, residuals, *_ = np.polyfit(log_r, np.log(vol), 1, full=True)
    residual = float(residuals[0]) if len(residuals) else 0.0
    return FdEstimate(fd=3.0 - float(coeffs[0]), residual=residual)


def descriptor_header(radii):
    return ",".join(f"d_squared_{int(d2)}" for d2 in radii.d2)


def descriptors_to_csv(vector, radii):
    header = descriptor_header(radii)
    row = ",".join(format(v, ".12g") for v in vector.values)
    return f"{header}\n{row}\n"
