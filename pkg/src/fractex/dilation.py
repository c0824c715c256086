"""Exact dilation volumes of the 3D intensity surface of a grayscale image.

An image is mapped onto the voxel surface {(x, y, f(x, y))} and dilated by
closed Euclidean balls of growing radius. For each achievable squared radius
d2 = i^2 + j^2 + k^2 the volume V(d2) counts the voxels of a padded grid
whose exact squared distance to the nearest surface voxel is <= d2.

The distance field is an exact squared Euclidean distance transform computed
separably: an analytic pass along z (each pixel column holds exactly one
surface voxel) followed by integer lower-envelope scans along y and x. All
distance arithmetic is integer; no floating point is involved anywhere.

The grid spans [-r_max, width-1+r_max] in x, likewise in y, and
[min_intensity - r_max, max_intensity + r_max] in z, so no dilation ball is
ever clipped and the volumes are invariant to constant intensity shifts.
"""

from dataclasses import dataclass

import numba
import numpy as np

from .errors import MemoryBudgetError
from .imagery import validate_gray

DEFAULT_MEMORY_BUDGET = 512 * 1024 * 1024  # bytes of voxel storage

_VOXEL_BYTES = 4  # int32 squared distances

CURVE_HEADER = "d_squared,volume"


@dataclass(frozen=True)
class RadiusSet:
    """Achievable squared dilation radii, ascending.

    Every element is a sum of three integer squares; numbers of the form
    4^a(8b+7) can never occur.
    """

    r_max: int
    d2: np.ndarray

    def __len__(self):
        return len(self.d2)


@dataclass(frozen=True)
class DilationCurve:
    """Exact dilation volumes V(d2) per achievable squared radius."""

    radii: RadiusSet
    volumes: np.ndarray

    def __len__(self):
        return len(self.volumes)


def achievable_distances(r_max):
    """All squared distances i^2+j^2+k^2 in [1, r_max^2], ascending."""
    r_max = int(r_max)
    if r_max < 1:
        raise ValueError(f"r_max must be >= 1, got {r_max}")
    r2 = r_max * r_max
    base = np.arange(r_max + 1, dtype=np.int64) ** 2
    two = np.unique(np.add.outer(base, base).ravel())
    two = two[two <= r2]
    hit = np.zeros(r2 + 1, dtype=bool)
    for k2 in base:
        reach = two + k2
        hit[reach[reach <= r2]] = True
    d2 = np.nonzero(hit)[0].astype(np.int64)
    return RadiusSet(r_max=r_max, d2=d2[d2 >= 1])


# ---------------------------------------------------------------------------
# Separable exact EDT kernels
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _envelope_scan(w, out, s, t):
    # 1D minimization out[u] = min_i (u-i)^2 + w[i] by the integer
    # lower-envelope of parabolas; exact for any non-negative w.
    n = w.shape[0]
    q = 0
    s[0] = 0
    t[0] = 0
    for u in range(1, n):
        while q >= 0 and (t[q] - s[q]) ** 2 + w[s[q]] > (t[q] - u) ** 2 + w[u]:
            q -= 1
        if q < 0:
            q = 0
            s[0] = u
        else:
            sep = (u * u - s[q] * s[q] + w[u] - w[s[q]]) // (2 * (u - s[q]))
            pos = 1 + sep
            if pos < n:
                q += 1
                s[q] = u
                t[q] = pos
    for u in range(n - 1, -1, -1):
        out[u] = (u - s[q]) ** 2 + w[s[q]]
        if u == t[q]:
            q -= 1


@numba.njit(cache=True)
def _edt_squared(heights, pad, gz):
    # heights: (W, H) surface z per pixel column, already grid-relative.
    # Returns the (gx, gy, gz) int32 grid of exact squared distances.
    width, height = heights.shape
    gx = width + 2 * pad
    gy = height + 2 * pad
    cap = gx + gy + gz  # sentinel larger than any true distance

    grid = np.full((gx, gy, gz), cap, dtype=np.int32)

    # z pass: one surface voxel per in-image column, |z - zc| analytically;
    # padding columns keep the cap sentinel (> any true distance).
    for x in range(width):
        for y in range(height):
            zc = heights[x, y]
            for z in range(gz):
                dz = z - zc
                grid[x + pad, y + pad, z] = dz if dz >= 0 else -dz

    w = np.empty(gy, dtype=np.int64)
    out = np.empty(gy, dtype=np.int64)
    s = np.empty(gy, dtype=np.int64)
    t = np.empty(gy, dtype=np.int64)
    for x in range(gx):
        for z in range(gz):
            for i in range(gy):
                v = np.int64(grid[x, i, z])
                w[i] = v * v
            _envelope_scan(w, out, s, t)
            for i in range(gy):
                grid[x, i, z] = out[i]

    w = np.empty(gx, dtype=np.int64)
    out = np.empty(gx, dtype=np.int64)
    s = np.empty(gx, dtype=np.int64)
    t = np.empty(gx, dtype=np.int64)
    for y in range(gy):
        for z in range(gz):
            for i in range(gx):
                w[i] = np.int64(grid[i, y, z])
            _envelope_scan(w, out, s, t)
            for i in range(gx):
                grid[i, y, z] = out[i]

    return grid


def _grid_shape(img, r_max):
    height, width = img.shape
    zspan = int(img.max()) - int(img.min()) + 1
    return width + 2 * r_max, height + 2 * r_max, zspan + 2 * r_max


def required_voxels(img, r_max):
    """Voxel count of the padded grid ``dilation_curve`` would allocate."""
    gx, gy, gz = _grid_shape(validate_gray(img), int(r_max))
    return gx * gy * gz


def dilation_curve(img, r_max=10, memory_budget=DEFAULT_MEMORY_BUDGET):
    """Exact dilation volumes of ``img`` for every achievable radius.

    V(d2) includes the surface voxels themselves (distance 0), so the volume
    at the smallest radius is at least width * height.
    """
    img = validate_gray(img)
    radii = achievable_distances(r_max)
    r_max = radii.r_max

    gx, gy, gz = _grid_shape(img, r_max)
    voxels = gx * gy * gz
    allowed = int(memory_budget) // _VOXEL_BYTES
    if voxels > allowed:
        raise MemoryBudgetError(voxels, allowed)
    cap = gx + gy + gz
    if 2 * cap * cap >= 2**31:
        raise ValueError(f"grid extents too large for int32 distances: {cap}")

    heights = np.ascontiguousarray(
        (img.T.astype(np.int32) - int(img.min())) + r_max
    )
    grid = _edt_squared(heights, r_max, gz)

    r2 = r_max * r_max
    flat = grid.ravel()
    counts = np.bincount(flat[flat <= r2], minlength=r2 + 1)
    volumes = np.cumsum(counts, dtype=np.int64)[radii.d2]
    return DilationCurve(radii=radii, volumes=volumes)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

ORACLE_MAX_PIXELS = 64
ORACLE_MAX_INTENSITY = 16


def dilation_curve_oracle(img, r_max):
    """Reference dilation volumes by exhaustive nearest-surface search.

    Every padded-grid voxel is tested against every surface point, so the
    input is capped at 64 pixels with intensities <= 16.
    """
    img = validate_gray(img)
    height, width = img.shape
    if width * height > ORACLE_MAX_PIXELS:
        raise ValueError(f"oracle limited to {ORACLE_MAX_PIXELS} pixels")
    if int(img.max()) > ORACLE_MAX_INTENSITY:
        raise ValueError(f"oracle limited to intensities <= {ORACLE_MAX_INTENSITY}")
    radii = achievable_distances(r_max)
    r_max = radii.r_max

    cols, rows = np.meshgrid(np.arange(width), np.arange(height))
    px = cols.ravel().astype(np.int64)
    py = rows.ravel().astype(np.int64)
    pz = img.ravel().astype(np.int64)

    xs = np.arange(-r_max, width + r_max, dtype=np.int64)
    ys = np.arange(-r_max, height + r_max, dtype=np.int64)
    zs = np.arange(int(img.min()) - r_max, int(img.max()) + r_max + 1, dtype=np.int64)

    d2min = (
        (xs[:, None, None, None] - px) ** 2
        + (ys[None, :, None, None] - py) ** 2
        + (zs[None, None, :, None] - pz) ** 2
    ).min(axis=3)

    volumes = np.array(
        [np.count_nonzero(d2min <= d2) for d2 in radii.d2], dtype=np.int64
    )
    return DilationCurve(radii=radii, volumes=volumes)


def curve_to_csv(curve):
    lines = [CURVE_HEADER]
    for d2, vol in zip(curve.radii.d2, curve.volumes):
        lines.append(f"{d2},{vol}")
    return "\n".join(lines) + "\n"
