"""Parameterized synthetic textures for desk-scale benchmark runs.

Three generator families with class-specific parameters: sinusoidal
gratings (frequency/orientation), checkerboards (period), and smoothed
value noise (kernel width). Within a class, samples vary by random phase,
offsets, and additive noise; everything is reproducible from the dataset
seed.
"""

from pathlib import Path

import numpy as np

from .imagery import write_pgm

MAX_CLASSES = 8

_PRESETS = [
    ("grating", {"freq": 4.0, "angle_deg": 15.0}),
    ("checker", {"period": 6}),
    ("noise", {"smooth": 3}),
    ("grating", {"freq": 12.0, "angle_deg": 70.0}),
    ("noise", {"smooth": 12}),
    ("checker", {"period": 12}),
    ("grating", {"freq": 7.0, "angle_deg": 40.0}),
    ("noise", {"smooth": 5}),
]


def _coords(size):
    axis = np.arange(size, dtype=np.float64)
    return np.meshgrid(axis, axis, indexing="xy")


def _clip_u8(img):
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def grating(size, freq, angle_deg, rng):
    xx, yy = _coords(size)
    angle = np.deg2rad(angle_deg + rng.uniform(-3.0, 3.0))
    freq = freq * rng.uniform(0.95, 1.05)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    wave = np.sin(
        2.0 * np.pi * freq * (xx * np.cos(angle) + yy * np.sin(angle)) / size + phase
    )
    return _clip_u8(127.5 + 100.0 * wave + rng.normal(0.0, 8.0, (size, size)))


def checkerboard(size, period, rng):
    xx, yy = _coords(size)
    ox = rng.integers(0, period)
    oy = rng.integers(0, period)
    cells = ((xx + ox) // period + (yy + oy) // period) % 2
    return _clip_u8(40.0 + 175.0 * cells + rng.normal(0.0, 10.0, (size, size)))


def _box_blur(a, radius):
    if radius <= 0:
        return a
    width = 2 * radius + 1
    for axis in (0, 1):
        pad = [(0, 0), (0, 0)]
        pad[axis] = (radius, radius)
        padded = np.pad(a, pad, mode="reflect")
        csum = np.cumsum(padded, axis=axis)
        lead = np.take(csum, range(width - 1, padded.shape[axis]), axis=axis)
        lag = np.take(csum, range(0, padded.shape[axis] - width), axis=axis)
        zero = np.take(csum, [width - 1], axis=axis) * 0.0
        a = (lead - np.concatenate([zero, lag], axis=axis)) / width
    return a


def value_noise(size, smooth, rng):
    field = rng.uniform(0.0, 255.0, (size, size))
    for _ in range(3):
        field = _box_blur(field, smooth)
    lo, hi = field.min(), field.max()
    return _clip_u8((field - lo) / (hi - lo) * 255.0)


_GENERATORS = {
    "grating": lambda size, params, rng: grating(size, rng=rng, **params),
    "checker": lambda size, params, rng: checkerboard(size, params["period"], rng),
    "noise": lambda size, params, rng: value_noise(size, params["smooth"], rng),
}


def render_sample(class_index, sample_index, size, seed):
    """One deterministic sample image of a preset class."""
    family, params = _PRESETS[class_index]
    rng = np.random.default_rng([seed, class_index, sample_index])
    return _GENERATORS[family](size, params, rng)


def class_label(class_index):
    family, _ = _PRESETS[class_index]
    return f"class{class_index:02d}_{family}"


def generate_synthetic(out_dir, n_classes, samples_per_class, size, seed):
    """Write a class-per-directory PGM tree; byte-identical per seed."""
    if not 2 <= n_classes <= MAX_CLASSES:
        raise ValueError(f"n_classes must be in [2, {MAX_CLASSES}], got {n_classes}")
    if size < 32:
        raise ValueError(f"size must be >= 32, got {size}")
    if samples_per_class < 1:
        raise ValueError(f"samples_per_class must be >= 1, got {samples_per_class}")
    out_dir = Path(out_dir)
    for k in range(n_classes):
        class_dir = out_dir / class_label(k)
        class_dir.mkdir(parents=True, exist_ok=True)
        for s in range(samples_per_class):
            write_pgm(class_dir / f"sample{s:02d}.pgm", render_sample(k, s, size, seed))
    return out_dir
