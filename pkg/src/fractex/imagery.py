"""Grayscale image I/O, tiling, and dataset manifests.

Images are plain 2D ``numpy.uint8`` arrays (row-major, intensities 0..255).
Supported file formats: PGM P2/P5 with maxval <= 255, and 8-bit PNG
(grayscale or RGB; RGB is converted with BT.601 luma).
"""

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetError, TruncatedImageError, UnsupportedImageError

IMAGE_EXTENSIONS = (".pgm", ".png")

MANIFEST_HEADER = "path,label,index"


def validate_gray(img):
    """Check that ``img`` is a valid grayscale image array and return it.

    Raises ValueError on wrong dimensionality, empty axes, or dtype whose
    values could fall outside 0..255.
    """
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"grayscale image must be 2D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image axes must be >= 1, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"intensities must be integers, got {arr.dtype}")
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def rgb_to_gray(rgb):
    """BT.601 luma conversion, rounded to the nearest integer."""
    rgb = np.asarray(rgb, dtype=np.float64)
    luma = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.rint(luma).astype(np.uint8)


# ---------------------------------------------------------------------------
# PGM / PNG readers
# ---------------------------------------------------------------------------


def _read_pgm_tokens(data, count, path):
    """Read ``count`` whitespace-separated ASCII tokens, skipping # comments."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise TruncatedImageError(f"{path}: header or raster ended early")
        if data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            if eol < 0:
                raise TruncatedImageError(f"{path}: comment ends the file")
            pos = eol + 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def _load_pgm(data, path):
    magic = data[:2]
    plain = magic == b"P2"
    header, pos = _read_pgm_tokens(data[2:], 3, path)
    pos += 2
    try:
        width, height, maxval = (int(tok) for tok in header)
    except ValueError:
        raise UnsupportedImageError(f"{path}: malformed PGM header") from None
    if width < 1 or height < 1:
        raise UnsupportedImageError(f"{path}: non-positive PGM dimensions")
    if not 0 < maxval <= 255:
        raise UnsupportedImageError(
            f"{path}: PGM maxval {maxval} unsupported (need 1..255)"
        )
    count = width * height
    if plain:
        tokens, _ = _read_pgm_tokens(data[pos:], count, path)
        values = []
        for tok in tokens:
            try:
                values.append(int(tok))
            except ValueError:
                raise UnsupportedImageError(
                    f"{path}: non-numeric PGM sample {tok!r}"
                ) from None
        pixels = np.array(values, dtype=np.int64)
    else:
        # single whitespace byte separates maxval from the raster
        raster = data[pos + 1 : pos + 1 + count]
        if len(raster) < count:
            raise TruncatedImageError(
                f"{path}: raster has {len(raster)} of {count} bytes"
            )
        pixels = np.frombuffer(raster, dtype=np.uint8).astype(np.int64)
    if pixels.max(initial=0) > maxval:
        raise UnsupportedImageError(f"{path}: sample exceeds maxval {maxval}")
    return pixels.astype(np.uint8).reshape(height, width)


def _load_png(path):
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode not in ("L", "RGB"):
                raise UnsupportedImageError(
                    f"{path}: PNG mode {mode!r} unsupported (need 8-bit gray or RGB)"
                )
            arr = np.asarray(im)
    except UnidentifiedImageError:
        raise UnsupportedImageError(f"{path}: not a decodable PNG") from None
    except OSError as exc:
        raise TruncatedImageError(f"{path}: PNG decode failed ({exc})") from None
    if arr.ndim == 3:
        return rgb_to_gray(arr)
    return arr.astype(np.uint8)


def load_grayscale(path):
    """Load a PGM (P2/P5) or 8-bit PNG file as a grayscale array.

    Distinct failures raise distinct exceptions: FileNotFoundError for a
    missing file, UnsupportedImageError for unknown magic / bit depth /
    color mode, TruncatedImageError for short pixel data.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    data = path.read_bytes()
    if data[:2] in (b"P2", b"P5"):
        return validate_gray(_load_pgm(data, path))
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return validate_gray(_load_png(path))
    magic = data[:2].decode("ascii", errors="replace")
    raise UnsupportedImageError(f"{path}: unsupported file magic {magic!r}")


def write_pgm(path, img, plain=False):
    """Write a grayscale array as PGM (binary P5, or ASCII P2 when ``plain``)."""
    img = validate_gray(img)
    height, width = img.shape
    buf = io.BytesIO()
    if plain:
        buf.write(f"P2\n{width} {height}\n255\n".encode("ascii"))
        for row in img:
            buf.write((" ".join(str(v) for v in row) + "\n").encode("ascii"))
    else:
        buf.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        buf.write(img.tobytes())
    Path(path).write_bytes(buf.getvalue())


# ---------------------------------------------------------------------------
# Tiling
# ---------------------------------------------------------------------------


def tile_fixed(img, tile_w, tile_h):
    """Cut non-overlapping ``tile_w`` x ``tile_h`` windows, reading order.

    Remainder pixels on the right/bottom edges are discarded, so every tile
    has identical dimensions.
    """
    img = validate_gray(img)
    height, width = img.shape
    if not 1 <= tile_w <= width or not 1 <= tile_h <= height:
        raise ValueError(
            f"tile {tile_w}x{tile_h} does not fit a {width}x{height} image"
        )
    tiles = []
    for ty in range(height // tile_h):
        for tx in range(width // tile_w):
            y0, x0 = ty * tile_h, tx * tile_w
            tiles.append(img[y0 : y0 + tile_h, x0 : x0 + tile_w].copy())
    return tiles


# ---------------------------------------------------------------------------
# Dataset manifests
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: str
    index: int


@dataclass
class DatasetManifest:
    """Sorted (label, filename) listing of a one-directory-per-class tree."""

    entries: list
    classes: list

    def __len__(self):
        return len(self.entries)

    def samples_per_class(self):
        counts = {label: 0 for label in self.classes}
        for entry in self.entries:
            counts[entry.label] += 1
        return counts


def scan_dataset(root):
    """Build a manifest from ``root``, one subdirectory per class.

    Output is sorted by (label, filename), independent of filesystem
    enumeration order.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root is not a directory: {root}")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise DatasetError(f"dataset root has no class subdirectories: {root}")
    entries = []
    classes = []
    for class_dir in class_dirs:
        label = class_dir.name
        files = sorted(
            p for p in class_dir.iterdir()
            if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS
        )
        if not files:
            raise DatasetError(f"class directory has no images: {class_dir}")
        classes.append(label)
        for index, path in enumerate(files):
            entries.append(ManifestEntry(str(path), label, index))
    return DatasetManifest(entries=entries, classes=classes)


def manifest_to_csv(manifest):
    lines = [MANIFEST_HEADER]
    for entry in manifest.entries:
        lines.append(f"{entry.path},{entry.label},{entry.index}")
    return "\n".join(lines) + "\n"


def manifest_from_csv(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != MANIFEST_HEADER:
        raise DatasetError(f"manifest CSV must start with {MANIFEST_HEADER!r}")
    entries = []
    classes = []
    for line in lines[1:]:
        path, label, index = line.rsplit(",", 2)
        if label not in classes:
            classes.append(label)
        entries.append(ManifestEntry(path, label, int(index)))
    return DatasetManifest(entries=entries, classes=sorted(classes))


def require_evaluable(manifest):
    """Evaluation needs >= 2 classes with >= 2 samples each."""
    counts = manifest.samples_per_class()
    if len(counts) < 2:
        raise DatasetError(f"need >= 2 classes, found {len(counts)}")
    thin = [label for label, n in counts.items() if n < 2]
    if thin:
        raise DatasetError(f"classes with < 2 samples: {', '.join(thin)}")
    return manifest
