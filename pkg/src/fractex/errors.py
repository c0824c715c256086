"""Exception types shared across the package."""


class ImageError(ValueError):
    """Base class for image decoding problems."""


class UnsupportedImageError(ImageError):
    """File magic, bit depth, or color mode outside the supported set."""


class TruncatedImageError(ImageError):
    """File ended before the full pixel raster was read."""


class DatasetError(ValueError):
    """Dataset tree or feature table unusable (empty class, bad labels, ...)."""


class MemoryBudgetError(Exception):
    """Voxel grid would exceed the configured memory budget."""

    def __init__(self, required_voxels, allowed_voxels):
        self.required_voxels = int(required_voxels)
        self.allowed_voxels = int(allowed_voxels)
        super().__init__(
            f"voxel grid needs {self.required_voxels} voxels "
            f"but the memory budget allows {self.allowed_voxels}"
        )
