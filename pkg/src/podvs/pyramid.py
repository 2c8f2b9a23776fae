"""Multi-resolution decomposition and across-scale collapse.

Two pyramid flavors:

* reference: levels shrink in steps of sqrt(2) from the base resolution
  (rounded half-up), resampled with bilinear interpolation;
* hardware: the three fixed level sizes of the reduced-resolution modes,
  subsampled nearest-neighbor with the source address computed by the
  frozen shift-based multiply approximation below (every level reads
  directly from the root image, as the parallel downsamplers do).

The shift table maps (src_dim, dst_dim) to (Q, s) with Q/2**s the
closest Q <= 65535 approximation of src/dst; a target index x reads
source index (x*Q) >> s.  Because Q may sit just below the exact ratio,
the address occasionally lands one pixel before the exact rational
floor(x*src/dst); those deviations are deterministic and frozen.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

#: Frozen (src_dim, dst_dim) -> (Q, s) address-scaling constants.
SHIFT_TABLE = {
    # downsampling, 112x84 root
    (112, 80): (45875, 15),
    (84, 60): (45875, 15),
    (112, 56): (32768, 14),
    (84, 44): (62557, 15),
    # downsampling, 80x60 root
    (80, 56): (46811, 15),
    (60, 44): (44684, 15),
    (80, 40): (32768, 14),
    (60, 30): (32768, 14),
    # upsampling (coarse level read from a finer grid)
    (80, 112): (46811, 16),
    (60, 84): (46811, 16),
    (56, 112): (32768, 16),
    (44, 84): (34328, 16),
    (56, 80): (45875, 16),
    (44, 60): (48060, 16),
    (40, 80): (32768, 16),
    (30, 60): (32768, 16),
    (40, 56): (46811, 16),
    (30, 44): (44684, 16),
}

#: Hardware pyramid level sizes (width, height), finest first.
HW_LEVELS = {
    (112, 84): ((112, 84), (80, 60), (56, 44)),
    (80, 60): ((80, 60), (56, 44), (40, 30)),
}


def shift_params(src_dim: int, dst_dim: int):
    """Derive the (Q, s) pair; SHIFT_TABLE holds the frozen results."""
    ratio = src_dim / dst_dim
    s = 0
    while round(ratio * (1 << (s + 1))) <= 0xFFFF:
        s += 1
    return round(ratio * (1 << s)), s


def shift_index(x, src_dim: int, dst_dim: int):
    """Source index for target index x under the frozen approximation."""
    q, s = SHIFT_TABLE[(src_dim, dst_dim)]
    return (np.asarray(x, dtype=np.int64) * q) >> s


@dataclass(frozen=True)
class ImagePyramid:
    """Ordered stack of maps, level 0 finest; strictly shrinking."""

    levels: tuple

    def __post_init__(self):
        if not self.levels:
            raise DimensionError("pyramid must have at least one level")
        for fine, coarse in zip(self.levels, self.levels[1:]):
            if not (coarse.shape[0] < fine.shape[0] and coarse.shape[1] < fine.shape[1]):
                raise DimensionError(
                    f"levels must strictly shrink: {fine.shape} -> {coarse.shape}"
                )

    def __len__(self) -> int:
        return len(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    @property
    def base_shape(self):
        return self.levels[0].shape


def reference_level_dims(width: int, height: int, depth: int):
    """(width, height) per level, shrinking by sqrt(2), rounded half-up."""
    dims = []
    for i in range(depth):
        scale = 2.0 ** (-i / 2.0)
        dims.append(
            (int(np.floor(width * scale + 0.5)), int(np.floor(height * scale + 0.5)))
        )
    return dims


def bilinear_resize(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Pixel-center-aligned bilinear resample to (out_h, out_w)."""
    src = np.asarray(src, dtype=np.float64)
    in_h, in_w = src.shape
    if out_h == in_h and out_w == in_w:
        return src.copy()
    ys = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0.0, in_h - 1.0)
    xs = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0.0, in_w - 1.0)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = src[np.ix_(y0, x0)] * (1 - wx) + src[np.ix_(y0, x1)] * wx
    bot = src[np.ix_(y1, x0)] * (1 - wx) + src[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bot * wy


def build_reference_pyramid(map_: np.ndarray, depth: int) -> ImagePyramid:
    """sqrt(2)-step bilinear pyramid with `depth` levels."""
    map_ = np.asarray(map_, dtype=np.float64)
    h, w = map_.shape
    dims = reference_level_dims(w, h, depth)
    if any(dw < 2 or dh < 2 for dw, dh in dims):
        raise DimensionError(
            f"depth {depth} would shrink {w}x{h} below 2x2"
        )
    levels = [map_.astype(np.float64)]
    for dw, dh in dims[1:]:
        levels.append(bilinear_resize(map_, dh, dw))
    return ImagePyramid(tuple(levels))


def hw_level_sizes(width: int, height: int):
    try:
        return HW_LEVELS[(width, height)]
    except KeyError:
        raise DimensionError(
            f"no hardware pyramid defined for {width}x{height}"
        ) from None


def nn_shift_resample(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Nearest-neighbor resample through the frozen shift addresses."""
    in_h, in_w = src.shape
    rows = shift_index(np.arange(out_h), in_h, out_h)
    cols = shift_index(np.arange(out_w), in_w, out_w)
    return src[np.ix_(rows, cols)]


def build_hw_pyramid(map_: np.ndarray) -> ImagePyramid:
    """Three-level hardware pyramid; every level reads from the root."""
    h, w = map_.shape
    sizes = hw_level_sizes(w, h)
    levels = [np.asarray(map_)]
    for dw, dh in sizes[1:]:
        levels.append(nn_shift_resample(levels[0], dh, dw))
    return ImagePyramid(tuple(levels))


def collapse(pyr: ImagePyramid, out_h: int, out_w: int) -> np.ndarray:
    """Bilinearly rescale every level to a common size and sum."""
    acc = np.zeros((out_h, out_w), dtype=np.float64)
    for level in pyr.levels:
        acc += bilinear_resize(level, out_h, out_w)
    return acc


def downsample_cycles(width: int, height: int) -> int:
    """Modeled clock cycles for the hardware pyramid stage.

    5 CC per pixel (address, read, write); the two extra levels run in
    parallel, so the larger one bounds the stage.
    """
    sizes = hw_level_sizes(width, height)
    dw, dh = sizes[1]
    return dw * dh * 5
