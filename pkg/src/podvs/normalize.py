"""Map normalization operators and final saliency fusion.

The first operator (N1) multiplies a map globally by (m - mbar)**2,
where m is the global maximum and mbar the average of the other local
maxima: maps dominated by a single peak are promoted, maps with many
comparable peaks are suppressed.  The second operator (N2) first
rescales the map to a fixed range so that channels of different
modality compete fairly, then applies the same peak statistic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .channels import ChannelId
from .config import EngineConfig
from .errors import ConfigError, DimensionError
from .pyramid import ImagePyramid, collapse


@dataclass(frozen=True)
class LocalMaximaParams:
    """Neighborhood radius and inclusion threshold for peak detection."""

    radius: int = 1
    threshold: float = 0.05

    def __post_init__(self):
        if self.radius < 1:
            raise ConfigError("maxima radius must be >= 1")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError("maxima threshold must be in (0, 1)")

    @classmethod
    def from_config(cls, cfg: EngineConfig) -> "LocalMaximaParams":
        return cls(cfg.maxima_radius, cfg.maxima_threshold)


def local_maxima(map_: np.ndarray, params: LocalMaximaParams = LocalMaximaParams()):
    """Pixels strictly above every neighbor within the radius.

    Only peaks reaching threshold * global_max are kept.  Returns a
    list of (x, y, value); on a constant map there are no strict maxima
    and the list is empty.
    """
    map_ = np.asarray(map_, dtype=np.float64)
    if map_.size == 0:
        raise DimensionError("empty map")
    size = 2 * params.radius + 1
    footprint = np.ones((size, size), dtype=bool)
    footprint[params.radius, params.radius] = False
    neighbor_max = ndimage.maximum_filter(
        map_, footprint=footprint, mode="constant", cval=-np.inf
    )
    floor = params.threshold * float(map_.max())
    ys, xs = np.nonzero((map_ > neighbor_max) & (map_ >= floor))
    return [(int(x), int(y), float(map_[y, x])) for y, x in zip(ys, xs)]


def _peak_factor(map_: np.ndarray, params: LocalMaximaParams) -> float:
    m = float(map_.max())
    values = [v for _, _, v in local_maxima(map_, params)]
    # One instance at the global maximum belongs to m itself; the rest
    # are the "other" maxima.  A plateau global max never enters values.
    if m in values:
        values.remove(m)
    mbar = float(np.mean(values)) if values else 0.0
    return (m - mbar) ** 2


def normalize_n1(
    map_: np.ndarray, params: LocalMaximaParams = LocalMaximaParams()
) -> np.ndarray:
    """Promote single-peak maps: map * (m - mbar)**2."""
    map_ = np.asarray(map_, dtype=np.float64)
    return map_ * _peak_factor(map_, params)


def rescale_to_range(map_: np.ndarray, ceiling: float) -> np.ndarray:
    """Affine rescale onto [0, ceiling]; an all-equal map becomes zero."""
    map_ = np.asarray(map_, dtype=np.float64)
    lo = float(map_.min())
    hi = float(map_.max())
    if hi <= lo:
        return np.zeros_like(map_)
    return (map_ - lo) * (ceiling / (hi - lo))


def normalize_n2(
    map_: np.ndarray,
    ceiling: float = 1.0,
    params: LocalMaximaParams = LocalMaximaParams(),
) -> np.ndarray:
    """Range-normalize to [0, ceiling], then apply the N1 statistic.

    The rescale step makes the operator invariant to any positive
    affine transform of the input, so channels with incomparable units
    can be fused.
    """
    return normalize_n1(rescale_to_range(map_, ceiling), params)


def fuse(grouping_pyramids: dict, cfg: EngineConfig) -> np.ndarray:
    """Conspicuity formation and linear fusion into one saliency map.

    Per channel: N1 on every pyramid level, collapse to the base
    resolution, N2 on the conspicuity map; the nine results are summed
    in fixed channel order and the final map rescaled to [0, 1].
    """
    if set(grouping_pyramids) != set(ChannelId):
        missing = set(ChannelId) - set(grouping_pyramids)
        raise DimensionError(f"missing channels: {sorted(c.value for c in missing)}")
    params = LocalMaximaParams.from_config(cfg)
    total = np.zeros((cfg.height, cfg.width), dtype=np.float64)
    for cid in ChannelId:
        levels = [normalize_n1(level, params) for level in grouping_pyramids[cid]]
        conspicuity = collapse(ImagePyramid(tuple(levels)), cfg.height, cfg.width)
        total += normalize_n2(conspicuity, cfg.range_ceiling, params)
    return rescale_to_range(total, 1.0)
