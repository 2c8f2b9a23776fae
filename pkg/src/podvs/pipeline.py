"""Per-frame orchestration: history, channels, grouping, fusion.

A Pipeline instance owns its frame history (single writer); everything
downstream of channel extraction is pure, so the nine channels can fan
out to worker threads.  Within a channel all reductions run in fixed
row-major order, which keeps the output bitwise independent of the
thread count.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import extract_all
from .config import EngineConfig, FrameHistory, FrameRGB, Resolution, validate_frame
from .errors import DimensionError
from .grouping import grouping_pyramid
from .kernels import GroupingBanks, build_banks
from .normalize import fuse
from .pyramid import (
    ImagePyramid,
    bilinear_resize,
    build_hw_pyramid,
    build_reference_pyramid,
    nn_shift_resample,
)
from .temporal import STRONGLY_PHASIC, WEAKLY_PHASIC, make_kernel


def thread_budget() -> int:
    """Channel-parallelism cap from PODVS_THREADS (default serial)."""
    raw = os.environ.get("PODVS_THREADS", "1")
    try:
        return max(1, min(9, int(raw)))
    except ValueError:
        return 1


def build_channel_pyramid(map_: np.ndarray, cfg: EngineConfig) -> ImagePyramid:
    """Float pyramid for one channel map under the configured mode.

    Reference mode shrinks by sqrt(2) with bilinear resampling; the
    reduced modes use the fixed hardware level structure (nearest
    neighbor through the frozen shift addresses) regardless of the
    arithmetic, so fixed-versus-float comparisons isolate precision.
    """
    if cfg.resolution is Resolution.REFERENCE:
        return build_reference_pyramid(map_, cfg.pyramid_depth)
    return build_hw_pyramid(np.asarray(map_, dtype=np.float64))


def mode_upsampler(cfg: EngineConfig):
    """The across-level index mapping of the configured mode."""
    if cfg.resolution is Resolution.REFERENCE:
        return bilinear_resize
    return nn_shift_resample


class Pipeline:
    """Stateful per-frame saliency computation for one video."""

    def __init__(self, cfg: EngineConfig, banks: GroupingBanks | None = None):
        self.cfg = cfg
        self.banks = banks if banks is not None else build_banks(cfg.kernel_size)
        if self.banks.size != cfg.kernel_size:
            raise DimensionError(
                f"banks are {self.banks.size}x{self.banks.size}, "
                f"config wants {cfg.kernel_size}"
            )
        self.kernel_strong = make_kernel(STRONGLY_PHASIC, cfg.frame_period_ms)
        self.kernel_weak = make_kernel(WEAKLY_PHASIC, cfg.frame_period_ms)
        self.history = FrameHistory(cfg.frame_period_ms)
        self.frame_index = 0

    def _channel_grouping(self, channel_map: np.ndarray):
        pyr = build_channel_pyramid(channel_map, self.cfg)
        return grouping_pyramid(
            pyr, self.banks, self.cfg.inhibition_weight, mode_upsampler(self.cfg)
        )

    def step(self, frame: FrameRGB) -> np.ndarray:
        """Advance one frame and return its saliency map in [0, 1]."""
        validate_frame(frame, self.cfg)
        self.history.push(frame)
        self.frame_index += 1
        channels = extract_all(self.history, self.kernel_strong, self.kernel_weak)

        # The four orientation channels share one input array; compute
        # each distinct input once.
        unique: dict[int, np.ndarray] = {}
        for arr in channels.values():
            unique.setdefault(id(arr), arr)
        workers = min(thread_budget(), len(unique))
        keys = list(unique)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(self._channel_grouping, (unique[k] for k in keys)))
        else:
            results = [self._channel_grouping(unique[k]) for k in keys]
        by_id = dict(zip(keys, results))
        grouped = {cid: by_id[id(arr)] for cid, arr in channels.items()}
        return fuse(grouped, self.cfg)


@dataclass(frozen=True)
class TimingReport:
    """Wall-clock per-frame timings of one run."""

    seconds_per_frame: tuple

    @property
    def total_seconds(self) -> float:
        return float(sum(self.seconds_per_frame))

    @property
    def mean_fps(self) -> float:
        total = self.total_seconds
        return len(self.seconds_per_frame) / total if total > 0 else float("inf")


def run_sequence(frames, cfg: EngineConfig, banks: GroupingBanks | None = None):
    """Run a whole frame sequence; returns (maps, timing report)."""
    frames = list(frames)
    if not frames:
        raise DimensionError("empty frame sequence")
    pipe = Pipeline(cfg, banks)
    maps, timings = [], []
    for frame in frames:
        start = time.perf_counter()
        maps.append(pipe.step(frame))
        timings.append(time.perf_counter() - start)
    return maps, TimingReport(tuple(timings))
