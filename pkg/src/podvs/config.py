"""Shared data model and configuration.

Field maps are plain 2-D float64 numpy arrays (row-major, origin at the
top-left, y grows downward).  Everything here is immutable after
construction and safe to share across threads.
"""
from __future__ import annotations

import collections
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import ConfigError, DimensionError

#: Number of temporal taps: the current frame plus five previous ones.
TAP_COUNT = 6


class Resolution(Enum):
    """Input resolution mode.

    Each mode pins the grouping kernel size and pyramid depth; mixed
    combinations are not constructible.
    """

    REFERENCE = (640, 480, 11, 10)
    HW_112 = (112, 84, 5, 3)
    HW_80 = (80, 60, 5, 3)

    @property
    def width(self) -> int:
        return self.value[0]

    @property
    def height(self) -> int:
        return self.value[1]

    @property
    def kernel_size(self) -> int:
        return self.value[2]

    @property
    def pyramid_depth(self) -> int:
        return self.value[3]

    @classmethod
    def from_string(cls, text: str) -> "Resolution":
        table = {
            "640x480": cls.REFERENCE,
            "112x84": cls.HW_112,
            "80x60": cls.HW_80,
        }
        key = text.strip().lower()
        if key not in table:
            raise ConfigError(
                f"resolution must be one of {sorted(table)}, got {text!r}"
            )
        return table[key]

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"


@dataclass(frozen=True)
class EngineConfig:
    """Validated engine parameters.

    Unset keys take the defaults below; kernel size and pyramid depth
    always follow the resolution mode.
    """

    resolution: Resolution = Resolution.REFERENCE
    frame_rate: float = 24.0
    inhibition_weight: float = 1.0      # w_p in the grouping stage
    range_ceiling: float = 1.0          # upper bound of the pre-N1 rescale
    maxima_radius: int = 1              # local-maxima neighborhood radius
    maxima_threshold: float = 0.05      # fraction of the global max
    word_bits: int = 18                 # fixed-point intermediate width
    fraction_bits: int = 8              # fixed-point fraction bits

    def __post_init__(self):
        if self.frame_rate <= 0:
            raise ConfigError("frame rate must be positive")
        if self.inhibition_weight < 0:
            raise ConfigError("inhibition_weight must be >= 0")
        if self.range_ceiling <= 0:
            raise ConfigError("range_ceiling must be positive")
        if self.maxima_radius < 1:
            raise ConfigError("maxima_radius must be >= 1")
        if not 0.0 < self.maxima_threshold < 1.0:
            raise ConfigError("maxima_threshold must be in (0, 1)")
        if self.word_bits < self.fraction_bits or self.word_bits < 2:
            raise ConfigError("word_bits must be >= fraction_bits and >= 2")

    @property
    def width(self) -> int:
        return self.resolution.width

    @property
    def height(self) -> int:
        return self.resolution.height

    @property
    def kernel_size(self) -> int:
        return self.resolution.kernel_size

    @property
    def pyramid_depth(self) -> int:
        return self.resolution.pyramid_depth

    @property
    def frame_period_ms(self) -> float:
        return 1000.0 / self.frame_rate

    def to_text(self) -> str:
        """Serialize as flat key=value lines (the config-file format)."""
        lines = [
            f"resolution={self.resolution}",
            f"frame_rate={_fmt(self.frame_rate)}",
            f"inhibition_weight={_fmt(self.inhibition_weight)}",
            f"range_ceiling={_fmt(self.range_ceiling)}",
            f"maxima_radius={self.maxima_radius}",
            f"maxima_threshold={_fmt(self.maxima_threshold)}",
            f"word_bits={self.word_bits}",
            f"fraction_bits={self.fraction_bits}",
        ]
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))


_PARSERS = {
    "resolution": Resolution.from_string,
    "frame_rate": float,
    "inhibition_weight": float,
    "range_ceiling": float,
    "maxima_radius": int,
    "maxima_threshold": float,
    "word_bits": int,
    "fraction_bits": int,
}


def parse_config(text: str) -> EngineConfig:
    """Parse key=value lines into a validated config.

    Blank lines and lines starting with '#' are ignored; unknown keys
    are errors.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](val.strip())
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    try:
        return EngineConfig(**values)
    except TypeError as exc:  # pragma: no cover - guarded by _PARSERS
        raise ConfigError(str(exc)) from exc


def load_config(path) -> EngineConfig:
    """Read and parse a config file.  An empty file yields the defaults."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


@dataclass(frozen=True)
class FrameRGB:
    """One 8-bit RGB video frame, stored as three (height, width) planes."""

    r: np.ndarray
    g: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        shapes = {self.r.shape, self.g.shape, self.b.shape}
        if len(shapes) != 1:
            raise DimensionError(f"color planes disagree: {sorted(shapes)}")
        h, w = self.r.shape
        if h <= 0 or w <= 0:
            raise DimensionError(f"degenerate frame {w}x{h}")
        for plane in (self.r, self.g, self.b):
            plane.setflags(write=False)

    @property
    def width(self) -> int:
        return self.r.shape[1]

    @property
    def height(self) -> int:
        return self.r.shape[0]

    @classmethod
    def from_planes(cls, r, g, b) -> "FrameRGB":
        return cls(
            np.ascontiguousarray(r, dtype=np.uint8),
            np.ascontiguousarray(g, dtype=np.uint8),
            np.ascontiguousarray(b, dtype=np.uint8),
        )

    @classmethod
    def from_gray(cls, gray) -> "FrameRGB":
        gray = np.ascontiguousarray(gray, dtype=np.uint8)
        return cls(gray, gray.copy(), gray.copy())


def validate_frame(frame: FrameRGB, cfg: EngineConfig) -> None:
    """Accept a frame iff its dimensions match the configured resolution."""
    if (frame.width, frame.height) != (cfg.width, cfg.height):
        raise DimensionError(
            f"frame is {frame.width}x{frame.height}, "
            f"config expects {cfg.width}x{cfg.height}"
        )


class FrameHistory:
    """Ring of the current frame plus up to TAP_COUNT-1 previous frames.

    Entry 0 is the current frame, entry t the frame t steps in the past.
    Before the ring fills, missing history is padded with clones of the
    earliest available frame so that video starts produce no spurious
    onset transient.
    """

    def __init__(self, frame_period_ms: float, depth: int = TAP_COUNT):
        if frame_period_ms <= 0:
            raise ConfigError("frame period must be positive")
        if depth < 1:
            raise ConfigError("history depth must be >= 1")
        self.frame_period_ms = float(frame_period_ms)
        self.depth = int(depth)
        self._ring: collections.deque[FrameRGB] = collections.deque(maxlen=depth)

    def __len__(self) -> int:
        return len(self._ring)

    def push(self, frame: FrameRGB) -> None:
        if self._ring and self._ring[0].r.shape != frame.r.shape:
            raise DimensionError("frame dimensions changed mid-sequence")
        self._ring.appendleft(frame)

    def frame_at(self, t: int) -> FrameRGB:
        """Frame t steps in the past, clamped to the oldest available."""
        if not self._ring:
            raise DimensionError("history is empty")
        return self._ring[min(t, len(self._ring) - 1)]

    def plane_stack(self, plane: str) -> np.ndarray:
        """(depth, H, W) float64 stack of one color plane, newest first."""
        return np.stack(
            [getattr(self.frame_at(t), plane).astype(np.float64) for t in range(self.depth)]
        )

    def intensity_stack(self) -> np.ndarray:
        """(depth, H, W) float64 stack of per-frame intensity, newest first."""
        out = []
        for t in range(self.depth):
            f = self.frame_at(t)
            out.append(
                (f.r.astype(np.float64) + f.g.astype(np.float64) + f.b.astype(np.float64)) / 3.0
            )
        return np.stack(out)


@dataclass(frozen=True)
class FixationRecord:
    """One eye-fixation sample: where one subject looked at one frame."""

    video: str
    frame: int
    subject: str
    x: int
    y: int

    def __post_init__(self):
        if self.frame < 0:
            raise ConfigError(f"negative frame index {self.frame}")
        if self.x < 0 or self.y < 0:
            raise ConfigError(f"negative fixation coordinate ({self.x}, {self.y})")


def hw_variant(cfg: EngineConfig, resolution: Resolution) -> EngineConfig:
    """The same config retargeted at another resolution mode."""
    return replace(cfg, resolution=resolution)
