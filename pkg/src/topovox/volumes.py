"""Core 3D grid types and the global axis convention.

Every volume in this package is a 3D array indexed ``[z, y, x]`` with x the
fastest-varying axis (C order).  Coordinate *tuples* that face the user --
voxel sizes, SWC positions, CLI shape flags -- are written in ``(x, y, z)``
order, matching the SWC convention; conversion happens at the boundary and
nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

# µm per voxel along (x, y, z); oblique light-sheet acquisition default.
DEFAULT_VOXEL_SIZE = (0.406, 0.406, 2.5)

# Symbolic axis name -> array dimension under the (z, y, x) indexing rule.
AXIS_TO_DIM = {"z": 0, "y": 1, "x": 2}


def _check_shape(data: np.ndarray) -> None:
    if data.ndim != 3:
        raise ValueError(f"expected a 3D array, got ndim={data.ndim}")
    if min(data.shape) < 1:
        raise ValueError(f"every shape component must be >= 1, got {data.shape}")


def _check_voxel_size(voxel_size) -> Tuple[float, float, float]:
    vs = tuple(float(v) for v in voxel_size)
    if len(vs) != 3 or any(v <= 0 for v in vs):
        raise ValueError(f"voxel_size must be three positive floats (x, y, z), got {voxel_size!r}")
    return vs


@dataclass(frozen=True)
class RawVolume:
    """Real-valued intensity grid; finite, non-negative, float32.

    ``voxel_size`` is (x, y, z) in µm.
    """

    data: np.ndarray
    voxel_size: Tuple[float, float, float] = DEFAULT_VOXEL_SIZE

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float32)
        _check_shape(data)
        if not np.all(np.isfinite(data)):
            raise ValueError("raw intensities must be finite")
        if data.min() < 0:
            raise ValueError("raw intensities must be >= 0")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "voxel_size", _check_voxel_size(self.voxel_size))

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape


@dataclass(frozen=True)
class LabelVolume:
    """Binary grid, one uint8 value in {0, 1} per voxel."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        _check_shape(data)
        if data.dtype != np.uint8:
            if data.dtype == bool:
                data = data.astype(np.uint8)
            else:
                converted = data.astype(np.uint8)
                if not np.array_equal(converted, data):
                    raise ValueError("label values must be exactly 0 or 1")
                data = converted
        if data.max(initial=0) > 1:
            raise ValueError("label values must be exactly 0 or 1")
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape

    def count(self) -> int:
        """Number of foreground voxels."""
        return int(self.data.sum())


@dataclass(frozen=True)
class PredictionVolume:
    """Real-valued grid with every value in [0, 1] (network output)."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float32)
        _check_shape(data)
        if not np.all(np.isfinite(data)):
            raise ValueError("prediction values must be finite")
        if data.min() < 0 or data.max() > 1:
            raise ValueError("prediction values must lie in [0, 1]")
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape


@dataclass(frozen=True)
class WeightVolume:
    """Per-voxel loss weights, every weight >= 1."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float32)
        _check_shape(data)
        if data.min(initial=1.0) < 1.0:
            raise ValueError("every weight must be >= 1")
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape


@dataclass(frozen=True)
class Grid:
    """A target voxel grid: shape in (z, y, x) plus physical voxel size.

    Converts between physical µm positions (x, y, z) and voxel indices
    (z, y, x).  Positions map to the nearest voxel center, halves rounding
    up, so the rule is deterministic and documented once.
    """

    shape: Tuple[int, int, int]
    voxel_size: Tuple[float, float, float] = DEFAULT_VOXEL_SIZE

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        if len(shape) != 3 or min(shape) < 1:
            raise ValueError(f"grid shape must be three positive ints (z, y, x), got {self.shape!r}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "voxel_size", _check_voxel_size(self.voxel_size))

    def index_of(self, position_um) -> Tuple[int, int, int]:
        """Voxel index (z, y, x) of a physical position (x, y, z) in µm."""
        x, y, z = (float(v) for v in position_um)
        vx, vy, vz = self.voxel_size
        idx = (int(np.floor(z / vz + 0.5)), int(np.floor(y / vy + 0.5)), int(np.floor(x / vx + 0.5)))
        return idx

    def contains(self, index_zyx) -> bool:
        return all(0 <= i < s for i, s in zip(index_zyx, self.shape))
