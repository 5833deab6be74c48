"""Chunked on-disk volume store.

A stored volume is a directory holding ``manifest.json`` plus one raw
little-endian binary file per chunk, named ``c_<zi>_<yi>_<xi>.bin`` after its
grid position.  Chunk files contain the chunk's voxels in C order (x fastest);
trailing chunks are partial and store only their true extent.  Two dtype tags
exist: ``uint1`` (binary labels, one byte per voxel holding 0/1) and ``f32``
(little-endian float32).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from .volumes import LabelVolume, PredictionVolume, RawVolume, WeightVolume

FORMAT_NAME = "topovox-chunks-v1"

_TAG_TO_DTYPE = {"uint1": np.dtype("u1"), "f32": np.dtype("<f4")}


class ChunkStoreError(Exception):
    """Base error for chunk-store I/O problems (exit code 2 at the CLI)."""


class MissingChunkError(ChunkStoreError):
    pass


class ChecksumError(ChunkStoreError):
    pass


def chunk_id(grid_pos: Sequence[int]) -> str:
    zi, yi, xi = grid_pos
    return f"c_{zi}_{yi}_{xi}"


@dataclass
class ChunkManifest:
    """Index of a chunked volume: grid layout, dtype tag, per-chunk checksums."""

    volume_shape: Tuple[int, int, int]
    chunk_shape: Tuple[int, int, int]
    dtype: str
    chunks: list  # [{"id", "grid", "shape"}] sorted by grid position
    checksums: dict  # chunk id -> sha256 hex
    axis_order: str = "zyx"
    voxel_size: Optional[Tuple[float, float, float]] = None
    directory: Optional[Path] = None  # runtime only, not serialized

    def __post_init__(self):
        self.volume_shape = tuple(int(s) for s in self.volume_shape)
        self.chunk_shape = tuple(int(s) for s in self.chunk_shape)
        if self.dtype not in _TAG_TO_DTYPE:
            raise ChunkStoreError(f"unknown dtype tag {self.dtype!r}")
        if self.axis_order != "zyx":
            raise ChunkStoreError(f"unsupported axis order {self.axis_order!r}")

    @property
    def grid_shape(self) -> Tuple[int, int, int]:
        return tuple(-(-v // c) for v, c in zip(self.volume_shape, self.chunk_shape))

    @property
    def numpy_dtype(self) -> np.dtype:
        return _TAG_TO_DTYPE[self.dtype]

    def chunk_origin(self, grid_pos: Sequence[int]) -> Tuple[int, int, int]:
        return tuple(g * c for g, c in zip(grid_pos, self.chunk_shape))

    def chunk_extent(self, grid_pos: Sequence[int]) -> Tuple[int, int, int]:
        return tuple(
            min(c, v - g * c) for g, c, v in zip(grid_pos, self.chunk_shape, self.volume_shape)
        )

    def to_dict(self) -> dict:
        out = {
            "format": FORMAT_NAME,
            "volume_shape": list(self.volume_shape),
            "chunk_shape": list(self.chunk_shape),
            "dtype": self.dtype,
            "axis_order": self.axis_order,
            "chunks": self.chunks,
            "checksums": self.checksums,
        }
        if self.voxel_size is not None:
            out["voxel_size"] = list(self.voxel_size)
        return out

    def save(self, directory) -> Path:
        directory = Path(directory)
        path = directory / "manifest.json"
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.directory = directory
        return path

    @classmethod
    def load(cls, directory) -> "ChunkManifest":
        directory = Path(directory)
        path = directory if directory.name == "manifest.json" else directory / "manifest.json"
        if not path.is_file():
            raise ChunkStoreError(f"no manifest.json under {directory}")
        doc = json.loads(path.read_text(encoding="utf-8"))
        manifest = cls(
            volume_shape=doc["volume_shape"],
            chunk_shape=doc["chunk_shape"],
            dtype=doc["dtype"],
            chunks=doc["chunks"],
            checksums=doc["checksums"],
            axis_order=doc.get("axis_order", "zyx"),
            voxel_size=tuple(doc["voxel_size"]) if "voxel_size" in doc else None,
        )
        manifest.directory = path.parent
        return manifest


def _dtype_tag_for(volume) -> str:
    if isinstance(volume, LabelVolume):
        return "uint1"
    if isinstance(volume, (RawVolume, PredictionVolume, WeightVolume)):
        return "f32"
    raise TypeError(f"cannot infer dtype tag for {type(volume).__name__}")


def encode_chunk(data: np.ndarray, tag: str) -> bytes:
    return np.ascontiguousarray(data.astype(_TAG_TO_DTYPE[tag], copy=False)).tobytes()


def write_chunk_file(directory: Path, cid: str, data: np.ndarray, tag: str) -> str:
    """Write one chunk file, return its sha256 checksum (one writer per file)."""
    payload = encode_chunk(data, tag)
    (Path(directory) / f"{cid}.bin").write_bytes(payload)
    return hashlib.sha256(payload).hexdigest()


def chunk_write(volume, chunk_shape, directory) -> ChunkManifest:
    """Tile a volume into chunk files plus a manifest.

    Every voxel is stored exactly once; the chunk grid is the ceiling
    tiling of the volume shape, so the last chunk along an axis may be
    partial.
    """
    chunk_shape = tuple(int(c) for c in chunk_shape)
    if len(chunk_shape) != 3 or min(chunk_shape) < 1:
        raise ValueError(f"chunk_shape components must be >= 1, got {chunk_shape!r}")
    tag = _dtype_tag_for(volume)
    data = volume.data
    voxel_size = getattr(volume, "voxel_size", None)

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    manifest = ChunkManifest(
        volume_shape=data.shape,
        chunk_shape=chunk_shape,
        dtype=tag,
        chunks=[],
        checksums={},
        voxel_size=voxel_size,
    )
    gz, gy, gx = manifest.grid_shape
    for zi in range(gz):
        for yi in range(gy):
            for xi in range(gx):
                pos = (zi, yi, xi)
                origin = manifest.chunk_origin(pos)
                extent = manifest.chunk_extent(pos)
                sl = tuple(slice(o, o + e) for o, e in zip(origin, extent))
                cid = chunk_id(pos)
                checksum = write_chunk_file(directory, cid, data[sl], tag)
                manifest.chunks.append({"id": cid, "grid": list(pos), "shape": list(extent)})
                manifest.checksums[cid] = checksum
    manifest.save(directory)
    return manifest


def read_chunk_file(manifest: ChunkManifest, grid_pos: Sequence[int], verify: bool = True) -> np.ndarray:
    cid = chunk_id(grid_pos)
    path = Path(manifest.directory) / f"{cid}.bin"
    if not path.is_file():
        raise MissingChunkError(f"chunk file missing: {path}")
    payload = path.read_bytes()
    if verify:
        digest = hashlib.sha256(payload).hexdigest()
        expected = manifest.checksums.get(cid)
        if digest != expected:
            raise ChecksumError(f"checksum mismatch for {cid}: {digest} != {expected}")
    extent = manifest.chunk_extent(grid_pos)
    return np.frombuffer(payload, dtype=manifest.numpy_dtype).reshape(extent)


def chunk_read(manifest, region=None, halo: int = 0, verify: bool = True) -> np.ndarray:
    """Read an axis-aligned region (plus halo) from a chunked volume.

    ``region`` is ``((z0, z1), (y0, y1), (x0, x1))`` half-open in voxel
    coordinates, or None for the full volume.  The halo extends the region
    on every side; halo voxels outside the volume bounds read as zero.
    """
    if not isinstance(manifest, ChunkManifest):
        manifest = ChunkManifest.load(manifest)
    if halo < 0:
        raise ValueError("halo must be >= 0")
    shape = manifest.volume_shape
    if region is None:
        region = tuple((0, s) for s in shape)
    region = tuple((int(a), int(b)) for a, b in region)
    for (a, b), s in zip(region, shape):
        if not (0 <= a <= b <= s):
            raise ValueError(f"region {region!r} outside volume bounds {shape}")

    lo = [a - halo for a, _ in region]
    hi = [b + halo for _, b in region]
    out = np.zeros([h - l for l, h in zip(lo, hi)], dtype=manifest.numpy_dtype)

    # Clip the padded request to the volume, then copy chunk by chunk.
    clo = [max(0, l) for l in lo]
    chi = [min(s, h) for s, h in zip(shape, hi)]
    if any(a >= b for a, b in zip(clo, chi)):
        return out
    cs = manifest.chunk_shape
    for zi in range(clo[0] // cs[0], -(-chi[0] // cs[0])):
        for yi in range(clo[1] // cs[1], -(-chi[1] // cs[1])):
            for xi in range(clo[2] // cs[2], -(-chi[2] // cs[2])):
                pos = (zi, yi, xi)
                data = read_chunk_file(manifest, pos, verify=verify)
                origin = manifest.chunk_origin(pos)
                src = tuple(
                    slice(max(0, l - o), min(e, h - o))
                    for o, e, l, h in zip(origin, data.shape, clo, chi)
                )
                dst = tuple(
                    slice(o + s.start - l, o + s.stop - l)
                    for o, s, l in zip(origin, src, lo)
                )
                out[dst] = data[src]
    return out
