"""Artifact-simulating augmentations as paired raw/label transforms.

Each augmentation is a pair ``(raw_transform, label_transform)`` applied to
a raw image and its label together.  Occlusion, duplication, and light
scattering alter only the raw image (label transform is the identity);
dropped sections and stitching misalignment alter both, with the label half
built so that a connected structure crossing the artifact band stays
26-connected -- the label shows the *desired reconstruction* in the
artifact's presence.

Axis parameters are symbolic ("z" | "y" | "x"); coordinate-tuple parameters
(centers, sigmas, means) are in (x, y, z) order like SWC, while arrays are
indexed (z, y, x).  Out-of-bounds reads during shifts are zero-filled.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, asdict
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .volumes import AXIS_TO_DIM, LabelVolume, RawVolume

__all__ = [
    "ArtifactTransform",
    "OcclusionParams",
    "DuplicateParams",
    "DropParams",
    "StitchParams",
    "ScatterParams",
    "AugmentConfig",
    "occlude_branch",
    "duplicate_sections",
    "drop_sections",
    "misalign_stitch",
    "scatter_light",
    "rotate_flip",
    "sample_augmentation",
    "SYMMETRIES",
]


def _dim(axis: str) -> int:
    try:
        return AXIS_TO_DIM[axis]
    except KeyError:
        raise ValueError(f"axis must be one of 'z', 'y', 'x', got {axis!r}") from None


def _shift_along(arr: np.ndarray, dim: int, offset: int) -> np.ndarray:
    """out[i] = arr[i + offset] along ``dim``; vacated slices are zero."""
    if offset == 0:
        return arr.copy()
    out = np.zeros_like(arr)
    n = arr.shape[dim]
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    if offset > 0:
        dst[dim] = slice(0, max(0, n - offset))
        src[dim] = slice(min(offset, n), n)
    else:
        dst[dim] = slice(min(-offset, n), n)
        src[dim] = slice(0, max(0, n + offset))
    out[tuple(dst)] = arr[tuple(src)]
    return out


# ---------------------------------------------------------------------------
# Occluded branches: raw - peak-normalized Gaussian PSF, label untouched
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OcclusionParams:
    center: Tuple[float, float, float]  # (x, y, z) voxel coordinates
    psf_sigma: Tuple[float, float, float] = (2.0, 2.0, 1.0)  # (σx, σy, σz) voxels
    amplitude: float = 1.0

    def __post_init__(self):
        if any(s <= 0 for s in self.psf_sigma):
            raise ValueError("psf sigmas must be > 0")
        if self.amplitude <= 0:
            raise ValueError("amplitude must be > 0")


def _occlude_array(arr: np.ndarray, p: OcclusionParams) -> np.ndarray:
    cz, cy, cx = (float(p.center[2]), float(p.center[1]), float(p.center[0]))
    sz, sy, sx = (float(p.psf_sigma[2]), float(p.psf_sigma[1]), float(p.psf_sigma[0]))
    center = (cz, cy, cx)
    sigma = (sz, sy, sx)
    # Support box of 4 sigma per axis; outside it the raw image is untouched.
    lo = [max(0, int(np.floor(c - 4 * s))) for c, s in zip(center, sigma)]
    hi = [min(n, int(np.ceil(c + 4 * s)) + 1) for c, s, n in zip(center, sigma, arr.shape)]
    out = arr.copy()
    if any(a >= b for a, b in zip(lo, hi)):
        return out
    grids = np.meshgrid(*[np.arange(a, b, dtype=np.float64) for a, b in zip(lo, hi)], indexing="ij")
    quad = sum(((g - c) / s) ** 2 for g, c, s in zip(grids, center, sigma))
    psf = np.where(quad <= 16.0, np.exp(-0.5 * quad), 0.0)
    peak = psf.max()
    if peak > 0:
        psf /= peak  # peak removal equals `amplitude` exactly
    sl = tuple(slice(a, b) for a, b in zip(lo, hi))
    out[sl] = np.maximum(out[sl] - p.amplitude * psf.astype(np.float32), 0.0)
    return out


def occlude_branch(raw: RawVolume, p: OcclusionParams) -> RawVolume:
    """Subtract a fluorophore's PSF (anisotropic Gaussian) from the raw image."""
    return RawVolume(_occlude_array(raw.data, p), raw.voxel_size)


# ---------------------------------------------------------------------------
# Duplicate sections: stage stall repeats one slice inside a box
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DuplicateParams:
    axis: str = "z"
    index: int = 0  # the repeated slice
    box: Optional[Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]] = None
    # box is ((z0,z1),(y0,y1),(x0,x1)) half-open; None = full cross-section,
    # spanning [index, index+extent) along the axis.
    extent: int = 2  # only used when box is None; slices covered, >= 2

    def resolve_box(self, shape) -> Tuple[Tuple[int, int], ...]:
        dim = _dim(self.axis)
        if self.box is not None:
            box = tuple((int(a), int(b)) for a, b in self.box)
        else:
            box = tuple(
                (self.index, self.index + self.extent) if d == dim else (0, shape[d])
                for d in range(3)
            )
        for (a, b), n in zip(box, shape):
            if not (0 <= a < b <= n):
                raise ValueError(f"box {box!r} outside volume bounds {shape}")
        lo, hi = box[dim]
        if not (lo <= self.index < hi):
            raise ValueError(f"box must contain the duplicated slice {self.index} along {self.axis}")
        if hi - lo < 2:
            raise ValueError("box must extend at least one slice beyond the duplicated one")
        return box


def _duplicate_array(arr: np.ndarray, p: DuplicateParams) -> np.ndarray:
    dim = _dim(p.axis)
    box = p.resolve_box(arr.shape)
    out = arr.copy()
    dst = tuple(slice(a, b) for a, b in box)
    src = tuple(
        slice(p.index, p.index + 1) if d == dim else slice(a, b) for d, (a, b) in enumerate(box)
    )
    out[dst] = arr[src]
    return out


def duplicate_sections(raw: RawVolume, p: DuplicateParams) -> RawVolume:
    """Repeat one slice across a rectangular neighborhood (stage stall)."""
    return RawVolume(_duplicate_array(raw.data, p), raw.voxel_size)


# ---------------------------------------------------------------------------
# Dropped sections: stage jump skips delta slices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DropParams:
    axis: str = "z"
    position: int = 0  # x0: last unshifted slice
    delta: int = 1

    def validate(self, n: int) -> None:
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if not 0 <= self.position < n:
            raise ValueError(f"position {self.position} outside axis extent {n}")
        if self.delta > 0 and not (self.position - self.delta >= 0 and self.position + 2 * self.delta <= n):
            raise ValueError(
                f"band [{self.position - self.delta}, {self.position + 2 * self.delta}) "
                f"does not fit in axis extent {n}"
            )


def _drop_raw(arr: np.ndarray, p: DropParams) -> np.ndarray:
    dim = _dim(p.axis)
    p.validate(arr.shape[dim])
    if p.delta == 0:
        return arr.copy()
    moved = np.moveaxis(arr, dim, 0)
    out = moved.copy()
    shifted = np.moveaxis(_shift_along(arr, dim, p.delta), dim, 0)
    out[p.position + 1 :] = shifted[p.position + 1 :]
    return np.ascontiguousarray(np.moveaxis(out, 0, dim))


def _drop_label(arr: np.ndarray, p: DropParams) -> np.ndarray:
    """Desired label after a drop: band content 3:2-compressed so partial
    connectivity across the gap survives.

    The input band of 3*delta slices starting at ``position - delta`` is
    pooled (per-slice OR) onto 2*delta output slices via the nearest-slice
    map u -> floor(2u/3); the map advances at most one output slice per
    input slice, so any 26-connected path through the band stays
    26-connected.  Beyond the band the label follows the raw shift.
    """
    dim = _dim(p.axis)
    p.validate(arr.shape[dim])
    if p.delta == 0:
        return arr.copy()
    lo = p.position - p.delta
    moved = np.moveaxis(arr, dim, 0)
    out = moved.copy()
    shifted = np.moveaxis(_shift_along(arr, dim, p.delta), dim, 0)
    out[lo:] = shifted[lo:]  # covers x >= position + delta; band overwritten next
    out[lo : lo + 2 * p.delta] = 0
    for u in range(3 * p.delta):
        out[lo + (2 * u) // 3] |= moved[lo + u]
    return np.ascontiguousarray(np.moveaxis(out, 0, dim))


def drop_sections(raw: RawVolume, label: LabelVolume, p: DropParams) -> Tuple[RawVolume, LabelVolume]:
    """Skip ``delta`` slices after ``position`` in the raw image; compress the
    label band to keep gap-crossing branches connected."""
    return (
        RawVolume(_drop_raw(raw.data, p), raw.voxel_size),
        LabelVolume(_drop_label(label.data, p)),
    )


# ---------------------------------------------------------------------------
# Stitching misalignment: lateral shift past a split plane, sheared label
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StitchParams:
    split_axis: str = "x"
    shift_axis: str = "y"
    position: int = 0  # x0: last unshifted slice
    delta: int = 1

    def __post_init__(self):
        if self.split_axis == self.shift_axis:
            raise ValueError("split and shift axes must differ")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")

    def validate(self, n_split: int) -> None:
        if not 0 <= self.position < n_split:
            raise ValueError(f"position {self.position} outside axis extent {n_split}")
        if self.delta > 0:
            half = -(-self.delta // 2)
            if not (self.position - half >= 0 and self.position + half < n_split):
                raise ValueError(
                    f"shear band around {self.position} (half-width {half}) "
                    f"does not fit in axis extent {n_split}"
                )

    def offset_at(self, x: int) -> int:
        """Shear offset for split-slice x: ceil(x - x0 + delta/2), clamped to [0, delta]."""
        raw = (2 * (x - self.position) + self.delta + 1) // 2
        return min(max(raw, 0), self.delta)


def _stitch_raw(arr: np.ndarray, p: StitchParams) -> np.ndarray:
    sdim = _dim(p.split_axis)
    p.validate(arr.shape[sdim])
    if p.delta == 0:
        return arr.copy()
    moved = np.moveaxis(arr, sdim, 0)
    out = moved.copy()
    shifted = np.moveaxis(_shift_along(arr, _dim(p.shift_axis), p.delta), sdim, 0)
    out[p.position + 1 :] = shifted[p.position + 1 :]
    return np.ascontiguousarray(np.moveaxis(out, 0, sdim))


def _stitch_label(arr: np.ndarray, p: StitchParams) -> np.ndarray:
    """Desired label after a stitch shift: shear band of width delta.

    Slice x gets the union of shifts over [offset(x-1), offset(x)]; the
    offsets ramp 0..delta one step per slice, and the two-shift union at
    transition slices means adjacent input voxels always map to adjacent
    output voxels, so any 26-connected structure crossing the plane stays
    26-connected (stronger than the 18-connectivity the artifact needs).
    """
    sdim = _dim(p.split_axis)
    p.validate(arr.shape[sdim])
    if p.delta == 0:
        return arr.copy()
    hdim = _dim(p.shift_axis)
    shifts = {o: np.moveaxis(_shift_along(arr, hdim, o), sdim, 0) for o in range(p.delta + 1)}
    out = np.empty_like(np.moveaxis(arr, sdim, 0))
    for x in range(out.shape[0]):
        o_prev, o_cur = p.offset_at(x - 1), p.offset_at(x)
        sl = shifts[o_cur][x]
        if o_prev != o_cur:
            sl = sl | shifts[o_prev][x]
        out[x] = sl
    return np.ascontiguousarray(np.moveaxis(out, 0, sdim))


def misalign_stitch(raw: RawVolume, label: LabelVolume, p: StitchParams) -> Tuple[RawVolume, LabelVolume]:
    """Translate everything past the split plane by ``delta`` along the shift
    axis in the raw image; shear the label across the band to keep crossing
    branches connected."""
    return (
        RawVolume(_stitch_raw(raw.data, p), raw.voxel_size),
        LabelVolume(_stitch_label(label.data, p)),
    )


# ---------------------------------------------------------------------------
# Light scattering: Gaussian blur plus homogeneous additive floor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScatterParams:
    sigma: Tuple[float, float, float] = (1.0, 1.0, 0.5)  # sqrt of diagonal covariance, (x, y, z)
    mean: Tuple[float, float, float] = (0.0, 0.0, 0.0)  # kernel mean offset (x, y, z) voxels
    lam: float = 0.0
    covariance: Optional[Sequence[Sequence[float]]] = None  # full 3x3 in (x, y, z) basis

    def __post_init__(self):
        if self.covariance is None and any(s <= 0 for s in self.sigma):
            raise ValueError("sigma components must be > 0")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")


def _scatter_kernel(p: ScatterParams) -> np.ndarray:
    if p.covariance is not None:
        cov_xyz = np.asarray(p.covariance, dtype=np.float64)
        if cov_xyz.shape != (3, 3):
            raise ValueError("covariance must be 3x3")
        if not np.allclose(cov_xyz, cov_xyz.T):
            raise ValueError("covariance must be symmetric")
        eigvals = np.linalg.eigvalsh(cov_xyz)
        if eigvals.min() <= 0:
            raise ValueError("covariance must be positive definite")
        cov = cov_xyz[::-1, ::-1]  # reorder (x,y,z) -> (z,y,x)
    else:
        sx, sy, sz = p.sigma
        cov = np.diag([sz**2, sy**2, sx**2])
    mean = np.array([p.mean[2], p.mean[1], p.mean[0]], dtype=np.float64)
    radii = [int(np.ceil(4 * np.sqrt(cov[d, d]) + abs(mean[d]))) for d in range(3)]
    radii = [max(r, 1) for r in radii]
    grids = np.meshgrid(*[np.arange(-r, r + 1, dtype=np.float64) for r in radii], indexing="ij")
    pts = np.stack([g - m for g, m in zip(grids, mean)], axis=-1)
    inv = np.linalg.inv(cov)
    quad = np.einsum("...i,ij,...j->...", pts, inv, pts)
    kernel = np.exp(-0.5 * quad)
    total = kernel.sum()
    if total <= 0:
        raise ValueError("degenerate scatter kernel")
    return kernel / total  # unit sum: uniform images stay uniform


def _scatter_array(arr: np.ndarray, p: ScatterParams) -> np.ndarray:
    kernel = _scatter_kernel(p)
    out = ndimage.convolve(arr.astype(np.float64), kernel, mode="constant", cval=0.0)
    return np.maximum(out + p.lam, 0.0).astype(np.float32)


def scatter_light(raw: RawVolume, p: ScatterParams) -> RawVolume:
    """Blur with a unit-sum anisotropic Gaussian and add a constant floor."""
    return RawVolume(_scatter_array(raw.data, p), raw.voxel_size)


# ---------------------------------------------------------------------------
# Geometric symmetries applied to both volumes
# ---------------------------------------------------------------------------

# Rotations act in the plane perpendicular to the named axis.
_ROT_PLANES = {"z": (1, 2), "y": (0, 2), "x": (0, 1)}

SYMMETRIES = (
    "identity",
    "flip_z",
    "flip_y",
    "flip_x",
    "rot_z_1",
    "rot_z_2",
    "rot_z_3",
    "rot_y_1",
    "rot_y_2",
    "rot_y_3",
    "rot_x_1",
    "rot_x_2",
    "rot_x_3",
)


def _apply_symmetry(arr: np.ndarray, which: str) -> np.ndarray:
    if which == "identity":
        return arr.copy()
    kind, axis, *rest = which.split("_")
    if kind == "flip":
        return np.ascontiguousarray(np.flip(arr, axis=_dim(axis)))
    if kind == "rot":
        k = int(rest[0])
        return np.ascontiguousarray(np.rot90(arr, k=k, axes=_ROT_PLANES[axis]))
    raise ValueError(f"unknown symmetry {which!r}")


def rotate_flip(raw: RawVolume, label: LabelVolume, which: str) -> Tuple[RawVolume, LabelVolume]:
    """Apply the same axis-aligned rigid symmetry to both volumes."""
    if which not in SYMMETRIES:
        raise ValueError(f"unknown symmetry {which!r}; choose from {SYMMETRIES}")
    return (
        RawVolume(_apply_symmetry(raw.data, which), raw.voxel_size),
        LabelVolume(_apply_symmetry(label.data, which)),
    )


# ---------------------------------------------------------------------------
# Deterministic sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArtifactTransform:
    """A sampled raw/label transform pair with its parameter record."""

    name: str
    params: Dict
    raw_transform: Callable[[np.ndarray], np.ndarray]
    label_transform: Callable[[np.ndarray], np.ndarray]

    def apply(self, raw: RawVolume, label: LabelVolume) -> Tuple[RawVolume, LabelVolume]:
        raw_out = self.raw_transform(raw.data)
        label_out = self.label_transform(label.data)
        return RawVolume(raw_out, raw.voxel_size), LabelVolume(label_out)


@dataclass(frozen=True)
class AugmentConfig:
    """Sampling config: per-artifact probability and parameter ranges.

    All probabilities default to zero (identity); the paper does not report
    artifact frequencies, so any non-zero schedule is the caller's choice.
    ``defaults()`` gives a moderate all-artifact schedule for the CLI.
    Positions are drawn as fractions of the axis extent and resolved against
    the actual patch shape at apply time, so the same draw is valid for any
    patch size.
    """

    seed: int = 0
    occlude_probability: float = 0.0
    occlude_amplitude: Tuple[float, float] = (2.0, 8.0)
    occlude_sigma: Tuple[Tuple[float, float], ...] = ((1.0, 3.0), (1.0, 3.0), (0.5, 1.5))
    duplicate_probability: float = 0.0
    duplicate_axis: str = "z"
    duplicate_extent: Tuple[int, int] = (2, 4)
    drop_probability: float = 0.0
    drop_axis: str = "z"
    drop_delta: Tuple[int, int] = (1, 3)
    stitch_probability: float = 0.0
    stitch_split_axis: str = "x"
    stitch_shift_axis: str = "y"
    stitch_delta: Tuple[int, int] = (1, 3)
    scatter_probability: float = 0.0
    scatter_sigma: Tuple[Tuple[float, float], ...] = ((0.5, 2.0), (0.5, 2.0), (0.3, 1.0))
    scatter_lambda: Tuple[float, float] = (0.0, 2.0)
    geometric_probability: float = 0.0
    rotations: bool = True
    flips: bool = True

    def __post_init__(self):
        for name in (
            "occlude_probability",
            "duplicate_probability",
            "drop_probability",
            "stitch_probability",
            "scatter_probability",
            "geometric_probability",
        ):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")

    @classmethod
    def defaults(cls, seed: int = 0) -> "AugmentConfig":
        return cls(
            seed=seed,
            occlude_probability=0.25,
            duplicate_probability=0.25,
            drop_probability=0.25,
            stitch_probability=0.25,
            scatter_probability=0.25,
            geometric_probability=0.5,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "AugmentConfig":
        def detuple(v):
            return tuple(detuple(x) for x in v) if isinstance(v, (list, tuple)) else v

        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown augment config keys: {sorted(unknown)}")
        return cls(**{k: detuple(v) for k, v in doc.items()})

    @classmethod
    def from_json(cls, path) -> "AugmentConfig":
        return cls.from_dict(json.loads(open(path, encoding="utf-8").read()))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def stream_seed(master_seed: int, patch_id) -> int:
    """Stable per-patch RNG seed from (master seed, patch id)."""
    digest = hashlib.sha256(f"{master_seed}:{patch_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "little")


def _resolve_position(frac: float, n: int, lo_margin: int, hi_margin: int) -> Optional[int]:
    """Map a fractional position onto valid indices [lo_margin, n - 1 - hi_margin]."""
    lo, hi = lo_margin, n - 1 - hi_margin
    if lo > hi:
        return None
    return lo + int(np.floor(frac * (hi - lo + 1) - 1e-9))


def sample_augmentation(cfg: AugmentConfig, patch_id) -> ArtifactTransform:
    """Draw a composed transform, a pure function of (cfg.seed, patch_id).

    Artifacts are considered in a fixed order (occlude, duplicate, drop,
    stitch, scatter, geometric) with one uniform draw each, so the same seed
    and patch id always produce the same parameter record no matter which
    worker executes the patch.  Position draws are fractions; artifacts whose
    band cannot fit a given patch shape degrade to the identity for that
    patch.
    """
    rng = np.random.default_rng(stream_seed(cfg.seed, patch_id))
    params: Dict = {}

    if rng.uniform() < cfg.occlude_probability:
        params["occlude"] = {
            "amplitude": float(rng.uniform(*cfg.occlude_amplitude)),
            "sigma": tuple(float(rng.uniform(lo, hi)) for lo, hi in cfg.occlude_sigma),
            "center_frac": tuple(float(f) for f in rng.uniform(0.2, 0.8, size=3)),
        }
    if rng.uniform() < cfg.duplicate_probability:
        params["duplicate"] = {
            "axis": cfg.duplicate_axis,
            "extent": int(rng.integers(cfg.duplicate_extent[0], cfg.duplicate_extent[1] + 1)),
            "position_frac": float(rng.uniform()),
        }
    if rng.uniform() < cfg.drop_probability:
        params["drop"] = {
            "axis": cfg.drop_axis,
            "delta": int(rng.integers(cfg.drop_delta[0], cfg.drop_delta[1] + 1)),
            "position_frac": float(rng.uniform()),
        }
    if rng.uniform() < cfg.stitch_probability:
        params["stitch"] = {
            "split_axis": cfg.stitch_split_axis,
            "shift_axis": cfg.stitch_shift_axis,
            "delta": int(rng.integers(cfg.stitch_delta[0], cfg.stitch_delta[1] + 1)),
            "position_frac": float(rng.uniform()),
        }
    if rng.uniform() < cfg.scatter_probability:
        params["scatter"] = {
            "sigma": tuple(float(rng.uniform(lo, hi)) for lo, hi in cfg.scatter_sigma),
            "lambda": float(rng.uniform(*cfg.scatter_lambda)),
        }
    if rng.uniform() < cfg.geometric_probability:
        choices = []
        if cfg.rotations:
            choices += [s for s in SYMMETRIES if s.startswith("rot_")]
        if cfg.flips:
            choices += [s for s in SYMMETRIES if s.startswith("flip_")]
        if choices:
            params["geometric"] = {"symmetry": choices[int(rng.integers(len(choices)))]}

    name = "+".join(params) if params else "identity"

    def _occlusion_for(shape) -> Optional[OcclusionParams]:
        rec = params["occlude"]
        fx, fy, fz = rec["center_frac"]
        nz, ny, nx = shape
        return OcclusionParams(
            center=(fx * (nx - 1), fy * (ny - 1), fz * (nz - 1)),
            psf_sigma=rec["sigma"],
            amplitude=rec["amplitude"],
        )

    def _duplicate_for(shape) -> Optional[DuplicateParams]:
        rec = params["duplicate"]
        n = shape[_dim(rec["axis"])]
        pos = _resolve_position(rec["position_frac"], n, 0, rec["extent"])
        if pos is None:
            return None
        return DuplicateParams(axis=rec["axis"], index=pos, extent=rec["extent"])

    def _drop_for(shape) -> Optional[DropParams]:
        rec = params["drop"]
        n = shape[_dim(rec["axis"])]
        d = rec["delta"]
        pos = _resolve_position(rec["position_frac"], n, d, 2 * d - 1)
        if pos is None:
            return None
        return DropParams(axis=rec["axis"], position=pos, delta=d)

    def _stitch_for(shape) -> Optional[StitchParams]:
        rec = params["stitch"]
        n = shape[_dim(rec["split_axis"])]
        d = rec["delta"]
        half = -(-d // 2)
        pos = _resolve_position(rec["position_frac"], n, half, half)
        if pos is None:
            return None
        return StitchParams(
            split_axis=rec["split_axis"], shift_axis=rec["shift_axis"], position=pos, delta=d
        )

    def raw_transform(arr: np.ndarray) -> np.ndarray:
        out = arr
        if "occlude" in params:
            out = _occlude_array(out, _occlusion_for(arr.shape))
        if "duplicate" in params:
            p = _duplicate_for(arr.shape)
            if p is not None:
                out = _duplicate_array(out, p)
        if "drop" in params:
            p = _drop_for(arr.shape)
            if p is not None:
                out = _drop_raw(out, p)
        if "stitch" in params:
            p = _stitch_for(arr.shape)
            if p is not None:
                out = _stitch_raw(out, p)
        if "scatter" in params:
            rec = params["scatter"]
            out = _scatter_array(out, ScatterParams(sigma=rec["sigma"], lam=rec["lambda"]))
        if "geometric" in params:
            out = _apply_symmetry(out, params["geometric"]["symmetry"])
        return out.copy() if out is arr else out

    def label_transform(arr: np.ndarray) -> np.ndarray:
        out = arr
        if "drop" in params:
            p = _drop_for(arr.shape)
            if p is not None:
                out = _drop_label(out, p)
        if "stitch" in params:
            p = _stitch_for(arr.shape)
            if p is not None:
                out = _stitch_label(out, p)
        if "geometric" in params:
            out = _apply_symmetry(out, params["geometric"]["symmetry"])
        return out.copy() if out is arr else out

    return ArtifactTransform(
        name=name, params=params, raw_transform=raw_transform, label_transform=label_transform
    )
