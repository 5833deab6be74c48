"""26/6 digital topology kernels: topological numbers, simple points, masks.

A voxel's simplicity is decided entirely by its 26-neighborhood: the number
of foreground 26-components among the 26 neighbors (T_fg) and the number of
background 6-components within the 18-neighborhood that touch a face
neighbor (T_bg).  A point is simple iff T_fg == 1 and T_bg == 1; the test
never looks at the center's own occupancy, so it answers "may this voxel be
added or removed" in one go.

Neighborhoods are encoded as 26-bit integers.  Bit ``i`` corresponds to
offset ``OFFSETS26[i]``, which enumerates (dz, dy, dx) over {-1,0,1}^3 in
lexicographic order with the center (0,0,0) skipped.  Out-of-bounds
neighbors always read as background.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from numba import njit
from scipy import ndimage

from .volumes import LabelVolume

# ---------------------------------------------------------------------------
# Neighborhood tables
# ---------------------------------------------------------------------------

OFFSETS26 = np.array(
    [(dz, dy, dx) for dz in (-1, 0, 1) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dz, dy, dx) != (0, 0, 0)],
    dtype=np.int8,
)


def _build_tables():
    n26 = [tuple(o) for o in OFFSETS26.tolist()]
    adj26 = np.zeros(26, dtype=np.int64)
    for i, a in enumerate(n26):
        for j, b in enumerate(n26):
            if i != j and max(abs(a[k] - b[k]) for k in range(3)) <= 1:
                adj26[i] |= 1 << j

    # 18-neighborhood: offsets with at most two nonzero components.
    n18_of26 = np.array([i for i, o in enumerate(n26) if sum(map(abs, o)) <= 2], dtype=np.int8)
    o18 = [n26[i] for i in n18_of26]
    adj6_18 = np.zeros(18, dtype=np.int64)
    for i, a in enumerate(o18):
        for j, b in enumerate(o18):
            if i != j and sum(abs(a[k] - b[k]) for k in range(3)) == 1:
                adj6_18[i] |= 1 << j
    face18 = 0
    for i, o in enumerate(o18):
        if sum(map(abs, o)) == 1:
            face18 |= 1 << i
    return adj26, n18_of26, adj6_18, np.int64(face18)


_ADJ26, _N18_OF26, _ADJ6_18, _FACE18 = _build_tables()


# ---------------------------------------------------------------------------
# Compiled kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _count_fg_components(mask):
    """26-components of the foreground bits of a 26-bit neighborhood mask."""
    remaining = mask
    count = 0
    while remaining != 0:
        seed = -1
        for b in range(26):
            if (remaining >> b) & 1:
                seed = b
                break
        comp = np.int64(1) << seed
        frontier = comp
        while frontier != 0:
            grown = np.int64(0)
            for j in range(26):
                if (frontier >> j) & 1:
                    grown |= _ADJ26[j]
            frontier = grown & remaining & ~comp
            comp |= frontier
        remaining &= ~comp
        count += 1
    return count


@njit(cache=True)
def _count_bg_components(mask):
    """6-components of background within the 18-neighborhood touching a face."""
    bg18 = np.int64(0)
    for k in range(18):
        if ((mask >> _N18_OF26[k]) & 1) == 0:
            bg18 |= np.int64(1) << k
    remaining = bg18
    count = 0
    while remaining != 0:
        seed = -1
        for b in range(18):
            if (remaining >> b) & 1:
                seed = b
                break
        comp = np.int64(1) << seed
        frontier = comp
        while frontier != 0:
            grown = np.int64(0)
            for j in range(18):
                if (frontier >> j) & 1:
                    grown |= _ADJ6_18[j]
            frontier = grown & remaining & ~comp
            comp |= frontier
        remaining &= ~comp
        if comp & _FACE18:
            count += 1
    return count


@njit(cache=True)
def _mask_at(padded, z, y, x):
    """Neighborhood mask at voxel (z, y, x) of the unpadded volume."""
    mask = np.int64(0)
    bit = 0
    for dz in range(-1, 2):
        for dy in range(-1, 2):
            for dx in range(-1, 2):
                if dz == 0 and dy == 0 and dx == 0:
                    continue
                if padded[z + 1 + dz, y + 1 + dy, x + 1 + dx]:
                    mask |= np.int64(1) << bit
                bit += 1
    return mask


@njit(cache=True)
def _simple_mask(mask):
    return _count_fg_components(mask) == 1 and _count_bg_components(mask) == 1


@njit(cache=True)
def _scan_nonsimple(padded, out):
    nz, ny, nx = out.shape
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                mask = _mask_at(padded, z, y, x)
                if padded[z + 1, y + 1, x + 1] == 0 and mask == 0:
                    continue  # far-field background: never flagged
                if not _simple_mask(mask):
                    out[z, y, x] = 1


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Neighborhood26:
    """Occupancy of the 26 neighbors (in OFFSETS26 order) plus the center bit."""

    neighbors: Tuple[bool, ...]
    center: bool = False

    def __post_init__(self):
        if len(self.neighbors) != 26:
            raise ValueError("exactly 26 neighbor occupancies required")
        object.__setattr__(self, "neighbors", tuple(bool(b) for b in self.neighbors))

    @property
    def mask(self) -> int:
        m = 0
        for i, b in enumerate(self.neighbors):
            if b:
                m |= 1 << i
        return m

    @classmethod
    def from_mask(cls, mask: int, center: bool = False) -> "Neighborhood26":
        return cls(neighbors=tuple(bool((mask >> i) & 1) for i in range(26)), center=center)

    @classmethod
    def from_volume(cls, vol, p) -> "Neighborhood26":
        data = vol.data if isinstance(vol, LabelVolume) else np.asarray(vol)
        z, y, x = p
        occ = []
        for dz, dy, dx in OFFSETS26.tolist():
            q = (z + dz, y + dy, x + dx)
            inside = all(0 <= c < s for c, s in zip(q, data.shape))
            occ.append(bool(data[q]) if inside else False)
        return cls(neighbors=tuple(occ), center=bool(data[z, y, x]))


def _as_mask(n: Union[Neighborhood26, int]) -> int:
    return n.mask if isinstance(n, Neighborhood26) else int(n)


def topo_number_fg(n: Union[Neighborhood26, int]) -> int:
    """26-connected foreground components adjacent to the center (T_fg)."""
    return int(_count_fg_components(np.int64(_as_mask(n))))


def topo_number_bg(n: Union[Neighborhood26, int]) -> int:
    """6-connected background components in the 18-neighborhood that touch
    a face neighbor (T_bg)."""
    return int(_count_bg_components(np.int64(_as_mask(n))))


def _label_data(vol) -> np.ndarray:
    if isinstance(vol, LabelVolume):
        return vol.data
    arr = np.asarray(vol)
    if arr.ndim != 3:
        raise ValueError("expected a 3D binary array")
    return arr


def is_simple(vol, p) -> bool:
    """True iff flipping voxel ``p = (z, y, x)`` preserves topology.

    The answer depends only on the 26 neighbors, never on the center's own
    value; out-of-bounds neighbors count as background.
    """
    data = _label_data(vol)
    z, y, x = (int(c) for c in p)
    for c, s in zip((z, y, x), data.shape):
        if not 0 <= c < s:
            raise IndexError(f"voxel {p!r} outside volume of shape {data.shape}")
    return bool(_simple_mask(np.int64(Neighborhood26.from_volume(data, (z, y, x)).mask)))


def nonsimple_mask(vol) -> LabelVolume:
    """Mask of non-simple points at the foreground/background interface.

    Flags every non-simple foreground voxel and every non-simple background
    voxel that has at least one foreground 26-neighbor.  Far-field
    background (no foreground neighbor) is never flagged, since flipping it
    trivially creates a component and would otherwise drown the weight map.
    """
    data = _label_data(vol)
    padded = np.zeros(tuple(s + 2 for s in data.shape), dtype=np.uint8)
    padded[1:-1, 1:-1, 1:-1] = data
    out = np.zeros(data.shape, dtype=np.uint8)
    _scan_nonsimple(padded, out)
    return LabelVolume(out)


_STRUCTURES = {
    6: ndimage.generate_binary_structure(3, 1),
    18: ndimage.generate_binary_structure(3, 2),
    26: ndimage.generate_binary_structure(3, 3),
}


def connected_components(vol, connectivity: int = 26) -> Tuple[np.ndarray, int]:
    """Label connected components; ids dense from 1, background 0."""
    if connectivity not in _STRUCTURES:
        raise ValueError(f"connectivity must be one of {sorted(_STRUCTURES)}, got {connectivity}")
    data = _label_data(vol)
    labels, count = ndimage.label(data, structure=_STRUCTURES[connectivity])
    return labels.astype(np.int32, copy=False), int(count)


def component_counts(vol) -> Tuple[int, int]:
    """(foreground 26-count, background 6-count) on a zero-padded grid.

    Padding by one background voxel makes the counts consistent with the
    local convention that out-of-bounds reads are background: border-touching
    background regions are one region through the outside.
    """
    data = _label_data(vol)
    padded = np.zeros(tuple(s + 2 for s in data.shape), dtype=np.uint8)
    padded[1:-1, 1:-1, 1:-1] = data
    _, fg = ndimage.label(padded, structure=_STRUCTURES[26])
    _, bg = ndimage.label(1 - padded, structure=_STRUCTURES[6])
    return int(fg), int(bg)
