"""Rectangular boxes in Z^d: site indexing, edges, distances, decompositions.

Sites are enumerated lexicographically with the last coordinate varying
fastest, so the enumeration of a box with shape ``(n_1, ..., n_d)`` agrees
with C-order over ``numpy.ndindex``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BadCut, EmptyInterval, ZeroDim

Site = tuple[int, ...]


def distance(x: Site, y: Site) -> int:
    """1-norm distance between two sites of the same dimension."""
    if len(x) != len(y):
        raise ValueError(f"site dimensions differ: {len(x)} vs {len(y)}")
    return int(sum(abs(a - b) for a, b in zip(x, y)))


@dataclass(frozen=True)
class LatticeBox:
    """A finite rectangular box ``[a_1,b_1] x ... x [a_d,b_d]`` in Z^d."""

    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.intervals) == 0:
            raise ZeroDim("a box needs at least one axis")
        ivs = tuple((int(a), int(b)) for a, b in self.intervals)
        for a, b in ivs:
            if a > b:
                raise EmptyInterval(f"empty interval [{a}, {b}]")
        object.__setattr__(self, "intervals", ivs)

    @property
    def dim(self) -> int:
        return len(self.intervals)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(b - a + 1 for a, b in self.intervals)

    @property
    def n_sites(self) -> int:
        n = 1
        for s in self.shape:
            n *= s
        return n

    def site(self, index: int) -> Site:
        """Coordinates of the site with the given enumeration index."""
        if not 0 <= index < self.n_sites:
            raise IndexError(f"site index {index} out of range")
        coords = []
        rem = index
        for (a, _), n in zip(reversed(self.intervals), reversed(self.shape)):
            coords.append(a + rem % n)
            rem //= n
        return tuple(reversed(coords))

    def index(self, site: Site) -> int:
        """Enumeration index of a site; inverse of :meth:`site`."""
        if not self.contains(site):
            raise IndexError(f"site {site} not in box {self.intervals}")
        idx = 0
        for c, (a, _), n in zip(site, self.intervals, self.shape):
            idx = idx * n + (c - a)
        return idx

    def contains(self, site: Site) -> bool:
        return len(site) == self.dim and all(
            a <= c <= b for c, (a, b) in zip(site, self.intervals)
        )

    def sites(self):
        """Iterate sites in enumeration order."""
        starts = [a for a, _ in self.intervals]
        for offs in np.ndindex(*self.shape):
            yield tuple(a + o for a, o in zip(starts, offs))

    def coordinates(self) -> np.ndarray:
        """(n_sites, dim) integer array of coordinates in enumeration order."""
        return np.array(list(self.sites()), dtype=np.int64)

    def edges(self) -> list[tuple[int, int]]:
        """Undirected nearest-neighbor edges as index pairs (i, j) with i < j.

        Every pair of sites at 1-norm distance exactly 1 appears once.
        """
        out = []
        for i, s in enumerate(self.sites()):
            for axis in range(self.dim):
                nb = tuple(c + 1 if a == axis else c for a, c in enumerate(s))
                if self.contains(nb):
                    out.append((i, self.index(nb)))
        return out

    def distance_matrix(self) -> np.ndarray:
        """(n, n) matrix of pairwise 1-norm distances in enumeration order."""
        c = self.coordinates()
        return np.abs(c[:, None, :] - c[None, :, :]).sum(axis=2)


def make_box(intervals) -> LatticeBox:
    """Build a box from a sequence of (a_i, b_i) integer pairs."""
    return LatticeBox(tuple((int(a), int(b)) for a, b in intervals))


@dataclass(frozen=True)
class Decomposition:
    """A tiling of a parent box into disjoint rectangular sub-boxes."""

    parent: LatticeBox
    blocks: tuple[LatticeBox, ...]
    # parent enumeration index -> block number, filled on construction
    _block_of: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        owner = np.full(self.parent.n_sites, -1, dtype=np.int64)
        for bi, blk in enumerate(self.blocks):
            for s in blk.sites():
                pi = self.parent.index(s)
                if owner[pi] != -1:
                    raise BadCut(f"site {s} covered by two blocks")
                owner[pi] = bi
        if (owner == -1).any():
            raise BadCut("blocks do not cover the parent box")
        owner.setflags(write=False)
        object.__setattr__(self, "_block_of", owner)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_of(self, parent_index: int) -> int:
        """Block number owning the given parent site index."""
        return int(self._block_of[parent_index])

    def parent_indices(self, block: int) -> np.ndarray:
        """Parent enumeration indices of block ``block``, in block order."""
        blk = self.blocks[block]
        return np.array([self.parent.index(s) for s in blk.sites()], dtype=np.int64)


def decompose(box: LatticeBox, cuts) -> Decomposition:
    """Split a box along axis-aligned guillotine cuts.

    ``cuts[i]`` lists cut positions ``c`` on axis ``i``; each cut starts a new
    segment, so ``[a, b]`` with cut ``c`` becomes ``[a, c-1], [c, b]``. Cuts
    must be strictly increasing with ``a < c <= b``. Blocks are ordered
    lexicographically over per-axis segment numbers.
    """
    cuts = [list(c) for c in cuts]
    if len(cuts) != box.dim:
        raise BadCut(f"expected cut lists for {box.dim} axes, got {len(cuts)}")
    segments = []
    for (a, b), axis_cuts in zip(box.intervals, cuts):
        prev = None
        for c in axis_cuts:
            c = int(c)
            if not a < c <= b:
                raise BadCut(f"cut {c} outside ({a}, {b}]")
            if prev is not None and c <= prev:
                raise BadCut(f"cuts not strictly increasing at {c}")
            prev = c
        bounds = [a] + [int(c) for c in axis_cuts] + [b + 1]
        segments.append([(bounds[i], bounds[i + 1] - 1) for i in range(len(bounds) - 1)])
    blocks = tuple(
        LatticeBox(tuple(combo)) for combo in itertools.product(*segments)
    )
    return Decomposition(parent=box, blocks=blocks)
