"""Rooted labelled trees over digit sequences.

Vertices are plain tuples of digits; the empty tuple is the root.  The
same representation encodes M-adic intervals of [0,1), M-adic cubes of
[0,1)^d (one packed digit per level, lexicographic within a level), the
kept intervals of a Cantor construction, and binary addresses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cantor import CantorSpec

Vertex = tuple[int, ...]
ROOT: Vertex = ()


def height(v: Vertex) -> int:
    return len(v)


def parent(v: Vertex) -> Vertex:
    if not v:
        raise ValueError("root has no parent")
    return v[:-1]


def is_ancestor(u: Vertex, v: Vertex) -> bool:
    """True when u is a (non-strict) ancestor of v, i.e. a prefix."""
    return len(u) <= len(v) and v[: len(u)] == u


def yca(u: Vertex, v: Vertex) -> Vertex:
    """Youngest common ancestor: the longest common prefix.

    Total on all pairs: for an ancestor/descendant pair this returns the
    ancestor, and yca(v, v) = v.
    """
    n = min(len(u), len(v))
    k = 0
    while k < n and u[k] == v[k]:
        k += 1
    return u[:k]


def yca_all(vs: Iterable[Vertex]) -> Vertex:
    it = iter(vs)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("yca_all of empty collection")
    for v in it:
        acc = yca(acc, v)
    return acc


def ray_edges(v: Vertex) -> list[Vertex]:
    """Edges on the ray to v, each identified by its terminating vertex."""
    return [v[:k] for k in range(1, len(v) + 1)]


# ---------------------------------------------------------------------------
# digit packing for cubes of [0,1)^d
# ---------------------------------------------------------------------------


def pack_axes(axes: Sequence[int], M: int) -> int:
    """Lexicographic rank of a d-tuple of per-axis digits."""
    out = 0
    for a in axes:
        out = out * M + a
    return out


def unpack_axes(digit: int, M: int, d: int) -> tuple[int, ...]:
    axes = []
    for _ in range(d):
        axes.append(digit % M)
        digit //= M
    return tuple(reversed(axes))


def encode_cube(point: Sequence, k: int, M: int, d: int) -> Vertex:
    """Vertex of the level-k M-adic cube containing ``point`` in [0,1)^d."""
    if len(point) != d:
        raise ValueError(f"point has {len(point)} coordinates, expected {d}")
    digs = []
    for x in point:
        xi = x if isinstance(x, Fraction) else Fraction(x)
        if not 0 <= xi < 1:
            raise ValueError(f"coordinate {x} outside [0,1)")
        idx = (xi * M**k).__floor__()
        axis_digits = []
        for j in range(k):
            axis_digits.append(idx // M ** (k - 1 - j) % M)
        digs.append(axis_digits)
    return tuple(pack_axes([digs[a][lvl] for a in range(d)], M) for lvl in range(k))


def decode_cube(v: Vertex, M: int, d: int) -> tuple[tuple[Fraction, ...], Fraction]:
    """Lower corner and side length of the cube a vertex represents."""
    k = len(v)
    corner = [Fraction(0)] * d
    for lvl, digit in enumerate(v, start=1):
        axes = unpack_axes(digit, M, d)
        for a in range(d):
            corner[a] += Fraction(axes[a], M**lvl)
    return tuple(corner), Fraction(1, M**k)


def cube_center(v: Vertex, M: int, d: int) -> tuple[Fraction, ...]:
    corner, side = decode_cube(v, M, d)
    return tuple(c + side / 2 for c in corner)


def cube_from_axis_indices(axis_indices: Sequence[int], k: int, M: int, d: int) -> Vertex:
    """Vertex of the level-k cube with the given integer grid indices."""
    digs = []
    for lvl in range(k):
        axes = [axis_indices[a] // M ** (k - 1 - lvl) % M for a in range(d)]
        digs.append(pack_axes(axes, M))
    return tuple(digs)


def leaf_from_index(i: int, base: int, depth: int) -> Vertex:
    digs = []
    for j in range(depth):
        digs.append(i // base ** (depth - 1 - j) % base)
    return tuple(digs)


def index_from_leaf(v: Vertex, base: int) -> int:
    out = 0
    for dig in v:
        out = out * base + dig
    return out


def count_level_vertices(points: Iterable[Sequence], k: int, M: int, d: int) -> int:
    """Number of level-k M-adic cubes of [0,1)^d meeting the point set."""
    seen = set()
    for p in points:
        if all(0 <= float(x) < 1 for x in p):
            seen.add(encode_cube(p, k, M, d))
    return len(seen)


# ---------------------------------------------------------------------------
# the Cantor tree, its binary structure, and the representative map
# ---------------------------------------------------------------------------


class CantorTree:
    """Kept-interval tree of a Cantor construction, truncated at depth N."""

    def __init__(self, spec: CantorSpec):
        self.spec = spec

    def contains(self, v: Vertex) -> bool:
        if len(v) > self.spec.N:
            return False
        for k, dig in enumerate(v):
            if dig not in self.spec.children(v[:k]):
                return False
        return True

    def children(self, v: Vertex) -> tuple[Vertex, Vertex]:
        lo, hi = self.spec.children(v)
        return (v + (lo,), v + (hi,))

    def level(self, k: int) -> list[Vertex]:
        frontier = [ROOT]
        for _ in range(k):
            frontier = [c for v in frontier for c in self.children(v)]
        return frontier

    def leaves(self) -> list[Vertex]:
        return self.level(self.spec.N)


class BinaryIsomorphism:
    """The height/lineage-preserving bijection between the kept-interval
    tree and the full binary tree: at every level the smaller kept child
    maps to bit 0, the larger to bit 1."""

    def __init__(self, spec: CantorSpec):
        self.spec = spec
        self.tree = CantorTree(spec)

    def forward(self, v: Vertex) -> Vertex:
        bits = []
        for k, dig in enumerate(v):
            lo, hi = self.spec.children(v[:k])
            if dig == lo:
                bits.append(0)
            elif dig == hi:
                bits.append(1)
            else:
                raise KeyError(f"vertex {v} not in the kept-interval tree")
        return tuple(bits)

    def backward(self, bits: Vertex) -> Vertex:
        digs: list[int] = []
        for b in bits:
            pair = self.spec.children(tuple(digs))
            if b not in (0, 1):
                raise KeyError(f"binary vertex {bits} has non-bit digit")
            digs.append(pair[b])
        return tuple(digs)


def build_psi(spec: CantorSpec) -> BinaryIsomorphism:
    return BinaryIsomorphism(spec)


def phi_map(spec: CantorSpec, v: Vertex) -> Fraction:
    """Representative parameter of a kept-interval vertex.

    Vertices above depth N descend through the first kept child; the
    result is the left endpoint of the reached depth-N interval, which
    always lies inside the original interval.
    """
    tree = CantorTree(spec)
    if not tree.contains(v):
        raise KeyError(f"vertex {v} not in the kept-interval tree")
    digs = list(v)
    while len(digs) < spec.N:
        digs.append(spec.children(tuple(digs))[0])
    x = Fraction(0)
    for j, dig in enumerate(digs, start=1):
        x += Fraction(dig, spec.M**j)
    return x


def is_sticky(fn, vertices: Sequence[Vertex]) -> bool:
    """Audit: heights preserved and prefixes preserved on all given pairs."""
    imgs = {}
    for v in vertices:
        w = fn(v)
        if height(w) != height(v):
            return False
        imgs[v] = w
    vs = list(imgs)
    for i, u in enumerate(vs):
        for v in vs[i + 1 :]:
            if height(yca(imgs[u], imgs[v])) < height(yca(u, v)):
                return False
    return True


# ---------------------------------------------------------------------------
# explicit finite trees (percolation networks, Poss trees)
# ---------------------------------------------------------------------------


@dataclass
class FiniteTree:
    """A finite prefix-closed vertex set with a child map."""

    vertices: set[Vertex]
    children: dict[Vertex, list[Vertex]]
    height: int

    @classmethod
    def from_leaves(cls, leaves: Iterable[Vertex]) -> "FiniteTree":
        vertices: set[Vertex] = {ROOT}
        for leaf in leaves:
            for k in range(1, len(leaf) + 1):
                vertices.add(leaf[:k])
        children: dict[Vertex, list[Vertex]] = {v: [] for v in vertices}
        for v in vertices:
            if v:
                children[v[:-1]].append(v)
        for v in children:
            children[v].sort()
        h = max((len(v) for v in vertices), default=0)
        return cls(vertices=vertices, children=children, height=h)

    @classmethod
    def full(cls, base: int, depth: int) -> "FiniteTree":
        leaves = (leaf_from_index(i, base, depth) for i in range(base**depth))
        return cls.from_leaves(leaves)

    @classmethod
    def single_ray(cls, depth: int) -> "FiniteTree":
        return cls.from_leaves([(0,) * depth])

    def level(self, k: int) -> list[Vertex]:
        return sorted(v for v in self.vertices if len(v) == k)

    def level_counts(self) -> list[int]:
        counts = [0] * (self.height + 1)
        for v in self.vertices:
            counts[len(v)] += 1
        return counts

    def leaves(self) -> list[Vertex]:
        return sorted(v for v in self.vertices if not self.children[v])

    def edges(self) -> list[Vertex]:
        """Every non-root vertex, i.e. the edge terminating there."""
        return sorted(v for v in self.vertices if v)

    def is_prefix_closed(self) -> bool:
        return all(v[:-1] in self.vertices for v in self.vertices if v)
