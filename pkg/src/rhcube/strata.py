"""Stratum combinatorics of a polydisk with a normal crossing divisor.

The ambient space is a polydisk of dimension ``d`` whose divisor is the
union of the first ``r`` coordinate hyperplanes.  Closed strata correspond
to subsets ``A`` of ``{1, ..., r}`` (the stratum where the coordinates in
``A`` vanish), so all hypercube data in this package lives on the power
set of ``{1, ..., r}``.

Subsets are held as bitmasks internally (bit ``k-1`` set means ``k in A``)
and exposed as sorted integer tuples, which is also the serialized form.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations


@dataclass(frozen=True)
class PolydiskContext:
    """Ambient dimension ``d`` and divisor multiplicity ``r``."""

    d: int
    r: int

    def __post_init__(self) -> None:
        if self.d < 0:
            raise ValueError(f"ambient dimension must be >= 0, got {self.d}")
        if not 0 <= self.r <= self.d:
            raise ValueError(
                f"divisor multiplicity must satisfy 0 <= r <= d, got r={self.r}, d={self.d}"
            )

    @property
    def directions(self) -> range:
        return range(1, self.r + 1)

    @property
    def full_mask(self) -> int:
        return (1 << self.r) - 1


@dataclass(frozen=True)
class StratumIndex:
    """A stratum, given by the subset of vanishing coordinates."""

    subset: tuple[int, ...]
    codim: int


def mask_of(subset) -> int:
    """Bitmask of a subset of {1, ..., r} given as an iterable of integers."""
    m = 0
    for k in subset:
        if k < 1:
            raise ValueError(f"subset elements must be >= 1, got {k}")
        bit = 1 << (k - 1)
        if m & bit:
            raise ValueError(f"repeated element {k} in subset")
        m |= bit
    return m


def subset_of(mask: int) -> tuple[int, ...]:
    """Sorted tuple of the elements of a bitmask."""
    out = []
    k = 1
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


def node_masks(ctx: PolydiskContext) -> list[int]:
    """All 2^r node masks, sorted by cardinality then lexicographically."""
    masks = [mask_of(c)
             for size in range(ctx.r + 1)
             for c in combinations(ctx.directions, size)]
    return masks


def enumerate_strata(ctx: PolydiskContext) -> list[StratumIndex]:
    """All strata of the divisor, ordered by codimension then lexicographically."""
    return [StratumIndex(subset_of(m), bin(m).count("1")) for m in node_masks(ctx)]


def cover_Y_star(ctx: PolydiskContext, codim: int) -> list[tuple[tuple[int, ...], int]]:
    """Sheets of the branch cover over the codimension-``codim`` strata.

    Each stratum of codimension ``c`` is covered ``c``-fold, one sheet per
    vanishing coordinate, so the result is every pair ``(A, k)`` with
    ``|A| = codim`` and ``k in A``.
    """
    if not 1 <= codim <= ctx.r:
        raise ValueError(f"codim must be in 1..{ctx.r}, got {codim}")
    out = []
    for c in combinations(ctx.directions, codim):
        for k in c:
            out.append((tuple(c), k))
    return out


def cover_Z(ctx: PolydiskContext, codim: int) -> list[tuple[tuple[int, ...], tuple[int, int]]]:
    """Unordered pairs of vanishing coordinates over each codim-``codim`` stratum."""
    if not 2 <= codim <= ctx.r:
        raise ValueError(f"codim must be in 2..{ctx.r}, got {codim}")
    out = []
    for c in combinations(ctx.directions, codim):
        for pair in combinations(c, 2):
            out.append((tuple(c), pair))
    return out


def cover_Z_star(
    ctx: PolydiskContext, codim: int
) -> list[tuple[tuple[int, ...], tuple[int, int], int]]:
    """Two-sheeted refinement of :func:`cover_Z`: each pair with an order flag.

    Flag 0 stands for the ordering ``(k, l)`` with ``k < l``, flag 1 for the
    reversed one.
    """
    out = []
    for A, pair in cover_Z(ctx, codim):
        out.append((A, pair, 0))
        out.append((A, pair, 1))
    return out
