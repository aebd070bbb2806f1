"""Domain types for rainbow-matching instances.

A problem instance is a family of matchings ``M_0, ..., M_{n-1}`` in an
r-uniform hypergraph over non-negative integer vertices.  Matching
indices double as colours: an edge "has colour i" when it belongs to
``M_i``.  A rainbow matching is a set of pairwise disjoint edges
together with an injective assignment of colours to edges such that
each edge belongs to the matching of its assigned colour.

All types are immutable after construction and safe to share between
threads.  Constructors normalise shapes (tuples of sorted ints and so
on are expected but not enforced); combinatorial invariants are checked
by :func:`validate_instance`, which reports violations as data instead
of raising, so malformed inputs can be inspected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

# An edge is a strictly increasing tuple of r vertex identifiers.
Edge = tuple[int, ...]
# A matching is a tuple of pairwise vertex-disjoint edges.
Matching = tuple[Edge, ...]


def make_edge(vertices: Iterable[int]) -> Edge:
    """Build an edge tuple in canonical (sorted) vertex order."""
    return tuple(sorted(int(v) for v in vertices))


@dataclass(frozen=True)
class Violation:
    """A single invariant violation found by :func:`validate_instance`."""

    code: str
    message: str
    matching: int | None = None
    edge: int | None = None

    def __str__(self) -> str:
        where = ""
        if self.matching is not None:
            where = f" [matching {self.matching}"
            where += f", edge {self.edge}]" if self.edge is not None else "]"
        return f"{self.code}: {self.message}{where}"


@dataclass(frozen=True)
class Instance:
    """A colour family: ``matchings[i]`` is colour ``i`` (0-based).

    ``partition``, when present, assigns every vertex ``v`` the part
    index ``partition[v]`` in ``range(r)``; partitioned instances are
    the r-partite case.  The partition is always supplied by a
    generator, never inferred.  ``meta`` carries generator provenance
    (name, parameters, seed) as plain strings.
    """

    r: int
    matchings: tuple[Matching, ...]
    partition: tuple[int, ...] | None = None
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "matchings",
            tuple(tuple(tuple(int(v) for v in e) for e in m) for m in self.matchings),
        )
        if self.partition is not None:
            object.__setattr__(self, "partition", tuple(int(p) for p in self.partition))
        object.__setattr__(self, "meta", {str(k): str(v) for k, v in dict(self.meta).items()})

    @property
    def n(self) -> int:
        """Number of matchings (equivalently, number of colours)."""
        return len(self.matchings)

    def vertices(self) -> set[int]:
        return {v for m in self.matchings for e in m for v in e}

    def vertex_count(self) -> int:
        """Vertices are allocated densely from 0; the count is the
        partition length when present, else one past the largest vertex."""
        if self.partition is not None:
            return len(self.partition)
        verts = self.vertices()
        return max(verts) + 1 if verts else 0

    def min_matching_size(self) -> int:
        return min((len(m) for m in self.matchings), default=0)

    def edges(self) -> Iterator[tuple[int, Edge]]:
        """Yield (colour, edge) over the whole family."""
        for i, m in enumerate(self.matchings):
            for e in m:
                yield i, e


@dataclass(frozen=True)
class RainbowMatching:
    """An injective colour-to-edge assignment; edges pairwise disjoint.

    ``assignment`` is a tuple of ``(colour, edge)`` pairs.  Validity
    against a concrete instance is decided by :func:`is_rainbow_matching`.
    """

    assignment: tuple[tuple[int, Edge], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "assignment",
            tuple((int(c), tuple(int(v) for v in e)) for c, e in self.assignment),
        )

    @property
    def size(self) -> int:
        return len(self.assignment)

    def colours(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.assignment)

    def edge_set(self) -> tuple[Edge, ...]:
        return tuple(e for _, e in self.assignment)

    def sorted_by_colour(self) -> "RainbowMatching":
        return RainbowMatching(tuple(sorted(self.assignment)))


def canonicalize(inst: Instance) -> Instance:
    """Return the instance with edges of every matching in sorted order.

    Matching order (colour identity) is preserved.  This is the form
    the file serializer emits.
    """
    return Instance(
        r=inst.r,
        matchings=tuple(tuple(sorted(m)) for m in inst.matchings),
        partition=inst.partition,
        meta=inst.meta,
    )


def validate_instance(inst: Instance) -> list[Violation]:
    """Check every instance invariant; an empty report means valid.

    Reported codes: ``uniformity`` (r < 2), ``partition-part`` (part id
    out of range), ``edge-arity``, ``edge-vertices`` (not strictly
    increasing non-negative), ``intra-matching intersection``,
    ``partition-coverage`` (vertex missing from partition) and
    ``partition-edge`` (edge not meeting every part exactly once).
    """
    out: list[Violation] = []
    if inst.r < 2:
        out.append(Violation("uniformity", f"r must be >= 2, got {inst.r}"))
    part = inst.partition
    if part is not None:
        for v, p in enumerate(part):
            if not 0 <= p < inst.r:
                out.append(
                    Violation("partition-part", f"vertex {v} assigned part {p}, expected 0..{inst.r - 1}")
                )
    for j, matching in enumerate(inst.matchings):
        owner: dict[int, int] = {}
        for k, e in enumerate(matching):
            if len(e) != inst.r:
                out.append(
                    Violation("edge-arity", f"edge has {len(e)} vertices, expected {inst.r}", j, k)
                )
                continue
            if e[0] < 0 or any(a >= b for a, b in zip(e, e[1:])):
                out.append(
                    Violation("edge-vertices", "vertices must be non-negative and strictly increasing", j, k)
                )
                continue
            shared = next((v for v in e if v in owner), None)
            if shared is not None:
                out.append(
                    Violation(
                        "intra-matching intersection",
                        f"edges {owner[shared]} and {k} share vertex {shared}",
                        j,
                        k,
                    )
                )
            for v in e:
                owner.setdefault(v, k)
            if part is not None:
                if any(v >= len(part) for v in e):
                    out.append(
                        Violation("partition-coverage", "edge uses a vertex missing from the partition", j, k)
                    )
                elif sorted(part[v] for v in e) != list(range(inst.r)):
                    out.append(
                        Violation("partition-edge", "edge must meet every part exactly once", j, k)
                    )
    return out


def is_rainbow_matching(inst: Instance, rm: RainbowMatching) -> bool:
    """True iff ``rm`` is a valid rainbow matching for ``inst``.

    Checks colour injectivity, membership of each edge in the matching
    of its colour, and pairwise vertex-disjointness.  A colour index
    outside ``range(inst.n)`` is an input error and raises ValueError.
    """
    n = inst.n
    for colour, _ in rm.assignment:
        if not 0 <= colour < n:
            raise ValueError(f"colour {colour} out of range for an instance with {n} matchings")
    colours = rm.colours()
    if len(set(colours)) != len(colours):
        return False
    seen: set[int] = set()
    for colour, e in rm.assignment:
        if e not in inst.matchings[colour]:
            return False
        if any(v in seen for v in e):
            return False
        seen.update(e)
    return True
