"""Generators for the extremal rainbow-matching constructions.

Every generator allocates vertices densely from 0, emits matchings with
edges in lexicographic order, and records its name and parameters in
the instance metadata.  Partitioned generators supply the r-partition
explicitly; it is never inferred.  All outputs pass
:func:`rainbow_forge.core.validate_instance` with an empty report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .bounds import nth_root_floor
from .core import Edge, Instance, Matching, make_edge
from .solvers import exact_max_rainbow


def cycle_instance(n: int) -> Instance:
    """The even-cycle family: n - 1 copies of one alternating perfect
    matching of C_{2n} plus one copy of the other.

    2-uniform and bipartite (parts = vertex parity).  Its maximum
    rainbow matching has size exactly n - 1: a perfect matching of the
    cycle is one of the two alternating classes, and neither class has
    n colours available.
    """
    if n < 2:
        raise ValueError(f"cycle_instance needs n >= 2, got {n}")
    even = tuple((2 * i, 2 * i + 1) for i in range(n))
    odd = tuple(sorted(make_edge((2 * i + 1, (2 * i + 2) % (2 * n))) for i in range(n)))
    matchings = tuple(even for _ in range(n - 1)) + (odd,)
    return Instance(
        r=2,
        matchings=matchings,
        partition=tuple(v % 2 for v in range(2 * n)),
        meta={"generator": "cycle", "n": n},
    )


_K4_CLASSES = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def k4_union_instance(n: int) -> Instance:
    """Disjoint union of (n+1)/2 properly 3-edge-coloured K4 blocks,
    with n - 2 copies of the first colour class and one each of the
    other two.  Requires odd n >= 3; every matching has size n + 1 and
    no rainbow matching of size n exists."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"k4_union_instance needs odd n >= 3, got {n}")
    copies = (n + 1) // 2
    classes: list[list[Edge]] = [[], [], []]
    for c in range(copies):
        base = 4 * c
        for cls, pairs in zip(classes, _K4_CLASSES):
            for a, b in pairs:
                cls.append((base + a, base + b))
    red, green, blue = (tuple(sorted(cls)) for cls in classes)
    matchings = tuple(red for _ in range(n - 2)) + (green, blue)
    return Instance(r=2, matchings=matchings, meta={"generator": "k4", "n": n})


def _gadget_classes(r: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """The 2^(r-1) complementary edge pairs of the gadget on vertices
    a_0..a_{r-1}, b_0..b_{r-1} (locally numbered a_j = j, b_j = r + j).

    Class k pairs e = {a_j : j in T} + {b_j : j not in T} with its
    complement, where T always contains 0 and the remaining members of
    T follow the binary expansion of k.  Any two edges from different
    classes intersect, so the gadget alone admits no rainbow matching
    of size 2.
    """
    out = []
    for k in range(2 ** (r - 1)):
        t = {0} | {j for j in range(1, r) if k >> (j - 1) & 1}
        e = tuple(sorted([j for j in t] + [r + j for j in range(r) if j not in t]))
        f = tuple(sorted([r + j for j in t] + [j for j in range(r) if j not in t]))
        out.append((e, f))
    return out


def ach_instance(r: int, n: int) -> Instance:
    """The paired-gadget family on n/2 disjoint gadget copies.

    Each gadget copy contributes one complementary edge pair per colour
    class; the first 2^(r-1) - 1 matchings take distinct classes and
    the remaining matchings all repeat the last class.  r-partite with
    part j = {a_j, b_j} across copies.  The maximum rainbow matching
    has size at most n - 2^(r-2).

    Requires r >= 3 and even n >= 2^(r-1) (with fewer matchings than
    classes the colour scheme is undefined).
    """
    if r < 3:
        raise ValueError(f"ach_instance needs r >= 3, got {r}")
    if n % 2 or n < 2 ** (r - 1):
        raise ValueError(f"ach_instance needs even n >= 2^(r-1) = {2 ** (r - 1)}, got {n}")
    copies = n // 2
    classes = _gadget_classes(r)
    class_edges: list[list[Edge]] = [[] for _ in classes]
    partition = []
    for c in range(copies):
        base = 2 * r * c
        partition.extend(list(range(r)) * 2)
        for idx, (e, f) in enumerate(classes):
            class_edges[idx].append(tuple(base + v for v in e))
            class_edges[idx].append(tuple(base + v for v in f))
    last = 2 ** (r - 1) - 1
    matchings = tuple(
        tuple(sorted(class_edges[min(i, last)])) for i in range(n)
    )
    return Instance(
        r=r,
        matchings=matchings,
        partition=tuple(partition),
        meta={"generator": "ach", "r": r, "n": n},
    )


@dataclass(frozen=True)
class BlockingFamily:
    """n matchings admitting no rainbow matching of size ``blocked_size``.

    ``certified_max`` is the exact solver result recorded when the
    family was certified; it is always < blocked_size, and every
    matching has size >= blocked_size - 1.
    """

    inst: Instance
    blocked_size: int
    certified_max: int


def certify_blocking_family(
    inst: Instance, blocked_size: int, node_budget: int | None = None
) -> BlockingFamily:
    """Run the exact solver and wrap the instance as a blocking family.

    Raises ValueError when the instance does admit a rainbow matching
    of size ``blocked_size``, when a matching is smaller than
    ``blocked_size - 1``, or when the solver budget prevents an exact
    certificate.
    """
    if inst.min_matching_size() < blocked_size - 1:
        raise ValueError("every matching must have size >= blocked_size - 1")
    report = exact_max_rainbow(inst, node_budget=node_budget)
    if report.certificate != "exact-optimum":
        raise ValueError("solver budget exhausted; refusing an uncertified blocking family")
    if report.size >= blocked_size:
        raise ValueError(
            f"not blocked: a rainbow matching of size {report.size} >= {blocked_size} exists"
        )
    return BlockingFamily(inst, blocked_size, report.size)


def blowup_compose(parts: Sequence[BlockingFamily]) -> Instance:
    """Disjoint union of blocking families sharing the same r and n.

    Matching j of the output is the union over parts of matching j on
    block-offset relabelled vertices (offsets recorded in the metadata).
    With part i blocked at t_i, the composition of q parts admits no
    rainbow matching of size ``sum(t_i) - q + 1``.
    """
    if not parts:
        raise ValueError("blowup_compose needs at least one part")
    r = parts[0].inst.r
    n = parts[0].inst.n
    for bf in parts:
        if bf.inst.r != r or bf.inst.n != n:
            raise ValueError("all parts must share the same uniformity r and matching count n")
    offsets = []
    offset = 0
    matchings: list[list[Edge]] = [[] for _ in range(n)]
    partitions: list[int] = []
    partitioned = all(bf.inst.partition is not None for bf in parts)
    for bf in parts:
        offsets.append(offset)
        for j, m in enumerate(bf.inst.matchings):
            matchings[j].extend(tuple(v + offset for v in e) for e in m)
        if partitioned:
            partitions.extend(bf.inst.partition)  # type: ignore[arg-type]
        offset += bf.inst.vertex_count()
    blocked = sum(bf.blocked_size for bf in parts) - len(parts) + 1
    return Instance(
        r=r,
        matchings=tuple(tuple(sorted(m)) for m in matchings),
        partition=tuple(partitions) if partitioned else None,
        meta={
            "generator": "blowup",
            "parts": len(parts),
            "offsets": ",".join(str(o) for o in offsets),
            "blocked_sizes": ",".join(str(bf.blocked_size) for bf in parts),
            "composed_blocked_size": blocked,
        },
    )


def dummy_lift(inst: Instance, m: int) -> Instance:
    """Append m shared fresh pairwise-disjoint edges to every matching.

    The new edges live on r*m new vertices (one per part per edge when
    the instance is partitioned, so r-partiteness is preserved).  If
    the input admits no rainbow matching of size n - m, the output
    admits none of size n.  ``m = 0`` is the identity.
    """
    if m < 0:
        raise ValueError(f"dummy count must be non-negative, got {m}")
    if m == 0:
        return inst
    base = inst.vertex_count()
    dummies = tuple(
        tuple(range(base + k * inst.r, base + (k + 1) * inst.r)) for k in range(m)
    )
    matchings = tuple(tuple(sorted(mt + dummies)) for mt in inst.matchings)
    partition = inst.partition
    if partition is not None:
        partition = partition + tuple(range(inst.r)) * m
    return Instance(
        r=inst.r,
        matchings=matchings,
        partition=partition,
        meta={**inst.meta, "generator": "dummy", "m": m, "base": inst.meta.get("generator", "given")},
    )


def random_instance(r: int, n: int, s: int, seed: int | None = None) -> Instance:
    """n matchings of size s sampled over a pool of r*s + r vertices.

    The pool is tight enough that edges of different matchings collide
    often, which is what the solver test harness wants.  Deterministic
    for a fixed seed; no partition is attached.
    """
    if r < 2:
        raise ValueError(f"uniformity must be >= 2, got {r}")
    if s < 1:
        raise ValueError(f"matching size must be >= 1, got {s}")
    if n < 0:
        raise ValueError(f"matching count must be >= 0, got {n}")
    rng = random.Random(seed)
    pool = list(range(r * s + r))
    matchings = []
    for _ in range(n):
        chosen = rng.sample(pool, r * s)
        edges = tuple(
            make_edge(chosen[i * r : (i + 1) * r]) for i in range(s)
        )
        matchings.append(tuple(sorted(edges)))
    return Instance(
        r=r,
        matchings=tuple(matchings),
        meta={"generator": "random", "r": r, "n": n, "s": s, "seed": seed},
    )


class PszParams(NamedTuple):
    """Parameters of the blocked-family composition for n > 6**r."""

    a: int
    t: int
    q: int
    s: int
    t_prime: int
    bound: int


def psz_composition_params(r: int, n: int) -> PszParams:
    """Composition arithmetic behind the strong upper bound.

    For n > 6**r there is a unique a >= 6 with a^r < n <= (a+1)^r.  With
    t = 3(a+1)r, q = n // t, s = n - q t and t' = s + t, composing q - 1
    blocked families of matching size t with one of size t' yields n
    matchings of size n with no rainbow matching larger than
    ``bound = n - q``.  The identity n = (q-1) t + t' always holds, and
    q >= n^((r-1)/r) / (12 r) is verified here in exact integer
    arithmetic.
    """
    if r < 3:
        raise ValueError(f"requires r >= 3, got {r}")
    if n <= 6 ** r:
        raise ValueError(f"out of domain: requires n > 6**r = {6 ** r}, got {n}")
    root = nth_root_floor(n, r)
    a = root - 1 if root ** r == n else root
    t = 3 * (a + 1) * r
    q = n // t
    s = n - q * t
    t_prime = s + t
    if (12 * r * q) ** r < n ** (r - 1):
        raise AssertionError(f"composition count q={q} fell below n^((r-1)/r)/(12r) at r={r}, n={n}")
    return PszParams(a=a, t=t, q=q, s=s, t_prime=t_prime, bound=n - q)


# ---------------------------------------------------------------------------
# search for blocking families


def _gadget_family(r: int, n: int) -> Instance:
    """A single gadget copy as n matchings of size 2, blocked at 2."""
    classes = _gadget_classes(r)
    last = 2 ** (r - 1) - 1
    matchings = tuple(
        tuple(sorted(classes[min(i, last)])) for i in range(n)
    )
    return Instance(
        r=r,
        matchings=matchings,
        partition=tuple(list(range(r)) * 2),
        meta={"generator": "gadget", "r": r, "n": n},
    )


def _truncate_family(inst: Instance, n: int, t: int) -> Instance:
    """First n matchings, each cut to its first t edges."""
    matchings = tuple(m[:t] for m in inst.matchings[:n])
    return Instance(
        r=inst.r,
        matchings=matchings,
        partition=inst.partition,
        meta={**inst.meta, "generator": "truncated-" + inst.meta.get("generator", "given"), "t": t},
    )


def _deterministic_candidates(r: int, n: int, t: int):
    if r >= 3 and t == 2 and n <= 2 ** (r - 1):
        # beyond 2^(r-1) matchings the gadget repeats a class, and two
        # colours sharing a class yield a rainbow pair
        yield _gadget_family(r, n)
    if r >= 3 and t >= 2:
        # gadget-product seed: a truncation of the paired-gadget family
        # stays blocked because removing edges never helps the rainbow
        lo = max(t, 2 ** (r - 1))
        n_src = lo + lo % 2
        if n_src - 2 ** (r - 2) <= t - 1 and n >= 1:
            src = ach_instance(r, n_src)
            if n <= n_src:
                yield _truncate_family(src, n, t)
    if r == 2 and 2 <= n <= t:
        yield _truncate_family(cycle_instance(t), n, t)
    if r == 2 and t == n + 1 and n % 2 == 1 and n >= 3:
        yield k4_union_instance(n)


def _random_partite_matchings(rng: random.Random, r: int, n: int, t: int) -> list[list[Edge]]:
    """n random perfect matchings of the complete r-partite host with
    parts of size t (part j occupies vertices j*t .. j*t + t - 1)."""
    out = []
    for _ in range(n):
        cols = [list(range(j * t, (j + 1) * t)) for j in range(r)]
        for col in cols:
            rng.shuffle(col)
        out.append([make_edge(col[i] for col in cols) for i in range(t)])
    return out


def find_blocking_family(
    r: int, n: int, t: int, budget: int = 200, seed: int | None = 0
) -> BlockingFamily | None:
    """Search for n matchings of size t with no rainbow matching of size t.

    Deterministic gadget-derived candidates are tried first, then a
    randomised-restart hill climb over families of random perfect
    matchings of the complete r-partite host on t*r vertices, mutating
    one matching at a time and keeping moves that do not increase the
    exact maximum.  Every returned family is certified by the exact
    solver; ``budget`` caps the number of solver evaluations.  Returns
    None when the budget runs out, which is an expected outcome rather
    than an error.
    """
    if t < 1:
        raise ValueError(f"blocked size must be >= 1, got {t}")
    if n < 1:
        raise ValueError(f"matching count must be >= 1, got {n}")
    if r < 2:
        raise ValueError(f"uniformity must be >= 2, got {r}")
    if t == 1:
        return None  # a single non-empty matching always yields rainbow size 1

    evals = 0

    def evaluate(inst: Instance) -> int:
        nonlocal evals
        evals += 1
        return exact_max_rainbow(inst).size

    def wrap(inst: Instance, certified: int) -> BlockingFamily:
        meta = {
            **inst.meta,
            "blocking_seed": seed,
            "blocking_budget": budget,
            "blocking_workers": 1,
        }
        stamped = Instance(inst.r, inst.matchings, inst.partition, meta)
        return BlockingFamily(stamped, t, certified)

    for cand in _deterministic_candidates(r, n, t):
        if evals >= budget:
            return None
        best = evaluate(cand)
        if best < t:
            return wrap(cand, best)

    rng = random.Random(seed)
    while evals < budget:
        state = _random_partite_matchings(rng, r, n, t)
        inst = _matchings_to_instance(r, t, state)
        cur = evaluate(inst)
        if cur < t:
            return wrap(inst, cur)
        stall = 0
        while evals < budget and stall < 4 * n:
            j = rng.randrange(n)
            saved = [list(m) for m in state]
            _mutate_matching(rng, state[j], r, t)
            inst = _matchings_to_instance(r, t, state)
            val = evaluate(inst)
            if val < t:
                return wrap(inst, val)
            if val <= cur:
                stall = stall + 1 if val == cur else 0
                cur = val
            else:
                state = saved
                stall += 1
    return None


def _matchings_to_instance(r: int, t: int, state: list[list[Edge]]) -> Instance:
    return Instance(
        r=r,
        matchings=tuple(tuple(sorted(m)) for m in state),
        partition=tuple(j for j in range(r) for _ in range(t)),
        meta={"generator": "blocking-search", "t": t},
    )


def _mutate_matching(rng: random.Random, matching: list[Edge], r: int, t: int) -> None:
    """Swap the part-j vertices of two edges of one matching (keeps it a
    perfect matching of the r-partite host)."""
    if t < 2:
        return
    j = rng.randrange(r)
    x, y = rng.sample(range(t), 2)
    ex, ey = list(matching[x]), list(matching[y])
    vx = next(i for i, v in enumerate(ex) if j * t <= v < (j + 1) * t)
    vy = next(i for i, v in enumerate(ey) if j * t <= v < (j + 1) * t)
    ex[vx], ey[vy] = ey[vy], ex[vx]
    matching[x] = make_edge(ex)
    matching[y] = make_edge(ey)
