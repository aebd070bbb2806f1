"""Rainbow-matching solvers: exact search, greedy, local search, sampling.

The exact solver is a branch-and-bound over colours.  Colours with
identical edge sets (every tightness construction repeats matchings)
are grouped into classes, and the search assigns each class an
increasing sequence of edges instead of permuting interchangeable
colours.  Pruning combines the remaining-colour count with a
vertex-count relaxation; the reported size is deterministic.

The local search realises the counting argument behind the
``check_gibounds`` inequality constructively.  Starting from a greedy
matching it applies two moves until neither exists:

* extension: add an edge of an unused colour disjoint from the matching;
* swap: remove one matching edge ``e`` and add two vertex-disjoint edges
  of two distinct unused colours, each meeting the matching only inside
  ``e`` (one out, two in, net +1).

A matching admitting neither move satisfies the inequality with N the
minimum matching size, which is what the verifier re-checks.

Tie-breaking everywhere is lowest colour index first, then lexicographic
edge order; randomised entry points take an explicit seed.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import mpmath

from .core import Edge, Instance, RainbowMatching, is_rainbow_matching

CERT_EXACT = "exact-optimum"
CERT_LOCAL = "local-optimum"
CERT_HEURISTIC = "heuristic"

DEFAULT_SAMPLE_RETRIES = 20


class ExtensionAvailable(ValueError):
    """A supposedly maximal rainbow matching admits an extension."""

    def __init__(self, colour: int, edge: Edge):
        self.colour = colour
        self.edge = edge
        super().__init__(f"colour {colour} has edge {edge} disjoint from the matching")


class SwapAvailable(ValueError):
    """A supposedly swap-maximal rainbow matching admits a 1-out/2-in swap."""

    def __init__(self, removed: tuple[int, Edge], first: tuple[int, Edge], second: tuple[int, Edge]):
        self.removed = removed
        self.first = first
        self.second = second
        super().__init__(
            f"swap available: drop colour {removed[0]} edge {removed[1]}, "
            f"add colour {first[0]} edge {first[1]} and colour {second[0]} edge {second[1]}"
        )


@dataclass(frozen=True)
class SolveStats:
    nodes: int = 0
    swaps: int = 0
    wall_time: float = 0.0
    seed: int | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SolveReport:
    """Solver output: the witness matching, a certificate, statistics.

    Certificates: ``exact-optimum`` (proved maximum), ``local-optimum``
    (no extension, no good-edge swap) and ``heuristic``.  All claims are
    re-checkable from the instance and the witness alone.
    """

    matching: RainbowMatching
    certificate: str
    stats: SolveStats

    @property
    def size(self) -> int:
        return self.matching.size


@dataclass(frozen=True)
class SampleExtendFailure:
    """Structured failure of :func:`sample_and_extend`.

    ``stage`` names what fell short: ``sampling`` when no sampled vertex
    set satisfied both per-colour conditions within the retry limit, or
    ``extension`` when the conditions held but the final matching stayed
    below the target.  ``best`` is the largest valid rainbow matching
    produced on the way.
    """

    stage: str
    detail: str
    attempts: int
    seed: int | None
    best: RainbowMatching
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GoodEdgeTable:
    """Good-edge accounting for a maximal rainbow matching.

    For every colour i unused by the matching M: ``good[i]`` maps each
    edge ``e`` of M that is good for i to its first two witness edges
    (edges of matching i meeting M only inside ``e``); ``g[i]`` counts
    the good edges and ``h[i]`` the edges of matching i meeting exactly
    one edge of M.  ``min_matching_size`` is the N of the counting
    inequality.
    """

    r: int
    n: int
    m: int
    min_matching_size: int
    good: dict[int, dict[Edge, tuple[Edge, Edge]]]
    g: dict[int, int]
    h: dict[int, int]


class _BudgetExhausted(Exception):
    pass


def _mask(edge: Iterable[int]) -> int:
    m = 0
    for v in edge:
        m |= 1 << v
    return m


def _sorted_colours(inst: Instance) -> tuple[list[tuple[Edge, ...]], list[tuple[int, ...]]]:
    """Per-colour edges in lexicographic order, plus their bitmasks."""
    edges = []
    masks = []
    for m in inst.matchings:
        es = tuple(sorted(set(m)))
        edges.append(es)
        masks.append(tuple(_mask(e) for e in es))
    return edges, masks


def _pairs_to_rainbow(pairs: Iterable[tuple[int, Edge]]) -> RainbowMatching:
    return RainbowMatching(tuple(sorted(pairs)))


# ---------------------------------------------------------------------------
# exact search


@dataclass(frozen=True)
class _ColourClass:
    members: tuple[int, ...]  # colour indices sharing this edge set, ascending
    edges: tuple[Edge, ...]  # lexicographically sorted
    masks: tuple[int, ...]


def _colour_classes(inst: Instance) -> list[_ColourClass]:
    edges, masks = _sorted_colours(inst)
    groups: dict[tuple[Edge, ...], list[int]] = {}
    for colour, es in enumerate(edges):
        groups.setdefault(es, []).append(colour)
    classes = []
    for es, members in sorted(groups.items(), key=lambda kv: kv[1][0]):
        classes.append(_ColourClass(tuple(members), es, tuple(_mask(e) for e in es)))
    return classes


def _class_assignment_to_rainbow(
    classes: Sequence[_ColourClass], chosen: Sequence[tuple[int, int]]
) -> RainbowMatching:
    counts: dict[int, int] = {}
    pairs = []
    for ci, pos in chosen:
        k = counts.get(ci, 0)
        counts[ci] = k + 1
        pairs.append((classes[ci].members[k], classes[ci].edges[pos]))
    return _pairs_to_rainbow(pairs)


def _branch_and_bound(
    classes: Sequence[_ColourClass],
    r: int,
    budget: int | None,
    incumbent_size: int,
    incumbent: RainbowMatching | None,
    forced: Sequence[tuple[str, int, int]] = (),
) -> tuple[int, RainbowMatching | None, int, bool]:
    """Search all canonical class assignments.

    ``forced`` is a prefix of root moves (("assign", ci, pos) or
    ("close", ci, 0)) used to split the tree for the parallel mode.
    Returns (best size, witness or None if the incumbent was never
    beaten, nodes explored, budget exhausted flag).
    """
    best_size = incumbent_size
    best_witness = incumbent
    nodes = 0
    chosen: list[tuple[int, int]] = []

    # compat maps open class index -> (members_left, tuple of (pos, mask))
    compat: dict[int, tuple[int, tuple[tuple[int, int], ...]]] = {}
    used0 = 0
    closed_forced = set()
    for kind, ci, pos in forced:
        if kind == "assign":
            chosen.append((ci, pos))
            used0 |= classes[ci].masks[pos]
        else:
            closed_forced.add(ci)
    assigned_count: dict[int, int] = {}
    last_pos: dict[int, int] = {}
    for ci, pos in chosen:
        assigned_count[ci] = assigned_count.get(ci, 0) + 1
        last_pos[ci] = pos
    for ci, cl in enumerate(classes):
        if ci in closed_forced:
            continue
        left = len(cl.members) - assigned_count.get(ci, 0)
        if left <= 0:
            continue
        start = last_pos.get(ci, -1) + 1
        lst = tuple(
            (pos, cl.masks[pos])
            for pos in range(start, len(cl.masks))
            if not cl.masks[pos] & used0
        )
        if lst:
            compat[ci] = (left, lst)

    def dfs(live: dict[int, tuple[int, tuple[tuple[int, int], ...]]]) -> None:
        nonlocal best_size, best_witness, nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise _BudgetExhausted
        cur = len(chosen)
        if cur > best_size:
            best_size = cur
            best_witness = _class_assignment_to_rainbow(classes, chosen)
        if not live:
            return
        total_ub = 0
        pick = -1
        pick_len = -1
        for ci, (left, lst) in live.items():
            total_ub += left if left < len(lst) else len(lst)
            if pick_len < 0 or len(lst) < pick_len:
                pick, pick_len = ci, len(lst)
        if cur + total_ub <= best_size:
            return
        union = 0
        for _, lst in live.values():
            for _, mk in lst:
                union |= mk
        if cur + min(total_ub, union.bit_count() // r) <= best_size:
            return

        left, lst = live[pick]
        for idx, (pos, mk) in enumerate(lst):
            child: dict[int, tuple[int, tuple[tuple[int, int], ...]]] = {}
            for cj, (lj, ej) in live.items():
                if cj == pick:
                    if left > 1:
                        tail = tuple(pm for pm in ej[idx + 1 :] if not pm[1] & mk)
                        if tail:
                            child[cj] = (left - 1, tail)
                else:
                    kept = tuple(pm for pm in ej if not pm[1] & mk)
                    if kept:
                        child[cj] = (lj, kept)
            chosen.append((pick, pos))
            dfs(child)
            chosen.pop()
        # close the whole class: interchangeable colours make exploring
        # "skip member k, use member k+1" redundant
        rest = {cj: v for cj, v in live.items() if cj != pick}
        dfs(rest)

    exhausted = False
    try:
        dfs(compat)
    except _BudgetExhausted:
        exhausted = True
    return best_size, best_witness, nodes, exhausted


def _root_branches(classes: Sequence[_ColourClass]) -> list[tuple[tuple[str, int, int], ...]]:
    """Top-level branch prefixes used to split the exact search."""
    pick = -1
    pick_len = -1
    for ci, cl in enumerate(classes):
        if not cl.edges or not cl.members:
            continue
        if pick_len < 0 or len(cl.edges) < pick_len:
            pick, pick_len = ci, len(cl.edges)
    if pick < 0:
        return [()]
    branches: list[tuple[tuple[str, int, int], ...]] = [
        (("assign", pick, pos),) for pos in range(len(classes[pick].edges))
    ]
    branches.append((("close", pick, 0),))
    return branches


def _solve_subtree(args: tuple) -> tuple[int, RainbowMatching | None, int, bool]:
    inst, forced, incumbent_size, budget = args
    classes = _colour_classes(inst)
    return _branch_and_bound(classes, inst.r, budget, incumbent_size, None, forced)


def exact_max_rainbow(
    inst: Instance,
    node_budget: int | None = None,
    parallel: bool = False,
    max_workers: int | None = None,
) -> SolveReport:
    """Maximum rainbow matching by branch-and-bound.

    With an unexhausted budget the certificate is ``exact-optimum`` and
    the size is the true maximum; if ``node_budget`` nodes are explored
    first, the best matching found so far is returned with certificate
    ``heuristic``.  The optional parallel mode explores the root
    branches in separate processes; the reported size is unchanged.
    """
    t0 = time.perf_counter()
    seed_report = local_search_rainbow(inst)
    incumbent = seed_report.matching
    classes = _colour_classes(inst)

    if not parallel:
        size, witness, nodes, exhausted = _branch_and_bound(
            classes, inst.r, node_budget, incumbent.size, incumbent
        )
    else:
        branches = _root_branches(classes)
        share = None if node_budget is None else max(1, node_budget // len(branches))
        tasks = [(inst, forced, incumbent.size, share) for forced in branches]
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_solve_subtree, tasks))
        size, witness, nodes, exhausted = incumbent.size, incumbent, 0, False
        for bsize, bwitness, bnodes, bexhausted in results:
            nodes += bnodes
            exhausted = exhausted or bexhausted
            if bwitness is not None and bsize > size:
                size, witness = bsize, bwitness

    certificate = CERT_HEURISTIC if exhausted else CERT_EXACT
    stats = SolveStats(
        nodes=nodes,
        swaps=0,
        wall_time=time.perf_counter() - t0,
        seed=None,
        extra={"incumbent_size": incumbent.size, "parallel": parallel},
    )
    return SolveReport(witness if witness is not None else incumbent, certificate, stats)


# ---------------------------------------------------------------------------
# greedy and local search


def greedy_rainbow(
    inst: Instance,
    color_order: Sequence[int] | None = None,
    edge_rule: str = "first-fit",
) -> SolveReport:
    """First-fit greedy: walk the colours in order, add the first edge
    disjoint from the matching so far.  When every matching has size at
    least n the result has size at least ceil(n / r)."""
    if edge_rule != "first-fit":
        raise ValueError(f"unknown edge rule {edge_rule!r}")
    n = inst.n
    if color_order is None:
        order: Sequence[int] = range(n)
    else:
        if sorted(color_order) != list(range(n)):
            raise ValueError("color_order must be a permutation of range(n)")
        order = color_order
    t0 = time.perf_counter()
    edges, masks = _sorted_colours(inst)
    used = 0
    pairs: list[tuple[int, Edge]] = []
    for colour in order:
        for e, mk in zip(edges[colour], masks[colour]):
            if not mk & used:
                pairs.append((colour, e))
                used |= mk
                break
    stats = SolveStats(wall_time=time.perf_counter() - t0)
    return SolveReport(_pairs_to_rainbow(pairs), CERT_HEURISTIC, stats)


def find_extension(inst: Instance, rm: RainbowMatching) -> tuple[int, Edge] | None:
    """First (lowest colour, lexicographic edge) extension move, if any."""
    used_colours = set(rm.colours())
    used = _mask(v for _, e in rm.assignment for v in e)
    edges, masks = _sorted_colours(inst)
    for colour in range(inst.n):
        if colour in used_colours:
            continue
        for e, mk in zip(edges[colour], masks[colour]):
            if not mk & used:
                return colour, e
    return None


def _qualifying_by_edge(
    inst: Instance, rm: RainbowMatching
) -> dict[Edge, dict[int, list[Edge]]]:
    """For each matching edge e and unused colour i, the edges of
    matching i whose intersection with the matching lies inside e.

    Assumes extension-maximality (no edge of an unused colour disjoint
    from the matching); callers check that first.
    """
    vm = _mask(v for _, e in rm.assignment for v in e)
    entry_masks = [(e, _mask(e)) for _, e in sorted(rm.assignment)]
    used_colours = set(rm.colours())
    edges, masks = _sorted_colours(inst)
    table: dict[Edge, dict[int, list[Edge]]] = {e: {} for e, _ in entry_masks}
    for colour in range(inst.n):
        if colour in used_colours:
            continue
        for f, fm in zip(edges[colour], masks[colour]):
            hit = fm & vm
            if not hit:
                continue
            for e, em in entry_masks:
                if hit & ~em == 0:
                    table[e].setdefault(colour, []).append(f)
                    break
    return table


def find_swap(
    inst: Instance, rm: RainbowMatching
) -> tuple[tuple[int, Edge], tuple[int, Edge], tuple[int, Edge]] | None:
    """First 1-out/2-in swap move, if any.

    Looks for a matching edge e and vertex-disjoint edges f, f' of two
    distinct unused colours, each meeting the matching only inside e;
    replacing e by f and f' grows the matching by one.  Requires rm to
    be extension-maximal.
    """
    colour_of = {e: c for c, e in rm.assignment}
    table = _qualifying_by_edge(inst, rm)
    for _, e in sorted(rm.assignment):
        per_colour = table[e]
        cols = sorted(per_colour)
        for ai in range(len(cols)):
            for bi in range(ai + 1, len(cols)):
                i, j = cols[ai], cols[bi]
                for f in per_colour[i]:
                    fm = _mask(f)
                    for f2 in per_colour[j]:
                        if not fm & _mask(f2):
                            return (colour_of[e], e), (i, f), (j, f2)
    return None


def local_search_rainbow(inst: Instance, seed: int | None = None) -> SolveReport:
    """Greedy start, then alternate extension and swap moves to a local
    optimum.  Each move grows the matching by one, so at most n moves
    are made.  The result admits neither move, hence satisfies the
    good-edge counting inequality checked by ``check_gibounds``."""
    t0 = time.perf_counter()
    order = list(range(inst.n))
    if seed is not None:
        random.Random(seed).shuffle(order)
    current = dict(greedy_rainbow(inst, order).matching.assignment)
    swaps = 0
    moves = 0
    while True:
        rm = _pairs_to_rainbow(current.items())
        ext = find_extension(inst, rm)
        if ext is not None:
            current[ext[0]] = ext[1]
            moves += 1
            continue
        swp = find_swap(inst, rm)
        if swp is not None:
            removed, first, second = swp
            del current[removed[0]]
            current[first[0]] = first[1]
            current[second[0]] = second[1]
            swaps += 1
            moves += 1
            continue
        break
    stats = SolveStats(
        nodes=moves,
        swaps=swaps,
        wall_time=time.perf_counter() - t0,
        seed=seed,
    )
    return SolveReport(_pairs_to_rainbow(current.items()), CERT_LOCAL, stats)


def good_edges(inst: Instance, rm: RainbowMatching) -> GoodEdgeTable:
    """Exact good-edge table for a maximal rainbow matching.

    An edge e of the matching M is good for an unused colour i when at
    least two edges of matching i meet M only inside e; those first two
    witnesses are recorded.  Raises :class:`ExtensionAvailable` naming
    an extending edge when rm is not maximal, and ValueError when rm is
    not a valid rainbow matching at all.
    """
    if not is_rainbow_matching(inst, rm):
        raise ValueError("not a valid rainbow matching for this instance")
    ext = find_extension(inst, rm)
    if ext is not None:
        raise ExtensionAvailable(*ext)
    table = _qualifying_by_edge(inst, rm)
    used_colours = set(rm.colours())
    good: dict[int, dict[Edge, tuple[Edge, Edge]]] = {}
    g: dict[int, int] = {}
    h: dict[int, int] = {}
    for colour in range(inst.n):
        if colour in used_colours:
            continue
        good[colour] = {}
        g[colour] = 0
        h[colour] = 0
    for e, per_colour in table.items():
        for colour, fs in per_colour.items():
            h[colour] += len(fs)
            if len(fs) >= 2:
                good[colour][e] = (fs[0], fs[1])
                g[colour] += 1
    return GoodEdgeTable(
        r=inst.r,
        n=inst.n,
        m=rm.size,
        min_matching_size=inst.min_matching_size(),
        good=good,
        g=g,
        h=h,
    )


# ---------------------------------------------------------------------------
# sample and extend


def chernoff_tail(n_trials: int, p, epsilon) -> mpmath.mpf:
    """Binomial tail bound ``2 exp(-eps^2 * n p / 3)`` for
    P(|X - E X| >= eps E X), X ~ B(n, p), evaluated to 50 significant
    digits.  Requires 0 < p < 1 and 0 < epsilon < 1."""
    if n_trials < 0:
        raise ValueError("n_trials must be non-negative")
    p = Fraction(p)
    epsilon = Fraction(epsilon)
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    exponent = -(epsilon ** 2) * n_trials * p / 3
    with mpmath.workdps(50):
        return 2 * mpmath.exp(mpmath.mpf(exponent.numerator) / mpmath.mpf(exponent.denominator))


def sample_and_extend(
    inst: Instance,
    target: int,
    seed: int | None = None,
    retries: int = DEFAULT_SAMPLE_RETRIES,
) -> SolveReport | SampleExtendFailure:
    """Randomised two-phase solver for a full-size rainbow matching.

    Samples a vertex set S with per-vertex probability ``4 n^(-1/(2r))``
    (clamped to 1) and re-samples until every colour has at least
    ``r 2^r sqrt(n)`` edges inside S and at least ``(r+1)n/2`` edges
    avoiding S, or the retry limit is reached.  It then runs the local
    search on the instance restricted to edges avoiding S and greedily
    extends the result with edges inside S.  Success is a valid rainbow
    matching of size exactly ``target`` (which must equal n); any
    shortfall yields a :class:`SampleExtendFailure` naming the stage.

    The per-colour conditions are checked in exact integer arithmetic.
    At small n they routinely fail (the guarantees are asymptotic); the
    solve still runs on the final sample, so trivially extendable
    instances succeed regardless.
    """
    n = inst.n
    if target != n:
        raise ValueError(f"target must equal the number of matchings ({n}), got {target}")
    t0 = time.perf_counter()
    if n == 0:
        return SolveReport(RainbowMatching(), CERT_HEURISTIC, SolveStats(seed=seed))
    r = inst.r
    rng = random.Random(seed)
    verts = sorted(inst.vertices())
    p = 4.0 * n ** (-1.0 / (2 * r))
    p_eff = min(p, 1.0)
    inside_needed_sq = r * r * 4 ** r * n  # count >= r 2^r sqrt(n)  <=>  count^2 >= this
    edges, masks = _sorted_colours(inst)

    checks_met = False
    attempts = 0
    smask = 0
    for attempts in range(1, max(1, retries) + 1):
        smask = _mask(v for v in verts if rng.random() < p_eff)
        ok = True
        for colour in range(n):
            inside = sum(1 for mk in masks[colour] if mk & smask == mk)
            off = sum(1 for mk in masks[colour] if not mk & smask)
            if inside * inside < inside_needed_sq or 2 * off < (r + 1) * n:
                ok = False
                break
        if ok:
            checks_met = True
            break

    restricted = Instance(
        r=inst.r,
        matchings=tuple(
            tuple(e for e, mk in zip(edges[c], masks[c]) if not mk & smask) for c in range(n)
        ),
        partition=inst.partition,
        meta={**inst.meta, "restricted": "off-sample"},
    )
    inner = local_search_rainbow(restricted, seed=rng.randrange(2 ** 32))
    current = dict(inner.matching.assignment)
    used = _mask(v for e in current.values() for v in e)
    for colour in range(n):
        if colour in current:
            continue
        for e, mk in zip(edges[colour], masks[colour]):
            if mk & smask == mk and not mk & used:
                current[colour] = e
                used |= mk
                break

    diagnostics: dict[str, Any] = {
        "p": p,
        "p_effective": p_eff,
        "sample_size": smask.bit_count(),
        "checks_met": checks_met,
        "off_sample_size": inner.size,
    }
    if 0.0 < p_eff < 1.0:
        s_min = inst.min_matching_size()
        if s_min:
            # theoretical per-run failure bounds for the two sampled events
            diagnostics["tail_inside"] = float(
                n * chernoff_tail(s_min, Fraction(p_eff) ** r, Fraction(1, 2))
            )
            eps = min(Fraction(1, 2), Fraction(1, max(2, round(n ** (1.0 / (2 * r))))))
            diagnostics["tail_avoiding"] = float(
                n * chernoff_tail(s_min, 1 - (1 - Fraction(p_eff)) ** r, eps)
            )

    result = _pairs_to_rainbow(current.items())
    if result.size == n:
        stats = SolveStats(
            nodes=inner.stats.nodes,
            swaps=inner.stats.swaps,
            wall_time=time.perf_counter() - t0,
            seed=seed,
            extra={"attempts": attempts, **diagnostics},
        )
        return SolveReport(result, CERT_HEURISTIC, stats)
    if not checks_met:
        stage = "sampling"
        detail = (
            f"no sample satisfied the per-colour conditions within {attempts} attempts "
            f"(need every colour to keep >= {(r + 1) * n / 2:g} edges off the sample and "
            f"ceil(r 2^r sqrt(n)) edges inside it)"
        )
    else:
        stage = "extension"
        detail = (
            f"sample conditions held but the matching reached only {result.size} of {n} "
            f"colours ({inner.size} off-sample, {result.size - inner.size} extended inside)"
        )
    return SampleExtendFailure(
        stage=stage,
        detail=detail,
        attempts=attempts,
        seed=seed,
        best=result,
        diagnostics=diagnostics,
    )
