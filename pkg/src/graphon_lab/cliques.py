"""Exact and greedy clique search on packed-bitset graphs.

The exact solver is a branch-and-bound over packed 64-bit candidate sets
with a greedy-coloring upper bound: at each node the candidates are
colored greedily, vertices are branched in descending color order, and a
branch is cut once depth + color can no longer beat the incumbent. Budgets
on explored nodes and wall time turn the solver into an anytime method:
when a budget trips, the incumbent is returned with status
``budget_exceeded`` instead of raising.

Two greedy routines complement it: plain degree-descending greedy (also
used to warm start the exact search) and the threshold heuristic that
keeps only vertices with latent coordinate near a kernel maximizer and
deletes max-missing-degree vertices until a clique remains.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit, objmode

from .errors import PreconditionError, UnsupportedSpecError
from .graphons import GraphonSpec
from .sampling import SampledGraph, dense_adjacency, unpack_row

_U0 = np.uint64(0)
_U1 = np.uint64(1)
_U6 = np.uint64(6)
_U63 = np.uint64(63)

# How often (in explored nodes) the wall clock is polled.
_TIME_POLL_MASK = np.int64((1 << 14) - 1)


@dataclass(frozen=True)
class SolveBudget:
    """Resource limits for the exact solver; <=0 disables a limit."""

    max_nodes: int = 50_000_000
    max_millis: int = 120_000


@dataclass(frozen=True)
class CliqueResult:
    vertices: tuple[int, ...]
    size: int
    method: str
    status: str  # optimal | lower_bound | budget_exceeded
    stats: dict = field(default_factory=dict)
    warning: str | None = None


@njit(inline="always")
def _popcnt(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + (
        (x >> np.uint64(2)) & np.uint64(0x3333333333333333)
    )
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(inline="always")
def _ctz(x):
    n = 0
    if x & np.uint64(0xFFFFFFFF) == _U0:
        n += 32
        x >>= np.uint64(32)
    if x & np.uint64(0xFFFF) == _U0:
        n += 16
        x >>= np.uint64(16)
    if x & np.uint64(0xFF) == _U0:
        n += 8
        x >>= np.uint64(8)
    if x & np.uint64(0xF) == _U0:
        n += 4
        x >>= np.uint64(4)
    if x & np.uint64(0x3) == _U0:
        n += 2
        x >>= np.uint64(2)
    if x & np.uint64(0x1) == _U0:
        n += 1
    return n


@njit
def _expand(adj, words, P, r_size, cur, best_size, best_verts, counters, max_nodes, deadline):
    """One branch-and-bound node; P is owned (and consumed) by the call."""
    counters[0] += 1
    if max_nodes > 0 and counters[0] > max_nodes:
        counters[1] = 1
    if deadline > 0.0 and (counters[0] & _TIME_POLL_MASK) == 0:
        with objmode(now="float64"):
            now = time.time()
        if now > deadline:
            counters[1] = 1
    if counters[1] != 0:
        return
    m = 0
    for w in range(words):
        m += int(_popcnt(P[w]))
    if m == 0:
        if r_size > best_size[0]:
            best_size[0] = r_size
            for t in range(r_size):
                best_verts[t] = cur[t]
        return
    kmin = best_size[0] - r_size
    if m <= kmin:
        # even an all-clique candidate set cannot beat the incumbent
        return
    # greedy coloring by class sweep, keeping class bitsets for recoloring;
    # rows are zeroed lazily as classes open (most of the array is unused)
    classes = np.empty((m, words), np.uint64)
    num_classes = 0
    q = P.copy()
    cand = np.empty(words, np.uint64)
    colored = 0
    while colored < m:
        for w in range(words):
            cand[w] = q[w]
            classes[num_classes, w] = _U0
        while True:
            v = -1
            for w in range(words):
                if cand[w] != _U0:
                    v = (w << 6) + _ctz(cand[w])
                    break
            if v < 0:
                break
            bit = _U1 << (np.uint64(v) & _U63)
            classes[num_classes, v >> 6] |= bit
            colored += 1
            q[v >> 6] &= ~bit
            cand[v >> 6] &= ~bit
            for w in range(words):
                cand[w] &= ~adj[v, w]
        num_classes += 1
    # recolor pass: pull vertices from classes above the pruning threshold
    # down into it, swapping out a single conflicting vertex when needed
    if 1 < kmin < num_classes:
        for c in range(kmin, num_classes):
            for w0 in range(words):
                x = classes[c, w0]
                while x != _U0:
                    v = (w0 << 6) + _ctz(x)
                    x &= x - _U1
                    moved = False
                    for c1 in range(kmin):
                        conflicts = 0
                        wv = -1
                        for w in range(words):
                            iv = classes[c1, w] & adj[v, w]
                            if iv != _U0:
                                conflicts += int(_popcnt(iv))
                                if conflicts > 1:
                                    break
                                wv = (w << 6) + _ctz(iv)
                        if conflicts > 1:
                            continue
                        vbit = _U1 << (np.uint64(v) & _U63)
                        if conflicts == 0:
                            classes[c, v >> 6] &= ~vbit
                            classes[c1, v >> 6] |= vbit
                            moved = True
                            break
                        for c2 in range(kmin):
                            if c2 == c1:
                                continue
                            ok2 = True
                            for w in range(words):
                                if classes[c2, w] & adj[wv, w] != _U0:
                                    ok2 = False
                                    break
                            if ok2:
                                wbit = _U1 << (np.uint64(wv) & _U63)
                                classes[c1, wv >> 6] &= ~wbit
                                classes[c2, wv >> 6] |= wbit
                                classes[c, v >> 6] &= ~vbit
                                classes[c1, v >> 6] |= vbit
                                moved = True
                                break
                        if moved:
                            break
    # flatten in ascending color order, compacting away emptied classes
    order = np.empty(m, np.int32)
    colors = np.empty(m, np.int32)
    idx = 0
    col = 0
    for c in range(num_classes):
        first = True
        for w in range(words):
            x = classes[c, w]
            while x != _U0:
                v = (w << 6) + _ctz(x)
                x &= x - _U1
                if first:
                    col += 1
                    first = False
                order[idx] = v
                colors[idx] = col
                idx += 1
    for t in range(m - 1, -1, -1):
        if r_size + colors[t] <= best_size[0]:
            return
        v = order[t]
        P[v >> 6] &= ~(_U1 << (np.uint64(v) & _U63))
        new_p = np.empty(words, np.uint64)
        for w in range(words):
            new_p[w] = P[w] & adj[v, w]
        cur[r_size] = v
        _expand(adj, words, new_p, r_size + 1, cur, best_size, best_verts, counters, max_nodes, deadline)
        if counters[1] != 0:
            return


@njit
def _solve(adj, n, words, init_size, init_verts, max_nodes, deadline):
    best_size = np.zeros(1, np.int64)
    best_size[0] = init_size
    best_verts = np.full(n, -1, np.int32)
    for i in range(init_size):
        best_verts[i] = init_verts[i]
    cur = np.empty(n, np.int32)
    counters = np.zeros(2, np.int64)
    p = np.zeros(words, np.uint64)
    for v in range(n):
        p[v >> 6] |= _U1 << (np.uint64(v) & _U63)
    _expand(adj, words, p, 0, cur, best_size, best_verts, counters, max_nodes, deadline)
    return best_size[0], best_verts, counters[0], counters[1]


def verify_clique(graph: SampledGraph, vertices) -> bool:
    """True iff `vertices` are distinct, in range, pairwise adjacent."""
    verts = [int(v) for v in vertices]
    if len(set(verts)) != len(verts):
        return False
    if any(v < 0 or v >= graph.n for v in verts):
        return False
    if len(verts) < 2:
        return True
    sub = dense_adjacency_of(graph, np.asarray(verts, dtype=np.int64))
    return bool(np.all(sub | np.eye(len(verts), dtype=bool)))


def _checked(graph: SampledGraph, result: CliqueResult) -> CliqueResult:
    if not verify_clique(graph, result.vertices):
        raise AssertionError(
            f"{result.method} returned a non-clique of size {result.size}"
        )
    return result


def _greedy_over_order(graph: SampledGraph, order: np.ndarray) -> list[int]:
    keep: list[int] = []
    cand = np.ones(graph.n, dtype=bool)
    for v in order:
        if cand[v]:
            keep.append(int(v))
            cand &= unpack_row(graph, int(v))
    keep.sort()
    return keep


def degree_greedy_clique(graph: SampledGraph) -> CliqueResult:
    """Scan vertices by descending degree, keeping each one compatible with
    all previously kept; a cheap lower bound and exact-solver warm start."""
    t0 = time.perf_counter()
    n = graph.n
    if n == 0:
        return CliqueResult((), 0, "degree_greedy", "lower_bound", {"elapsed_ms": 0.0})
    degrees = np.bitwise_count(graph.adj).sum(axis=1)
    keep = _greedy_over_order(graph, np.argsort(-degrees, kind="stable"))
    elapsed = (time.perf_counter() - t0) * 1000.0
    return _checked(
        graph,
        CliqueResult(
            tuple(keep), len(keep), "degree_greedy", "lower_bound", {"elapsed_ms": elapsed}
        ),
    )


def _improve_clique(graph: SampledGraph, keep: list[int]) -> list[int]:
    """Plateau search: swap one member out for a non-member missing only that
    edge, then re-extend greedily; repeat until a sweep yields no growth."""
    n = graph.n
    best = list(keep)
    for _ in range(8):
        members = np.asarray(best, dtype=np.int64)
        common = np.ones(n, dtype=bool)
        hits = np.zeros(n, dtype=np.int64)
        for v in members:
            row = unpack_row(graph, int(v))
            common &= row
            hits += row
        common[members] = False
        if common.any():
            order = np.flatnonzero(common)
            ext = list(members) + _greedy_over_order(graph, order)
            ext.sort()
            best = ext
            continue
        # hits == size-1: candidate v misses exactly one member u; swapping u
        # out for v keeps the size and may open a strictly larger extension.
        grown = False
        for v in np.flatnonzero(hits == len(best) - 1):
            row = unpack_row(graph, int(v))
            u = members[~row[members]][0]
            trial = [int(w) for w in members if w != u] + [int(v)]
            cand = np.ones(n, dtype=bool)
            for w in trial:
                cand &= unpack_row(graph, int(w))
            cand[trial] = False
            if cand.any():
                trial += _greedy_over_order(graph, np.flatnonzero(cand))
                trial.sort()
                best = trial
                grown = True
                break
        if not grown:
            break
    return best


def _warm_start(graph: SampledGraph, restarts: int = 16) -> list[int]:
    """Best greedy clique over several vertex orderings, then plateau swaps.

    Orderings tried: descending degree, degree-jittered restarts, and
    coordinate-proximity sweeps around random anchors (cliques under
    distance-like kernels cluster in latent coordinate space). A strong
    incumbent before branch and bound starts shrinks the search; the rng
    keeps each restart deterministic given the graph seed.
    """
    degrees = np.bitwise_count(graph.adj).sum(axis=1).astype(np.float64)
    rng = np.random.default_rng(graph.seed if graph.seed is not None else 0)
    orders = [np.argsort(-degrees, kind="stable")]
    scale = max(1.0, float(degrees.mean()))
    for _ in range(restarts):
        jitter = degrees + rng.random(graph.n) * scale
        orders.append(np.argsort(-jitter, kind="stable"))
    lo, hi = float(graph.coords[0]), float(graph.coords[-1])
    anchors = np.concatenate(([0.5 * (lo + hi)], rng.uniform(lo, hi, size=restarts)))
    for c in anchors:
        orders.append(np.argsort(np.abs(graph.coords - c), kind="stable"))
    best: list[int] = []
    for order in orders:
        keep = _greedy_over_order(graph, order)
        if len(keep) > len(best):
            best = keep
    return _improve_clique(graph, best)


def exact_max_clique(graph: SampledGraph, budget: SolveBudget = SolveBudget()) -> CliqueResult:
    """Maximum clique by bounded branch and bound.

    Status is ``optimal`` when the search ran to completion and
    ``budget_exceeded`` when a node or time budget tripped first; in either
    case the returned vertices form a verified clique (the best incumbent).
    """
    t0 = time.perf_counter()
    n = graph.n
    if n == 0:
        return CliqueResult((), 0, "exact", "optimal", {"nodes": 0, "elapsed_ms": 0.0})
    warm = _warm_start(graph)
    # Degree-descending vertex order tightens the coloring bound.
    degrees = np.bitwise_count(graph.adj).sum(axis=1)
    order = np.argsort(-degrees, kind="stable").astype(np.int64)
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    dense = dense_adjacency(graph)
    dense = dense[np.ix_(order, order)]
    words = max(1, (n + 63) // 64)
    padded = np.packbits(dense, axis=1, bitorder="little")
    if padded.shape[1] < words * 8:
        padded = np.pad(padded, ((0, 0), (0, words * 8 - padded.shape[1])))
    adj = np.ascontiguousarray(padded).view(np.uint64)
    init = rank[np.asarray(warm, dtype=np.int64)].astype(np.int32) if warm else np.empty(0, np.int32)
    deadline = time.time() + budget.max_millis / 1000.0 if budget.max_millis > 0 else 0.0
    best_size, best_verts, nodes, aborted = _solve(
        adj, n, words, len(warm), init, budget.max_nodes, deadline
    )
    verts = sorted(int(order[v]) for v in best_verts[: int(best_size)])
    elapsed = (time.perf_counter() - t0) * 1000.0
    status = "budget_exceeded" if aborted else "optimal"
    return _checked(
        graph,
        CliqueResult(
            tuple(verts),
            int(best_size),
            "exact",
            status,
            {"nodes": int(nodes), "elapsed_ms": elapsed, "warm_start": len(warm)},
        ),
    )


def threshold_greedy_clique(
    graph: SampledGraph, center: float | None = None, threshold: float | None = None
) -> CliqueResult:
    """Keep vertices with coordinate within `threshold` of `center`, then
    delete the vertex covering the most missing edges (ties: lowest id)
    until what is left is a clique.

    On a window sample (`graph.window` set) the arguments may be omitted:
    every vertex is already inside the window. The result size is at least
    |S| minus the number of missing edges inside S.
    """
    t0 = time.perf_counter()
    if center is None or threshold is None:
        if graph.window is None:
            raise PreconditionError(
                "center and threshold are required unless the graph is a window sample"
            )
        members = np.arange(graph.n)
    else:
        lo = np.searchsorted(graph.coords, center - threshold, side="left")
        hi = np.searchsorted(graph.coords, center + threshold, side="right")
        members = np.arange(lo, hi)
    s = members.size
    if s == 0:
        elapsed = (time.perf_counter() - t0) * 1000.0
        return CliqueResult(
            (),
            0,
            "threshold_greedy",
            "lower_bound",
            {"window_size": 0, "missing_edges": 0, "deleted": 0, "elapsed_ms": elapsed},
            warning="empty window: no coordinates within threshold of center",
        )
    sub = dense_adjacency_of(graph, members)
    missing = ~sub
    np.fill_diagonal(missing, False)
    missing_total = int(missing.sum()) // 2
    alive = np.ones(s, dtype=bool)
    miss_deg = missing.sum(axis=1).astype(np.int64)
    deleted = 0
    while True:
        worst = int(np.argmax(miss_deg))
        if miss_deg[worst] == 0:
            break
        alive[worst] = False
        miss_deg[missing[worst]] -= 1
        miss_deg[worst] = 0
        missing[worst, :] = False
        missing[:, worst] = False
        deleted += 1
    verts = tuple(int(v) for v in members[alive])
    elapsed = (time.perf_counter() - t0) * 1000.0
    return _checked(
        graph,
        CliqueResult(
            verts,
            len(verts),
            "threshold_greedy",
            "lower_bound",
            {
                "window_size": int(s),
                "missing_edges": missing_total,
                "deleted": deleted,
                "elapsed_ms": elapsed,
            },
        ),
    )


def dense_adjacency_of(graph: SampledGraph, vertices: np.ndarray) -> np.ndarray:
    """Dense boolean adjacency of the induced subgraph on `vertices`."""
    rows = np.unpackbits(
        graph.adj[vertices].view(np.uint8), axis=1, count=graph.n, bitorder="little"
    ).astype(bool)
    return rows[:, vertices]


def induced_subgraph(graph: SampledGraph, vertices) -> SampledGraph:
    """Induced subgraph as a standalone graph (vertices renumbered 0..m-1)."""
    from .sampling import graph_from_dense

    vertices = np.asarray(sorted(int(v) for v in vertices), dtype=np.int64)
    mask = dense_adjacency_of(graph, vertices)
    coords = graph.coords[vertices] if graph.coords is not None else None
    return graph_from_dense(mask, coords=coords, tag=graph.spec_tag, seed=graph.seed)


def default_threshold(spec: GraphonSpec, n: int) -> tuple[float, float]:
    """(center, threshold) pairs under which the threshold heuristic tracks
    each family's clique growth.

    sqrt(r):   center 0, threshold (3 e r)^(-1/2) n^(-1/2)
    poly(r):   center 0, threshold e^(-2/(1+r)) n^(-1/(r+1))
    holder:    poly rule with r = alpha and n scaled by C, because the
               truncated kernel on [0, C^(-1/alpha)] is the poly(alpha)
               kernel on a C-rescaled coordinate
    line:      center 1/2, threshold n^(-1/2) log n
    flatexp:   center 0, threshold 1/sqrt(log n)
    osc:       center 0, the sqrt(1) rule (its factor has slope -1 at 0)
    """
    if n < 1:
        raise PreconditionError("n must be positive")
    if spec.window is not None:
        raise UnsupportedSpecError(
            "no default threshold for windowed specs; pass center/threshold explicitly"
        )
    fam = spec.family
    if fam == "sqrt":
        return 0.0, (3.0 * math.e * spec.r) ** -0.5 * n**-0.5
    if fam == "poly":
        return 0.0, math.exp(-2.0 / (1.0 + spec.r)) * n ** (-1.0 / (spec.r + 1.0))
    if fam == "holder":
        a = spec.alpha
        return 0.0, math.exp(-2.0 / (1.0 + a)) * (spec.c * n) ** (-1.0 / (a + 1.0))
    if fam == "line":
        return 0.5, math.log(n) / math.sqrt(n)
    if fam == "flatexp":
        if n < 2:
            raise PreconditionError("flatexp threshold needs n >= 2")
        return 0.0, 1.0 / math.sqrt(math.log(n))
    if fam == "osc":
        return 0.0, (3.0 * math.e) ** -0.5 * n**-0.5
    raise UnsupportedSpecError(
        f"family {fam} has no known coordinate maximizer; pass center/threshold explicitly"
    )
