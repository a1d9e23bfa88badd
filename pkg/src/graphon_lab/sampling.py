"""Exact-distribution samplers for kernel random graphs.

A sample on n vertices draws n iid uniform latent coordinates, sorts them
(keeping the permutation), and joins i~j independently with probability
W(x_i, x_j). Adjacency is stored as packed 64-bit rows so clique search
and subset checks run on whole words.

Randomness is split into two independent streams derived from one seed:

* coordinates (and the binomial vertex count of window samples) come from
  a counter-based PCG64 generator;
* each unordered pair (i,j) gets its own uniform by hashing the key
  (i << 32) | j together with the seed through the splitmix64 finalizer.

Hashing per pair means two samples with the same seed and n share both
coordinates and pair uniforms, so sampling a pointwise-dominated kernel
alongside a dominating one yields coupled graphs with a bitwise subgraph
relation; no extra machinery is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, PreconditionError, SpecValidationError
from .graphons import GraphonSpec, Interval, evaluate, grid_dominance_gap, spec_tag

_MASK = (1 << 64) - 1
DEFAULT_CAP = 32768

# Salt separating the pair-uniform stream from seed derivation.
_PAIR_SALT = 0x9E3779B97F4A7C15


def _fin_int(z: int) -> int:
    """splitmix64 finalizer on python ints (used for scalar seed mixing)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integers into one 64-bit seed, order dependent.

    Used to derive independent child seeds, e.g. mix64(master, n, trial).
    """
    z = 0
    for v in parts:
        z = (z + (int(v) & _MASK) + 0x9E3779B97F4A7C15) & _MASK
        z = _fin_int(z)
    return z


def _fin_u64(z: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer on uint64 arrays."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def pair_uniforms(seed: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """The uniform in [0,1) attached to each unordered pair {i,j} by `seed`.

    Symmetric in (i,j); the diagonal gets a value too but samplers never
    use it. Indices must be < 2**32 so keys cannot collide.
    """
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    lo = np.minimum(i, j)
    hi = np.maximum(i, j)
    state = np.uint64(_fin_int(int(seed) ^ _PAIR_SALT))
    key = (lo << np.uint64(32)) | hi
    z = _fin_u64(key ^ state)
    return (z >> np.uint64(11)).astype(np.float64) * (2.0**-53)


@dataclass(frozen=True)
class SampleConfig:
    spec: GraphonSpec
    n: int
    seed: int
    cap: int = DEFAULT_CAP


@dataclass(frozen=True)
class SampledGraph:
    """A sampled graph with sorted latent coordinates.

    coords[k] is the latent coordinate of vertex k and is nondecreasing in
    k; perm maps sorted position to the original draw index. adj holds
    packed rows: bit v of adj[u] is 1 iff u~v. For window samples, window
    records the coordinate range and ambient_n the n of the notional full
    sample the window was thinned from.
    """

    n: int
    coords: np.ndarray = field(repr=False)
    perm: np.ndarray = field(repr=False)
    adj: np.ndarray = field(repr=False)
    seed: int | None
    spec_tag: str
    edges: int
    window: Interval | None = None
    ambient_n: int | None = None

    @property
    def words(self) -> int:
        return self.adj.shape[1]


def _pack_bool_rows(mask: np.ndarray, words: int) -> np.ndarray:
    rows = np.packbits(mask, axis=1, bitorder="little")
    if rows.shape[1] < words * 8:
        rows = np.pad(rows, ((0, 0), (0, words * 8 - rows.shape[1])))
    return np.ascontiguousarray(rows).view(np.uint64)


def _build_adjacency(spec: GraphonSpec, coords: np.ndarray, seed: int) -> np.ndarray:
    """Packed symmetric adjacency; each pair is decided by its own hash."""
    n = coords.size
    words = max(1, (n + 63) // 64)
    adj = np.zeros((n, words), dtype=np.uint64)
    if n <= 1:
        return adj
    cols = np.arange(n, dtype=np.uint64)
    block = max(1, (1 << 23) // n)
    for lo_row in range(0, n, block):
        hi_row = min(n, lo_row + block)
        rows = np.arange(lo_row, hi_row, dtype=np.uint64)
        probs = evaluate(spec, coords[lo_row:hi_row, None], coords[None, :])
        u = pair_uniforms(seed, rows[:, None], cols[None, :])
        mask = u < probs
        # no self loops
        mask[np.arange(hi_row - lo_row), np.arange(lo_row, hi_row)] = False
        adj[lo_row:hi_row] = _pack_bool_rows(mask, words)
    return adj


def _finish(spec, n, coords_raw, seed, window=None, ambient_n=None) -> SampledGraph:
    perm = np.argsort(coords_raw, kind="stable")
    coords = coords_raw[perm]
    adj = _build_adjacency(spec, coords, seed)
    edges = int(np.bitwise_count(adj).sum()) // 2
    return SampledGraph(
        n=n,
        coords=coords,
        perm=perm,
        adj=adj,
        seed=seed,
        spec_tag=spec_tag(spec),
        edges=edges,
        window=window,
        ambient_n=ambient_n,
    )


def sample(config: SampleConfig) -> SampledGraph:
    """Draw a full n-vertex sample of the kernel in `config`."""
    n = int(config.n)
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n > config.cap:
        raise CapacityError(
            f"n={n} exceeds the vertex cap {config.cap}; raise cap= explicitly"
        )
    rng = np.random.default_rng(np.random.PCG64(config.seed))
    coords_raw = rng.random(n)
    return _finish(config.spec, n, coords_raw, config.seed)


def sample_below_threshold(
    config: SampleConfig, center: float, threshold: float
) -> SampledGraph:
    """Sample only the vertices whose coordinate lands within `threshold`
    of `center`, without instantiating the other n - m vertices.

    The vertex count m is Binomial(n, L) for window length L, coordinates
    are uniform on the window, and edges use the kernel at the true
    coordinates, so the result is distributed exactly like the induced
    subgraph of a full n-vertex sample on its window vertices.
    """
    n = int(config.n)
    if n < 0:
        raise DomainError("n must be nonnegative")
    if not (threshold > 0.0):
        raise PreconditionError("threshold must be positive")
    lo = max(0.0, center - threshold)
    hi = min(1.0, center + threshold)
    if not (lo < hi):
        raise PreconditionError(
            f"window around center={center} with threshold={threshold} misses [0,1]"
        )
    window = Interval(lo, hi)
    rng = np.random.default_rng(np.random.PCG64(config.seed))
    m = int(rng.binomial(n, window.length))
    if m > config.cap:
        raise CapacityError(
            f"window holds m={m} vertices, over the cap {config.cap}"
        )
    coords_raw = lo + window.length * rng.random(m)
    return _finish(config.spec, m, coords_raw, config.seed, window=window, ambient_n=n)


@dataclass(frozen=True)
class CoupledPair:
    lower: SampledGraph
    upper: SampledGraph
    certified_gap: float
    grid_points: int


def sample_coupled(
    lower_spec: GraphonSpec,
    upper_spec: GraphonSpec,
    n: int,
    seed: int,
    cap: int = DEFAULT_CAP,
    grid_points: int = 1001,
) -> CoupledPair:
    """Sample both kernels on shared coordinates and pair uniforms.

    Dominance of the kernels is certified on a grid first; the sampled
    graphs then satisfy a bitwise subgraph relation, which is asserted.
    """
    gap, at = grid_dominance_gap(lower_spec, upper_spec, grid_points)
    if gap > 0.0:
        raise PreconditionError(
            f"lower kernel exceeds upper by {gap:.3g} at {at}; not a dominated pair"
        )
    g_lo = sample(SampleConfig(lower_spec, n, seed, cap))
    g_up = sample(SampleConfig(upper_spec, n, seed, cap))
    stray = np.bitwise_count(g_lo.adj & ~g_up.adj).sum()
    if stray:
        raise PreconditionError(
            "coupled sample is not a subgraph: kernels must dominate pointwise, "
            "not just on the certification grid"
        )
    return CoupledPair(lower=g_lo, upper=g_up, certified_gap=gap, grid_points=grid_points)


def count_in_interval(graph: SampledGraph, interval: Interval) -> int:
    """Vertices with coordinate in [lo, hi)."""
    lo_idx, hi_idx = np.searchsorted(graph.coords, [interval.lo, interval.hi], side="left")
    return int(hi_idx - lo_idx)


def coords_min_window(coords: np.ndarray, m: int) -> float:
    """Length of the shortest coordinate interval containing m of the points."""
    n = coords.size
    if not 2 <= m <= n:
        raise PreconditionError(f"need 2 <= m <= n, got m={m}, n={n}")
    return float(np.min(coords[m - 1 :] - coords[: n - m + 1]))


def min_window_length(graph: SampledGraph, m: int) -> float:
    return coords_min_window(graph.coords, m)


def graph_from_dense(
    mask: np.ndarray, coords: np.ndarray | None = None, tag: str = "", seed: int | None = None
) -> SampledGraph:
    """Wrap a dense boolean adjacency matrix (tests, file import).

    When no coordinates are given, evenly spaced ones are synthesized so
    coordinate-based helpers stay usable; they carry no distributional
    meaning in that case.
    """
    mask = np.asarray(mask, dtype=bool)
    n = mask.shape[0]
    if mask.shape != (n, n):
        raise SpecValidationError("adjacency must be square")
    if mask.diagonal().any():
        raise SpecValidationError("adjacency must have an empty diagonal")
    if not np.array_equal(mask, mask.T):
        raise SpecValidationError("adjacency must be symmetric")
    if coords is None:
        coords = np.linspace(0.0, 1.0, n) if n > 1 else np.zeros(n)
    coords = np.asarray(coords, dtype=np.float64)
    if np.any(np.diff(coords) < 0.0):
        raise SpecValidationError("coords must be sorted ascending")
    words = max(1, (n + 63) // 64)
    adj = (
        _pack_bool_rows(mask, words) if n else np.zeros((0, words), dtype=np.uint64)
    )
    return SampledGraph(
        n=n,
        coords=coords,
        perm=np.arange(n),
        adj=adj,
        seed=seed,
        spec_tag=tag,
        edges=int(mask.sum()) // 2,
    )


def unpack_row(graph: SampledGraph, v: int) -> np.ndarray:
    """Boolean neighborhood row of vertex v."""
    return np.unpackbits(
        graph.adj[v].view(np.uint8), count=graph.n, bitorder="little"
    ).astype(bool)


def dense_adjacency(graph: SampledGraph) -> np.ndarray:
    """Full boolean adjacency matrix (meant for small graphs)."""
    return np.unpackbits(
        graph.adj.view(np.uint8), axis=1, count=graph.n, bitorder="little"
    ).astype(bool)


def save_edge_list(graph: SampledGraph, path: str) -> str:
    """Write ``n m`` then one ``i j`` line per edge (i < j, 0-indexed).

    Coordinates go to ``<path>.coords``, one per line, same vertex order.
    Returns the coords path.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{graph.n} {graph.edges}\n")
        for i in range(graph.n):
            row = unpack_row(graph, i)
            for j in np.nonzero(row[i + 1 :])[0]:
                fh.write(f"{i} {i + 1 + int(j)}\n")
    coords_path = path + ".coords"
    with open(coords_path, "w", encoding="utf-8") as fh:
        for x in graph.coords:
            fh.write(f"{float(x)!r}\n")
    return coords_path


def load_edge_list(path: str) -> SampledGraph:
    """Read a graph written by `save_edge_list`.

    The coords companion file is used when present; otherwise synthetic
    evenly spaced coordinates are substituted.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise SpecValidationError(f"{path}: header must be 'n m'")
        n, m = int(header[0]), int(header[1])
        mask = np.zeros((n, n), dtype=bool)
        count = 0
        for ln, text in enumerate(fh, 2):
            text = text.strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise SpecValidationError(f"{path}:{ln}: expected 'i j'")
            i, j = int(parts[0]), int(parts[1])
            if not (0 <= i < j < n):
                raise SpecValidationError(f"{path}:{ln}: need 0 <= i < j < n")
            mask[i, j] = mask[j, i] = True
            count += 1
        if count != m:
            raise SpecValidationError(f"{path}: header says {m} edges, file has {count}")
    coords = None
    try:
        with open(path + ".coords", "r", encoding="utf-8") as fh:
            coords = np.asarray([float(t) for t in fh.read().split()], dtype=np.float64)
        if coords.size != n:
            raise SpecValidationError(f"{path}.coords: expected {n} values, got {coords.size}")
    except FileNotFoundError:
        pass
    return graph_from_dense(mask, coords=coords)
