"""Sector digraph construction, degree statistics and nearest-neighbor queries.

Two builders share one containment predicate: a grid builder that buckets
points into cells of side ``r`` and scans the neighboring cells of each
source, and a brute-force builder used as an oracle. Both return arcs sorted
by ``(source, target)`` so their outputs compare equal element for element.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from sectorlab.geometry import (
    L2,
    TWO_PI,
    NormKind,
    Plane,
    Region,
    in_sector,
    in_spherical_sector,
    sector_bounding_box,
    spherical_axis,
)
from sectorlab.pointprocess import MarkedPointCloud

logger = logging.getLogger(__name__)

DegreeKind = Literal["out", "in"]
BuildMethod = Literal["grid", "brute"]

_GRID_CHUNK = 1 << 15
_BRUTE_CELLS = 1 << 20
# Relative slack for cell-level pruning and the kNN ring stopping rule.
_EDGE_SLACK = 1e-9
_RING_SLACK = 1e-12


@dataclass(frozen=True)
class GeometricDigraph:
    """Degrees (and optionally arcs) of a sector digraph on ``n`` vertices.

    ``arcs`` has shape ``(m, 2)`` and is sorted by ``(source, target)``; it
    is ``None`` when the graph was built in degree-only mode.
    """

    n: int
    alpha: float
    r: float
    norm: NormKind
    out_deg: NDArray[np.int64]
    in_deg: NDArray[np.int64]
    arcs: NDArray[np.int64] | None = None
    dimension: int = 2

    @property
    def arc_count(self) -> int:
        return int(self.out_deg.sum())

    def degrees(self, kind: DegreeKind) -> NDArray[np.int64]:
        if kind == "out":
            return self.out_deg
        if kind == "in":
            return self.in_deg
        raise ValueError(f"degree kind must be 'out' or 'in', got {kind!r}")

    def arc_set(self) -> set[tuple[int, int]]:
        if self.arcs is None:
            raise ValueError("digraph was built without arcs")
        return {(int(i), int(j)) for i, j in self.arcs}

    def has_arc(self, i: int, j: int) -> bool:
        if self.arcs is None:
            raise ValueError("digraph was built without arcs")
        keys = self.arcs[:, 0] * self.n + self.arcs[:, 1]
        key = i * self.n + j
        pos = int(np.searchsorted(keys, key))
        return pos < len(keys) and int(keys[pos]) == key


@dataclass(frozen=True)
class DegreeStatistic:
    """A degree count ``xi`` (at least ``k``) or ``eta`` (exactly ``k``) over a region."""

    kind: DegreeKind
    k: int
    region: Region
    value: int
    exact: bool = False


# ---------------------------------------------------------------------------
# Spatial index
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridIndex:
    """Points bucketed into square (cubic) cells, stored as a sorted key array.

    Cell coordinates are 64-bit integers counted from the lower corner of
    the point set, so unbounded supports never need a fixed grid.
    """

    cell_size: float
    origin: NDArray[np.float64]
    extent: tuple[int, ...]
    cells: NDArray[np.int64]
    keys: NDArray[np.int64]
    order: NDArray[np.int64]
    sorted_keys: NDArray[np.int64]
    strides: NDArray[np.int64]

    @classmethod
    def build(cls, points: NDArray[np.float64], cell_size: float) -> GridIndex:
        points = np.asarray(points, dtype=np.float64)
        if not (cell_size > 0.0) or not math.isfinite(cell_size):
            raise ValueError(f"cell size must be positive and finite, got {cell_size}")
        n, dim = points.shape
        if n == 0:
            origin = np.zeros(dim)
            cells = np.zeros((0, dim), dtype=np.int64)
            extent = (1,) * dim
        else:
            origin = points.min(axis=0)
            cells = np.floor((points - origin) / cell_size).astype(np.int64)
            extent = tuple(int(e) + 1 for e in cells.max(axis=0))
        if math.prod(extent) >= 2**62:
            raise ValueError(f"grid of {extent} cells overflows 64-bit cell keys")
        strides = np.array(
            [math.prod(extent[:axis]) for axis in range(dim)], dtype=np.int64
        )
        keys = cells @ strides if n else np.zeros(0, dtype=np.int64)
        order = np.argsort(keys, kind="stable")
        return cls(
            cell_size=float(cell_size),
            origin=origin,
            extent=extent,
            cells=cells,
            keys=keys,
            order=order,
            sorted_keys=keys[order],
            strides=strides,
        )

    @property
    def dimension(self) -> int:
        return len(self.extent)

    def offsets(self, reach: int = 1) -> NDArray[np.int64]:
        """All cell offsets with every coordinate in ``[-reach, reach]``."""
        span = range(-reach, reach + 1)
        return np.array(list(itertools.product(span, repeat=self.dimension)), dtype=np.int64)

    def bucket(self, cell: tuple[int, ...]) -> NDArray[np.int64]:
        """Indices of the points stored in ``cell``."""
        c = np.asarray(cell, dtype=np.int64)
        if np.any(c < 0) or np.any(c >= np.asarray(self.extent)):
            return np.zeros(0, dtype=np.int64)
        key = int(c @ self.strides)
        lo = np.searchsorted(self.sorted_keys, key, "left")
        hi = np.searchsorted(self.sorted_keys, key, "right")
        return self.order[lo:hi]

    def occupied_cells(self) -> Iterator[tuple[int, ...]]:
        for row in np.unique(self.cells, axis=0):
            yield tuple(int(v) for v in row)

    def cell_lower(self, cells: NDArray[np.int64]) -> NDArray[np.float64]:
        """Lower corners of the given cells."""
        return self.origin + cells * self.cell_size

    def pairs(
        self, sources: NDArray[np.int64], offset: NDArray[np.int64]
    ) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
        """Every ``(source, point)`` pair with the point in the source's cell shifted by ``offset``."""
        target_cells = self.cells[sources] + offset
        valid = np.all((target_cells >= 0) & (target_cells < np.asarray(self.extent)), axis=1)
        sources = sources[valid]
        query = target_cells[valid] @ self.strides
        lo = np.searchsorted(self.sorted_keys, query, "left")
        hi = np.searchsorted(self.sorted_keys, query, "right")
        counts = hi - lo
        total = int(counts.sum())
        src = np.repeat(sources, counts)
        base = np.repeat(lo - (np.cumsum(counts) - counts), counts)
        tgt = self.order[base + np.arange(total)]
        return src, tgt


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


@dataclass
class _Chunk:
    src: NDArray[np.int64]
    tgt: NDArray[np.int64]


PairTest = Callable[[NDArray[np.int64], NDArray[np.int64]], NDArray[np.bool_]]
RowTest = Callable[[NDArray[np.int64]], NDArray[np.bool_]]
CellFilter = Callable[[NDArray[np.int64], NDArray[np.int64]], NDArray[np.int64]]


def _check_params(alpha: float, r: float) -> None:
    if not (r > 0.0) or not math.isfinite(r):
        raise ValueError(f"radius must be positive and finite, got {r}")
    if not (0.0 < alpha <= TWO_PI):
        raise ValueError(f"alpha must lie in (0, 2pi], got {alpha}")


def _ranges(n: int, size: int) -> list[NDArray[np.int64]]:
    return [np.arange(a, min(a + size, n), dtype=np.int64) for a in range(0, n, size)]


def _run_chunks(
    work: Callable[[NDArray[np.int64]], _Chunk], chunks: list[NDArray[np.int64]], threads: int
) -> list[_Chunk]:
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, chunks))
    return [work(c) for c in chunks]


def _assemble(
    chunks: list[_Chunk],
    n: int,
    alpha: float,
    r: float,
    norm: NormKind,
    keep_arcs: bool,
    dimension: int,
) -> GeometricDigraph:
    out_deg = np.zeros(n, dtype=np.int64)
    in_deg = np.zeros(n, dtype=np.int64)
    for chunk in chunks:
        out_deg += np.bincount(chunk.src, minlength=n)
        in_deg += np.bincount(chunk.tgt, minlength=n)
    arcs = None
    if keep_arcs:
        if chunks:
            arcs = np.column_stack(
                [np.concatenate([c.src for c in chunks]), np.concatenate([c.tgt for c in chunks])]
            ).astype(np.int64)
        else:
            arcs = np.zeros((0, 2), dtype=np.int64)
    return GeometricDigraph(n, alpha, r, norm, out_deg, in_deg, arcs, dimension)


def _grid_worker(index: GridIndex, test: PairTest, prune: CellFilter | None) -> Callable[[NDArray[np.int64]], _Chunk]:
    offsets = index.offsets(1)

    def work(sources: NDArray[np.int64]) -> _Chunk:
        src_parts: list[NDArray[np.int64]] = []
        tgt_parts: list[NDArray[np.int64]] = []
        for offset in offsets:
            candidates = prune(sources, offset) if prune is not None else sources
            src, tgt = index.pairs(candidates, offset)
            distinct = src != tgt
            src, tgt = src[distinct], tgt[distinct]
            hit = test(src, tgt)
            src_parts.append(src[hit])
            tgt_parts.append(tgt[hit])
        src = np.concatenate(src_parts) if src_parts else np.zeros(0, dtype=np.int64)
        tgt = np.concatenate(tgt_parts) if tgt_parts else np.zeros(0, dtype=np.int64)
        order = np.lexsort((tgt, src))
        return _Chunk(src[order], tgt[order])

    return work


def _brute_worker(test: RowTest) -> Callable[[NDArray[np.int64]], _Chunk]:
    def work(rows: NDArray[np.int64]) -> _Chunk:
        hit = test(rows)
        hit[np.arange(len(rows)), rows] = False
        r_idx, c_idx = np.nonzero(hit)
        return _Chunk(rows[r_idx].astype(np.int64), c_idx.astype(np.int64))

    return work


def _build(
    points: NDArray[np.float64],
    r: float,
    pair_test: PairTest,
    row_test: RowTest,
    method: BuildMethod,
    threads: int,
    prune_factory: Callable[[GridIndex], CellFilter] | None = None,
) -> list[_Chunk]:
    n = len(points)
    if n == 0:
        return []
    if threads < 1:
        raise ValueError(f"threads must be at least 1, got {threads}")
    if method == "grid":
        index = GridIndex.build(points, r)
        prune = prune_factory(index) if prune_factory is not None else None
        size = max(1, min(_GRID_CHUNK, -(-n // threads)))
        return _run_chunks(_grid_worker(index, pair_test, prune), _ranges(n, size), threads)
    if method == "brute":
        size = max(1, _BRUTE_CELLS // n)
        return _run_chunks(_brute_worker(row_test), _ranges(n, size), threads)
    raise ValueError(f"unknown build method {method!r}; expected 'grid' or 'brute'")


def build_digraph(
    cloud: MarkedPointCloud,
    alpha: float,
    r: float,
    norm: NormKind = L2,
    method: BuildMethod = "grid",
    *,
    keep_arcs: bool = True,
    threads: int = 1,
) -> GeometricDigraph:
    """Build the planar sector digraph: arc ``(i, j)`` iff ``X_j`` is in ``S(X_i, Y_i, r)``.

    ``keep_arcs=False`` returns degrees only. Output does not depend on
    ``threads``.
    """
    _check_params(alpha, r)
    if cloud.dimension != 2:
        raise ValueError("build_digraph needs a planar cloud; use build_digraph_3d")
    x = np.ascontiguousarray(cloud.positions[:, 0])
    y = np.ascontiguousarray(cloud.positions[:, 1])
    incl = cloud.inclinations

    def pair_test(src: NDArray[np.int64], tgt: NDArray[np.int64]) -> NDArray[np.bool_]:
        return in_sector(x[tgt] - x[src], y[tgt] - y[src], incl[src], alpha, r, norm)

    def row_test(rows: NDArray[np.int64]) -> NDArray[np.bool_]:
        return in_sector(
            x[None, :] - x[rows, None], y[None, :] - y[rows, None], incl[rows, None], alpha, r, norm
        )

    prune_factory = None
    if norm.is_euclidean and alpha < TWO_PI:
        xmin, xmax, ymin, ymax = sector_bounding_box(x, y, incl, alpha, r)

        def prune_factory(index: GridIndex) -> CellFilter:
            slack = _EDGE_SLACK * index.cell_size

            def prune(sources: NDArray[np.int64], offset: NDArray[np.int64]) -> NDArray[np.int64]:
                lower = index.cell_lower(index.cells[sources] + offset)
                upper = lower + index.cell_size
                keep = (
                    (xmax[sources] >= lower[:, 0] - slack)
                    & (xmin[sources] <= upper[:, 0] + slack)
                    & (ymax[sources] >= lower[:, 1] - slack)
                    & (ymin[sources] <= upper[:, 1] + slack)
                )
                return sources[keep]

            return prune

    started = time.perf_counter()
    chunks = _build(cloud.positions, r, pair_test, row_test, method, threads, prune_factory)
    g = _assemble(chunks, cloud.n, alpha, r, norm, keep_arcs, 2)
    logger.debug(
        f"Built {method} digraph n={g.n} arcs={g.arc_count} in {time.perf_counter() - started:.3f}s"
    )
    return g


def build_digraph_3d(
    cloud: MarkedPointCloud,
    alpha: float,
    r: float,
    method: BuildMethod = "grid",
    *,
    keep_arcs: bool = True,
    threads: int = 1,
) -> GeometricDigraph:
    """Build the spherical sector digraph on a 3-D cloud (Euclidean norm)."""
    _check_params(alpha, r)
    if cloud.dimension != 3 or cloud.elevations is None:
        raise ValueError("build_digraph_3d needs a 3-D cloud with elevations")
    pts = cloud.positions
    axes = spherical_axis(cloud.inclinations, cloud.elevations, alpha).reshape(-1, 3)

    def pair_test(src: NDArray[np.int64], tgt: NDArray[np.int64]) -> NDArray[np.bool_]:
        return in_spherical_sector(pts[tgt] - pts[src], axes[src], alpha, r)

    def row_test(rows: NDArray[np.int64]) -> NDArray[np.bool_]:
        return in_spherical_sector(pts[None, :, :] - pts[rows, None, :], axes[rows, None, :], alpha, r)

    started = time.perf_counter()
    chunks = _build(pts, r, pair_test, row_test, method, threads)
    g = _assemble(chunks, cloud.n, alpha, r, L2, keep_arcs, 3)
    logger.debug(
        f"Built 3-D {method} digraph n={g.n} arcs={g.arc_count} in {time.perf_counter() - started:.3f}s"
    )
    return g


# ---------------------------------------------------------------------------
# Degree statistics
# ---------------------------------------------------------------------------


def region_mask(cloud: MarkedPointCloud, region: Region) -> NDArray[np.bool_]:
    if isinstance(region, Plane):
        return np.ones(cloud.n, dtype=bool)
    if cloud.dimension != 2:
        raise TypeError("region filters other than the whole space need a planar cloud")
    return region.contains(cloud.positions)


def count_deg_at_least(
    g: GeometricDigraph,
    cloud: MarkedPointCloud,
    k: int,
    region: Region | None = None,
    kind: DegreeKind = "out",
) -> int:
    """``xi``: vertices in ``region`` whose ``kind``-degree is at least ``k``.

    The apex counts itself in its own sector, so a sector holding at least
    ``k + 1`` points is exactly an out-degree of at least ``k``.
    """
    if k < 0:
        raise ValueError(f"threshold must be non-negative, got {k}")
    mask = region_mask(cloud, region if region is not None else Plane())
    return int(np.count_nonzero((g.degrees(kind) >= k) & mask))


def count_deg_exact(
    g: GeometricDigraph,
    cloud: MarkedPointCloud,
    k: int,
    region: Region | None = None,
    kind: DegreeKind = "out",
) -> int:
    """``eta``: vertices in ``region`` whose ``kind``-degree equals ``k``."""
    if k < 0:
        raise ValueError(f"degree must be non-negative, got {k}")
    region = region if region is not None else Plane()
    mask = region_mask(cloud, region)
    exact = int(np.count_nonzero((g.degrees(kind) == k) & mask))
    difference = count_deg_at_least(g, cloud, k, region, kind) - count_deg_at_least(
        g, cloud, k + 1, region, kind
    )
    if exact != difference:
        raise RuntimeError(f"degree count mismatch at k={k}: {exact} != {difference}")
    return exact


def degree_statistic(
    g: GeometricDigraph,
    cloud: MarkedPointCloud,
    k: int,
    region: Region | None = None,
    kind: DegreeKind = "out",
    *,
    exact: bool = False,
) -> DegreeStatistic:
    region = region if region is not None else Plane()
    count = count_deg_exact if exact else count_deg_at_least
    return DegreeStatistic(kind, k, region, count(g, cloud, k, region, kind), exact)


def degree_histogram(g: GeometricDigraph, kind: DegreeKind = "out") -> dict[int, int]:
    """Map each occurring degree to the number of vertices having it."""
    counts = np.bincount(g.degrees(kind)) if g.n else np.zeros(0, dtype=np.int64)
    return {d: int(c) for d, c in enumerate(counts) if c}


# ---------------------------------------------------------------------------
# Nearest neighbors
# ---------------------------------------------------------------------------


def _as_points(cloud: MarkedPointCloud | NDArray[np.float64]) -> NDArray[np.float64]:
    if isinstance(cloud, MarkedPointCloud):
        return cloud.positions
    return np.atleast_2d(np.asarray(cloud, dtype=np.float64))


def _lengths(delta: NDArray[np.float64], norm: NormKind) -> NDArray[np.float64]:
    if delta.shape[-1] == 2:
        return norm.length(delta[..., 0], delta[..., 1])
    if not norm.is_euclidean:
        raise ValueError("3-D nearest neighbors support the Euclidean norm only")
    dx, dy, dz = delta[..., 0], delta[..., 1], delta[..., 2]
    return np.sqrt(dx * dx + dy * dy + dz * dz)


def _knn_brute(
    points: NDArray[np.float64], k: int, norm: NormKind
) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    n = len(points)
    dist = np.empty((n, k))
    nbr = np.empty((n, k), dtype=np.int64)
    for rows in _ranges(n, max(1, _BRUTE_CELLS // n)):
        d = _lengths(points[None, :, :] - points[rows, None, :], norm)
        d[np.arange(len(rows)), rows] = np.inf
        # A stable sort keeps equal distances in index order.
        order = np.argsort(d, axis=1, kind="stable")[:, :k]
        dist[rows] = np.take_along_axis(d, order, axis=1)
        nbr[rows] = order
    return dist, nbr


def _knn_grid(
    points: NDArray[np.float64], k: int, norm: NormKind
) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    n, dim = points.shape
    span = float(np.ptp(points, axis=0).max())
    cell = span * ((k + 1) / n) ** (1.0 / dim) if span > 0.0 else 1.0
    index = GridIndex.build(points, cell)
    full_reach = max(index.extent) - 1

    dist = np.empty((n, k))
    nbr = np.empty((n, k), dtype=np.int64)
    pending = np.arange(n, dtype=np.int64)
    reach = 1
    while pending.size:
        src_parts, tgt_parts = [], []
        for offset in index.offsets(reach):
            s, t = index.pairs(pending, offset)
            src_parts.append(s)
            tgt_parts.append(t)
        src = np.concatenate(src_parts)
        tgt = np.concatenate(tgt_parts)
        distinct = src != tgt
        src, tgt = src[distinct], tgt[distinct]
        d = _lengths(points[tgt] - points[src], norm)
        order = np.lexsort((tgt, d, src))
        src, tgt, d = src[order], tgt[order], d[order]

        starts = np.searchsorted(src, pending, "left")
        counts = np.searchsorted(src, pending, "right") - starts
        enough = counts >= k
        kth = np.full(len(pending), np.inf)
        kth[enough] = d[starts[enough] + k - 1]
        # Anything outside the scanned block is farther than reach * cell.
        if reach >= full_reach:
            done = enough
        else:
            done = enough & (kth < reach * cell * (1.0 - _RING_SLACK))
        sel = starts[done][:, None] + np.arange(k)
        dist[pending[done]] = d[sel]
        nbr[pending[done]] = tgt[sel]
        pending = pending[~done]
        reach += 1
    return dist, nbr


def knn_indices(
    cloud: MarkedPointCloud | NDArray[np.float64],
    k: int,
    norm: NormKind = L2,
    method: BuildMethod = "grid",
) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    """The ``k`` nearest other points of every point, ordered by ``(distance, index)``.

    Returns ``(distances, indices)``, both of shape ``(n, k)``.
    """
    points = _as_points(cloud)
    n = len(points)
    if k < 1 or k >= n:
        raise ValueError(f"k must satisfy 1 <= k <= n - 1 (n={n}), got {k}")
    if method == "grid":
        return _knn_grid(points, k, norm)
    if method == "brute":
        return _knn_brute(points, k, norm)
    raise ValueError(f"unknown kNN method {method!r}; expected 'grid' or 'brute'")


def knn_distances(
    cloud: MarkedPointCloud | NDArray[np.float64],
    k: int,
    norm: NormKind = L2,
    method: BuildMethod = "grid",
) -> NDArray[np.float64]:
    """Distance from each point to its ``k``-th nearest other point."""
    dist, _ = knn_indices(cloud, k, norm, method)
    return dist[:, k - 1].copy()


def reverse_knn_counts(
    cloud: MarkedPointCloud | NDArray[np.float64],
    k: int,
    norm: NormKind = L2,
    method: BuildMethod = "grid",
) -> NDArray[np.int64]:
    """For each ``x``, the number of points listing ``x`` among their ``k`` nearest."""
    _, nbr = knn_indices(cloud, k, norm, method)
    return np.bincount(nbr.ravel(), minlength=len(nbr)).astype(np.int64)


def max_reverse_knn_count(
    cloud: MarkedPointCloud | NDArray[np.float64],
    k: int,
    norm: NormKind = L2,
    method: BuildMethod = "grid",
) -> int:
    return int(reverse_knn_counts(cloud, k, norm, method).max())
