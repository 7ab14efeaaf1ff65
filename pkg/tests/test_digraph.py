import math

import numpy as np
import pytest

from sectorlab.densities import StdGaussian2, UniformUnitCube
from sectorlab.digraph import (
    GridIndex,
    build_digraph,
    build_digraph_3d,
    count_deg_at_least,
    count_deg_exact,
    degree_histogram,
    degree_statistic,
    knn_distances,
    knn_indices,
    max_reverse_knn_count,
    reverse_knn_counts,
)
from sectorlab.geometry import TWO_PI, NormKind, Rectangle, SectorSpec, sector_contains
from sectorlab.pointprocess import MarkedPointCloud, SeededRng, sample_marked


def _assert_same(a, b):
    assert np.array_equal(a.out_deg, b.out_deg)
    assert np.array_equal(a.in_deg, b.in_deg)
    assert np.array_equal(a.arcs, b.arcs)


def test_line_cloud_arcs(line_cloud):
    """Quarter sectors opened at -pi/4 see the points to their right."""
    g = build_digraph(line_cloud, math.pi / 2, 0.25)
    assert g.arc_set() == {(0, 1), (1, 2)}
    assert g.out_deg.tolist() == [1, 1, 0]
    assert g.in_deg.tolist() == [0, 1, 1]
    assert g.has_arc(0, 1) and not g.has_arc(1, 0)


def test_no_self_loops(small_cloud):
    g = build_digraph(small_cloud, TWO_PI, 0.1)
    assert not np.any(g.arcs[:, 0] == g.arcs[:, 1])


def test_degrees_sum_to_arc_count(small_cloud):
    g = build_digraph(small_cloud, math.pi, 0.08)
    assert g.out_deg.sum() == g.in_deg.sum() == g.arc_count == len(g.arcs)


def test_arcs_match_the_predicate(small_cloud):
    g = build_digraph(small_cloud, 1.2, 0.1)
    arcs = g.arc_set()
    pos, incl = small_cloud.positions, small_cloud.inclinations
    for i in range(0, small_cloud.n, 17):
        s = SectorSpec(tuple(pos[i]), incl[i], 1.2, 0.1)
        for j in range(small_cloud.n):
            if i != j:
                assert ((i, j) in arcs) == sector_contains(s, tuple(pos[j]))


@pytest.mark.parametrize("alpha", [math.pi / 2, math.pi, TWO_PI])
@pytest.mark.parametrize("seed", range(100))
def test_grid_equals_brute_planar(alpha, seed, uniform):
    """The grid builder reproduces the brute-force oracle exactly."""
    n = 40 + (37 * seed) % 460
    cloud = sample_marked(uniform, n, SeededRng(seed))
    r = math.sqrt(2.0 / n) * (1.0 + 0.3 * (seed % 3))
    _assert_same(build_digraph(cloud, alpha, r, method="grid"), build_digraph(cloud, alpha, r, method="brute"))


@pytest.mark.parametrize("alpha", [math.pi / 2, math.pi, TWO_PI])
@pytest.mark.parametrize("seed", range(100))
def test_grid_equals_brute_spatial(alpha, seed):
    n = 60 + (29 * seed) % 340
    cloud = sample_marked(UniformUnitCube(), n, SeededRng(seed, 1))
    r = (3.0 / n) ** (1.0 / 3.0)
    _assert_same(
        build_digraph_3d(cloud, alpha, r, method="grid"), build_digraph_3d(cloud, alpha, r, method="brute")
    )


@pytest.mark.parametrize("norm", [NormKind.lp(1.0), NormKind.lp(3.0), NormKind.linf()])
def test_grid_equals_brute_other_norms(norm, small_cloud):
    _assert_same(
        build_digraph(small_cloud, 2.0, 0.07, norm, "grid"),
        build_digraph(small_cloud, 2.0, 0.07, norm, "brute"),
    )


def test_gaussian_cloud_grid_equals_brute():
    cloud = sample_marked(StdGaussian2(), 300, SeededRng(21))
    _assert_same(build_digraph(cloud, math.pi, 0.2), build_digraph(cloud, math.pi, 0.2, method="brute"))


def test_threads_do_not_change_output(small_cloud):
    one = build_digraph(small_cloud, math.pi, 0.1, threads=1)
    many = build_digraph(small_cloud, math.pi, 0.1, threads=4)
    _assert_same(one, many)


def test_degree_only_mode(small_cloud):
    full = build_digraph(small_cloud, math.pi, 0.1)
    lean = build_digraph(small_cloud, math.pi, 0.1, keep_arcs=False)
    assert lean.arcs is None
    assert np.array_equal(full.out_deg, lean.out_deg)
    with pytest.raises(ValueError):
        lean.arc_set()


def test_empty_and_single_point(uniform):
    empty = build_digraph(sample_marked(uniform, 0, SeededRng(0)), math.pi, 0.1)
    assert empty.n == 0 and empty.arc_count == 0
    single = build_digraph(MarkedPointCloud.from_arrays([[0.5, 0.5]], [0.0]), math.pi, 0.1)
    assert single.out_deg.tolist() == [0] and single.in_deg.tolist() == [0]


def test_invalid_parameters(small_cloud):
    with pytest.raises(ValueError):
        build_digraph(small_cloud, 0.0, 0.1)
    with pytest.raises(ValueError):
        build_digraph(small_cloud, math.pi, 0.0)
    with pytest.raises(ValueError):
        build_digraph(small_cloud, math.pi, 0.1, method="kd")
    with pytest.raises(ValueError):
        build_digraph_3d(small_cloud, math.pi, 0.1)


def test_grid_index_buckets_every_point(small_cloud):
    index = GridIndex.build(small_cloud.positions, 0.1)
    seen = np.concatenate([index.bucket(tuple(c)) for c in index.occupied_cells()])
    assert sorted(seen.tolist()) == list(range(small_cloud.n))


def test_degree_counts(small_cloud):
    g = build_digraph(small_cloud, math.pi, 0.1)
    for kind in ("out", "in"):
        assert count_deg_at_least(g, small_cloud, 0, kind=kind) == small_cloud.n
        total = sum(count_deg_exact(g, small_cloud, k, kind=kind) for k in range(int(g.degrees(kind).max()) + 1))
        assert total == small_cloud.n
    hist = degree_histogram(g, "out")
    assert sum(hist.values()) == small_cloud.n
    assert count_deg_exact(g, small_cloud, 2) == hist.get(2, 0)


def test_degree_counts_in_region(small_cloud):
    g = build_digraph(small_cloud, math.pi, 0.1)
    region = Rectangle(0.0, 0.5, 0.0, 1.0)
    inside = int(region.contains(small_cloud.positions).sum())
    assert count_deg_at_least(g, small_cloud, 0, region) == inside
    stat = degree_statistic(g, small_cloud, 1, region, "in", exact=True)
    assert stat.exact and stat.value == count_deg_exact(g, small_cloud, 1, region, "in")
    with pytest.raises(ValueError):
        count_deg_at_least(g, small_cloud, -1)


def test_knn_grid_equals_brute(small_cloud):
    for k in (1, 3, 8):
        d_grid, i_grid = knn_indices(small_cloud, k)
        d_brute, i_brute = knn_indices(small_cloud, k, method="brute")
        assert np.array_equal(i_grid, i_brute)
        assert np.array_equal(d_grid, d_brute)


def test_knn_linf_and_3d():
    cloud = sample_marked(UniformUnitCube(), 250, SeededRng(5))
    d_grid, i_grid = knn_indices(cloud, 4)
    d_brute, i_brute = knn_indices(cloud, 4, method="brute")
    assert np.array_equal(i_grid, i_brute)
    pts = np.random.default_rng(2).random((200, 2))
    assert np.array_equal(
        knn_indices(pts, 2, NormKind.linf())[1], knn_indices(pts, 2, NormKind.linf(), "brute")[1]
    )


def test_knn_ties_break_by_index():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 5.0]])
    _, idx = knn_indices(pts, 2)
    assert idx[0].tolist() == [1, 2]


def test_reverse_knn(small_cloud):
    counts = reverse_knn_counts(small_cloud, 3)
    assert counts.sum() == 3 * small_cloud.n
    assert max_reverse_knn_count(small_cloud, 3) == counts.max()
    for k in (1, 3, 5):
        assert max_reverse_knn_count(small_cloud, k) <= 8 * k
    dist = knn_distances(small_cloud, 3)
    assert dist.shape == (small_cloud.n,)
    assert (dist > 0.0).all()


def test_knn_invalid_k(small_cloud):
    with pytest.raises(ValueError):
        knn_indices(small_cloud, 0)
    with pytest.raises(ValueError):
        knn_indices(small_cloud, small_cloud.n)


def test_reverse_knn_bound_over_many_clouds(uniform):
    """No point is among the k nearest neighbours of more than 8k others."""
    for seed in range(200):
        n = 30 + (53 * seed) % 270
        cloud = sample_marked(uniform, n, SeededRng(seed, 2))
        for k in (1, 2, 4, 7):
            counts = reverse_knn_counts(cloud, k)
            assert counts.sum() == k * n
            assert counts.max() <= 8 * k, (seed, k)
