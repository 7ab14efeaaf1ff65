import math

import numpy as np
import pytest
from scipy.stats import binom

from sectorlab.densities import UniformUnitCube
from sectorlab.geometry import TWO_PI, Rectangle
from sectorlab.pointprocess import (
    MarkedPointCloud,
    SeededRng,
    binomial_pmf,
    binomial_tail,
    density_eval,
    level_set_mass,
    normal_cdf,
    normal_pdf,
    poisson_pmf,
    poisson_quantile,
    poisson_tail,
    region_mass,
    sample_coupled,
    sample_marked,
)


def test_same_seed_same_sample(uniform):
    """Identical (seed, stream) pairs reproduce identical clouds."""
    a = sample_marked(uniform, 50, SeededRng(9, 3))
    b = sample_marked(uniform, 50, SeededRng(9, 3))
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.inclinations, b.inclinations)


def test_streams_are_independent(uniform):
    a = sample_marked(uniform, 50, SeededRng(9, 0))
    b = sample_marked(uniform, 50, SeededRng(9, 1))
    c = sample_marked(uniform, 50, SeededRng(9, 0).child(1))
    assert not np.array_equal(a.positions, b.positions)
    assert not np.array_equal(a.positions, c.positions)


def test_seed_must_be_u64():
    with pytest.raises(ValueError):
        SeededRng(-1)
    with pytest.raises(ValueError):
        SeededRng(2**64)
    SeededRng(2**64 - 1).generator()


def test_marks_are_uniform_angles(uniform):
    cloud = sample_marked(uniform, 5000, SeededRng(1))
    assert cloud.n == 5000 and cloud.dimension == 2
    assert ((cloud.inclinations >= 0.0) & (cloud.inclinations < TWO_PI)).all()
    assert cloud.inclinations.mean() == pytest.approx(math.pi, abs=0.1)
    assert cloud.elevations is None


def test_empty_sample(uniform):
    cloud = sample_marked(uniform, 0, SeededRng(0))
    assert len(cloud) == 0
    with pytest.raises(ValueError):
        sample_marked(uniform, -1, SeededRng(0))


def test_three_dimensional_sample_has_elevations():
    cloud = sample_marked(UniformUnitCube(), 20, SeededRng(2))
    assert cloud.dimension == 3
    assert cloud.elevations is not None and len(cloud.elevations) == 20


def test_cloud_validation():
    with pytest.raises(ValueError):
        MarkedPointCloud(np.zeros((3, 2)), np.zeros(2))
    with pytest.raises(ValueError):
        MarkedPointCloud(np.zeros((3, 3)), np.zeros(3))
    cloud = MarkedPointCloud.from_arrays([[0.0, 0.0], [1.0, 1.0]], [0.0, 1.0])
    assert cloud.head(1).n == 1


def test_coupled_sample_shares_prefix(uniform):
    """The binomial process is the first n points of the Poissonized one (or vice versa)."""
    sample = sample_coupled(uniform, 200, SeededRng(4, 2))
    m = min(sample.n, sample.N)
    assert sample.binomial.n == 200
    assert sample.poisson.n == sample.N
    assert np.array_equal(sample.binomial.positions[:m], sample.poisson.positions[:m])
    assert np.array_equal(sample.binomial.inclinations[:m], sample.poisson.inclinations[:m])
    with pytest.raises(ValueError):
        sample_coupled(uniform, 0, SeededRng(0))


def test_coupled_counts_are_poisson(uniform):
    counts = [sample_coupled(uniform, 100, SeededRng(8, i)).N for i in range(400)]
    assert np.mean(counts) == pytest.approx(100, abs=2.0)


def test_density_queries(uniform):
    assert density_eval(uniform, (0.5, 0.5)) == 1.0
    assert region_mass(uniform, Rectangle(0.0, 0.5, 0.0, 0.5)) == pytest.approx(0.25)
    assert level_set_mass(uniform, 2.0 / math.pi, math.pi).mass_on_L == 1.0
    with pytest.raises(ValueError):
        level_set_mass(uniform, 0.0, math.pi)
    with pytest.raises(ValueError):
        level_set_mass(uniform, 1.0, 7.0)


def test_poisson_kernels(oracles):
    assert poisson_pmf(math.pi, 0) == pytest.approx(oracles["poisson_pmf_pi_0"])
    assert poisson_pmf(0.0, 0) == 1.0
    assert poisson_pmf(0.0, 3) == 0.0
    assert poisson_pmf(2.0, -1) == 0.0
    assert poisson_tail(2.0, 0) == 1.0
    assert poisson_tail(0.0, 1) == 0.0
    assert poisson_tail(2.0, 1) == pytest.approx(1.0 - math.exp(-2.0))
    total = sum(poisson_pmf(3.0, k) for k in range(60))
    assert total == pytest.approx(1.0)
    assert poisson_quantile(0.0) == 0
    assert poisson_tail(5.0, poisson_quantile(5.0) + 1) < 1e-11


def test_binomial_kernels():
    assert binomial_pmf(4, 0.5, 2) == pytest.approx(6 / 16)
    assert binomial_pmf(4, 0.0, 0) == 1.0
    assert binomial_pmf(4, 1.0, 4) == 1.0
    assert binomial_pmf(4, 0.5, 5) == 0.0
    assert binomial_tail(4, 0.5, 3) == pytest.approx(5 / 16)
    assert binomial_tail(4, 0.5, 0) == 1.0
    assert binomial_tail(4, 0.5, 5) == 0.0
    with pytest.raises(ValueError):
        binomial_tail(4, 1.5, 1)


P_GRID = np.linspace(0.001, 0.999, 999)
P_STEP = 1e-3


def test_binomial_pmf_peaks_at_k_over_n():
    """On a 1e-3 grid, \`\`P(Bin(n, p) = k)\`\` peaks next to \`\`k / n\`\` and \`\`p P(...)\`\` next to \`\`(k + 1) / (n + 1)\`\`."""
    assert P_GRID[np.argmax([binomial_pmf(100, p, 30) for p in P_GRID])] == pytest.approx(0.3)
    for n in range(2, 201):
        ks = np.arange(n)
        pmf = binom.pmf(ks[:, None], n, P_GRID[None, :])
        best = P_GRID[np.argmax(pmf, axis=1)]
        weighted = P_GRID[np.argmax(pmf * P_GRID[None, :], axis=1)]
        for k in ks:
            assert abs(best[k] - k / n) <= P_STEP + 1e-12, (n, k)
            assert abs(weighted[k] - (k + 1) / (n + 1)) <= P_STEP + 1e-12, (n, k)
        k = n // 3
        assert binomial_pmf(n, float(best[k]), int(k)) == pytest.approx(pmf[k].max(), rel=1e-9)


@pytest.mark.parametrize("t", [-1.0, 0.0, 1.0])
def test_scaled_binomial_pmf_tends_to_normal_density(t):
    """``sqrt(j_n) P(Bin(n, p_n) = j_n)`` is close to ``phi(t)`` when ``(j_n - n p_n) / sqrt(n p_n) = t``."""
    n = 10**6
    j = math.ceil(n**0.4)
    root = (-t + math.sqrt(t * t + 4.0 * j)) / 2.0
    p = root * root / n
    assert (j - n * p) / math.sqrt(n * p) == pytest.approx(t, abs=1e-9)
    assert math.sqrt(j) * binomial_pmf(n, p, j) == pytest.approx(normal_pdf(t), abs=0.02)


def test_normal_kernels(oracles):
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(-40.0) >= 0.0
    assert normal_cdf(1.0) + normal_cdf(-1.0) == pytest.approx(1.0)
    assert normal_pdf(0.0) == pytest.approx(oracles["normal_pdf_0"])
