import math

import numpy as np
import pytest

from sectorlab.geometry import (
    L2,
    TWO_PI,
    Disk,
    NormKind,
    Plane,
    Rectangle,
    SectorSpec,
    SphericalSectorSpec,
    ball_contains,
    disk_intersection_area,
    in_sector,
    normalize_angle,
    sector_area,
    sector_bounding_box,
    sector_contains,
    sector_intersection_area,
    spherical_sector_contains,
    spherical_sector_solid_fraction,
)


def test_normalize_angle_folds_tiny_negative_to_zero():
    """A tiny negative angle must not round up to 2*pi."""
    assert normalize_angle(-1e-20) == 0.0
    assert normalize_angle(TWO_PI) == 0.0
    assert normalize_angle(7.0) == pytest.approx(7.0 - TWO_PI)


def test_normalize_angle_array():
    out = normalize_angle(np.array([-math.pi, 3 * math.pi]))
    assert np.allclose(out, [math.pi, math.pi])


def test_sector_start_ray_included_end_ray_excluded():
    """Sectors span the half-open arc [inclination, inclination + alpha)."""
    s = SectorSpec((0.0, 0.0), 0.0, math.pi / 2, 1.0)
    assert sector_contains(s, (0.5, 0.0))
    assert not sector_contains(s, (0.0, 0.5))
    assert sector_contains(s, (0.3, 0.3))
    assert not sector_contains(s, (-0.3, 0.3))


def test_sector_radius_is_strict():
    s = SectorSpec((0.0, 0.0), 0.0, math.pi, 1.0)
    assert not sector_contains(s, (1.0, 0.0))
    assert sector_contains(s, (0.999999, 0.0))


def test_apex_belongs_to_its_sector():
    s = SectorSpec((0.2, 0.7), 1.0, 0.1, 0.5)
    assert sector_contains(s, (0.2, 0.7))


def test_full_sector_is_a_disk():
    s = SectorSpec((0.0, 0.0), 2.0, TWO_PI, 1.0)
    for theta in np.linspace(0.0, TWO_PI, 13):
        assert sector_contains(s, (0.9 * math.cos(theta), 0.9 * math.sin(theta)))


def test_sector_membership_depends_on_norm():
    s = SectorSpec((0.0, 0.0), 0.0, math.pi / 2, 0.7)
    z = (0.4, 0.4)
    assert sector_contains(s, z, L2)
    assert not sector_contains(s, z, NormKind.lp(1.0))
    assert sector_contains(s, z, NormKind.linf())


def test_in_sector_vectorized_matches_scalar():
    rng = np.random.default_rng(0)
    dx, dy = rng.uniform(-1, 1, 200), rng.uniform(-1, 1, 200)
    incl = rng.uniform(0, TWO_PI, 200)
    hits = in_sector(dx, dy, incl, 1.3, 0.8)
    for i in range(200):
        s = SectorSpec((0.0, 0.0), incl[i], 1.3, 0.8)
        assert hits[i] == sector_contains(s, (dx[i], dy[i]))


def test_invalid_sector_parameters():
    with pytest.raises(ValueError):
        SectorSpec((0.0, 0.0), 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        SectorSpec((0.0, 0.0), 0.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        NormKind.lp(0.5)


def test_ball_contains_and_area():
    assert ball_contains((0.0, 0.0), 1.0, (0.6, 0.6))
    assert not ball_contains((0.0, 0.0), 1.0, (0.6, 0.6), NormKind.lp(1.0))
    with pytest.raises(ValueError):
        ball_contains((0.0, 0.0), 0.0, (0.0, 0.0))
    assert L2.ball_area(1.0) == pytest.approx(math.pi)
    assert NormKind.lp(1.0).ball_area(1.0) == pytest.approx(2.0)
    assert NormKind.linf().ball_area(1.0) == pytest.approx(4.0)


def test_sector_area():
    assert sector_area(math.pi, 2.0) == pytest.approx(2.0 * math.pi)


def test_disk_intersection_area(oracles):
    assert disk_intersection_area(1.0, 1.0, 1.0) == pytest.approx(oracles["disk_lens_unit_d1"])
    assert disk_intersection_area(0.0, 1.0, 2.0) == pytest.approx(math.pi)
    assert disk_intersection_area(3.0, 1.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        disk_intersection_area(-1.0, 1.0, 1.0)


def test_regions():
    pts = np.array([[0.0, 0.0], [1.0, 0.5], [0.5, 1.0], [0.5, 0.5]])
    assert Plane().contains(pts).all()
    assert Rectangle(0.0, 1.0, 0.0, 1.0).contains(pts).tolist() == [True, False, False, True]
    assert Disk(0.5, 0.5, 0.5).contains(pts).tolist() == [False, False, False, True]
    with pytest.raises(ValueError):
        Rectangle(1.0, 0.0, 0.0, 1.0)


def test_sector_bounding_box_quarter():
    xmin, xmax, ymin, ymax = sector_bounding_box(
        np.array([0.0]), np.array([0.0]), np.array([0.0]), math.pi / 2, 1.0
    )
    assert xmin[0] == pytest.approx(0.0, abs=1e-12)
    assert xmax[0] == pytest.approx(1.0)
    assert ymin[0] == pytest.approx(0.0, abs=1e-12)
    assert ymax[0] == pytest.approx(1.0)


def test_sector_bounding_box_covers_sampled_points():
    rng = np.random.default_rng(3)
    incl = rng.uniform(0, TWO_PI, 50)
    x, y = rng.random(50), rng.random(50)
    xmin, xmax, ymin, ymax = sector_bounding_box(x, y, incl, 2.0, 0.3)
    for i in range(50):
        theta = incl[i] + rng.uniform(0.0, 2.0, 100)
        rho = 0.3 * np.sqrt(rng.random(100))
        px, py = x[i] + rho * np.cos(theta), y[i] + rho * np.sin(theta)
        assert (px >= xmin[i] - 1e-12).all() and (px <= xmax[i] + 1e-12).all()
        assert (py >= ymin[i] - 1e-12).all() and (py <= ymax[i] + 1e-12).all()


def test_intersection_far_apart_is_zero():
    s1 = SectorSpec((0.0, 0.0), 0.0, math.pi, 1.0)
    s2 = SectorSpec((5.0, 0.0), 0.0, math.pi, 1.0)
    assert sector_intersection_area(s1, s2).value == 0.0


def test_intersection_nested_sector():
    big = SectorSpec((0.0, 0.0), 0.0, math.pi / 2, 1.0)
    small = SectorSpec((0.1, 0.1), 0.0, math.pi / 2, 0.2)
    assert sector_intersection_area(big, small).value == pytest.approx(small.area, rel=1e-9)


def test_intersection_of_full_sectors_is_the_lens():
    """Full sectors are disks, whatever their inclinations."""
    s1 = SectorSpec((0.0, 0.0), 0.3, TWO_PI, 1.0)
    s2 = SectorSpec((0.7, 0.0), 1.1, TWO_PI, 1.0)
    expected = disk_intersection_area(0.7, 1.0, 1.0)
    assert sector_intersection_area(s1, s2).value == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("alpha", [math.pi / 3, math.pi, 1.5 * math.pi])
def test_exact_intersection_agrees_with_monte_carlo(alpha):
    s1 = SectorSpec((0.0, 0.0), 0.4, alpha, 1.0)
    s2 = SectorSpec((0.35, -0.2), 1.9, alpha, 0.8)
    exact = sector_intersection_area(s1, s2).value
    mc = sector_intersection_area(s1, s2, "monte-carlo", 200_000, np.random.default_rng(8))
    assert mc.std_error > 0.0
    assert abs(exact - mc.value) <= 5.0 * mc.std_error + 1e-9


def test_intersection_unknown_method():
    s = SectorSpec((0.0, 0.0), 0.0, 1.0, 1.0)
    with pytest.raises(ValueError, match="Unknown intersection method"):
        sector_intersection_area(s, s, "grid")
    with pytest.raises(ValueError):
        sector_intersection_area(s, s, "monte-carlo", 0)


def test_spherical_sector_membership():
    ss = SphericalSectorSpec((0.0, 0.0, 0.0), 0.0, 0.0, math.pi, 1.0)
    assert spherical_sector_contains(ss, (0.0, 0.0, 0.5))
    assert not spherical_sector_contains(ss, (0.0, 0.0, -0.5))
    assert spherical_sector_contains(ss, (0.0, 0.0, 0.0))
    assert not spherical_sector_contains(ss, (0.0, 0.0, 1.0))


def test_spherical_solid_fraction(oracles):
    assert spherical_sector_solid_fraction(math.pi) == pytest.approx(oracles["solid_fraction_pi"])
    assert spherical_sector_solid_fraction(TWO_PI) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        spherical_sector_solid_fraction(0.0)
