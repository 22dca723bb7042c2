import math

import numpy as np
import pytest

from curvetree import Neighbourhood, TraceConfig, good_neighbourhood, parse_polynomial, trace_level, verify_jordan
from curvetree.errors import LevelEscapesNeighbourhood, NotAStrictMinimum
from curvetree.geometry import polyline_distance, signed_area
from curvetree.trace import LevelCurve

from conftest import LEVELS, SUITE, nbhd, poly

COSTE = "x^2 + (y^2 - x)^2"


def test_circle_neighbourhood_is_default_cap():
    nb = good_neighbourhood(parse_polynomial("x^2 + y^2"))
    assert nb.radius == 1.0 and nb.accepted
    assert all(v is True or v == "pass" or v for v in nb.checks.values())


def test_coste_neighbourhood():
    assert good_neighbourhood(parse_polynomial(COSTE)).radius == 1.0


def test_acnode_needs_small_radius():
    f = parse_polynomial("y^2 - x^3 + x^2")
    assert good_neighbourhood(f).radius == 0.5
    # a disk of radius 1.5 reaches the other zero at (1, 0)
    with pytest.raises(NotAStrictMinimum):
        good_neighbourhood(f, TraceConfig(nbhd_candidates=(1.5,)))


def test_neighbourhood_rejects_non_minimum():
    with pytest.raises(NotAStrictMinimum):
        good_neighbourhood(parse_polynomial("x + y^2"))
    with pytest.raises(NotAStrictMinimum):
        good_neighbourhood(parse_polynomial("x^2 - y^2"))


def test_circle_points_on_radius():
    f = parse_polynomial("x^2 + y^2")
    c = trace_level(f, 0.04, good_neighbourhood(f))
    norms = np.hypot(c.points[:, 0], c.points[:, 1])
    assert np.all(np.abs(norms - 0.2) < 1e-9)
    rep = verify_jordan(c)
    assert rep.passed and rep.winding == 1 and rep.orientation == "ccw"


def test_coste_passes_through_special_points():
    f = parse_polynomial(COSTE)
    eps = 0.1
    c = trace_level(f, eps, good_neighbourhood(f))
    tol = 2 * c.cell
    for p in [(math.sqrt(eps / 2), 0.0), (math.sqrt(eps), eps**0.25), (math.sqrt(eps), -(eps**0.25))]:
        assert polyline_distance(p, c.points) < tol
    assert verify_jordan(c).passed
    # the simplicity scan still passes at doubled resolution
    assert verify_jordan(trace_level(f, eps, good_neighbourhood(f), TraceConfig(grid_n=1024))).passed


def test_coste_large_level_escapes():
    f = parse_polynomial(COSTE)
    with pytest.raises(LevelEscapesNeighbourhood):
        trace_level(f, 10.0, Neighbourhood(1.0))


def test_figure_eight_fails_jordan():
    t = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    pts = np.column_stack([np.sin(2 * t), np.sin(t)])
    c = LevelCurve(0.1, pts, np.zeros(len(pts)), Neighbourhood(1.0), parse_polynomial("x^2 + y^2"))
    rep = verify_jordan(c)
    assert not rep.passed and not rep.simple
    i, j = rep.crossing
    assert 0 <= i < len(pts) and 0 <= j < len(pts) and i != j


@pytest.mark.parametrize("name", sorted(SUITE))
def test_residuals_and_symmetry(name):
    f = poly(name)
    eps = LEVELS[name][3]
    c = trace_level(f, eps, nbhd(name))
    assert verify_jordan(c).passed
    assert np.all(c.residuals <= 1e-10 * eps)
    if f.is_y_symmetric():
        mirrored = c.points * np.array([1.0, -1.0])
        # every mirrored vertex is a vertex of the trace
        from scipy.spatial import cKDTree

        d, _ = cKDTree(c.points).query(mirrored)
        assert d.max() <= 1e-10 * max(1.0, c.diameter)


@pytest.mark.parametrize("name", sorted(SUITE))
def test_area_converges_under_refinement(name):
    f = poly(name)
    eps = LEVELS[name][5]
    a1 = signed_area(trace_level(f, eps, nbhd(name), TraceConfig(grid_n=512)).points)
    a2 = signed_area(trace_level(f, eps, nbhd(name), TraceConfig(grid_n=1024)).points)
    assert abs(a1 - a2) <= 0.01 * a2
