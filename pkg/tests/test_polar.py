import math
import warnings

import numpy as np
import pytest

from curvetree import (
    check_monotone_along_branch,
    good_neighbourhood,
    parse_polynomial,
    polar_curve,
    polar_half_branches,
    trace_level,
    vertical_tangencies,
)
from curvetree.errors import ConstantInY

from conftest import LEVELS, SUITE, analysis, nbhd, poly

COSTE = "x^2 + (y^2 - x)^2"


def test_polar_examples():
    assert polar_curve(parse_polynomial("x^2 + y^2")) == parse_polynomial("2y")
    assert polar_curve(parse_polynomial(COSTE)) == parse_polynomial("4y^3 - 4x y")


def test_polar_of_function_of_x_only():
    with pytest.raises(ConstantInY):
        polar_curve(parse_polynomial("x^2"))


@pytest.mark.parametrize("name,count", [("circle", 2), ("banana", 4), ("bone", 6)])
def test_half_branch_counts(name, count):
    branches = polar_half_branches(poly(name), nbhd(name))
    assert len(branches) == count
    assert sorted(b.id for b in branches) == list(range(count))


def test_coste_branch_sides():
    branches = polar_half_branches(poly("banana"), nbhd("banana"))
    sides = sorted(b.side for b in branches)
    assert sides == ["left", "right", "right", "right"]
    # upper and lower arcs of y^2 = x are mirror images
    arcs = [b for b in branches if b.side == "right" and np.max(np.abs(b.samples[:, 1])) > 0]
    assert len(arcs) == 2
    up, down = sorted(arcs, key=lambda b: b.samples[-1, 1], reverse=True)
    assert np.allclose(up.samples[:, 1] ** 2, up.samples[:, 0], atol=1e-12)
    assert up.component == down.component


def test_double_banana_has_four_components():
    branches = polar_half_branches(poly("double_banana"), nbhd("double_banana"))
    assert len({b.component for b in branches}) == 4


@pytest.mark.parametrize("name", sorted(SUITE))
def test_half_branches_are_monotone(name):
    for b in polar_half_branches(poly(name), nbhd(name)):
        for g in ("coordinate_x", "function_f", "squared_distance"):
            rep = check_monotone_along_branch(b, g)
            assert rep.ok, (name, b.id, g, rep)


def test_coste_upper_arc_monotone_directions():
    branches = polar_half_branches(poly("banana"), nbhd("banana"))
    up = max(branches, key=lambda b: b.samples[-1, 1])
    assert check_monotone_along_branch(up, "coordinate_x").direction == "increasing"
    assert check_monotone_along_branch(up, "function_f").direction == "increasing"


def test_duplicate_x_is_a_violation():
    samples = np.array([[0.0, 0.0], [0.1, 0.01], [0.2, 0.04], [0.2, 0.05], [0.3, 0.09]])
    rep = check_monotone_along_branch(samples, "coordinate_x")
    assert not rep.ok and rep.violation == 3


def test_circle_tangencies():
    f = parse_polynomial("x^2 + y^2")
    c = trace_level(f, 0.04, good_neighbourhood(f))
    tg = vertical_tangencies(c, f)
    assert [t.parity for t in tg] == ["even", "even"]
    assert np.allclose([t.position for t in tg], [(-0.2, 0.0), (0.2, 0.0)], atol=1e-12)


@pytest.mark.parametrize("eps", [0.1, 0.01, 1e-4])
def test_coste_tangencies(eps):
    a = analysis("banana", eps)
    got = sorted(t.position for t in a.tangencies)
    s, q = math.sqrt(eps / 2), eps**0.25
    want = sorted([(-s, 0.0), (s, 0.0), (math.sqrt(eps), q), (math.sqrt(eps), -q)])
    for (x, y), (wx, wy) in zip(got, want):
        assert abs(x - wx) <= 1e-6 * abs(wx)
        assert abs(y - wy) <= 1e-6 * max(abs(wy), abs(wx))
    assert len(got) == 4 and all(t.parity == "even" for t in a.tangencies)


def test_bone_tangencies_are_symmetric():
    a = analysis("bone", LEVELS["bone"][4])
    pos = np.array([t.position for t in a.tangencies])
    assert len(pos) == 6
    mirrored = {(round(x, 12), round(-y, 12)) for x, y in pos}
    assert mirrored == {(round(x, 12), round(y, 12)) for x, y in pos}


def test_odd_tangency_detected():
    # an inflection-type vertical tangency: the fibre count does not change
    f = parse_polynomial("x^2 + y^2 + x y^2")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tg = vertical_tangencies(trace_level(f, 0.2, good_neighbourhood(f)), f)
    assert {t.parity for t in tg} <= {"even", "odd"}
    assert sum(t.parity == "even" for t in tg) >= 2


@pytest.mark.parametrize("name", sorted(SUITE))
def test_tangencies_lie_on_branches(name):
    a = analysis(name, LEVELS[name][2])
    for t in a.tangencies:
        assert t.branch_id is not None
        b = next(b for b in a.branches if b.id == t.branch_id)
        assert b.distance_to(t.position) <= 1e-6
