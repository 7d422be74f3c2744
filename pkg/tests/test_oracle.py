import math

import numpy as np
import pytest

from strobust.envelope import PerturbationLevel
from strobust.errors import BudgetExceeded, Unsupported
from strobust.formula import (
    Always, And, Atom, Eventually, Interval, Linear, Lipschitz, SignedDistance, Until,
)
from strobust.oracle import (
    brute_force_str, certified_margin, classical_spatial, dominance_failures,
    qualitative, snap,
)
from strobust.parser import parse_spec
from strobust.regions import Ball, Box, Union
from strobust.signal import Padding, Signal

POS = Atom(Linear((1.0,), 0.0))


def col(vals, t_lo=0, padding=Padding.STRICT):
    return Signal(np.asarray(vals, dtype=float)[:, None], t_lo=t_lo, padding=padding)


def pts(*pairs):
    return {PerturbationLevel(a, b) for a, b in pairs}


def test_qualitative_examples():
    ramp = col(range(6))
    assert qualitative(Always(Interval(0, 5), POS), ramp, 0)
    assert not qualitative(Eventually(Interval(0, 5), Atom(Linear((1.0,), -10.0))), ramp, 0)
    root = Until(Interval(0, 3), Atom(Linear((-1.0,), 1.0)), Atom(Linear((1.0,), -2.0)))
    # the left operand must also hold at the instant the right one is met
    assert not qualitative(root, col([0, 1, 0, 2]), 0)
    relaxed = Until(Interval(0, 3), Atom(Linear((-1.0,), 2.0)), Atom(Linear((1.0,), -2.0)))
    assert qualitative(relaxed, col([0, 1, 0, 2]), 0)
    assert not qualitative(relaxed, col([0, 3, 0, 2]), 0)


def test_brute_force_ramp():
    ramp = col(range(-3, 4), t_lo=-3, padding=Padding.CLAMP)
    got = brute_force_str(POS, ramp, 2, 2, dx_step=0.5)
    assert set(got) == pts((2, 0), (1, 1), (0, 2))
    assert not dominance_failures([2.0, 1.0, 0.0], got, 0.5, 4.0)


def test_brute_force_violated_and_constant():
    ramp = col(range(-3, 4), t_lo=-3)
    assert brute_force_str(POS, ramp, -1, 2) == []
    const = col([9.0] * 7, t_lo=-3)
    assert set(brute_force_str(POS, const, 0, 2, dx_step=0.5, dx_cap=4.0)) == pts((4.0, 2))


def test_box_avoid_uses_nearest_point():
    # the point (3, 0.5) is 2 away from the unit box; corner perturbations
    # alone would miss the face and admit 2.25
    sig = Signal(np.array([[3.0, 0.5]] * 3), t_lo=0, padding=Padding.CLAMP)
    p = Atom(SignedDistance(Box([0, 0], [1, 1])))
    got = brute_force_str(p, sig, 0, 0, dx_step=0.25)
    assert set(got) == pts((2.0, 0))


def test_budget_and_support():
    big = Signal(np.zeros((4, 3)), t_lo=0)
    with pytest.raises(BudgetExceeded):
        brute_force_str(Atom(Linear((1.0, 0, 0), 1.0)), big, 0, 1)
    with pytest.raises(BudgetExceeded):
        brute_force_str(POS, col(range(11)), 0, 1)
    with pytest.raises(BudgetExceeded):
        brute_force_str(POS, col(range(5)), 0, 3)
    with pytest.raises(BudgetExceeded):
        brute_force_str(POS, col(range(5)), 0, 1, dx_step=0.1)
    with pytest.raises(Unsupported):
        brute_force_str(Atom(SignedDistance(Ball([0.0], 1.0))), col(range(5)), 0, 1)
    with pytest.raises(Unsupported):
        brute_force_str(POS, col(range(5)), 0, 1, norm="l2")


def test_classical_examples():
    ramp = col(range(-3, 4), t_lo=-3)
    assert classical_spatial(POS, ramp, 2) == 2.0
    assert classical_spatial(Always(Interval(0, 2), POS), col([3, 1, 2]), 0) == 1.0
    both = And((POS, Atom(Linear((2.0,), -2.0))))
    assert classical_spatial(both, ramp, 3) == min(3.0, 2.0)
    with pytest.raises(Unsupported):
        classical_spatial(Atom(Lipschitz(lambda Z: Z[:, 0], 1.0, (0,))), ramp, 0)


def test_classical_uses_euclidean_linear_depth():
    sig = Signal(np.array([[3.0, 4.0]]), t_lo=0)
    assert classical_spatial(parse_spec("3*x1 + 4*x2 >= 0", 2), sig, 0) == 5.0


def test_snap_and_corrupted_envelope():
    assert snap(math.inf, 0.25, 4.0) == 4.0
    assert snap(1.3, 0.25, 4.0) == 1.25
    points = list(pts((2, 0), (1, 1), (0, 2)))
    bad = dominance_failures([2.0, 1.5, 0.0], points, 0.5, 4.0)
    assert bad[0][0] == PerturbationLevel(1.5, 1)
    bad = dominance_failures([1.0, 3.0], points, 0.5, 4.0)
    assert bad and bad[0][0] == PerturbationLevel(3.0, 1)


def test_certified_margin():
    unit = SignedDistance(Box([0, 0], [1, 1]))
    assert certified_margin(unit, [3.0, 1.0]) == pytest.approx(2.0, abs=1e-9)
    assert certified_margin(unit, [2.0, 2.0]) == pytest.approx(math.sqrt(2), abs=1e-9)
    assert certified_margin(unit, [0.5, 0.5]) == -0.5
    u = SignedDistance(Union((Box([0, 0], [1, 1]), Box([1, 0], [2, 1]))), dims=(0, 1))
    assert certified_margin(u, [0.9, 0.5]) < 0
    with pytest.raises(Unsupported):
        certified_margin(SignedDistance(Ball([0.0], 1.0)), [3.0])
