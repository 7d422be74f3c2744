import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from instances import random_formula, real_predicate, dyadic_predicate
from strobust.errors import DimensionError, NegationRejected, SpecSyntaxError
from strobust.formula import (
    Always, And, Atom, Eventually, Interval, Linear, Or, Orientation, SignedDistance,
    TrueF, Until, pretty_print,
)
from strobust.parser import parse_spec
from strobust.regions import Ball, Box, Halfspace, Polytope, Union


def test_avoid_example():
    f = parse_spec("G[0,1847] (sd_out(box([0,10],[0,10],[0,5])) > 0)", 3)
    assert f == Always(Interval(0, 1847), Atom(SignedDistance(
        Box([0, 0, 0], [10, 10, 5]), Orientation.AVOID)))


def test_climb_example():
    f = parse_spec("G[1349,1349] ((1600 - x3 > 0) U[0,300] (x3 - 1800 > 0))", 3)
    assert isinstance(f, Always) and f.interval == Interval(1349, 1349)
    u = f.child
    assert isinstance(u, Until) and u.interval == Interval(0, 300)
    assert u.left == Atom(Linear((0.0, 0.0, -1.0), 1600.0))
    assert u.right == Atom(Linear((0.0, 0.0, 1.0), -1800.0))


def test_singleton_forms_agree():
    a = parse_spec("G{1349} (x1 >= 0)", 1)
    b = parse_spec("G[1349,1349] (x1 >= 0)", 1)
    c = parse_spec("G[1349;1349] x1 >= 0", 1)
    assert a == b == c


def test_unbounded_forms():
    assert parse_spec("G>=581 (x1 > 0)", 1) == parse_spec("G[581,inf] (x1 > 0)", 1)
    assert parse_spec("F[2,inf] (x1 > 0)", 1).child == Atom(Linear((1.0,), 0.0))
    with pytest.raises(SpecSyntaxError):
        parse_spec("((x1 > 0) U[0,inf] (x1 > 1))", 1)


def test_negation_rejected_with_position():
    with pytest.raises(NegationRejected) as info:
        parse_spec("!(x1 > 0)", 1)
    assert (info.value.line, info.value.col) == (1, 1)
    with pytest.raises(NegationRejected):
        parse_spec("G[0,1] (x1 != 0)", 1)


def test_dimension_error():
    with pytest.raises(DimensionError) as info:
        parse_spec("x1 + x4 > 0", 3)
    assert info.value.col == 6
    with pytest.raises(DimensionError):
        parse_spec("sd_out(ball([0,0,0]; 1)) > 0", 2)
    with pytest.raises(DimensionError):
        parse_spec("sd_out(ball([0,0]; 1) @ x1,x3) > 0", 2)


@pytest.mark.parametrize("text, line, col", [
    ("G[0,1 (x1 > 0)", 1, 7),
    ("x1 > 0 &&", 1, 10),
    ("(x1 > 0", 1, 8),
    ("x1 >> 0", 1, 5),
    ("G[3,1] (x1 > 0)", 1, 2),
    ("# comment\n\n  x1 ? 0", 3, 6),
    ("sd_out(box([0,1],[2])) > 0", 1, 8),
    ("sd_out(box([0,1])) > 1", 1, 22),
    ("2 > 1", 1, 1),
])
def test_syntax_errors_carry_positions(text, line, col):
    with pytest.raises(SpecSyntaxError) as info:
        parse_spec(text, 2, source="spec.stl")
    assert (info.value.line, info.value.col) == (line, col)
    assert str(info.value).startswith(f"spec.stl:{line}:{col}: ")


def test_comparison_normalisation():
    assert parse_spec("x1 < 3", 1) == Atom(Linear((-1.0,), 3.0))
    assert parse_spec("2*x1 >= x2 + 1", 2) == Atom(Linear((2.0, -1.0), -1.0))
    assert parse_spec("sd_out(box([0,1])) < 0", 1).pred.orientation is Orientation.REACH
    assert parse_spec("sd_in(box([0,1])) > 0", 1).pred.orientation is Orientation.REACH
    assert parse_spec("sd_in(box([0,1])) <= 0", 1).pred.orientation is Orientation.AVOID
    with pytest.raises(SpecSyntaxError):
        parse_spec("sd_in(union(box([0,1]), box([2,3]))) > 0", 1)


def test_precedence_and_labels():
    f = parse_spec("a: (x1 > 0) && x2 > 0 || true", 2)
    assert isinstance(f, Or) and isinstance(f.args[0], And)
    assert f.args[0].args[0].label == "a"
    assert isinstance(f.args[1], TrueF)
    g = parse_spec("keep: G[0,3] F[1,2] (x1 > 0)", 1)
    assert g.label == "keep" and isinstance(g.child, Eventually)


def test_region_forms():
    f = parse_spec("sd_out(poly(halfspace([1,0]; 1), halfspace([-1,0]; 1)) @ x2,x1) > 0 && "
                   "sd_out(union(ball([0,0]; 1), halfspace([0,1]; -2))) > 0", 2)
    p, q = f.args[0].pred, f.args[1].pred
    assert isinstance(p.region, Polytope) and p.dims == (1, 0)
    assert isinstance(q.region, Union) and isinstance(q.region.regions[0], Ball)


CORPUS = [
    "true",
    "x1 > 0",
    "x1 - 2 >= 0",
    "-x1 + 3.5 > 0",
    "2*x1 - 0.5*x2 + 1e-3 > 0",
    "x1 < x2",
    "1600 - x3 > 0",
    "x3 - 1800 > 0",
    "x1 > 0 && x2 > 0",
    "x1 > 0 || x2 > 0 || x3 > 0",
    "(x1 > 0 || x2 > 0) && x3 > 0",
    "x1 > 0 && (x2 > 0 && x3 > 0)",
    "G[0,10] (x1 > 0)",
    "F[2,5] (x1 > 0)",
    "G[0,10] F[2,5] (x1 > 0)",
    "G[0,inf] (x1 > 0)",
    "F[3,inf] (x2 > 0)",
    "G{4} (x1 > 0)",
    "((x1 > 0) U[0,3] (x2 > 0))",
    "((x1 > 0 && x2 > 0) U[1,4] F[0,2] (x3 > 0))",
    "G[0,1847] (sd_out(box([0,10],[0,10],[0,5])) > 0)",
    "G[1349,1349] ((1600 - x3 > 0) U[0,300] (x3 - 1800 > 0))",
    "sd_in(ball([1,2]; 0.5)) > 0",
    "sd_out(ball([1,2,3]; 2)) >= 0",
    "sd_out(halfspace([1,-1]; 0.25) @ x3,x1) > 0",
    "sd_out(poly(halfspace([1,0]; 1), halfspace([0,1]; 1), halfspace([-1,-1]; 1))) > 0",
    "sd_out(union(box([0,1],[0,1]), ball([3,3]; 1))) > 0",
    "sd_in(box([0,1])) > 0 || sd_out(box([2,3])) > 0",
    "avoid: G[0,50] (sd_out(box([0,1],[0,1])) > 0) && threat: G[5,inf] (x1 > 2)",
    "lbl: (x1 > 0 && x2 > 0)",
    "G[0,2] (a: (x1 > 0) || true)",
    "F[0,3] G[1,1] ((true U[0,2] x1 > 0))",
    "# comment line\nG[0,3] (x1 > 0) # trailing\n",
]


@pytest.mark.parametrize("text", CORPUS)
def test_roundtrip_corpus(text):
    f = parse_spec(text, 3)
    printed = pretty_print(f)
    assert parse_spec(printed, 3) == f
    assert pretty_print(parse_spec(printed, 3)) == printed


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 4), st.booleans())
def test_roundtrip_random(seed, n, depth, real):
    rng = np.random.default_rng(seed)
    pred = real_predicate if real else dyadic_predicate
    f = random_formula(rng, n, depth, pred=pred, max_b=6)
    if rng.random() < 0.3:
        f = dataclasses.replace(f, label="top")
    assert parse_spec(pretty_print(f), n) == f


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(3, 1)
    with pytest.raises(ValueError):
        Interval(-1, 2)
    assert not Interval(0, math.inf).bounded
    with pytest.raises(ValueError):
        Until(Interval(0, math.inf), TrueF(), TrueF())
    with pytest.raises(ValueError):
        And((TrueF(),))


def test_halfspace_and_box_values_survive_printing():
    f = Atom(SignedDistance(Halfspace([0.1, 1 / 3], 2 / 7), dims=(1, 0)))
    g = parse_spec(pretty_print(f), 2)
    assert g == f
    assert parse_spec(pretty_print(Or((f, Atom(Linear((1 / 3, 0.0), -0.1))))), 2).args[1] \
        == Atom(Linear((1 / 3, 0.0), -0.1))
