import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from instances import dyadic_signal, oracle_instance, random_formula, real_predicate, real_signal
from strobust.envelope import EMPTY, Envelope, env_min
from strobust.errors import ConfigError, OutOfDomain, WindowOutOfRange
from strobust.formula import (
    Always, And, Atom, Eventually, Interval, Linear, TrueF, Until, walk,
)
from strobust.formula_monitor import (
    binding_table, explain, monitor, named_subformulas, run_monitor,
    sliding_extremum, sliding_extremum_naive, until_naive, until_sweep,
)
from strobust.parser import parse_spec
from strobust.predicate_monitor import MonitorConfig
from strobust.signal import Padding, Signal

INF = math.inf
CLAMP = MonitorConfig(dt_max=2, norm="linf")


def col(vals, t_lo=0, padding=Padding.CLAMP):
    return Signal(np.asarray(vals, dtype=float)[:, None], t_lo=t_lo, padding=padding)


def test_true_is_top():
    assert monitor(TrueF(), col([0, 1, 2]), 0, MonitorConfig(dt_max=2)) == Envelope((INF,) * 3)


def test_always_pointwise_min():
    # child envelopes [3,1], [2,2], [5,0] at three consecutive times
    rows = np.array([[3, 1], [2, 2], [5, 0]], dtype=float)
    out = [sliding_extremum(rows[:, d], 0, 2, "min")[0] for d in range(2)]
    assert out == [2, 0]
    sig = col([3, 2, 5])
    env = monitor(Always(Interval(0, 2), Atom(Linear((1.0,), 0.0))), sig, 0, MonitorConfig(dt_max=1))
    assert env == Envelope((2.0, 2.0))


def test_until_example():
    assert until_naive([4, 3, 1], [0, 5, 2], 0, 2) == 3
    assert until_sweep([4, 3, 1], [0, 5, 2], 0, 2) == 3


def test_sliding_examples():
    assert sliding_extremum([3, 2, 5, 0], 0, 1, "min") == [2, 2, 0]
    assert sliding_extremum([1, 4, 2], 0, 2, "max") == [4]
    with pytest.raises(WindowOutOfRange):
        sliding_extremum([1, 2], 0, 2)
    with pytest.raises(WindowOutOfRange):
        sliding_extremum_naive([1, 2], 2, 1)


def test_sliding_random_long():
    rng = np.random.default_rng(0)
    vals = rng.integers(-50, 50, 200).astype(float).tolist()
    assert sliding_extremum(vals, 3, 17, "min") == sliding_extremum_naive(vals, 3, 17, "min")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from([-INF, -1.0, 0.0, 0.5, 2.0, 7.25, INF]), min_size=1, max_size=60),
       st.integers(0, 10), st.integers(0, 10), st.sampled_from(["min", "max"]))
def test_sliding_matches_naive(vals, a, w, mode):
    b = a + w
    if b >= len(vals):
        return
    assert sliding_extremum(vals, a, b, mode) == sliding_extremum_naive(vals, a, b, mode)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_until_matches_naive(data):
    b = data.draw(st.integers(0, 12))
    a = data.draw(st.integers(0, b))
    vals = st.sampled_from([-INF, -2.0, 0.0, 1.0, 1.5, 3.0, INF])
    left = data.draw(st.lists(vals, min_size=b + 1, max_size=b + 1))
    right = data.draw(st.lists(vals, min_size=b + 1, max_size=b + 1))
    assert float(until_sweep(left, right, a, b)) == until_naive(left, right, a, b)


def test_eventually_equals_true_until():
    rng = np.random.default_rng(1)
    for _ in range(60):
        sig = dyadic_signal(rng)
        child = random_formula(rng, sig.n, 1)
        a = int(rng.integers(0, 3))
        iv = Interval(a, a + int(rng.integers(0, 3)))
        t = int(rng.integers(sig.t_lo, sig.t_hi + 1))
        f = monitor(Eventually(iv, child), sig, t, CLAMP)
        u = monitor(Until(iv, TrueF(), child), sig, t, CLAMP)
        assert f == u


def test_always_singleton_is_shift():
    rng = np.random.default_rng(2)
    for _ in range(60):
        sig = dyadic_signal(rng)
        child = random_formula(rng, sig.n, 1)
        a = int(rng.integers(0, 3))
        t = int(rng.integers(sig.t_lo, sig.t_hi - a + 1)) if sig.t_hi - a >= sig.t_lo else sig.t_lo
        if t + a > sig.t_hi:
            continue
        g = monitor(Always(Interval(a, a), child), sig, t, CLAMP)
        assert g == monitor(child, sig, t + a, CLAMP)


def test_memo_and_naive_transparent():
    rng = np.random.default_rng(4)
    for _ in range(80):
        root, sig, t, dt_max = oracle_instance(rng)
        base = run_monitor(root, sig, t, MonitorConfig(dt_max=dt_max, norm="linf"))
        for kw in ({"memo": False}, {"naive": True}, {"jobs": 4}):
            other = run_monitor(root, sig, t, MonitorConfig(dt_max=dt_max, norm="linf", **kw))
            assert other.envelope == base.envelope
            for path in base.tables:
                assert other.tables[path][0] == base.tables[path][0]
                assert np.array_equal(other.tables[path][1], base.tables[path][1])


def test_real_valued_naive_equivalence():
    rng = np.random.default_rng(8)
    for _ in range(40):
        sig = real_signal(rng, length=10)
        root = random_formula(rng, sig.n, 2, pred=real_predicate)
        cfg = MonitorConfig(dt_max=3)
        assert run_monitor(root, sig, 0, cfg).envelope == \
            run_monitor(root, sig, 0, MonitorConfig(dt_max=3, naive=True, memo=False)).envelope


def test_tables_are_valid_envelopes():
    rng = np.random.default_rng(6)
    for _ in range(40):
        root, sig, t, dt_max = oracle_instance(rng)
        res = run_monitor(root, sig, t, MonitorConfig(dt_max=dt_max, norm="linf"))
        for path, node in walk(root):
            times, rows = res.tables[path]
            assert times == sorted(set(times))
            for r in rows:
                Envelope.from_row(r)


def test_strict_padding_lowers_width():
    sig = col(np.arange(11.0), t_lo=0, padding=Padding.STRICT)
    root = Always(Interval(0, 3), Atom(Linear((1.0,), 1.0)))
    res = run_monitor(root, sig, 2, MonitorConfig(dt_max=5))
    assert res.dt_max == 2 and res.notices
    assert len(res.envelope) == 3
    with pytest.raises(OutOfDomain):
        run_monitor(root, sig, 11, MonitorConfig())


def test_explain_examples():
    sig = Signal(np.array([[5.0, 3.0]] * 6), t_lo=-2, padding=Padding.CLAMP)
    root = parse_spec("a: (x1 > 0) && b: (x2 > 0)", 2)
    out = explain(root, sig, 0, MonitorConfig(dt_max=1))
    assert out == {"a": Envelope((5, 5)), "b": Envelope((3, 3)), "root": Envelope((3, 3))}
    rows = binding_table({"a": Envelope((5, 4)), "b": Envelope((3, 3))}, Envelope((3, 3)), 1)
    assert [r[1] for r in rows] == ["b", "b"]

    root = parse_spec("(x1 > 0) && (x2 > 10)", 2)
    out = explain(root, sig, 0, MonitorConfig(dt_max=1))
    assert out["phi2"] == EMPTY and out["root"] == EMPTY
    rows = binding_table(out, out["root"], 1)
    assert rows[0] == (0, "phi2", None, "violated")


def test_explain_conjunct_min():
    rng = np.random.default_rng(9)
    for _ in range(30):
        root, sig, t, dt_max = oracle_instance(rng)
        if not isinstance(root, And):
            continue
        out = explain(root, sig, t, MonitorConfig(dt_max=dt_max, norm="linf"))
        envs = [out[f"phi{i + 1}"] for i in range(len(root.args))]
        acc = envs[0]
        for e in envs[1:]:
            acc = env_min(acc, e)
        assert acc == out["root"]


def test_labels_validated():
    with pytest.raises(ConfigError):
        named_subformulas(parse_spec("a: (x1 > 0) && a: (x1 > 1)", 1))
    with pytest.raises(ConfigError):
        named_subformulas(parse_spec("root: (x1 > 0) && b: (x1 > 1)", 1))
    assert named_subformulas(parse_spec("G[0,2] (x1 > 0)", 1)) == []
