"""Reference semantics used to check the monitor.

* :func:`qualitative` evaluates the Boolean semantics directly.
* :func:`brute_force_str` rasterises the admissible ``(dx, dt)`` set on a
  grid by enumerating every global time shift and, per predicate
  occurrence, a finite set of worst-case spatial perturbations.
* :func:`classical_spatial` is the scalar (space-only) robustness recursion.
* :func:`certified_margin` / :func:`certified_envelope` recompute predicate
  margins of planar regions by searching over circles, independently of the
  closed-form distances.

None of these share code with the envelope engine beyond the formula types,
the signal accessors and the window clipping rule.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .envelope import Envelope, PerturbationLevel, pareto_strict, raster_maximal_points
from .errors import BudgetExceeded, Unsupported
from .formula import (
    Always, And, Atom, Eventually, Linear, Lipschitz, Or, Orientation,
    SignedDistance, TrueF, Until,
)
from .horizon import effective_window
from .regions import Box, Halfspace
from .signal import sample, sample_shifted

# documented enumeration budget
MAX_DIM = 2
MAX_LEN = 10
MAX_DT = 2
MIN_STEP = 0.25
MAX_GRID = 401


# --------------------------------------------------------------------------
# Boolean recursion shared by the qualitative and brute-force checks

def _sat(node, t, sig, atom, cache, path=()):
    """Satisfaction of ``node`` at ``t``; ``atom(pred, t)`` returns a bool array."""
    key = (path, t)
    if key in cache:
        return cache[key]
    if isinstance(node, TrueF):
        out = np.True_
    elif isinstance(node, Atom):
        out = atom(node.pred, t)
    elif isinstance(node, And):
        out = np.True_
        for i, c in enumerate(node.args):
            out = out & _sat(c, t, sig, atom, cache, path + (i,))
    elif isinstance(node, Or):
        out = np.False_
        for i, c in enumerate(node.args):
            out = out | _sat(c, t, sig, atom, cache, path + (i,))
    elif isinstance(node, (Always, Eventually)):
        a, b = effective_window(node.interval, t, sig.t_hi)
        is_g = isinstance(node, Always)
        out = np.True_ if is_g else np.False_
        for k in range(a, b + 1):
            v = _sat(node.child, t + k, sig, atom, cache, path + (0,))
            out = (out & v) if is_g else (out | v)
    elif isinstance(node, Until):
        a, b = effective_window(node.interval, t, sig.t_hi)
        out = np.False_
        for k in range(a, b + 1):
            hold = _sat(node.right, t + k, sig, atom, cache, path + (1,))
            for j in range(k + 1):
                hold = hold & _sat(node.left, t + j, sig, atom, cache, path + (0,))
            out = out | hold
    else:
        raise TypeError(f"unknown node {node!r}")
    cache[key] = out
    return out


def qualitative(root, sig, t: int) -> bool:
    """Boolean satisfaction of ``root`` by ``sig`` at ``t``."""
    def atom(p, tt):
        return np.bool_(p.value(sample(sig, tt)[None, :])[0] >= 0)
    return bool(_sat(root, t, sig, atom, {}))


# --------------------------------------------------------------------------
# brute-force admissible set

def _vertices(dims, n):
    out = []
    for signs in itertools.product((-1.0, 1.0), repeat=len(dims)):
        v = np.zeros(n)
        v[list(dims)] = signs
        out.append(v)
    return np.array(out)


def _check_supported(p):
    if isinstance(p, Linear):
        return
    if isinstance(p, SignedDistance):
        members = p.region.members()
        if all(isinstance(m, (Box, Halfspace)) for m in members):
            return
    raise Unsupported(
        f"{type(p).__name__} predicates are outside the oracle's exact worst-case model")


def _candidates(p, z, grid, n):
    """Worst-case perturbations per grid level, shape ``(len(grid), m, n)``.

    A predicate holds on the whole ``linf`` ball iff it holds at every
    candidate: vertices suffice for affine margins and for staying inside a
    box; for avoiding a box the critical point moves toward its centre.
    """
    if isinstance(p, Linear):
        return grid[:, None, None] * _vertices(p.support, n)[None]
    parts = []
    for m in p.region.members():
        if isinstance(m, Box) and p.orientation is Orientation.AVOID:
            c = np.zeros((len(grid), 1, n))
            for j, d in enumerate(p.dims):
                c[:, 0, d] = np.clip(m.center[j] - z[d], -grid, grid)
            parts.append(c)
        else:
            parts.append(grid[:, None, None] * _vertices(p.dims, n)[None])
    return np.concatenate(parts, axis=1)


def check_budget(sig, dt_max, dx_step, dx_cap):
    problems = []
    if sig.n > MAX_DIM:
        problems.append(f"signal dimension {sig.n} > {MAX_DIM}")
    if len(sig) > MAX_LEN:
        problems.append(f"trace length {len(sig)} > {MAX_LEN}")
    if dt_max > MAX_DT:
        problems.append(f"dt_max {dt_max} > {MAX_DT}")
    if dx_step < MIN_STEP:
        problems.append(f"grid step {dx_step} < {MIN_STEP}")
    elif dx_cap / dx_step + 1 > MAX_GRID:
        problems.append(f"grid has more than {MAX_GRID} levels")
    if problems:
        raise BudgetExceeded("oracle budget exceeded: " + "; ".join(problems))


def admissible_grid(root, sig, t, dt_max, dx_step=0.25, dx_cap=4.0, norm="linf"):
    """Boolean table ``ok[dt, g]``: is ``(g * dx_step, dt)`` admissible?"""
    check_budget(sig, dt_max, dx_step, dx_cap)
    if norm != "linf":
        raise Unsupported("the brute-force oracle only supports the linf norm")
    for node in _atoms(root):
        _check_supported(node)
    grid = dx_step * np.arange(int(math.floor(dx_cap / dx_step)) + 1)
    n = sig.n
    ok = np.ones((dt_max + 1, len(grid)), dtype=bool)
    rng = range(-dt_max, dt_max + 1)
    for shift in itertools.product(rng, repeat=n):
        level = max(abs(s) for s in shift)

        def atom(p, tt, shift=shift):
            z = sample_shifted(sig, tt, shift)
            cand = z + _candidates(p, z, grid, n)
            h = p.value(cand.reshape(-1, n)).reshape(len(grid), -1)
            return (h >= 0).all(axis=1)

        sat = np.broadcast_to(_sat(root, t, sig, atom, {}), grid.shape)
        ok[level:] &= sat
    return grid, ok


def brute_force_str(root, sig, t, dt_max, dx_step=0.25, dx_cap=4.0, norm="linf"):
    """Maximal admissible ``(dx, dt)`` grid points, within the oracle budget."""
    grid, ok = admissible_grid(root, sig, t, dt_max, dx_step, dx_cap, norm)
    pts = [PerturbationLevel(float(grid[g]), dt)
           for dt in range(dt_max + 1) for g in np.flatnonzero(ok[dt])]
    return raster_maximal_points(pts)


def _atoms(root):
    stack = [root]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            yield node.pred
        stack.extend(node.children)


def snap(dx, dx_step, dx_cap):
    """Largest grid level not above ``dx`` (capped)."""
    if dx == math.inf:
        return dx_cap
    return min(math.floor(dx / dx_step) * dx_step, dx_cap)


def dominance_failures(env_dx, points, dx_step, dx_cap):
    """Monitor points (snapped to the grid) that no oracle point dominates.

    ``env_dx`` is a plain sequence so corrupted (non-monotone) files can be
    checked as well. For well-formed envelopes only the strict Pareto points
    are tested, which covers the whole downward closure.
    """
    try:
        levels = pareto_strict(Envelope(tuple(env_dx)))
    except ValueError:
        levels = [PerturbationLevel(v, i) for i, v in enumerate(env_dx) if v >= 0]
    bad = []
    for lv in levels:
        q = PerturbationLevel(snap(lv.dx, dx_step, dx_cap), lv.dt)
        if not any(p.dominates(q) for p in points):
            bad.append((lv, q))
    return bad


# --------------------------------------------------------------------------
# classical space-only robustness

def _depth(p, z):
    """Signed distance of ``z`` to the complement of the satisfying set."""
    if isinstance(p, Linear):
        a = np.array(p.coef)
        return float((a @ z + p.offset) / np.sqrt(a @ a))
    if isinstance(p, SignedDistance):
        return float(p.value(z[None, :])[0])
    raise Unsupported(f"{type(p).__name__} predicates have no exact signed distance")


def classical_spatial(root, sig, t: int) -> float:
    """Scalar spatial robustness: depth for predicates, min/max for the operators."""
    def rec(node, tt):
        if isinstance(node, TrueF):
            return math.inf
        if isinstance(node, Atom):
            return _depth(node.pred, sample(sig, tt))
        if isinstance(node, And):
            return min(rec(c, tt) for c in node.args)
        if isinstance(node, Or):
            return max(rec(c, tt) for c in node.args)
        a, b = effective_window(node.interval, tt, sig.t_hi)
        ks = range(a, b + 1)
        if isinstance(node, Always):
            return min((rec(node.child, tt + k) for k in ks), default=math.inf)
        if isinstance(node, Eventually):
            return max((rec(node.child, tt + k) for k in ks), default=-math.inf)
        if isinstance(node, Until):
            vals = []
            for k in ks:
                left = min(rec(node.left, tt + j) for j in range(k + 1))
                vals.append(min(left, rec(node.right, tt + k)))
            return max(vals, default=-math.inf)
        raise TypeError(f"unknown node {node!r}")
    return rec(root, t)


# --------------------------------------------------------------------------
# circle-search certificate for planar regions

ANGLES = 720


def _circle_min(h, z, s):
    """Minimum of ``h`` on the circle of radius ``s`` around ``z``."""
    if s == 0:
        return float(h(z[None, :])[0])
    th = np.linspace(0.0, 2 * np.pi, ANGLES, endpoint=False)
    pts = z[None, :] + s * np.column_stack([np.cos(th), np.sin(th)])
    vals = h(pts)
    i = int(np.argmin(vals))
    step = 2 * np.pi / ANGLES

    def f(off):
        # searched as an offset from the best grid angle so the solver's
        # relative tolerance acts on a small number
        a = th[i] + off
        return float(h((z + s * np.array([np.cos(a), np.sin(a)]))[None, :])[0])

    res = minimize_scalar(f, bounds=(-step, step), method="bounded",
                          options={"xatol": 1e-13, "maxiter": 2000})
    return min(float(vals[i]), float(res.fun))


def certified_margin(p, z, tol=1e-9, hi=1e6, max_iter=10_000) -> float:
    """Radius of the largest disc around ``z`` on which ``h >= 0``.

    The minimum of ``h`` over circles is 1-Lipschitz in the radius, so
    stepping by its current value never passes the first zero. Returns
    ``h(z)`` (negative) when ``z`` itself violates the predicate.
    """
    if not isinstance(p, SignedDistance) or p.region.dim != 2:
        raise Unsupported("the circle certificate handles planar region predicates only")
    dims = list(p.dims)

    def h(Z):
        full = np.zeros((len(Z), max(dims) + 1))
        full[:, dims] = Z
        return p.value(full)

    z = np.asarray(z, dtype=np.float64)[dims]
    h0 = float(h(z[None, :])[0])
    if h0 < 0:
        return h0
    s = 0.0
    for _ in range(max_iter):
        v = _circle_min(h, z, s)
        if v <= tol:
            return s
        s += v
        if s >= hi:
            return hi
    return s


def certified_envelope(p, sig, t, dt_max, tol=1e-9, hi=1e6):
    """Predicate envelope rebuilt from :func:`certified_margin` on every shifted sample."""
    support = list(p.support)
    cache = {}
    out = []
    prev = math.inf
    for level in range(dt_max + 1):
        vals = []
        for off in itertools.product(range(-level, level + 1), repeat=len(support)):
            if max(abs(o) for o in off) != level:
                continue
            shift = np.zeros(sig.n, dtype=np.int64)
            shift[support] = off
            z = sample_shifted(sig, t, shift)
            key = tuple(z.tolist())
            if key not in cache:
                cache[key] = certified_margin(p, z, tol, hi)
            vals.append(cache[key])
        if min(vals) < 0:
            break
        prev = min(prev, min(vals))
        out.append(prev)
    return out


def lipschitz_grid_margin(p: Lipschitz, z, lo, hi, points=20001) -> float:
    """Largest radius certified by a dense 1-D grid (for scalar black boxes)."""
    z = float(np.asarray(z).ravel()[0])
    xs = np.linspace(lo, hi, points)
    vals = p.value(xs[:, None])
    if p.value(np.array([[z]]))[0] < 0:
        return -math.inf
    bad = np.abs(xs[vals < 0] - z)
    return float(bad.min()) if bad.size else math.inf
