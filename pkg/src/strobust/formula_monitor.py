"""Propagation of envelopes through a formula tree.

Every node gets a table of envelope rows, one per required evaluation time
(see :mod:`strobust.horizon`). Rows are dense arrays over ``dt = 0..dt_max``
with ``-inf`` marking absent entries, which makes conjunction an elementwise
minimum (absent is absorbing) and disjunction an elementwise maximum (absent
is neutral). Temporal operators reduce over time, one ``dt`` column at a
time.
"""

from __future__ import annotations

import logging
import math
import time as _time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .envelope import Envelope
from .errors import ConfigError, OutOfDomain, WindowOutOfRange
from .formula import (
    Always, And, Atom, Eventually, Or, TrueF, Until, check_formula, walk,
)
from .horizon import child_times, effective_window, required_times
from .predicate_monitor import MonitorConfig, predicate_rows, strict_limit

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# window kernels

def sliding_extremum(values, a: int, b: int, mode: str = "min") -> list:
    """``out[i] = min`` (or ``max``) of ``values[i+a .. i+b]``, monotone-deque pass."""
    vals = values.tolist() if isinstance(values, np.ndarray) else list(values)
    n = len(vals)
    if a < 0 or b < a or b >= n:
        raise WindowOutOfRange(f"window [{a};{b}] does not fit a sequence of length {n}")
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    is_min = mode == "min"
    dq = deque()
    out = []
    j = a
    for i in range(n - b):
        while j <= i + b:
            v = vals[j]
            if is_min:
                while dq and vals[dq[-1]] >= v:
                    dq.pop()
            else:
                while dq and vals[dq[-1]] <= v:
                    dq.pop()
            dq.append(j)
            j += 1
        while dq[0] < i + a:
            dq.popleft()
        out.append(vals[dq[0]])
    return out


def sliding_extremum_naive(values, a: int, b: int, mode: str = "min") -> list:
    vals = list(values)
    if a < 0 or b < a or b >= len(vals):
        raise WindowOutOfRange(f"window [{a};{b}] does not fit a sequence of length {len(vals)}")
    f = min if mode == "min" else max
    return [f(vals[i + a:i + b + 1]) for i in range(len(vals) - b)]


def until_sweep(left, right, a: int, b: int):
    """Prefix-minimum sweep over ``k = 0..b``; arrays are indexed by ``k`` first.

    ``left[k]`` / ``right[k]`` may be scalars or arrays (evaluated
    elementwise). Returns ``-inf`` where no offset qualifies.
    """
    m = np.full(np.shape(left[0]), math.inf)
    best = np.full(np.shape(left[0]), -math.inf)
    for k in range(b + 1):
        m = np.minimum(m, left[k])
        if k >= a:
            best = np.maximum(best, np.minimum(m, right[k]))
    return best


def until_naive(left, right, a: int, b: int):
    """``max_{k in [a,b]} min(min(left[0..k]), right[k])`` by a double loop."""
    best = -math.inf
    for k in range(a, b + 1):
        m = right[k]
        for j in range(k + 1):
            m = min(m, left[j])
        best = max(best, m)
    return best


# --------------------------------------------------------------------------
# engine

@dataclass
class MonitorResult:
    envelope: Envelope
    t: int
    dt_max: int
    tables: dict
    notices: list = field(default_factory=list)
    timing_ms: dict = field(default_factory=dict)

    def row(self, path, t):
        times, rows = self.tables[path]
        i = times.index(t)
        return rows[i]

    def envelope_at(self, path, t=None) -> Envelope:
        times, rows = self.tables[path]
        if t is None:
            t = times[0]
        return Envelope.from_row(rows[times.index(t)])


def _runs(times):
    """Split sorted ints into maximal runs of consecutive values."""
    runs, start = [], 0
    for i in range(1, len(times) + 1):
        if i == len(times) or times[i] != times[i - 1] + 1:
            runs.append(times[start:i])
            start = i
    return runs


class _Engine:
    def __init__(self, root, sig, t, cfg, width, reads):
        self.root = root
        self.sig = sig
        self.t = t
        self.cfg = cfg
        self.width = width
        self.reads = reads
        self.tables = {}
        self.memo = {} if cfg.memo else None
        self.ids = {}
        self.timing = {}

    def node_id(self, node):
        return self.ids.setdefault(node, len(self.ids))

    def lookup(self, path, times):
        """Rows of an already evaluated node at the given times."""
        ctimes, crows = self.tables[path]
        idx = np.searchsorted(ctimes, times)
        if self.reads is not None:
            self.reads.setdefault(path, set()).update(int(x) for x in times)
        return crows[idx]

    def eval(self, node, path, times):
        kids = child_times(node, times, self.sig.t_hi)
        for i, (child, ct) in enumerate(zip(node.children, kids)):
            self.eval(child, path + (i,), ct)

        nid = self.node_id(node) if self.memo is not None else None
        rows = np.empty((len(times), self.width))
        todo = []
        for i, tt in enumerate(times):
            hit = self.memo.get((nid, tt)) if nid is not None else None
            if hit is None:
                todo.append(i)
            else:
                rows[i] = hit
        if todo:
            sub = [times[i] for i in todo]
            start = _time.perf_counter()
            rows[todo] = self.compute(node, path, sub)
            kind = type(node).__name__
            self.timing[kind] = self.timing.get(kind, 0.0) + (_time.perf_counter() - start) * 1e3
            if nid is not None:
                for i in todo:
                    self.memo[(nid, times[i])] = rows[i].copy()
        self.tables[path] = (list(times), rows)
        return rows

    def compute(self, node, path, times):
        if isinstance(node, TrueF):
            return np.full((len(times), self.width), math.inf)
        if isinstance(node, Atom):
            return predicate_rows(node.pred, self.sig, times, self.width - 1, self.cfg)
        if isinstance(node, (And, Or)):
            parts = [self.lookup(path + (i,), times) for i in range(len(node.args))]
            red = np.minimum if isinstance(node, And) else np.maximum
            out = parts[0]
            for p in parts[1:]:
                out = red(out, p)
            return out
        if isinstance(node, (Always, Eventually)):
            return self.window(node, path, times)
        if isinstance(node, Until):
            return self.until(node, path, times)
        raise TypeError(f"unknown node {node!r}")

    def window(self, node, path, times):
        is_g = isinstance(node, Always)
        ident = math.inf if is_g else -math.inf
        mode = "min" if is_g else "max"
        slide = sliding_extremum_naive if self.cfg.naive else sliding_extremum
        t_hi = self.sig.t_hi
        out = []
        for run in _runs(times):
            p0, p1 = run[0], run[-1]
            a, b = effective_window(node.interval, p0, t_hi)
            if b < a:
                out.append(np.full((len(run), self.width), ident))
                continue
            series = np.full((p1 - p0 + b + 1, self.width), ident)
            lo, hi = p0 + a, min(p1 + b, t_hi)
            if lo <= hi:
                series[lo - p0:hi - p0 + 1] = self.lookup(path + (0,), list(range(lo, hi + 1)))
            block = np.empty((len(run), self.width))
            for col in range(self.width):
                block[:, col] = slide(series[:, col], a, b, mode)
            out.append(block)
        return np.vstack(out)

    def until(self, node, path, times):
        t_hi = self.sig.t_hi
        a, b = node.interval.a, node.interval.b
        T = np.asarray(times)
        L, R = [], []
        for k in range(b + 1):
            tk = T + k
            ok = tk <= t_hi
            lk = np.full((len(T), self.width), math.inf)
            if ok.any():
                lk[ok] = self.lookup(path + (0,), tk[ok])
            L.append(lk)
            rk = np.full((len(T), self.width), -math.inf)
            if k >= a and ok.any():
                rk[ok] = self.lookup(path + (1,), tk[ok])
            R.append(rk)
        if self.cfg.naive:
            out = np.empty((len(T), self.width))
            for i in range(len(T)):
                for col in range(self.width):
                    out[i, col] = until_naive([x[i, col] for x in L], [x[i, col] for x in R], a, b)
            return out
        return until_sweep(L, R, a, b)


def _effective_width(root, sig, paths, cfg):
    limit = math.inf
    for path, node in walk(root):
        if isinstance(node, Atom):
            limit = min(limit, strict_limit(sig, paths[path]))
    return int(min(cfg.dt_max, limit))


def run_monitor(root, sig, t: int, cfg: MonitorConfig, reads=None) -> MonitorResult:
    """Evaluate ``root`` at ``t`` and keep every intermediate table.

    Under strict padding the sweep bound is lowered so that no shifted sample
    leaves the signal; a notice records when that happens. ``reads``, when a
    dict, collects per node path the evaluation times the engine looked up.
    """
    if not sig.in_domain(t):
        raise OutOfDomain(f"evaluation time {t} outside [{sig.t_lo};{sig.t_hi}]")
    check_formula(root, sig.n, cfg.norm)
    paths = required_times(root, t, sig.t_hi)
    dt_max = _effective_width(root, sig, paths, cfg)
    notices = []
    if dt_max < cfg.dt_max:
        notices.append(
            f"strict padding limits dt_max to {dt_max} (requested {cfg.dt_max}); "
            "extend the trace or use clamp padding")
        log.warning(notices[-1])
    eng = _Engine(root, sig, t, cfg, dt_max + 1, reads)
    rows = eng.eval(root, (), [t])
    env = Envelope.from_row(rows[0])
    # every table row must be a valid envelope
    for _, (_, tab) in eng.tables.items():
        for r in tab:
            Envelope.from_row(r)
    return MonitorResult(env, t, dt_max, eng.tables, notices,
                         {k: round(v, 3) for k, v in sorted(eng.timing.items())})


def monitor(root, sig, t: int, cfg: MonitorConfig) -> Envelope:
    return run_monitor(root, sig, t, cfg).envelope


# --------------------------------------------------------------------------
# explanation

def named_subformulas(root) -> list:
    """``(name, path)`` for labeled nodes, else for the top-level conjuncts."""
    named = [(node.label, path) for path, node in walk(root)
             if node.label is not None and path != ()]
    if not named and isinstance(root, And):
        named = [(f"phi{i + 1}", (i,)) for i in range(len(root.args))]
    names = [n for n, _ in named]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ConfigError(f"duplicate subformula labels: {', '.join(sorted(dup))}")
    if "root" in names:
        raise ConfigError("'root' is reserved for the whole formula")
    return named


def explain_result(result: MonitorResult, root) -> dict:
    """Name -> (evaluation time, envelope) for named subformulas, plus ``root``."""
    out = {}
    for name, path in named_subformulas(root):
        times = result.tables[path][0]
        at = result.t if result.t in times else times[0]
        out[name] = (at, result.envelope_at(path, at))
    out["root"] = (result.t, result.envelope)
    return out


def explain(root, sig, t: int, cfg: MonitorConfig) -> dict:
    res = run_monitor(root, sig, t, cfg)
    return {name: env for name, (_, env) in explain_result(res, root).items()}


def binding_table(named: dict, root_env: Envelope, dt_max: int) -> list:
    """Per level: ``(dt, binding name, dx or None, status)``.

    The binding subformula is the first one attaining the minimum; when the
    root has no entry at a level it is the first subformula without one.
    """
    rows = []
    items = [(n, e) for n, e in named.items() if n != "root"]
    for dt in range(dt_max + 1):
        if dt < len(root_env):
            cands = [(e[dt], n) for n, e in items if dt < len(e)]
            name = min(cands, key=lambda c: c[0])[1] if cands else "root"
            rows.append((dt, name, root_env[dt], "ok"))
        else:
            missing = [n for n, e in items if dt >= len(e)]
            rows.append((dt, missing[0] if missing else "root", None, "violated"))
    return rows
