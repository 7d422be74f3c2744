"""Predicate-level robustness envelopes.

For a predicate ``h`` and time ``t`` the envelope entry at level ``dt`` is
the smallest spatial margin over all per-dimension time shifts in
``[-dt, dt]^s`` (``s`` = predicate support), and the sweep stops at the first
level where some shifted sample already violates ``h``.

Two routes compute the same numbers:

* the shell sweep visits the shifts that are new at each level, exactly as
  the sweep is usually stated; it works for every predicate kind;
* for coordinate-separable margins the minimum over the shift cube is the
  margin of per-column running minima, which costs ``O(dt_max)`` per time.

Both evaluate margins through the same code, so they agree bit for bit.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .envelope import Envelope
from .errors import ConfigError, OutOfDomain
from .regions import NORMS
from .signal import Padding, Signal


@dataclass(frozen=True)
class MonitorConfig:
    dt_max: int = 50
    norm: str = "l2"
    # bracket/tolerance for the root searches in the grid certificate
    bisection_tol: float = 1e-9
    bisection_hi: float = 1e6
    naive: bool = False
    jobs: int = 1
    memo: bool = True

    def __post_init__(self):
        if int(self.dt_max) != self.dt_max or self.dt_max < 0:
            raise ConfigError(f"dt_max must be a non-negative integer, got {self.dt_max!r}")
        if self.norm not in NORMS:
            raise ConfigError(f"norm must be one of {NORMS}, got {self.norm!r}")
        if not self.bisection_tol > 0 or not self.bisection_hi > 0:
            raise ConfigError("bisection tolerance and bracket must be positive")
        if int(self.jobs) != self.jobs or self.jobs < 1:
            raise ConfigError(f"jobs must be a positive integer, got {self.jobs!r}")
        object.__setattr__(self, "dt_max", int(self.dt_max))


def shell_offsets(dt_level: int, s: int):
    """Shifts in ``[-dt, dt]^s`` with at least one component at ``+-dt``."""
    if dt_level < 0 or s < 1:
        raise ValueError("need dt_level >= 0 and s >= 1")
    rng = range(-dt_level, dt_level + 1)
    for off in itertools.product(rng, repeat=s):
        if max(abs(o) for o in off) == dt_level:
            yield off


@lru_cache(maxsize=256)
def shell_array(dt_level: int, s: int) -> np.ndarray:
    """The shell as an ``(m, s)`` array, in the same order as :func:`shell_offsets`."""
    if dt_level == 0:
        out = np.zeros((1, s), dtype=np.int64)
    else:
        grid = np.indices((2 * dt_level + 1,) * s).reshape(s, -1).T - dt_level
        out = grid[np.abs(grid).max(axis=1) == dt_level]
    out.setflags(write=False)
    return out


def strict_limit(sig: Signal, times) -> float:
    """Largest level whose shifted samples all stay inside a strict domain."""
    if sig.padding is Padding.CLAMP or len(times) == 0:
        return math.inf
    return min(min(times) - sig.t_lo, sig.t_hi - max(times))


def _finish(vals, dt_max):
    """Turn raw per-level margins into envelope rows (``-inf`` = absent)."""
    ok = np.logical_and.accumulate(vals >= 0, axis=1)
    vals = np.minimum.accumulate(vals, axis=1)
    vals[~ok] = -math.inf
    return vals


def _separable_rows(form, sig, times, dt_max):
    lo, hi = times[0] - dt_max, times[-1] + dt_max
    span = np.arange(lo, hi + 1)
    idx = times - lo
    keys = [f(sig.column(d, span)) for d, f in zip(form.dims, form.keyfns)]
    running = [k[idx] for k in keys]
    out = np.empty((len(times), dt_max + 1))
    for level in range(dt_max + 1):
        if level:
            running = [np.minimum(np.minimum(r, k[idx - level]), k[idx + level])
                       for r, k in zip(running, keys)]
        out[:, level] = form.combine(np.column_stack(running))
    return _finish(out, dt_max)


def _shell_rows(p, sig, times, dt_max, norm, witnesses=None):
    support = list(p.support)
    s = len(support)
    base = sig.values[sig.row_index(times)]
    out = np.full((len(times), dt_max + 1), -math.inf)
    prev = np.full(len(times), math.inf)
    alive = np.arange(len(times))
    for level in range(dt_max + 1):
        if alive.size == 0:
            break
        offs = shell_array(level, s)
        tt = times[alive]
        Z = np.repeat(base[alive][:, None, :], len(offs), axis=1)
        for c, d in enumerate(support):
            Z[:, :, d] = sig.column(d, tt[:, None] - offs[None, :, c])
        sr = p.margin(Z.reshape(-1, sig.n), norm).reshape(len(alive), len(offs))
        bad = (sr < 0).any(axis=1)
        if witnesses is not None:
            for i in np.flatnonzero(bad):
                j = int(np.flatnonzero(sr[i] < 0)[0])
                witnesses[int(tt[i])] = (level, tuple(int(o) for o in offs[j]))
        keep = ~bad
        alive = alive[keep]
        cur = np.minimum(sr[keep].min(axis=1), prev[alive])
        prev[alive] = cur
        out[alive, level] = cur
    return out


def predicate_rows(p, sig: Signal, times, dt_max: int, cfg: MonitorConfig, witnesses=None):
    """Envelope rows of ``p`` at every time in ``times`` (sorted ints).

    Returns a ``(len(times), dt_max + 1)`` array with ``-inf`` for absent
    entries. ``witnesses`` (optional dict) receives, per time, the level and
    shift of the first violation found by the shell sweep.
    """
    times = np.asarray(times, dtype=np.int64)
    if times.size == 0:
        return np.empty((0, dt_max + 1))
    form = None if cfg.naive else p.separable_form(cfg.norm)

    def run(chunk):
        if form is not None:
            return _separable_rows(form, sig, chunk, dt_max)
        return _shell_rows(p, sig, chunk, dt_max, cfg.norm, witnesses)

    if cfg.jobs == 1 or times.size < 2 * cfg.jobs:
        return run(times)
    chunks = np.array_split(times, cfg.jobs)
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        parts = list(pool.map(run, chunks))
    return np.vstack(parts)


def predicate_envelope(p, sig: Signal, t: int, cfg: MonitorConfig) -> Envelope:
    """Envelope of a single predicate at time ``t``.

    Under strict padding, if the domain ends before ``cfg.dt_max`` and the
    sweep has not stopped on its own, :class:`OutOfDomain` is raised with the
    envelope computed so far in ``.partial``.
    """
    if not sig.in_domain(t):
        raise OutOfDomain(f"time {t} outside [{sig.t_lo};{sig.t_hi}]")
    limit = min(cfg.dt_max, strict_limit(sig, [t]))
    row = predicate_rows(p, sig, [t], int(limit), cfg)[0]
    env = Envelope.from_row(row)
    if limit < cfg.dt_max and len(env) == limit + 1:
        raise OutOfDomain(
            f"strict padding allows only dt <= {limit} at t={t} (asked for {cfg.dt_max})",
            partial=env)
    return env
