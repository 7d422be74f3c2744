"""Robustness envelopes: Pareto fronts of admissible (dx, dt) levels.

An :class:`Envelope` stores one spatial bound per temporal level
``dt = 0..k``. The sequence is non-increasing and non-negative; an empty
envelope means the formula is violated even without perturbation.
Envelopes are plain values and every operation here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ParseError


@dataclass(frozen=True, order=True)
class PerturbationLevel:
    dx: float
    dt: float

    def __post_init__(self):
        if not (self.dx >= 0 and self.dt >= 0):
            raise ValueError(f"perturbation levels are non-negative, got ({self.dx}, {self.dt})")

    def dominates(self, other) -> bool:
        """Weak product order: ``self >= other`` in both components."""
        return self.dx >= other.dx and self.dt >= other.dt

    def strictly_dominates(self, other) -> bool:
        return self.dominates(other) and self != other


@dataclass(frozen=True)
class Envelope:
    dx: tuple = ()

    def __post_init__(self):
        # `+ 0.0` folds -0.0 into 0.0 so files never show a signed zero
        dx = tuple(float(v) + 0.0 for v in self.dx)
        for i, v in enumerate(dx):
            if not v >= 0:
                raise ValueError(f"envelope entry {i} is {v}; entries must be >= 0")
            if i and v > dx[i - 1]:
                raise ValueError(f"envelope increases at dt={i}: {dx[i - 1]} -> {v}")
        object.__setattr__(self, "dx", dx)

    @classmethod
    def from_row(cls, row) -> "Envelope":
        """Build from a dense row where ``-inf`` marks absent entries."""
        row = np.asarray(row, dtype=np.float64)
        absent = np.flatnonzero(row == -math.inf)
        k = absent[0] if absent.size else row.size
        if np.any(row[k:] != -math.inf):
            raise ValueError("absent entries must form a suffix")
        return cls(tuple(row[:k].tolist()))

    @classmethod
    def top(cls, dt_max: int) -> "Envelope":
        return cls((math.inf,) * (dt_max + 1))

    def to_row(self, width: int) -> np.ndarray:
        row = np.full(width, -math.inf)
        k = min(width, len(self.dx))
        row[:k] = self.dx[:k]
        return row

    def __len__(self):
        return len(self.dx)

    def __getitem__(self, i):
        return self.dx[i]

    def __iter__(self):
        return iter(self.dx)

    @property
    def violated(self) -> bool:
        return not self.dx

    def steps(self):
        """The step points ``(dx[dt], dt)`` as perturbation levels."""
        return [PerturbationLevel(v, i) for i, v in enumerate(self.dx)]

    def __repr__(self):
        return f"Envelope({list(self.dx)})"


EMPTY = Envelope(())


def env_min(e1: Envelope, e2: Envelope) -> Envelope:
    k = min(len(e1), len(e2))
    return Envelope(tuple(min(a, b) for a, b in zip(e1.dx[:k], e2.dx[:k])))


def env_max(e1: Envelope, e2: Envelope) -> Envelope:
    k = max(len(e1), len(e2))
    out = []
    for i in range(k):
        vals = [e.dx[i] for e in (e1, e2) if i < len(e)]
        out.append(max(vals))
    return Envelope(tuple(out))


def pareto_strict(e: Envelope) -> list:
    """Maximal points of the step set: drop ``dt-1`` whenever it ties with ``dt``."""
    pts = []
    for i, v in enumerate(e.dx):
        if i + 1 < len(e.dx) and e.dx[i + 1] == v:
            continue
        pts.append(PerturbationLevel(v, i))
    return pts


def raster_maximal_points(points: Iterable) -> list:
    """All points without a strict dominator in the input (quadratic scan)."""
    pts = sorted({PerturbationLevel(*p) if not isinstance(p, PerturbationLevel) else p
                  for p in points})
    return [p for p in pts if not any(q.strictly_dominates(p) for q in pts)]


def downward_closure_contains(points, level) -> bool:
    return any(p.dominates(level) for p in points)


# --------------------------------------------------------------------------
# files

def format_value(v: float) -> str:
    return "inf" if v == math.inf else repr(float(v))


def write_csv(env: Envelope, path) -> None:
    lines = ["dt,dx"] + [f"{i},{format_value(v)}" for i, v in enumerate(env.dx)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path) -> Envelope:
    path = Path(path)
    lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "dt,dx":
        raise ParseError(f"{path}:1: header must be 'dt,dx'")
    vals = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in ln.split(",")]
        try:
            dt, v = int(parts[0]), float(parts[1])
        except (ValueError, IndexError):
            raise ParseError(f"{path}:{lineno}: malformed row {ln!r}") from None
        if dt != len(vals):
            raise ParseError(f"{path}:{lineno}: expected dt={len(vals)}, got {dt}")
        vals.append(v)
    try:
        return Envelope(tuple(vals))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None


def read_csv_unchecked(path) -> list:
    """Raw ``dx`` column, without the monotonicity check (for verifying foreign files)."""
    path = Path(path)
    lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    out = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            out.append(float(ln.split(",")[1]))
        except (ValueError, IndexError):
            raise ParseError(f"{path}:{lineno}: malformed row {ln!r}") from None
    return out
