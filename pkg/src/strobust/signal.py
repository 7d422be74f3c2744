"""Discrete-time signals with per-dimension time shifts.

A :class:`Signal` is an immutable table of doubles indexed by the integer
times ``t_lo..t_hi``. Out-of-range accesses are governed by the padding
policy: ``STRICT`` raises :class:`OutOfDomain`, ``CLAMP`` holds the
boundary row.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import OutOfDomain, ParseError


class Padding(enum.Enum):
    STRICT = "strict"
    CLAMP = "clamp"


@dataclass(frozen=True, eq=False)
class Signal:
    values: np.ndarray
    t_lo: int = 0
    padding: Padding = Padding.STRICT
    t_hi: int = field(init=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2 or vals.shape[0] == 0 or vals.shape[1] == 0:
            raise ValueError("signal needs at least one row and one column")
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "t_lo", int(self.t_lo))
        object.__setattr__(self, "t_hi", self.t_lo + vals.shape[0] - 1)
        object.__setattr__(self, "padding", Padding(self.padding))

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __len__(self):
        return self.values.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.t_lo, self.t_hi + 1)

    def with_padding(self, padding) -> "Signal":
        return Signal(self.values, self.t_lo, Padding(padding))

    def in_domain(self, t) -> bool:
        return self.t_lo <= t <= self.t_hi

    def row_index(self, t):
        """Map times (scalar or array) to row indices under the padding policy."""
        idx = np.asarray(t) - self.t_lo
        if self.padding is Padding.CLAMP:
            return np.clip(idx, 0, len(self) - 1)
        if np.any(idx < 0) or np.any(idx >= len(self)):
            bad = np.asarray(t)[(idx < 0) | (idx >= len(self))]
            raise OutOfDomain(
                f"time {int(np.ravel(bad)[0])} outside [{self.t_lo};{self.t_hi}]")
        return idx

    def column(self, dim: int, t) -> np.ndarray:
        return self.values[self.row_index(t), dim]


def sample(sig: Signal, t: int) -> np.ndarray:
    return sig.values[int(sig.row_index(t))].copy()


def sample_shifted(sig: Signal, t: int, shift: Sequence[int]) -> np.ndarray:
    """Return ``[x_1(t - d_1), ..., x_n(t - d_n)]`` for the shift vector ``d``."""
    shift = np.asarray(shift, dtype=np.int64)
    if shift.shape != (sig.n,):
        raise ValueError(f"shift has length {shift.size}, signal has {sig.n} dims")
    rows = sig.row_index(t - shift)
    return sig.values[rows, np.arange(sig.n)].copy()


def load_csv(path) -> Signal:
    """Read a ``t,x1,...,xn`` trace. Times must be contiguous integers."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read signal file {path}: {exc.strerror}") from exc
    rows = list(csv.reader(text.splitlines()))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    if len(header) < 2 or header[0] != "t":
        raise ParseError(f"{path}:1: header must be 't,x1,...,xn'")
    n = len(header) - 1
    for i, name in enumerate(header[1:], start=1):
        if name != f"x{i}":
            raise ParseError(f"{path}:1: column {i + 1} should be named x{i}, got {name!r}")
    times = []
    data = np.empty((len(rows) - 1, n))
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise ParseError(f"{path}:{lineno}: expected {n + 1} fields, got {len(row)}")
        try:
            t = int(row[0].strip())
        except ValueError:
            raise ParseError(f"{path}:{lineno}: time {row[0]!r} is not an integer") from None
        try:
            vals = [float(c) for c in row[1:]]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(f"{path}:{lineno}: non-finite value")
        if times and t != times[-1] + 1:
            raise ParseError(f"{path}:{lineno}: time {t} does not follow {times[-1]}")
        times.append(t)
        data[lineno - 2] = vals
    if not times:
        raise ParseError(f"{path}: no data rows")
    return Signal(data, t_lo=times[0])


def save_csv(sig: Signal, path) -> None:
    lines = ["t," + ",".join(f"x{i + 1}" for i in range(sig.n))]
    for t, row in zip(sig.times, sig.values):
        lines.append(f"{t}," + ",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
