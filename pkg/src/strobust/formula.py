"""STL formulas in positive normal form and their predicate functions.

Formulas are immutable trees of frozen dataclasses. Nodes are addressed by
*paths*: tuples of child indices from the root, so that structurally equal
subtrees at different positions stay distinguishable.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from functools import partial
from typing import Callable, Iterator, Optional, Union as TUnion

import numpy as np

from .errors import ConfigError, DimensionError
from .regions import Ball, Box, Halfspace, Polytope, Region, Union, _seq_sum


# --------------------------------------------------------------------------
# intervals

@dataclass(frozen=True)
class Interval:
    a: int
    b: TUnion[int, float]

    def __post_init__(self):
        if isinstance(self.a, bool) or int(self.a) != self.a:
            raise ValueError(f"interval bound {self.a!r} is not an integer")
        object.__setattr__(self, "a", int(self.a))
        if self.b != math.inf:
            if isinstance(self.b, bool) or int(self.b) != self.b:
                raise ValueError(f"interval bound {self.b!r} is not an integer")
            object.__setattr__(self, "b", int(self.b))
        if self.a < 0 or self.a > self.b:
            raise ValueError(f"need 0 <= a <= b, got [{self.a},{self.b}]")

    @property
    def bounded(self) -> bool:
        return self.b != math.inf

    def __str__(self):
        return f"[{self.a},{'inf' if not self.bounded else self.b}]"


# --------------------------------------------------------------------------
# predicate functions

class Orientation(enum.Enum):
    AVOID = "avoid"  # h = sd(z, S): stay outside S
    REACH = "reach"  # h = -sd(z, S): stay inside S


def _dual_norm(coef, norm):
    if norm == "l2":
        return math.sqrt(sum(c * c for c in coef))
    if norm == "linf":
        return sum(abs(c) for c in coef)
    raise ConfigError(f"unknown norm {norm!r}")


@dataclass(frozen=True)
class SeparableForm:
    """Margin as a monotone function of per-column keys.

    Column ``c`` reads signal dimension ``dims[c]`` through ``keyfns[c]``;
    ``combine`` is non-decreasing in every column. Minimising the margin over
    a product of per-dimension sample sets therefore reduces to minimising
    each column separately.
    """

    dims: tuple
    keyfns: tuple
    combine: Callable

    def keys(self, Z):
        return np.column_stack([f(Z[:, d]) for d, f in zip(self.dims, self.keyfns)])

    def evaluate(self, Z):
        return self.combine(self.keys(Z))


class Predicate:
    """Base class for predicate functions ``h``; satisfied where ``h >= 0``."""

    support: tuple

    def value(self, Z) -> np.ndarray:
        raise NotImplementedError

    def separable_form(self, norm) -> Optional[SeparableForm]:
        return None

    def supports_norm(self, norm) -> bool:
        return True

    def margin(self, Z, norm) -> np.ndarray:
        form = self.separable_form(norm)
        if form is None:
            raise NotImplementedError
        return form.evaluate(Z)


@dataclass(frozen=True)
class Linear(Predicate):
    """``h(z) = coef . z + offset``."""

    coef: tuple
    offset: float = 0.0

    def __post_init__(self):
        coef = tuple(float(c) for c in self.coef)
        if not any(coef):
            raise ValueError("linear predicate needs a nonzero coefficient")
        if not all(math.isfinite(c) for c in coef) or not math.isfinite(self.offset):
            raise ValueError("linear predicate coefficients must be finite")
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def support(self):
        return tuple(i for i, c in enumerate(self.coef) if c != 0)

    def _sum(self, K):
        return _seq_sum(K) + self.offset

    def value(self, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
        return self._sum(np.column_stack([self.coef[d] * Z[:, d] for d in self.support]))

    def separable_form(self, norm):
        scale = _dual_norm([self.coef[d] for d in self.support], norm)
        keyfns = tuple(partial(np.multiply, self.coef[d]) for d in self.support)
        return SeparableForm(self.support, keyfns, lambda K: self._sum(K) / scale)


def _neg(f, v):
    return -f(v)


@dataclass(frozen=True)
class SignedDistance(Predicate):
    region: Region
    orientation: Orientation = Orientation.AVOID
    dims: Optional[tuple] = None

    def __post_init__(self):
        dims = self.dims
        if dims is None:
            dims = tuple(range(self.region.dim))
        dims = tuple(int(d) for d in dims)
        if len(dims) != self.region.dim:
            raise ValueError(
                f"region is {self.region.dim}-dimensional but {len(dims)} signal dims given")
        if len(set(dims)) != len(dims) or min(dims) < 0:
            raise ValueError("region dims must be distinct non-negative indices")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        if isinstance(self.region, Union) and self.orientation is Orientation.REACH:
            raise ValueError("unions of regions can only be avoided")

    @property
    def sign(self):
        return 1.0 if self.orientation is Orientation.AVOID else -1.0

    @property
    def support(self):
        return tuple(sorted(self.dims))

    def supports_norm(self, norm):
        return self.region.supports(norm)

    def value(self, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
        return self.sign * self.region.sd(Z[:, list(self.dims)], "l2")

    def separable_form(self, norm):
        if not self.region.separable:
            return None
        members = self.region.members()
        dims, keyfns, slices = [], [], []
        for m in members:
            start = len(dims)
            for j in range(m.dim):
                dims.append(self.dims[j])
                keyfns.append(partial(m.key, j) if self.sign > 0 else partial(_neg, partial(m.key, j)))
            slices.append((m, start, len(dims)))

        if self.sign > 0:
            def combine(K):
                out = None
                for m, lo, hi in slices:
                    v = m.combine(K[:, lo:hi], norm)
                    out = v if out is None else np.minimum(out, v)
                return out
        else:
            (m, _, _), = slices

            def combine(K):
                return -m.combine(-K, norm)

        return SeparableForm(tuple(dims), tuple(keyfns), combine)

    def margin(self, Z, norm):
        form = self.separable_form(norm)
        if form is not None:
            return form.evaluate(Z)
        Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
        return self.sign * self.region.sd(Z[:, list(self.dims)], norm)


@dataclass(frozen=True)
class Lipschitz(Predicate):
    """Black-box predicate with a caller-asserted Lipschitz constant.

    ``fn`` is vectorised: it maps an ``(m, n)`` array of states to ``m``
    values. ``lipschitz`` must bound its slope with respect to the norm used
    for monitoring.
    """

    fn: Callable
    lipschitz: float = 1.0
    support: tuple = ()
    name: str = "h"

    def __post_init__(self):
        if not self.lipschitz > 0:
            raise ValueError("Lipschitz constant must be positive")
        if not self.support:
            raise ValueError("Lipschitz predicate needs a non-empty support")
        object.__setattr__(self, "support", tuple(sorted(int(d) for d in self.support)))
        object.__setattr__(self, "lipschitz", float(self.lipschitz))

    def value(self, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
        return np.asarray(self.fn(Z), dtype=np.float64).reshape(len(Z))

    def margin(self, Z, norm):
        # the largest radius certified by h(z + d) >= h(z) - L |d|
        return self.value(Z) / self.lipschitz


def evaluate_predicate(p: Predicate, z) -> float:
    """Return ``h(z)`` for a single state vector."""
    return float(p.value(np.asarray(z, dtype=np.float64)[None, :])[0])


def spatial_margin(p: Predicate, z, cfg) -> float:
    """Largest ``dx`` such that ``h`` stays non-negative on the ``dx``-ball around ``z``.

    Negative when ``h(z) < 0``.
    """
    return float(p.margin(np.asarray(z, dtype=np.float64)[None, :], cfg.norm)[0])


# --------------------------------------------------------------------------
# formula nodes

@dataclass(frozen=True)
class TrueF:
    label: Optional[str] = None

    @property
    def children(self):
        return ()


@dataclass(frozen=True)
class Atom:
    pred: Predicate
    label: Optional[str] = None

    @property
    def children(self):
        return ()


@dataclass(frozen=True)
class And:
    args: tuple
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("conjunction needs at least two operands")

    @property
    def children(self):
        return self.args


@dataclass(frozen=True)
class Or:
    args: tuple
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("disjunction needs at least two operands")

    @property
    def children(self):
        return self.args


@dataclass(frozen=True)
class Always:
    interval: Interval
    child: object
    label: Optional[str] = None

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Eventually:
    interval: Interval
    child: object
    label: Optional[str] = None

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Until:
    interval: Interval
    left: object
    right: object
    label: Optional[str] = None

    def __post_init__(self):
        if not self.interval.bounded:
            raise ValueError("until needs a bounded interval")

    @property
    def children(self):
        return (self.left, self.right)


Formula = TUnion[TrueF, Atom, And, Or, Always, Eventually, Until]
NODE_KINDS = (TrueF, Atom, And, Or, Always, Eventually, Until)


def walk(root, path=()) -> Iterator[tuple]:
    """Yield ``(path, node)`` in pre-order."""
    yield path, root
    for i, c in enumerate(root.children):
        yield from walk(c, path + (i,))


def node_at(root, path):
    node = root
    for i in path:
        node = node.children[i]
    return node


def atoms(root):
    return [n.pred for _, n in walk(root) if isinstance(n, Atom)]


def check_formula(root, n: int, norm: str = "l2"):
    """Validate predicate dimensions and norm support against a signal."""
    for _, node in walk(root):
        if not isinstance(node, Atom):
            continue
        p = node.pred
        if max(p.support) >= n:
            raise DimensionError(
                f"predicate reads x{max(p.support) + 1} but the signal has {n} dimensions")
        if isinstance(p, Linear) and len(p.coef) != n:
            raise DimensionError(
                f"linear predicate has {len(p.coef)} coefficients for a {n}-dimensional signal")
        if not p.supports_norm(norm):
            raise ConfigError(
                f"{type(p.region).__name__} regions cannot be monitored under the {norm} norm")


# --------------------------------------------------------------------------
# pretty printing (the inverse of the parser)

def _num(v):
    return repr(float(v))


def _region_text(r):
    if isinstance(r, Box):
        return "box(" + ",".join(f"[{_num(a)},{_num(b)}]" for a, b in zip(r.lo, r.hi)) + ")"
    if isinstance(r, Ball):
        return f"ball([{','.join(_num(c) for c in r.center)}]; {_num(r.radius)})"
    if isinstance(r, Halfspace):
        return f"halfspace([{','.join(_num(c) for c in r.normal)}]; {_num(r.offset)})"
    if isinstance(r, Polytope):
        return "poly(" + ", ".join(_region_text(f) for f in r.faces) + ")"
    if isinstance(r, Union):
        return "union(" + ", ".join(_region_text(m) for m in r.regions) + ")"
    raise TypeError(f"unknown region {r!r}")


def _pred_text(p):
    if isinstance(p, Linear):
        parts = []
        for d in p.support:
            c = p.coef[d]
            if not parts:
                parts.append(f"{_num(c)}*x{d + 1}")
            elif c < 0:
                parts.append(f"- {_num(-c)}*x{d + 1}")
            else:
                parts.append(f"+ {_num(c)}*x{d + 1}")
        if p.offset < 0:
            parts.append(f"- {_num(-p.offset)}")
        elif p.offset > 0:
            parts.append(f"+ {_num(p.offset)}")
        return " ".join(parts) + " >= 0"
    if isinstance(p, SignedDistance):
        fn = "sd_out" if p.orientation is Orientation.AVOID else "sd_in"
        at = ""
        if p.dims != tuple(range(p.region.dim)):
            at = " @ " + ",".join(f"x{d + 1}" for d in p.dims)
        return f"{fn}({_region_text(p.region)}{at}) >= 0"
    if isinstance(p, Lipschitz):
        return f"<{p.name}>"
    raise TypeError(f"unknown predicate {p!r}")


def _factor(node):
    """Text that parses back as a single factor."""
    if node.label is not None:
        return f"{node.label}: {_factor(dataclasses.replace(node, label=None))}"
    if isinstance(node, TrueF):
        return "true"
    if isinstance(node, Atom):
        return f"({_pred_text(node.pred)})"
    if isinstance(node, (And, Or)):
        return f"({pretty_print(node)})"
    if isinstance(node, Always):
        return f"G{node.interval} {_factor(node.child)}"
    if isinstance(node, Eventually):
        return f"F{node.interval} {_factor(node.child)}"
    if isinstance(node, Until):
        return f"({_factor(node.left)} U{node.interval} {_factor(node.right)})"
    raise TypeError(f"unknown node {node!r}")



def pretty_print(node) -> str:
    """Canonical text form; ``parse_spec(pretty_print(f), n) == f``."""
    if node.label is None and isinstance(node, And):
        return " && ".join(_factor(c) for c in node.args)
    if node.label is None and isinstance(node, Or):
        return " || ".join(_factor(c) for c in node.args)
    return _factor(node)
