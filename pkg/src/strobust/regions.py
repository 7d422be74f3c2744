"""Regions and their signed distance functions.

Signed distances are negative strictly inside, positive strictly outside and
zero on the boundary. Two norms are supported: ``"l2"`` (Euclidean) and
``"linf"``, the latter only where a closed form exists.

Most regions are *coordinate-separable*: the signed distance can be written
as ``combine(key_1(z_1), ..., key_k(z_k))`` with ``combine`` non-decreasing
in every argument. The monitor exploits that to take minima over product sets
coordinate by coordinate, so ``sd`` is always evaluated through the same
``keys``/``combine`` pair to keep both routes bit-identical.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

NORMS = ("l2", "linf")


def _check_norm(norm):
    if norm not in NORMS:
        raise ConfigError(f"unknown norm {norm!r}; expected one of {NORMS}")


def _seq_sum(K):
    # fixed left-to-right order so results never depend on numpy's blocking
    acc = K[:, 0].copy()
    for j in range(1, K.shape[1]):
        acc = acc + K[:, j]
    return acc


def _as_points(Z, dim):
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim == 1:
        Z = Z[None, :]
    if Z.shape[1] != dim:
        raise ValueError(f"expected {dim}-dimensional points, got {Z.shape[1]}")
    return Z


class Region:
    dim: int
    separable = True

    def supports(self, norm) -> bool:
        return True

    def key(self, j, v):
        raise NotImplementedError

    def keys(self, Z):
        Z = _as_points(Z, self.dim)
        return np.column_stack([self.key(j, Z[:, j]) for j in range(self.dim)])

    def combine(self, K, norm):
        raise NotImplementedError

    def sd(self, Z, norm="l2"):
        _check_norm(norm)
        if not self.supports(norm):
            raise ConfigError(f"{type(self).__name__} has no {norm} signed distance")
        return self.combine(self.keys(Z), norm)

    def members(self):
        return (self,)


@dataclass(frozen=True)
class Box(Region):
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("box bounds must be non-empty and of equal length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("box needs lo <= hi in every dimension")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    @property
    def center(self):
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))

    def key(self, j, v):
        return np.maximum(self.lo[j] - v, v - self.hi[j])

    def combine(self, K, norm):
        gmax = K.max(axis=1)
        if norm == "linf":
            return gmax
        pos = np.maximum(K, 0.0)
        outside = np.sqrt(_seq_sum(pos * pos))
        return np.where(gmax > 0, outside, gmax)


@dataclass(frozen=True)
class Ball(Region):
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.center:
            raise ValueError("ball center must be non-empty")
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self):
        return len(self.center)

    def supports(self, norm):
        return norm == "l2"

    def key(self, j, v):
        d = v - self.center[j]
        return d * d

    def combine(self, K, norm):
        if norm != "l2":
            raise ConfigError("ball regions only have a Euclidean signed distance")
        return np.sqrt(_seq_sum(K)) - self.radius


@dataclass(frozen=True)
class Halfspace(Region):
    """The set ``{z : normal . z <= offset}``."""

    normal: tuple
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(float(v) for v in self.normal))
        object.__setattr__(self, "offset", float(self.offset))
        if not self.normal or not any(self.normal):
            raise ValueError("halfspace normal must be non-zero")

    @property
    def dim(self):
        return len(self.normal)

    def key(self, j, v):
        return self.normal[j] * v

    def scale(self, norm):
        # distance to the hyperplane measured in `norm` divides by the dual norm
        if norm == "l2":
            return math.sqrt(sum(c * c for c in self.normal))
        return sum(abs(c) for c in self.normal)

    def combine(self, K, norm):
        return (_seq_sum(K) - self.offset) / self.scale(norm)


@dataclass(frozen=True)
class Polytope(Region):
    """Intersection of halfspaces; assumed non-empty."""

    faces: tuple

    separable = False

    def __post_init__(self):
        faces = tuple(self.faces)
        if not faces:
            raise ValueError("polytope needs at least one face")
        dims = {f.dim for f in faces}
        if len(dims) != 1:
            raise ValueError("polytope faces must share a dimension")
        object.__setattr__(self, "faces", faces)

    @property
    def dim(self):
        return self.faces[0].dim

    def supports(self, norm):
        return norm == "l2"

    def sd(self, Z, norm="l2"):
        _check_norm(norm)
        if norm != "l2":
            raise ConfigError("polytope regions only have a Euclidean signed distance")
        Z = _as_points(Z, self.dim)
        A = np.array([f.normal for f in self.faces])
        b = np.array([f.offset for f in self.faces])
        scale = np.sqrt((A * A).sum(axis=1))
        s = (Z @ A.T - b) / scale
        smax = s.max(axis=1)
        out = smax.copy()
        outside = smax > 0
        if outside.any():
            out[outside] = self._outside_distance(Z[outside], A, b)
        return out

    @staticmethod
    def _outside_distance(Z, A, b):
        # exact Euclidean projection by enumerating candidate active sets;
        # the projection is the KKT point with non-negative multipliers
        best = np.full(len(Z), math.inf)
        m, k = A.shape
        tol = 1e-9 * (1.0 + np.abs(b).max() + np.abs(Z).max(axis=1))
        for size in range(1, min(k, m) + 1):
            for act in itertools.combinations(range(m), size):
                As = A[list(act)]
                G = As @ As.T
                if abs(np.linalg.det(G)) < 1e-12:
                    continue
                lam = np.linalg.solve(G, As @ Z.T - b[list(act), None])
                P = Z - lam.T @ As
                ok = (lam >= -tol).all(axis=0) & (P @ A.T <= b + tol[:, None]).all(axis=1)
                dist = np.sqrt(((Z - P) ** 2).sum(axis=1))
                best = np.where(ok, np.minimum(best, dist), best)
        if not np.isfinite(best).all():
            raise ValueError("polytope appears empty")
        return best


@dataclass(frozen=True)
class Union(Region):
    regions: tuple

    def __post_init__(self):
        regions = tuple(self.regions)
        if len(regions) < 1:
            raise ValueError("union needs members")
        if len({r.dim for r in regions}) != 1:
            raise ValueError("union members must share a dimension")
        if any(isinstance(r, Union) for r in regions):
            raise ValueError("nested unions are not supported; flatten them")
        object.__setattr__(self, "regions", regions)

    @property
    def dim(self):
        return self.regions[0].dim

    @property
    def separable(self):
        return all(r.separable for r in self.regions)

    def supports(self, norm):
        return all(r.supports(norm) for r in self.regions)

    def members(self):
        return self.regions

    def sd(self, Z, norm="l2"):
        # exact outside the union, an under-estimate of the depth inside it
        vals = [r.sd(Z, norm) for r in self.regions]
        out = vals[0]
        for v in vals[1:]:
            out = np.minimum(out, v)
        return out
