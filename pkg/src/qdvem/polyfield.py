"""Exact multivariate polynomials in global coordinates.

Coefficients are kept as :class:`fractions.Fraction` so that differentiation
and the vector-calculus identities hold exactly. Evaluation converts to
floating point once and groups terms so that large point batches are cheap.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

__all__ = ["PolyField", "PolyVector", "coordinate"]


def _frac(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    return Fraction(float(c)) if isinstance(c, np.floating) else Fraction(c)


class PolyField:
    """Scalar polynomial ``sum_a c_a x^a0 y^a1 z^a2``.

    Parameters
    ----------
    terms : dict
        Mapping from exponent triples to coefficients. Zero coefficients are
        dropped.
    """

    def __init__(self, terms=None):
        clean = {}
        for exps, c in (terms or {}).items():
            c = _frac(c)
            if c != 0:
                key = tuple(int(e) for e in exps)
                if len(key) != 3 or min(key) < 0:
                    raise ValueError(f"bad exponent tuple {exps!r}")
                clean[key] = clean.get(key, 0) + c
        self.terms = {k: v for k, v in clean.items() if v != 0}

    @classmethod
    def constant(cls, c):
        return cls({(0, 0, 0): c})

    # algebra -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, PolyField):
            other = PolyField.constant(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PolyField(out)

    __radd__ = __add__

    def __neg__(self):
        return PolyField({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, PolyField) else -_frac(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolyField):
            c = _frac(other)
            return PolyField({k: v * c for k, v in self.terms.items()})
        out = {}
        for (a, ca), (b, cb) in product(self.terms.items(), other.terms.items()):
            k = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
            out[k] = out.get(k, 0) + ca * cb
        return PolyField(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = PolyField.constant(1)
        for _ in range(int(n)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, PolyField):
            other = PolyField.constant(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"PolyField(degree={self.degree}, nterms={len(self.terms)})"

    @property
    def degree(self):
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(k) for k in self.terms), default=-1)

    def is_zero(self):
        return not self.terms

    # calculus ------------------------------------------------------------

    def diff(self, axis):
        out = {}
        for k, c in self.terms.items():
            if k[axis] == 0:
                continue
            kk = list(k)
            kk[axis] -= 1
            out[tuple(kk)] = c * k[axis]
        return PolyField(out)

    def antiderivative(self, axis):
        out = {}
        for k, c in self.terms.items():
            kk = list(k)
            kk[axis] += 1
            out[tuple(kk)] = c / kk[axis]
        return PolyField(out)

    def grad(self):
        return PolyVector(self.diff(0), self.diff(1), self.diff(2))

    def laplacian(self):
        return self.diff(0).diff(0) + self.diff(1).diff(1) + self.diff(2).diff(2)

    # evaluation ----------------------------------------------------------

    @cached_property
    def _tables(self):
        if not self.terms:
            return None
        exps = np.array(list(self.terms), dtype=int)
        coefs = np.array([float(c) for c in self.terms.values()])
        deg = int(exps.max())
        # f = sum_k P_k(x) y^b_k z^c_k over the distinct (y, z) exponent pairs;
        # one-hot matrices turn the y and z gathers into small matmuls
        yz, col = np.unique(exps[:, 1:], axis=0, return_inverse=True)
        cols = np.arange(len(yz))
        mat = np.zeros((len(yz), deg + 1))
        np.add.at(mat, (col.ravel(), exps[:, 0]), coefs)
        ey = np.zeros((len(yz), deg + 1))
        ey[cols, yz[:, 0]] = 1.0
        ez = np.zeros((len(yz), deg + 1))
        ez[cols, yz[:, 1]] = 1.0
        return deg, mat, ey, ez

    def __call__(self, points):
        """Evaluate at ``points`` of shape ``(..., 3)``."""
        pts = np.asarray(points, dtype=float)
        shape = pts.shape[:-1]
        pts = pts.reshape(-1, 3)
        if self._tables is None:
            return np.zeros(shape)
        deg, mat, ey, ez = self._tables
        out = np.empty(len(pts))
        chunk = 10_000
        for s in range(0, len(pts), chunk):
            pT = pts[s:s + chunk].T
            pw = np.empty((3, deg + 1, pT.shape[1]))
            pw[:, 0] = 1.0
            for k in range(1, deg + 1):
                np.multiply(pw[:, k - 1], pT, out=pw[:, k])
            w = mat @ pw[0]
            w *= ey @ pw[1]
            w *= ez @ pw[2]
            out[s:s + chunk] = w.sum(axis=0)
        return out.reshape(shape)


class PolyVector:
    """Three-component polynomial vector field."""

    def __init__(self, *components):
        if len(components) == 1:
            components = tuple(components[0])
        if len(components) != 3:
            raise ValueError("a PolyVector has exactly three components")
        self.components = tuple(
            c if isinstance(c, PolyField) else PolyField.constant(c) for c in components
        )

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other):
        return PolyVector(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        return PolyVector(*(a - b for a, b in zip(self, other)))

    def __mul__(self, c):
        return PolyVector(*(a * c for a in self))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PolyVector) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"PolyVector(degree={self.degree})"

    @property
    def degree(self):
        return max(c.degree for c in self)

    def is_zero(self):
        return all(c.is_zero() for c in self)

    def div(self):
        return self[0].diff(0) + self[1].diff(1) + self[2].diff(2)

    def curl(self):
        u, v, w = self
        return PolyVector(w.diff(1) - v.diff(2), u.diff(2) - w.diff(0), v.diff(0) - u.diff(1))

    def dot(self, other):
        return self[0] * other[0] + self[1] * other[1] + self[2] * other[2]

    def __call__(self, points):
        return np.stack([c(points) for c in self], axis=-1)


def coordinate(axis):
    """The linear polynomial ``x``, ``y`` or ``z``."""
    e = [0, 0, 0]
    e[axis] = 1
    return PolyField({tuple(e): 1})
