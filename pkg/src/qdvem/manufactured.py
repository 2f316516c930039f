"""Polynomial manufactured solution on the unit cube.

``b = x^3 y^3 z^3 (x - 1)^3 (y - 1)^3 (z - 1)^3`` and ``u = grad b``, so
``curl u = 0``, ``div u = lap b`` and the source is ``j = -lap^2 b``. Every
field vanishes with ``u . n`` and ``div u`` on the boundary of the cube.
"""

from __future__ import annotations

from dataclasses import dataclass

from .polyfield import PolyField, PolyVector, coordinate

__all__ = ["Benchmark", "build_benchmark", "eval_field", "field_degree"]


@dataclass(frozen=True)
class Benchmark:
    b: PolyField
    u: PolyVector
    div_u: PolyField
    grad_div_u: PolyVector
    j: PolyField

    def fields(self):
        return {"b": self.b, "u": self.u, "div_u": self.div_u,
                "grad_div_u": self.grad_div_u, "j": self.j}


def build_benchmark():
    """Expand ``b`` exactly and differentiate symbolically."""
    b = PolyField.constant(1)
    for axis in range(3):
        x = coordinate(axis)
        b = b * (x * (x - 1)) ** 3
    u = b.grad()
    div_u = u.div()
    grad_div_u = div_u.grad()
    j = -div_u.laplacian()
    return Benchmark(b=b, u=u, div_u=div_u, grad_div_u=grad_div_u, j=j)


def eval_field(field, points):
    """Evaluate a scalar or vector polynomial field at ``points`` (..., 3)."""
    return field(points)


def field_degree(field):
    return field.degree
