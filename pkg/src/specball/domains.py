"""Geometry of the symmetrized three-disc G3 and the spectral balls.

G3 is the open unit sublevel set of the Minkowski functional h_g3 (the
largest root modulus of the associated monic cubic); Omega3 is the set of
3x3 matrices with spectrum inside the unit disc, Omega3Traceless its
traceless slice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calg import Cubic, as_mat3, cubic_roots, elem_sym, max_root_modulus_many

# A point of C^3 in sigma coordinates is the same object as a monic cubic;
# keeping one representation removes sigma_2 sign bugs.
SpecPoint = Cubic

TRACE_TOL = 1e-12


@dataclass(frozen=True)
class MembershipVerdict:
    inside: bool
    margin: float


def h_g3(z: SpecPoint) -> float:
    """Minkowski functional of G3: max root modulus of the cubic at z."""
    return float(np.max(np.abs(cubic_roots(z))))


def h_g3_many(z1, z2, z3) -> np.ndarray:
    """Vectorized h_g3 over coefficient arrays."""
    return max_root_modulus_many(z1, z2, z3)


def weighted_scale(z: SpecPoint, t: complex) -> SpecPoint:
    """(1,2,3)-weighted scaling (z1, z2, z3) -> (t z1, t^2 z2, t^3 z3)."""
    t = complex(t)
    return Cubic(t * z.e1, t * t * z.e2, t ** 3 * z.e3)


def membership(x, which: str = "Omega3") -> MembershipVerdict:
    """Strict membership in G3 / Omega3 / Omega3Traceless with margin 1 - h.

    G3 takes a SpecPoint, the spectral balls take a 3x3 matrix.  For the
    traceless slice a trace above 1e-12 yields inside=False with margin
    -|trace| so that inside <=> margin > 0 still holds.
    """
    if which == "G3":
        if not isinstance(x, Cubic):
            raise TypeError("G3 membership needs a SpecPoint")
        h = h_g3(x)
        return MembershipVerdict(h < 1.0, 1.0 - h)
    if which not in ("Omega3", "Omega3Traceless"):
        raise ValueError(f"unknown domain {which!r}")
    M = as_mat3(x)
    sig = elem_sym(M)
    h = h_g3(sig)
    if which == "Omega3Traceless" and abs(sig.e1) >= TRACE_TOL:
        return MembershipVerdict(False, -abs(sig.e1))
    return MembershipVerdict(h < 1.0, 1.0 - h)
