"""Analytic discs into G3 and their lifts into the spectral ball.

Polynomial disc maps, the explicit weighted-scaling disc, the companion
lift and its conjugated full lift, boundary admissibility by circle
sampling, Lempert upper bounds, the endpoint-derivative certificate
residual, and a penalty-constrained derivative-free disc optimizer.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.optimize

from .calg import (
    BranchCut,
    Cubic,
    NotCyclic,
    as_mat3,
    cyclicity,
    elem_sym,
    format_complex,
    mat_exp,
    mat_log,
    max_root_modulus_many,
    similarity,
)
from .domains import h_g3

D_MAX_DEFAULT = 6
FLAT_TOL = 1e-14


class DiscError(Exception):
    """Base class for disc-level failures."""


class Phi3NotFlat(DiscError):
    """phi_3 does not vanish to second order at 0."""


class EndpointMismatch(DiscError):
    """phi(alpha) does not match the requested sigma value."""


class ThetaFormViolated(DiscError):
    """The disc cannot be written in theta-factored form."""


class NoFeasiblePoint(DiscError):
    """The optimizer found no admissible disc within its budget."""


class NotAdmissible(DiscError):
    """A candidate disc violates boundary or radius admissibility."""


def _horner(coeffs: np.ndarray, zeta):
    acc = np.zeros_like(np.asarray(zeta, dtype=complex))
    for c in coeffs[::-1]:
        acc = acc * zeta + c
    return acc


class PolyMap3:
    """Polynomial analytic disc C -> C^3, coefficients in ascending degree."""

    __slots__ = ("c1", "c2", "c3")

    def __init__(self, c1, c2, c3, max_degree: int = D_MAX_DEFAULT):
        cs = []
        for c in (c1, c2, c3):
            arr = np.atleast_1d(np.asarray(c, dtype=complex))
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError("coefficient arrays must be 1-d and non-empty")
            if arr.size - 1 > max_degree:
                raise ValueError(f"degree {arr.size - 1} exceeds cap {max_degree}")
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite coefficient")
            cs.append(arr.copy())
        self.c1, self.c2, self.c3 = cs

    @property
    def degree(self) -> int:
        return max(c.size - 1 for c in (self.c1, self.c2, self.c3))

    def __call__(self, zeta) -> Cubic:
        z = complex(zeta)
        return Cubic(
            complex(_horner(self.c1, z)),
            complex(_horner(self.c2, z)),
            complex(_horner(self.c3, z)),
        )

    def eval_many(self, zetas) -> np.ndarray:
        z = np.asarray(zetas, dtype=complex)
        return np.stack(
            [_horner(self.c1, z), _horner(self.c2, z), _horner(self.c3, z)],
            axis=-1,
        )

    def rescaled(self, rho: float) -> "PolyMap3":
        """Precompose with zeta -> rho*zeta."""
        pw1 = rho ** np.arange(self.c1.size)
        pw2 = rho ** np.arange(self.c2.size)
        pw3 = rho ** np.arange(self.c3.size)
        return PolyMap3(self.c1 * pw1, self.c2 * pw2, self.c3 * pw3)

    def to_json(self) -> str:
        def pairs(c):
            return [[float(v.real), float(v.imag)] for v in c]

        return json.dumps(
            {"c1": pairs(self.c1), "c2": pairs(self.c2), "c3": pairs(self.c3)}
        )

    @classmethod
    def from_json(cls, text: str) -> "PolyMap3":
        obj = json.loads(text)
        return cls(
            *[
                np.array([complex(re, im) for re, im in obj[key]])
                for key in ("c1", "c2", "c3")
            ]
        )


@dataclass(frozen=True)
class DiscCertificate:
    alpha: complex
    endpoint_residual: float
    phi3_deriv0_residual: float
    relation3_residual: Optional[float]
    boundary_sup: float
    admissible: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": format_complex(self.alpha),
                "endpoint_residual": self.endpoint_residual,
                "phi3_deriv0_residual": self.phi3_deriv0_residual,
                "relation3_residual": self.relation3_residual,
                "boundary_sup": self.boundary_sup,
                "admissible": self.admissible,
            }
        )


def paper_disc(target: Cubic) -> tuple[PolyMap3, float]:
    """The explicit weighted disc through 0 and the target.

    phi(zeta) = (zeta a/r, zeta b/r, zeta^2 c/r^2) with
    r = max(3|a|, 3|b|, sqrt(3|c|)); phi(r) = target and phi_3 is flat at 0.
    """
    a, b, c = target.e1, target.e2, target.e3
    r = max(3 * abs(a), 3 * abs(b), math.sqrt(3 * abs(c)))
    if r == 0.0:
        return PolyMap3([0.0], [0.0], [0.0]), 0.0
    return PolyMap3([0.0, a / r], [0.0, b / r], [0.0, 0.0, c / r ** 2]), r


class TildeLift:
    """Companion-form matrix disc with sigma(psi_tilde(zeta)) = phi(zeta).

    Rows are (0, zeta, 0), (0, 0, 1), (phi3/zeta, -phi2, phi1); requires
    phi3 to vanish to second order so psi_tilde(0) equals the base matrix A.
    """

    __slots__ = ("phi", "_p3_over_zeta")

    def __init__(self, phi: PolyMap3):
        c3 = phi.c3
        lin = c3[1] if c3.size > 1 else 0.0
        if abs(c3[0]) > FLAT_TOL or abs(lin) > FLAT_TOL:
            raise Phi3NotFlat("phi_3 must vanish to second order at 0")
        self.phi = phi
        q = c3[1:].copy() if c3.size > 1 else np.zeros(1, dtype=complex)
        q[0] = 0.0  # below FLAT_TOL; zeroed so psi_tilde(0) = A exactly
        self._p3_over_zeta = q

    def __call__(self, zeta) -> np.ndarray:
        z = complex(zeta)
        p1 = complex(_horner(self.phi.c1, z))
        p2 = complex(_horner(self.phi.c2, z))
        p3z = complex(_horner(self._p3_over_zeta, z))
        return np.array(
            [[0.0, z, 0.0], [0.0, 0.0, 1.0], [p3z, -p2, p1]], dtype=complex
        )


def tilde_lift(phi: PolyMap3) -> TildeLift:
    return TildeLift(phi)


@dataclass
class LiftedDisc:
    """Conjugated companion lift psi(zeta) = e^{-zeta S/a} psi~(zeta) e^{zeta S/a}."""

    base: PolyMap3
    alpha: complex
    conjugator_log: np.ndarray
    target: np.ndarray

    def __call__(self, zeta) -> np.ndarray:
        z = complex(zeta) / self.alpha
        S = self.conjugator_log
        return mat_exp(-z * S) @ TildeLift(self.base)(zeta) @ mat_exp(z * S)


def _log_with_phase_retry(P: np.ndarray) -> np.ndarray:
    # log(e^{i theta} P) differs from log(P) by a scalar multiple of I,
    # which drops out of every conjugation; rotate off the branch cut.
    for theta in (0.0, 0.41, 0.83, 1.27, 2.11, 2.71):
        try:
            return mat_log(P * cmath.exp(1j * theta))
        except BranchCut:
            continue
    raise BranchCut("no phase rotation moved the spectrum off the cut")


def full_lift(phi: PolyMap3, alpha: complex, M, tol: float = 1e-8) -> LiftedDisc:
    """Lift phi to a matrix disc through A at 0 and the cyclic M at alpha."""
    M = as_mat3(M)
    alpha = complex(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    if not cyclicity(M).cyclic:
        raise NotCyclic("full_lift requires a cyclic target matrix")
    gap = np.max(np.abs(phi(alpha).as_array() - elem_sym(M).as_array()))
    if gap >= tol:
        raise EndpointMismatch(f"phi(alpha) misses sigma(M) by {gap:.3e}")
    tl = TildeLift(phi)
    P = similarity(M, tl(alpha))
    det = np.linalg.det(P)
    if det != 0:
        # Scalar factors drop out of the conjugation; det-normalizing
        # keeps the logarithm small.
        P = P / det ** (1.0 / 3.0)
    S = _log_with_phase_retry(P)
    return LiftedDisc(phi, alpha, S, M)


def boundary_margin(phi: PolyMap3, samples: int = 256) -> float:
    """sup of h_g3 over the circle grid zeta = exp(2 pi i k / samples).

    For polynomial phi the maximum principle makes this (up to grid
    resolution) the interior sup as well.
    """
    if samples < 64:
        raise ValueError("samples must be at least 64")
    grid = np.exp(2j * np.pi * np.arange(samples) / samples)
    vals = phi.eval_many(grid)
    return float(np.max(max_root_modulus_many(vals[:, 0], vals[:, 1], vals[:, 2])))


def rescale_disc(phi: PolyMap3, rho: float) -> PolyMap3:
    """Precompose with zeta -> rho*zeta; shrinks the boundary sup."""
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    return phi.rescaled(rho)


def lempert_upper(M, samples: int = 256) -> tuple[float, DiscCertificate]:
    """Certified Lempert upper bound l(A, M) <= r from the explicit disc."""
    M = as_mat3(M)
    if not cyclicity(M).cyclic:
        raise NotCyclic("lempert_upper requires a cyclic matrix")
    target = elem_sym(M)
    phi, r = paper_disc(target)
    if r == 0.0:
        cert = DiscCertificate(0.0, 0.0, 0.0, None, 0.0, True)
        return 0.0, cert
    bsup = boundary_margin(phi, samples)
    if r >= 1.0 or bsup >= 1.0:
        raise NotAdmissible(f"r={r:.6g}, boundary sup={bsup:.6g}")
    endpoint = float(np.max(np.abs(phi(r).as_array() - target.as_array())))
    cert = DiscCertificate(r, endpoint, 0.0, None, bsup, True)
    return r, cert


def _theta_derivs(phi: PolyMap3, alpha: complex):
    # theta_1 = phi1/zeta, theta_2 = phi2/zeta, theta_3 = phi3/zeta^2;
    # derivatives evaluated exactly from the coefficients.
    c1, c2, c3 = phi.c1, phi.c2, phi.c3
    if abs(c1[0]) > FLAT_TOL or abs(c2[0]) > FLAT_TOL:
        raise ThetaFormViolated("phi_1, phi_2 must vanish at 0")
    lin3 = c3[1] if c3.size > 1 else 0.0
    if abs(c3[0]) > FLAT_TOL or abs(lin3) > FLAT_TOL:
        raise ThetaFormViolated("phi_3 must vanish to second order at 0")
    th1p = sum((k - 1) * c1[k] * alpha ** (k - 2) for k in range(2, c1.size))
    th2p = sum((k - 1) * c2[k] * alpha ** (k - 2) for k in range(2, c2.size))
    th3p = sum((k - 2) * c3[k] * alpha ** (k - 3) for k in range(3, c3.size))
    return th1p, th2p, th3p


def relation3_residual(phi: PolyMap3, alpha: complex, t: complex) -> float:
    """|t^3 - a^2 (a th3'(a) - t th2'(a) + t^2 th1'(a))| at a = alpha."""
    alpha = complex(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    t = complex(t)
    th1p, th2p, th3p = _theta_derivs(phi, alpha)
    return abs(t ** 3 - alpha ** 2 * (alpha * th3p - t * th2p + t * t * th1p))


def optimize_disc(
    target: Cubic,
    degree: int = 3,
    phi3_flat: bool = True,
    relation3_t: Optional[complex] = None,
    seed: int = 42,
    budget: int = 2000,
    restarts: int = 8,
    samples: int = 256,
    eps_b: float = 1e-3,
) -> tuple[DiscCertificate, PolyMap3]:
    """Minimize |alpha| over polynomial discs hitting the target.

    Interpolation constraints (phi(0)=0, phi(alpha)=target, optional
    flatness of phi_3 and the endpoint-derivative relation at t) are
    eliminated by solving top coefficients; boundary feasibility enters as
    a penalty with safety margin eps_b.  Deterministic for fixed seed and
    budget; the search keeps alpha real positive (rotations of the disc
    variable lose no generality).
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if not 1 <= degree <= D_MAX_DEFAULT:
        raise ValueError(f"degree must be in 1..{D_MAX_DEFAULT}")
    if relation3_t is not None:
        if not phi3_flat:
            raise ValueError("relation3 needs the theta form (phi3_flat)")
        if degree < 3:
            raise ValueError("relation3 needs degree >= 3")
        if relation3_t == 0:
            raise ValueError("relation3 t must be nonzero")
    if phi3_flat and degree < 2:
        raise ValueError("flat phi_3 needs degree >= 2")

    a, b, c = target.e1, target.e2, target.e3
    if h_g3(target) >= 1.0:
        raise NoFeasiblePoint("target outside the closure of G3")
    if a == 0 and b == 0 and c == 0:
        cert = DiscCertificate(0.0, 0.0, 0.0, None, 0.0, True)
        return cert, PolyMap3([0.0], [0.0], [0.0])

    t = complex(relation3_t) if relation3_t is not None else None
    start3 = 2 if phi3_flat else 1
    free1 = list(range(1, degree))
    free2 = list(range(1, degree))
    if t is not None:
        free3 = list(range(start3, degree - 1))
    else:
        free3 = list(range(start3, degree))
    nfree = len(free1) + len(free2) + len(free3)
    d = degree

    def build(x):
        alpha = abs(float(x[0]))
        if alpha < 1e-12 or alpha >= 1.0:
            return None
        fr = x[1::2] + 1j * x[2::2]
        i = 0
        c1 = np.zeros(d + 1, dtype=complex)
        for k in free1:
            c1[k] = fr[i]
            i += 1
        c2 = np.zeros(d + 1, dtype=complex)
        for k in free2:
            c2[k] = fr[i]
            i += 1
        c3 = np.zeros(d + 1, dtype=complex)
        for k in free3:
            c3[k] = fr[i]
            i += 1
        pw = alpha ** np.arange(d + 1)
        c1[d] = (a - c1 @ pw) / pw[d]
        c2[d] = (b - c2 @ pw) / pw[d]
        if t is None:
            c3[d] = (c - c3 @ pw) / pw[d]
        else:
            # Endpoint plus the derivative relation: two linear equations
            # for the top two coefficients of phi_3.
            th1p = sum((k - 1) * c1[k] * alpha ** (k - 2) for k in range(2, d + 1))
            th2p = sum((k - 1) * c2[k] * alpha ** (k - 2) for k in range(2, d + 1))
            r_e = c - c3 @ pw
            r_r = t ** 3 + alpha ** 2 * t * th2p - alpha ** 2 * t * t * th1p
            r_r -= sum((k - 2) * alpha ** k * c3[k] for k in range(3, d - 1))
            a2 = r_r - (d - 3) * r_e
            a1 = (d - 2) * r_e - r_r
            c3[d - 1] = a1 / pw[d - 1]
            c3[d] = a2 / pw[d]
        return PolyMap3(c1, c2, c3), alpha

    grid = np.exp(2j * np.pi * np.arange(samples) / samples)
    best = {"alpha": math.inf, "phi": None}

    def objective(x):
        built = build(x)
        if built is None:
            return 10.0 + abs(float(x[0]))
        phi, alpha = built
        vals = phi.eval_many(grid)
        bsup = float(np.max(max_root_modulus_many(vals[:, 0], vals[:, 1], vals[:, 2])))
        pen = max(0.0, bsup - (1.0 - eps_b))
        if pen == 0.0 and alpha < best["alpha"]:
            best["alpha"] = alpha
            best["phi"] = phi
        return alpha + 100.0 * pen * pen

    def make_seed(alpha0, use_paper):
        x = np.zeros(1 + 2 * nfree)
        x[0] = alpha0
        idx = {}
        i = 0
        for comp, ks in ((1, free1), (2, free2), (3, free3)):
            for k in ks:
                idx[(comp, k)] = i
                i += 1

        def put(comp, k, val):
            if (comp, k) in idx:
                j = idx[(comp, k)]
                x[1 + 2 * j] = val.real
                x[2 + 2 * j] = val.imag

        if use_paper and r_p > 0:
            put(1, 1, a / r_p)
            put(2, 1, b / r_p)
            put(3, 2, c / r_p ** 2)
        else:
            # Linear interpolation seed: lowest-order coefficient carries
            # the whole endpoint for components 1 and 2.
            put(1, 1, a / alpha0)
            put(2, 1, b / alpha0)
        return x

    phi_p, r_p = paper_disc(target)
    seeds = []
    if t is not None:
        for fac in (1.05, 1.2, 1.5):
            seeds.append(make_seed(fac * abs(t), use_paper=False))
    if 0.0 < r_p < 1.0:
        seeds.append(make_seed(r_p, use_paper=True))
    if not seeds:
        seeds.append(make_seed(0.5, use_paper=False))

    rng = np.random.default_rng(seed)
    per_restart = max(1, budget // restarts)
    for i in range(restarts):
        x0 = seeds[i % len(seeds)].copy()
        if i >= len(seeds):
            x0[0] *= 1.0 + 0.3 * rng.uniform(-1.0, 1.0)
            x0[1:] += 0.1 * rng.standard_normal(x0.size - 1)
        scipy.optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": per_restart,
                "xatol": 1e-10,
                "fatol": 1e-12,
                "adaptive": True,
            },
        )

    if best["phi"] is None:
        raise NoFeasiblePoint("no admissible disc within the budget")

    phi, alpha = best["phi"], best["alpha"]
    # Verification pass at higher resolution; rescaling preserves every
    # eliminated constraint (endpoint moves to alpha/rho, relation is
    # invariant under simultaneous rescale).
    b1024 = boundary_margin(phi, 1024)
    for _ in range(200):
        if b1024 < 1.0:
            break
        phi = phi.rescaled(1.0 - 1e-4)
        alpha /= 1.0 - 1e-4
        b1024 = boundary_margin(phi, 1024)

    endpoint = float(np.max(np.abs(phi(alpha).as_array() - target.as_array())))
    lin3 = phi.c3[1] if phi.c3.size > 1 else 0.0
    flat_res = float(abs(phi.c3[0]) + abs(lin3)) if phi3_flat else 0.0
    rel = relation3_residual(phi, alpha, t) if t is not None else None
    admissible = endpoint < 1e-8 and flat_res < 1e-10 and b1024 < 1.0
    cert = DiscCertificate(alpha, endpoint, flat_res, rel, b1024, admissible)
    return cert, phi
