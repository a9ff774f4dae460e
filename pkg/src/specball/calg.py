"""Complex 3x3 matrix kernel.

Elementary symmetric functions of the spectrum, a Cardano cubic solver with
Newton polishing, adjugates, Krylov-based cyclicity and minimal polynomials,
similarity transport between cyclic matrices, and matrix exp/log.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

# Primitive cube root of unity.  Built from exact halves so that
# 1 + OMEGA + OMEGA2 == 0 holds without any rounding.
OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)
OMEGA2 = OMEGA.conjugate()

DEFAULT_TOL = 1e-8


class CalgError(Exception):
    """Base class for kernel failures."""


class NotCyclic(CalgError):
    """A matrix required to be cyclic is not (within tolerance)."""


class SpectraMismatch(CalgError):
    """Two matrices handed to similarity() do not share a spectrum."""


class SingularInput(CalgError):
    """Logarithm of a (numerically) singular matrix requested."""


class BranchCut(CalgError):
    """An eigenvalue sits on the principal-log branch cut (-inf, 0]."""


def as_mat3(entries) -> np.ndarray:
    """Coerce to a finite complex 3x3 ndarray."""
    M = np.asarray(entries, dtype=complex)
    if M.shape != (3, 3):
        raise ValueError(f"expected 3x3 matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


@dataclass(frozen=True)
class Cubic:
    """Coefficients of the monic cubic lambda^3 - e1*lambda^2 + e2*lambda - e3.

    The sign convention matches the elementary symmetric functions of the
    roots, so a Cubic doubles as a point of C^3 in sigma coordinates.
    """

    e1: complex
    e2: complex
    e3: complex

    def __post_init__(self):
        for name in ("e1", "e2", "e3"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"non-finite cubic coefficient {name}")
            object.__setattr__(self, name, v)

    def as_array(self) -> np.ndarray:
        return np.array([self.e1, self.e2, self.e3])


def elem_sym(M) -> Cubic:
    """Elementary symmetric functions of the eigenvalues of M.

    Computed as (trace, sum of principal 2x2 minors, determinant); no
    eigensolve is involved.
    """
    M = as_mat3(M)
    tr = M[0, 0] + M[1, 1] + M[2, 2]
    minors = (
        M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        + M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
        + M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]
    )
    det = (
        M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
        - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
        + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0])
    )
    return Cubic(tr, minors, det)


def _cubic_scale(e1, e2, e3):
    # Natural root-magnitude scale of the cubic; used for relative guards.
    return 1.0 + np.abs(e1) + np.sqrt(np.abs(e2)) + np.abs(e3) ** (1.0 / 3.0)


def _cubic_eval(roots, e1, e2, e3):
    return ((roots - e1[..., None]) * roots + e2[..., None]) * roots - e3[..., None]


def _newton_polish(roots, e1, e2, e3, passes):
    # Guarded Newton: a step is kept only when it shrinks |f|.  Near a
    # multiple root both f and f' drop into rounding noise and an unguarded
    # step can be O(1) garbage.
    f = _cubic_eval(roots, e1, e2, e3)
    for _ in range(passes):
        fp = (3.0 * roots - 2.0 * e1[..., None]) * roots + e2[..., None]
        safe = np.abs(fp) > 1e-300
        step = np.where(safe, f / np.where(safe, fp, 1.0), 0.0)
        cand = roots - step
        f_cand = _cubic_eval(cand, e1, e2, e3)
        better = np.abs(f_cand) < np.abs(f)
        roots = np.where(better, cand, roots)
        f = np.where(better, f_cand, f)
    return roots


def cubic_roots_many(e1, e2, e3) -> np.ndarray:
    """Vectorized Cardano roots of lambda^3 - e1 l^2 + e2 l - e3.

    Returns an array of shape broadcast(e1,e2,e3).shape + (3,), unsorted.
    """
    e1, e2, e3 = np.broadcast_arrays(
        np.asarray(e1, dtype=complex),
        np.asarray(e2, dtype=complex),
        np.asarray(e3, dtype=complex),
    )
    a = -e1
    p = e2 - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * e2 / 3.0 - e3
    s = np.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    u3a = -q / 2.0 + s
    u3b = -q / 2.0 - s
    u3 = np.where(np.abs(u3a) >= np.abs(u3b), u3a, u3b)
    nz = u3 != 0
    u = np.where(nz, np.exp(np.log(np.where(nz, u3, 1.0)) / 3.0), 0.0)
    un = np.abs(u) > 1e-300
    v = np.where(un, -p / (3.0 * np.where(un, u, 1.0)), 0.0)
    shift = e1 / 3.0
    roots = np.stack(
        [u + v, u * OMEGA + v * OMEGA2, u * OMEGA2 + v * OMEGA],
        axis=-1,
    ) + shift[..., None]

    # Near-triple roots: Cardano cancels catastrophically, the shifted
    # center is already correct to full precision.
    sc = _cubic_scale(e1, e2, e3)
    triple = (np.abs(p) < 1e-14 * sc * sc) & (np.abs(q) < 1e-14 * sc ** 3)
    if np.any(triple):
        roots = np.where(triple[..., None], shift[..., None], roots)

    roots = _newton_polish(roots, e1, e2, e3, passes=2)

    # Vieta check; one more polish pass if any sample is still off.
    r0, r1, r2 = roots[..., 0], roots[..., 1], roots[..., 2]
    res = np.maximum(
        np.abs(r0 + r1 + r2 - e1),
        np.maximum(
            np.abs(r0 * r1 + r1 * r2 + r2 * r0 - e2),
            np.abs(r0 * r1 * r2 - e3),
        ),
    )
    if np.any(res > 1e-11 * sc ** 3):
        roots = _newton_polish(roots, e1, e2, e3, passes=1)
    return roots


def cubic_roots(p: Cubic) -> np.ndarray:
    """Roots of the cubic, sorted by (modulus descending, phase ascending)."""
    roots = cubic_roots_many(p.e1, p.e2, p.e3)
    order = np.lexsort((np.angle(roots), -np.abs(roots)))
    return roots[order]


def max_root_modulus_many(e1, e2, e3) -> np.ndarray:
    """Largest root modulus of a batch of cubics (vectorized)."""
    return np.max(np.abs(cubic_roots_many(e1, e2, e3)), axis=-1)


def adjugate(M) -> np.ndarray:
    """Transposed cofactor matrix, so that M @ adjugate(M) = det(M) * I."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (3, 3):
        raise ValueError("adjugate needs a 3x3 matrix")
    C = np.empty((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = M[r[0], c[0]] * M[r[1], c[1]] - M[r[0], c[1]] * M[r[1], c[0]]
            C[i, j] = (-1) ** (i + j) * minor
    return C.T


def companion(p: Cubic) -> np.ndarray:
    """Companion matrix of the cubic; (1,0,0) is a cyclic vector for it."""
    return np.array(
        [[0, 0, p.e3], [1, 0, -p.e2], [0, 1, p.e1]], dtype=complex
    )


def _probe_vectors() -> np.ndarray:
    # Fixed probe set: e3 first (it is the cyclic vector for the companion
    # lift), then e1, e2, then four seeded pseudo-random vectors.  The table
    # is built once at import time.
    rng = np.random.default_rng(0x5BA11)
    rand = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    rand /= np.linalg.norm(rand, axis=1)[:, None]
    basis = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
    return np.vstack([basis, rand])


PROBES = _probe_vectors()


def _krylov(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    Mv = M @ v
    return np.column_stack([v, Mv, M @ Mv])


def _krylov_smin(K: np.ndarray) -> float:
    # Column-normalized smallest singular value: scale-free cyclicity
    # witness (raw smin would shrink like |spectrum|^2 for tiny matrices).
    norms = np.linalg.norm(K, axis=0)
    if np.any(norms < 1e-300):
        return 0.0
    return float(np.linalg.svd(K / norms, compute_uv=False)[-1])


@dataclass(frozen=True)
class CyclicityReport:
    cyclic: bool
    min_poly_degree: int
    min_poly_coeffs: tuple  # ascending, monic leading 1 omitted
    krylov_smin: float


def cyclicity(M, tol: float = DEFAULT_TOL) -> CyclicityReport:
    """Cyclic/non-cyclic dichotomy plus the minimal polynomial.

    The cyclic flag is the best Krylov witness over the fixed probe set;
    the minimal polynomial of a non-cyclic matrix is fitted by least
    squares over vec{I, M, M^2}.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = as_mat3(M)
    smin = max(_krylov_smin(_krylov(M, v)) for v in PROBES)
    cyclic = smin > tol

    if cyclic:
        p = elem_sym(M)
        return CyclicityReport(True, 3, (-p.e3, p.e2, -p.e1), smin)

    # Degree-1 candidate: M = -c0 * I.
    c0 = -np.trace(M) / 3.0
    res1 = float(np.linalg.norm(M + c0 * np.eye(3)))
    if res1 < tol:
        return CyclicityReport(False, 1, (c0,), smin)

    # Degree-2 fit: M^2 + c1 M + c0 I = 0.
    M2 = M @ M
    design = np.column_stack([M.ravel(), np.eye(3, dtype=complex).ravel()])
    sol, *_ = np.linalg.lstsq(design, -M2.ravel(), rcond=None)
    c1, c0 = sol
    return CyclicityReport(False, 2, (c0, c1), smin)


def _admissible_krylov(M: np.ndarray, tol: float) -> np.ndarray:
    for v in PROBES:
        K = _krylov(M, v)
        if _krylov_smin(K) > tol:
            return K
    raise NotCyclic("no probe vector yields a full Krylov basis")


def similarity(M, N, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Return P with P^-1 @ N @ P = M for cyclic M, N of equal spectrum.

    P is built from Krylov bases: both matrices are conjugate to the same
    companion matrix, so P = K_N @ K_M^-1.
    """
    M = as_mat3(M)
    N = as_mat3(N)
    if not cyclicity(M, tol).cyclic or not cyclicity(N, tol).cyclic:
        raise NotCyclic("similarity requires both matrices cyclic")
    dif = np.abs(elem_sym(M).as_array() - elem_sym(N).as_array())
    if np.max(dif) >= tol:
        raise SpectraMismatch(f"sigma values differ by {np.max(dif):.3e}")
    K_M = _admissible_krylov(M, tol)
    K_N = _admissible_krylov(N, tol)
    return K_N @ np.linalg.inv(K_M)


def mat_exp(S) -> np.ndarray:
    """Matrix exponential (scaling and squaring)."""
    return scipy.linalg.expm(as_mat3(S))


def mat_log(P, spectral_gap: float = 1e-6) -> np.ndarray:
    """Principal matrix logarithm.

    Eigendecomposition when the spectrum is separated by more than
    `spectral_gap`, inverse scaling-and-squaring otherwise.  Eigenvalues
    within 1e-10 of (-inf, 0] are rejected.
    """
    P = as_mat3(P)
    lam = cubic_roots(elem_sym(P))
    if np.min(np.abs(lam)) < 1e-10:
        raise SingularInput("matrix is numerically singular")
    cut = (lam.real <= 1e-10) & (np.abs(lam.imag) <= 1e-10)
    if np.any(cut):
        raise BranchCut("eigenvalue on the closed negative real axis")
    gaps = [abs(lam[i] - lam[j]) for i in range(3) for j in range(i + 1, 3)]
    if min(gaps) > spectral_gap:
        w, V = np.linalg.eig(P)
        return V @ np.diag(np.log(w)) @ np.linalg.inv(V)
    return np.asarray(scipy.linalg.logm(P), dtype=complex)


def format_complex(z) -> str:
    """Serialize a complex value as `a+bi` with round-trip precision."""
    z = complex(z)
    re = repr(float(z.real))
    if z.imag >= 0:
        return f"{re}+{repr(float(z.imag))}i"
    return f"{re}-{repr(abs(float(z.imag)))}i"


def parse_complex(text: str) -> complex:
    """Parse `a+bi`, `a-bi`, `bi`, or a plain real literal."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    try:
        z = complex(s.replace("i", "j").replace("I", "j"))
    except ValueError as exc:
        raise ValueError(f"bad complex literal {text!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite complex literal {text!r}")
    return z
