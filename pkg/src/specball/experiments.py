"""Reproduction pipelines.

Ratio-to-zero runs for the non-cyclic perturbation regime, the degree-two
minimal-polynomial asymptotics, the ratio-to-one runs driven by the
exceptional family A + t*B_t, and the root-location limit certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .calg import (
    OMEGA,
    OMEGA2,
    Cubic,
    as_mat3,
    cubic_roots,
    cyclicity,
    elem_sym,
)
from .discs import (
    DiscCertificate,
    NoFeasiblePoint,
    NotAdmissible,
    NotCyclic,
    PolyMap3,
    lempert_upper,
    optimize_disc,
    relation3_residual,
)
from .domains import membership


class ExperimentError(Exception):
    pass


class ZeroT(ExperimentError):
    """A scaled quantity was requested at t = 0."""


class NotDegreeTwo(ExperimentError):
    """The degree-2 annihilating-polynomial fit did not close."""


@dataclass(frozen=True)
class PaperMatrices:
    """The fixed matrices of the construction.

    A is nilpotent of square zero; B(t) is lower triangular with diagonal
    (1, omega, omega^2) and (3,2) entry 3t, so it is traceless; D(t) is
    diag(t, t, -2t), similar to A + t*B(t) for t != 0.
    """

    A: np.ndarray
    omega: complex

    def B(self, t: complex = 0.0) -> np.ndarray:
        return np.array(
            [[1.0, 0, 0], [0, OMEGA, 0], [0, 3.0 * t, OMEGA2]], dtype=complex
        )

    def D(self, t: complex) -> np.ndarray:
        return np.diag(np.array([t, t, -2.0 * t], dtype=complex))


def paper_matrices() -> PaperMatrices:
    A = np.zeros((3, 3), dtype=complex)
    A[1, 2] = 1.0
    return PaperMatrices(A=A, omega=OMEGA)


def sigma_expansion(C, t: complex) -> tuple[complex, complex, complex]:
    """(sigma_1/t, sigma_2/t, sigma_3/t^2) of A + t*C."""
    t = complex(t)
    if t == 0:
        raise ZeroT("sigma expansion needs t != 0")
    C = as_mat3(C)
    s = elem_sym(paper_matrices().A + t * C)
    return s.e1 / t, s.e2 / t, s.e3 / (t * t)


def _sigma_expansion_closed_form(C, t: complex):
    # f1 = tr C; f2 = -c32 + t * (principal 2x2 minors of C);
    # f3 = -(c11 c32 - c12 c31) + t * det C.  Used as an oracle in tests.
    C = as_mat3(C)
    t = complex(t)
    minors = (
        C[0, 0] * C[1, 1] - C[0, 1] * C[1, 0]
        + C[0, 0] * C[2, 2] - C[0, 2] * C[2, 0]
        + C[1, 1] * C[2, 2] - C[1, 2] * C[2, 1]
    )
    det = elem_sym(C).e3
    f1 = C[0, 0] + C[1, 1] + C[2, 2]
    f2 = -C[2, 1] + t * minors
    f3 = -(C[0, 0] * C[2, 1] - C[0, 1] * C[2, 0]) + t * det
    return f1, f2, f3


def step1_asymptotics(t: complex) -> tuple[complex, complex]:
    """Normalized degree-2 annihilator coefficients of A + t*B_t.

    Fits M^2 + x M + y I = 0 by least squares and returns (x/t, y/t^2);
    the family is exactly non-cyclic for 0 < |t| < 1/2 and the normalized
    coefficients are (1, -2).
    """
    t = complex(t)
    if t == 0:
        raise ZeroT("asymptotics need t != 0")
    if abs(t) >= 0.5:
        raise ValueError("need |t| < 1/2 so that A + t*B_t stays in Omega3")
    pm = paper_matrices()
    M = pm.A + t * pm.B(t)
    M2 = M @ M
    design = np.column_stack([M.ravel(), np.eye(3, dtype=complex).ravel()])
    sol, *_ = np.linalg.lstsq(design, -M2.ravel(), rcond=None)
    res = float(np.linalg.norm(design @ sol + M2.ravel()))
    if res > 1e-8 * (1.0 + float(np.linalg.norm(M2))):
        raise NotDegreeTwo(f"degree-2 fit residual {res:.3e}")
    x, y = sol
    return x / t, y / (t * t)


@dataclass(frozen=True)
class PropBRow:
    j: int
    t: complex
    c32_over_t_gap: float
    cyclic: bool
    f1: complex
    f2: complex
    f3: complex
    ratio: float  # nan when the row is flagged (non-cyclic or inadmissible)


PerturbationSpec = Union[str, Callable[[int, complex], np.ndarray]]


def _perturbation(spec: PerturbationSpec) -> Callable[[int, complex], np.ndarray]:
    pm = paper_matrices()
    if callable(spec):
        return spec
    if spec == "B":
        return lambda j, t: pm.B(0.0)
    if spec == "B-sqrt":
        E32 = np.zeros((3, 3), dtype=complex)
        E32[2, 1] = 1.0
        return lambda j, t: pm.B(0.0) + math.sqrt(abs(t)) * E32
    raise ValueError(f"unknown perturbation spec {spec!r}")


def prop_b_run(
    j_start: int, j_stop: int, perturbation: PerturbationSpec = "B"
) -> list[PropBRow]:
    """Ratio run at t_j = 2^-j for a perturbation family with c32/t gap.

    Rows failing cyclicity, membership, or disc admissibility carry
    ratio = nan; they are reported, never dropped.
    """
    pert = _perturbation(perturbation)
    pm = paper_matrices()
    rows = []
    for j in range(j_start, j_stop + 1):
        t = 2.0 ** (-j)
        C = as_mat3(pert(j, t))
        gap = abs(C[2, 1] / t - 3.0)
        M = pm.A + t * C
        rep = cyclicity(M)
        f1, f2, f3 = sigma_expansion(C, t)
        ratio = math.nan
        if rep.cyclic and membership(M, "Omega3").inside:
            try:
                r, _cert = lempert_upper(M)
                ratio = r / abs(t)
            except (NotCyclic, NotAdmissible):
                pass
        rows.append(PropBRow(j, t, gap, rep.cyclic, f1, f2, f3, ratio))
    return rows


@dataclass(frozen=True)
class ExampleRow:
    t: float
    explicit_ratio: float
    optimized_ratio: float
    relation3_residual: float
    certificate_admissible: bool


@dataclass(frozen=True)
class ExampleRunResult:
    rows: list[ExampleRow]
    kappa_check_passed: bool
    certificates: list[DiscCertificate | None]


def explicit_sigma_disc() -> PolyMap3:
    """sigma-level coefficients of zeta -> A + (zeta/2) B_{zeta/2}.

    sigma of that family is (0, -3 (zeta/2)^2, -2 (zeta/2)^3), i.e. the
    polynomial map (0, -3 zeta^2/4, -zeta^3/4).
    """
    return PolyMap3([0.0], [0.0, 0.0, -0.75], [0.0, 0.0, 0.0, -0.25])


def _exact_trace_A_plus_zB(z: complex) -> complex:
    # trace(A + z B) evaluated with error-free expansion of the three
    # diagonal products; the rounded cross terms appear with both signs and
    # math.fsum adds floats exactly, so the result is exactly zero.
    a, b = z.real, z.imag
    diag = (1.0 + 0.0j, OMEGA, OMEGA2)
    re = math.fsum([a * w.real for w in diag] + [-b * w.imag for w in diag])
    im = math.fsum([a * w.imag for w in diag] + [b * w.real for w in diag])
    return complex(re, im)


def kappa_upper_check(
    phases: int = 64, radii: Sequence[float] = (0.25, 0.5, 0.9), tol: float = 1e-12
) -> bool:
    """Velocity-disc check: A + zeta*B is traceless with h(sigma) = |zeta|."""
    pm = paper_matrices()
    B = pm.B(0.0)
    for r in radii:
        for k in range(phases):
            z = r * complex(math.cos(2 * math.pi * k / phases),
                            math.sin(2 * math.pi * k / phases))
            if _exact_trace_A_plus_zB(z) != 0:
                return False
            sig = elem_sym(pm.A + z * B)
            h = float(np.max(np.abs(cubic_roots(sig))))
            if abs(h - abs(z)) >= tol:
                return False
    return True


def example_run(
    t_grid: Sequence[float],
    degree: int = 3,
    seed: int = 42,
    budget: int = 2000,
) -> ExampleRunResult:
    """Per-t explicit and optimized ratio rows for the exceptional family."""
    pm = paper_matrices()
    phi_expl = explicit_sigma_disc()
    rows = []
    certs: list[DiscCertificate | None] = []
    for i, t in enumerate(t_grid):
        t = float(t)
        if not 0.0 < t <= 0.2:
            raise ValueError("t must lie in (0, 0.2]")

        # Explicit matrix disc zeta -> A + (zeta/2) B_{zeta/2}: check the
        # endpoint at zeta = 2t and membership on an interior grid.
        ok = bool(
            np.max(np.abs((pm.A + t * pm.B(t)) - _explicit_matrix_disc(pm, 2.0 * t)))
            < 1e-13
        )
        if ok:
            for rad in (0.25, 0.5, 0.75, 0.95):
                for k in range(16):
                    z = rad * np.exp(2j * np.pi * k / 16)
                    if not membership(_explicit_matrix_disc(pm, z), "Omega3").inside:
                        ok = False
                        break
                if not ok:
                    break
        explicit_ratio = 2.0 if ok else math.nan
        rel = relation3_residual(phi_expl, 2.0 * t, t)

        try:
            cert, _phi = optimize_disc(
                Cubic(0.0, -3.0 * t * t, -2.0 * t ** 3),
                degree=degree,
                phi3_flat=True,
                relation3_t=t,
                seed=seed + 13 * i,
                budget=budget,
            )
            optimized_ratio = abs(cert.alpha) / t
            admissible = cert.admissible
            certs.append(cert)
        except NoFeasiblePoint:
            optimized_ratio = math.nan
            admissible = False
            certs.append(None)
        rows.append(ExampleRow(t, explicit_ratio, optimized_ratio, rel, admissible))
    return ExampleRunResult(rows, kappa_upper_check(), certs)


def _explicit_matrix_disc(pm: PaperMatrices, zeta: complex) -> np.ndarray:
    return pm.A + (zeta / 2.0) * pm.B(zeta / 2.0)


@dataclass(frozen=True)
class LimitCertificate:
    k: complex
    rho2_0: complex
    roots: np.ndarray
    admissible: bool


def limit_certificate(k: complex, rho2_0: complex) -> LimitCertificate:
    """Root-location certificate for (lambda - k)(lambda^2 + k lambda + k^2 + rho2).

    Expanded, the product is lambda^3 + rho2*lambda - (k^3 + k*rho2); the
    certificate is admissible when every root has modulus <= 1 + 1e-10,
    which forces |k| <= 1 + 1e-10 since k itself is a root.
    """
    k = complex(k)
    rho2_0 = complex(rho2_0)
    p = Cubic(0.0, rho2_0, k ** 3 + k * rho2_0)
    roots = cubic_roots(p)
    admissible = bool(np.max(np.abs(roots)) <= 1.0 + 1e-10)
    return LimitCertificate(k, rho2_0, roots, admissible)
