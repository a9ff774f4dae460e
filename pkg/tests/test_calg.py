import itertools
import math

import numpy as np
import pytest

from specball.calg import (
    OMEGA,
    OMEGA2,
    BranchCut,
    Cubic,
    NotCyclic,
    adjugate,
    companion,
    cubic_roots,
    cubic_roots_many,
    cyclicity,
    elem_sym,
    format_complex,
    mat_exp,
    mat_log,
    parse_complex,
    similarity,
)

A = np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)


def B_t(t):
    return np.array([[1, 0, 0], [0, OMEGA, 0], [0, 3 * t, OMEGA2]], dtype=complex)


B = B_t(0.0)


def durand_kerner(e1, e2, e3, iters=200):
    """Independent simultaneous-iteration root oracle."""
    z = np.array([0.4 + 0.9j, (0.4 + 0.9j) ** 2, (0.4 + 0.9j) ** 3])

    def poly(w):
        return ((w - e1) * w + e2) * w - e3

    for _ in range(iters):
        for i in range(3):
            o = [j for j in range(3) if j != i]
            z[i] -= poly(z[i]) / ((z[i] - z[o[0]]) * (z[i] - z[o[1]]))
    return z


def matched_distance(r1, r2):
    return min(
        max(abs(a - b) for a, b in zip(r1, perm))
        for perm in itertools.permutations(r2)
    )


class TestElemSym:
    def test_nilpotent(self):
        s = elem_sym(A)
        assert s.e1 == 0 and s.e2 == 0 and s.e3 == 0

    def test_triangular_unit(self):
        # diagonal 1, omega, omega^2 multiplies to 1
        s = elem_sym(B)
        assert abs(s.e1) < 1e-15
        assert abs(s.e2) < 1e-15
        assert abs(s.e3 - 1) < 1e-15

    def test_exceptional_family(self):
        t = 0.1
        s = elem_sym(A + t * B_t(t))
        assert abs(s.e1) < 1e-12
        assert abs(s.e2 + 3 * t * t) < 1e-12
        assert abs(s.e3 + 2 * t ** 3) < 1e-12


class TestCubicRoots:
    def test_roots_of_unity(self):
        roots = cubic_roots(Cubic(0, 0, 1))
        expected = [1, OMEGA, OMEGA2]
        assert matched_distance(roots, expected) < 1e-12

    def test_double_root(self):
        # (lambda - 0.1)^2 (lambda + 0.2) expanded by hand
        roots = cubic_roots(Cubic(0, -0.03, -0.002))
        assert matched_distance(roots, [0.1, 0.1, -0.2]) < 1e-7
        r0, r1, r2 = roots
        assert abs(r0 + r1 + r2) < 1e-9
        assert abs(r0 * r1 + r1 * r2 + r2 * r0 + 0.03) < 1e-9
        assert abs(r0 * r1 * r2 + 0.002) < 1e-9

    def test_zero(self):
        assert np.max(np.abs(cubic_roots(Cubic(0, 0, 0)))) == 0.0

    def test_sorted_by_modulus_then_phase(self):
        roots = cubic_roots(Cubic(0.3, -0.5, 0.1))
        mods = np.abs(roots)
        assert np.all(mods[:-1] >= mods[1:] - 1e-12)

    def test_vieta_roundtrip_seeded(self):
        rng = np.random.default_rng(11)
        n = 10_000
        e = rng.uniform(-2, 2, (3, n)) + 1j * rng.uniform(-2, 2, (3, n))
        r = cubic_roots_many(e[0], e[1], e[2])
        res = np.max(
            [
                np.max(np.abs(r[:, 0] + r[:, 1] + r[:, 2] - e[0])),
                np.max(
                    np.abs(
                        r[:, 0] * r[:, 1] + r[:, 1] * r[:, 2] + r[:, 2] * r[:, 0]
                        - e[1]
                    )
                ),
                np.max(np.abs(r[:, 0] * r[:, 1] * r[:, 2] - e[2])),
            ]
        )
        assert res < 1e-9

    def test_durand_kerner_agreement(self):
        rng = np.random.default_rng(23)
        for _ in range(1000):
            e1, e2, e3 = rng.uniform(-2, 2, 3) + 1j * rng.uniform(-2, 2, 3)
            mine = cubic_roots(Cubic(e1, e2, e3))
            oracle = durand_kerner(e1, e2, e3)
            assert matched_distance(mine, oracle) < 1e-9


class TestAdjugate:
    def test_identity(self):
        assert np.allclose(adjugate(np.eye(3)), np.eye(3))

    def test_rank_one(self):
        assert np.max(np.abs(adjugate(A))) == 0.0

    def test_rank_one_diag(self):
        assert np.max(np.abs(adjugate(np.diag([0, 0, 0.3])))) == 0.0

    def test_product_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            d = np.linalg.det(M)
            assert np.max(np.abs(M @ adjugate(M) - d * np.eye(3))) < 1e-12 * (
                1 + abs(d)
            )


class TestCyclicity:
    def test_nilpotent_degree_two(self):
        rep = cyclicity(A)
        assert not rep.cyclic
        assert rep.min_poly_degree == 2
        assert abs(rep.min_poly_coeffs[0]) < 1e-12
        assert abs(rep.min_poly_coeffs[1]) < 1e-12

    def test_distinct_spectrum_cyclic(self):
        rep = cyclicity(A + 0.1 * B)
        assert rep.cyclic and rep.min_poly_degree == 3

    def test_exceptional_family_noncyclic(self):
        # min poly (lambda - t)(lambda + 2t) = lambda^2 + t lambda - 2 t^2
        t = 0.1
        rep = cyclicity(A + t * B_t(t))
        assert not rep.cyclic
        assert rep.min_poly_degree == 2
        c0, c1 = rep.min_poly_coeffs
        assert abs(c0 + 2 * t * t) < 1e-10
        assert abs(c1 - t) < 1e-10

    def test_scalar_matrix_degree_one(self):
        rep = cyclicity(0.3j * np.eye(3))
        assert rep.min_poly_degree == 1
        assert abs(rep.min_poly_coeffs[0] + 0.3j) < 1e-12

    def test_distinct_random_spectra(self):
        rng = np.random.default_rng(17)
        count = 0
        while count < 200:
            lam = rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3)
            if min(abs(lam[i] - lam[j]) for i in range(3) for j in range(i + 1, 3)) < 1e-3:
                continue
            Q = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            M = Q @ np.diag(lam) @ np.linalg.inv(Q)
            assert cyclicity(M).cyclic
            count += 1


class TestSimilarity:
    def test_identity_case(self):
        C = companion(Cubic(0, 0, 1))
        P = similarity(C, C)
        assert np.max(np.abs(P - np.eye(3))) < 1e-12

    def test_diag_vs_companion(self):
        M = np.diag([0.1, 0.2, 0.3]).astype(complex)
        N = companion(elem_sym(M))
        P = similarity(M, N)
        assert np.max(np.abs(np.linalg.inv(P) @ N @ P - M)) < 1e-10

    def test_noncyclic_rejected(self):
        with pytest.raises(NotCyclic):
            similarity(A, companion(Cubic(0, 0, 1)))

    def test_random_conjugated_companions(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            p = Cubic(*(rng.uniform(-0.5, 0.5, 3) + 1j * rng.uniform(-0.5, 0.5, 3)))
            C = companion(p)
            Q = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            M = Q @ C @ np.linalg.inv(Q)
            P = similarity(M, C)
            assert np.max(np.abs(np.linalg.inv(P) @ C @ P - M)) < 1e-8


class TestExpLog:
    def test_exp_zero(self):
        assert np.allclose(mat_exp(np.zeros((3, 3))), np.eye(3))

    def test_exp_diag(self):
        assert np.allclose(mat_exp(np.diag([math.log(2), 0, 0])), np.diag([2.0, 1, 1]))

    def test_exp_nilpotent(self):
        assert np.max(np.abs(mat_exp(A) - (np.eye(3) + A))) < 1e-14

    def test_exp_vs_diagonalization_oracle(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            lam = rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3)
            if min(abs(lam[i] - lam[j]) for i in range(3) for j in range(i + 1, 3)) < 1e-3:
                continue
            Q = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            S = Q @ np.diag(lam) @ np.linalg.inv(Q)
            oracle = Q @ np.diag(np.exp(lam)) @ np.linalg.inv(Q)
            assert np.max(np.abs(mat_exp(S) - oracle)) < 1e-9 * (
                1 + np.max(np.abs(oracle))
            )

    def test_log_identity(self):
        assert np.max(np.abs(mat_log(np.eye(3)))) < 1e-14

    def test_log_diag(self):
        L = mat_log(np.diag([2.0, 1, 1]))
        assert np.max(np.abs(L - np.diag([math.log(2), 0, 0]))) < 1e-12

    def test_log_branch_cut(self):
        with pytest.raises(BranchCut):
            mat_log(np.diag([-1.0, 1, 1]))

    def test_round_trip(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            S = rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))
            P = mat_exp(S)
            assert np.max(np.abs(mat_exp(mat_log(P)) - P)) < 1e-8


class TestComplexSerialization:
    def test_round_trip(self):
        for z in (0.1 - 0.25j, -3e-7 + 1j, 0j, complex(1 / 3, -2 / 7)):
            assert parse_complex(format_complex(z)) == z

    def test_real_shorthand(self):
        assert parse_complex("-0.03") == -0.03
        assert parse_complex("2i") == 2j

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_complex("1+?i")
        with pytest.raises(ValueError):
            parse_complex("nan")
