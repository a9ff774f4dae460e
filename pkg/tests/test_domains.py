import numpy as np
import pytest

from specball.calg import OMEGA, OMEGA2, Cubic, cubic_roots, elem_sym
from specball.domains import h_g3, h_g3_many, membership, weighted_scale

A = np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
B = np.array([[1, 0, 0], [0, OMEGA, 0], [0, 0, OMEGA2]], dtype=complex)


class TestHG3:
    def test_origin(self):
        assert h_g3(Cubic(0, 0, 0)) == 0.0

    def test_triple_root(self):
        assert abs(h_g3(Cubic(1.5, 0.75, 0.125)) - 0.5) < 1e-12

    def test_double_root_point(self):
        assert abs(h_g3(Cubic(0, -0.03, -0.002)) - 0.2) < 1e-9


class TestMembership:
    def test_interior_matrix(self):
        v = membership(A + 0.5 * B, "Omega3")
        assert v.inside
        assert abs(v.margin - 0.5) < 1e-12

    def test_boundary_matrix(self):
        v = membership(B, "Omega3")
        assert abs(v.margin) < 1e-12

    def test_traceless_slice(self):
        assert membership(A + 0.5 * B, "Omega3Traceless").inside

    def test_traceful_rejected(self):
        assert not membership(0.5 * np.eye(3), "Omega3Traceless").inside

    def test_g3_point(self):
        assert membership(Cubic(0, 0, 0.001), "G3").inside

    def test_wrong_operand(self):
        with pytest.raises(TypeError):
            membership(A, "G3")
        with pytest.raises(ValueError):
            membership(A, "Omega7")


class TestWeightedScale:
    def test_powers(self):
        z = weighted_scale(Cubic(1, 1, 1), 0.5)
        assert (z.e1, z.e2, z.e3) == (0.5, 0.25, 0.125)

    def test_identity(self):
        z = weighted_scale(Cubic(0.3, -0.1j, 0.2), 1.0)
        assert (z.e1, z.e2, z.e3) == (0.3, -0.1j, 0.2)

    def test_cube_of_imaginary(self):
        z = weighted_scale(Cubic(0, 0, 1), 0.7j)
        assert abs(z.e3 - (-0.343j)) < 1e-15


class TestProperties:
    def test_homogeneity(self):
        rng = np.random.default_rng(3)
        n = 0
        while n < 1000:
            z = Cubic(*(rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3)))
            if h_g3(z) > 2:
                continue
            t = (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) / 2
            h = h_g3(z)
            assert abs(h_g3(weighted_scale(z, t)) - abs(t) * h) <= 1e-10 * (1 + h)
            n += 1

    def test_spectral_consistency(self):
        rng = np.random.default_rng(9)
        for _ in range(1000):
            M = rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))
            v = membership(M, "Omega3")
            lam_max = np.max(np.abs(cubic_roots(elem_sym(M))))
            if abs(v.margin) < 1e-10:
                continue
            assert v.inside == (lam_max < 1)

    def test_conjugation_invariance(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            P = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            h1 = h_g3(elem_sym(M))
            h2 = h_g3(elem_sym(np.linalg.inv(P) @ M @ P))
            assert abs(h1 - h2) < 1e-8 * (1 + h1)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(15)
        e = rng.uniform(-1, 1, (3, 64)) + 1j * rng.uniform(-1, 1, (3, 64))
        batch = h_g3_many(e[0], e[1], e[2])
        for i in range(64):
            assert abs(batch[i] - h_g3(Cubic(e[0, i], e[1, i], e[2, i]))) < 1e-10
