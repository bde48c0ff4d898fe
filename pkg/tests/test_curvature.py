"""Tests for the connection and the Ricci computation paths."""

import numpy as np
import pytest

from conftest import random_antisymmetric_constants, random_invertible, random_orthogonal
from ricciflow import (
    StructureConstants,
    connection,
    from_unimodular3,
    preset_constants,
    pullback_symmetric,
    ricci_combined,
    ricci_parts,
    ricci_via_connection,
    transform,
)


def levi_civita():
    eps = np.zeros((3, 3, 3))
    for (i, j, k), s in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                         ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        eps[i, j, k] = s
    return eps


class TestConnection:
    def test_abelian(self):
        gamma = connection(StructureConstants.zero(3)).gamma
        assert np.array_equal(gamma, np.zeros((3, 3, 3)))

    def test_so3_is_half_epsilon(self):
        # hand evaluation on the fully antisymmetric constants
        gamma = connection(preset_constants("so3")).gamma
        eps = levi_civita()
        expected = 0.5 * np.einsum("kij->ijk", eps)
        assert np.max(np.abs(gamma - expected)) <= 1e-15

    def test_metric_compatibility(self, rng):
        # antisymmetry of the connection in its last two indices
        for _ in range(50):
            gamma = connection(random_antisymmetric_constants(rng)).gamma
            assert np.max(np.abs(gamma + gamma.swapaxes(1, 2))) <= 1e-12


class TestRicciParts:
    def test_so3(self):
        dec = ricci_parts(preset_constants("so3"))
        assert np.array_equal(dec.r1, np.eye(3))
        assert np.array_equal(dec.r2, np.zeros((3, 3)))
        assert np.array_equal(dec.r3, 0.5 * np.eye(3))
        assert np.array_equal(dec.r4, -np.eye(3))
        assert np.array_equal(dec.total, 0.5 * np.eye(3))
        assert dec.scalar == 1.5

    def test_abelian(self):
        dec = ricci_parts(StructureConstants.zero(3))
        for m in (dec.r1, dec.r2, dec.r3, dec.r4, dec.total):
            assert np.array_equal(m, np.zeros((3, 3)))
        assert dec.scalar == 0.0

    def test_heisenberg(self):
        dec = ricci_parts(preset_constants("heisenberg"))
        assert np.array_equal(dec.r1, np.zeros((3, 3)))
        assert np.allclose(dec.total, np.diag([0.5, -0.5, -0.5]), atol=1e-15)

    def test_parts_symmetric(self, rng):
        for _ in range(100):
            dec = ricci_parts(random_antisymmetric_constants(rng))
            for m in (dec.r1, dec.r2, dec.r3, dec.r4):
                assert np.max(np.abs(m - m.T)) <= 1e-12

    def test_r2_vanishes_for_unimodular(self, rng):
        for _ in range(100):
            dec = ricci_parts(from_unimodular3(rng.uniform(-3, 3, 6)))
            assert np.array_equal(dec.r2, np.zeros((3, 3)))

    def test_total_is_sum_and_scalar_is_trace(self, rng):
        dec = ricci_parts(random_antisymmetric_constants(rng))
        assert np.array_equal(dec.total, dec.r1 + dec.r2 + dec.r3 + dec.r4)
        assert dec.scalar == np.trace(dec.total)

    def test_json_dict(self):
        d = ricci_parts(preset_constants("so3")).to_json_dict()
        assert d["scalar"] == 1.5
        assert d["total"] == [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0.5]]


class TestThreePathAgreement:
    def test_so3(self):
        sc = preset_constants("so3")
        assert np.max(np.abs(ricci_via_connection(sc) - 0.5 * np.eye(3))) <= 1e-14
        assert np.max(np.abs(ricci_combined(sc) - 0.5 * np.eye(3))) <= 1e-14

    def test_abelian(self):
        sc = StructureConstants.zero(3)
        assert np.array_equal(ricci_via_connection(sc), np.zeros((3, 3)))
        assert np.array_equal(ricci_combined(sc), np.zeros((3, 3)))

    def test_heisenberg_combined(self):
        got = ricci_combined(preset_constants("heisenberg"))
        assert np.allclose(got, np.diag([0.5, -0.5, -0.5]), atol=1e-15)

    def test_random_pairwise(self, rng):
        worst = 0.0
        for _ in range(300):
            sc = random_antisymmetric_constants(rng)
            total = ricci_parts(sc).total
            via = ricci_via_connection(sc)
            comb = ricci_combined(sc)
            worst = max(
                worst,
                np.max(np.abs(total - via)),
                np.max(np.abs(total - comb)),
                np.max(np.abs(via - comb)),
            )
        assert worst <= 1e-10


class TestEquivariance:
    def test_pullback_identity(self, rng):
        a = rng.uniform(-1, 1, (3, 3))
        a = a + a.T
        assert np.array_equal(pullback_symmetric(a, np.eye(3)), a)

    def test_pullback_is_congruence(self, rng):
        a = rng.uniform(-1, 1, (3, 3))
        a = a + a.T
        q = random_invertible(rng)
        assert np.allclose(pullback_symmetric(a, q), q.T @ a @ q, atol=1e-14)

    def test_orthogonal_equivariance_all_parts(self, rng):
        worst = 0.0
        for _ in range(50):
            sc = random_antisymmetric_constants(rng)
            u = random_orthogonal(rng)
            dec = ricci_parts(sc)
            dec_u = ricci_parts(transform(sc, u))
            for got, base in ((dec_u.r1, dec.r1), (dec_u.r2, dec.r2),
                              (dec_u.r3, dec.r3), (dec_u.r4, dec.r4)):
                worst = max(worst, np.max(np.abs(got - pullback_symmetric(base, u))))
        assert worst <= 1e-10

    def test_general_linear_equivariance_of_r1(self, rng):
        worst = 0.0
        for _ in range(50):
            sc = random_antisymmetric_constants(rng)
            q = random_invertible(rng)
            got = ricci_parts(transform(sc, q)).r1
            worst = max(worst, np.max(np.abs(got - pullback_symmetric(ricci_parts(sc).r1, q))))
        assert worst <= 1e-10

    def test_total_is_not_gl_equivariant(self):
        # diag(2,1,1) on the nilpotent preset: transformed value 1/8 vs
        # pulled-back value 2, so the total Ricci is not a GL-tensor
        sc = preset_constants("heisenberg")
        q = np.diag([2.0, 1.0, 1.0])
        got = ricci_parts(transform(sc, q)).total
        pulled = pullback_symmetric(ricci_parts(sc).total, q)
        assert got[0, 0] == pytest.approx(0.125, abs=1e-14)
        assert pulled[0, 0] == pytest.approx(2.0, abs=1e-14)
        assert np.max(np.abs(got - pulled)) > 1.0
