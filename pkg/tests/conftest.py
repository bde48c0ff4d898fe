import numpy as np
import pytest

from ricciflow import StructureConstants, factor_tri_orth


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_antisymmetric_constants(rng, n=3, scale=2.0):
    """Arbitrary antisymmetric constants (not generally a Lie algebra)."""
    raw = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                v = rng.uniform(-scale, scale)
                raw[k, i, j] = v
                raw[k, j, i] = -v
    return StructureConstants(raw)


def random_invertible(rng, n=3, det_floor=0.2):
    while True:
        q = rng.uniform(-1.0, 1.0, (n, n))
        if abs(np.linalg.det(q)) > det_floor:
            return q


def random_orthogonal(rng, n=3):
    return factor_tri_orth(random_invertible(rng, n)).u


def random_upper_triangular(rng, n=3, diag_lo=0.4, diag_hi=2.0):
    b = np.triu(rng.uniform(-1.0, 1.0, (n, n)), k=1)
    np.fill_diagonal(b, rng.uniform(diag_lo, diag_hi, n))
    return b
