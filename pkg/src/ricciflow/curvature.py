"""Connection and Ricci tensor of the metric in which the frame is orthonormal.

For a left-invariant metric all curvature quantities are algebraic in the
structure constants of the frame.  Three independent computation paths for
the Ricci matrix are provided and cross-checked in the test suite:

* :func:`ricci_parts` -- the four-part decomposition R = R1 + R2 + R3 + R4,
* :func:`ricci_via_connection` -- contraction of the curvature of the
  Riemannian connection coefficients,
* :func:`ricci_combined` -- a single combined quadratic expression.

Under an orthogonal change of frame every part transforms tensorially
(``pullback_symmetric``); under a general invertible change only R1 does.
R1 is the Ricci form of the Cartan connection; for unimodular algebras
R2 vanishes identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .lie import StructureConstants
from .matrix import as_square_matrix


@dataclass(frozen=True)
class Connection:
    """Riemannian connection coefficients ``gamma[i, j, k]`` for an
    orthonormal frame, defined by ``nabla_{E_i} E_j = gamma[i, j, k] E_k``."""

    gamma: np.ndarray


def connection(sc: StructureConstants) -> Connection:
    """Connection coefficients ``(C^k_ij + C^j_ki + C^i_kj) / 2``.

    Metric compatibility shows as antisymmetry in the last two indices:
    ``gamma[k, i, j] = -gamma[k, j, i]``.
    """
    return Connection(gamma=np.asarray(kern.connection_coeffs(sc.c)))


@dataclass(frozen=True)
class RicciDecomposition:
    """The four summands of the Ricci matrix, their sum, and its trace."""

    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    r4: np.ndarray
    total: np.ndarray
    scalar: float

    def to_json_dict(self) -> dict:
        return {
            "r1": self.r1.tolist(),
            "r2": self.r2.tolist(),
            "r3": self.r3.tolist(),
            "r4": self.r4.tolist(),
            "total": self.total.tolist(),
            "scalar": self.scalar,
        }


def ricci_parts(sc: StructureConstants) -> RicciDecomposition:
    """Ricci matrix in the orthonormal frame, split into its four parts.

    With all sums running over the full index range:

        R1_jk = -1/2 sum_{s,m} C^s_mj C^m_sk
        R2_jk =  1/2 sum_s (sum_m C^m_ms) (C^k_sj + C^j_sk)
        R3_jk =  1/4 sum_{s,m} C^j_sm C^k_sm
        R4_jk = -1/2 sum_{s,m} C^m_sj C^m_sk

    ``total`` is their sum, ``scalar`` its trace (the scalar curvature, since
    the frame is orthonormal).
    """
    r1, r2, r3, r4 = (np.asarray(r) for r in kern.ricci_parts(sc.c))
    total = r1 + r2 + r3 + r4
    return RicciDecomposition(r1=r1, r2=r2, r3=r3, r4=r4, total=total,
                              scalar=float(np.trace(total)))


def ricci_via_connection(sc: StructureConstants) -> np.ndarray:
    """Ricci matrix through the connection coefficients.

    ``R_jk = G^l_jk G^s_sl - G^l_sk G^s_jl - C^l_sj G^s_lk`` with G the
    connection of :func:`connection`.  Agrees with ``ricci_parts(...).total``;
    kept as an independent code path for cross-checking.
    """
    gamma = kern.connection_coeffs(sc.c)
    return np.asarray(kern.ricci_from_connection(sc.c, gamma))


def ricci_combined(sc: StructureConstants) -> np.ndarray:
    """Ricci matrix as one combined quadratic expression.

    ``R_jk = -1/2 C^s_mj C^m_sk + 1/4 C^j_ms C^k_ms - 1/2 C^s_mj C^s_mk
    + 1/2 C^m_ms (C^k_sj + C^j_sk)``; third independent path.
    """
    return np.asarray(kern.ricci_combined(sc.c))


def pullback_symmetric(a, q) -> np.ndarray:
    """Frame change of a twice-covariant symmetric tensor.

    ``(T(q) a)_ij = q^p_i q^q_j a_pq``, i.e. ``q.T @ a @ q`` in the row-as-
    upper-index convention.  This is the transformation law the equivariance
    properties of the Ricci parts are stated against.
    """
    am = as_square_matrix(a)
    qm = as_square_matrix(q)
    return np.einsum("pi,qj,pq->ij", qm, qm, am)
