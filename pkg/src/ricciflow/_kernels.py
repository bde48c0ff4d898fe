"""Numeric hot-path kernels with two interchangeable backends.

The flow integrator spends essentially all of its time re-expressing the
structure constants in the current frame and contracting them into the Ricci
matrix.  Those contractions are provided here twice:

* ``numba`` -- explicit full-range index loops compiled with ``@njit``
  (the reference formulation; used by default when numba is importable),
* ``numpy`` -- vectorized equivalents built on einsum/tensordot.

Set ``RICCIFLOW_BACKEND=numpy`` (or ``numba``/``auto``) to pick the backend at
import time.  Both implementations are always exposed through
``NUMPY_IMPL``/``NUMBA_IMPL`` so tests and benchmarks can compare them.

All kernels operate on plain float64 arrays.  Structure constants are stored
as ``c[k, i, j]`` = coefficient of the k-th frame vector in the bracket of the
i-th and j-th ones; matrices use the row-as-upper-index convention, so
``q[j, i]`` is the j-th component of the i-th transformed frame vector.
"""

from __future__ import annotations

import os

import numpy as np

BACKEND_ENV_VAR = "RICCIFLOW_BACKEND"


def _select_backend() -> str:
    choice = os.environ.get(BACKEND_ENV_VAR, "auto").strip().lower() or "auto"
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{BACKEND_ENV_VAR} must be 'auto', 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _select_backend()


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def _mirror_upper(raw):
    """Keep the i<j entries of ``raw[k, i, j]`` and mirror them with a sign.

    Guarantees exact antisymmetry in (i, j) regardless of floating-point
    summation order in the producing contraction.
    """
    n = raw.shape[0]
    out = np.zeros_like(raw)
    iu, ju = np.triu_indices(n, k=1)
    out[:, iu, ju] = raw[:, iu, ju]
    out[:, ju, iu] = -raw[:, iu, ju]
    return out


def _transform_np(c, q, qinv):
    # C'^k_ij = q^s_i q^m_j C^l_sm (q^-1)^k_l
    tmp = np.tensordot(qinv, c, axes=(1, 0))      # [k, s, m]
    tmp = np.tensordot(tmp, q, axes=(2, 0))       # [k, s, j]
    raw = np.einsum("ksj,si->kij", tmp, q)
    return _mirror_upper(raw)


def _ricci_parts_np(c):
    r1 = -0.5 * np.einsum("smj,msk->jk", c, c)
    t = np.einsum("mms->s", c)
    r2 = 0.5 * (np.einsum("s,ksj->jk", t, c) + np.einsum("s,jsk->jk", t, c))
    r3 = 0.25 * np.einsum("jsm,ksm->jk", c, c)
    r4 = -0.5 * np.einsum("msj,msk->jk", c, c)
    return r1, r2, r3, r4


def _connection_np(c):
    # gamma[i, j, k] = (C^k_ij + C^j_ki + C^i_kj) / 2
    return 0.5 * (
        np.einsum("kij->ijk", c) + np.einsum("jki->ijk", c) + np.einsum("ikj->ijk", c)
    )


def _ricci_from_connection_np(c, gamma):
    tr = np.einsum("sls->l", gamma)
    raw = (
        np.einsum("jkl,l->jk", gamma, tr)
        - np.einsum("skl,jls->jk", gamma, gamma)
        - np.einsum("lsj,lks->jk", c, gamma)
    )
    # the contraction has an antisymmetric residue proportional to the Jacobi
    # defect of c; the symmetric part is the Ricci tensor (exactly equal to
    # the raw contraction whenever c is a Lie algebra)
    return 0.5 * (raw + raw.T)


def _ricci_combined_np(c):
    t = np.einsum("mms->s", c)
    return (
        -0.5 * np.einsum("smj,msk->jk", c, c)
        + 0.25 * np.einsum("jms,kms->jk", c, c)
        - 0.5 * np.einsum("smj,smk->jk", c, c)
        + 0.5 * (np.einsum("s,ksj->jk", t, c) + np.einsum("s,jsk->jk", t, c))
    )


def _upper_tri_inverse_np(b):
    return np.linalg.solve(b, np.eye(b.shape[0]))


def _flow_rhs_np(c_base, b, normalized):
    n = b.shape[0]
    binv = _upper_tri_inverse_np(b)
    ct = _transform_np(c_base, b, binv)
    r1, r2, r3, r4 = _ricci_parts_np(ct)
    ric = r1 + r2 + r3 + r4
    if normalized:
        ric = ric - (np.trace(ric) / n) * np.eye(n)
    m = np.triu(2.0 * ric, k=1) + np.diag(np.diag(ric))
    return np.triu(b @ m)


NUMPY_IMPL = {
    "transform_constants": _transform_np,
    "ricci_parts": _ricci_parts_np,
    "connection_coeffs": _connection_np,
    "ricci_from_connection": _ricci_from_connection_np,
    "ricci_combined": _ricci_combined_np,
    "upper_tri_inverse": _upper_tri_inverse_np,
    "flow_rhs": _flow_rhs_np,
}


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

NUMBA_IMPL = None

if BACKEND == "numba":
    from numba import njit

    @njit(cache=True)
    def _transform_nb(c, q, qinv):
        n = c.shape[0]
        out = np.zeros((n, n, n))
        for k in range(n):
            for i in range(n):
                for j in range(i + 1, n):
                    acc = 0.0
                    for s in range(n):
                        for m in range(n):
                            qq = q[s, i] * q[m, j]
                            for l in range(n):
                                acc += qq * c[l, s, m] * qinv[k, l]
                    out[k, i, j] = acc
                    out[k, j, i] = -acc
        return out

    @njit(cache=True)
    def _ricci_parts_nb(c):
        n = c.shape[0]
        r1 = np.zeros((n, n))
        r2 = np.zeros((n, n))
        r3 = np.zeros((n, n))
        r4 = np.zeros((n, n))
        t = np.zeros(n)
        for s in range(n):
            for m in range(n):
                t[s] += c[m, m, s]
        for j in range(n):
            for k in range(n):
                acc1 = 0.0
                acc3 = 0.0
                acc4 = 0.0
                for s in range(n):
                    for m in range(n):
                        acc1 += c[s, m, j] * c[m, s, k]
                        acc3 += c[j, s, m] * c[k, s, m]
                        acc4 += c[m, s, j] * c[m, s, k]
                acc2 = 0.0
                for s in range(n):
                    acc2 += t[s] * (c[k, s, j] + c[j, s, k])
                r1[j, k] = -0.5 * acc1
                r2[j, k] = 0.5 * acc2
                r3[j, k] = 0.25 * acc3
                r4[j, k] = -0.5 * acc4
        return r1, r2, r3, r4

    @njit(cache=True)
    def _connection_nb(c):
        n = c.shape[0]
        gamma = np.zeros((n, n, n))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    gamma[i, j, k] = 0.5 * (c[k, i, j] + c[j, k, i] + c[i, k, j])
        return gamma

    @njit(cache=True)
    def _ricci_from_connection_nb(c, gamma):
        n = c.shape[0]
        tr = np.zeros(n)
        for l in range(n):
            for s in range(n):
                tr[l] += gamma[s, l, s]
        raw = np.zeros((n, n))
        for j in range(n):
            for k in range(n):
                acc = 0.0
                for l in range(n):
                    acc += gamma[j, k, l] * tr[l]
                    for s in range(n):
                        acc -= gamma[s, k, l] * gamma[j, l, s]
                        acc -= c[l, s, j] * gamma[l, k, s]
                raw[j, k] = acc
        # the contraction has an antisymmetric residue proportional to the
        # Jacobi defect of c; the symmetric part is the Ricci tensor (exactly
        # equal to the raw contraction whenever c is a Lie algebra)
        out = np.zeros((n, n))
        for j in range(n):
            for k in range(n):
                out[j, k] = 0.5 * (raw[j, k] + raw[k, j])
        return out

    @njit(cache=True)
    def _ricci_combined_nb(c):
        n = c.shape[0]
        t = np.zeros(n)
        for s in range(n):
            for m in range(n):
                t[s] += c[m, m, s]
        out = np.zeros((n, n))
        for j in range(n):
            for k in range(n):
                acc = 0.0
                for s in range(n):
                    for m in range(n):
                        acc += (
                            -0.5 * c[s, m, j] * c[m, s, k]
                            + 0.25 * c[j, m, s] * c[k, m, s]
                            - 0.5 * c[s, m, j] * c[s, m, k]
                        )
                    acc += 0.5 * t[s] * (c[k, s, j] + c[j, s, k])
                out[j, k] = acc
        return out

    @njit(cache=True)
    def _upper_tri_inverse_nb(b):
        n = b.shape[0]
        inv = np.zeros((n, n))
        for i in range(n - 1, -1, -1):
            inv[i, i] = 1.0 / b[i, i]
            for j in range(i + 1, n):
                acc = 0.0
                for k in range(i + 1, j + 1):
                    acc += b[i, k] * inv[k, j]
                inv[i, j] = -acc / b[i, i]
        return inv

    @njit(cache=True)
    def _flow_rhs_nb(c_base, b, normalized):
        n = b.shape[0]
        binv = _upper_tri_inverse_nb(b)
        ct = _transform_nb(c_base, b, binv)
        r1, r2, r3, r4 = _ricci_parts_nb(ct)
        ric = r1 + r2 + r3 + r4
        if normalized:
            tr = 0.0
            for i in range(n):
                tr += ric[i, i]
            shift = tr / n
            for i in range(n):
                ric[i, i] -= shift
        m = np.zeros((n, n))
        for i in range(n):
            m[i, i] = ric[i, i]
            for j in range(i + 1, n):
                m[i, j] = 2.0 * ric[i, j]
        db = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                acc = 0.0
                for k in range(i, j + 1):
                    acc += b[i, k] * m[k, j]
                db[i, j] = acc
        return db

    NUMBA_IMPL = {
        "transform_constants": _transform_nb,
        "ricci_parts": _ricci_parts_nb,
        "connection_coeffs": _connection_nb,
        "ricci_from_connection": _ricci_from_connection_nb,
        "ricci_combined": _ricci_combined_nb,
        "upper_tri_inverse": _upper_tri_inverse_nb,
        "flow_rhs": _flow_rhs_nb,
    }


_ACTIVE = NUMBA_IMPL if BACKEND == "numba" else NUMPY_IMPL

transform_constants = _ACTIVE["transform_constants"]
ricci_parts = _ACTIVE["ricci_parts"]
connection_coeffs = _ACTIVE["connection_coeffs"]
ricci_from_connection = _ACTIVE["ricci_from_connection"]
ricci_combined = _ACTIVE["ricci_combined"]
upper_tri_inverse = _ACTIVE["upper_tri_inverse"]
flow_rhs = _ACTIVE["flow_rhs"]
