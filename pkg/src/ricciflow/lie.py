"""Lie algebras represented by structure constants in a fixed frame.

A Lie algebra is stored as the rank-3 array ``c[k, i, j]`` of its structure
constants, defined by ``[E_i, E_j] = c[k, i, j] E_k``.  Antisymmetry in
``(i, j)`` is structural: constructors keep only the ``i < j`` entries and
mirror them with a sign, so it holds exactly, never approximately.

Validation of the algebraic laws (Jacobi identity, unimodularity) is
advisory: the defect functions return residuals instead of raising, because
flow experiments on near-algebras are legitimate diagnostics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .errors import UnknownPreset
from .matrix import as_square_matrix, inverse


@dataclass(frozen=True)
class Unimodular3Params:
    """The six parameters of a 3D unimodular algebra.

    In a suitable frame every such algebra has bracket table

        [E1, E2] = b1 E1 + b3 E2 + a3 E3
        [E1, E3] = -b2 E1 - a2 E2 - b3 E3
        [E2, E3] = a1 E1 + b2 E2 + b1 E3

    and every parameter choice satisfies the Jacobi identity.
    """

    a1: float
    a2: float
    a3: float
    b1: float
    b2: float
    b3: float

    def __post_init__(self):
        vals = self.as_tuple()
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"parameters must be finite, got {vals}")

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.b1, self.b2, self.b3)

    @classmethod
    def from_sequence(cls, seq) -> "Unimodular3Params":
        vals = [float(v) for v in seq]
        if len(vals) != 6:
            raise ValueError(f"expected six parameters a1,a2,a3,b1,b2,b3, got {len(vals)}")
        return cls(*vals)


#: Named parameter presets (a1, a2, a3, b1, b2, b3).
PRESETS: dict[str, tuple[float, ...]] = {
    "so3": (1.0, 1.0, 1.0, 0.0, 0.0, 0.0),
    "heisenberg": (1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    "e2": (1.0, 1.0, 0.0, 0.0, 0.0, 0.0),
    "e11": (1.0, -1.0, 0.0, 0.0, 0.0, 0.0),
    "sl2r": (1.0, 1.0, -1.0, 0.0, 0.0, 0.0),
    "abelian": (0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
}


def preset(name: str) -> Unimodular3Params:
    """Look up a named parameter preset."""
    try:
        return Unimodular3Params(*PRESETS[name])
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise UnknownPreset(f"unknown preset {name!r}; known presets: {known}") from None


class StructureConstants:
    """Structure constants ``c[k, i, j]`` with structurally exact antisymmetry.

    The constructor accepts any antisymmetric rank-3 cube; the stored array is
    rebuilt from the ``i < j`` entries (diagonal forced to zero, lower mirror
    negated) and marked read-only, so values are safe to share across threads.
    """

    __slots__ = ("n", "c")

    def __init__(self, c):
        a = np.array(c, dtype=float)
        if a.ndim != 3 or len(set(a.shape)) != 1:
            raise ValueError(f"expected an (n, n, n) array, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("structure constants must be finite")
        defect = np.max(np.abs(a + a.swapaxes(1, 2)))
        if defect != 0.0:
            raise ValueError(
                f"input is not antisymmetric in (i, j): defect {defect:.3e}; "
                "use StructureConstants.from_entries to build from i<j entries"
            )
        n = a.shape[0]
        out = np.zeros_like(a)
        iu, ju = np.triu_indices(n, k=1)
        out[:, iu, ju] = a[:, iu, ju]
        out[:, ju, iu] = -a[:, iu, ju]
        out.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "c", out)

    def __setattr__(self, name, value):
        raise AttributeError("StructureConstants is immutable")

    def __repr__(self):
        nz = int(np.count_nonzero(np.triu(self.c, k=1)))
        return f"StructureConstants(n={self.n}, nonzero_upper={nz})"

    @classmethod
    def zero(cls, n: int) -> "StructureConstants":
        return cls(np.zeros((n, n, n)))

    @classmethod
    def from_entries(cls, n: int, entries: dict[tuple[int, int, int], float]) -> "StructureConstants":
        """Build from 0-based ``{(k, i, j): value}`` with ``i < j``."""
        a = np.zeros((n, n, n))
        for (k, i, j), v in entries.items():
            if not (0 <= k < n and 0 <= i < n and 0 <= j < n):
                raise ValueError(f"index ({k}, {i}, {j}) out of range for n={n}")
            if i >= j:
                raise ValueError(f"entries must have i < j, got ({k}, {i}, {j})")
            a[k, i, j] = float(v)
            a[k, j, i] = -float(v)
        return cls(a)

    def to_json_dict(self) -> dict:
        """Serialize as ``{"dim": n, "entries": [...]}`` with 1-based indices,
        listing only the nonzero ``i < j`` entries."""
        entries = []
        for k in range(self.n):
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    v = self.c[k, i, j]
                    if v != 0.0:
                        entries.append({"k": k + 1, "i": i + 1, "j": j + 1, "value": float(v)})
        return {"dim": self.n, "entries": entries}

    @classmethod
    def from_json_dict(cls, data: dict) -> "StructureConstants":
        n = int(data["dim"])
        raw = {}
        for e in data["entries"]:
            k, i, j = int(e["k"]) - 1, int(e["i"]) - 1, int(e["j"]) - 1
            raw[(k, i, j)] = float(e["value"])
        return cls.from_entries(n, raw)


def write_constants(path, sc: StructureConstants) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sc.to_json_dict(), fh, indent=2)
        fh.write("\n")


def read_constants(path) -> StructureConstants:
    with open(path, "r", encoding="utf-8") as fh:
        return StructureConstants.from_json_dict(json.load(fh))


def from_unimodular3(p) -> StructureConstants:
    """3D unimodular structure constants from the six parameters.

    Nonzero upper entries: ``C^1_12 = b1``, ``C^1_13 = -b2``, ``C^1_23 = a1``,
    ``C^2_12 = b3``, ``C^2_13 = -a2``, ``C^2_23 = b2``, ``C^3_12 = a3``,
    ``C^3_13 = -b3``, ``C^3_23 = b1``.
    """
    if not isinstance(p, Unimodular3Params):
        p = Unimodular3Params.from_sequence(p)
    a1, a2, a3, b1, b2, b3 = p.as_tuple()
    return StructureConstants.from_entries(3, {
        (0, 0, 1): b1, (0, 0, 2): -b2, (0, 1, 2): a1,
        (1, 0, 1): b3, (1, 0, 2): -a2, (1, 1, 2): b2,
        (2, 0, 1): a3, (2, 0, 2): -b3, (2, 1, 2): b1,
    })


def to_unimodular3(sc: StructureConstants, tol: float = 1e-10) -> Unimodular3Params:
    """Read the six parameters back from 3D constants in unimodular form.

    The parameter pattern is overdetermined (b1, b2, b3 each appear twice);
    raises ValueError when the duplicates disagree by more than ``tol``,
    i.e. when the constants are not of the unimodular shape.
    """
    if sc.n != 3:
        raise ValueError("only defined for 3-dimensional algebras")
    c = sc.c
    pairs = [
        ("b1", c[0, 0, 1], c[2, 1, 2]),
        ("b2", -c[0, 0, 2], c[1, 1, 2]),
        ("b3", c[1, 0, 1], -c[2, 0, 2]),
    ]
    for name, first, second in pairs:
        if abs(first - second) > tol:
            raise ValueError(f"constants are not in unimodular form: {name} reads {first} vs {second}")
    return Unimodular3Params(
        a1=float(c[0, 1, 2]), a2=float(-c[1, 0, 2]), a3=float(c[2, 0, 1]),
        b1=float(c[0, 0, 1]), b2=float(-c[0, 0, 2]), b3=float(c[1, 0, 1]),
    )


def jacobi_defect(sc: StructureConstants) -> float:
    """Max-norm residual of the Jacobi identity.

    Returns ``max_{i,j,k,l} | sum_s (C^s_ij C^l_sk + C^s_jk C^l_si
    + C^s_ki C^l_sj) |``; zero exactly when the constants define a Lie algebra.
    """
    c = sc.c
    cyc = (
        np.einsum("sij,lsk->lijk", c, c)
        + np.einsum("sjk,lsi->lijk", c, c)
        + np.einsum("ski,lsj->lijk", c, c)
    )
    return float(np.max(np.abs(cyc)))


def unimodular_defect(sc: StructureConstants) -> float:
    """Max over i of ``| sum_s C^s_si |`` (trace of the adjoint maps)."""
    return float(np.max(np.abs(np.einsum("ssi->i", sc.c))))


def transform(sc: StructureConstants, q) -> StructureConstants:
    """Re-express the constants in the frame ``E'_i = q[j, i] E_j``.

    Implements ``C'^k_ij = q^s_i q^m_j C^l_sm (q^{-1})^k_l``.  Chained frame
    changes compose by matrix product on the right:
    ``transform(transform(c, q1), q2) == transform(c, q1 @ q2)``.
    """
    qm = as_square_matrix(q)
    if qm.shape[0] != sc.n:
        raise ValueError(f"frame matrix is {qm.shape[0]}x{qm.shape[0]}, algebra has n={sc.n}")
    qinv = inverse(qm)
    return StructureConstants(kern.transform_constants(sc.c, qm, qinv))


def preset_constants(name: str) -> StructureConstants:
    """Structure constants for a named preset."""
    return from_unimodular3(preset(name))
