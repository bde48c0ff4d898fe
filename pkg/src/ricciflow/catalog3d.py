"""Classification and frame normalization of 3D unimodular algebras.

The Cartan-Ricci form R1 of a six-parameter unimodular algebra is diagonal
exactly when the three quadratic residuals

    b1*b3 - a3*b2,   b2*b3 - a2*b1,   b1*b2 - a1*b3

vanish (they are, up to scale, the off-diagonal entries of R1).  Solving them
splits the diagonal situation into three cases, each of which reduces the
flow ODE to a small scalar system:

* Case I   -- all b vanish: B(t) can be taken diagonal and the flow closes in
  (f, g, h) with the closed-form Ricci of :func:`closed_form_ricci_case1`.
* Case II  -- exactly one b nonzero (the matching a is forced to zero): one
  extra off-diagonal frame entry w appears, with the four-function system
  driven by :func:`closed_form_ricci_case2`.
* Case III -- all b nonzero: the residuals force a1 = b1*b2/b3 (cyclically),
  and an explicit orthogonal change of frame maps the algebra onto a Case I
  algebra with a single nonzero bracket coefficient
  (:func:`case3_reduce`).  Exactly two nonzero b's is impossible.

Anything else leaves R1 non-diagonal; :func:`diagonalize_r1` then produces
the rotation into a frame where it is.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .curvature import ricci_parts
from .errors import DomainError
from .lie import StructureConstants, Unimodular3Params, from_unimodular3, transform
from .matrix import symmetric_eigen

DEFAULT_CLASSIFY_TOL = 1e-9


class CaseLabel(enum.Enum):
    CASE_I = "CaseI"
    CASE_II = "CaseII"
    CASE_III = "CaseIII"
    NON_DIAGONAL_R1 = "NonDiagonalR1"


def _coerce(p) -> Unimodular3Params:
    if isinstance(p, Unimodular3Params):
        return p
    return Unimodular3Params.from_sequence(p)


def diagonality_residuals(p) -> np.ndarray:
    """The three residuals whose vanishing makes R1 diagonal.

    They equal the (1,2), (1,3), (2,3) entries of ``ricci_parts(...).r1``.
    """
    q = _coerce(p)
    return np.array([
        q.b1 * q.b3 - q.a3 * q.b2,
        q.b2 * q.b3 - q.a2 * q.b1,
        q.b1 * q.b2 - q.a1 * q.b3,
    ])


def classify(p, tol: float = DEFAULT_CLASSIFY_TOL) -> CaseLabel:
    """Label the parameter vector by its diagonal-R1 case.

    ``tol`` is relative to the parameter scale: b-components are compared
    against ``tol * max|p|`` and the quadratic residuals against
    ``tol * max|p|^2``.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    q = _coerce(p)
    vals = np.array(q.as_tuple())
    scale = float(np.max(np.abs(vals)))
    if scale == 0.0:
        return CaseLabel.CASE_I
    b_nonzero = np.abs(np.array([q.b1, q.b2, q.b3])) > tol * scale
    n_nonzero = int(np.count_nonzero(b_nonzero))
    if n_nonzero == 0:
        return CaseLabel.CASE_I
    residuals_ok = bool(np.all(np.abs(diagonality_residuals(q)) <= tol * scale * scale))
    if residuals_ok and n_nonzero == 1:
        return CaseLabel.CASE_II
    if residuals_ok and n_nonzero == 3:
        return CaseLabel.CASE_III
    return CaseLabel.NON_DIAGONAL_R1


def diagonalize_r1(p, tol: float = 1e-10) -> tuple[np.ndarray, StructureConstants]:
    """Rotate the frame so the Cartan-Ricci form R1 becomes diagonal.

    Returns ``(rotation, constants)``.  When R1 is already diagonal to within
    ``tol`` the frame is left untouched (rotation is the identity); otherwise
    the rotation is the eigenvector matrix of R1 and the constants are
    transformed by it.
    """
    q = _coerce(p)
    sc = from_unimodular3(q)
    r1 = ricci_parts(sc).r1
    off = float(np.max(np.abs(r1 - np.diag(np.diag(r1)))))
    if off <= tol * max(1.0, float(np.max(np.abs(r1)))):
        return np.eye(3), sc
    _, rotation = symmetric_eigen(r1)
    return rotation, transform(sc, rotation)


def solve_case3_params(b1: float, b2: float, b3: float) -> tuple[float, float, float]:
    """The a-parameters forced by the diagonality residuals when all b > 0:
    ``a1 = b1 b2 / b3``, ``a2 = b2 b3 / b1``, ``a3 = b1 b3 / b2``."""
    if not (b1 > 0.0 and b2 > 0.0 and b3 > 0.0):
        raise DomainError(f"all b must be positive, got ({b1}, {b2}, {b3})")
    return b1 * b2 / b3, b2 * b3 / b1, b1 * b3 / b2


@dataclass(frozen=True)
class Case3Angles:
    """Angles (rho, alpha, beta) recovering positive b-parameters as

        b1^2 = rho cos(beta) cos(alpha) / sin(beta)
        b2^2 = rho sin(beta) cos(alpha) / cos(beta)
        b3^2 = sin(alpha)^2 rho sin(beta) cos(beta) / cos(alpha)

    with rho > 0 and alpha, beta in (0, pi/2)."""

    rho: float
    alpha: float
    beta: float

    def predicted_c123(self) -> float:
        """Magnitude of the single surviving bracket coefficient after the
        Case III frame rotation."""
        ca, cb, sb = math.cos(self.alpha), math.cos(self.beta), math.sin(self.beta)
        return math.sqrt(self.rho / (ca * cb * sb)) / math.sin(self.alpha)


def case3_reduce(b1: float, b2: float, b3: float) -> tuple[Case3Angles, np.ndarray, StructureConstants]:
    """Reduce an all-b-positive algebra to Case I by an orthogonal frame change.

    The a-parameters are those forced by the diagonality residuals
    (:func:`solve_case3_params`).  The angles come from the quotients of the
    ``Case3Angles`` relations: beta from b2/b1, alpha from b3 against b1*b2,
    rho from the first relation.  Returns ``(angles, frame, constants)`` where
    ``frame`` is the orthogonal matrix whose *columns* are the new frame
    vectors in the old frame, and ``constants = transform(c, frame)`` has a
    single nonzero bracket coefficient C^1_23 of magnitude
    ``angles.predicted_c123()``.
    """
    a1, a2, a3 = solve_case3_params(b1, b2, b3)
    beta = math.atan2(b2, b1)
    tan_alpha = b3 * math.hypot(b1, b2) / (b1 * b2)
    alpha = math.atan(tan_alpha)
    ca = math.cos(alpha)
    if ca <= 0.0 or math.sin(beta) <= 0.0:
        raise DomainError("angle recovery left the open quadrant (0, pi/2)")
    rho = b1 * b2 / ca
    if rho <= 0.0:
        raise DomainError(f"recovered rho must be positive, got {rho}")
    sa, cb, sb = math.sin(alpha), math.cos(beta), math.sin(beta)
    rows = np.array([
        [ca, sa * sb, sa * cb],
        [sa, -ca * sb, -ca * cb],
        [0.0, cb, -sb],
    ])
    frame = rows.T  # new frame vectors as columns, matching transform()
    sc = from_unimodular3((a1, a2, a3, b1, b2, b3))
    reduced = transform(sc, frame)
    return Case3Angles(rho=rho, alpha=alpha, beta=beta), frame, reduced


def closed_form_ricci_case1(a1: float, a2: float, a3: float,
                            f: float, g: float, h: float) -> np.ndarray:
    """Diagonal Ricci matrix of a Case I algebra in the frame diag(f, g, h).

    Independent oracle for the transform-and-decompose pipeline: evaluates
    the closed-form entries directly instead of contracting structure
    constants.
    """
    if f == 0.0 or g == 0.0 or h == 0.0:
        raise DomainError(f"frame scales must be nonzero, got ({f}, {g}, {h})")
    f2, g2, h2 = f * f, g * g, h * h
    r11 = a2 * a3 * f2 + a1 * a1 * g2 * h2 / (2 * f2) \
        - f2 * (a3 * a3 * g2 * g2 + a2 * a2 * h2 * h2) / (2 * g2 * h2)
    r22 = a1 * a3 * g2 + a2 * a2 * f2 * h2 / (2 * g2) \
        - g2 * (a3 * a3 * f2 * f2 + a1 * a1 * h2 * h2) / (2 * f2 * h2)
    r33 = (a3 * a3 * f2 * f2 * g2 * g2 - (a2 * f2 - a1 * g2) ** 2 * h2 * h2) \
        / (2 * f2 * g2 * h2)
    return np.diag([r11, r22, r33])


def closed_form_ricci_case2(a1: float, a3: float, b1: float,
                            f: float, g: float, h: float, w: float) -> np.ndarray:
    """Ricci matrix of a Case II algebra (a2 = 0, b2 = b3 = 0) in the frame
    with diagonal (f, g, h) and single off-diagonal entry w in row 3,
    column 1.

    Nonzero entries are R11, R22, R33 and the symmetric pair R13 = R31.  The
    w-coefficient in R13 is ``(2 b1^2 + a1 a3) f^2``: like every other term
    it is quadratic in the bracket coefficients, and it is the unique choice
    agreeing with the transform-and-decompose pipeline.
    """
    if f == 0.0 or h == 0.0:
        raise DomainError(f"denominator scales f, h must be nonzero, got ({f}, {h})")
    f2, g2, h2 = f * f, g * g, h * h
    w2 = w * w
    common = (
        a1 * a1 * w2 * w2
        - 4 * a1 * b1 * f * w2 * w
        + (4 * b1 * b1 + 2 * a1 * a3) * f2 * w2
        - 4 * a3 * b1 * f2 * f * w
        - a1 * a1 * h2 * h2
        + a3 * a3 * f2 * f2
    )
    r11 = -g2 * common / (2 * f2 * h2)
    r33 = g2 * common / (2 * f2 * h2)
    r13 = -g2 * (
        a1 * a1 * w2 * w
        - 3 * a1 * b1 * f * w2
        + (a1 * a1 * h2 + (2 * b1 * b1 + a1 * a3) * f2) * w
        - a1 * b1 * f * h2
        - a3 * b1 * f2 * f
    ) / (f2 * h)
    r22 = -g2 * (
        a1 * a1 * w2 * w2
        - 4 * a1 * b1 * f * w2 * w
        + (2 * a1 * a1 * h2 + (4 * b1 * b1 + 2 * a1 * a3) * f2) * w2
        - 4 * (a1 * b1 * f * h2 + a3 * b1 * f2 * f) * w
        + a1 * a1 * h2 * h2
        + (4 * b1 * b1 - 2 * a1 * a3) * f2 * h2
        + a3 * a3 * f2 * f2
    ) / (2 * f2 * h2)
    return np.array([
        [r11, 0.0, r13],
        [0.0, r22, 0.0],
        [r13, 0.0, r33],
    ])


def r1_closed_form_scaled(p) -> np.ndarray:
    """Closed form for the Cartan-Ricci form of a unimodular algebra in the
    normalization that equals ``-2 * ricci_parts(...).r1``."""
    q = _coerce(p)
    a1, a2, a3, b1, b2, b3 = q.as_tuple()
    return np.array([
        [-2 * a2 * a3 + 2 * b3 * b3, 2 * a3 * b2 - 2 * b1 * b3, 2 * a2 * b1 - 2 * b2 * b3],
        [2 * a3 * b2 - 2 * b1 * b3, -2 * a1 * a3 + 2 * b1 * b1, -2 * b1 * b2 + 2 * a1 * b3],
        [2 * a2 * b1 - 2 * b2 * b3, -2 * b1 * b2 + 2 * a1 * b3, -2 * a1 * a2 + 2 * b2 * b2],
    ])
