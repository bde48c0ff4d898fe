"""The metric-evolution ODE on the upper-triangular frame group.

Keeping a frame ``E_i(t) = B^j_i(t) E_j`` orthonormal along the Ricci flow
``dg/dt = -2 Rc`` forces the frame curve to satisfy

    (B^-1 dB/dt) + (B^-1 dB/dt)^T = 2 R(t),

where ``R(t)`` is the Ricci matrix of the structure constants re-expressed in
the current frame.  This only constrains the symmetric part of ``B^-1 dB/dt``;
restricting the curve to upper-triangular matrices with positive diagonal
removes the orthogonal gauge freedom, and then

    M = B^-1 dB/dt  with  M_ii = R_ii,  M_ij = 2 R_ij (i < j),  M_ij = 0 (i > j)

is the *unique* triangular solution of ``M + M^T = 2R``.  The integrated
system is ``dB/dt = B M``, with the metric recovered in the initial frame as
``g = (B^-1)^T (B^-1)``.  The ``+2R`` sign means the frame expands exactly
where the metric contracts; a shrinking metric therefore shows up as frame
blow-up, which is how finite-time collapse is detected.

The optional normalized mode replaces ``R`` by its trace-free part
``R - (tr R / n) I`` before lifting.  Since left-invariant metrics have
constant scalar curvature, the volume-averaged scalar curvature of the usual
normalized flow is pointwise, and the lifted matrix becomes traceless, so
``det g`` is conserved.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels as kern
from .curvature import pullback_symmetric, ricci_parts
from .errors import InvalidConfig, SingularMatrix
from .lie import StructureConstants, transform
from .matrix import DEFAULT_SINGULARITY_TOL, as_square_matrix, inverse

METHODS = ("rk4_fixed", "rk_adaptive")

TERMINATION_COMPLETED = "completed"
TERMINATION_COLLAPSED = "collapsed"
TERMINATION_STEP_UNDERFLOW = "step_underflow"
TERMINATION_MAX_STEPS = "max_steps"

_SAFETY = 0.9
_FACTOR_MIN = 0.2
_FACTOR_MAX = 5.0
_PUSH_BUDGET = 5000
_PUSH_STALL_LIMIT = 200

# Dormand-Prince 5(4) pair; the 5th-order solution is propagated and the
# difference to the embedded 4th-order one is the error estimate.
_DP_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


@dataclass
class FlowConfig:
    """Integration settings.

    ``collapse_threshold`` acts on the max-magnitude entry of the frame
    matrix B; ``min_step`` is the floor below which the adaptive controller
    gives up (and the blow-up probe takes over, see :func:`integrate`).
    """

    method: str = "rk_adaptive"
    h0: float = 1e-3
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_end: float = 1.0
    max_steps: int = 10_000_000
    collapse_threshold: float = 1e8
    min_step: float = 1e-14
    sample_every: int = 1
    normalized: bool = False

    def validate(self) -> None:
        if self.method not in METHODS:
            raise InvalidConfig(f"method must be one of {METHODS}, got {self.method!r}")
        if not (self.h0 > 0.0):
            raise InvalidConfig(f"h0 must be positive, got {self.h0}")
        if not (self.t_end > 0.0):
            raise InvalidConfig(f"t_end must be positive, got {self.t_end}")
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise InvalidConfig("tolerances must be positive")
        if not (0.0 < self.min_step < self.h0):
            raise InvalidConfig(f"min_step must lie in (0, h0), got {self.min_step}")
        if self.max_steps < 1:
            raise InvalidConfig("max_steps must be at least 1")
        if self.sample_every < 1:
            raise InvalidConfig("sample_every must be at least 1")
        if not (self.collapse_threshold > 0.0):
            raise InvalidConfig("collapse_threshold must be positive")


@dataclass
class FlowState:
    """Time and the current upper-triangular frame matrix."""

    t: float
    b: np.ndarray


@dataclass
class FlowSample:
    """One recorded point: frame matrix ``b``, metric ``g`` and Ricci tensor
    ``ricci`` in the fixed initial frame, and the scalar curvature."""

    t: float
    b: np.ndarray
    g: np.ndarray
    ricci: np.ndarray
    scalar: float


@dataclass
class Trajectory:
    n: int
    samples: list[FlowSample] = field(default_factory=list)
    termination: str = TERMINATION_COMPLETED
    collapse_time_estimate: Optional[float] = None
    config: Optional[FlowConfig] = None


def triangular_lift(ric) -> np.ndarray:
    """The unique upper-triangular M with ``M + M.T == 2 * ric``."""
    r = as_square_matrix(ric)
    return np.triu(2.0 * r, k=1) + np.diag(np.diag(r))


def _check_frame_invertible(b) -> None:
    scale = np.max(np.abs(b))
    if scale == 0.0 or np.min(np.abs(np.diag(b))) <= DEFAULT_SINGULARITY_TOL * scale:
        raise SingularMatrix("triangular frame matrix is numerically singular")


def rhs(c_base: StructureConstants, b, normalized: bool = False) -> np.ndarray:
    """Time derivative ``dB/dt = B M`` of the triangular frame curve.

    ``b`` may be a :class:`FlowState` or a square array; it must be upper
    triangular and invertible.  The result is exactly upper triangular.
    """
    if isinstance(b, FlowState):
        b = b.b
    bm = as_square_matrix(b)
    if bm.shape[0] != c_base.n:
        raise ValueError(f"frame is {bm.shape[0]}x{bm.shape[0]}, algebra has n={c_base.n}")
    if np.any(bm[np.tril_indices(bm.shape[0], k=-1)] != 0.0):
        raise ValueError("frame matrix must be upper triangular")
    _check_frame_invertible(bm)
    return np.asarray(kern.flow_rhs(c_base.c, bm, normalized))


def _rhs_trusted(c_arr, b, normalized):
    # integrate() stage evaluations: skip shape/triangularity re-validation
    _check_frame_invertible(b)
    return kern.flow_rhs(c_arr, b, normalized)


def metric_in_initial_frame(b) -> np.ndarray:
    """Metric components in the fixed initial frame: ``(B^-1)^T (B^-1)``.

    The frame columns of B are orthonormal for the evolving metric, so the
    metric against the initial frame is the Gram matrix of the inverse.
    Symmetric positive definite for invertible ``b``.
    """
    binv = inverse(b)
    g = binv.T @ binv
    return 0.5 * (g + g.T)


def ricci_in_initial_frame(b, r_frame) -> np.ndarray:
    """Pull the orthonormal-frame Ricci matrix back to the initial frame."""
    binv = inverse(b)
    rc = pullback_symmetric(r_frame, binv)
    return 0.5 * (rc + rc.T)


def _rk45_attempt(deriv, b, h):
    """One Dormand-Prince attempt; returns (5th-order result, error matrix).

    Overflow in trial evaluations is an expected signal near frame blow-up
    (the caller checks finiteness), so it is not allowed to warn.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        k = [deriv(b)]
        for row in _DP_A:
            stage = b
            for a_ij, k_j in zip(row, k):
                if a_ij != 0.0:
                    stage = stage + (h * a_ij) * k_j
            k.append(deriv(stage))
        b5 = k.pop()  # 7th stage was evaluated at the 5th-order solution
        y5 = b
        for w, k_j in zip(_DP_B5, k):
            if w != 0.0:
                y5 = y5 + (h * w) * k_j
        k.append(deriv(y5))
        err = np.zeros_like(b)
        for w5, w4, k_j in zip(_DP_B5, _DP_B4, k):
            err = err + (h * (w5 - w4)) * k_j
    return y5, err


def _rk4_step(deriv, b, h):
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = deriv(b)
        k2 = deriv(b + (0.5 * h) * k1)
        k3 = deriv(b + (0.5 * h) * k2)
        k4 = deriv(b + h * k3)
        return b + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _error_norm(err, b, cfg):
    denom = cfg.abs_tol + cfg.rel_tol * np.abs(b)
    return float(np.max(np.abs(err) / denom))


def _confirm_blowup(deriv, b, t, cfg):
    """Probe past an adaptive-step underflow with uncontrolled min_step steps.

    Near a finite-time singularity the tolerance-satisfying step shrinks in
    proportion to the remaining time, so the controller underflows while the
    frame norm is still finite; the system is autonomous, so pushing on at the
    step floor cheaply distinguishes true frame blow-up (the norm crosses the
    collapse threshold, or overflows) from a plain stall.  Returns the
    crossing time, or None if the frame stops growing first.
    """
    best = float(np.max(np.abs(b)))
    stall = 0
    budget = min(_PUSH_BUDGET, int(np.ceil((cfg.t_end - t) / cfg.min_step)) + 1)
    for _ in range(budget):
        try:
            b_new, _ = _rk45_attempt(deriv, b, cfg.min_step)
        except SingularMatrix:
            return None
        if not np.isfinite(b_new).all():
            return t
        b = np.triu(b_new)
        t = t + cfg.min_step
        if t > cfg.t_end:
            return None
        m = float(np.max(np.abs(b)))
        if m > cfg.collapse_threshold:
            return t
        if m > best:
            best = m
            stall = 0
        else:
            stall += 1
            if stall > _PUSH_STALL_LIMIT:
                return None
    return None


def integrate(c_base: StructureConstants, b0, cfg: FlowConfig) -> Trajectory:
    """Advance the frame curve from ``B(0) = b0`` toward ``cfg.t_end``.

    ``rk4_fixed`` takes classical steps of size ``h0``; ``rk_adaptive`` uses
    the embedded Dormand-Prince pair with error norm
    ``max |e_ij| / (abs_tol + rel_tol |b_ij|)``, accepting steps with norm at
    most 1 and rescaling by ``0.9 * norm^(-1/5)`` clamped to [0.2, 5.0].
    After every accepted step the strictly-lower entries of B are re-zeroed:
    the exact solution stays upper triangular, so this is a projection onto
    the invariant manifold that removes floating drift.

    Termination: ``completed`` at ``t_end``; ``collapsed`` when the max
    frame entry exceeds ``collapse_threshold`` (with
    ``collapse_time_estimate`` set to the crossing time, located by the
    blow-up probe if the step controller underflows first);
    ``step_underflow`` when the adaptive step drops below ``min_step``
    without frame blow-up; ``max_steps`` otherwise.  Samples record every
    ``sample_every``-th accepted step plus the initial and final states;
    probe states past the controller's accuracy floor are not recorded.
    """
    cfg.validate()
    b = as_square_matrix(b0).copy()
    n = b.shape[0]
    if n != c_base.n:
        raise InvalidConfig(f"b0 is {n}x{n}, algebra has n={c_base.n}")
    if np.any(b[np.tril_indices(n, k=-1)] != 0.0):
        raise InvalidConfig("b0 must be upper triangular (strict lower entries zero)")
    if np.any(np.diag(b) <= 0.0):
        raise InvalidConfig("b0 must have strictly positive diagonal")

    c_arr = c_base.c
    deriv = lambda m: _rhs_trusted(c_arr, m, cfg.normalized)  # noqa: E731

    traj = Trajectory(n=n, config=cfg)

    def record(t, bmat):
        binv = inverse(bmat)
        g = binv.T @ binv
        g = 0.5 * (g + g.T)
        ct = StructureConstants(kern.transform_constants(c_arr, bmat, binv))
        r_frame = ricci_parts(ct).total
        rc = pullback_symmetric(r_frame, binv)
        rc = 0.5 * (rc + rc.T)
        traj.samples.append(FlowSample(t=t, b=bmat.copy(), g=g, ricci=rc,
                                       scalar=float(np.trace(r_frame))))

    record(0.0, b)
    if cfg.method == "rk4_fixed":
        _run_fixed(deriv, b, cfg, traj, record)
    else:
        _run_adaptive(deriv, b, cfg, traj, record)
    return traj


def _run_fixed(deriv, b, cfg, traj, record):
    t = 0.0
    accepted = 0
    eps_end = 1e-12 * cfg.t_end
    while True:
        if t >= cfg.t_end - eps_end:
            traj.termination = TERMINATION_COMPLETED
            break
        if accepted >= cfg.max_steps:
            traj.termination = TERMINATION_MAX_STEPS
            break
        h = min(cfg.h0, cfg.t_end - t)
        try:
            b_new = _rk4_step(deriv, b, h)
        except SingularMatrix:
            traj.termination = TERMINATION_STEP_UNDERFLOW
            break
        if not np.isfinite(b_new).all():
            # fixed-step overrun of a blow-up: the frame left the finite range
            traj.termination = TERMINATION_COLLAPSED
            traj.collapse_time_estimate = t
            break
        b = np.triu(b_new)
        t = cfg.t_end if cfg.t_end - (t + h) < eps_end else t + h
        accepted += 1
        if float(np.max(np.abs(b))) > cfg.collapse_threshold:
            traj.termination = TERMINATION_COLLAPSED
            traj.collapse_time_estimate = t
            record(t, b)
            return
        if accepted % cfg.sample_every == 0 or t >= cfg.t_end - eps_end:
            record(t, b)
    if traj.samples[-1].t < t:
        record(t, b)


def _run_adaptive(deriv, b, cfg, traj, record):
    t = 0.0
    h = min(cfg.h0, cfg.t_end)
    attempts = 0
    accepted = 0
    eps_end = 1e-12 * cfg.t_end

    def finish(termination, collapse_t=None, final_state=None):
        traj.termination = termination
        traj.collapse_time_estimate = collapse_t
        if final_state is not None:
            t_f, b_f = final_state
            if traj.samples[-1].t < t_f:
                record(t_f, b_f)

    while True:
        if t >= cfg.t_end - eps_end:
            finish(TERMINATION_COMPLETED)
            return
        if attempts >= cfg.max_steps:
            finish(TERMINATION_MAX_STEPS, final_state=(t, b))
            return
        trimmed = h >= cfg.t_end - t
        h_try = cfg.t_end - t if trimmed else h
        if not trimmed and h_try < cfg.min_step:
            t_cross = _confirm_blowup(deriv, b, t, cfg)
            if t_cross is None:
                finish(TERMINATION_STEP_UNDERFLOW, final_state=(t, b))
            else:
                finish(TERMINATION_COLLAPSED, collapse_t=t_cross, final_state=(t, b))
            return
        attempts += 1
        try:
            b5, err = _rk45_attempt(deriv, b, h_try)
            bad = not (np.isfinite(b5).all() and np.isfinite(err).all())
        except SingularMatrix:
            bad = True
        if bad:
            h = h_try * _FACTOR_MIN
            continue
        norm = _error_norm(err, b, cfg)
        if norm <= 1.0:
            b = np.triu(b5)
            t = cfg.t_end if trimmed else t + h_try
            accepted += 1
            at_end = t >= cfg.t_end - eps_end
            if float(np.max(np.abs(b))) > cfg.collapse_threshold:
                record(t, b)
                finish(TERMINATION_COLLAPSED, collapse_t=t)
                return
            if accepted % cfg.sample_every == 0 or at_end:
                record(t, b)
            if norm == 0.0:
                factor = _FACTOR_MAX
            else:
                factor = min(_FACTOR_MAX, max(_FACTOR_MIN, _SAFETY * norm ** -0.2))
            h = h_try * factor
        else:
            h = h_try * max(_FACTOR_MIN, _SAFETY * norm ** -0.2)


def integrate_general_linear(c_base: StructureConstants, q0, t_end: float, h: float,
                             gauge: Optional[Callable[[float], np.ndarray]] = None,
                             normalized: bool = False) -> list[tuple[float, np.ndarray]]:
    """Fixed-step integration of the frame ODE without the triangular gauge.

    Advances ``dQ/dt = Q (M(Q) + K(t))`` with ``M`` the triangular lift of the
    current Ricci matrix and ``K(t)`` an arbitrary bounded antisymmetric gauge
    term (default zero).  Any such K leaves the symmetric part of
    ``Q^-1 dQ/dt`` equal to the Ricci matrix, so the metric trajectory
    ``(Q^-1)^T (Q^-1)`` is independent of it; this is the verification path
    for the triangular reduction.  Returns ``[(t, Q), ...]`` for every step.
    """
    q = as_square_matrix(q0).copy()
    n = q.shape[0]
    if n != c_base.n:
        raise ValueError(f"q0 is {n}x{n}, algebra has n={c_base.n}")
    if not (t_end > 0.0 and h > 0.0):
        raise ValueError("t_end and h must be positive")

    def deriv(t, qm):
        qinv = inverse(qm)
        ct = kern.transform_constants(c_base.c, qm, qinv)
        r1, r2, r3, r4 = kern.ricci_parts(ct)
        ric = np.asarray(r1) + r2 + r3 + r4
        if normalized:
            ric = ric - (np.trace(ric) / n) * np.eye(n)
        m = triangular_lift(ric)
        if gauge is not None:
            m = m + gauge(t)
        return qm @ m

    out = [(0.0, q.copy())]
    steps = int(round(t_end / h))
    if abs(steps * h - t_end) > 1e-9 * t_end:
        raise ValueError("t_end must be an integer multiple of h")
    t = 0.0
    for i in range(steps):
        k1 = deriv(t, q)
        k2 = deriv(t + 0.5 * h, q + (0.5 * h) * k1)
        k3 = deriv(t + 0.5 * h, q + (0.5 * h) * k2)
        k4 = deriv(t + h, q + h * k3)
        q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = (i + 1) * h
        out.append((t, q.copy()))
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _upper_indices(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


def trajectory_csv_header(n: int) -> str:
    cols = ["t"]
    for prefix in ("b", "g", "R"):
        cols.extend(f"{prefix}_{i + 1}{j + 1}" for i, j in _upper_indices(n))
    cols.append("scalar")
    return ",".join(cols)


def trajectory_to_csv(traj: Trajectory) -> str:
    """CSV with the upper parts of b, g, and the initial-frame Ricci tensor.

    Floats are written in shortest round-trip decimal form, so files are
    stable and diffable.
    """
    lines = [trajectory_csv_header(traj.n)]
    idx = _upper_indices(traj.n)
    for s in traj.samples:
        vals = [s.t]
        for mat in (s.b, s.g, s.ricci):
            vals.extend(mat[i, j] for i, j in idx)
        vals.append(s.scalar)
        lines.append(",".join(repr(float(v)) for v in vals))
    return "\n".join(lines) + "\n"


def trajectory_to_json_dict(traj: Trajectory, algebra_meta: Optional[dict] = None) -> dict:
    return {
        "algebra": algebra_meta,
        "config": asdict(traj.config) if traj.config is not None else None,
        "termination": traj.termination,
        "collapse_time_estimate": traj.collapse_time_estimate,
        "n": traj.n,
        "samples": [
            {
                "t": s.t,
                "b": s.b.tolist(),
                "g": s.g.tolist(),
                "ricci": s.ricci.tolist(),
                "scalar": s.scalar,
            }
            for s in traj.samples
        ],
    }


def write_trajectory_json(path, traj: Trajectory, algebra_meta: Optional[dict] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trajectory_to_json_dict(traj, algebra_meta), fh)
        fh.write("\n")


def write_trajectory_csv(path, traj: Trajectory) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(trajectory_to_csv(traj))
