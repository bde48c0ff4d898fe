"""Command-line front end.

Subcommands: ``ricci`` (curvature report), ``flow`` (trajectory files),
``classify`` (3D case analysis), ``check`` (invariant battery), ``presets``.
Exit codes: 0 ok, 2 bad input, 3 singular matrix, 4 integration did not
complete, 5 domain error, 6 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .catalog3d import (
    CaseLabel,
    DEFAULT_CLASSIFY_TOL,
    case3_reduce,
    classify,
    diagonality_residuals,
    diagonalize_r1,
    solve_case3_params,
)
from .curvature import pullback_symmetric, ricci_combined, ricci_parts, ricci_via_connection
from .errors import DomainError, InvalidConfig, RicciflowError, SingularMatrix
from .flow import (
    FlowConfig,
    TERMINATION_COLLAPSED,
    TERMINATION_COMPLETED,
    integrate,
    trajectory_to_json_dict,
    write_trajectory_csv,
    write_trajectory_json,
)
from .lie import (
    PRESETS,
    StructureConstants,
    Unimodular3Params,
    from_unimodular3,
    jacobi_defect,
    preset,
    read_constants,
    transform,
    unimodular_defect,
)
from .matrix import as_square_matrix, factor_tri_orth


def _add_algebra_args(p, require_params=False):
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--preset", help="named algebra preset (see 'presets')")
    grp.add_argument("--params", help="inline parameters a1,a2,a3,b1,b2,b3")
    if not require_params:
        grp.add_argument("--algebra", help="structure-constants JSON file")


def _add_output_args(p):
    p.add_argument("--out", help="output path prefix")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both",
                   help="trajectory output format (flow only)")


def _parse_params(text) -> Unimodular3Params:
    try:
        return Unimodular3Params.from_sequence(text.split(","))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"could not parse --params {text!r}: {exc}") from exc


def _load_algebra(args):
    """Returns (constants, params-or-None, metadata dict)."""
    if args.preset is not None:
        p = preset(args.preset)
        return from_unimodular3(p), p, {"preset": args.preset, "params": list(p.as_tuple())}
    if args.params is not None:
        p = _parse_params(args.params)
        return from_unimodular3(p), p, {"params": list(p.as_tuple())}
    sc = read_constants(args.algebra)
    return sc, None, {"file": str(args.algebra), "constants": sc.to_json_dict()}


def _load_matrix_file(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return as_square_matrix(data)


def _prepare_out(prefix) -> None:
    parent = os.path.dirname(os.path.abspath(prefix))
    os.makedirs(parent, exist_ok=True)


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _fmt_matrix(m) -> str:
    return np.array2string(np.asarray(m), precision=12, suppress_small=False)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_ricci(args) -> int:
    sc, _, meta = _load_algebra(args)
    if args.b0 is not None:
        b0 = _load_matrix_file(args.b0)
        sc = transform(sc, b0)
        meta["b0"] = b0.tolist()
    dec = ricci_parts(sc)
    for name, mat in (("R1", dec.r1), ("R2", dec.r2), ("R3", dec.r3), ("R4", dec.r4),
                      ("total", dec.total)):
        print(f"{name} =")
        print(_fmt_matrix(mat))
    print(f"scalar = {dec.scalar!r}")
    if args.out:
        _prepare_out(args.out)
        payload = {"algebra": meta, **dec.to_json_dict()}
        _write_json(f"{args.out}.json", payload)
        print(f"wrote {args.out}.json")
    return 0


def cmd_flow(args) -> int:
    sc, _, meta = _load_algebra(args)
    b0 = _load_matrix_file(args.b0) if args.b0 is not None else np.eye(sc.n)
    cfg = FlowConfig(
        method="rk_adaptive" if args.method == "adaptive" else "rk4_fixed",
        h0=args.h0,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        t_end=args.t_end,
        collapse_threshold=args.collapse_threshold,
        sample_every=args.sample_every,
        normalized=args.normalized,
    )
    traj = integrate(sc, b0, cfg)
    print(f"termination: {traj.termination}")
    if traj.termination == TERMINATION_COLLAPSED:
        print(f"collapse_time_estimate: {traj.collapse_time_estimate!r}")
    print(f"samples: {len(traj.samples)} (t from {traj.samples[0].t!r} to {traj.samples[-1].t!r})")
    if args.out:
        _prepare_out(args.out)
        if args.format in ("csv", "both"):
            write_trajectory_csv(f"{args.out}.csv", traj)
            print(f"wrote {args.out}.csv")
        if args.format in ("json", "both"):
            write_trajectory_json(f"{args.out}.json", traj, algebra_meta=meta)
            print(f"wrote {args.out}.json")
    ok = traj.termination in (TERMINATION_COMPLETED, TERMINATION_COLLAPSED)
    return 0 if ok else 4


def cmd_classify(args) -> int:
    if args.preset is not None:
        p = preset(args.preset)
    else:
        p = _parse_params(args.params)
    if args.solve_a:
        a1, a2, a3 = solve_case3_params(p.b1, p.b2, p.b3)
        p = Unimodular3Params(a1, a2, a3, p.b1, p.b2, p.b3)
        print(f"solved a from b: a = ({a1!r}, {a2!r}, {a3!r})")
    label = classify(p, tol=args.tol)
    residuals = diagonality_residuals(p)
    print(f"label: {label.value}")
    print(f"residuals: {residuals.tolist()!r}")
    payload = {
        "params": list(p.as_tuple()),
        "label": label.value,
        "residuals": residuals.tolist(),
    }
    if label is CaseLabel.CASE_III:
        angles, frame, reduced = case3_reduce(p.b1, p.b2, p.b3)
        print(f"angles: rho={angles.rho!r} alpha={angles.alpha!r} beta={angles.beta!r}")
        print("frame =")
        print(_fmt_matrix(frame))
        print(f"reduced constants: C1_23 = {reduced.c[0, 1, 2]!r}")
        payload["angles"] = {"rho": angles.rho, "alpha": angles.alpha, "beta": angles.beta}
        payload["frame"] = frame.tolist()
        payload["reduced_constants"] = reduced.to_json_dict()
    elif label is CaseLabel.NON_DIAGONAL_R1:
        rotation, rotated = diagonalize_r1(p)
        print("diagonalizing rotation =")
        print(_fmt_matrix(rotation))
        payload["rotation"] = rotation.tolist()
        payload["rotated_constants"] = rotated.to_json_dict()
    if args.out:
        _prepare_out(args.out)
        _write_json(f"{args.out}.json", payload)
        print(f"wrote {args.out}.json")
    return 0


def _random_invertible(rng, n):
    while True:
        q = rng.uniform(-1.0, 1.0, (n, n))
        if abs(np.linalg.det(q)) > 0.2:
            return q


def _run_battery(sc, rng, n_frames):
    """Invariant battery; residuals are normalized by the scale of the
    quantities they compare, so the pass thresholds are scale-free."""
    results = []

    def add(name, residual, threshold, note=""):
        results.append((name, residual <= threshold, residual, threshold, note))

    add("jacobi_identity", jacobi_defect(sc), 1e-10)
    dec = ricci_parts(sc)
    sym = max(float(np.max(np.abs(m - m.T))) for m in (dec.r1, dec.r2, dec.r3, dec.r4))
    add("part_symmetry", sym, 1e-12)
    via = ricci_via_connection(sc)
    comb = ricci_combined(sc)
    scale = max(1.0, float(np.max(np.abs(dec.total))))
    agree = max(
        float(np.max(np.abs(dec.total - via))),
        float(np.max(np.abs(dec.total - comb))),
        float(np.max(np.abs(via - comb))),
    )
    add("ricci_three_path", agree / scale, 1e-10)

    worst_orth = 0.0
    worst_gl = 0.0
    for _ in range(n_frames):
        u = factor_tri_orth(_random_invertible(rng, sc.n)).u
        rotated = ricci_parts(transform(sc, u))
        for part, part0 in ((rotated.r1, dec.r1), (rotated.r2, dec.r2),
                            (rotated.r3, dec.r3), (rotated.r4, dec.r4)):
            dev = float(np.max(np.abs(part - pullback_symmetric(part0, u))))
            worst_orth = max(worst_orth, dev / max(1.0, float(np.max(np.abs(part0)))))
        q = _random_invertible(rng, sc.n)
        r1q = ricci_parts(transform(sc, q)).r1
        expected = pullback_symmetric(dec.r1, q)
        dev = float(np.max(np.abs(r1q - expected)))
        worst_gl = max(worst_gl, dev / max(1.0, float(np.max(np.abs(expected)))))
    add("orthogonal_equivariance", worst_orth, 1e-10)
    add("gl_equivariance_r1", worst_gl, 1e-10)

    ud = unimodular_defect(sc)
    if ud <= 1e-12:
        add("unimodular_r2_zero", float(np.max(np.abs(dec.r2))), 1e-12,
            note="R2 = 0 (unimodular)")
    else:
        results.append(("unimodularity", True, ud, float("inf"),
                        f"not unimodular (defect {ud:.3e}); R2 check skipped"))
    return results


def cmd_check(args) -> int:
    sc, _, meta = _load_algebra(args)
    rng = np.random.default_rng(args.seed)
    results = _run_battery(sc, rng, n_frames=args.frames)
    all_ok = True
    for name, ok, residual, threshold, note in results:
        status = "PASS" if ok else "FAIL"
        all_ok = all_ok and ok
        suffix = f"  [{note}]" if note else ""
        print(f"{status} {name:<26} residual = {residual:.3e}{suffix}")
    if args.out:
        _prepare_out(args.out)
        payload = {
            "algebra": meta,
            "seed": args.seed,
            "checks": [
                {"name": n, "pass": bool(o), "residual": r, "threshold": t, "note": note}
                for n, o, r, t, note in results
            ],
        }
        _write_json(f"{args.out}.json", payload)
        print(f"wrote {args.out}.json")
    return 0 if all_ok else 6


def cmd_presets(args) -> int:
    for name in sorted(PRESETS):
        print(f"{name:<12} a1,a2,a3,b1,b2,b3 = {','.join(repr(v) for v in PRESETS[name])}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ricciflow",
        description="Evolve left-invariant metrics on Lie groups by their curvature flow.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ricci = sub.add_parser("ricci", help="Ricci decomposition of an algebra at a frame")
    _add_algebra_args(p_ricci)
    p_ricci.add_argument("--b0", help="JSON file with an initial frame matrix")
    _add_output_args(p_ricci)
    p_ricci.set_defaults(func=cmd_ricci)

    p_flow = sub.add_parser("flow", help="integrate the frame ODE and write a trajectory")
    _add_algebra_args(p_flow)
    p_flow.add_argument("--b0", help="JSON file with the initial upper-triangular frame")
    p_flow.add_argument("--t-end", type=float, default=1.0, dest="t_end")
    p_flow.add_argument("--h0", type=float, default=1e-3)
    p_flow.add_argument("--method", choices=("rk4", "adaptive"), default="adaptive")
    p_flow.add_argument("--rel-tol", type=float, default=1e-8, dest="rel_tol")
    p_flow.add_argument("--abs-tol", type=float, default=1e-10, dest="abs_tol")
    p_flow.add_argument("--normalized", action="store_true")
    p_flow.add_argument("--collapse-threshold", type=float, default=1e8,
                        dest="collapse_threshold")
    p_flow.add_argument("--sample-every", type=int, default=1, dest="sample_every")
    _add_output_args(p_flow)
    p_flow.set_defaults(func=cmd_flow)

    p_cls = sub.add_parser("classify", help="diagonal-R1 case analysis of six parameters")
    grp = p_cls.add_mutually_exclusive_group(required=True)
    grp.add_argument("--preset")
    grp.add_argument("--params")
    p_cls.add_argument("--solve-a", action="store_true", dest="solve_a",
                       help="replace a1,a2,a3 by the values forced by the b's")
    p_cls.add_argument("--tol", type=float, default=DEFAULT_CLASSIFY_TOL)
    _add_output_args(p_cls)
    p_cls.set_defaults(func=cmd_classify)

    p_check = sub.add_parser("check", help="run the invariant battery on an algebra")
    _add_algebra_args(p_check)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--frames", type=int, default=50,
                         help="random frames per equivariance check")
    _add_output_args(p_check)
    p_check.set_defaults(func=cmd_check)

    p_presets = sub.add_parser("presets", help="list the named algebra presets")
    p_presets.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SingularMatrix as exc:
        print(f"error: singular matrix: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"error: domain error: {exc}", file=sys.stderr)
        return 5
    except (RicciflowError, ValueError, KeyError, TypeError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
