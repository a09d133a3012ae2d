"""Command line entry point: ``lambda-holonomy <subcommand> [flags]``.

Exit status is 0 when the subcommand's check passes, 2 when it fails, and 1
on errors.  Machine-readable results go to stdout (or ``--output``); the
one-line verdicts go to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import experiments as ex
from .dynamics import LoopSchedule, adiabaticity_report, basis_state, evolve
from .errors import LambdaHolonomyError
from .holonomy import (
    CircleLoop,
    discretize,
    loop_commutator_norm,
    loop_integral,
    phase_magnitude_error,
    solid_angle,
    wilson_loop,
)
from .lambda_gauge import (
    AbelianTestConnection,
    FrameConnection,
    LargeDetuningConnection,
    MagneticField,
    curvature,
    gamma_angle,
    sphere_flux,
    spinhalf_adiabatic_connection,
    spinhalf_curvature,
    spinhalf_curvature_fd,
    spinhalf_frame,
)
from .numerics import frobenius, pauli_components

PASS, FAIL, ERROR = 0, 2, 1


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON experiment config; flags override it")
    parser.add_argument("--delta", type=float, help="detuning in units of Omega_0")
    parser.add_argument("--omega", type=float, help="effective Rabi frequency")
    parser.add_argument("--alpha", type=float, help="relative pulse amplitude of both loops")
    parser.add_argument("--beta", type=float, help="pulse delay of both loops")
    parser.add_argument("--steps", type=int, help="Wilson-loop segments per loop")
    parser.add_argument("--dt", type=float, help="TDSE time step")
    parser.add_argument("--duration", type=float, help="duration of one loop (units 1/Omega)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--workers", type=int)
    parser.add_argument("--connection", choices=ex.CONNECTIONS)


def build_config(args) -> ex.ExperimentConfig:
    config = ex.ExperimentConfig.from_json(args.config) if args.config else ex.ExperimentConfig()
    params = config.params
    if args.delta is not None or args.omega is not None:
        params = replace(
            params,
            delta=params.delta if args.delta is None else args.delta,
            omega=params.omega if args.omega is None else args.omega,
        )
    updates = {"params": params}
    for flag, name in (("steps", "wilson_steps"), ("dt", "dt"), ("duration", "duration"),
                       ("seed", "seed"), ("output", "output_path"), ("format", "output_format"),
                       ("workers", "workers"), ("connection", "connection"), ("beta", "beta")):
        value = getattr(args, flag, None)
        if value is not None:
            updates[name] = value
    alphas = getattr(args, "alphas", None)
    if alphas:
        updates["alphas"] = tuple(float(a) for a in alphas.split(","))
    config = replace(config, **updates)
    if args.alpha is not None or args.beta is not None:
        alpha = args.alpha if args.alpha is not None else config.loop1.alpha
        beta = args.beta if args.beta is not None else config.loop1.beta
        config = ex.config_at(config, alpha, beta)
    return config


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(payload: dict, path: str | None = None) -> None:
    _write(json.dumps(payload, indent=2, default=_jsonable) + "\n", path)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"re": obj.real.tolist(), "im": obj.imag.tolist()}
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(type(obj))


def _verdict(name: str, ok: bool, detail: str) -> int:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", file=sys.stderr)
    return PASS if ok else FAIL


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_abelian_loop(args) -> int:
    steps = args.steps or 100_000
    rows = []
    ok = True
    for theta0 in args.theta0:
        hol = wilson_loop(discretize(CircleLoop(theta0), steps), AbelianTestConnection())
        phase = float(np.angle(hol.matrix[0, 0]))
        expected = math.pi * (1 - math.cos(2 * theta0))
        err = phase_magnitude_error(phase, expected)
        ok &= err <= 1e-6
        rows.append({"theta0": theta0, "phase": phase, "half_solid_angle": solid_angle(theta0) / 2,
                     "expected_mod_2pi": math.remainder(expected, 2 * math.pi),
                     "error": err, "richardson_error": hol.richardson_error})
    _dump({"steps": steps, "circles": rows}, args.output)
    return _verdict("abelian-loop", ok, f"max phase error {max(r['error'] for r in rows):.3e} (tol 1e-6)")


def cmd_curvature_map(args) -> int:
    n = args.grid
    theta, phi = np.meshgrid(np.linspace(0, math.pi / 2, n), np.linspace(0, 2 * math.pi, n), indexing="ij")
    f_large = frobenius(curvature(LargeDetuningConnection(), theta, phi))
    gamma = gamma_angle(build_config(args).params)
    f_frame = frobenius(curvature(FrameConnection(gamma), theta, phi))
    circle = discretize(CircleLoop(math.pi / 4), 4000)
    integral = loop_integral(circle, LargeDetuningConnection())
    payload = {
        "grid": n,
        "sup_curvature_large_detuning": float(f_large.max()),
        "sup_curvature_frame": float(f_frame.max()),
        "loop_integral_circle_pi_over_4_pauli": pauli_components(integral),
    }
    if args.output:
        header = "theta,phi,curvature_norm_large_detuning,curvature_norm_frame\n"
        lines = [f"{t:.12g},{p:.12g},{a:.12g},{b:.12g}" for t, p, a, b in
                 zip(theta.ravel(), phi.ravel(), f_large.ravel(), f_frame.ravel())]
        _write(header + "\n".join(lines) + "\n", args.output)
    else:
        _dump(payload)
    return _verdict("curvature-map", f_large.max() <= 1e-9,
                    f"sup |F| = {f_large.max():.3e} (tol 1e-9), loop integral "
                    f"|oint A| = {frobenius(integral):.4f}")


def cmd_spin_half(args) -> int:
    field = MagneticField(args.bx, args.by, args.bz)
    payload = {"field": [field.bx, field.by, field.bz], "branch": args.branch}
    try:
        payload["frame"] = spinhalf_frame(field)
    except LambdaHolonomyError as exc:
        payload["frame"] = f"chart singular: {exc}"
    closed = spinhalf_curvature(field, args.branch)
    fd = spinhalf_curvature_fd(field, args.branch)
    rel = float(np.abs(fd - closed).max() / np.abs(closed).max())
    flux = sphere_flux(args.branch, radius=field.b)
    target = 2 * math.pi if args.branch == "-" else -2 * math.pi
    payload.update(
        adiabatic_connection=spinhalf_adiabatic_connection(field, args.branch),
        curvature_closed_form=closed,
        curvature_finite_difference=fd,
        relative_difference=rel,
        sphere_flux=flux,
        chern_number=flux / (2 * math.pi),
    )
    _dump(payload, args.output)
    ok = rel <= 1e-6 and abs(flux - target) <= 0.005 * abs(target)
    return _verdict("spin-half", ok, f"curl rel diff {rel:.2e}, flux {flux:.6f} vs {target:.6f}")


def cmd_wilson(args) -> int:
    config = build_config(args)
    _, h1 = ex.loop_transport(config.loop1, config)
    _, h2 = ex.loop_transport(config.loop2, config)
    gamma = gamma_angle(config.params)
    full = wilson_loop(discretize(config.loop1, config.wilson_steps), FrameConnection(gamma), projected=False)
    comm = loop_commutator_norm(h1, h2)
    full_dev = float(frobenius(full.matrix - np.eye(3)))
    _dump({
        "holonomy_loop1": h1.matrix, "holonomy_loop2": h2.matrix,
        "richardson_error": [h1.richardson_error, h2.richardson_error],
        "commutator_norm": comm,
        "unprojected_identity_deviation": full_dev,
        "projected_identity_deviation": [float(frobenius(h1.matrix - np.eye(2))),
                                         float(frobenius(h2.matrix - np.eye(2)))],
    }, args.output)
    return _verdict("wilson", full_dev <= 1e-6 and comm > 0.1,
                    f"unprojected |U - I| = {full_dev:.2e} (tol 1e-6), commutator {comm:.3e} (need > 0.1)")


def cmd_compose(args) -> int:
    config = build_config(args)
    hol = ex.composed_path_pd(config, "holonomy")
    tdse = ex.composed_path_pd(config, "tdse")
    diff = abs(hol.pd - tdse.pd)
    _dump({"pd_holonomy": hol.pd, "pd_tdse": tdse.pd, "abs_diff": diff,
           "commutator_norm": hol.commutator_norm, "leakage": tdse.leakage,
           "norm_drift": tdse.norm_drift}, args.output)
    return _verdict("compose", diff <= ex.AGREEMENT_TOL, f"|pd_hol - pd_tdse| = {diff:.3e}")


def cmd_evolve(args) -> int:
    config = build_config(args)
    schedule = LoopSchedule(config.loop1, config.duration)
    result = evolve(schedule, config.params, basis_state(config.initial_state), config.dt)
    report = adiabaticity_report(schedule, config.params, config.dt,
                                 basis_state(config.initial_state))
    _dump({"populations": result.populations, "norm_drift": result.norm_drift,
           "steps": result.steps, "min_gap": result.min_gap, "leakage": report.leakage,
           "dynamical_phase_bound": report.dynamical_phase_bound,
           "adiabatic": report.adiabatic}, args.output)
    ok = result.norm_drift <= 1e-8 and report.adiabatic
    return _verdict("evolve", ok, f"norm drift {result.norm_drift:.2e}, leakage {report.leakage:.2e}")


def cmd_scan(args) -> int:
    config = build_config(args)
    rows = ex.alpha_scan(config)
    fmt = config.output_format
    if config.output_path:
        ex.emit(rows, fmt, config.output_path)
    else:
        sys.stdout.write(ex.rows_to_csv(rows) if fmt == "csv" else ex.rows_to_json(rows))
    gate = ex.scan_gate(rows)
    print(f"max P_d (holonomy) = {gate.max_pd_holonomy:.4g}; "
          f"reference maximum ~{ex.REFERENCE_MAX_PD:.2f}; gate requires >= {ex.MIN_MAX_PD}",
          file=sys.stderr)
    code = _verdict("scan agreement", gate.agreement_ok,
                    f"max |pd_hol - pd_tdse| = {gate.max_abs_diff:.3e}, "
                    f"max leakage {gate.max_leakage:.2e}, max norm drift {gate.max_norm_drift:.2e}")
    code = max(code, _verdict("scan magnitude", gate.magnitude_ok,
                              f"max P_d = {gate.max_pd_holonomy:.3e} (need >= {ex.MIN_MAX_PD})"))
    return code


def cmd_report(args) -> int:
    config = build_config(args)
    report = ex.two_method_report(config)
    _dump(report.to_dict(), args.output)
    return _verdict("report", report.passed,
                    "agreement within 0.02" if report.passed else "causes: " + ",".join(report.causes))


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambda-holonomy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("abelian-loop", help="solid-angle phase of the diagonal connection")
    _common(p)
    p.add_argument("--theta0", type=float, nargs="+",
                   default=[math.pi / 6, math.pi / 4, math.pi / 3])
    p.set_defaults(func=cmd_abelian_loop)

    p = sub.add_parser("curvature-map", help="field strength over a (theta, phi) grid")
    _common(p)
    p.add_argument("--grid", type=int, default=100)
    p.set_defaults(func=cmd_curvature_map)

    p = sub.add_parser("spin-half", help="spin-1/2 monopole reference checks")
    _common(p)
    p.add_argument("--bx", type=float, default=0.3)
    p.add_argument("--by", type=float, default=-0.4)
    p.add_argument("--bz", type=float, default=0.5)
    p.add_argument("--branch", choices=("+", "-"), default="-")
    p.set_defaults(func=cmd_spin_half)

    for name, func, text in (
        ("wilson", cmd_wilson, "projected and unprojected Wilson loops of the loop pair"),
        ("compose", cmd_compose, "composed-path population difference by both methods"),
        ("evolve", cmd_evolve, "TDSE along loop 1 with adiabaticity diagnostics"),
        ("report", cmd_report, "two-method comparison report"),
    ):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("scan", help="alpha scan at fixed beta, CSV/JSON rows")
    _common(p)
    p.add_argument("--alphas", help="comma-separated alpha grid (default 0.1..1.0)")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LambdaHolonomyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
