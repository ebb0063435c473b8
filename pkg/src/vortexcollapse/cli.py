"""Command-line front end: ``vortexcollapse <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, diagrams, dynamics, families, formats, solver
from .core import VortexSystem, classify, invariants
from .errors import AuditViolation, DomainError, VerificationFailure

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_IO, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _gammas(text: str) -> VortexSystem:
    try:
        values = [float(_number(t)) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse --gammas {text!r}") from exc
    return VortexSystem(np.array(values))


def _number(token: str) -> float:
    """Accept plain decimals and simple fractions such as ``-1/2``."""
    token = token.strip()
    if "/" in token:
        num, den = token.split("/", 1)
        return float(num) / float(den)
    return float(token)


def _complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected re,im but got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="write machine-readable JSON to stdout")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--out", type=Path, help="CSV output path")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--gammas", required=True, help="comma-separated vorticities")
    search.add_argument("--starts", type=int, default=2000)
    search.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="vortexcollapse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", parents=[common], help="Γ, L, M, I and S of a configuration")
    p.add_argument("--config", type=Path, required=True, help="configuration JSON")

    p = sub.add_parser("classify", parents=[common], help="stationary class of a configuration")
    p.add_argument("--config", type=Path, required=True)

    p = sub.add_parser("solve", parents=[common, search], help="normalized solutions at one lambda")
    p.add_argument("--lambda", dest="lam", required=True, help="re,im")

    p = sub.add_parser("scan", parents=[common, search], help="solve on a grid of the unit circle")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--counts", type=Path, help="write the folded count JSON here")
    p.add_argument("--audit", action="store_true", help="audit the counts against the degree bounds")

    p = sub.add_parser("family", parents=[common], help="five-vortex collapse continuum")
    p.add_argument("--a", type=float, help="family parameter")
    p.add_argument("--sign-b", type=int, default=1, choices=(1, -1))
    p.add_argument("--sign-c", type=int, default=1, choices=(1, -1))
    p.add_argument("--verify", action="store_true")
    p.add_argument("--sweep", type=int, metavar="COUNT", help="sample COUNT parameters instead")

    p = sub.add_parser("simulate", parents=[common], help="integrate the equations of motion")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path)
    src.add_argument("--family-a", type=float)
    p.add_argument("--sign-b", type=int, default=1, choices=(1, -1))
    p.add_argument("--sign-c", type=int, default=-1, choices=(1, -1))
    p.add_argument("--t-end", type=float, help="final time (default 0.99 of the collapse time)")
    p.add_argument("--rel-tol", type=float, default=1e-12)
    p.add_argument("--events", action="store_true", help="append collision-approach records")

    p = sub.add_parser("diagrams", parents=[common], help="diagram admissibility for four vorticities")
    p.add_argument("--gammas", required=True)

    p = sub.add_parser("bounds", parents=[common], help="degree ledger and count audit")
    p.add_argument("--counts", type=Path, help="count JSON to audit")
    p.add_argument("--collinear", type=int, default=bounds.COLLINEAR_COUNT)
    return parser


# -- subcommands return (payload, exit code)


def _cmd_invariants(args):
    config, system = formats.read_configuration(args.config)
    inv = invariants(config, system)
    return {
        "total_vorticity": inv.total_vorticity,
        "angular_momentum": inv.angular_momentum,
        "moment": [inv.moment.real, inv.moment.imag],
        "angular_impulse": inv.angular_impulse,
        "weighted_sum": inv.weighted_sum,
    }, EXIT_OK


def _cmd_classify(args):
    config, system = formats.read_configuration(args.config)
    c = classify(config, system, args.tol)
    out = {"kind": c.kind, "residual": c.residual, "warnings": list(c.warnings)}
    if c.velocity is not None:
        out["velocity"] = [c.velocity.real, c.velocity.imag]
    if c.lam is not None:
        out["lambda"] = [c.lam.real, c.lam.imag]
        out["center"] = [c.center.real, c.center.imag]
    if c.checks:
        out["checks"] = c.checks
    return out, EXIT_OK


def _write_solutions(args, candidates, system):
    if args.out:
        header, rows = formats.solutions_rows(candidates, system)
        with open(args.out, "w", newline="") as fh:
            formats.write_csv(rows, header, fh)


def _cmd_solve(args):
    system = _gammas(args.gammas)
    lam = _complex(args.lam)
    result = solver.solve_fixed_lambda(system, lam, args.starts, args.seed, args.tol)
    _write_solutions(args, result.candidates, system)
    return {
        "lambda": [lam.real, lam.imag],
        "solutions": len(result.candidates),
        "real": sum(1 for c in result.candidates if c.is_real()),
        "collinear": sum(1 for c in result.candidates if c.is_collinear()),
    }, EXIT_OK


def _cmd_scan(args):
    system = _gammas(args.gammas)
    result = solver.scan_lambda(system, args.grid, args.starts, args.seed, args.tol)
    _write_solutions(args, result.candidates, system)
    counts = bounds.counts_from_scan(result.per_lambda_counts)
    if args.counts:
        formats.write_json(formats.counts_to_dict(counts), args.counts)
    payload = {
        "grid": args.grid,
        "real_counts": [
            {"re": lam.real, "im": lam.imag, "count": result.per_lambda_counts[lam],
             "complex": result.complex_counts[lam]}
            for lam in result.lambda_grid
        ],
        "lambdas_with_real_collapse": sum(1 for v in result.per_lambda_counts.values() if v > 0),
    }
    code = EXIT_OK
    if args.audit:
        report = bounds.audit(counts, raise_on_violation=False)
        payload["audit"] = {"passed": report.passed, "violated": report.violated}
        code = EXIT_OK if report.passed else EXIT_VERIFY
    return payload, code


def _cmd_family(args):
    if args.sweep:
        rows = families.sweep(args.sweep, args.sign_b, args.sign_c)
        if args.out:
            header, lines = formats.sweep_rows(rows)
            with open(args.out, "w", newline="") as fh:
                formats.write_csv(lines, header, fh)
        worst = max(r.residual for r in rows)
        return {"samples": len(rows), "max_residual": worst}, EXIT_OK
    if args.a is None:
        raise UsageError("family needs --a or --sweep")
    p = families.FamilyParameter(args.a, args.sign_b, args.sign_c)
    config, system = families.family_configuration(p)
    lam = families.family_lambda(p)
    out = {
        "a": p.a,
        "gammas": system.gammas.tolist(),
        "b": p.offsets()[0],
        "c": p.offsets()[1],
        "lambda": [lam.real, lam.imag],
        "abs_lambda_minus_1": abs(abs(lam) - 1.0),
        "positions": [[z.real, z.imag] for z in config.positions],
    }
    if args.verify:
        report = families.verify_family(p, args.tol)
        out["checks"] = report.checks
        out["passed"] = report.passed
    return out, EXIT_OK


def _cmd_simulate(args):
    if args.config:
        config, system = formats.read_configuration(args.config)
        lam = None
    else:
        p = families.FamilyParameter(args.family_a, args.sign_b, args.sign_c)
        config, system = families.family_configuration(p)
        lam = families.family_lambda(p)
    t_end = args.t_end
    if t_end is None:
        t_star = dynamics.collapse_time(lam) if lam is not None else None
        if t_star is None:
            raise UsageError("--t-end is required unless the start collapses forward in time")
        t_end = 0.99 * t_star
    traj = dynamics.integrate(config, system, t_end, args.rel_tol)
    if args.out:
        header, rows = formats.trajectory_rows(traj)
        with open(args.out, "w", newline="") as fh:
            formats.write_csv(rows, header, fh)
            if args.events:
                for name, t in traj.events:
                    fh.write(f"# event,{name},{formats.format_float(t)}\n")
    out = {
        "status": traj.status,
        "steps": int(traj.times.size),
        "final_time": traj.final_time,
        "hamiltonian_drift": float(np.abs(traj.hamiltonian - traj.hamiltonian[0]).max()),
        "impulse_drift": float(np.abs(traj.impulse - traj.impulse[0]).max()),
        "moment_drift": float(np.abs(traj.moment - traj.moment[0]).max()),
    }
    if args.events:
        out["events"] = [{"name": n, "t": t} for n, t in traj.events]
    return out, EXIT_OK


def _cmd_diagrams(args):
    system = _gammas(args.gammas)
    report = diagrams.narrowed_admissibility(system, args.tol)
    return report.to_dict(), EXIT_OK


def _cmd_bounds(args):
    book = bounds.ledger()
    out = {
        "raw_degree": book.raw_degree,
        "deg_case1": book.deg_case1,
        "deg_case2": book.deg_case2,
        "deg_case3": book.deg_case3,
        "net_degree": book.net_degree,
        "trivial_multiplicity": book.trivial_multiplicity,
        "budget": book.budget,
        "corollaries": book.corollaries(args.collinear, args.collinear),
        "note": book.note,
    }
    code = EXIT_OK
    if args.counts:
        counts = formats.counts_from_dict(formats.read_json(args.counts))
        report = bounds.audit(counts, collinear=args.collinear, raise_on_violation=False)
        out["audit"] = {
            "passed": report.passed,
            "weighted_total": report.weighted_total,
            "violated": report.violated,
            "checks": {k: list(v) for k, v in report.checks.items()},
        }
        code = EXIT_OK if report.passed else EXIT_VERIFY
    return out, code


COMMANDS = {
    "invariants": _cmd_invariants,
    "classify": _cmd_classify,
    "solve": _cmd_solve,
    "scan": _cmd_scan,
    "family": _cmd_family,
    "simulate": _cmd_simulate,
    "diagrams": _cmd_diagrams,
    "bounds": _cmd_bounds,
}


def _render(payload: dict, as_json: bool) -> str:
    if as_json:
        return formats.dumps(payload)
    lines = []
    for key, value in payload.items():
        text = formats.dumps(value, indent=0).replace("\n", " ") if isinstance(value, (dict, list)) else (
            formats.format_float(value) if isinstance(value, float) else str(value))
        lines.append(f"{key}: {text}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        payload, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"vortexcollapse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (VerificationFailure, AuditViolation) as exc:
        print(f"vortexcollapse: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (OSError, json.JSONDecodeError, formats.FormatError) as exc:
        print(f"vortexcollapse: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, ValueError) as exc:
        print(f"vortexcollapse: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(_render(payload, args.json))
    return code


if __name__ == "__main__":
    sys.exit(main())
