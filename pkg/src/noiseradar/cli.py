"""Command-line interface: ``noiseradar <subcommand> ...``.

Exit codes
----------
0  success
2  usage error (bad flags or out-of-range parameter values)
3  bad configuration or data file (includes I/O failures)
4  numerical or degenerate-input error
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from ._validation import DegenerateInputError
from .detection import (
    RocModel,
    default_pfa_grid,
    parse_pfa_grid,
    roc_curve,
)
from .estimator import CorrelationEstimator
from .io import (
    SchemaError,
    dump_json,
    manifest_path,
    read_block,
    write_csv,
    write_block,
    write_roc_csv,
    write_roc_json,
)
from .model import CouplingKind, QtmsCovariance
from .montecarlo import DEFAULT_MC_GRID, TrialConfig, TrialError, compare_to_theory, run_trials
from .range_model import (
    STATED_EXAMPLE_RC_M,
    REFERENCE_BUDGET,
    ConfigError,
    LinkBudget,
    RangeProfile,
    characteristic_range,
    characteristic_range_single_4pi,
    rho_at_range,
    snr_at_range,
)
from .synthesis import synthesize

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3, 4


def _write_manifest(args, argv, outputs, seeds=None):
    params = {k: v for k, v in vars(args).items() if k not in ("func",)}
    manifest = {
        "command": args.command,
        "argv": list(argv),
        "parameters": params,
        "seeds": seeds,
        "version": __version__,
        "outputs": [str(p) for p in outputs],
    }
    dump_json(manifest, manifest_path(outputs[0]))


def _is_reference_budget(budget):
    ref = LinkBudget.from_config(REFERENCE_BUDGET)
    fields = ("gain", "effective_area", "rcs", "tx_power", "noise_power")
    return all(math.isclose(getattr(budget, f), getattr(ref, f), rel_tol=1e-9) for f in fields)


def _profile_from_args(args):
    if args.config is not None:
        budget = LinkBudget.from_json(args.config)
        rho0 = budget.rho0 if args.rho0 is None else args.rho0
        return RangeProfile(rho0, characteristic_range(budget))
    if args.rc_m is None:
        raise ValueError("give --rc-m or --config")
    return RangeProfile(1.0 if args.rho0 is None else args.rho0, args.rc_m)


def _grid(args, default):
    return parse_pfa_grid(args.p_fa_grid) if args.p_fa_grid else np.asarray(default, dtype=float)


def cmd_rc(args, argv):
    budget = LinkBudget.from_json(args.config)
    rc = characteristic_range(budget)
    lines = [f"R_c = {rc:.12g} m (range at which SNR = 1, i.e. 0 dB)"]
    result = {"r_c_m": rc, "budget": budget.to_config()}
    if _is_reference_budget(budget):
        alt = characteristic_range_single_4pi(budget)
        note = (
            f"note: this reference budget is commonly quoted with R_c = {STATED_EXAMPLE_RC_M / 1000:.1f} km; "
            f"the (4*pi)^2 formula used here gives {rc:.1f} m, while a single 4*pi factor "
            f"would give {alt:.1f} m"
        )
        lines.append(note)
        result.update(note=note, r_c_single_4pi_m=alt, stated_r_c_m=STATED_EXAMPLE_RC_M)
    print("\n".join(lines))
    if args.out:
        dump_json(result, args.out)
        _write_manifest(args, argv, [args.out])
    return EXIT_OK


def cmd_rho_range(args, argv):
    profile = _profile_from_args(args)
    if args.r_min < 0 or args.r_max <= args.r_min or args.steps < 2:
        raise ValueError("need 0 <= r_min < r_max and steps >= 2")
    r = np.linspace(args.r_min, args.r_max, args.steps)
    rho = np.atleast_1d(rho_at_range(profile, r))
    marker = f"R_c = {profile.r_c!r} m, rho = rho0/sqrt(2) = {profile.rho0 / math.sqrt(2.0)!r}"
    rows = np.column_stack([r, rho])
    _emit_csv(args.out, ("range_m", "rho"), rows, [marker])
    if args.out:
        _write_manifest(args, argv, [args.out])
    return EXIT_OK


def _emit_csv(out, header, rows, comments=()):
    if out:
        write_csv(out, header, rows, comments)
    else:
        sys.stdout.write(",".join(header) + "\n")
        for c in comments:
            sys.stdout.write(f"# {c}\n")
        np.savetxt(sys.stdout, rows, fmt="%.17g", delimiter=",")


def cmd_roc(args, argv):
    grid = _grid(args, default_pfa_grid())
    model = RocModel(args.model)
    has_range_inputs = args.range is not None
    if model is RocModel.NOISE_RADAR:
        if args.rho is not None:
            strength = args.rho
        elif has_range_inputs:
            strength = rho_at_range(_profile_from_args(args), args.range)
        else:
            raise ValueError("noise model needs --rho or --range with --rc-m/--config")
    else:
        if args.snr is not None:
            strength = args.snr
        elif has_range_inputs:
            strength = snr_at_range(_profile_from_args(args), args.range)
        else:
            raise ValueError("conventional model needs --snr or --range with --rc-m/--config")
    curve = roc_curve(model, strength, args.n, grid)
    if has_range_inputs:
        curve.params["range_m"] = args.range
    if args.out and str(args.out).endswith(".json"):
        write_roc_json(curve, args.out)
    elif args.out:
        write_roc_csv(curve, args.out)
    else:
        _emit_csv(None, ("p_fa", "p_d"), np.column_stack([curve.p_fa, curve.p_d]))
    if args.out:
        _write_manifest(args, argv, [args.out])
    return EXIT_OK


def cmd_simulate(args, argv):
    params = QtmsCovariance(args.p1, args.p2, args.rho, args.phi, args.coupling)
    block = synthesize(params, args.n, args.seed, allow_degenerate=args.allow_degenerate)
    csv_path, side = write_block(block, args.out)
    _write_manifest(args, argv, [csv_path, side], seeds=[args.seed])
    return EXIT_OK


def cmd_estimate(args, argv):
    block = read_block(args.input)
    est = CorrelationEstimator(coupling=args.coupling, demean=args.demean).fit(block.channels)
    result = est.result_.to_dict()
    if args.out:
        dump_json(result, args.out)
        _write_manifest(args, argv, [args.out])
    else:
        print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_mc_roc(args, argv):
    config = TrialConfig(
        n_samples=args.n,
        rho=args.rho,
        phi=args.phi,
        coupling=args.coupling,
        trials_h0=args.trials_h0,
        trials_h1=args.trials_h1,
        base_seed=args.seed,
        randomize_phase=args.randomize_phase,
    )
    emp = run_trials(config, _grid(args, DEFAULT_MC_GRID), workers=args.workers)
    report = compare_to_theory(emp)
    dump_json(report, args.out)
    outputs = [args.out]
    if args.curve_csv:
        _emit_csv(args.curve_csv, ("p_fa", "p_d"), np.column_stack([emp.p_fa, emp.p_d]))
        outputs.append(args.curve_csv)
    _write_manifest(args, argv, outputs, seeds=[args.seed])
    print(f"max |p_d empirical - p_d theory| = {report['max_abs_gap']:.4g}")
    return EXIT_OK


def _add_range_source(p):
    p.add_argument("--rho0", type=float, help="maximum correlation (default 1, or the config's rho0)")
    p.add_argument("--rc-m", type=float, help="characteristic range in metres")
    p.add_argument("--config", help="link budget JSON file (alternative to --rc-m)")


def build_parser():
    parser = argparse.ArgumentParser(prog="noiseradar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    couplings = [c.value for c in CouplingKind]

    p = sub.add_parser("rc", help="characteristic range from a link budget")
    p.add_argument("--config", required=True, help="link budget JSON file")
    p.add_argument("--out", help="also write the result as JSON")
    p.set_defaults(func=cmd_rc)

    p = sub.add_parser("rho-range", help="rho versus range sweep as CSV")
    _add_range_source(p)
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=401)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_rho_range)

    p = sub.add_parser("roc", help="theoretical ROC curve")
    p.add_argument("--model", choices=["noise", "conventional"], default="noise")
    p.add_argument("--rho", type=float)
    p.add_argument("--snr", type=float, help="linear single-pulse SNR")
    p.add_argument("--range", type=float, help="target range in metres")
    _add_range_source(p)
    p.add_argument("--n", type=int, required=True, help="number of integrated samples")
    p.add_argument("--p-fa-grid", help="min:max:steps:log|lin")
    p.add_argument("--out", help="CSV path, or .json for the JSON variant (stdout if omitted)")
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("simulate", help="generate a seeded voltage record")
    p.add_argument("--p1", type=float, default=1.0)
    p.add_argument("--p2", type=float, default=1.0)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--coupling", choices=couplings, default="rotation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--allow-degenerate", action="store_true", help="sample rho = 1 as 1 - 1e-12")
    p.add_argument("--out", required=True, help="CSV path; metadata goes to the .json sidecar")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="fit rho to a voltage record CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--coupling", choices=couplings, default="rotation")
    p.add_argument("--demean", action="store_true", help="subtract channel means first")
    p.add_argument("--out", help="JSON path (stdout if omitted)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("mc-roc", help="Monte Carlo ROC compared with theory")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--coupling", choices=couplings, default="rotation")
    p.add_argument("--trials-h0", type=int, default=1000)
    p.add_argument("--trials-h1", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--randomize-phase", action="store_true")
    p.add_argument("--p-fa-grid", help="min:max:steps:log|lin")
    p.add_argument("--out", required=True, help="JSON report path")
    p.add_argument("--curve-csv", help="also write the empirical curve as p_fa,p_d CSV")
    p.set_defaults(func=cmd_mc_roc)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except (ConfigError, SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateInputError, TrialError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
