"""Command-line interface.

Subcommands:
  synth   run a synthetic experiment from a JSON config
  real    run a real-data experiment from a JSON config
  tune    sweep (lambda_0 [, r]) on a dataset and write the tuning CSV
  solve   one-off solve of an edge list (plus optional covariates)
  bounds  evaluate the closed-form bound calculators from a params JSON

Exit codes: 0 success, 1 config error, 2 data error, 3 all solves failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import Bound, covariate_bound, dense_bounds, separation_nu_dense, sparse_graph_bound
from .errors import ConfigError, DataFormatError, SdpCommError, TuningError
from .experiment import config_from_dict, load_config, load_real_dataset, run_experiment
from .io import load_covariates_csv, load_edge_list, load_labels
from .kernels import gaussian_kernel, pca_basis, tune_bandwidth
from .model import MixtureParams
from .rounding import RoundingConfig, spectral_round
from .solver import SolverConfig, solve_sdp
from .tuning import TuningGrid, default_lambda_grid, select_lambda, select_lambda_and_r

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_SOLVE = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdpcomm", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"sdpcomm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("synth", "real"):
        sp = sub.add_parser(name, help=f"run a {name} experiment from a config")
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--seed", type=int, default=None, help="override config seed")
        sp.add_argument("--out", default=None, help="override output directory")
        sp.add_argument("--threads", type=int, default=None, help="override worker count")

    sp = sub.add_parser("tune", help="eigen-gap sweep over lambda (and r)")
    sp.add_argument("--config", required=True, help="JSON experiment config")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=None, help="output CSV path (default stdout)")

    sp = sub.add_parser("solve", help="solve one instance and write labels")
    sp.add_argument("--edges", required=True, help="edge list file")
    sp.add_argument("--covariates", default=None, help="covariates CSV")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--lambda0", type=float, default=0.0, help="lambda_0 (lambda_n = lambda_0/n)")
    sp.add_argument("--eta", type=float, default=None, help="kernel scale (default: tuned)")
    sp.add_argument("--out", default=None, help="labels output path (default stdout)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-4)

    sp = sub.add_parser("bounds", help="evaluate bound calculators from a params JSON")
    sp.add_argument("--config", required=True, help="JSON with model parameters")
    sp.add_argument("--out", default=None, help="output JSON path (default stdout)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("synth", "real"):
            return _cmd_experiment(args)
        if args.command == "tune":
            return _cmd_tune(args)
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_bounds(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataFormatError, FileNotFoundError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except TuningError as e:
        print(f"solve error: {e}", file=sys.stderr)
        return EXIT_SOLVE
    except SdpCommError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


def _load_config_with_overrides(args) -> dict:
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {args.config}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    if getattr(args, "out", None):
        raw["out_dir"] = args.out
    if getattr(args, "threads", None):
        raw["threads"] = args.threads
    return raw


def _cmd_experiment(args) -> int:
    raw = _load_config_with_overrides(args)
    expected = "synthetic" if args.command == "synth" else "real"
    raw.setdefault("mode", expected)
    if raw["mode"] != expected:
        raise ConfigError(f"{args.command} expects mode={expected!r}, config says {raw['mode']!r}")
    cfg = config_from_dict(raw)
    out = run_experiment(cfg)
    print(f"wrote {out}/results.csv")
    return EXIT_OK


def _cmd_tune(args) -> int:
    raw = _load_config_with_overrides(args)
    raw.setdefault("mode", "real" if "graph" in raw else "synthetic")
    raw.setdefault("out_dir", ".")
    cfg = config_from_dict(raw)
    if cfg.mode == "real":
        data = load_real_dataset(cfg)
    else:
        from .experiment import _synthetic_dataset

        data = _synthetic_dataset(cfg, np.random.SeedSequence(cfg.seed).spawn(1)[0])
    if data.Y is None:
        raise ConfigError("tuning needs covariates")
    r_hint = cfg.r if cfg.r is not None else max(cfg.rs)
    from .experiment import _prepare_covariates

    Yp, eta, _, _ = _prepare_covariates(cfg, data, r_hint, np.random.SeedSequence(cfg.seed))
    K = gaussian_kernel(Yp, eta)
    lams = cfg.lambda_grid if cfg.lambda_grid else default_lambda_grid().lambdas
    grid = TuningGrid(lams, cfg.rs)
    if cfg.rs is not None:
        report = select_lambda_and_r(data.A, K, grid, cfg.solver, data.truth, cfg.rounding)
    else:
        report = select_lambda(data.A, K, cfg.r, grid, cfg.solver, data.truth, cfg.rounding)
    lines = [",".join(str(v) for v in row) for row in report.csv_rows()]
    text = "\n".join(lines) + "\n"
    text += f"# selected lambda_0={report.lambda_star!r} r={report.r_star}\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_solve(args) -> int:
    A = load_edge_list(args.edges)
    n = A.shape[0]
    M = A
    if args.lambda0 > 0:
        if not args.covariates:
            raise ConfigError("--lambda0 > 0 needs --covariates")
        Y = load_covariates_csv(args.covariates)
        if Y.shape[1] > args.r:
            Y = Y @ pca_basis(Y, max(args.r - 1, 1))
        eta = args.eta if args.eta is not None else tune_bandwidth(Y, Y.shape[1])
        M = A + (args.lambda0 / n) * gaussian_kernel(Y, eta)
    sol = solve_sdp(M, args.r, SolverConfig(tol=args.tol))
    labels = spectral_round(sol.X, args.r, RoundingConfig(seed=args.seed))
    body = "\n".join(str(int(v)) for v in labels.assignments) + "\n"
    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
        print(f"wrote {args.out} (objective {sol.objective!r}, converged {sol.converged})")
    else:
        sys.stdout.write(body)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {args.config}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"params file is not valid JSON: {e}") from None

    entries: list[Bound] = []
    try:
        if "a" in raw and "b" in raw:
            entries.append(
                sparse_graph_bound(
                    np.asarray(raw["a"], float),
                    np.asarray(raw["b"], float),
                    float(raw["g"]),
                    float(raw["alpha"]),
                    int(raw["r"]),
                )
            )
        if "means" in raw:
            mix = MixtureParams(
                np.asarray(raw["means"], float),
                np.asarray(raw["sigmas"], float),
                np.asarray(raw["psis"], float) if raw.get("psis") else None,
            )
            entries.append(covariate_bound(mix, float(raw["alpha"]), int(raw["r"])))
            if "eta" in raw and "p" in raw and "q" in raw:
                nu_dense = separation_nu_dense(mix, float(raw["eta"]))
                entries.extend(
                    dense_bounds(
                        np.asarray(raw["p"], float),
                        np.asarray(raw["q"], float),
                        nu_dense,
                        float(raw.get("lambda", 0.0)),
                        float(raw["alpha"]),
                        int(raw["r"]),
                        int(raw["n"]),
                        mix.d,
                    )
                )
    except KeyError as e:
        raise ConfigError(f"params file is missing field {e}") from None
    if not entries:
        raise ConfigError("params file contains no recognizable bound inputs")
    payload = json.dumps([e.to_dict() for e in entries], sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(payload)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
