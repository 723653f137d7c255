"""Experiment orchestration: config parsing, replicate runs, result emission.

A run reads a declarative JSON config, executes the generation -> kernel ->
tune -> solve -> round -> score pipeline per replicate, and writes:

  results.csv   one row per (replicate, method), fixed column order
  summary.csv   per-method medians over replicates
  tuning_rep<j>.csv   the (lambda_0, r) sweep grid, when tuning ran
  bounds_rep<j>.json  evaluated bound report, synthetic mode
  timings.csv   wall-clock per solve; only with "timings": true (wall time is
                inherently non-deterministic, so it lives outside results.csv)

With a fixed config and seed all outputs except timings.csv are byte
identical across runs.  Replicates may run on up to ``threads`` workers;
rows are emitted in canonical replicate order regardless of completion
order.
"""

from __future__ import annotations

import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import bounds as bd
from .errors import ConfigError, SdpCommError, TuningError
from .generate import make_rng, sample_mixture, sample_sbm
from .io import load_covariates_csv, load_edge_list, load_labels, log_mass_normalize, threshold_symmetrize
from .kernels import gaussian_kernel, pca_basis, tune_bandwidth
from .model import Labels, MixtureParams, SbmParams, average_edge_variance, ground_truth_matrix
from .rounding import (
    ACCURACY_MAX_CLUSTERS,
    RoundingConfig,
    accuracy,
    misclassification_bound,
    misclassified,
    nmi,
    relative_frobenius_error,
    spectral_round,
)
from .solver import SolverConfig, solve_sdp
from .tuning import TuningGrid, TuningReport, default_lambda_grid, eigen_gap, select_lambda, select_lambda_and_r

METHODS = ("sdp-net", "sdp-cov", "sdp-comb")

RESULT_COLUMNS = [
    "replicate",
    "method",
    "lambda_0",
    "r",
    "eigen_gap",
    "nmi",
    "accuracy",
    "rel_frobenius_error",
    "misclassified",
    "misclassification_bound",
    "iterations",
    "converged",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description (see module docstring for files)."""

    mode: str
    out_dir: Path
    seed: int = 0
    replicates: int = 1
    methods: tuple[str, ...] = ("sdp-comb",)
    r: int | None = None
    rs: tuple[int, ...] | None = None
    lambda_grid: tuple[float, ...] | None = None
    fixed_lambda0: float | None = None
    reduce_dim: str = "auto"
    pca_dims: int | None = None
    eta: float | None = None
    keep_quantile: float = 0.10
    range_quantile: float = 0.95
    solver: SolverConfig = field(default_factory=SolverConfig)
    rounding: RoundingConfig = field(default_factory=RoundingConfig)
    threads: int = 1
    emit_bounds: bool = True
    timings: bool = False
    # synthetic mode
    sizes: tuple[int, ...] | None = None
    B: np.ndarray | None = None
    means: np.ndarray | None = None
    sigmas: np.ndarray | None = None
    # real mode
    graph_path: Path | None = None
    graph_directed: bool = False
    tau: int = 5
    covariates_path: Path | None = None
    standardize: bool = False
    covariates_log_mass: bool = False
    truth_path: Path | None = None


def load_config(source: str | Path | dict) -> ExperimentConfig:
    """Parse and validate a JSON config file or an equivalent dict."""
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {source}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None
    else:
        raw = dict(source)
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ExperimentConfig:
    def want(key: str, typ, default=None, required: bool = False):
        if key not in raw or raw[key] is None:
            if required:
                raise ConfigError(f"missing required config field {key!r}")
            return default
        try:
            return typ(raw[key])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad value for {key!r}: {e}") from None

    mode = want("mode", str, required=True)
    if mode not in ("synthetic", "real"):
        raise ConfigError(f"mode must be 'synthetic' or 'real', got {mode!r}")
    methods = tuple(raw.get("methods", ["sdp-comb"]))
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; choose from {METHODS}")
    replicates = want("replicates", int, 1)
    if replicates < 1:
        raise ConfigError("replicates must be at least 1")
    reduce_dim = want("reduce_dim", str, "auto")
    if reduce_dim not in ("auto", "on", "off"):
        raise ConfigError("reduce_dim must be one of auto/on/off")

    try:
        solver = SolverConfig(**raw.get("solver", {}))
        rounding = RoundingConfig(**raw.get("rounding", {}))
    except (TypeError, SdpCommError) as e:
        raise ConfigError(f"bad solver/rounding config: {e}") from None

    kw: dict[str, Any] = dict(
        mode=mode,
        out_dir=Path(want("out_dir", str, required=True)),
        seed=want("seed", int, 0),
        replicates=replicates,
        methods=methods,
        r=want("r", int),
        rs=tuple(int(v) for v in raw["rs"]) if raw.get("rs") else None,
        lambda_grid=tuple(float(v) for v in raw["lambda_grid"]) if raw.get("lambda_grid") else None,
        fixed_lambda0=want("fixed_lambda0", float),
        reduce_dim=reduce_dim,
        pca_dims=want("pca_dims", int),
        eta=want("eta", float),
        keep_quantile=want("keep_quantile", float, 0.10),
        range_quantile=want("range_quantile", float, 0.95),
        solver=solver,
        rounding=rounding,
        threads=max(1, want("threads", int, 1)),
        emit_bounds=bool(raw.get("bounds", True)),
        timings=bool(raw.get("timings", False)),
    )

    if mode == "synthetic":
        model = raw.get("model")
        if not isinstance(model, dict):
            raise ConfigError("synthetic mode needs a 'model' object")
        preset = model.get("preset")
        if preset is not None:
            kw.update(_model_preset(preset, model))
        else:
            try:
                sizes = tuple(int(v) for v in model["sizes"])
                B = np.asarray(model["B"], dtype=float)
                scale_from = model.get("scale_from")
                if scale_from:
                    B = B * (float(scale_from) / sum(sizes))
                kw.update(
                    sizes=sizes,
                    B=np.minimum(B, 1.0),
                    means=np.asarray(model["means"], dtype=float) if "means" in model else None,
                    sigmas=np.asarray(model["sigmas"], dtype=float) if "sigmas" in model else None,
                )
            except KeyError as e:
                raise ConfigError(f"model is missing field {e}") from None
        if kw["r"] is None:
            kw["r"] = len(kw["sizes"])
    else:
        graph = raw.get("graph")
        if not isinstance(graph, dict) or "path" not in graph:
            raise ConfigError("real mode needs a 'graph' object with a 'path'")
        kw.update(
            graph_path=Path(graph["path"]),
            graph_directed=bool(graph.get("directed", False)),
            tau=int(graph.get("tau", 5)),
        )
        cov = raw.get("covariates")
        if isinstance(cov, dict) and "path" in cov:
            kw.update(
                covariates_path=Path(cov["path"]),
                standardize=bool(cov.get("standardize", False)),
                covariates_log_mass=bool(cov.get("log_mass", False)),
            )
        if raw.get("truth"):
            kw["truth_path"] = Path(raw["truth"])
        if kw["r"] is None and kw["rs"] is None:
            raise ConfigError("real mode needs 'r' (or an 'rs' grid)")
    return ExperimentConfig(**kw)


def _model_preset(name: str, model: dict) -> dict:
    """Named synthetic models; "n" desk-scales them degree-preservingly."""
    from .generate import planted_partition_model, simulation_one_model

    n = int(model.get("n", 800))
    if name == "simulation-1":
        labels, sbm, mix = simulation_one_model(n)
    elif name == "planted-10":
        scale = 800.0 / n
        labels, sbm, mix = planted_partition_model(n, 10, 0.05 * scale, 0.004 * scale)
    else:
        raise ConfigError(f"unknown model preset {name!r}")
    return dict(
        sizes=tuple(int(v) for v in labels.m),
        B=sbm.B,
        means=mix.means,
        sigmas=np.asarray(mix.sigmas),
    )


@dataclass(frozen=True)
class Dataset:
    """One replicate's inputs: graph, covariates, optional ground truth."""

    A: np.ndarray
    Y: np.ndarray | None
    truth: Labels | None
    sbm: SbmParams | None = None
    mixture: MixtureParams | None = None

    @property
    def n(self) -> int:
        return self.A.shape[0]


def _synthetic_dataset(cfg: ExperimentConfig, rep_seed: np.random.SeedSequence) -> Dataset:
    labels = Labels.from_sizes(cfg.sizes)
    sbm = SbmParams(cfg.B)
    s_graph, s_cov = rep_seed.spawn(2)
    A = sample_sbm(sbm, labels, s_graph)
    mixture = None
    Y = None
    if cfg.means is not None:
        sig = cfg.sigmas if cfg.sigmas is not None else np.ones(labels.r)
        mixture = MixtureParams(cfg.means, sig)
        Y = sample_mixture(mixture, labels, s_cov)
    return Dataset(A=A, Y=Y, truth=labels, sbm=sbm, mixture=mixture)


def load_real_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.graph_directed:
        G = load_edge_list(cfg.graph_path, directed=True)
        A = threshold_symmetrize(G, cfg.tau)
    else:
        A = load_edge_list(cfg.graph_path, directed=False)
    Y = None
    if cfg.covariates_path is not None:
        if cfg.covariates_log_mass:
            raw = load_covariates_csv(cfg.covariates_path)
            Y = log_mass_normalize(raw[:, 0])
        else:
            Y = load_covariates_csv(cfg.covariates_path, standardize=cfg.standardize)
        if Y.shape[0] != A.shape[0]:
            raise ConfigError(
                f"covariates have {Y.shape[0]} rows but the graph has {A.shape[0]} nodes"
            )
    truth = load_labels(cfg.truth_path) if cfg.truth_path else None
    if truth is not None and truth.n != A.shape[0]:
        raise ConfigError("truth labels and graph disagree on the node count")
    return Dataset(A=A, Y=Y, truth=truth)


@dataclass
class ReplicateResult:
    rows: list[dict]
    tuning: TuningReport | None
    bound_report: dict | None
    timings: list[tuple[str, float]]


def _prepare_covariates(
    cfg: ExperimentConfig, data: Dataset, r_hint: int, rep_seed: np.random.SeedSequence
) -> tuple[np.ndarray | None, float | None, MixtureParams | None, int]:
    """Optionally reduce dimension, then tune the kernel bandwidth.

    Reduction projects every row onto the top (r_hint - 1) principal
    directions of the full sample; the split-sample variant exists for the
    independence guarantee of the analysis but would waste most of a
    desk-scale sample, so pipelines use the full-sample basis.
    Returns (projected covariates, eta, projected mixture params, d_eff).
    """
    if data.Y is None:
        return None, None, None, 0
    Y = data.Y
    d = Y.shape[1]
    q = cfg.pca_dims if cfg.pca_dims is not None else max(r_hint - 1, 1)
    do_reduce = cfg.reduce_dim == "on" or (cfg.reduce_dim == "auto" and d > r_hint)
    mixture = data.mixture
    if do_reduce and q < d:
        U = pca_basis(Y, q)
        Y = Y @ U
        if mixture is not None:
            mixture = MixtureParams(mixture.means @ U, mixture.sigmas, mixture.psis)
        d_eff = q
    else:
        d_eff = d
    eta = cfg.eta if cfg.eta is not None else tune_bandwidth(
        Y, d_eff, cfg.keep_quantile, cfg.range_quantile
    )
    return Y, eta, mixture, d_eff


def _score_row(
    base: dict,
    labels_hat: Labels | None,
    X_hat: np.ndarray,
    data: Dataset,
    X0: np.ndarray | None,
) -> dict:
    row = dict(base)
    truth = data.truth
    row["nmi"] = "" if (truth is None or labels_hat is None) else repr(nmi(labels_hat, truth))
    acc = mis = ""
    if truth is not None and labels_hat is not None and max(truth.r, labels_hat.r) <= ACCURACY_MAX_CLUSTERS:
        mis_count = misclassified(labels_hat, truth)
        acc = repr(1.0 - mis_count / truth.n)
        mis = str(mis_count)
    row["accuracy"] = acc
    row["misclassified"] = mis
    if X0 is not None:
        row["rel_frobenius_error"] = repr(relative_frobenius_error(X_hat, X0))
        row["misclassification_bound"] = repr(
            misclassification_bound(X_hat, X0, int(data.truth.m_max))
        )
    else:
        row["rel_frobenius_error"] = ""
        row["misclassification_bound"] = ""
    return row


def _run_replicate(cfg: ExperimentConfig, data: Dataset, rep: int, rep_seed) -> ReplicateResult:
    lams = cfg.lambda_grid if cfg.lambda_grid else default_lambda_grid().lambdas
    grid = TuningGrid(lams, cfg.rs)
    r = cfg.r if cfg.r is not None else (data.truth.r if data.truth else None)
    if r is None and cfg.rs is None:
        raise ConfigError("cluster count unknown: set 'r' or 'rs'")
    r_hint = r if r is not None else max(cfg.rs)
    r = r if r is not None else r_hint  # net/cov fall back to the largest candidate

    timings: list[tuple[str, float]] = []
    Yp, eta, mixture_eff, d_eff = _prepare_covariates(cfg, data, r_hint, rep_seed)
    K = gaussian_kernel(Yp, eta) if Yp is not None else None
    X0 = ground_truth_matrix(data.truth) if data.truth is not None else None

    rows: list[dict] = []
    tuning_report: TuningReport | None = None
    selected_lambda0: float | None = None
    for method in cfg.methods:
        if method in ("sdp-cov", "sdp-comb") and K is None:
            raise ConfigError(f"method {method} needs covariates")
        t0 = time.perf_counter()
        if method == "sdp-net":
            sol = solve_sdp(data.A, r, cfg.solver)
            lam_repr, used_r = "0", r
        elif method == "sdp-cov":
            sol = solve_sdp(K, r, cfg.solver)
            lam_repr, used_r = "inf", r
        else:
            if cfg.fixed_lambda0 is not None:
                lam0 = cfg.fixed_lambda0
                used_r = r
            else:
                if cfg.rs is not None:
                    tuning_report = select_lambda_and_r(
                        data.A, K, grid, cfg.solver, data.truth, cfg.rounding
                    )
                else:
                    tuning_report = select_lambda(
                        data.A, K, r, grid, cfg.solver, data.truth, cfg.rounding
                    )
                lam0 = tuning_report.lambda_star
                used_r = tuning_report.r_star
            selected_lambda0 = lam0
            M = data.A + (lam0 / data.n) * K
            sol = solve_sdp(M, used_r, cfg.solver)
            lam_repr = repr(lam0)
        timings.append((method, time.perf_counter() - t0))
        labels_hat = spectral_round(sol.X, used_r, cfg.rounding)
        base = {
            "replicate": str(rep),
            "method": method,
            "lambda_0": lam_repr,
            "r": str(used_r),
            "eigen_gap": repr(eigen_gap(sol.X, used_r)) if used_r < data.n else "",
            "iterations": str(sol.iterations),
            "converged": str(int(sol.converged)),
        }
        rows.append(_score_row(base, labels_hat, sol.X, data, X0))

    bound_report = None
    if cfg.emit_bounds and data.sbm is not None and data.truth is not None:
        bound_report = _bound_report(cfg, data, mixture_eff, eta, selected_lambda0, r_hint, d_eff)
    return ReplicateResult(rows=rows, tuning=tuning_report, bound_report=bound_report, timings=timings)


def _bound_report(
    cfg: ExperimentConfig,
    data: Dataset,
    mixture_eff: MixtureParams | None,
    eta: float | None,
    lambda0: float | None,
    r: int,
    d_eff: int,
) -> dict:
    """Evaluate the closed-form bounds at the replicate's true parameters."""
    truth = data.truth
    n = truth.n
    a, b = data.sbm.rescaled(n)
    g = average_edge_variance(data.sbm, truth)
    entries: list[bd.Bound] = [bd.sparse_graph_bound(a, b, g, truth.alpha, r)]
    context: dict[str, Any] = {
        "n": n,
        "r": r,
        "alpha": truth.alpha,
        "g": g,
        "a": a.tolist(),
        "b": b.tolist(),
        "d_eff": d_eff,
    }
    if mixture_eff is not None and eta is not None:
        entries.append(bd.covariate_bound(mixture_eff, truth.alpha, r))
        context["d_min_effective"] = mixture_eff.d_min
        context["eta"] = eta
        try:
            deriv = bd.theoretical_eta(mixture_eff)
            c0 = deriv.c0
            context["eta_theory"] = deriv.eta
        except SdpCommError:
            c0 = 1.0
            context["eta_theory"] = None
        delta = bd.default_radii(mixture_eff, c0)
        sep = bd.separation_nu(mixture_eff, delta, eta)
        lam0 = lambda0 if lambda0 is not None else 0.0
        entries.append(
            bd.combined_bound(a, b, lam0, sep.nu, truth.m, g, delta, eta, mixture_eff.psis)
        )
        p = np.diag(data.sbm.B)
        off = data.sbm.B.copy()
        np.fill_diagonal(off, -np.inf)
        q = off.max(axis=1)
        nu_dense = bd.separation_nu_dense(mixture_eff, eta)
        lam_dense = lam0 / n
        entries.extend(
            bd.dense_bounds(p, q, nu_dense, lam_dense, truth.alpha, r, n, mixture_eff.d)
        )
        context["nu"] = sep.nu.tolist()
        context["radii_valid"] = sep.radii_valid
        context["lambda_0"] = lam0
    return {"context": context, "bounds": [e.to_dict() for e in entries]}


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Execute all replicates and write result files; returns the output dir."""
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)

    rep_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.replicates)
    if cfg.mode == "real":
        shared = load_real_dataset(cfg)
        datasets = [shared] * cfg.replicates
    else:
        datasets = [_synthetic_dataset(cfg, s) for s in rep_seeds]

    def work(j: int) -> ReplicateResult:
        return _run_replicate(cfg, datasets[j], j, rep_seeds[j])

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(work, range(cfg.replicates)))
    else:
        results = [work(j) for j in range(cfg.replicates)]

    _write_csv(out / "results.csv", RESULT_COLUMNS, [row for res in results for row in res.rows])
    _write_summary(out / "summary.csv", results)
    for j, res in enumerate(results):
        if res.tuning is not None:
            with (out / f"tuning_rep{j}.csv").open("w", encoding="utf-8", newline="\n") as f:
                for row in res.tuning.csv_rows():
                    f.write(",".join(str(v) for v in row) + "\n")
        if res.bound_report is not None:
            (out / f"bounds_rep{j}.json").write_text(
                json.dumps(res.bound_report, sort_keys=True, indent=2, allow_nan=True) + "\n",
                encoding="utf-8",
            )
    if cfg.timings:
        trows = [
            {"replicate": str(j), "method": m, "seconds": f"{s:.3f}"}
            for j, res in enumerate(results)
            for m, s in res.timings
        ]
        _write_csv(out / "timings.csv", ["replicate", "method", "seconds"], trows)
    return out


def _write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(str(row.get(c, "")) for c in columns) + "\n")


def _write_summary(path: Path, results: list[ReplicateResult]) -> None:
    by_method: dict[str, dict[str, list[float]]] = {}
    for res in results:
        for row in res.rows:
            slot = by_method.setdefault(row["method"], {"nmi": [], "accuracy": [], "rel_frobenius_error": []})
            for key in slot:
                if row.get(key):
                    slot[key].append(float(row[key]))
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write("method,median_nmi,median_accuracy,median_rel_frobenius_error,replicates\n")
        for method in METHODS:
            if method not in by_method:
                continue
            slot = by_method[method]
            med = [
                repr(statistics.median(slot[k])) if slot[k] else ""
                for k in ("nmi", "accuracy", "rel_frobenius_error")
            ]
            f.write(f"{method},{med[0]},{med[1]},{med[2]},{len(results)}\n")
