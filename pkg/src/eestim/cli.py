"""Command-line interface.

Subcommands: ``generate`` (datasets), ``estimate`` (CD-initialized
estimation on one observation file), ``exact`` (enumeration-oracle
queries), ``diagnose`` (convergence tests over a trace CSV), and
``experiment`` (the packaged experiment runners).

Exit codes: 0 success, 2 invalid input, 3 divergence or MLE nonexistence,
4 convergence-test failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import io
from .convergence import diagnose_trace
from .core import BinaryState
from .errors import ConvergenceFailure, DivergenceError, EstimError, InvalidInputError
from .estimators import EstimatorConfig, StepSizeKind, cd_estimate, ee_estimate
from .exact import EnumerationTable
from .experiments import (
    CrfExperimentConfig,
    ErgmDemoConfig,
    IsingExperimentConfig,
    VbmExperimentConfig,
    generate_crf_dataset,
    generate_vbm_dataset,
    run_crf_experiment,
    run_ergm_demo,
    run_ising_experiment,
    run_vbm_experiment,
)
from .models import build_crf, build_ising1d_periodic, build_ising2d, build_mini_ergm, build_vbm
from .sampler import RngStream

MODEL_FAMILIES = ("ising2d", "ising1d", "vbm", "crf", "ergm")


def _fmt_vec(v) -> str:
    return ",".join(repr(float(x)) for x in np.asarray(v).ravel())


def _parse_vec(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok.strip() != ""])
    except ValueError as exc:
        raise InvalidInputError(f"bad numeric list {text!r}") from exc


def _read_observation(family: str, path: str, features: str | None):
    """Load an observation file and build the matching model."""
    if family == "ergm":
        x_obs = io.read_digraph(path)
        return build_mini_ergm(x_obs.dims[1]), x_obs
    x_obs = io.read_state(path)
    if family == "ising2d":
        if x_obs.dims[0] != "grid":
            raise InvalidInputError("ising2d expects a grid state")
        return build_ising2d(x_obs.dims[1], x_obs.dims[2]), x_obs
    if family == "ising1d":
        if x_obs.dims[0] != "chain":
            raise InvalidInputError("ising1d expects a chain state")
        return build_ising1d_periodic(x_obs.dims[1]), x_obs
    if family == "vbm":
        if x_obs.dims[0] != "chain":
            raise InvalidInputError("vbm expects a chain state")
        return build_vbm(x_obs.dims[1]), x_obs
    if family == "crf":
        if features is None:
            raise InvalidInputError("crf needs --features with the noisy image")
        if x_obs.dims[0] != "grid":
            raise InvalidInputError("crf expects a grid state")
        y = io.read_real_grid(features)
        if y.shape != (x_obs.dims[1], x_obs.dims[2]):
            raise InvalidInputError("feature image dims do not match the state")
        return build_crf(y, x_obs.dims[1], x_obs.dims[2]), x_obs
    raise InvalidInputError(f"unknown model family {family!r}")


def _cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = RngStream(args.seed, 0).generator()
    if args.model == "vbm":
        ds = generate_vbm_dataset(rng, args.n_sites, args.n_chains, args.anneal_steps)
        np.savetxt(out / "theta_star.txt", ds.theta_star, header="theta_star", comments="# ")
        np.savetxt(out / "gbar.txt", ds.g_bar, header="gbar", comments="# ")
        for k in (0, 1):
            io.write_state(
                out / f"chain_{k}.txt",
                BinaryState(ds.states[k], "spin", ("chain", args.n_sites)),
            )
        print(f"wrote theta_star.txt, gbar.txt and sample chains to {out}")
    elif args.model == "crf":
        ds = generate_crf_dataset(rng, args.rows, args.cols, args.n_train, args.n_test)
        io.write_state(out / "x_orig.txt", ds.x_orig)
        for k, y in enumerate(ds.train_y):
            io.write_real_grid(out / f"train_{k:02d}.txt", y)
        for k, y in enumerate(ds.test_y):
            io.write_real_grid(out / f"test_{k:02d}.txt", y)
        print(f"wrote x_orig.txt and {len(ds.train_y)}+{len(ds.test_y)} noisy images to {out}")
    elif args.model == "ising2d":
        model = build_ising2d(args.rows, args.cols)
        table = EnumerationTable(model)
        x = table.sample(rng, [args.theta_star], 1)[0]
        io.write_state(out / "image.txt", x)
        print(f"wrote image.txt ({args.rows}x{args.cols} at coupling {args.theta_star}) to {out}")
    elif args.model == "ergm":
        cfg = ErgmDemoConfig(seed=args.seed, n_nodes=args.n_nodes)
        model = build_mini_ergm(cfg.n_nodes)
        theta_star = np.asarray(cfg.theta_star)
        values = model.random_state(rng).values[None, :]
        from .sampler import equilibrate_ensemble

        equilibrate_ensemble([rng], model, theta_star, values, cfg.gen_steps, threads=1)
        io.write_digraph(out / "graph.txt", model.new_state(values[0]))
        print(f"wrote graph.txt ({cfg.n_nodes} nodes) to {out}")
    else:
        raise InvalidInputError(f"cannot generate data for model {args.model!r}")
    return 0


def _cmd_estimate(args) -> int:
    model, x_obs = _read_observation(args.model, args.infile, args.features)
    cd_cfg = EstimatorConfig(
        a=args.cd_a, c=args.c, m=args.m, t_max=args.cd_steps, theta_guard=args.guard
    )
    theta_cd, _ = cd_estimate(RngStream(args.seed, 1).generator(), model, x_obs, cd_cfg)
    burn = args.burnin if args.burnin is not None else args.steps // 2
    ee_cfg = EstimatorConfig(
        a=args.a, c=args.c, m=args.m, t_max=args.steps, t_burn=burn, theta_guard=args.guard
    )
    theta_hat, trace = ee_estimate(
        RngStream(args.seed, 2).generator(),
        model,
        x_obs,
        theta_cd,
        ee_cfg,
        kind=StepSizeKind(args.stepfn),
    )
    report = diagnose_trace(trace, burn, args.tau, args.c)
    if args.out is not None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        io.write_trace(outdir / "trace.csv", trace)
        (outdir / "report.txt").write_text(report.as_text(), encoding="utf-8")
    print(f"theta_cd = {_fmt_vec(theta_cd)}")
    print(f"theta_hat = {_fmt_vec(theta_hat)}")
    print(report.as_text(), end="")
    if not report.passed:
        raise ConvergenceFailure(f"t-ratio test failed at tau={args.tau}")
    return 0


def _cmd_exact(args) -> int:
    model, x_obs = _read_observation(args.model, args.infile, args.features)
    table = EnumerationTable(model)
    target = _parse_vec(args.target) if args.target else model.suff_stats(x_obs)
    if args.op == "logz":
        theta = _parse_vec(args.theta) if args.theta else np.zeros(model.L)
        print(f"log_z = {table.log_partition(theta)!r}")
    elif args.op == "loglik":
        theta = _parse_vec(args.theta) if args.theta else np.zeros(model.L)
        print(f"log_likelihood = {table.log_likelihood(theta, target)!r}")
    elif args.op == "expectations":
        theta = _parse_vec(args.theta) if args.theta else np.zeros(model.L)
        print(f"expectations = {_fmt_vec(table.expectations(theta))}")
    elif args.op == "mle":
        theta_hat = table.mle(target)
        print(f"theta_mle = {_fmt_vec(theta_hat)}")
        print(f"log_likelihood = {table.log_likelihood(theta_hat, target)!r}")
    elif args.op == "sample":
        theta = _parse_vec(args.theta) if args.theta else np.zeros(model.L)
        rng = RngStream(args.seed, 0).generator()
        states = table.sample(rng, theta, args.count)
        outdir = Path(args.out) if args.out else Path(".")
        outdir.mkdir(parents=True, exist_ok=True)
        for k, s in enumerate(states):
            io.write_state(outdir / f"sample_{k:04d}.txt", s)
        print(f"wrote {len(states)} samples to {outdir}")
    return 0


def _cmd_diagnose(args) -> int:
    trace = io.read_trace(args.infile)
    burn = args.burnin if args.burnin is not None else len(trace) // 2
    report = diagnose_trace(trace, burn, args.tau, args.c)
    print(report.as_text(), end="")
    if not report.passed:
        raise ConvergenceFailure(f"t-ratio test failed at tau={args.tau}")
    return 0


def _apply_config_file(cfg, path: str):
    values = io.read_config(path)
    by_name = {f.name: f for f in dataclasses.fields(cfg)}
    for key, raw in values.items():
        if key not in by_name:
            raise InvalidInputError(f"unknown config key {key!r} for {type(cfg).__name__}")
        current = getattr(cfg, key)
        if isinstance(current, bool):
            value = raw.lower() in ("1", "true", "yes")
        elif isinstance(current, int):
            value = int(raw)
        elif isinstance(current, float):
            value = float(raw)
        elif key == "ee_phases":
            pairs = [p for p in raw.split(";") if p.strip()]
            value = tuple((float(a), int(s)) for a, s in (p.split(":") for p in pairs))
        else:
            value = raw
        setattr(cfg, key, value)
    return cfg


def _cmd_experiment(args) -> int:
    builders = {
        "ising": IsingExperimentConfig,
        "vbm": VbmExperimentConfig,
        "crf": CrfExperimentConfig,
        "ergm": ErgmDemoConfig,
    }
    cfg = builders[args.which]()
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.out_dir = args.out
    if args.which == "ising" and args.infile is not None:
        cfg.image_path = args.infile
    if args.which == "ergm" and args.infile is not None:
        cfg.graph_path = args.infile
    if args.config is not None:
        _apply_config_file(cfg, args.config)

    if args.which == "ising":
        res = run_ising_experiment(cfg)
        print(f"theta_hat = {_fmt_vec(res.theta_hat)}")
        if res.oracle_mle is not None:
            print(f"oracle_mle = {_fmt_vec(res.oracle_mle)}")
        print(f"t_ratio_passed = {str(res.report.passed).lower()}")
        if not res.report.passed:
            raise ConvergenceFailure("the run failed the t-ratio convergence test")
    elif args.which == "vbm":
        res = run_vbm_experiment(cfg)
        for fit in (res.vbm_fit, res.ising_fit):
            print(
                f"{fit.name}: ll_cd = {fit.ll_cd!r}  ll_ee = {fit.ll_ee!r}  "
                f"ll_mle = {fit.ll_mle!r}"
            )
    elif args.which == "crf":
        res = run_crf_experiment(cfg)
        print(
            f"err_start = {res.err_start!r}  err_cd_final = {res.err_cd_final!r}  "
            f"err_ee_final = {res.err_ee_final!r}"
        )
    else:
        res = run_ergm_demo(cfg)
        print(f"g_obs = {_fmt_vec(res.g_obs)}")
        print(f"theta_hat = {_fmt_vec(res.theta_hat)}")
        if res.oracle_mle is not None:
            print(f"oracle_mle = {_fmt_vec(res.oracle_mle)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eestim",
        description="Monte Carlo maximum-likelihood estimation for exponential-family models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate datasets")
    gen.add_argument("--model", required=True, choices=("vbm", "crf", "ising2d", "ergm"))
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--rows", type=int, default=40)
    gen.add_argument("--cols", type=int, default=40)
    gen.add_argument("--n-sites", type=int, default=15)
    gen.add_argument("--n-chains", type=int, default=1000)
    gen.add_argument("--anneal-steps", type=int, default=100_000)
    gen.add_argument("--n-train", type=int, default=10)
    gen.add_argument("--n-test", type=int, default=5)
    gen.add_argument("--n-nodes", type=int, default=30)
    gen.add_argument("--theta-star", type=float, default=0.3)
    gen.set_defaults(func=_cmd_generate)

    est = sub.add_parser("estimate", help="CD-initialized estimation on one observation")
    est.add_argument("--model", required=True, choices=MODEL_FAMILIES)
    est.add_argument("--in", dest="infile", required=True)
    est.add_argument("--features", default=None, help="noisy image for crf models")
    est.add_argument("--a", type=float, default=0.001)
    est.add_argument("--c", type=float, default=0.01)
    est.add_argument("--m", type=int, default=1)
    est.add_argument("--steps", type=int, default=200_000)
    est.add_argument("--burnin", type=int, default=None)
    est.add_argument("--tau", type=float, default=0.1)
    est.add_argument("--seed", type=int, default=1)
    est.add_argument(
        "--stepfn",
        default=StepSizeKind.MAX_ABS_C.value,
        choices=[k.value for k in StepSizeKind],
    )
    est.add_argument("--cd-a", type=float, default=0.01)
    est.add_argument("--cd-steps", type=int, default=1000)
    est.add_argument("--guard", type=float, default=50.0)
    est.add_argument("--out", default=None)
    est.set_defaults(func=_cmd_estimate)

    exa = sub.add_parser("exact", help="enumeration-oracle queries")
    exa.add_argument("--op", required=True, choices=("logz", "loglik", "expectations", "mle", "sample"))
    exa.add_argument("--model", required=True, choices=MODEL_FAMILIES)
    exa.add_argument("--in", dest="infile", required=True)
    exa.add_argument("--features", default=None)
    exa.add_argument("--theta", default=None, help="comma-separated parameter vector")
    exa.add_argument("--target", default=None, help="comma-separated target statistics")
    exa.add_argument("--count", type=int, default=1)
    exa.add_argument("--seed", type=int, default=1)
    exa.add_argument("--out", default=None)
    exa.set_defaults(func=_cmd_exact)

    dia = sub.add_parser("diagnose", help="convergence tests over a trace CSV")
    dia.add_argument("--in", dest="infile", required=True)
    dia.add_argument("--burnin", type=int, default=None)
    dia.add_argument("--tau", type=float, default=0.1)
    dia.add_argument("--c", type=float, default=0.01)
    dia.set_defaults(func=_cmd_diagnose)

    exp = sub.add_parser("experiment", help="run a packaged experiment")
    exp.add_argument("which", choices=("ising", "vbm", "crf", "ergm"))
    exp.add_argument("--out", default=None)
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--in", dest="infile", default=None, help="observed image or graph file")
    exp.add_argument("--config", default=None, help="key = value config file")
    exp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConvergenceFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except EstimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
