"""Command-line surface: utest, uclust, uhclust and simulate subcommands."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .cluster import VERDICT_SPLIT, uclust
from .config import Settings
from .errors import UstatClustError
from .hierarchy import extract_clusters, uhclust
from .io import dumps_json, read_csv, write_dendrogram
from .kernels import KernelSpec, build_kernel_matrix
from .significance import homogeneity_test
from .simulate import SimScenario, SimReport, run_hierarchy_study, run_homogeneity_study

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


@dataclass(frozen=True)
class RunConfig:
    """Resolved invocation: subcommand, levels, seeds and paths."""

    command: str
    alpha: float = 0.05
    tau: int = 3
    mc_iterations: int = 1000
    seed: int = 0
    gumbel_threshold_n: int = 30
    kernel: KernelSpec = KernelSpec()
    input_path: str | None = None
    output_path: str | None = None

    def settings(self, restarts: int | None = None) -> Settings:
        return Settings(
            mc_iterations=self.mc_iterations,
            seed=self.seed,
            restarts=restarts,
            gumbel_threshold_n=self.gumbel_threshold_n,
        )


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ustatclust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, needs_input: bool) -> None:
        if needs_input:
            p.add_argument("--input", required=True, help="input CSV path")
            p.add_argument("--labels", action="store_true", help="first column holds sample labels")
            p.add_argument("--no-header", action="store_true", help="CSV has no header row")
            p.add_argument("--transpose", action="store_true", help="input is features x samples")
        p.add_argument("--output", default=None, help="output file path")
        p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--mc-iterations", type=int, default=1000,
                       help="permutation iterations for variance estimation (default 1000)")
        p.add_argument("--restarts", type=int, default=None,
                       help="search restarts (default max(10, n))")
        p.add_argument("--gumbel-threshold", type=int, default=30,
                       help="sample size from which the Gumbel correction is used (default 30)")
        p.add_argument("--kernel", default="averaged-squared-euclidean",
                       help="kernel name (default averaged-squared-euclidean)")

    p_utest = sub.add_parser("utest", help="test overall group homogeneity")
    add_common(p_utest, needs_input=True)

    p_uclust = sub.add_parser("uclust", help="find the best significant two-group split")
    add_common(p_uclust, needs_input=True)

    p_uh = sub.add_parser("uhclust", help="hierarchical significance clustering")
    add_common(p_uh, needs_input=True)
    p_uh.add_argument("--tau", type=int, default=3,
                      help="minimum group size eligible for splitting (default 3)")
    p_uh.add_argument("--format", choices=["json", "newick", "svg"], default="json",
                      help="dendrogram output format (default json)")

    p_sim = sub.add_parser("simulate", help="run a simulation study")
    add_common(p_sim, needs_input=False)
    p_sim.add_argument("--scenario", required=True,
                       help="scenario as inline JSON or a path to a JSON file")
    p_sim.add_argument("--tau", type=int, default=3,
                       help="minimum group size eligible for splitting (default 3)")
    return parser


def _load_data(args: argparse.Namespace):
    return read_csv(
        args.input,
        labels=args.labels,
        header=not args.no_header,
        transpose=args.transpose,
    )


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        alpha=args.alpha,
        tau=getattr(args, "tau", 3),
        mc_iterations=args.mc_iterations,
        seed=args.seed,
        gumbel_threshold_n=args.gumbel_threshold,
        kernel=KernelSpec(args.kernel),
        input_path=getattr(args, "input", None),
        output_path=args.output,
    )


def _cmd_utest(args: argparse.Namespace) -> int:
    config = _run_config(args)
    data = _load_data(args)
    kernel = build_kernel_matrix(data, config.kernel)
    result = homogeneity_test(kernel, alpha=config.alpha, settings=config.settings(args.restarts))
    verdict = "non-homogeneous" if result.reject else "homogeneous"
    print(f"verdict: {verdict}")
    print(f"p-value: {result.p_value:.6g} ({result.method}, {result.n_star} implicit tests)")
    print(f"max standardized statistic: {result.statistic:.6g}")
    if result.best_partition is not None and result.reject:
        group = [data.row_labels[i] for i in result.best_partition.group1_indices()]
        print(f"best split: {{{', '.join(group)}}} vs rest")
    if config.output_path:
        payload = {
            "verdict": verdict,
            "p_value": result.p_value,
            "statistic": result.statistic,
            "method": result.method,
            "n_star": result.n_star,
            "alpha": result.alpha,
            "group1": [int(i) for i in result.best_partition.group1_indices()]
            if result.best_partition is not None
            else None,
        }
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(dumps_json(payload) + "\n")
    return EXIT_OK


def _cmd_uclust(args: argparse.Namespace) -> int:
    config = _run_config(args)
    data = _load_data(args)
    kernel = build_kernel_matrix(data, config.kernel)
    result = uclust(kernel, alpha=config.alpha, settings=config.settings(args.restarts))
    print(f"verdict: {result.verdict}")
    print(f"homogeneity p-value: {result.homogeneity.p_value:.6g}")
    if result.verdict == VERDICT_SPLIT and result.partition is not None:
        part = result.partition
        g1 = [data.row_labels[i] for i in part.group1_indices()]
        print(f"split sizes: ({part.n1}, {part.n2}), split p-value: {result.p_value:.6g}")
        print(f"group 1: {', '.join(g1)}")
    if config.output_path:
        payload = {
            "verdict": result.verdict,
            "alpha": result.alpha,
            "homogeneity_p_value": result.homogeneity.p_value,
            "split_p_value": result.p_value if result.verdict == VERDICT_SPLIT else None,
            "group1": [int(i) for i in result.partition.group1_indices()]
            if result.partition is not None
            else None,
            "candidates": [
                {
                    "n1": c.n1,
                    "bn": c.bn,
                    "standardized": c.standardized,
                    "p_value": c.p_value,
                    "significant": c.significant,
                }
                for c in result.per_size_candidates
            ],
        }
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(dumps_json(payload) + "\n")
    return EXIT_OK


def _cmd_uhclust(args: argparse.Namespace) -> int:
    config = _run_config(args)
    data = _load_data(args)
    kernel = build_kernel_matrix(data, config.kernel)
    root = uhclust(kernel, alpha=config.alpha, tau=config.tau,
                   settings=config.settings(args.restarts))
    labeling = extract_clusters(root)
    sizes = [int(c) for c in np.bincount(labeling.labels)]
    print(f"clusters found: {labeling.k_hat}")
    print(f"cluster sizes: {sizes}")
    for cluster_id in range(labeling.k_hat):
        members = [data.row_labels[i] for i in range(data.n) if labeling.labels[i] == cluster_id]
        print(f"  cluster {cluster_id}: {', '.join(members)}")
    if config.output_path:
        write_dendrogram(root, args.format, config.output_path, labels=data.row_labels)
        print(f"dendrogram written to {config.output_path} ({args.format})")
    return EXIT_OK


def _parse_scenario(text: str) -> tuple[str, SimScenario, float, int]:
    raw = text.strip()
    if not raw.startswith("{"):
        with open(raw, encoding="utf-8") as fh:
            raw = fh.read()
    spec = json.loads(raw)
    study = spec.pop("study", "homogeneity")
    alpha = float(spec.pop("alpha", 0.05))
    tau = int(spec.pop("tau", 3))
    if study == "homogeneity":
        scenario = SimScenario.two_group(
            n=int(spec["n"]),
            L=int(spec["L"]),
            m2=float(spec.get("m2", 0.0)),
            replications=int(spec.get("replications", 200)),
            seed=int(spec.get("seed", 0)),
            noise=spec.get("noise", "normal"),
        )
    elif study == "hierarchy":
        scenario = SimScenario.clusters(
            k=int(spec["k"]),
            n1=int(spec["n1"]),
            L=int(spec["L"]),
            d=float(spec.get("d", 0.0)),
            layout=spec.get("layout", "equidistant"),
            replications=int(spec.get("replications", 20)),
            seed=int(spec.get("seed", 0)),
            noise=spec.get("noise", "normal"),
        )
    else:
        raise UstatClustError(f"unknown study kind: {study!r}")
    return study, scenario, alpha, tau


def _print_report(study: str, report: SimReport, alpha: float) -> None:
    s = report.scenario
    print(f"study: {study}   n={s.n} L={s.L} k={s.k} layout={s.mean_layout} "
          f"shift={s.shift:g} noise={s.noise} Re={s.replications} alpha={alpha:g}")
    if report.rejection_rate is not None:
        for method in ("max", "gumbel"):
            rate = report.rejection_rate[method]
            se = report.standard_error(rate)
            print(f"  rejection rate ({method:6s}): {rate:.3f} +/- {se:.3f}")
    if report.mean_ari is not None:
        print(f"  mean ARI:   {report.mean_ari:.3f}")
    if report.mean_k_hat is not None:
        print(f"  mean K-hat: {report.mean_k_hat:.3f}")


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _run_config(args)
    study, scenario, alpha, tau = _parse_scenario(args.scenario)
    settings = Settings(
        mc_iterations=config.mc_iterations,
        seed=scenario.seed,
        restarts=args.restarts if args.restarts is not None else 10,
        gumbel_threshold_n=config.gumbel_threshold_n,
    )
    if study == "homogeneity":
        report = run_homogeneity_study(scenario, alpha=alpha, settings=settings)
    else:
        report = run_hierarchy_study(scenario, alpha=alpha, tau=tau, settings=settings)
    _print_report(study, report, alpha)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            for record in report.per_replication:
                fh.write(dumps_json(record, compact=True) + "\n")
        print(f"per-replication records written to {config.output_path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "utest": _cmd_utest,
        "uclust": _cmd_uclust,
        "uhclust": _cmd_uhclust,
        "simulate": _cmd_simulate,
    }
    try:
        return handlers[args.command](args)
    except (UstatClustError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def console_main() -> None:
    raise SystemExit(main())
