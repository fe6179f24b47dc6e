"""Command-line interface.

Five subcommands wire the library together: ``generate`` (synthetic dataset
CSV), ``cluster`` (one clustering run on a dataset file), ``regime`` (one
contamination benchmark), ``demo`` (the fixed two-cluster L1-vs-L2 labeling
comparison) and ``decay`` (mislabeling against controlled signal-to-noise).

Options may come from a JSON config file (``--config``), with command-line
flags taking precedence.  Every command writes a manifest recording the
fully-resolved configuration, the package version, and the output file
names, so any output can be reproduced exactly.  The benchmark commands
render a PNG figure next to each CSV unless ``--no-figures`` is given.

Exit codes: 0 success (and convergence for ``cluster``), 2 validation
error, 3 iteration cap reached, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, algorithms, datagen, experiments, metrics

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ITERATION_CAP = 3
EXIT_IO = 4

_CONFIG_KEYS = {
    "generate": {
        "k", "d", "sigma", "points_per_cluster", "centroid_radius",
        "n_out", "sigma_out", "outlier_center", "seed", "name",
    },
    "cluster": {"algo", "init", "k", "eps", "max_iter", "seed", "name"},
    "regime": {
        "sweep", "repetitions", "init", "algorithms", "seed",
        "eps", "max_iter", "name", "figures",
    },
    "demo": {"repetitions", "sigma", "points_per_cluster", "seed", "name", "figures"},
    "decay": {
        "snr", "repetitions", "d", "points_per_cluster", "algorithms",
        "seed", "name", "figures",
    },
}


def _load_config(path, command: str) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError(f"config file {path} must contain a JSON object")
    unknown = set(config) - _CONFIG_KEYS[command]
    if unknown:
        raise ValueError(
            f"config file {path} has unknown keys for '{command}': {sorted(unknown)}"
        )
    return config


def _resolve(args, config: dict, key: str, default, cast=None):
    """Flag value if given, else config-file value, else the default."""
    value = getattr(args, key, None)
    if value is None:
        value = config.get(key, default)
    if cast is not None and value is not None:
        value = cast(value)
    return value


def _parse_number_list(value, what: str) -> tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    parts = [p for chunk in str(value).split(",") for p in chunk.split()]
    if not parts:
        raise ValueError(f"{what} must be a non-empty list of numbers")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ValueError(f"{what} must be numbers, got {value!r}") from None


def _parse_name_list(value, what: str) -> tuple[str, ...]:
    if isinstance(value, (list, tuple)):
        names = tuple(str(v) for v in value)
    else:
        names = tuple(p for chunk in str(value).split(",") for p in chunk.split())
    if not names:
        raise ValueError(f"{what} must be a non-empty list")
    return names


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["version"] = __version__
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _jobs(args) -> int:
    jobs = getattr(args, "jobs", None)
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    return jobs


# ---------------------------------------------------------------- generate


def _cmd_generate(args) -> int:
    config = _load_config(args.config, "generate")
    k = _resolve(args, config, "k", 4, int)
    d = _resolve(args, config, "d", 10, int)
    sigma = _resolve(args, config, "sigma", 2.0, float)
    points_per_cluster = _resolve(args, config, "points_per_cluster", 100, int)
    radius = _resolve(args, config, "centroid_radius", 5.0, float)
    n_out = _resolve(args, config, "n_out", 0, int)
    sigma_out = _resolve(args, config, "sigma_out", 10.0, float)
    center_raw = _resolve(args, config, "outlier_center", None)
    seed = _resolve(args, config, "seed", 0, int)
    name = _resolve(args, config, "name", "dataset", str)

    mixture = datagen.MixtureConfig(
        k=k, d=d, sigma=sigma,
        points_per_cluster=points_per_cluster, centroid_radius=radius,
    )
    if center_raw is None:
        center = (0.0,) * d
    else:
        center = _parse_number_list(center_raw, "outlier_center")
        if len(center) == 1:
            center = (center[0],) * d
        if len(center) != d:
            raise ValueError(
                f"outlier_center has {len(center)} coordinates, expected d={d}"
            )

    rng = np.random.default_rng(seed)
    dataset = datagen.generate_mixture(mixture, rng, seed=seed)
    outlier_config = None
    if n_out > 0:
        outlier_config = datagen.OutlierConfig(n_out, center, sigma_out)
        dataset = datagen.inject_outliers(dataset, outlier_config, rng)

    out = _out_dir(args)
    csv_path = out / f"{name}.csv"
    manifest_path = out / f"{name}.manifest.json"
    datagen.write_dataset_csv(dataset, csv_path)
    _write_manifest(manifest_path, {
        "command": "generate",
        "seed": seed,
        "config": {
            "k": k, "d": d, "sigma": sigma,
            "points_per_cluster": points_per_cluster,
            "centroid_radius": radius,
            "n_out": n_out, "sigma_out": sigma_out,
            "outlier_center": list(center),
        },
        "true_centroids": dataset.true_centroids.tolist(),
        "summary": {
            "n": dataset.n,
            "delta": dataset.delta,
            "snr": dataset.snr,
            "alpha": dataset.min_cluster_fraction,
        },
        "outputs": [csv_path.name],
    })
    print(
        f"delta={dataset.delta:.6g} snr={dataset.snr:.6g} "
        f"alpha={dataset.min_cluster_fraction:.6g}",
        file=sys.stderr,
    )
    if args.verbose:
        print(f"wrote {csv_path} ({dataset.n} points)", file=sys.stderr)
    return EXIT_OK


# ----------------------------------------------------------------- cluster


def _true_centroids_from_manifest(dataset_path: Path) -> np.ndarray | None:
    base = str(dataset_path)
    manifest_path = Path(base[: -len(".csv")] + ".manifest.json") if base.endswith(".csv") \
        else dataset_path.with_suffix(".manifest.json")
    if not manifest_path.exists():
        return None
    try:
        payload = json.loads(manifest_path.read_text())
    except json.JSONDecodeError:
        return None
    centroids = payload.get("true_centroids")
    return None if centroids is None else np.asarray(centroids, dtype=float)


def _cmd_cluster(args) -> int:
    config = _load_config(args.config, "cluster")
    algo = _resolve(args, config, "algo", "hybrid", str)
    init_name = _resolve(args, config, "init", "random", str)
    eps = _resolve(args, config, "eps", algorithms.DEFAULT_EPS, float)
    max_iter = _resolve(args, config, "max_iter", algorithms.DEFAULT_MAX_ITER, int)
    seed = _resolve(args, config, "seed", 0, int)
    k_flag = _resolve(args, config, "k", None, int)
    name = _resolve(args, config, "name", None, str)

    spec = algorithms.preset(algo)
    init = algorithms.init_strategy(init_name)
    dataset_path = Path(args.dataset)
    dataset = datagen.read_dataset_csv(dataset_path)
    centroids = _true_centroids_from_manifest(dataset_path)
    if centroids is not None and centroids.shape[1] == dataset.d:
        dataset.true_centroids = centroids

    if k_flag is not None:
        k = k_flag
    elif dataset.true_centroids is not None:
        k = dataset.k
    else:
        labelled = dataset.truth[dataset.truth != datagen.OUTLIER_LABEL]
        if labelled.size == 0:
            raise ValueError("cannot infer k from an all-outlier dataset; pass --k")
        k = int(labelled.max()) + 1
    if k > dataset.n:
        raise ValueError(f"k={k} exceeds the number of points ({dataset.n})")
    if init.kind == "omniscient" and dataset.true_centroids is None:
        raise ValueError(
            "omniscient init needs true centroids; generate the dataset with this "
            "tool so its .manifest.json sidecar is available"
        )

    rng = np.random.default_rng(seed)
    result = algorithms.run(
        dataset, spec, init, eps=eps, max_iter=max_iter, rng=rng, k=k
    )

    out = _out_dir(args)
    name = name or f"cluster_{algo}"
    result_path = out / f"{name}.result.json"
    manifest_path = out / f"{name}.manifest.json"
    payload = {
        "algorithm": algo,
        "init": init_name,
        "eps": eps,
        "max_iter": max_iter,
        "seed": seed,
        "k": k,
        **result.to_json_dict(),
    }
    result_path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    _write_manifest(manifest_path, {
        "command": "cluster",
        "dataset": str(args.dataset),
        "seed": seed,
        "config": {
            "algo": algo, "init": init_name, "eps": eps,
            "max_iter": max_iter, "k": k,
        },
        "outputs": [result_path.name],
    })

    has_truth = (dataset.truth != datagen.OUTLIER_LABEL).any()
    summary = f"converged={result.converged} iterations={result.iterations}"
    if has_truth:
        if init.kind == "random" and k <= metrics.MAX_BRUTE_FORCE_K:
            mp, _ = metrics.mislabeling_aligned(result.labels, dataset.truth, k)
            summary += f" mp_aligned={mp:.6g}"
        else:
            mp = metrics.mislabeling_raw(result.labels, dataset.truth)
            summary += f" mp_raw={mp:.6g}"
    print(summary, file=sys.stderr)
    return EXIT_OK if result.converged else EXIT_ITERATION_CAP


# ------------------------------------------------------- benchmark commands


def _print_cell(rows) -> None:
    first = rows[0]
    parts = " | ".join(
        f"{r.algorithm} {r.mp_metric}={r.mp_mean:.4g}±{r.mp_ci:.4g}" for r in rows
    )
    print(f"[{first.regime}] {first.sweep_name}={first.sweep_value:.6g}: {parts}")


def _want_figures(args, config) -> bool:
    if args.no_figures:
        return False
    return bool(config.get("figures", True))


def _regime_spec_manifest(spec: experiments.RegimeSpec) -> dict:
    payload = dataclasses.asdict(spec)
    payload["sweep"] = list(payload["sweep"])
    payload["algorithms"] = list(payload["algorithms"])
    return payload


def _cmd_regime(args) -> int:
    config = _load_config(args.config, "regime")
    regime = args.regime
    sweep_raw = _resolve(args, config, "sweep", experiments.DEFAULT_SWEEPS[regime])
    sweep = _parse_number_list(sweep_raw, "sweep")
    reps = _resolve(args, config, "repetitions", experiments.DEFAULT_REPETITIONS, int)
    init = _resolve(args, config, "init", "omniscient", str)
    algos_raw = _resolve(args, config, "algorithms", experiments.DEFAULT_ALGORITHMS)
    algos = _parse_name_list(algos_raw, "algorithms")
    seed = _resolve(args, config, "seed", 0, int)
    eps = _resolve(args, config, "eps", algorithms.DEFAULT_EPS, float)
    max_iter = _resolve(args, config, "max_iter", algorithms.DEFAULT_MAX_ITER, int)
    name = _resolve(args, config, "name", regime, str)

    spec = experiments.RegimeSpec(
        regime=regime, sweep=sweep, repetitions=reps, init=init,
        algorithms=algos, master_seed=seed, eps=eps, max_iter=max_iter,
    )
    table = experiments.run_regime(spec, jobs=_jobs(args), on_cell=_print_cell)

    out = _out_dir(args)
    csv_path = out / f"{name}.csv"
    experiments.write_regime_csv(table, csv_path)
    outputs = [csv_path.name]
    if _want_figures(args, config):
        from . import figures

        fig_path = out / f"{name}.png"
        figures.save_regime_figure(table, fig_path)
        outputs.append(fig_path.name)
    _write_manifest(out / f"{name}.manifest.json", {
        "command": "regime",
        "spec": _regime_spec_manifest(spec),
        "outputs": outputs,
    })
    return EXIT_OK


def _cmd_demo(args) -> int:
    config = _load_config(args.config, "demo")
    reps = _resolve(args, config, "repetitions", 1000, int)
    seed = _resolve(args, config, "seed", 0, int)
    sigma = _resolve(args, config, "sigma", experiments.DEMO_SIGMA, float)
    ppc = _resolve(
        args, config, "points_per_cluster", experiments.DEMO_POINTS_PER_CLUSTER, int
    )
    name = _resolve(args, config, "name", "l1_demo", str)

    result = experiments.run_l1_demo(
        reps, seed, sigma=sigma, points_per_cluster=ppc
    )
    print(
        f"[l1_demo] l1-labeling mp_raw={result.mp_l1_mean:.6g}±{result.mp_l1_ci:.6g} "
        f"({reps} reps)"
    )
    print(
        f"[l1_demo] l2-labeling mp_raw={result.mp_l2_mean:.6g}±{result.mp_l2_ci:.6g} "
        f"({reps} reps)"
    )

    out = _out_dir(args)
    csv_path = out / f"{name}.csv"
    experiments.write_demo_csv(result, csv_path)
    outputs = [csv_path.name]
    if _want_figures(args, config):
        from . import figures

        fig_path = out / f"{name}.png"
        figures.save_demo_figure(result, fig_path)
        outputs.append(fig_path.name)
    _write_manifest(out / f"{name}.manifest.json", {
        "command": "demo",
        "spec": {
            "repetitions": reps, "master_seed": seed, "sigma": sigma,
            "points_per_cluster": ppc,
        },
        "outputs": outputs,
    })
    return EXIT_OK


def _cmd_decay(args) -> int:
    config = _load_config(args.config, "decay")
    snr_raw = _resolve(args, config, "snr", experiments.DEFAULT_SWEEPS["decay"])
    snr_values = _parse_number_list(snr_raw, "snr")
    reps = _resolve(args, config, "repetitions", 2000, int)
    seed = _resolve(args, config, "seed", 0, int)
    d = _resolve(args, config, "d", 1, int)
    ppc = _resolve(args, config, "points_per_cluster", 500, int)
    algos_raw = _resolve(args, config, "algorithms", ("hybrid",))
    algos = _parse_name_list(algos_raw, "algorithms")
    name = _resolve(args, config, "name", "decay", str)

    table = experiments.run_decay_curve(
        snr_values, reps, seed, d=d, points_per_cluster=ppc,
        algorithms=algos, jobs=_jobs(args), on_cell=_print_cell,
    )

    out = _out_dir(args)
    csv_path = out / f"{name}.csv"
    experiments.write_regime_csv(table, csv_path)
    outputs = [csv_path.name]
    if _want_figures(args, config):
        from . import figures

        fig_path = out / f"{name}.png"
        figures.save_decay_figure(table, fig_path)
        outputs.append(fig_path.name)
    _write_manifest(out / f"{name}.manifest.json", {
        "command": "decay",
        "spec": _regime_spec_manifest(table.spec),
        "outputs": outputs,
    })
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _add_common(parser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--seed", type=int, help="master seed (default 0)")
    parser.add_argument("--out", help="output directory (default current directory)")
    parser.add_argument("-v", "--verbose", action="store_true")


def _add_benchmark_common(parser) -> None:
    parser.add_argument("--reps", dest="repetitions", type=int,
                        help="Monte-Carlo repetitions")
    parser.add_argument("--name", help="output file stem")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip the PNG figure next to the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustclust",
        description="Robust k-clustering benchmarks: data generation, single "
                    "runs, and Monte-Carlo mislabeling tables with figures.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic mixture dataset CSV")
    _add_common(p)
    p.add_argument("--k", type=int, help="number of clusters (default 4)")
    p.add_argument("--d", type=int, help="dimension (default 10)")
    p.add_argument("--sigma", type=float, help="cluster noise scale (default 2)")
    p.add_argument("--points-per-cluster", dest="points_per_cluster", type=int,
                   help="points per cluster (default 100)")
    p.add_argument("--radius", dest="centroid_radius", type=float,
                   help="centroid sphere radius (default 5)")
    p.add_argument("--n-out", dest="n_out", type=int,
                   help="number of planted outliers (default 0)")
    p.add_argument("--outlier-sigma", dest="sigma_out", type=float,
                   help="outlier noise scale (default 10)")
    p.add_argument("--outlier-center", dest="outlier_center",
                   help="outlier center, comma-separated (default origin)")
    p.add_argument("--name", help="output file stem (default 'dataset')")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("cluster", help="run one clustering algorithm on a dataset CSV")
    _add_common(p)
    p.add_argument("--dataset", required=True, help="dataset CSV path")
    p.add_argument("--algo", choices=sorted(algorithms.PRESETS),
                   help="algorithm preset (default hybrid)")
    p.add_argument("--init", choices=("random", "omniscient"),
                   help="initialization (default random)")
    p.add_argument("--k", type=int, help="number of clusters (default: inferred)")
    p.add_argument("--eps", type=float, help="stopping tolerance (default 0.001)")
    p.add_argument("--max-iter", dest="max_iter", type=int,
                   help="iteration cap (default 100)")
    p.add_argument("--name", help="output file stem (default cluster_<algo>)")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("regime", help="run one contamination benchmark regime")
    _add_common(p)
    p.add_argument("regime", choices=experiments.CONTAMINATION_REGIMES)
    p.add_argument("--sweep", help="sweep values, comma-separated")
    p.add_argument("--init", choices=("random", "omniscient"),
                   help="initialization (default omniscient)")
    p.add_argument("--algo", dest="algorithms",
                   help="algorithm subset, comma-separated (default all three)")
    p.add_argument("--eps", type=float, help="stopping tolerance (default 0.001)")
    p.add_argument("--max-iter", dest="max_iter", type=int,
                   help="iteration cap (default 100)")
    p.add_argument("--jobs", type=int, help="worker processes (default: cpu count)")
    _add_benchmark_common(p)
    p.set_defaults(func=_cmd_regime)

    p = sub.add_parser("demo", help="L1 vs L2 labeling at true centroids, fixed instance")
    _add_common(p)
    p.add_argument("--sigma", type=float, help="noise scale (default 10)")
    p.add_argument("--points-per-cluster", dest="points_per_cluster", type=int,
                   help="points per cluster (default 500)")
    _add_benchmark_common(p)
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("decay", help="mislabeling decay against signal-to-noise ratio")
    _add_common(p)
    p.add_argument("--snr", help="signal-to-noise values, comma-separated")
    p.add_argument("--d", type=int, help="dimension (default 1)")
    p.add_argument("--points-per-cluster", dest="points_per_cluster", type=int,
                   help="points per cluster (default 500)")
    p.add_argument("--algo", dest="algorithms",
                   help="algorithm subset, comma-separated (default hybrid)")
    p.add_argument("--jobs", type=int, help="worker processes (default: cpu count)")
    _add_benchmark_common(p)
    p.set_defaults(func=_cmd_decay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code in (0, None):
            return EXIT_OK
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
