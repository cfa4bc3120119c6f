"""Command-line interface.

Subcommands: ``validate``, ``metrics``, ``synth``, ``optimize``, ``baseline``,
``report``, ``hv``. Options can come from a flat ``key = value`` config file
(``--config``); explicit flags win over config values.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import shutil
import sys
import time
import traceback
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__, baselines, fusion, metrics, nsga2, plotting, score_data, synthgen
from .errors import ConfigError, DataError

_CONFIG_KEYS = {
    "manifest", "labels", "dev_labels", "eval_labels", "out_dir", "scores",
    "encoding", "population", "max_generations", "crossover_rate", "mutation_rate",
    "eta_m", "cutoff", "epsilon", "patience", "seed", "runs", "workers",
    "eer_ref", "params_ref", "znorm",
    "c_miss", "c_fa", "p_target",
    "mode", "subset", "prune", "l2_lambda", "max_iters", "tol", "name",
    "scenario", "n_bonafide", "n_spoof",
    "figures",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: D102 - argparse hook
        raise ConfigError(message)


def _load_config_file(path: str | Path) -> dict[str, str]:
    cfg: dict[str, str] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        cfg[key] = value.strip()
    return cfg


def _cast(value: str, cast: type) -> object:
    if cast is bool:
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean value {value!r}")
    try:
        return cast(value)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {value!r} as {cast.__name__}") from exc


def _opt(args: argparse.Namespace, cfg: dict[str, str], key: str, cast: type, default=None):
    value = getattr(args, key, None)
    if value is None and key in cfg:
        value = _cast(cfg[key], cast)
    if value is None:
        value = default
    return value


def _require(value, flag: str):
    if value is None:
        raise ConfigError(f"missing required option {flag}")
    return value


def _config_of(args: argparse.Namespace) -> dict[str, str]:
    if getattr(args, "config", None):
        return _load_config_file(args.config)
    return {}


def _write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def format_param_count(n: int) -> str:
    """Human display of a parameter count, 3 significant digits."""
    if n >= 1_000_000_000:
        return f"{n / 1e9:.3g}B"
    if n >= 1_000_000:
        return f"{n / 1e6:.3g}M"
    return str(n)


def _front_csv_text(front: nsga2.ParetoFront) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["eer", "params", "chromosome"])
    for member in front.members:
        writer.writerow(
            [repr(member.objectives.eer), member.objectives.params, fusion.format_chromosome(member.chromosome)]
        )
    return buf.getvalue()


def _hv_csv_text(trace: tuple[float, ...]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["generation", "hypervolume"])
    for gen, value in enumerate(trace, start=1):
        writer.writerow([gen, repr(value)])
    return buf.getvalue()


def _read_front_csv(path: str | Path) -> list[tuple[float, int, str]]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read front file {path}: {exc}") from exc
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != ["eer", "params", "chromosome"]:
        raise DataError(f"{path}: expected header eer,params,chromosome, got {header}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
        try:
            rows.append((float(row[0]), int(row[1]), row[2]))
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: cannot parse front row") from exc
    return rows


def _load_matrix(cfg: dict[str, str], args: argparse.Namespace) -> score_data.ScoreMatrix:
    manifest = _require(_opt(args, cfg, "manifest", str), "--manifest")
    labels_path = _require(_opt(args, cfg, "labels", str), "--labels")
    pool = score_data.load_manifest(manifest)
    labels = score_data.load_labels(labels_path)
    znorm = bool(_opt(args, cfg, "znorm", bool, False))
    return score_data.assemble_matrix(pool, labels, znorm=znorm)


def _cost_model(cfg: dict[str, str], args: argparse.Namespace) -> metrics.CostModel:
    return metrics.CostModel(
        c_miss=float(_opt(args, cfg, "c_miss", float, 1.0)),
        c_fa=float(_opt(args, cfg, "c_fa", float, 10.0)),
        p_target=float(_opt(args, cfg, "p_target", float, 0.05)),
    )


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _config_of(args)
    matrix = _load_matrix(cfg, args)
    stats = score_data.score_stats(matrix)
    print(f"{'detector':<24} {'params':>8} {'min':>10} {'max':>10} {'mean':>10} {'eer':>8}")
    for det, stat in zip(matrix.pool.detectors, stats):
        det_eer = metrics.eer(matrix.scores[det.id], matrix.labels)
        print(
            f"{det.name:<24} {format_param_count(det.param_count):>8} "
            f"{stat['min']:>10.4f} {stat['max']:>10.4f} {stat['mean']:>10.4f} {det_eer * 100:>7.2f}%"
        )
    labels = matrix.labels
    print(
        f"pool: D={matrix.n_detectors}, total {format_param_count(matrix.pool.total_param_count)}; "
        f"trials: T={matrix.n_trials} ({labels.n_bonafide} bonafide, {labels.n_spoof} spoof)"
    )
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    cfg = _config_of(args)
    scores_path = _require(_opt(args, cfg, "scores", str), "--scores")
    labels_path = _require(_opt(args, cfg, "labels", str), "--labels")
    labels = score_data.load_labels(labels_path)
    file_scores = score_data.load_score_file(scores_path)
    missing = [t for t in labels.trial_ids if t not in file_scores]
    if missing:
        raise DataError(f"score file {scores_path} is missing trial {missing[0]!r} ({len(missing)} missing)")
    vector = np.array([file_scores[t] for t in labels.trial_ids])
    cost = _cost_model(cfg, args)
    print(f"eer: {metrics.eer(vector, labels)!r}")
    print(f"min_dcf: {metrics.min_dcf(vector, labels, cost)!r}")
    if args.det_csv:
        curve = metrics.det_points(vector, labels)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["threshold", "far", "frr"])
        for t, far, frr in zip(curve.thresholds, curve.far, curve.frr):
            writer.writerow([repr(float(t)), repr(float(far)), repr(float(frr))])
        if args.det_csv == "-":
            sys.stdout.write(buf.getvalue())
        else:
            _write_text_atomic(Path(args.det_csv), buf.getvalue())
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _config_of(args)
    scenario_name = str(_opt(args, cfg, "scenario", str, "s1")).lower()
    if scenario_name not in synthgen.NAMED_SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario_name!r}; available: {sorted(synthgen.NAMED_SCENARIOS)}")
    out_dir = Path(_require(_opt(args, cfg, "out_dir", str), "--out-dir"))
    kwargs = {}
    for key in ("n_bonafide", "n_spoof", "seed"):
        value = _opt(args, cfg, key, int)
        if value is not None:
            kwargs[key] = int(value)
    scenario = synthgen.NAMED_SCENARIOS[scenario_name](**kwargs)
    matrix, truth = synthgen.generate(scenario)

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "scores").mkdir(exist_ok=True)
    score_files = {}
    for det in matrix.pool.detectors:
        rel = f"scores/{det.name}.txt"
        score_data.write_score_file(matrix.labels.trial_ids, matrix.scores[det.id], out_dir / rel)
        score_files[det.name] = rel
    score_data.write_manifest(matrix.pool, out_dir / "manifest.csv", score_file_for=score_files)
    score_data.write_labels(matrix.labels, out_dir / "labels.txt")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["detector", "d_prime", "analytic_eer", "param_count"])
    for row in truth.rows:
        writer.writerow([row.name, repr(row.d_prime), repr(row.analytic_eer), row.param_count])
    writer.writerow(
        ["equal-average-all", repr(truth.average_d_prime), repr(truth.average_eer), matrix.pool.total_param_count]
    )
    _write_text_atomic(out_dir / "ground_truth.csv", buf.getvalue())
    print(
        f"wrote scenario {scenario.name!r}: D={matrix.n_detectors}, T={matrix.n_trials} at {out_dir}"
    )
    return 0


def _run_config_from(cfg: dict[str, str], args: argparse.Namespace) -> nsga2.RunConfig:
    encoding = _require(_opt(args, cfg, "encoding", str), "--encoding")
    eer_ref = _opt(args, cfg, "eer_ref", float)
    params_ref = _opt(args, cfg, "params_ref", float)
    if (eer_ref is None) != (params_ref is None):
        raise ConfigError("--eer-ref and --params-ref must be given together")
    reference = (float(eer_ref), float(params_ref)) if eer_ref is not None else None
    workers = int(_opt(args, cfg, "workers", int, 1))
    if workers == 0:
        workers = os.cpu_count() or 1
    return nsga2.RunConfig(
        encoding=str(encoding),
        population_size=int(_opt(args, cfg, "population", int, 100)),
        max_generations=int(_opt(args, cfg, "max_generations", int, 500)),
        crossover_rate=_opt(args, cfg, "crossover_rate", float),
        mutation_rate=_opt(args, cfg, "mutation_rate", float),
        eta_m=float(_opt(args, cfg, "eta_m", float, 15.0)),
        cutoff=float(_opt(args, cfg, "cutoff", float, fusion.DEFAULT_CUTOFF)),
        epsilon=float(_opt(args, cfg, "epsilon", float, 1e-5)),
        patience=int(_opt(args, cfg, "patience", int, 30)),
        rng_seed=int(_opt(args, cfg, "seed", int, 0)),
        reference_point=reference,
        workers=workers,
    )


def _unique_run_dir(base: Path) -> Path:
    stamp = time.strftime("%Y%m%dT%H%M%S")
    candidate = base / stamp
    suffix = 0
    while candidate.exists():
        suffix += 1
        candidate = base / f"{stamp}-{suffix}"
    candidate.mkdir(parents=True)
    return candidate


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = _config_of(args)
    config = _run_config_from(cfg, args)
    n_runs = int(_opt(args, cfg, "runs", int, 1))
    matrix = _load_matrix(cfg, args)
    out_dir = Path(_opt(args, cfg, "out_dir", str, "."))

    run_dir = _unique_run_dir(out_dir / "runs")
    started = time.perf_counter()
    try:
        reports, super_front = nsga2.run_many(matrix, config, n_runs)
        for k, report in enumerate(reports):
            sub = run_dir / f"run_{k}"
            sub.mkdir()
            _write_text_atomic(sub / "front.csv", _front_csv_text(report.front))
            _write_text_atomic(sub / "hv.csv", _hv_csv_text(report.hv_trace))
        _write_text_atomic(run_dir / "super_front.csv", _front_csv_text(super_front))
        payload = {
            "tool": "evofuse",
            "version": __version__,
            "config": {**asdict(config), "runs": n_runs},
            "reference_point": list(reports[0].reference_point),
            "runs": [
                {
                    "seed": report.config.rng_seed,
                    "generations_run": report.generations_run,
                    "wall_time": report.wall_time,
                    "seed_front_hv": report.seed_front_hv,
                    "final_hv": report.hv_trace[-1],
                    "hv_trace": list(report.hv_trace),
                    "front": [
                        {
                            "eer": m.objectives.eer,
                            "params": m.objectives.params,
                            "chromosome": fusion.format_chromosome(m.chromosome),
                        }
                        for m in report.front.members
                    ],
                }
                for report in reports
            ],
            "super_front": [
                {
                    "eer": m.objectives.eer,
                    "params": m.objectives.params,
                    "chromosome": fusion.format_chromosome(m.chromosome),
                }
                for m in super_front.members
            ],
            "wall_time_total": time.perf_counter() - started,
        }
        _write_text_atomic(run_dir / "report.json", json.dumps(payload, indent=2) + "\n")
    except Exception:
        shutil.rmtree(run_dir, ignore_errors=True)
        raise
    best = super_front.members[0] if super_front.members else None
    print(f"run directory: {run_dir}")
    print(f"super front: {len(super_front)} points over {n_runs} run(s)")
    if best is not None:
        print(
            f"best eer: {best.objectives.eer * 100:.2f}% at {format_param_count(best.objectives.params)}"
        )
    return 0


def _parse_subset(raw: str, pool: score_data.DetectorPool) -> list[int]:
    ids = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        if token.isdigit():
            ids.append(int(token))
        else:
            ids.append(pool.index_of(token))
    if not ids:
        raise ConfigError("--subset selected no detectors")
    return ids


def cmd_baseline(args: argparse.Namespace) -> int:
    cfg = _config_of(args)
    mode = str(_require(_opt(args, cfg, "mode", str), "--mode"))
    if mode not in ("average", "logreg"):
        raise ConfigError(f"--mode must be average or logreg, got {mode!r}")
    manifest = _require(_opt(args, cfg, "manifest", str), "--manifest")
    pool = score_data.load_manifest(manifest)
    znorm = bool(_opt(args, cfg, "znorm", bool, False))
    dev_path = _opt(args, cfg, "dev_labels", str) or _opt(args, cfg, "labels", str)
    eval_path = _opt(args, cfg, "eval_labels", str) or _opt(args, cfg, "labels", str)
    if dev_path is None or eval_path is None:
        raise ConfigError("missing required option --labels (or --dev-labels/--eval-labels)")
    matrix_dev = score_data.assemble_matrix(pool, score_data.load_labels(dev_path), znorm=znorm)
    if eval_path == dev_path:
        matrix_eval = matrix_dev
    else:
        matrix_eval = score_data.assemble_matrix(pool, score_data.load_labels(eval_path), znorm=znorm)
    cost = _cost_model(cfg, args)
    out_dir = Path(_opt(args, cfg, "out_dir", str, "."))
    out_dir.mkdir(parents=True, exist_ok=True)

    rows: list[tuple[str, float, float, int]] = []
    if mode == "average":
        subset_raw = _require(_opt(args, cfg, "subset", str), "--subset")
        ids = _parse_subset(str(subset_raw), pool)
        objectives = baselines.average_fusion(ids, matrix_eval)
        bits = np.zeros(len(pool), dtype=bool)
        bits[ids] = True
        fused = fusion.fuse_binary(bits, matrix_eval)
        name = str(_opt(args, cfg, "name", str, "average"))
        rows.append((name, objectives.eer, metrics.min_dcf(fused, matrix_eval.labels, cost), objectives.params))
    else:
        hyper = {
            "l2_lambda": float(_opt(args, cfg, "l2_lambda", float, baselines.DEFAULT_L2_LAMBDA)),
            "max_iters": int(_opt(args, cfg, "max_iters", int, baselines.DEFAULT_MAX_ITERS)),
            "tol": float(_opt(args, cfg, "tol", float, baselines.DEFAULT_TOL)),
        }
        model = baselines.logreg_fit(matrix_dev, **hyper)
        fused = baselines.logreg_fuse(model, matrix_eval)
        rows.append(
            (
                "logreg",
                metrics.eer(fused, matrix_eval.labels),
                metrics.min_dcf(fused, matrix_eval.labels, cost),
                pool.total_param_count,
            )
        )
        prune = _opt(args, cfg, "prune", str)
        if prune is not None:
            prune_mode = {"by_weight": "by_weight", "by_eer": "by_individual_eer"}.get(str(prune))
            if prune_mode is None:
                raise ConfigError(f"--prune must be by_weight or by_eer, got {prune!r}")
            sweep = baselines.prune_sweep(matrix_dev, matrix_eval, prune_mode, **hyper)
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["k", "eer", "params"])
            for record in sweep.records:
                writer.writerow([len(record.active), repr(record.eer), record.params])
            sweep_path = out_dir / f"baseline_prune_{prune_mode}.csv"
            _write_text_atomic(sweep_path, buf.getvalue())
            print(f"prune sweep ({prune_mode}): {len(sweep.records)} sizes -> {sweep_path}")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["system", "eer", "min_dcf", "params"])
    for name, eer_value, dcf, params in rows:
        writer.writerow([name, repr(eer_value), repr(dcf), params])
    csv_path = out_dir / f"baseline_{mode}.csv"
    _write_text_atomic(csv_path, buf.getvalue())
    for name, eer_value, dcf, params in rows:
        print(f"{name}: eer {eer_value * 100:.2f}%, min_dcf {dcf:.4f}, params {format_param_count(params)}")
    print(f"objectives csv: {csv_path}")
    return 0


def _parse_named_paths(entries: list[str] | None) -> dict[str, Path]:
    named: dict[str, Path] = {}
    for entry in entries or []:
        if "=" in entry:
            name, raw = entry.split("=", 1)
        else:
            name, raw = Path(entry).stem, entry
        if name in named:
            raise ConfigError(f"duplicate system name {name!r}")
        named[name] = Path(raw)
    return named


def _read_baseline_csv(path: Path) -> list[tuple[str, float, float | None, int]]:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read baseline file {path}: {exc}") from exc
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != ["system", "eer", "min_dcf", "params"]:
        raise DataError(f"{path}: expected header system,eer,min_dcf,params, got {header}")
    rows = []
    for row in reader:
        if not row:
            continue
        rows.append((row[0], float(row[1]), float(row[2]) if row[2] else None, int(row[3])))
    return rows


def cmd_report(args: argparse.Namespace) -> int:
    cfg = _config_of(args)
    fronts = _parse_named_paths(args.front)
    baseline_files = _parse_named_paths(args.baseline)
    if not fronts and not baseline_files:
        raise ConfigError("report needs at least one --front or --baseline input")
    out_dir = Path(_opt(args, cfg, "out_dir", str, "."))
    out_dir.mkdir(parents=True, exist_ok=True)

    matrix = None
    cost = _cost_model(cfg, args)
    if _opt(args, cfg, "manifest", str) and _opt(args, cfg, "labels", str):
        matrix = _load_matrix(cfg, args)

    front_rows: dict[str, list[tuple[float, int, str]]] = {}
    for name, path in fronts.items():
        front_rows[name] = _read_front_csv(path)

    eer_ref = _opt(args, cfg, "eer_ref", float, nsga2.DEFAULT_EER_REF)
    params_ref = _opt(args, cfg, "params_ref", float)
    if params_ref is None and matrix is not None:
        params_ref = float(matrix.pool.total_param_count)

    all_front_points = np.array(
        [[eer_value, params] for rows in front_rows.values() for eer_value, params, _ in rows],
        dtype=np.float64,
    ).reshape(-1, 2)

    def fused_scores_for(chromosome_text: str) -> np.ndarray | None:
        if matrix is None:
            return None
        encoding = "binary" if set(chromosome_text) <= {"0", "1"} else "real"
        chrom = fusion.parse_chromosome(chromosome_text, encoding)
        if chrom.shape[0] != matrix.n_detectors:
            raise DataError(
                f"chromosome length {chrom.shape[0]} does not match pool size {matrix.n_detectors}"
            )
        if encoding == "binary":
            return fusion.fuse_binary(chrom, matrix)
        return fusion.fuse_real(chrom, matrix)

    table: list[dict[str, object]] = []
    for name, rows in front_rows.items():
        for k, (eer_value, params, chromosome) in enumerate(rows):
            fused = fused_scores_for(chromosome)
            dcf = metrics.min_dcf(fused, matrix.labels, cost) if fused is not None else None
            table.append(
                {
                    "system": f"{name}#{k}",
                    "kind": "front",
                    "eer": eer_value,
                    "min_dcf": dcf,
                    "params": params,
                    "dominated": "",
                }
            )
    for name, path in baseline_files.items():
        for system, eer_value, dcf, params in _read_baseline_csv(path):
            dominated = ""
            if all_front_points.size:
                le = (all_front_points <= [eer_value, params]).all(axis=1)
                lt = (all_front_points < [eer_value, params]).any(axis=1)
                dominated = "yes" if (le & lt).any() else "no"
            table.append(
                {
                    "system": f"{name}:{system}",
                    "kind": "baseline",
                    "eer": eer_value,
                    "min_dcf": dcf,
                    "params": params,
                    "dominated": dominated,
                }
            )

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["system", "kind", "eer", "min_dcf", "params", "dominated"])
    for row in table:
        writer.writerow(
            [
                row["system"],
                row["kind"],
                repr(row["eer"]),
                "" if row["min_dcf"] is None else repr(row["min_dcf"]),
                row["params"],
                row["dominated"],
            ]
        )
    comparison_csv = out_dir / "comparison.csv"
    _write_text_atomic(comparison_csv, buf.getvalue())

    print(f"{'system':<28} {'kind':<9} {'eer':>8} {'min_dcf':>9} {'params':>9} {'dominated':>9}")
    for row in table:
        dcf_text = f"{row['min_dcf']:.4f}" if row["min_dcf"] is not None else "-"
        print(
            f"{row['system']:<28} {row['kind']:<9} {row['eer'] * 100:>7.2f}% {dcf_text:>9} "
            f"{format_param_count(int(row['params'])):>9} {row['dominated']:>9}"
        )
    if params_ref is not None:
        for name, rows in front_rows.items():
            pts = np.array([[e, p] for e, p, _ in rows], dtype=np.float64).reshape(-1, 2)
            hv = nsga2.hypervolume_2d(pts, (float(eer_ref), float(params_ref)))
            print(f"hv[{name}] = {hv:.6f} (reference eer={eer_ref}, params={params_ref:g})")
    print(f"comparison csv: {comparison_csv}")

    if bool(_opt(args, cfg, "figures", bool, True)):
        front_arrays = {
            name: np.array([[e, p] for e, p, _ in rows], dtype=float).reshape(-1, 2)
            for name, rows in front_rows.items()
        }
        baseline_arrays = {}
        for name, path in baseline_files.items():
            pts = np.array([[e, p] for _, e, _, p in _read_baseline_csv(path)], dtype=float)
            baseline_arrays[name] = pts.reshape(-1, 2)
        figure_path = out_dir / "comparison.png"
        plotting.save_front_plot(front_arrays, baseline_arrays, figure_path)
        print(f"figure: {figure_path}")
    return 0


def cmd_hv(args: argparse.Namespace) -> int:
    cfg = _config_of(args)
    front_path = _require(args.front, "--front")
    eer_ref = float(_opt(args, cfg, "eer_ref", float, nsga2.DEFAULT_EER_REF))
    params_ref = _require(_opt(args, cfg, "params_ref", float), "--params-ref")
    rows = _read_front_csv(front_path)
    pts = np.array([[e, p] for e, p, _ in rows], dtype=np.float64).reshape(-1, 2)
    print(repr(nsga2.hypervolume_2d(pts, (eer_ref, float(params_ref)))))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument("--config", help="flat key = value config file; flags win over it")

    parser = _Parser(prog="evofuse", description=__doc__)
    parser.add_argument("--version", action="version", version=f"evofuse {__version__}")
    sub = parser.add_subparsers(dest="command")

    def add_data_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--manifest", help="detector manifest CSV")
        p.add_argument("--labels", help="trial label file")
        p.add_argument("--znorm", action=argparse.BooleanOptionalAction, default=None,
                       help="z-normalize each detector's scores (default off)")

    def add_cost_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--c-miss", type=float, dest="c_miss")
        p.add_argument("--c-fa", type=float, dest="c_fa")
        p.add_argument("--p-target", type=float, dest="p_target")

    p_validate = sub.add_parser("validate", parents=[parent], help="load inputs and print per-detector stats")
    add_data_flags(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    p_metrics = sub.add_parser("metrics", parents=[parent], help="EER and minDCF of one score file")
    p_metrics.add_argument("--scores", help="detector score file")
    p_metrics.add_argument("--labels", help="trial label file")
    p_metrics.add_argument("--det-csv", dest="det_csv", help="write the DET curve CSV here ('-' for stdout)")
    add_cost_flags(p_metrics)
    p_metrics.set_defaults(func=cmd_metrics)

    p_synth = sub.add_parser("synth", parents=[parent], help="write a synthetic scenario to disk")
    p_synth.add_argument("--scenario", help="named scenario (s1, sep)")
    p_synth.add_argument("--out-dir", dest="out_dir", help="output directory")
    p_synth.add_argument("--n-bonafide", type=int, dest="n_bonafide")
    p_synth.add_argument("--n-spoof", type=int, dest="n_spoof")
    p_synth.add_argument("--seed", type=int)
    p_synth.set_defaults(func=cmd_synth)

    p_opt = sub.add_parser("optimize", parents=[parent], help="run seeded NSGA-II fusion search")
    add_data_flags(p_opt)
    p_opt.add_argument("--encoding", choices=nsga2.ENCODINGS)
    p_opt.add_argument("--population", type=int)
    p_opt.add_argument("--max-generations", type=int, dest="max_generations")
    p_opt.add_argument("--crossover-rate", type=float, dest="crossover_rate")
    p_opt.add_argument("--mutation-rate", type=float, dest="mutation_rate")
    p_opt.add_argument("--eta-m", type=float, dest="eta_m")
    p_opt.add_argument("--cutoff", type=float)
    p_opt.add_argument("--epsilon", type=float)
    p_opt.add_argument("--patience", type=int)
    p_opt.add_argument("--seed", type=int)
    p_opt.add_argument("--runs", type=int, help="number of independent runs (derived seeds)")
    p_opt.add_argument("--workers", type=int, help="evaluation threads per run; 0 = all cores")
    p_opt.add_argument("--eer-ref", type=float, dest="eer_ref")
    p_opt.add_argument("--params-ref", type=float, dest="params_ref")
    p_opt.add_argument("--out-dir", dest="out_dir")
    p_opt.set_defaults(func=cmd_optimize)

    p_base = sub.add_parser("baseline", parents=[parent], help="averaging or logistic regression baselines")
    add_data_flags(p_base)
    p_base.add_argument("--dev-labels", dest="dev_labels")
    p_base.add_argument("--eval-labels", dest="eval_labels")
    p_base.add_argument("--mode", choices=("average", "logreg"))
    p_base.add_argument("--subset", help="comma-separated detector ids or names (average mode)")
    p_base.add_argument("--name", help="system name for the objectives CSV (average mode)")
    p_base.add_argument("--prune", choices=("by_weight", "by_eer"), help="run a pruning sweep (logreg mode)")
    p_base.add_argument("--l2-lambda", type=float, dest="l2_lambda")
    p_base.add_argument("--max-iters", type=int, dest="max_iters")
    p_base.add_argument("--tol", type=float)
    p_base.add_argument("--out-dir", dest="out_dir")
    add_cost_flags(p_base)
    p_base.set_defaults(func=cmd_baseline)

    p_report = sub.add_parser("report", parents=[parent], help="merge fronts and baselines into one table")
    p_report.add_argument("--front", action="append", help="NAME=front.csv (repeatable)")
    p_report.add_argument("--baseline", action="append", help="NAME=baseline.csv (repeatable)")
    add_data_flags(p_report)
    p_report.add_argument("--eer-ref", type=float, dest="eer_ref")
    p_report.add_argument("--params-ref", type=float, dest="params_ref")
    p_report.add_argument("--out-dir", dest="out_dir")
    p_report.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None,
                          help="render comparison figures (default on)")
    add_cost_flags(p_report)
    p_report.set_defaults(func=cmd_report)

    p_hv = sub.add_parser("hv", parents=[parent], help="hypervolume of a front CSV")
    p_hv.add_argument("--front", help="front CSV path")
    p_hv.add_argument("--eer-ref", type=float, dest="eer_ref")
    p_hv.add_argument("--params-ref", type=float, dest="params_ref")
    p_hv.set_defaults(func=cmd_hv, front_path=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.print_help()
            return 1
        return int(args.func(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except SystemExit:
        raise
    except Exception:
        print("internal error:", file=sys.stderr)
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
