"""Command-line harness: explain one instance, benchmark many, or generate
synthetic planted datasets.

Exit codes: 0 success, 2 bad arguments, 3 data errors, 4 oracle errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import numpy as np

from .annealing import Explanation, SearchConfig, SearchTrace, explain
from .bridge_client import BridgeOracle
from .errors import DataError, OracleError
from .events import (
    DATASET_FORMATS,
    EventStore,
    dump_events_jsonl,
    extract_computation_graph,
    load_events,
)
from .oracle import ModelOracle
from .synthetic import PlantedOracle, PlantedSpec, build, write_truth_sidecar

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_ORACLE = 4


def _add_shared_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="dataset file")
    parser.add_argument(
        "--format", choices=DATASET_FORMATS, default="events-jsonl",
        help="dataset format (default: events-jsonl)",
    )
    parser.add_argument(
        "--model", required=True,
        help="builtin:planted[:model-file] or bridge:<endpoint>",
    )
    parser.add_argument("--hops", type=int, default=2)
    parser.add_argument("--size", type=int, default=20)
    parser.add_argument("--stages", type=int, choices=(1, 2, 3), default=3)
    parser.add_argument(
        "--lambda", dest="sparsity_weight", type=float, default=0.1,
        help="sparsity weight of the stage-3 objective",
    )
    parser.add_argument("--iters", type=int, default=500)
    parser.add_argument("--t0", type=float, default=1.0)
    parser.add_argument("--cooling", type=float, default=0.99)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output file or prefix")
    parser.add_argument(
        "--trace", action="store_true", help="include the per-iteration trace"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tgexplain",
        description="Explain black-box temporal-graph model predictions by "
        "annealing over event subsets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_explain = sub.add_parser("explain", help="explain one target event")
    _add_shared_flags(p_explain)
    p_explain.add_argument("--target", type=int, required=True)

    p_bench = sub.add_parser("benchmark", help="batch evaluation over instances")
    _add_shared_flags(p_bench)
    p_bench.add_argument("--instances", type=int, required=True)
    p_bench.add_argument(
        "--sizes", default="", help="comma-separated fixed explanation sizes"
    )
    p_bench.add_argument(
        "--lambdas", default="",
        help="comma-separated sparsity weights for free-size (3-stage) runs",
    )
    p_bench.add_argument(
        "--instance-frame", choices=("all", "labeled"), default="all",
        help="which events are eligible as explanation targets",
    )
    p_bench.add_argument(
        "--parallel", type=int, default=1,
        help="worker threads (used only when the oracle is reentrant)",
    )

    p_synth = sub.add_parser("synth", help="generate a planted dataset")
    p_synth.add_argument("--events", type=int, required=True)
    p_synth.add_argument("--nodes", type=int, required=True)
    p_synth.add_argument("--planted", type=int, default=0,
                         help="number of planted singleton events")
    p_synth.add_argument("--pairs", type=int, default=0,
                         help="number of planted dependent pairs")
    p_synth.add_argument("--weight", type=float, default=1.0,
                         help="weight of each planted singleton")
    p_synth.add_argument("--pair-weight", type=float, default=1.0)
    p_synth.add_argument("--bias", type=float, default=1.0)
    p_synth.add_argument("--tau", type=float, default=1e6)
    p_synth.add_argument("--noise", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True, help="events-jsonl output path")
    return parser


def _resolve_oracle(model_arg: str, data_path: str) -> ModelOracle:
    if model_arg.startswith("builtin:planted"):
        rest = model_arg[len("builtin:planted"):]
        if rest.startswith(":"):
            model_file = Path(rest[1:])
        else:
            if rest:
                raise DataError(f"unknown builtin model {model_arg!r}")
            model_file = _sidecar_path(data_path, "model.json")
        if not model_file.exists():
            raise DataError(f"planted model file {model_file} not found")
        return PlantedOracle.from_file(model_file)
    if model_arg.startswith("bridge:"):
        return BridgeOracle(model_arg)
    raise DataError(f"unknown model spec {model_arg!r}")


def _sidecar_path(data_path: str, suffix: str) -> Path:
    p = Path(data_path)
    return p.with_name(p.stem + "." + suffix)


def _load_store(args) -> EventStore:
    try:
        with open(args.data, "rb") as fp:
            return load_events(fp, args.format)
    except OSError as exc:
        raise DataError(f"cannot read {args.data}: {exc}") from None


def _search_config(args, size: Optional[int] = None, stages: Optional[int] = None,
                   sparsity_weight: Optional[float] = None,
                   seed: Optional[int] = None) -> SearchConfig:
    try:
        return SearchConfig(
            size=args.size if size is None else size,
            stages=args.stages if stages is None else stages,
            iterations_per_stage=args.iters,
            t0=args.t0,
            cooling=args.cooling,
            sparsity_weight=(
                args.sparsity_weight if sparsity_weight is None else sparsity_weight
            ),
            seed=args.seed if seed is None else seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


class UsageError(Exception):
    pass


def _explanation_doc(
    target: int,
    explanation: Explanation,
    config: SearchConfig,
    trace: Optional[SearchTrace] = None,
) -> dict:
    doc = {
        "target_event": target,
        "event_ids": list(explanation.event_ids),
        "objective": explanation.objective_value,
        "fid_plus": explanation.report.fid_plus,
        "fid_minus": explanation.report.fid_minus,
        "delta_fid": explanation.report.delta_fid,
        "alpha_fid": explanation.report.alpha_fid,
        "sparsity": explanation.report.sparsity,
        "size": len(explanation.event_ids),
        "stage_count": config.stages,
        "lambda": config.sparsity_weight,
        "seed": config.seed,
        "saturated": explanation.saturated,
    }
    if trace is not None:
        doc["trace"] = [asdict(step) for step in trace.steps]
    return doc


def cmd_explain(args) -> int:
    store = _load_store(args)
    oracle = _resolve_oracle(args.model, args.data)
    config = _search_config(args)
    cg = extract_computation_graph(store, args.target, args.hops)
    explanation, trace = explain(store, cg, oracle, config)
    doc = _explanation_doc(
        args.target, explanation, config, trace if args.trace else None
    )
    text = json.dumps(doc, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_float_list(raw: str, flag: str) -> list[float]:
    if not raw.strip():
        return []
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad {flag} list {raw!r}") from None


def _sample_instances(
    store: EventStore, args, rng: np.random.Generator
) -> list[int]:
    """Seeded sample of target events whose computation graph has >= 2
    candidates (degenerate instances carry no search problem)."""
    if args.instance_frame == "labeled":
        frame = [e.id for e in store.events if e.label is not None]
    else:
        frame = [e.id for e in store.events]
    if not frame:
        raise DataError("no eligible target events in the dataset")
    order = rng.permutation(len(frame))
    picked: list[int] = []
    for idx in order:
        target = frame[int(idx)]
        cg = extract_computation_graph(store, target, args.hops)
        if len(cg.candidate_ids) >= 2:
            picked.append(target)
        if len(picked) == args.instances:
            break
    if len(picked) < args.instances:
        raise DataError(
            f"only {len(picked)} of {args.instances} requested instances "
            "have a non-degenerate computation graph"
        )
    return picked


def cmd_benchmark(args) -> int:
    if args.instances < 1:
        raise UsageError("--instances must be >= 1")
    if args.parallel < 1:
        raise UsageError("--parallel must be >= 1")
    sizes = [int(v) for v in _parse_float_list(args.sizes, "--sizes")]
    lambdas = _parse_float_list(args.lambdas, "--lambdas")
    if not sizes and not lambdas:
        raise UsageError("benchmark needs --sizes and/or --lambdas")
    store = _load_store(args)
    oracle = _resolve_oracle(args.model, args.data)
    rng = np.random.default_rng(args.seed)
    targets = _sample_instances(store, args, rng)
    seed_seq = np.random.SeedSequence(args.seed)

    buckets: list[dict] = []  # {"mode", "size", "lambda"}
    for size in sizes:
        buckets.append({"mode": "fixed", "size": size, "lambda": None})
    for lam in lambdas:
        buckets.append({"mode": "free", "size": args.size, "lambda": lam})

    children = seed_seq.spawn(len(buckets) * len(targets))
    jobs = []
    for b_idx, bucket in enumerate(buckets):
        for i_idx, target in enumerate(targets):
            child = children[b_idx * len(targets) + i_idx]
            run_seed = int(child.generate_state(1, np.uint64)[0])
            if bucket["mode"] == "fixed":
                config = _search_config(
                    args, size=bucket["size"], stages=min(args.stages, 2),
                    seed=run_seed,
                )
            else:
                config = _search_config(
                    args, size=bucket["size"], stages=3,
                    sparsity_weight=bucket["lambda"], seed=run_seed,
                )
            jobs.append((b_idx, i_idx, target, config))

    def run_one(job):
        b_idx, i_idx, target, config = job
        cg = extract_computation_graph(store, target, args.hops)
        explanation, _ = explain(store, cg, oracle, config)
        return b_idx, i_idx, target, config, explanation

    reentrant = bool(getattr(oracle, "reentrant", False))
    if args.parallel > 1 and reentrant:
        with ThreadPoolExecutor(max_workers=args.parallel) as pool:
            results = list(pool.map(run_one, jobs))
    else:
        results = [run_one(job) for job in jobs]
    results.sort(key=lambda r: (r[0], r[1]))

    instance_docs = []
    per_bucket: dict[int, list[Explanation]] = {i: [] for i in range(len(buckets))}
    for b_idx, i_idx, target, config, explanation in results:
        per_bucket[b_idx].append(explanation)
        doc = _explanation_doc(target, explanation, config)
        doc["bucket"] = dict(buckets[b_idx])
        doc["instance"] = i_idx
        instance_docs.append(doc)

    summary_rows = []
    for b_idx, bucket in enumerate(buckets):
        expls = per_bucket[b_idx]
        summary_rows.append(
            {
                "mode": bucket["mode"],
                "size": bucket["size"],
                "lambda": bucket["lambda"],
                "instances": len(expls),
                "mean_mae": float(np.mean([e.report.fid_minus for e in expls])),
                "mean_alpha_fid": float(np.mean([e.report.alpha_fid for e in expls])),
                "mean_size": float(np.mean([len(e.event_ids) for e in expls])),
            }
        )

    csv_text = _summary_csv(summary_rows)
    if args.out:
        prefix = Path(args.out)
        prefix.with_name(prefix.name + ".summary.csv").write_text(csv_text)
        prefix.with_name(prefix.name + ".summary.json").write_text(
            json.dumps(summary_rows, sort_keys=True) + "\n"
        )
        with prefix.with_name(prefix.name + ".instances.jsonl").open("w") as fp:
            for doc in instance_docs:
                fp.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def _summary_csv(rows: list[dict]) -> str:
    fields = [
        "mode", "size", "lambda", "instances",
        "mean_mae", "mean_alpha_fid", "mean_size",
    ]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow(
            ["" if row[f] is None else repr(row[f]) if isinstance(row[f], float)
             else row[f] for f in fields]
        )
    return buf.getvalue()


def cmd_synth(args) -> int:
    n_planted = args.planted + 2 * args.pairs
    if n_planted > args.events:
        raise UsageError(
            f"{n_planted} planted events do not fit in {args.events} events"
        )
    if args.planted == 0 and args.pairs == 0:
        raise UsageError("need at least one planted singleton or pair")
    # Planted indices are spread over the stream deterministically.
    rng = np.random.default_rng(args.seed)
    indices = rng.choice(args.events, size=n_planted, replace=False)
    singles = tuple(
        (int(indices[i]), args.weight) for i in range(args.planted)
    )
    pairs = tuple(
        (
            (int(indices[args.planted + 2 * p]), int(indices[args.planted + 2 * p + 1])),
            args.pair_weight,
        )
        for p in range(args.pairs)
    )
    try:
        spec = PlantedSpec(
            n_nodes=args.nodes,
            n_events=args.events,
            singletons=singles,
            pairs=pairs,
            tau=args.tau,
            bias=args.bias,
            noise_scale=args.noise,
            seed=args.seed,
        )
    except DataError as exc:
        raise UsageError(str(exc)) from None
    bench = build(spec)
    out = Path(args.out)
    with out.open("w") as fp:
        dump_events_jsonl(bench.store, fp)
    with _sidecar_path(str(out), "truth.json").open("w") as fp:
        write_truth_sidecar(bench, fp)
    model_path = _sidecar_path(str(out), "model.json")
    model_path.write_text(json.dumps(bench.oracle.to_dict(), sort_keys=True) + "\n")
    sys.stdout.write(
        json.dumps(
            {
                "events": len(bench.store),
                "target": bench.target.id,
                "important": sorted(bench.truth.important_ids),
                "data": str(out),
                "truth": str(_sidecar_path(str(out), "truth.json")),
                "model": str(model_path),
            },
            sort_keys=True,
        )
        + "\n"
    )
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "explain":
            return cmd_explain(args)
        if args.command == "benchmark":
            return cmd_benchmark(args)
        return cmd_synth(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OracleError as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return EXIT_ORACLE


if __name__ == "__main__":
    sys.exit(main())
