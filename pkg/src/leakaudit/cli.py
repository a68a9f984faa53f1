"""Command-line pipeline: ingest, audit, split, probe, report.

Each subcommand reads and writes plain file artifacts under ``--out`` and
drops a ``manifest.json`` recording the tool version, the resolved
configuration (with hash), and sha256 digests of every input file, so any
stage can be re-run and audited. All outputs are byte-deterministic for
fixed inputs and seed.

Exit codes: 0 success, 1 usage error, 2 data error, 3 config/pattern error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Optional

from . import __version__
from .corpus import (
    ColumnMap,
    ColumnMapError,
    CorpusError,
    DataFormatError,
    config_hash,
    ingest_jsonl,
    ingest_multifc,
    validate,
    write_jsonl,
)
from .detector import (
    PatternConfigError,
    PatternSet,
    classify_dataset,
    read_statuses,
    write_statuses,
)
from .labels import LabelScheme, LabelSchemeError
from .probe import (
    InputMode,
    Partition,
    ProbeConfig,
    ProbeConfigError,
    ProbeModel,
    SplitError,
    TrainingError,
    evaluate,
    evaluate_same_claim_contrast,
    read_split_file,
    select_records,
    stratified_split,
    train,
    write_split_file,
)
from .reporting import (
    ConsistencyError,
    LeakStats,
    YearlyVerdictTable,
    YearRow,
    emit_report,
    leak_stats,
    verdict_ratio_by_year,
)
from .labels import VerdictGroup

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONFIG = 3

_DATA_ERRORS = (
    FileNotFoundError,
    CorpusError,
    SplitError,
    ConsistencyError,
    TrainingError,
)
_CONFIG_ERRORS = (PatternConfigError, LabelSchemeError, ProbeConfigError)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the pipeline reserves 2 for data."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(
    out_dir: Path,
    subcommand: str,
    config: dict[str, Any],
    inputs: list[Path],
    outputs: list[str],
) -> None:
    manifest = {
        "tool": "leakaudit",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "config_hash": config_hash(config),
        "inputs": {str(p): _sha256(p) for p in sorted(set(inputs))},
        "outputs": sorted(outputs),
    }
    blob = json.dumps(manifest, sort_keys=True, ensure_ascii=False, indent=2)
    (out_dir / "manifest.json").write_text(blob + "\n", encoding="utf-8", newline="\n")


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_patterns(args: argparse.Namespace) -> tuple[PatternSet, Optional[Path]]:
    if getattr(args, "patterns", None):
        path = Path(args.patterns)
        return PatternSet.from_file(path, lowercase_urls=not args.no_lowercase_urls), path
    return PatternSet.default(lowercase_urls=not args.no_lowercase_urls), None


def _load_labels(args: argparse.Namespace) -> tuple[LabelScheme, Optional[Path]]:
    if getattr(args, "labels", None):
        path = Path(args.labels)
        return LabelScheme.from_file(path), path
    return LabelScheme.default(), None


# -- subcommands ---------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    inputs: list[Path] = []
    if args.jsonl:
        source = Path(args.jsonl)
        dataset = ingest_jsonl(source, strict=not args.lenient)
        inputs.append(source)
        config: dict[str, Any] = {
            "source": "jsonl",
            "strict": not args.lenient,
            "jsonl": str(source),
        }
    else:
        if not args.snippets or not args.colmap:
            print(
                "leakaudit ingest: error: --multifc requires --snippets and --colmap",
                file=sys.stderr,
            )
            return EXIT_USAGE
        colmap_path = Path(args.colmap)
        column_map = ColumnMap.from_toml(colmap_path)
        claims = Path(args.multifc)
        snippets = Path(args.snippets)
        dataset = ingest_multifc(claims, snippets, column_map, strict=not args.lenient)
        inputs.extend([claims, colmap_path])
        config = {
            "source": "multifc",
            "strict": not args.lenient,
            "claims": str(claims),
            "snippets": str(snippets),
            "colmap": str(colmap_path),
        }

    dataset_path = out / "dataset.jsonl"
    write_jsonl(dataset, dataset_path)
    report = validate(dataset)
    emit_report(report.to_json_dict(), "json", out / "validation.json")
    config["provenance"] = dataset.provenance
    _write_manifest(out, "ingest", config, inputs, ["dataset.jsonl", "validation.json"])
    print(
        f"ingested {report.records} claims, {report.snippets} snippets "
        f"({report.zero_snippet_claims} without snippets)"
    )
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    dataset_path = Path(args.dataset)
    dataset = ingest_jsonl(dataset_path, strict=True)
    patterns, patterns_path = _load_patterns(args)
    scheme, labels_path = _load_labels(args)

    statuses = classify_dataset(dataset, patterns, threads=args.threads)
    order = [r.claim_id for r in dataset.records]
    write_statuses(statuses, out / "statuses.jsonl", order)

    stats = leak_stats(dataset, statuses, misinfo_only=args.misinfo_only, scheme=scheme)
    emit_report(stats, "json", out / "leak_stats.json")
    emit_report(stats, "csv", out / "leak_stats.csv")

    yearly = verdict_ratio_by_year(dataset, other_in_denominator=args.other_in_denominator)
    emit_report(yearly, "json", out / "yearly_verdicts.json")
    emit_report(yearly, "csv", out / "yearly_verdicts.csv")

    inputs = [dataset_path] + [p for p in (patterns_path, labels_path) if p]
    config = {
        "misinfo_only": args.misinfo_only,
        "other_in_denominator": args.other_in_denominator,
        "lowercase_urls": not args.no_lowercase_urls,
        "threads": args.threads,
        "patterns": str(patterns_path) if patterns_path else "builtin",
        "labels": str(labels_path) if labels_path else "builtin",
    }
    _write_manifest(
        out,
        "audit",
        config,
        inputs,
        [
            "statuses.jsonl",
            "leak_stats.json",
            "leak_stats.csv",
            "yearly_verdicts.json",
            "yearly_verdicts.csv",
        ],
    )
    print(
        f"audited {stats.population} claims ({stats.filter}): "
        f"url {stats.by_url} ({stats.url_ratio:.1%}), "
        f"phrase {stats.by_phrase} ({stats.phrase_ratio:.1%}), "
        f"either {stats.by_either} ({stats.either_ratio:.1%})"
    )
    return EXIT_OK


def cmd_split(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    dataset_path = Path(args.dataset)
    dataset = ingest_jsonl(dataset_path, strict=True)
    records = dataset.records
    if args.org:
        records = tuple(r for r in records if r.organization == args.org.lower())
        if not records:
            raise SplitError(f"no records for organization {args.org!r}")
    train_ids, dev_ids, test_ids = stratified_split(records, seed=args.seed)
    write_split_file(train_ids, out / "train.txt")
    write_split_file(dev_ids, out / "dev.txt")
    write_split_file(test_ids, out / "test.txt")
    config = {"org": args.org, "seed": args.seed, "fractions": [0.7, 0.1, 0.2]}
    _write_manifest(
        out, "split", config, [dataset_path], ["train.txt", "dev.txt", "test.txt"]
    )
    print(f"split {len(records)} claims into {len(train_ids)}/{len(dev_ids)}/{len(test_ids)}")
    return EXIT_OK


def _resolve_scale(args: argparse.Namespace) -> tuple[tuple[str, ...], Optional[Path]]:
    if args.label_scale:
        return tuple(s.strip() for s in args.label_scale.split(",") if s.strip()), None
    scheme, labels_path = _load_labels(args)
    scale = scheme.experiment_scales.get(args.org.lower()) if args.org else None
    if not scale:
        raise ProbeConfigError(
            f"no veracity scale for organization {args.org!r}; "
            "pass --label-scale or extend the label file"
        )
    return scale, labels_path


def cmd_probe_train(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    dataset_path = Path(args.dataset)
    dataset = ingest_jsonl(dataset_path, strict=True)
    scale, labels_path = _resolve_scale(args)
    config = ProbeConfig(
        input_mode=InputMode(args.mode),
        label_scale=scale,
        token_budget=args.token_budget,
        ngram_orders=tuple(int(n) for n in args.ngram_orders.split(",")),
        hash_dims=args.hash_dims,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        seed=args.seed,
    )
    splits_dir = Path(args.splits)
    train_file = splits_dir / "train.txt"
    dev_file = splits_dir / "dev.txt"
    train_records = select_records(dataset, read_split_file(train_file))
    dev_records = select_records(dataset, read_split_file(dev_file))
    model = train(train_records, dev_records, config)
    model_path = out / "model.bin"
    model.save(model_path)
    emit_report(
        {"config": config.to_json_dict(), "provenance": model.provenance},
        "json",
        out / "train_report.json",
    )
    inputs = [dataset_path, train_file, dev_file] + ([labels_path] if labels_path else [])
    _write_manifest(
        out,
        "probe-train",
        {"probe": config.to_json_dict(), "org": args.org},
        inputs,
        ["model.bin", "train_report.json"],
    )
    print(
        f"trained probe on {model.provenance['train_size']} claims "
        f"(best epoch {model.provenance['best_epoch']}, "
        f"dev macro-F1 {model.provenance['best_dev_macro_f1']}, "
        f"backend {model.provenance['backend']})"
    )
    return EXIT_OK


def _check_mode(args: argparse.Namespace, model: ProbeModel) -> None:
    if args.mode and InputMode(args.mode) is not model.config.input_mode:
        raise ProbeConfigError(
            f"--mode {args.mode} conflicts with the model's input mode "
            f"{model.config.input_mode.value}"
        )


def cmd_probe_eval(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    dataset_path = Path(args.dataset)
    statuses_path = Path(args.statuses)
    model_path = Path(args.model)
    dataset = ingest_jsonl(dataset_path, strict=True)
    statuses = read_statuses(statuses_path)
    model = ProbeModel.load(model_path)
    _check_mode(args, model)
    test_file = Path(args.splits) / "test.txt"
    test_records = select_records(dataset, read_split_file(test_file))

    reports = {
        partition: evaluate(model, test_records, statuses, partition)
        for partition in (Partition.ALL, Partition.LEAKED, Partition.UNLEAKED)
    }
    for partition, report in reports.items():
        emit_report(report.to_json_dict(), "json", out / f"eval_{partition.value.lower()}.json")
    leaked_micro = reports[Partition.LEAKED].f1_micro
    unleaked_micro = reports[Partition.UNLEAKED].f1_micro
    gap = (
        round(leaked_micro - unleaked_micro, 4)
        if leaked_micro is not None and unleaked_micro is not None
        else None
    )
    summary = {
        "n_samples": {p.value: reports[p].n_samples for p in reports},
        "f1_micro": {
            p.value: (None if reports[p].f1_micro is None else round(reports[p].f1_micro, 4))
            for p in reports
        },
        "f1_macro": {
            p.value: (None if reports[p].f1_macro is None else round(reports[p].f1_macro, 4))
            for p in reports
        },
        "micro_gap_leaked_minus_unleaked": gap,
    }
    emit_report(summary, "json", out / "eval_summary.json")
    _write_manifest(
        out,
        "probe-eval",
        {"mode": model.config.input_mode.value},
        [dataset_path, statuses_path, model_path, test_file],
        ["eval_all.json", "eval_leaked.json", "eval_unleaked.json", "eval_summary.json"],
    )
    sizes = summary["n_samples"]
    print(
        f"evaluated {sizes['ALL']} claims (leaked {sizes['LEAKED']}, "
        f"unleaked {sizes['UNLEAKED']}); micro gap {gap}"
    )
    return EXIT_OK


def cmd_probe_contrast(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    dataset_path = Path(args.dataset)
    statuses_path = Path(args.statuses)
    model_path = Path(args.model)
    dataset = ingest_jsonl(dataset_path, strict=True)
    statuses = read_statuses(statuses_path)
    model = ProbeModel.load(model_path)
    _check_mode(args, model)
    test_file = Path(args.splits) / "test.txt"
    test_records = select_records(dataset, read_split_file(test_file))

    contrast = evaluate_same_claim_contrast(model, test_records, statuses)
    emit_report(contrast.leaked.to_json_dict(), "json", out / "contrast_leaked.json")
    emit_report(contrast.unleaked.to_json_dict(), "json", out / "contrast_unleaked.json")
    summary = {
        "n_claims": contrast.leaked.n_samples,
        "f1_micro": {
            "leaked_evidence": contrast.leaked.f1_micro and round(contrast.leaked.f1_micro, 4),
            "unleaked_evidence": contrast.unleaked.f1_micro
            and round(contrast.unleaked.f1_micro, 4),
        },
        "f1_macro": {
            "leaked_evidence": contrast.leaked.f1_macro and round(contrast.leaked.f1_macro, 4),
            "unleaked_evidence": contrast.unleaked.f1_macro
            and round(contrast.unleaked.f1_macro, 4),
        },
    }
    emit_report(summary, "json", out / "contrast_summary.json")
    _write_manifest(
        out,
        "probe-contrast",
        {"mode": model.config.input_mode.value},
        [dataset_path, statuses_path, model_path, test_file],
        ["contrast_leaked.json", "contrast_unleaked.json", "contrast_summary.json"],
    )
    print(f"contrasted {summary['n_claims']} claims with mixed evidence")
    return EXIT_OK


def _rebuild_report(payload: dict[str, Any]) -> Any:
    if {"by_either", "by_phrase", "by_url", "filter", "population"} <= payload.keys():
        return LeakStats(
            population=payload["population"],
            by_url=payload["by_url"]["count"],
            by_phrase=payload["by_phrase"]["count"],
            by_either=payload["by_either"]["count"],
            filter=payload["filter"],
        )
    if {"years", "excluded"} <= payload.keys():
        rows = {}
        for year_str, row in payload["years"].items():
            year = int(year_str)
            counts = {VerdictGroup(g): c for g, c in row["counts"].items()}
            ratios = {VerdictGroup(g): r for g, r in row["ratios"].items()}
            rows[year] = YearRow(year=year, counts=counts, other=row["other"], ratios=ratios)
        return YearlyVerdictTable(
            rows=rows,
            excluded=payload["excluded"],
            excluded_undated=payload.get("excluded_undated", 0),
            excluded_other=payload.get("excluded_other", 0),
        )
    return payload


def cmd_report(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    stats_path = Path(args.stats)
    if not stats_path.is_file():
        raise FileNotFoundError(f"stats file not found: {stats_path}")
    try:
        payload = json.loads(stats_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{stats_path}: not valid JSON: {exc}") from exc
    report = _rebuild_report(payload)
    name = args.name or (stats_path.stem + "." + args.format)
    emit_report(report, args.format, out / name)
    _write_manifest(
        out, "report", {"format": args.format, "name": name}, [stats_path], [name]
    )
    print(f"wrote {name}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="leakaudit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"leakaudit {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_ingest = sub.add_parser("ingest", help="ingest a corpus into canonical JSONL")
    source = p_ingest.add_mutually_exclusive_group(required=True)
    source.add_argument("--jsonl", help="neutral JSONL input file")
    source.add_argument("--multifc", help="MultiFC-style claims TSV")
    p_ingest.add_argument("--snippets", help="MultiFC snippets directory")
    p_ingest.add_argument("--colmap", help="TOML column map for the claims TSV")
    p_ingest.add_argument("--lenient", action="store_true", help="skip malformed lines")
    p_ingest.add_argument("--out", required=True, help="output directory")
    p_ingest.set_defaults(func=cmd_ingest)

    p_audit = sub.add_parser("audit", help="detect leaked evidence and report stats")
    p_audit.add_argument("--dataset", required=True, help="canonical dataset JSONL")
    p_audit.add_argument("--patterns", help="pattern TSV (default: builtin)")
    p_audit.add_argument("--labels", help="label scheme TSV (default: builtin)")
    p_audit.add_argument("--misinfo-only", action="store_true",
                         help="restrict leak stats to misinformation claims")
    p_audit.add_argument("--other-in-denominator", action="store_true",
                         help="include non-groupable verdicts in yearly ratios")
    p_audit.add_argument("--no-lowercase-urls", action="store_true",
                         help="match URL templates byte-exactly")
    p_audit.add_argument("--threads", type=int, default=1)
    p_audit.add_argument("--out", required=True)
    p_audit.set_defaults(func=cmd_audit)

    p_split = sub.add_parser("split", help="write seeded stratified split files")
    p_split.add_argument("--dataset", required=True)
    p_split.add_argument("--org", help="restrict to one organization")
    p_split.add_argument("--seed", type=int, default=1)
    p_split.add_argument("--out", required=True)
    p_split.set_defaults(func=cmd_split)

    p_probe = sub.add_parser("probe", help="train/evaluate the verdict probe")
    probe_sub = p_probe.add_subparsers(dest="probe_command", required=True)

    p_train = probe_sub.add_parser("train")
    p_train.add_argument("--dataset", required=True)
    p_train.add_argument("--splits", required=True, help="directory with train.txt/dev.txt")
    p_train.add_argument("--org", help="organization whose veracity scale to use")
    p_train.add_argument("--label-scale", help="comma-separated labels (overrides --org)")
    p_train.add_argument("--labels", help="label scheme TSV (default: builtin)")
    p_train.add_argument("--mode", required=True,
                         choices=[m.value for m in InputMode])
    p_train.add_argument("--token-budget", type=int, default=512)
    p_train.add_argument("--ngram-orders", default="1,2")
    p_train.add_argument("--hash-dims", type=int, default=2**18)
    p_train.add_argument("--epochs", type=int, default=10)
    p_train.add_argument("--learning-rate", type=float, default=0.1)
    p_train.add_argument("--seed", type=int, default=1)
    p_train.add_argument("--out", required=True)
    p_train.set_defaults(func=cmd_probe_train)

    for name, func in (("eval", cmd_probe_eval), ("contrast", cmd_probe_contrast)):
        p_cmd = probe_sub.add_parser(name)
        p_cmd.add_argument("--dataset", required=True)
        p_cmd.add_argument("--statuses", required=True, help="statuses.jsonl from audit")
        p_cmd.add_argument("--splits", required=True, help="directory with test.txt")
        p_cmd.add_argument("--model", required=True, help="model.bin from probe train")
        p_cmd.add_argument("--mode", choices=[m.value for m in InputMode],
                           help="consistency check against the model's mode")
        p_cmd.add_argument("--out", required=True)
        p_cmd.set_defaults(func=func)

    p_report = sub.add_parser("report", help="re-emit a stats artifact as JSON/CSV")
    p_report.add_argument("--stats", required=True, help="JSON stats artifact")
    p_report.add_argument("--format", required=True, choices=["json", "csv"])
    p_report.add_argument("--name", help="output file name")
    p_report.add_argument("--out", required=True)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ColumnMapError as exc:
        print(f"leakaudit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _CONFIG_ERRORS as exc:
        print(f"leakaudit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DATA_ERRORS as exc:
        print(f"leakaudit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
