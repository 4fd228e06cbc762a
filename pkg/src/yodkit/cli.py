"""Command-line entry point: ``yodkit <subcommand>``.

Exit codes: 0 success, 2 I/O problem, 3 empty or invalid data,
4 infeasible split, 5 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from yodkit import corpus, eval_harness, readability
from yodkit.text_core import EmptyText, NoWords, compute_stats

log = logging.getLogger("yodkit")


class _StderrHandler(logging.Handler):
    # Resolves sys.stderr at emit time so redirected streams are honoured.
    def emit(self, record):
        sys.stderr.write(self.format(record) + "\n")

EXIT_OK, EXIT_IO, EXIT_DATA, EXIT_SPLIT, EXIT_NUMERIC = 0, 2, 3, 4, 5
DEFAULT_SEED = 1234
SEED_ENV = "YODKIT_SEED"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"{SEED_ENV} must be an integer, got {raw!r}", EXIT_DATA) from None


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def write_atomic(files: dict[Path, str]) -> None:
    """Write every file to a temporary sibling first, then rename them all."""
    staged = []
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            Path(tmp).unlink(missing_ok=True)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"input file not found: {path}", EXIT_IO)
    return p


def _ingest(path: str) -> list[corpus.CorpusRecord]:
    try:
        records, errors = corpus.ingest(_require_file(path))
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None
    for err in errors:
        log.warning("skipping malformed record: %s", err)
    if not records:
        raise CliError(f"no usable records in {path}", EXIT_DATA)
    return records


def _rows_to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _rows_to_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    cells = [list(header), *[[str(c) for c in r] for r in rows]]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# --- score ---------------------------------------------------------------


def cmd_score(args) -> int:
    formulas = [f.strip() for f in args.formulas.split(",") if f.strip()]
    unknown = [f for f in formulas if f not in readability.FORMULAS]
    if unknown:
        raise CliError(f"unknown formulas: {', '.join(unknown)}", EXIT_DATA)
    foreign = readability.ENGLISH_FORMULAS if args.lang == "turkish" else readability.TURKISH_FORMULAS
    for f in formulas:
        if f in foreign:
            log.warning("%s was designed for %s text; scoring %s input anyway",
                        f, "English" if args.lang == "turkish" else "Turkish", args.lang)

    rows = []
    for path in args.inputs or ["-"]:
        text = _read_text(path)
        try:
            stats = compute_stats(text, args.lang)
        except (EmptyText, NoWords) as exc:
            raise CliError(f"{path}: {exc}", EXIT_DATA) from None
        for f in formulas:
            s = readability.score(stats, f)
            rows.append({"document": path, "formula": f, "value": s.value,
                         "level": s.level_label, "level_index": s.level_index})

    header = ["document", "formula", "value", "level", "level_index"]
    if args.format == "json":
        out = dumps(rows)
    else:
        flat = [[r["document"], r["formula"], f"{r['value']:.4f}", r["level"], r["level_index"]] for r in rows]
        out = _rows_to_csv(header, flat) if args.format == "csv" else _rows_to_table(header, flat)
    sys.stdout.write(out)
    return EXIT_OK


# --- analyze -------------------------------------------------------------


def cmd_analyze(args) -> int:
    records = _ingest(args.input)
    report = corpus.histogram_report(records)
    header = ["level", "count", "weight", "avg_tokens"]
    rows = [
        [r["level"], r["count"], f"{r['weight']:.4f}",
         "-" if r["avg_tokens"] is None else f"{r['avg_tokens']:.4f}"]
        for r in report["levels"]
    ]
    rendered = {"json": dumps(report), "csv": _rows_to_csv(header, rows), "table": _rows_to_table(header, rows)}
    if args.out_dir:
        out = Path(args.out_dir)
        write_atomic({out / "histogram.json": rendered["json"], out / "histogram.csv": rendered["csv"]})
    sys.stdout.write(rendered[args.format])
    return EXIT_OK


# --- build-splits --------------------------------------------------------


def _level_counts(records) -> dict[str, int]:
    hist = corpus.histogram(records)
    return {str(level): hist[level] for level in corpus.LEVELS}


def cmd_build_splits(args) -> int:
    records = _ingest(args.input)
    if args.max_words is not None:
        records = corpus.select_fitting(records, args.max_words)
    deficits = corpus.deficient_levels(records, args.quota)
    if deficits:
        listing = "; ".join(f"level {d.level}: {d.available} < {d.required}" for d in deficits)
        raise CliError(f"split infeasible at quota {args.quota}: {listing}", EXIT_SPLIT)
    splits = corpus.build_splits(records, corpus.SplitSpec(args.quota, args.seed))

    def jsonl(rs):
        return "".join(json.dumps(r.to_json(), ensure_ascii=False, sort_keys=True) + "\n" for r in rs)

    manifest = {
        "input": Path(args.input).name,
        "quota": args.quota,
        "seed": args.seed,
        "counts": {name: _level_counts(rs) for name, rs in
                   (("train", splits.train), ("test", splits.test), ("validation", splits.validation))},
        "totals": {"train": len(splits.train), "test": len(splits.test),
                   "validation": len(splits.validation), "all": len(records)},
    }
    out = Path(args.out_dir)
    write_atomic({
        out / "train.jsonl": jsonl(splits.train),
        out / "test.jsonl": jsonl(splits.test),
        out / "validation.jsonl": jsonl(splits.validation),
        out / "manifest.json": dumps(manifest),
    })
    sys.stdout.write(dumps(manifest["totals"]))
    return EXIT_OK


# --- evaluate ------------------------------------------------------------


def read_predictions(path: str) -> list[eval_harness.EvalPair]:
    p = _require_file(path)
    pairs = []
    try:
        lines = p.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            target = obj["target_yod"]
            if isinstance(target, bool) or not isinstance(target, int) or not 1 <= target <= 16:
                raise ValueError(f"target_yod must be an integer in 1..16, got {target!r}")
            achieved = obj.get("achieved_yod")
            if achieved is not None and not isinstance(achieved, (int, float)):
                raise ValueError("achieved_yod must be a number")
            pairs.append(eval_harness.EvalPair(
                candidate=str(obj["candidate"]),
                reference=str(obj["reference"]),
                target_level=target,
                achieved_yod=None if achieved is None else float(achieved),
                id=str(obj.get("id", lineno)),
            ))
        except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
            raise CliError(f"{path}:{lineno}: invalid prediction record ({exc})", EXIT_DATA) from None
    return pairs


def report_files(report: eval_harness.EvalReport) -> dict[str, str]:
    return {
        "report.json": dumps(report.to_json()),
        "per_level.csv": eval_harness.render_csv(report.per_level, "yod"),
        "per_group.csv": eval_harness.render_csv(report.per_group, "group"),
        "per_level.txt": eval_harness.render_table(report.per_level, "yod"),
        "per_group.txt": eval_harness.render_table(report.per_group, "group"),
    }


def cmd_evaluate(args) -> int:
    pairs = read_predictions(args.input)
    if not pairs:
        raise CliError(f"{args.input}: no predictions", EXIT_DATA)
    if args.tolerance < 0:
        raise CliError("--tolerance must be non-negative", EXIT_DATA)
    report = eval_harness.evaluate_run(pairs, args.tolerance)
    files = report_files(report)
    if args.out_dir:
        out = Path(args.out_dir)
        write_atomic({out / name: text for name, text in files.items()})
    if args.format == "json":
        sys.stdout.write(files["report.json"])
    elif args.format == "csv":
        sys.stdout.write(files["per_level.csv"] + "\n" + files["per_group.csv"])
    else:
        sys.stdout.write(files["per_level.txt"] + "\n" + files["per_group.txt"])
    return EXIT_OK


# --- neural toy ----------------------------------------------------------


def _head_dims(raw: str) -> tuple[int, int, int]:
    try:
        dims = tuple(int(x) for x in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated ints, got {raw!r}") from None
    if len(dims) != 3:
        raise argparse.ArgumentTypeError("expected exactly three head widths")
    return dims


def cmd_train_toy(args) -> int:
    from yodkit.neural_toy import ControlVocab, Example, NonFiniteLoss, TrainConfig, build_model, train
    from yodkit.neural_toy.checkpoint import save_checkpoint

    records = _ingest(args.input)
    examples = [Example(r.source_text, r.summary, r.yod_level) for r in records]
    vocab = ControlVocab.from_texts([e.source for e in examples] + [e.summary for e in examples])
    steps_per_epoch = math.ceil(len(examples) / args.batch_size)
    total = args.epochs * steps_per_epoch
    if args.max_steps is not None:
        total = min(total, args.max_steps)
    warmup = args.warmup if args.warmup is not None else max(1, total // 10)
    try:
        cfg = TrainConfig(lr=args.lr, warmup_steps=min(warmup, total), epochs=args.epochs,
                          batch_size=args.batch_size, seed=args.seed, sampler=args.sampler)
        model = build_model(vocab, d_model=args.d_model, head_dims=args.head_dims,
                            dropout=args.dropout, seed=args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_DATA) from None
    weights = corpus.sampling_weights(corpus.histogram(records))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fd, tmp_log = tempfile.mkstemp(dir=out, prefix=".train_log.", suffix=".tmp")
    os.close(fd)
    try:
        result = train(model, examples, vocab, cfg, weights=weights, log_path=tmp_log,
                       max_steps=args.max_steps)
    except NonFiniteLoss as exc:
        Path(tmp_log).unlink(missing_ok=True)
        raise CliError(str(exc), EXIT_NUMERIC) from None
    save_checkpoint(out / "checkpoint.json", model, vocab)
    os.replace(tmp_log, out / "train_log.jsonl")
    totals = result.totals
    sys.stdout.write(dumps({"steps": len(totals), "initial_total": totals[0], "final_total": totals[-1]}))
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    from yodkit.neural_toy import ControlVocab, Example, build_model, collate, gradient_check

    examples = [
        Example("kısa bir metin", "bir", 1),
        Example("kısa bir metin", "okunabilirlik", 6),
        Example("uzun bir metin", "on iki", 12),
        Example("uzun bir metin", "on altı", 16),
    ]
    vocab = ControlVocab.from_texts([e.source for e in examples] + [e.summary for e in examples])
    model = build_model(vocab, d_model=args.d_model, head_dims=args.head_dims, dropout=0.0, seed=args.seed).double()
    params = dict(model.named_parameters())
    if args.inject_sign_flip is not None and args.inject_sign_flip not in params:
        raise CliError(f"unknown parameter {args.inject_sign_flip!r}", EXIT_DATA)
    result = gradient_check(model, collate(examples, vocab), epsilon=args.epsilon, seed=args.seed,
                            sign_flip=args.inject_sign_flip)
    sys.stdout.write(dumps({"max_rel_error": result.max_rel_error, "checked": result.checked,
                            "threshold": args.threshold, "per_parameter": result.per_parameter}))
    return EXIT_OK if result.passed(args.threshold) else EXIT_NUMERIC


# --- wiring --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="yodkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    seed = default_seed()

    p = sub.add_parser("score", help="readability scores for text files")
    p.add_argument("inputs", nargs="*", help="text files, '-' for stdin (default)")
    p.add_argument("--lang", choices=("turkish", "english"), default="turkish")
    p.add_argument("--formulas", default=",".join(readability.FORMULAS))
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("analyze", help="YOD histogram, sampling weights and token lengths")
    p.add_argument("input")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("build-splits", help="balanced train/test/validation splits")
    p.add_argument("input")
    p.add_argument("--quota", type=int, default=20)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--max-words", type=int, help="drop sources longer than this many words")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_build_splits)

    p = sub.add_parser("evaluate", help="ROUGE/METEOR/BLEU and YOD success tables")
    p.add_argument("input")
    p.add_argument("--tolerance", type=float, default=readability.DEFAULT_TOLERANCE)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("train-toy", help="train the toy controllable summarizer")
    p.add_argument("input")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--epochs", type=int, default=11)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--warmup", type=int, help="warmup steps (default: 10%% of the run)")
    p.add_argument("--sampler", choices=("weighted", "shuffle", "sequential"), default="weighted")
    p.add_argument("--d-model", type=int, default=64)
    p.add_argument("--head-dims", type=_head_dims, default=(512, 256, 128))
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=seed)
    p.set_defaults(func=cmd_train_toy)

    p = sub.add_parser("gradcheck", help="finite-difference check of the toy model's gradients")
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--threshold", type=float, default=1e-4)
    p.add_argument("--d-model", type=int, default=32)
    p.add_argument("--head-dims", type=_head_dims, default=(512, 256, 128))
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--inject-sign-flip", metavar="PARAM",
                   help="negate this parameter's backprop gradient (mutation test)")
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    if not any(isinstance(h, _StderrHandler) for h in log.handlers):
        handler = _StderrHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        log.addHandler(handler)
        log.propagate = False
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
