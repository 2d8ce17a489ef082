"""Command-line entry point: ``htmltasks <subcommand> ...``.

Exit codes: 0 on success, 1 on user error (bad flags, missing files), 2 on
internal error.
"""

from __future__ import annotations

import argparse
import glob
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .baselines import closest_description_predictor
from .codec import (
    CategoryVocabulary,
    ClassificationExample,
    NavigationStep,
    build_fewshot_prompt,
    encode_action,
    encode_classification_input,
    encode_step,
)
from .config import ToolkitConfig, load_config
from .distill import distill_to_jsonl, read_jsonl
from .dom import find_by_attr, parse_html, strip_closing_tags
from .evaluation import evaluate
from .models import EchoGoldModel, RemoteModel, make_model
from .nav import EpisodeRecord, get_task, run_episode, success_rate, task_names
from .snippet import SnippetConfig, extract_snippet

log = logging.getLogger("htmltasks")


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc.strerror}") from exc


def _read_jsonl(path: str) -> list[dict]:
    return [json.loads(line) for line in _read_text(path).splitlines() if line.strip()]


def _jobs(args, cfg: ToolkitConfig) -> int:
    return args.jobs if args.jobs is not None else cfg.effective_jobs()


# ---------------------------------------------------------------------------
# subcommands


def cmd_distill(args, cfg: ToolkitConfig) -> int:
    paths = sorted({p for pattern in args.warc for p in glob.glob(pattern)})
    if not paths:
        raise UserError(f"no WARC files match {args.warc}")
    if args.max_per_desc is not None:
        cfg.distill.max_per_description = args.max_per_desc
    if args.seed is not None:
        cfg.distill.rng_seed = args.seed
    if args.balance is not None:
        cfg.distill.balance = args.balance
    _apply_snippet_flags(args, cfg)
    report_path = args.report or str(Path(args.out).with_suffix(".report.json"))
    report = distill_to_jsonl(
        paths, args.out, cfg.distill_config(), cfg.snippet_config(), report_path, _jobs(args, cfg)
    )
    print(
        f"{report.pages} pages, {report.pairs_raw} label pairs, {report.pairs_clean} clean, "
        f"{report.emitted} emitted -> {args.out}"
    )
    return 0


def _apply_snippet_flags(args, cfg: ToolkitConfig) -> None:
    if getattr(args, "pct", None) is not None:
        cfg.snippet.max_new_descendants_pct = args.pct
    if getattr(args, "height", None) is not None:
        cfg.snippet.max_height = args.height


def cmd_snippet(args, cfg: ToolkitConfig) -> int:
    _apply_snippet_flags(args, cfg)
    doc = parse_html(_read_text(args.html))
    if args.salient_id is not None:
        found = find_by_attr(doc, "id", args.salient_id)
        if not found:
            raise UserError(f"no element with id={args.salient_id!r}")
        salient = found[0]
    else:
        from .dom import assign_refs

        numbered = assign_refs(doc)
        salient = numbered.by_ref(args.salient_ref)
        if salient is None:
            raise UserError(f"no element with ref {args.salient_ref}")
    snippet = extract_snippet(doc, salient, cfg.snippet_config())
    out = Path(args.out) if args.out else Path(args.html).with_suffix(".snippet.html")
    out.write_text(snippet.html, encoding="utf-8")
    hops, pct, count = snippet.stats
    print(f"wrote {out} (hops={hops}, new_desc_pct={pct:.1f}, nodes={count})")
    return 0


def cmd_encode(args, cfg: ToolkitConfig) -> int:
    if args.kind == "navigate":
        if not args.steps:
            raise UserError("--steps is required for --kind navigate")
        lines = []
        for row in _read_jsonl(args.steps):
            step = NavigationStep.from_dict(row)
            lines.append(json.dumps({"input": encode_step(step), "output": encode_action(step.action)}))
        _emit("\n".join(lines) + ("\n" if lines else ""), args.out)
    elif args.kind == "classify":
        if not args.html:
            raise UserError("--html is required for --kind classify")
        _emit(encode_classification_input(_read_text(args.html)), args.out)
    else:
        if not args.html:
            raise UserError("--html (the query snippet) is required for --kind fewshot")
        examples = []
        if args.examples:
            examples = [ClassificationExample(r["snippet_html"], r["category"]) for r in _read_jsonl(args.examples)]
        vocab = CategoryVocabulary.load(cfg.vocabulary)
        _emit(build_fewshot_prompt(examples, _read_text(args.html), vocab), args.out)
    return 0


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_corrupt(args, cfg: ToolkitConfig) -> int:
    _emit(strip_closing_tags(parse_html(_read_text(args.html))), args.out)
    return 0


def _policy(spec: str, task: str, seed: int, cfg: ToolkitConfig):
    if spec == "oracle":
        return make_model(f"oracle:{task}")
    if spec == "random":
        return make_model("random", seed=seed)
    if spec.startswith("remote:"):
        return RemoteModel(cfg.endpoint(spec[len("remote:") :]))
    raise UserError(f"unknown policy {spec!r}; use oracle, random or remote:URL")


def _episode_worker(job):
    task, seed, spec, cfg = job
    return run_episode(task, seed, _policy(spec, task, seed, cfg)).to_dict()


def cmd_run_episodes(args, cfg: ToolkitConfig) -> int:
    try:
        get_task(args.task)
    except KeyError:
        raise UserError(f"unknown task {args.task!r}; known: {', '.join(task_names())}") from None
    _policy(args.policy, args.task, args.seed, cfg)
    jobs = [(args.task, args.seed + i, args.policy, cfg) for i in range(args.episodes)]
    workers = _jobs(args, cfg)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_episode_worker, jobs, chunksize=4))
    else:
        rows = [_episode_worker(job) for job in jobs]
    records = [EpisodeRecord.from_dict(r) for r in rows]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(rec.to_json() + "\n")
    print(f"{args.task}: success rate {success_rate(records):.1f}% over {len(records)} episodes")
    return 0


def _description_rows(path: str) -> list:
    return read_jsonl(path)


def cmd_eval(args, cfg: ToolkitConfig) -> int:
    vocab = CategoryVocabulary.load(cfg.vocabulary)
    if args.task == "navigate":
        names = args.nav_task or task_names()
        dataset = [(name, args.seed + i) for name in names for i in range(args.episodes)]

        def factory(task, seed):
            spec = "oracle" if args.predictor == "gold" else args.predictor
            return _policy(spec, task, seed, cfg)

        report = evaluate(dataset, factory, "navigate")
    else:
        if not args.data:
            raise UserError("--data is required for describe and classify")
        if args.task == "describe":
            dataset = _description_rows(args.data)
            golds = {ex.snippet_html: ex.description for ex in dataset}
        else:
            dataset = [ClassificationExample(r["snippet_html"], r["category"]) for r in _read_jsonl(args.data)]
            golds = {ex.snippet_html: ex.category for ex in dataset}
        if args.predictor == "gold":
            predictor = EchoGoldModel(golds)
        elif args.predictor == "closest":
            if args.task != "describe":
                raise UserError("the closest-description baseline only applies to --task describe")
            predictor = closest_description_predictor
        elif args.predictor.startswith("remote:"):
            predictor = RemoteModel(cfg.endpoint(args.predictor[len("remote:") :]))
        else:
            raise UserError(f"unknown predictor {args.predictor!r}")
        report = evaluate(dataset, predictor, args.task, vocab)
    if args.out:
        report.write(args.out)
    print(report.to_json())
    return 0


def cmd_report(args, cfg: ToolkitConfig) -> int:
    for path in args.reports:
        data = json.loads(_read_text(path))
        print(f"== {path}")
        for key, value in data.items():
            if isinstance(value, float):
                value = f"{value:.4f}"
            elif isinstance(value, (list, dict)):
                value = json.dumps(value)[:120]
            print(f"  {key:28s} {value}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="htmltasks", description="HTML understanding task toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def snippet_flags(p):
        p.add_argument("--pct", type=float, help="max new descendants, percent")
        p.add_argument("--height", type=int, help="max ancestor hops")

    p = sub.add_parser("distill", help="build a description corpus from WARC files")
    p.add_argument("--warc", action="append", required=True, help="WARC path or glob (repeatable)")
    p.add_argument("--out", required=True, help="output JSONL")
    p.add_argument("--report", help="report JSON (default: <out>.report.json)")
    p.add_argument("--max-per-desc", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--balance", choices=("earliest", "random"))
    p.add_argument("--jobs", type=int)
    snippet_flags(p)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("snippet", help="extract the snippet around one element")
    p.add_argument("--html", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--salient-id")
    group.add_argument("--salient-ref", type=int)
    p.add_argument("--out")
    snippet_flags(p)
    p.set_defaults(func=cmd_snippet)

    p = sub.add_parser("encode", help="encode model inputs")
    p.add_argument("--kind", choices=("navigate", "classify", "fewshot"), default="navigate")
    p.add_argument("--steps", help="NavigationStep JSONL (navigate)")
    p.add_argument("--html", help="snippet file (classify, fewshot query)")
    p.add_argument("--examples", help="JSONL of {snippet_html, category} (fewshot)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("corrupt", help="print HTML with all closing tags removed")
    p.add_argument("--html", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("run-episodes", help="roll out a policy on a simulated website")
    p.add_argument("--task", required=True)
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--policy", default="oracle", help="oracle | random | remote:URL")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="episode JSONL")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_run_episodes)

    p = sub.add_parser("eval", help="score a predictor")
    p.add_argument("--task", choices=("classify", "describe", "navigate"), required=True)
    p.add_argument("--predictor", default="gold", help="gold | closest | random | remote:URL")
    p.add_argument("--data", help="dataset JSONL (classify, describe)")
    p.add_argument("--nav-task", action="append", help="navigation task (repeatable; default all)")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="EvalReport JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="summarize report JSON files")
    p.add_argument("reports", nargs="+")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_help(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (UserError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return 2


if __name__ == "__main__":
    sys.exit(main())
