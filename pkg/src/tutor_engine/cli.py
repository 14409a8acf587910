"""Operator CLI: serve the HTTP API, ingest a corpus, replay scripted
dialogues, and render feedback evaluation tables.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ApiConfig, ConfigError, load_config, validate_config
from .cycle import FixedClock
from .persistence import aggregate_metrics, load_feedback_file, render_metrics_table
from .rag import CorpusError
from .runtime import TutorRuntime

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _load_and_validate(config_path: Optional[str]) -> ApiConfig:
    cfg = load_config(config_path)
    validate_config(cfg)
    return cfg


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    cfg = _load_and_validate(args.config)
    Path(cfg.data_dir).mkdir(parents=True, exist_ok=True)
    runtime = TutorRuntime(cfg)
    app = create_app(runtime)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = _load_and_validate(args.config)
    if args.data_dir:
        cfg = dataclasses.replace(cfg, data_dir=args.data_dir)
    Path(cfg.data_dir).mkdir(parents=True, exist_ok=True)
    runtime = TutorRuntime(cfg)
    try:
        docs, chunks = runtime.ingest(args.directory)
    except CorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"ingested {docs} documents into {chunks} chunks")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        spec = json.loads(Path(args.script).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read simulation script: {exc}", file=sys.stderr)
        return EXIT_USAGE

    base = Path(args.script).parent
    try:
        learner = spec["learner"]
        messages = spec["messages"]
        scripts = base / spec["provider_scripts"]
    except KeyError as exc:
        print(f"error: simulation script missing key {exc}", file=sys.stderr)
        return EXIT_USAGE

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    data_dir = out_dir / "data"
    if data_dir.exists():
        import shutil

        shutil.rmtree(data_dir)

    cfg = _load_and_validate(args.config)
    cfg = dataclasses.replace(
        cfg,
        data_dir=str(data_dir),
        provider=dataclasses.replace(
            cfg.provider, kind="scripted", script_path=str(scripts)
        ),
        embedder=dataclasses.replace(cfg.embedder, kind="test"),
    )
    runtime = TutorRuntime(cfg, clock=FixedClock())
    if spec.get("corpus_dir"):
        runtime.ingest(base / spec["corpus_dir"])

    session_id = runtime.create_session(
        learner.get("learner_id", "sim-learner"),
        learner.get("role", "Student"),
        learner.get("familiarity", "Occasional"),
    )

    transcript: list[str] = []
    traces: list[str] = []
    for i, message in enumerate(messages):
        try:
            response = runtime.post_message(session_id, message)
        except Exception as exc:  # report and fail the run
            print(f"error: turn {i} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        trace = response.trace
        transcript.append(f"=== Turn {i} ===")
        transcript.append(f"Learner: {message}")
        transcript.append(
            f"[intent={trace.intent.value} plan={trace.plan_action.value} "
            f"scaffold={response.scaffold_used.value}]"
        )
        transcript.append(f"Tutor: {response.text}")
        transcript.append("")
        traces.append(json.dumps({"turn_index": i, **trace.to_dict()}))

    (out_dir / "transcript.txt").write_text("\n".join(transcript), encoding="utf-8")
    (out_dir / "trace.jsonl").write_text(
        "\n".join(traces) + ("\n" if traces else ""), encoding="utf-8"
    )
    print(f"simulated {len(messages)} turns -> {out_dir}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    path = Path(args.feedback)
    if not path.exists():
        print(f"error: feedback file not found: {path}", file=sys.stderr)
        return EXIT_USAGE
    try:
        records = load_feedback_file(path)
    except (ValueError, KeyError) as exc:
        print(f"error: malformed feedback file: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(render_metrics_table(aggregate_metrics(records)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tutor", description="Adaptive tutoring engine operations"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--config", default=None, help="TOML config file")
    p_serve.set_defaults(func=cmd_serve)

    p_ingest = sub.add_parser("ingest", help="index a curriculum directory")
    p_ingest.add_argument("directory", help="directory of .md/.txt files")
    p_ingest.add_argument("--config", default=None)
    p_ingest.add_argument("--data-dir", default=None, help="override service.data_dir")
    p_ingest.set_defaults(func=cmd_ingest)

    p_sim = sub.add_parser("simulate", help="replay a scripted dialogue")
    p_sim.add_argument("--script", required=True, help="simulation JSON file")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--config", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_eval = sub.add_parser("eval", help="render a feedback metrics table")
    p_eval.add_argument("--feedback", required=True, help="feedback JSONL file")
    p_eval.set_defaults(func=cmd_eval)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
