"""Command-line runner and server entry point.

    evonet run <project.csv> [--threads N] [--out DIR] [--plot]
    evonet validate <project.csv>
    evonet serve <project.csv> [--port P] [--threads N] [--out DIR] [--host H]
    evonet report <outdir>

Exit codes: 0 success, 1 parse/validation failure, 2 at least one trial
failed. Diagnostics go to standard error. The output directory falls back
to the EVONET_OUT environment variable, then ./out.
"""

from __future__ import annotations

import argparse
import os
import sys

from .engine import TrialStatus, schedule
from .errors import EvonetError
from .project import parse_project


def _default_out(value: str | None) -> str:
    return value or os.environ.get("EVONET_OUT") or "out"


def _load_project(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    try:
        return parse_project(text)
    except EvonetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None


def _cmd_validate(args) -> int:
    project = _load_project(args.project)
    if project is None:
        return 1
    total = sum(e.trials for e in project)
    print(f"OK: {len(project)} experiment(s), {total} trial(s)")
    return 0


def _cmd_run(args) -> int:
    project = _load_project(args.project)
    if project is None:
        return 1
    outdir = _default_out(args.out)
    try:
        results = schedule(project, max_workers=args.threads, outdir=outdir)
    except EvonetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    failed = 0
    for r in results:
        line = f"{r.experiment_id} t{r.trial_index}: {r.status.value} " \
               f"({r.steps_run} steps, {r.wall_time:.2f}s)"
        if r.status is TrialStatus.FAILED:
            failed += 1
            print(line + f" - {r.error}", file=sys.stderr)
        else:
            print(line)
    print(f"outputs written to {outdir}")
    if args.plot:
        from .report import render_report

        for path in render_report(outdir):
            print(f"figure: {path}")
    return 2 if failed else 0


def _cmd_serve(args) -> int:
    project = _load_project(args.project)
    if project is None:
        return 1
    import uvicorn

    from .server import create_app

    app = create_app(project, outdir=_default_out(args.out), max_workers=args.threads)
    print(f"serving {args.project} on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_report(args) -> int:
    from .report import render_report

    try:
        written = render_report(args.outdir)
    except EvonetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"figure: {path}")
    if not written:
        print("no output CSVs found", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evonet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    threads_default = os.cpu_count() or 1

    run = sub.add_parser("run", help="run every trial of a project")
    run.add_argument("project")
    run.add_argument("--threads", type=int, default=threads_default)
    run.add_argument("--out", default=None)
    run.add_argument("--plot", action="store_true", help="render figures after the run")
    run.set_defaults(func=_cmd_run)

    validate = sub.add_parser("validate", help="parse a project without running it")
    validate.add_argument("project")
    validate.set_defaults(func=_cmd_validate)

    serve = sub.add_parser("serve", help="start the HTTP/WebSocket control plane")
    serve.add_argument("project")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--threads", type=int, default=threads_default)
    serve.add_argument("--out", default=None)
    serve.set_defaults(func=_cmd_serve)

    report = sub.add_parser("report", help="render figures for run outputs")
    report.add_argument("outdir")
    report.set_defaults(func=_cmd_report)

    return parser


def cli_run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def main() -> None:
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
