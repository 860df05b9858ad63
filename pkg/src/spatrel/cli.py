"""Command line front end.

Loads a fact document, optionally a taxonomy, runs a pipeline, and
writes the result in one of three formats.  Exit codes: 0 on success,
1 for bad command lines, 2 when loading or evaluation fails.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from . import __version__
from .dsl import PipelineParseError, parse_pipeline
from .engine import LogEntry, PipelineRuntimeError, evaluate_pipeline
from .export import export_mermaid, export_scene
from .serialize import FactDocumentError, dumps_facts, loads_facts
from .taxonomy import Taxonomy, TaxonomyError, load_taxonomy

_LOG_EXTENSIONS = {
    "summary": "txt",
    "mermaid": "mmd",
    "scene": "obj",
    "facts": "json",
}


class _ArgumentParser(argparse.ArgumentParser):
    # usage mistakes exit 1; data errors exit 2
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="spatrel",
        description=(
            "Deduce spatial relations between boxes and query them with "
            "inference pipelines."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--facts", required=True, metavar="PATH",
        help="fact document (JSON) with objects and optional settings",
    )
    parser.add_argument(
        "--taxonomy", metavar="PATH",
        help="class hierarchy for isa(), RDF/XML or line format",
    )
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--pipeline", metavar="TEXT", help="pipeline to run, as text",
    )
    group.add_argument(
        "--pipeline-file", metavar="PATH", help="file containing the pipeline",
    )
    parser.add_argument(
        "--observer", metavar="ID",
        help="object id to use as the observer for visibility relations",
    )
    parser.add_argument(
        "--format", choices=("json", "mermaid", "scene"), default="json",
        help="result format (default: json)",
    )
    parser.add_argument(
        "--out", metavar="PATH", help="write the result here instead of stdout",
    )
    parser.add_argument(
        "--log-dir", metavar="DIR", default=os.environ.get("SR_LOG_DIR"),
        help="directory for log() output files (default: $SR_LOG_DIR, "
             "else logs go to stdout)",
    )
    return parser


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _emit_logs(entries: List[LogEntry], log_dir: Optional[str]) -> None:
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    for entry in entries:
        if log_dir:
            name = "step-%02d-%s.%s" % (
                entry.step, entry.kind, _LOG_EXTENSIONS[entry.kind]
            )
            with open(os.path.join(log_dir, name), "w", encoding="utf-8") as f:
                f.write(entry.text if entry.text.endswith("\n")
                        else entry.text + "\n")
        else:
            sys.stdout.write("--- log step %d (%s) ---\n" % (entry.step, entry.kind))
            sys.stdout.write(entry.text)
            if not entry.text.endswith("\n"):
                sys.stdout.write("\n")


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        fb, settings = loads_facts(_read(args.facts))
        taxonomy = Taxonomy()
        if args.taxonomy:
            taxonomy = load_taxonomy(_read(args.taxonomy))
        text = ""
        if args.pipeline is not None:
            text = args.pipeline
        elif args.pipeline_file is not None:
            text = _read(args.pipeline_file)
        pipeline = parse_pipeline(text)
        result = evaluate_pipeline(
            pipeline, fb, settings, taxonomy, observer_id=args.observer
        )
        _emit_logs(list(result.logs), args.log_dir)
        if args.format == "json":
            output = dumps_facts(fb, result.settings)
        elif args.format == "scene":
            output = export_scene(list(result.objects))
        else:
            ids = [obj.id for obj in result.objects]
            relations = [
                rel for rel in fb.relations_list()
                if rel.subject in ids and rel.object in ids
            ]
            labels = {o.id: o.label for o in result.objects if o.label}
            output = export_mermaid(relations, (), labels)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(output)
        else:
            sys.stdout.write(output)
    except (OSError, FactDocumentError, TaxonomyError, PipelineParseError,
            PipelineRuntimeError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
