"""Command-line entry point: ``fss compute|report|validate|synth|version``.

Exit codes: 0 success, 1 validation failure, 2 schema or I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .config import PipelineConfig, load_config
from .corpus import MacroRegion, validate_corpus
from .io import (DanglingReference, MissingFile, SchemaError, fingerprint_directory,
                 load_baselines, load_corpus, write_corpus)
from .pipeline import CorpusInvalid, report_from_scores, run_pipeline
from .synth import InfeasibleProfile, SynthProfile, generate_corpus

log = logging.getLogger("fss_engine")

OK, INVALID, BROKEN = 0, 1, 2


def _window(text: str) -> tuple[int, int]:
    try:
        first, last = (int(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY:YYYY, got {text!r}") from None
    if first > last:
        raise argparse.ArgumentTypeError("window start after end")
    return first, last


def _config(args) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    data = config.model_dump()
    if getattr(args, "window", None):
        data["window"]["first_year"], data["window"]["last_year"] = args.window
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        data["workers"] = args.workers
    if getattr(args, "out", None):
        data["output_dir"] = str(args.out)
    return PipelineConfig.model_validate(data)


def cmd_compute(args) -> int:
    config = _config(args)
    corpus = load_corpus(args.corpus)
    baselines = load_baselines(args.corpus)
    bundle = run_pipeline(corpus, config, baselines, fingerprint_directory(args.corpus))
    out = bundle.write(config.output_dir or "out")
    log.info("wrote %d files to %s", len(bundle.files()), out)
    return OK


def cmd_report(args) -> int:
    config = _config(args)
    source = Path(args.source)
    scores = source / "scores_researchers.csv" if source.is_dir() else source
    if not scores.is_file():
        raise MissingFile(f"{scores} not found")
    bundle = report_from_scores(scores, config)
    out = bundle.write(config.output_dir or "out")
    log.info("wrote %d files to %s", len(bundle.files()), out)
    return OK


def cmd_validate(args) -> int:
    corpus = load_corpus(args.corpus, strict=False)
    window = _config(args).window.to_window() if (args.window or args.config) else None
    violations = validate_corpus(corpus, window)
    for v in violations:
        print(v)
    print(f"{len(violations)} violation(s) in {len(corpus.researchers)} researchers, "
          f"{len(corpus.publications)} publications")
    return INVALID if violations else OK


def cmd_synth(args) -> int:
    delta = {MacroRegion.NORTH: args.delta_north, MacroRegion.CENTER: args.delta_center,
             MacroRegion.SOUTH: args.delta_south}
    profile = SynthProfile(researchers=args.researchers, delta=delta,
                           seed=args.seed if args.seed is not None else 0)
    corpus = generate_corpus(profile)
    write_corpus(corpus, args.out)
    log.info("synthetic corpus: %d researchers, %d publications -> %s",
             len(corpus.researchers), len(corpus.publications), args.out)
    return OK


def cmd_version(args) -> int:
    print(f"fss-engine {__version__}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fss", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="score a corpus and emit the report bundle")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--config", type=Path)
    p.add_argument("--window", type=_window)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("report", help="re-emit reports from cached researcher scores")
    p.add_argument("--from", dest="source", required=True, type=Path,
                   help="bundle directory or scores_researchers.csv")
    p.add_argument("--out", type=Path)
    p.add_argument("--config", type=Path)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", help="check a corpus directory")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--config", type=Path)
    p.add_argument("--window", type=_window)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="write a seeded synthetic corpus")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--researchers", type=int, default=2000)
    p.add_argument("--delta-north", type=float, default=1.0)
    p.add_argument("--delta-center", type=float, default=1.0)
    p.add_argument("--delta-south", type=float, default=1.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("version", help="print the version")
    p.set_defaults(func=cmd_version)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (DanglingReference, CorpusInvalid) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID
    except (SchemaError, MissingFile, ValidationError, InfeasibleProfile, OSError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BROKEN


if __name__ == "__main__":
    sys.exit(main())
