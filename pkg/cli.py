"""
Command-line entry point: `python cli.py run|validate --config <path>`.
"""
import argparse
import csv
import hashlib
import json
import logging
import logging.handlers
import os
import sys
import time
from typing import Dict, List, Optional, Sequence

from config import ConfigError, ExperimentConfig, load_config, load_settings, validate
from experiment import ExperimentRunner

__version__ = "0.1.0"

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger(__name__)


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """
    Console logging plus an optional rotating log file (5 MB, 3 backups).
    """
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT)
    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        log_handler = logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=5*1024*1024,  # 5MB
            backupCount=3
        )
        log_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logging.getLogger().addHandler(log_handler)


def format_value(value) -> str:
    """Locale-independent CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "dtype"):
        return format(float(value), ".10g")
    return str(value)


def write_csv(path: str, rows: List[Dict[str, object]]) -> None:
    """Write rows with a header taken from the first row's keys."""
    header = list(rows[0].keys()) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(row.get(column)) for column in header])


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


# settings that change how a run executes but never what it writes
RUNTIME_KEYS = ("threads", "output_dir")


def config_hash(document: Dict) -> str:
    content = {key: value for key, value in document.items() if key not in RUNTIME_KEYS}
    canonical = json.dumps(content, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_outputs(out_dir: str, tables: Dict[str, List[Dict[str, object]]]) -> Dict[str, str]:
    """Write every table and return the per-file checksums."""
    os.makedirs(out_dir, exist_ok=True)
    checksums = {}
    for name in sorted(tables):
        path = os.path.join(out_dir, name)
        write_csv(path, tables[name])
        checksums[name] = file_sha256(path)
        logger.info(f"Wrote {len(tables[name])} rows to {path}")
    return checksums


def write_manifest(out_dir: str, config: ExperimentConfig, checksums: Dict[str, str], duration: float) -> str:
    manifest = {
        "scenario": config.scenario.value,
        "config_sha256": config_hash(config.document),
        "seed": config.seed,
        "version": __version__,
        "files": checksums,
        "duration_seconds": round(duration, 3),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def run(config_path: str, out_dir: Optional[str] = None, seed: Optional[int] = None,
        threads: Optional[int] = None) -> int:
    """
    Run one experiment config and write its CSV outputs and manifest.

    Returns:
        Process exit status: 0 on success, 2 for config errors, 1 for run failures
    """
    settings = load_settings()
    try:
        config = load_config(config_path, {"seed": seed, "threads": threads})
    except ConfigError as e:
        for diagnostic in e.diagnostics:
            logger.error(diagnostic)
            print(diagnostic, file=sys.stderr)
        return 2

    out_dir = out_dir or config.output_dir or settings.output_dir
    start = time.perf_counter()
    result = ExperimentRunner(config, threads or (config.threads if "threads" in config.document else settings.threads)).run()
    if not result["success"]:
        print(f"error: {result['error']}", file=sys.stderr)
        return 1

    try:
        checksums = write_outputs(out_dir, result["tables"])
        manifest_path = write_manifest(out_dir, config, checksums, time.perf_counter() - start)
    except OSError as e:
        logger.error(f"Error writing outputs: {str(e)}")
        print(f"error: cannot write outputs to {out_dir}: {e.strerror or e}", file=sys.stderr)
        return 1

    logger.info(f"Run complete; manifest at {manifest_path}")
    print(json.dumps(result["summary"], indent=2, sort_keys=True, default=float))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psoam-sim",
        description="LoS MG-MIMO / PSOAM link simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run an experiment config")
    run_parser.add_argument("--config", required=True, help="Experiment config (JSON)")
    run_parser.add_argument("--out", default=None, help="Output directory")
    run_parser.add_argument("--seed", type=int, default=None, help="Override the config seed")
    run_parser.add_argument("--threads", type=int, default=None, help="Worker threads")

    validate_parser = subparsers.add_parser("validate", help="Check a config without running it")
    validate_parser.add_argument("--config", required=True, help="Experiment config (JSON)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    configure_logging(settings.log_level, settings.log_file)

    if args.command == "validate":
        diagnostics = validate(args.config)
        for diagnostic in diagnostics:
            print(diagnostic)
        if not diagnostics:
            print("config OK")
        return 1 if diagnostics else 0

    if args.seed is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return 2
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    return run(args.config, args.out, args.seed, args.threads)


if __name__ == "__main__":
    sys.exit(main())
