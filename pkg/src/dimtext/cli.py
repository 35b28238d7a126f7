"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .config import load_config
from .errors import DataError, InvariantError, UsageError
from .pipeline import STAGE_FUNCS, STAGES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimtext",
        description="Multi-dimensional contextual modeling pipeline",
    )
    sub = parser.add_subparsers(dest="stage", required=True)
    for stage in STAGES + ("run",):
        desc = "run all stages in order" if stage == "run" else f"run the {stage} stage"
        p = sub.add_parser(stage, help=desc)
        p.add_argument("--config", type=Path, default=None, help="TOML run configuration")
        p.add_argument("--out", type=Path, default=None, help="override run.out_dir")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument(
            "--deterministic",
            action="store_true",
            help="force single-threaded numerics everywhere",
        )
    return parser


def _log_stage(out_dir: Path, stage: str, seed: int, wall: float, outputs) -> None:
    log_dir = out_dir / "logs"
    log_dir.mkdir(parents=True, exist_ok=True)
    with open(log_dir / "stages.jsonl", "a", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {
                    "stage": stage,
                    "seed": seed,
                    "wall_time_s": round(wall, 3),
                    "outputs": [str(p) for p in outputs],
                },
                sort_keys=True,
            )
            + "\n"
        )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg["run"]["out_dir"] = str(args.out)
        if args.seed is not None:
            cfg["run"]["seed"] = args.seed
        if args.deterministic:
            cfg["run"]["deterministic"] = True
        stages = STAGES if args.stage == "run" else (args.stage,)
        for stage in stages:
            start = time.perf_counter()
            outputs = STAGE_FUNCS[stage](cfg)
            _log_stage(
                Path(cfg["run"]["out_dir"]),
                stage,
                cfg["run"]["seed"],
                time.perf_counter() - start,
                outputs,
            )
            print(f"[dimtext] {stage}: wrote {len(outputs)} artifact(s)")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
