"""Command line front end.

    brst-anomaly starcheck [--config FILE] [--out FILE] [--key=value ...]
    brst-anomaly certify   [--observable s1|s2|both] [--expect VERDICT] [--figures DIR]
    brst-anomaly fomenko   [--integral s1|s2] [--out DIR] [--no-figures]
    brst-anomaly scan      --sweep alpha=0.5,1,2 --sweep beta=1 [--jobs N]

Any configuration key can be overridden with ``--key=value``.
"""
from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from .config import ConfigError, load_config, parse_overrides
from .report import (
    EXIT_FAIL,
    EXIT_INVALID,
    dumps,
    parse_sweep,
    run_certify,
    run_fomenko,
    run_scan,
    run_starcheck,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brst-anomaly", description=__doc__.split("\n\n")[0],
                                     allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value configuration file")
        return p

    p = common(sub.add_parser("starcheck", allow_abbrev=False, help="star-product property suite"))
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = common(sub.add_parser("certify", allow_abbrev=False, help="first-order quantizability of s1 / s2"))
    p.add_argument("--observable", default="both", choices=["s1", "s2", "both"])
    p.add_argument("--expect", help="expected verdict, e.g. Anomalous or s1=Anomalous,s2=NotObstructedAtOrder1")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--figures", help="directory for the orbit-average figure")

    p = common(sub.add_parser("fomenko", allow_abbrev=False, help="Fomenko graph and action-plane data"))
    p.add_argument("--integral", default="s2", choices=["s1", "s2"])
    p.add_argument("--out", help="directory for fomenko.json, CSV files and the figure")
    p.add_argument("--no-figures", action="store_true")

    p = common(sub.add_parser("scan", allow_abbrev=False, help="certify over a parameter grid"))
    p.add_argument("--sweep", action="append", default=[], help="key=v1,v2,... (repeatable)")
    p.add_argument("--observable", default="both", choices=["s1", "s2", "both"])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write the JSON array here instead of stdout")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        cfg = load_config(args.config, parse_overrides(extra))
        if args.command == "starcheck":
            payload, code = run_starcheck(cfg)
            _emit(dumps(payload), args.out)
        elif args.command == "certify":
            payload, code = run_certify(cfg, args.observable, args.expect)
            if args.figures:
                from .plotting import render_certificate_figure

                Path(args.figures).mkdir(parents=True, exist_ok=True)
                render_certificate_figure(payload["reports"], Path(args.figures) / "certificate.png")
            _emit(dumps(payload), args.out)
        elif args.command == "fomenko":
            payload, code = run_fomenko(cfg, args.integral, args.out, figures=not args.no_figures)
            sys.stdout.write(dumps(payload))
        else:
            results, code = run_scan(cfg, parse_sweep(args.sweep), args.observable, args.jobs)
            _emit(dumps(results), args.out)
        return code
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:  # pragma: no cover - last-resort guard for the exit-code contract
        traceback.print_exc()
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
