#!/usr/bin/env python3
"""
relu-sgd-lab command line
淺層 ReLU 網路的 GD / SGD 實驗與性質驗證

使用方式:
    # 參考實例 (golden gradient)
    relu-sgd-lab repro-listing

    # 依 JSON 設定執行軌跡
    relu-sgd-lab run --config configs/gd_demo.json --out runs/gd

    # 隨機性質測試
    relu-sgd-lab verify identities --seed 1 --trials 1000

    # 或直接執行
    python -m relu_sgd_lab.lab_cli verify all --trials 0

Exit codes:
    0 success, 1 property / golden / trajectory failure, 2 configuration error or rejected schedule
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from relu_sgd_lab.harness import report
from relu_sgd_lab.harness.config import ConfigError, load_config
from relu_sgd_lab.harness.converters import parse_seed, safe_float, safe_int
from relu_sgd_lab.harness.listing import LISTING_X, LISTING_XI, build_listing_report
from relu_sgd_lab.harness.runner import STATUS_OK, STATUS_REJECTED, run_sweep
from relu_sgd_lab.harness.verify import SUITES, replay, run_suite

try:
    from rich.console import Console
    from rich.logging import RichHandler

    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def configure_logging(verbose: bool = False, quiet: bool = False, simple: bool = False):
    """安裝 root logger 的 handler：RichHandler，或在 --simple / 無 rich 時用 StreamHandler"""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    if RICH_AVAILABLE and not simple:
        handler: logging.Handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)
        handler.setFormatter(logging.Formatter("%(message)s"))
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


def _real(text: str) -> float:
    value = safe_float(text)
    if value is None:
        raise argparse.ArgumentTypeError(f"expected a finite real number, got {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        return parse_seed(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _trials(text: str) -> int:
    value = safe_int(text)
    if value is None:
        raise argparse.ArgumentTypeError(f"trials must be an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"trials must be nonnegative, got {value}")
    return value


def _output_mode(args: argparse.Namespace) -> str:
    if args.json:
        return "json"
    if args.simple or not report.RICH_AVAILABLE:
        return "simple"
    return "rich"


def cmd_repro_listing(args: argparse.Namespace) -> int:
    listing = build_listing_report(xi=args.xi, x=args.x)
    mode = _output_mode(args)
    if mode == "json":
        report.print_json(listing.to_dict())
    elif mode == "simple":
        report.print_listing_simple(listing)
    else:
        report.print_listing_rich(listing)
    if not listing.golden:
        logger.error(f"gradient differs from the golden values in {len(listing.diffs)} coordinate(s)")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        logger.error(str(exc))
        return EXIT_CONFIG
    out_dir = args.out or config.output.dir
    seeds = [args.seed] if args.seed is not None else None
    outcomes = run_sweep(config, out_dir, seeds=seeds)

    mode = _output_mode(args)
    if mode == "json":
        report.print_json(report.runs_payload(outcomes, str(out_dir)))
    elif mode == "simple":
        report.print_runs_simple(outcomes, str(out_dir))
    else:
        report.print_runs_rich(outcomes, str(out_dir))

    code = EXIT_OK
    for outcome in outcomes:
        if outcome.status == STATUS_OK:
            continue
        logger.error(f"seed {outcome.seed}: {outcome.status}: {outcome.message}")
        code = max(code, EXIT_CONFIG if outcome.status == STATUS_REJECTED else EXIT_FAILURE)
    return code


def cmd_verify(args: argparse.Namespace) -> int:
    if args.replay:
        path = Path(args.replay)
        if not path.exists():
            logger.error(f"replay file not found: {path}")
            return EXIT_CONFIG
        result = replay(path)
        if _output_mode(args) == "json":
            report.print_json({"replay": str(path), "passed": result.passed, "detail": result.detail})
        else:
            print(f"{'pass' if result.passed else 'FAIL'}: {result.detail}")
        return EXIT_OK if result.passed else EXIT_FAILURE
    if args.suite is None:
        logger.error("give a suite name or --replay <file>")
        return EXIT_CONFIG

    suite_report = run_suite(args.suite, args.seed, args.trials, args.out)
    mode = _output_mode(args)
    if mode == "json":
        report.print_json(suite_report.to_dict())
    elif mode == "simple":
        report.print_verify_simple(suite_report)
    else:
        report.print_verify_rich(suite_report)
    return EXIT_OK if suite_report.ok else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", "-j", action="store_true", help="以 JSON 格式輸出")
    common.add_argument("--simple", "-s", action="store_true", help="簡單文字輸出（不使用 rich）")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="顯示 DEBUG 訊息")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="只顯示警告與錯誤")

    parser = argparse.ArgumentParser(
        prog="relu-sgd-lab",
        description="淺層 ReLU 網路的 GD / SGD 實驗與性質驗證",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
範例:
  relu-sgd-lab repro-listing                       # golden gradient, exit 0
  relu-sgd-lab repro-listing --xi 0                # non-golden variant, exit 1
  relu-sgd-lab run --config configs/gd_demo.json   # 寫出 runs/seed-<s>/trajectory.csv + summary.json
  relu-sgd-lab run --config cfg.json --seed 7 --out /tmp/r
  relu-sgd-lab verify all --seed 1 --trials 100    # identities + bounds + limits
  relu-sgd-lab verify --replay verify-failures/falsifying-pairing_identity-3.json
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    listing = sub.add_parser("repro-listing", parents=[common], help="reference instance d=1, H=3")
    listing.add_argument("--xi", type=_real, default=LISTING_XI, help=f"constant target (default {LISTING_XI})")
    listing.add_argument("--x", type=_real, default=LISTING_X, help=f"single input sample (default {LISTING_X})")
    listing.set_defaults(handler=cmd_repro_listing)

    run_parser = sub.add_parser("run", parents=[common], help="GD / SGD trajectories from a JSON config")
    run_parser.add_argument("--config", "-c", required=True, help="JSON 設定檔路徑")
    run_parser.add_argument("--out", "-o", help="輸出目錄（覆蓋設定檔的 output.dir）")
    run_parser.add_argument("--seed", type=_seed, help="只執行此 seed（覆蓋設定檔的 seeds）")
    run_parser.set_defaults(handler=cmd_run)

    verify = sub.add_parser("verify", parents=[common], help="randomized property suites")
    verify.add_argument("suite", nargs="?", choices=SUITES + ("all",), help="suite to run")
    verify.add_argument("--seed", type=_seed, default=0, help="64-bit seed (default 0)")
    verify.add_argument("--trials", "-n", type=_trials, default=100, help="trials per property (default 100)")
    verify.add_argument("--out", "-o", default="verify-failures", help="falsifying instances are written here")
    verify.add_argument("--replay", help="re-run one serialized falsifying instance")
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet, args.simple)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
