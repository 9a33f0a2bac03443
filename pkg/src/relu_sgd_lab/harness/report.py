"""Terminal output for the CLI: rich tables, plain text, or JSON."""

import json
from typing import Any, List, Sequence

from relu_sgd_lab.harness.converters import format_float
from relu_sgd_lab.harness.listing import ListingReport
from relu_sgd_lab.harness.runner import SeedOutcome
from relu_sgd_lab.harness.verify import SuiteReport

try:
    from rich import box
    from rich.console import Console
    from rich.table import Table

    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False


def _fmt(value: Any) -> str:
    if value is None:
        return "N/A"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _vector(values: Sequence[float]) -> str:
    return "(" + ", ".join(format_float(v) for v in values) + ")"


def table_to_text(table: "Table") -> str:
    """把 Rich 表格輸出成字串"""
    console = Console()
    with console.capture() as capture:
        console.print(table)
    return capture.get()


def print_json(payload: Any):
    """JSON 格式輸出"""
    print(json.dumps(payload, indent=2, ensure_ascii=False))


# ----------------------------------------------------------------------------
# repro-listing
# ----------------------------------------------------------------------------


def listing_table(report: ListingReport) -> "Table":
    title = "golden listing" if report.golden else "[red]non-golden[/red] listing"
    table = Table(title=title, box=box.SQUARE, show_header=True, header_style="bold magenta")
    table.add_column("group", style="cyan")
    table.add_column("gradient", justify="right")
    for name, values in report.gradient.items():
        table.add_row(name, _vector(values))
    return table


def print_listing_rich(report: ListingReport):
    """使用 rich 輸出參考實例"""
    console = Console()
    console.print(f"\n[bold cyan]═══ d=1, H=3, ξ={_fmt(report.xi)}, x={_fmt(report.x)} ═══[/bold cyan]\n")
    console.print(f"pre-activations {_vector(report.pre_activations)}, output {_fmt(report.output)}")
    console.print(listing_table(report))
    console.print(f"risk {_fmt(report.risk)}   V {_fmt(report.V)}   ⟨∇V, G⟩ {_fmt(report.pairing)}")
    console.print(f"descent γ=0.001: lhs {_fmt(report.descent_lhs)}, rhs {_fmt(report.descent_rhs)}")
    if report.golden:
        console.print("[green]✓ gradient matches the golden values exactly[/green]\n")
        return
    diff_table = Table(title="[red]differences[/red]", show_header=True, header_style="bold red")
    for column in ("group", "index", "expected", "actual"):
        diff_table.add_column(column, justify="right")
    for diff in report.diffs:
        diff_table.add_row(diff.group, str(diff.index), _fmt(diff.expected), _fmt(diff.actual))
    console.print(diff_table)
    console.print()


def print_listing_simple(report: ListingReport):
    """簡單文字輸出參考實例"""
    print("\n" + "=" * 50)
    print(f"  d=1, H=3, xi={_fmt(report.xi)}, x={_fmt(report.x)}  [{'golden' if report.golden else 'NON-GOLDEN'}]")
    print("=" * 50)
    print(f"pre-activations: {_vector(report.pre_activations)}")
    print(f"output: {_fmt(report.output)}")
    for name, values in report.gradient.items():
        print(f"gradient with respect to {name}: {_vector(values)}")
    print(f"risk: {_fmt(report.risk)}  V: {_fmt(report.V)}  pairing: {_fmt(report.pairing)}")
    print(f"descent (gamma=0.001): lhs {_fmt(report.descent_lhs)}, rhs {_fmt(report.descent_rhs)}")
    for diff in report.diffs:
        print(f"  diff {diff.group}[{diff.index}]: expected {_fmt(diff.expected)}, got {_fmt(diff.actual)}")
    print("=" * 50 + "\n")


# ----------------------------------------------------------------------------
# run
# ----------------------------------------------------------------------------

RUN_COLUMNS = ("seed", "status", "steps", "final true risk", "final V", "V0", "max ‖Θ‖", "V monotone")


def _run_row(outcome: SeedOutcome) -> List[str]:
    summary = outcome.summary or {}
    if not outcome.ok:
        return [str(outcome.seed), outcome.status, "", "", "", "", "", outcome.message]
    return [
        str(outcome.seed),
        outcome.status,
        str(summary["steps_executed"]),
        _fmt(summary["final_true_risk"]),
        _fmt(summary["final_V"]),
        _fmt(summary["V0"]),
        _fmt(summary["max_param_norm"]),
        _fmt(summary["v_monotone"]),
    ]


def print_runs_rich(outcomes: Sequence[SeedOutcome], out_dir: str):
    """使用 rich 輸出各 seed 的執行摘要"""
    console = Console()
    table = Table(title=f"runs → {out_dir}", show_header=True, header_style="bold magenta")
    for column in RUN_COLUMNS:
        table.add_column(column, justify="right" if column != "status" else "left")
    for outcome in outcomes:
        row = _run_row(outcome)
        row[1] = f"[green]{row[1]}[/green]" if outcome.ok else f"[red]{row[1]}[/red]"
        table.add_row(*row)
    console.print(table)


def print_runs_simple(outcomes: Sequence[SeedOutcome], out_dir: str):
    """簡單文字輸出各 seed 的執行摘要"""
    print(f"runs -> {out_dir}")
    for outcome in outcomes:
        print("  " + " | ".join(f"{name}: {value}" for name, value in zip(RUN_COLUMNS, _run_row(outcome)) if value))


def runs_payload(outcomes: Sequence[SeedOutcome], out_dir: str) -> dict:
    return {
        "out_dir": out_dir,
        "runs": [
            {"seed": o.seed, "status": o.status, "message": o.message, "summary": o.summary} for o in outcomes
        ],
    }


# ----------------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------------


def print_verify_rich(report: SuiteReport):
    """使用 rich 輸出性質測試結果"""
    console = Console()
    table = Table(
        title=f"suite {report.suite}, seed {report.seed}, {report.requested_trials} trial(s)",
        show_header=True,
        header_style="bold magenta",
    )
    table.add_column("property", style="cyan")
    table.add_column("suite")
    table.add_column("passed", justify="right")
    table.add_column("detail")
    for outcome in report.outcomes:
        color = "green" if outcome.ok else "red"
        table.add_row(
            outcome.name,
            outcome.suite,
            f"[{color}]{outcome.passed}/{outcome.trials}[/{color}]",
            outcome.first_detail,
        )
    console.print(table)
    if report.ok:
        console.print("[green]✓ all properties held[/green]")
    else:
        for outcome in report.outcomes:
            for path in outcome.falsifying:
                console.print(f"[red]✗[/red] falsifying instance: {path}")


def print_verify_simple(report: SuiteReport):
    """簡單文字輸出性質測試結果"""
    print(f"suite {report.suite}, seed {report.seed}, {report.requested_trials} trial(s)")
    for outcome in report.outcomes:
        status = "ok" if outcome.ok else "FAIL"
        print(f"  [{status}] {outcome.name}: {outcome.passed}/{outcome.trials}")
        for path in outcome.falsifying:
            print(f"        falsifying instance: {path}")
    print("all properties held" if report.ok else "some properties failed")
