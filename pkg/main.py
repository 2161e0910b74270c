import argparse
import sys

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.cli.presets import PRESETS, preset_names
from src.cli.runner import RunOptions, execute

console = Console()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="enclose: rigorous eigenvalue enclosures by interlacing homotopies")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a problem configuration or a bundled preset")
    run.add_argument("config", nargs="?", help="INI problem configuration (keys override the preset)")
    run.add_argument("--preset", choices=preset_names(), help="Bundled example configuration")
    run.add_argument("--format", choices=["table", "csv"], default="table", help="Output format")
    run.add_argument("--out", help="Write the results here instead of stdout")
    run.add_argument("--max-level", type=int, help="Cap on the decoupling depth")
    run.add_argument("--basis-degree", type=int, help="First test-basis degree to try")
    run.add_argument("--effort", action="store_true", help="Print effort counts and metrics")
    run.add_argument("--verbose", action="store_true", help="Structured INFO logs on stderr")
    run.add_argument("--archive", help="SQLite report archive (defaults to ENCLOSE_ARCHIVE)")
    run.add_argument("--no-cache", action="store_true", help="Recompute even if the archive holds this run")

    commands.add_parser("presets", help="List the bundled presets")
    return parser


def _list_presets():
    table = Table(title="presets")
    table.add_column("name", style="bold")
    table.add_column("kind")
    for name in preset_names():
        kind = next(line.split("=", 1)[1].strip() for line in PRESETS[name].splitlines() if line.startswith("kind"))
        table.add_row(name, kind)
    console.print(table)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "presets":
        _list_presets()
        return 0

    if args.format == "table" and not args.out:
        target = args.preset or args.config
        console.print(Panel(f"[bold blue]enclose[/bold blue]\nRunning: [bold]{target}[/bold]"))

    options = RunOptions(
        config=args.config,
        preset=args.preset,
        format=args.format,
        out=args.out,
        max_level=args.max_level,
        basis_degree=args.basis_degree,
        effort=args.effort,
        verbose=args.verbose,
        archive=args.archive,
        no_cache=args.no_cache,
    )
    return execute(options, console)


if __name__ == "__main__":
    sys.exit(main())
