"""Command-line entry point: one figure per invocation."""

from __future__ import annotations

import sys

import click

from . import __version__
from .io import SchemaError
from .render import FIGURE_KINDS, FigureSpec, render

EXIT_USAGE = 1


def _parse_cell(text: str) -> tuple[float, float]:
    try:
        h_mm, h_MM = (float(part) for part in text.split(","))
    except ValueError:
        raise click.UsageError("--cell expects 'h_mm,h_MM', got %r" % text)
    return h_mm, h_MM


@click.command()
@click.version_option(__version__, prog_name="recoloop-figures")
@click.option("--figure", type=click.Choice(FIGURE_KINDS), required=True)
@click.option("--in", "in_path", type=click.Path(exists=True), required=True,
              help="records or extract file from the simulation harness")
@click.option("--out", type=click.Path(), required=True,
              help="image path; vector formats also get a .png preview")
@click.option("--recommender", "recommenders", multiple=True,
              help="keep only these recommenders (repeatable)")
@click.option("--cell", "cells", multiple=True,
              help="keep only these 'h_mm,h_MM' cells (repeatable)")
def cli(figure, in_path, out, recommenders, cells):
    """Render one figure kind from a harness output file."""
    spec = FigureSpec(
        kind=figure,
        records_path=in_path,
        out_path=out,
        recommenders=tuple(recommenders) or None,
        cells=tuple(_parse_cell(c) for c in cells) or None,
    )
    for path in render(spec):
        click.echo("wrote %s" % path)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except (click.UsageError, SchemaError, ValueError) as exc:
        click.echo("error: %s" % exc, err=True)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
