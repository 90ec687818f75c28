"""`em-lab-render --csv-dir D --figure F --out P` -> one PNG per call."""

from __future__ import annotations

import sys

import click

from .render import FIGURES, SchemaError, UnknownFigureError, render


@click.command()
@click.option("--csv-dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory holding <figure-id>/ CSV subdirectories.")
@click.option("--figure", "figure_id", required=True,
              help=f"Figure id; one of: {', '.join(sorted(FIGURES))}.")
@click.option("--out", required=True, type=click.Path(), help="Output PNG path.")
def cli(csv_dir, figure_id, out):
    """Render one figure from experiment CSVs (read-only on its inputs)."""
    result = render(csv_dir, figure_id, out)
    click.echo(f"wrote {result['out']}")
    for note in result["annotations"]:
        click.echo(f"  {note}")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(64)
    except UnknownFigureError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except SchemaError as exc:
        click.echo(f"schema error: {exc}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(3)
    return 0


if __name__ == "__main__":
    main()
