"""CLI wrapper around the training harness; flags mirror TrainSpec."""

import logging

import click

from .harness import LayoutError, TrainSpec, finetune


@click.command()
@click.option("--tree", required=True, type=click.Path(exists=True, file_okay=False),
              help="Root of the exported JTM image tree.")
@click.option("--plane", required=True, type=click.Choice(["front", "top", "side"]))
@click.option("--out", "out_csv", required=True, type=click.Path(),
              help="Output score CSV path.")
@click.option("--epochs", default=3, show_default=True)
@click.option("--lr", "learning_rate", default=1e-2, show_default=True,
              help="Use 1e-3 when fine-tuning pretrained weights.")
@click.option("--momentum", default=0.9, show_default=True)
@click.option("--weight-decay", default=5e-4, show_default=True)
@click.option("--dropout", default=0.9, show_default=True)
@click.option("--batch-size", default=256, show_default=True)
@click.option("--image-size", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--backbone", default="linear", show_default=True,
              help="'linear', 'tiny' or a torchvision model name (e.g. squeezenet1_1).")
@click.option("--pretrained/--no-pretrained", default=False, show_default=True)
def main(**kwargs):
    """Train on one plane of an exported JTM tree and emit a score CSV."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        spec = TrainSpec(**kwargs)
        path = finetune(spec)
        click.echo(f"wrote {path}")
    except (LayoutError, ValueError) as e:
        raise click.ClickException(str(e))


if __name__ == "__main__":
    main()
