"""Export intermediate backbone activations as FMAP feature files.

Single image:
    fmap-export --image photo.png --model vgg19 --layer conv16 --out photo.fmap

Batch (JSONL manifest; records may carry "image" or "before"/"after" paths):
    fmap-export --manifest pairs.jsonl --out-dir features/

Tap discovery:
    fmap-export --model resnet34 --list-layers
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .export import ExportRequest, WeightsUnavailableError, export_features, load_model
from .taps import list_layers


@click.command(help=__doc__)
@click.option("--image", type=click.Path(exists=True), default=None)
@click.option("--manifest", type=click.Path(exists=True), default=None)
@click.option("--model", "model_id", default="vgg19", show_default=True,
              type=click.Choice(["vgg19", "resnet34", "inception_v3"]))
@click.option("--layer", "layer_id", default=None,
              help="Tap point id (see --list-layers); model default when omitted.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Output file for --image mode.")
@click.option("--out-dir", type=click.Path(), default=None,
              help="Output directory for --manifest mode.")
@click.option("--untrained", is_flag=True, default=False,
              help="Use reproducible random weights instead of the pretrained "
                   "checkpoint (shape/format testing without downloads).")
@click.option("--list-layers", "show_layers", is_flag=True, default=False)
def main(image, manifest, model_id, layer_id, out_path, out_dir, untrained, show_layers):
    if show_layers:
        for tap in list_layers(model_id):
            marker = " (default)" if tap.default else ""
            click.echo(f"{tap.layer_id:>10}  {tap.description}{marker}")
        return

    if (image is None) == (manifest is None):
        click.echo("error: pass exactly one of --image or --manifest", err=True)
        sys.exit(1)

    try:
        if image is not None:
            if out_path is None:
                click.echo("error: --image mode requires --out", err=True)
                sys.exit(1)
            request = ExportRequest(
                image_path=image, model_id=model_id, layer_id=layer_id,
                output_path=out_path, pretrained=not untrained,
            )
            written = export_features(request)
            click.echo(f"wrote {written}")
            return

        if out_dir is None:
            click.echo("error: --manifest mode requires --out-dir", err=True)
            sys.exit(1)
        base = Path(manifest).parent
        model = load_model(model_id, pretrained=not untrained)
        out_root = Path(out_dir)
        count = 0
        for line in Path(manifest).read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            pair_id = record.get("id", f"record{count}")
            sources = {}
            if "image" in record:
                sources[""] = record["image"]
            for key in ("before", "after"):
                if key in record:
                    sources[f"_{key}"] = record[key]
            if not sources:
                click.echo(f"error: record {pair_id} has no image path", err=True)
                sys.exit(1)
            for suffix, rel in sources.items():
                src = Path(rel)
                src = src if src.is_absolute() else base / src
                request = ExportRequest(
                    image_path=src, model_id=model_id, layer_id=layer_id,
                    output_path=out_root / f"{pair_id}{suffix}.fmap",
                    pretrained=not untrained,
                )
                export_features(request, model=model)
                count += 1
        click.echo(f"wrote {count} feature file(s) to {out_root}")
    except WeightsUnavailableError as exc:
        click.echo(f"error: {exc}", err=True)
        click.echo("hint: --untrained exports with reproducible random weights", err=True)
        sys.exit(1)
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
