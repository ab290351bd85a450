"""Command-line entry points: twinpose eval | stats | project | serve."""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from . import annodata, losses, ops, wire
from .service import DEFAULT_PORT, ServiceConfig, create_app


@click.group()
def main():
    """Twin-space 6DoF pose labeling and evaluation toolkit."""


def _fail(message: str) -> "click.exceptions.Exit":
    click.echo(f"error: {message}", err=True)
    return click.exceptions.Exit(2)


@main.command("eval")
@click.option("--gt", "gt_dir", required=True, type=click.Path(exists=False))
@click.option("--pred", "pred_dir", required=True, type=click.Path(exists=False))
@click.option("--preset", type=click.Choice(sorted(losses.PRESETS)), default="kitti")
@click.option("--out", "out_path", type=click.Path(), default=None)
def cmd_eval(gt_dir, pred_dir, preset, out_path):
    """Evaluate a prediction dataset against a ground-truth dataset."""
    if not Path(gt_dir).is_dir():
        raise _fail(f"ground-truth directory {gt_dir!r} does not exist")
    if not Path(pred_dir).is_dir():
        raise _fail(f"prediction directory {pred_dir!r} does not exist")
    try:
        report, problems = ops.evaluate_datasets(gt_dir, pred_dir)
    except annodata.AnnotationError as exc:
        raise _fail(str(exc))
    for p in problems:
        click.echo(f"warning: {p}", err=True)
    if not report:
        raise _fail("evaluation produced no records")
    report["weights_preset"] = preset
    if out_path:
        Path(out_path).write_text(wire.dump_json(report) + "\n", encoding="utf-8")
    _print_report_table(report)
    if problems:
        raise click.exceptions.Exit(2)


def _print_report_table(report: dict) -> None:
    header = f"{'class':<14}{'iota':>10}{'eta_rx':>10}{'eta_ry':>10}{'eta_rz':>10}{'add':>12}{'add_acc':>10}{'count':>7}"
    click.echo(header)
    rows = list(report["classes"]) + [dict(report["mean"], name="Mean")]
    for row in rows:
        click.echo(
            f"{row['name']:<14}{row['iota']:>10.6f}{row['eta_rx']:>10.6f}"
            f"{row['eta_ry']:>10.6f}{row['eta_rz']:>10.6f}{row['add']:>12.6f}"
            f"{row['add_accuracy']:>10.6f}{row['count']:>7d}"
        )


@main.command("stats")
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=False))
@click.option("--json", "as_json", is_flag=True, default=False)
def cmd_stats(dataset_dir, as_json):
    """Print dataset summary statistics (frames, objects, O.D., C.O.D.)."""
    if not Path(dataset_dir).is_dir():
        raise _fail(f"dataset directory {dataset_dir!r} does not exist")
    try:
        stats = ops.compute_stats(dataset_dir)
    except annodata.AnnotationError as exc:
        raise _fail(str(exc))
    payload = ops.stats_payload(stats)
    if as_json:
        click.echo(wire.dump_json(payload))
    else:
        click.echo(f"frames                {payload['frames']}")
        click.echo(f"objects               {payload['objects']}")
        click.echo(f"max diameter (m)      {payload['max_diameter']:.6f}")
        click.echo(f"max camera dist (m)   {payload['max_camera_distance']:.6f}")


@main.command("project")
@click.argument("annotation_file", type=click.Path(exists=False))
@click.option("--registry", "registry_path", required=True, type=click.Path(exists=False))
@click.option("--out", "out_path", type=click.Path(), default=None)
def cmd_project(annotation_file, registry_path, out_path):
    """Write projected wireframes for every object of an annotation file."""
    if not Path(annotation_file).is_file():
        raise _fail(f"annotation file {annotation_file!r} does not exist")
    if not Path(registry_path).is_file():
        raise _fail(f"registry file {registry_path!r} does not exist")
    try:
        ann = annodata.read_annotations(annotation_file)
        registry = annodata.read_registry(registry_path)
        payload = ops.project_annotation(ann, registry)
    except annodata.AnnotationError as exc:
        raise _fail(str(exc))
    text = wire.dump_json(payload) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@main.command("serve")
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=False))
@click.option("--port", type=int, default=None, help="overrides TWINPOSE_PORT")
@click.option("--readonly", is_flag=True, default=False)
def cmd_serve(dataset_dir, port, readonly):
    """Run the labeling HTTP service."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("TWINPOSE_PORT", DEFAULT_PORT))
    try:
        config = ServiceConfig(port=port, dataset_root=Path(dataset_dir), read_only=readonly)
    except ValueError as exc:
        raise _fail(str(exc))
    app = create_app(config)
    uvicorn.run(app, host="127.0.0.1", port=config.port)


if __name__ == "__main__":
    main()
