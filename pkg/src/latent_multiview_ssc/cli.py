import json
import sys
from pathlib import Path
from typing import Any, Optional

import click
from pydantic import ValidationError

from .config import settings
from .core.types import LmsscConfig
from .errors import LmsscError
from .services import data_io, experiment, invariant_checks, report as report_io
from .services.synthetic import SyntheticSpec, generate_synthetic
from .services.tracking import MlflowTracker


def _solver_options(f):
    options = [
        click.option("--k", "neighbor_count", type=int, default=None, help="Neighbor count for alpha and k-NN graphs."),
        click.option("--beta", type=float, default=None),
        click.option("--gamma", type=float, default=None),
        click.option("--latent-dim", type=int, default=None),
        click.option("--max-iters", type=int, default=None),
        click.option("--tol", "f_rel_tol", type=float, default=None, help="Relative change of F that stops the loop."),
        click.option("--alpha-mode", type=click.Choice(["mean", "per_point"]), default=None),
        click.option("--defer-label-distance/--no-defer-label-distance", default=None),
        click.option("--check-invariants/--no-check-invariants", default=None),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _experiment_options(f):
    options = [
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="ExperimentConfig JSON; flags override its fields."),
        click.option("--manifest", type=click.Path(exists=True, dir_okay=False), default=None),
        click.option("--synthetic", "synthetic_file", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="SyntheticSpec JSON used instead of a manifest."),
        click.option("--method", "methods", multiple=True, help="lmssc, amgl, mlan or gfhf[:view]; repeatable."),
        click.option("--rate", "rates", multiple=True, type=float, help="Label rate; repeatable."),
        click.option("--trials", type=int, default=None),
        click.option("--seed", "base_seed", type=int, default=None, help="Base seed; trial t uses seed + t."),
        click.option("--jobs", type=int, default=None),
        click.option("--out", "out_dir", type=click.Path(file_okay=False), default="results", show_default=True),
    ]
    f = _solver_options(f)
    for option in reversed(options):
        f = option(f)
    return f


SOLVER_KEYS = ("neighbor_count", "beta", "gamma", "latent_dim", "max_iters", "f_rel_tol",
               "alpha_mode", "defer_label_distance", "check_invariants")


def _read_json(path: Optional[str]) -> dict[str, Any]:
    if path is None:
        return {}
    with open(path, "r") as f:
        return json.load(f)


def _solver_overrides(options: dict[str, Any]) -> dict[str, Any]:
    return {key: options[key] for key in SOLVER_KEYS if options.get(key) is not None}


def _build_config(options: dict[str, Any]) -> experiment.ExperimentConfig:
    data = _read_json(options["config_file"])
    if options["manifest"] is not None:
        data["manifest"] = options["manifest"]
        data.pop("synthetic", None)
    if options["synthetic_file"] is not None:
        data["synthetic"] = _read_json(options["synthetic_file"])
        data.pop("manifest", None)
    if options["methods"]:
        data["methods"] = list(options["methods"])
    if options["rates"]:
        data["label_rates"] = list(options["rates"])
    for key in ("trials", "base_seed", "jobs"):
        if options[key] is not None:
            data[key] = options[key]
    data["lmssc"] = {**data.get("lmssc", {}), **_solver_overrides(options)}
    if options.get("sweep") is not None:
        data["sweep"] = {**data.get("sweep", {}), **options["sweep"]}
    try:
        return experiment.ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise click.BadParameter(str(exc)) from exc


def _write_config(config: experiment.ExperimentConfig, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "config.json", "w") as f:
        json.dump(config.model_dump(mode="json"), f, indent=2)


@click.group()
def cli():
    pass


@cli.command()
@_experiment_options
def run(**options):
    """Run the method x rate x trial grid and write report.json and table.txt."""
    config = _build_config(options)
    out_dir = Path(options["out_dir"])
    _write_config(config, out_dir)

    try:
        result = experiment.run(config, MlflowTracker())
    except LmsscError as exc:
        raise click.ClickException(f"{exc.kind}: {exc}") from exc
    report_io.emit(result, out_dir, ("json", "table"))
    click.echo(report_io.format_table(result, methods=config.methods, rates=config.label_rates))
    if result.has_failures:
        click.echo(f"{len(result.failures)} cells failed, see {out_dir / 'report.json'}", err=True)
        sys.exit(1)


@cli.command()
@_experiment_options
@click.option("--betas", multiple=True, type=float, help="Grid values for beta; repeatable.")
@click.option("--gammas", multiple=True, type=float, help="Grid values for gamma; repeatable.")
@click.option("--latent-dims", multiple=True, type=int, help="Grid values for r; repeatable.")
def sweep(betas, gammas, latent_dims, **options):
    """Grid over beta, gamma and r; writes report.json, aggregates.csv and best.json."""
    grid = {}
    if betas:
        grid["betas"] = list(betas)
    if gammas:
        grid["gammas"] = list(gammas)
    if latent_dims:
        grid["latent_dims"] = list(latent_dims)
    options["sweep"] = grid
    config = _build_config(options)
    out_dir = Path(options["out_dir"])
    _write_config(config, out_dir)

    try:
        result = experiment.sweep(config, MlflowTracker())
    except LmsscError as exc:
        raise click.ClickException(f"{exc.kind}: {exc}") from exc
    report_io.emit(result.report, out_dir, ("json", "csv"))
    best = None if result.best is None else {**result.best.params, "method": result.best.method,
                                             "rate": result.best.rate, "mean": result.best.mean, "std": result.best.std}
    with open(out_dir / "best.json", "w") as f:
        json.dump(best, f, indent=2)

    for row in result.report.aggregates:
        click.echo(f"{row.method:8s} rate={row.rate:<5g} {row.params}  {row.cell()}")
    if best is not None:
        click.echo(f"best: {result.best.method} rate={result.best.rate:g} {result.best.params} {result.best.cell()}")
    if result.report.has_failures:
        click.echo(f"{len(result.report.failures)} cells failed, see {out_dir / 'report.json'}", err=True)
        sys.exit(1)


@cli.command()
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--name", default="synthetic", show_default=True)
@click.option("--n-samples", type=int, default=200, show_default=True)
@click.option("--n-classes", type=int, default=4, show_default=True)
@click.option("--latent-dim", type=int, default=5, show_default=True)
@click.option("--view-dim", "view_dims", multiple=True, type=int, help="Dimension of one view; repeatable (default 20 30 40).")
@click.option("--separation", type=float, default=10.0, show_default=True)
@click.option("--noise", type=float, default=0.1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def synth(out_dir, name, n_samples, n_classes, latent_dim, view_dims, separation, noise, seed):
    """Generate a planted multi-view dataset and write it with a manifest."""
    try:
        spec = SyntheticSpec(
            n_samples=n_samples,
            n_classes=n_classes,
            latent_dim=latent_dim,
            view_dims=list(view_dims) or [20, 30, 40],
            cluster_separation=separation,
            noise_sigma=noise,
            rng_seed=seed,
        )
    except ValidationError as exc:
        raise click.BadParameter(str(exc)) from exc
    data = generate_synthetic(spec)
    manifest_path = data_io.save_views(out_dir, name, data.views, data.labels, data.n_classes, settings.BASE_SEED)
    click.echo(str(manifest_path))


@cli.command()
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--synthetic", "synthetic_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--rate", type=float, default=None, help="Label rate of the split the checks fit on.")
@click.option("--seed", type=int, default=None)
@_solver_options
def check(manifest, synthetic_file, rate, seed, **solver):
    """Run the numerical self-checks on one split of a dataset."""
    try:
        cfg = LmsscConfig(**_solver_overrides(solver))
        if manifest is not None:
            loaded = data_io.DatasetManifest.from_file(manifest)
            views, labels = data_io.load(loaded)
            n_classes, base_seed = loaded.class_count, loaded.base_seed
        else:
            data = generate_synthetic(SyntheticSpec.model_validate(_read_json(synthetic_file)))
            views, labels, n_classes, base_seed = list(data.views), data.labels, data.n_classes, settings.BASE_SEED
    except ValidationError as exc:
        raise click.BadParameter(str(exc)) from exc
    except LmsscError as exc:
        raise click.ClickException(f"{exc.kind}: {exc}") from exc
    rate = settings.LABEL_RATES[0] if rate is None else rate
    results = invariant_checks.run_checks(views, labels, n_classes, cfg, rate, base_seed if seed is None else seed)

    width = max(len(result.name) for result in results)
    for result in results:
        click.echo(f"{result.name.ljust(width)}  {'pass' if result.passed else 'FAIL'}  {result.detail}")
    if not all(result.passed for result in results):
        sys.exit(1)


if __name__ == "__main__":
    cli()
