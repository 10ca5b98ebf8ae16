"""Command-line entry points.

The heavy lifting lives in the library; each command is a thin wrapper that
parses JSON config files, calls one library function, and reports.  `serve`
hosts the HTTP app; UTIRISK_PORT, UTIRISK_THRESHOLD, and UTIRISK_SNAPSHOT
override the corresponding options.
"""

from __future__ import annotations

import datetime as dt
import json
import sys
from pathlib import Path

import click

from utirisk.data.io import load_corpus, save_corpus
from utirisk.data.synthetic import GeneratorConfig, generate_synthetic
from utirisk.nn.gradcheck import standard_suite
from utirisk.pipeline import report_table, run_experiment, run_manifest, train_semisupervised
from utirisk.service import DEFAULT_THRESHOLD, ServiceState, create_app
from utirisk.snapshot import config_from_json, load_snapshot, save_snapshot


def _read_json(path: str | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text())


def _generator_config(d: dict) -> GeneratorConfig:
    d = dict(d)
    for k in ("nodes", "phys_channels", "night_nodes"):
        if k in d:
            d[k] = tuple(d[k])
    if "start_date" in d:
        d["start_date"] = dt.date.fromisoformat(d["start_date"])
    return GeneratorConfig(**d)


@click.group()
def main() -> None:
    """UTI risk analysis over in-home activity data."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="generator config JSON; defaults apply otherwise")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def generate(config_path: str | None, seed: int, out_dir: str) -> None:
    """Write a seeded synthetic corpus to a directory."""
    cfg = _generator_config(_read_json(config_path))
    corpus = generate_synthetic(cfg, seed=seed)
    save_corpus(corpus, out_dir)
    uti = sum(d.label.value for d in corpus.labelled)
    click.echo(f"wrote {len(corpus.unlabelled)} unlabelled and "
               f"{len(corpus.labelled)} labelled days "
               f"({uti} UTI) to {out_dir}")


@main.command()
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True, file_okay=False),
              required=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="experiment config JSON; defaults to de+pnn")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def train(corpus_dir: str, config_path: str | None, out_path: str) -> None:
    """Train a full pipeline on a corpus and save it as a snapshot."""
    raw = _read_json(config_path)
    if not raw:
        raw = {"extractor": "de", "classifier": "pnn"}
    config = config_from_json(raw)
    corpus = load_corpus(corpus_dir)
    model = train_semisupervised(corpus, config)
    checksum = save_snapshot(model, out_path, version_tag="v1")
    click.echo(f"trained {config.name()} on {len(corpus.labelled)} labelled days; "
               f"snapshot v1 at {out_path} (sha256 {checksum[:12]})")


@main.command()
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True, file_okay=False),
              required=True)
@click.option("--configs", "configs_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="JSON list of experiment configs")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), required=True)
def evaluate(corpus_dir: str, configs_path: str, report_path: str) -> None:
    """Cross-validate a batch of configs; write a table and a JSON manifest."""
    raw = json.loads(Path(configs_path).read_text())
    if not isinstance(raw, list):
        raise click.UsageError("--configs file must hold a JSON list")
    configs = [config_from_json(d) for d in raw]
    corpus = load_corpus(corpus_dir)
    reports = run_experiment(corpus, configs)
    table = report_table(reports)
    Path(report_path).write_text(table)
    manifest_path = report_path + ".manifest.json"
    Path(manifest_path).write_text(json.dumps(run_manifest(corpus, reports), indent=2))
    click.echo(table, nl=False)
    click.echo(f"report: {report_path}\nmanifest: {manifest_path}")
    if any(r.error for r in reports):
        sys.exit(1)


@main.command()
@click.option("--snapshot", "snapshot_path", type=click.Path(exists=True, dir_okay=False),
              envvar="UTIRISK_SNAPSHOT", required=True)
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="corpus to preload as scorable home-days")
@click.option("--port", type=int, default=8000, envvar="UTIRISK_PORT", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--threshold", type=float, default=DEFAULT_THRESHOLD,
              envvar="UTIRISK_THRESHOLD", show_default=True)
def serve(snapshot_path: str, corpus_dir: str | None, port: int, host: str,
          threshold: float) -> None:
    """Serve the HTTP API; validations persist back to the snapshot file."""
    import uvicorn

    snap = load_snapshot(snapshot_path)
    state = ServiceState(snap.model, threshold=threshold,
                         version_tag=snap.version_tag, snapshot_path=snapshot_path)
    if corpus_dir is not None:
        n = state.add_corpus(load_corpus(corpus_dir))
        click.echo(f"loaded {n} scorable home-days")
    click.echo(f"model {snap.version_tag} ({state.model.config.name()}), "
               f"threshold {threshold}")
    uvicorn.run(create_app(state), host=host, port=port, log_level="info")


@main.command()
@click.option("--tol", type=float, default=1e-4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def gradcheck(tol: float, seed: int) -> None:
    """Finite-difference verification of every layer/activation/loss combo."""
    failed = False
    total = 0
    for name, result in standard_suite(seed=seed):
        status = "ok" if result.ok(tol) else "FAIL"
        if not result.ok(tol):
            failed = True
        total += result.probes
        click.echo(f"{status:4s} {name}: max rel err {result.max_rel_error:.2e} "
                   f"({result.probes} probes, worst {result.worst_param})")
    click.echo(f"{total} probes total")
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
