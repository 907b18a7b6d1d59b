"""Serialization of experiment reports: canonical CSV tables plus a JSON manifest.

Numbers are written with 12 significant digits so identical runs produce
byte-identical files on any platform; the manifest carries the seed, the
full configuration and the package version needed to reproduce the run.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

from .adaptive import AdaptiveConfig
from .harness import ExperimentReport, Table

__all__ = ["format_number", "write_table", "write_report", "report_basename"]

PRIMARY_TABLE = {"table1": "ratio", "table2": "ratio0", "gamma_rmse": "summary"}


def format_number(value) -> str:
    return "%.12g" % float(value)


def write_table(table: Table, path) -> None:
    lines = [",".join(str(c) for c in table.col_labels)]
    for row in table.values:
        lines.append(",".join(format_number(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def config_dict(config: AdaptiveConfig) -> dict:
    return asdict(config)


def report_basename(report: ExperimentReport) -> str:
    return f"{report.law_name}_{report.n}_{report.experiment}"


def write_report(report: ExperimentReport, outdir) -> list:
    """Write one CSV per table and a JSON manifest; return the paths written.

    The table named for the experiment's headline quantity goes to
    ``{law}_{n}_{experiment}.csv``; any supporting tables get a suffix.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    base = report_basename(report)
    primary = PRIMARY_TABLE.get(report.experiment)
    written = []
    files = {}
    for name, table in report.tables.items():
        fname = f"{base}.csv" if name == primary else f"{base}_{name}.csv"
        write_table(table, outdir / fname)
        files[name] = fname
        written.append(outdir / fname)
    manifest = {
        "experiment": report.experiment,
        "law": {"name": report.law_name, "params": report.law_params},
        "n": report.n,
        "n_rep": report.n_rep,
        "seed": report.seed,
        "config": config_dict(report.config),
        "version": report.version,
        "timestamp": report.timestamp,
        "tables": files,
        "extras": report.extras,
    }
    mpath = outdir / f"{base}_manifest.json"
    mpath.write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    written.append(mpath)
    return written
