"""Recorded golden runs for end-to-end regression checking.

Each golden case replays a small CLI run with a pinned seed and compares
the CSV/JSON artifacts against the blessed copies stored in the repository.
Byte-identical files pass immediately; otherwise numeric cells are compared
within the case's tolerance, so a change of BLAS or platform rounding does
not trip the check while a real numeric drift does.  Figures are checked
for existence only, since PNG bytes vary across matplotlib versions.

Usage: ``python -m paretotail.goldens record`` to bless the current
behaviour, ``python -m paretotail.goldens verify`` to check against it.
"""

from __future__ import annotations

import hashlib
import json
import math
import shutil
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cli
from .adaptive import default_config, select
from .distributions import Pareto, draw_sample

__all__ = ["GoldenCase", "GOLDEN_CASES", "default_golden_dir", "record_goldens", "verify_goldens"]

_FLOAT_TOL = 1e-9


@dataclass
class GoldenCase:
    """One replayable CLI run with its compared and existence-only artifacts."""

    name: str
    argv: list
    artifacts: list
    figures: list = field(default_factory=list)
    setup: object = None
    float_tol: float = _FLOAT_TOL


def _setup_estimate_input(workdir: Path) -> None:
    rng = np.random.default_rng(123)
    values = Pareto(1.0).sample(400, rng)
    lines = ["value"] + ["%.17g" % v for v in values]
    (workdir / "input.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


GOLDEN_CASES = [
    GoldenCase(
        name="estimate_pareto",
        argv=["estimate", "--input", "input.csv", "--p", "0.99", "0.999"],
        artifacts=["estimate_result.json", "hill_curve.csv"],
        figures=["hill_plot.png"],
        setup=_setup_estimate_input,
    ),
    GoldenCase(
        name="calibrate_small",
        argv=["calibrate", "--n", "200", "--reps", "200", "--seed", "9"],
        artifacts=["calibration_200.json"],
        figures=["calibration_200.png"],
    ),
    GoldenCase(
        name="table1_cauchy",
        argv=["simulate", "table1", "--law", "cauchy", "--n", "300", "--reps", "80",
              "--seed", "21", "--k-stride", "4",
              "--p", "0.9", "0.99", "0.999"],
        artifacts=["cauchy_300_table1.csv", "cauchy_300_table1_sigma_fixed.csv"],
        figures=["cauchy_300_table1.png"],
    ),
    GoldenCase(
        name="table2_gpd",
        argv=["simulate", "table2", "--law", "gpd", "--n", "300", "--reps", "80",
              "--seed", "22", "--k-max", "150"],
        artifacts=["gpd_300_table2.csv"],
        figures=["gpd_300_table2.png"],
    ),
    GoldenCase(
        name="gamma_rmse_loggamma",
        argv=["simulate", "gamma_rmse", "--law", "loggamma", "--n", "300",
              "--reps", "80", "--seed", "23"],
        artifacts=["loggamma_300_gamma_rmse.csv", "loggamma_300_gamma_rmse_rmse_hill.csv"],
        figures=["loggamma_300_gamma_rmse.png"],
    ),
    GoldenCase(
        name="analyze_logpareto",
        argv=["analyze", "--law", "logpareto", "--t-points", "12"],
        artifacts=["logpareto_analyze.csv"],
        figures=["logpareto_analyze.png"],
    ),
]


def consistency_scalars(n_rep: int = 500, n: int = 1000, seed: int = 77) -> dict:
    """Median absolute index error on exact unit-index Pareto data.

    This is the frozen sanity value behind the acceptance check that the
    adaptive estimate concentrates near the true index.
    """
    config = default_config(n)
    errors = np.empty(n_rep)
    children = np.random.SeedSequence(seed).spawn(n_rep)
    for j, child in enumerate(children):
        rng = np.random.default_rng(child)
        sample = draw_sample(Pareto(1.0), n, rng)
        errors[j] = abs(select(sample, config, trace=False).theta_hat - 1.0)
    return {"median_abs_theta_error": float(np.median(errors))}


def default_golden_dir() -> Path:
    return Path(__file__).resolve().parents[2] / "goldens"


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _run_case(case: GoldenCase, workdir: Path) -> None:
    if case.setup is not None:
        case.setup(workdir)
    argv = [str(workdir / a) if a == "input.csv" else a for a in case.argv]
    rc = cli.main(argv + ["--out", str(workdir)])
    if rc != 0:
        raise RuntimeError(f"golden case {case.name} exited with status {rc}")


def _values_close(a, b, tol: float) -> bool:
    if math.isnan(a) and math.isnan(b):
        return True
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _compare_text(expected: str, got: str, tol: float):
    """Cell-wise comparison of delimited text; numbers within tol, rest exact."""
    exp_lines = expected.strip().splitlines()
    got_lines = got.strip().splitlines()
    if len(exp_lines) != len(got_lines):
        return f"line count {len(got_lines)} != {len(exp_lines)}"
    for i, (el, gl) in enumerate(zip(exp_lines, got_lines)):
        ecs, gcs = el.split(","), gl.split(",")
        if len(ecs) != len(gcs):
            return f"line {i + 1}: cell count {len(gcs)} != {len(ecs)}"
        for j, (ec, gc) in enumerate(zip(ecs, gcs)):
            try:
                ev, gv = float(ec), float(gc)
            except ValueError:
                if ec != gc:
                    return f"line {i + 1} cell {j + 1}: {gc!r} != {ec!r}"
                continue
            if not _values_close(ev, gv, tol):
                return f"line {i + 1} cell {j + 1}: {gv!r} != {ev!r} (tol {tol:g})"
    return None


def _compare_json_values(expected, got, tol: float, where: str = "$"):
    if isinstance(expected, dict) and isinstance(got, dict):
        if sorted(expected) != sorted(got):
            return f"{where}: keys differ"
        for k in expected:
            msg = _compare_json_values(expected[k], got[k], tol, f"{where}.{k}")
            if msg:
                return msg
        return None
    if isinstance(expected, list) and isinstance(got, list):
        if len(expected) != len(got):
            return f"{where}: length {len(got)} != {len(expected)}"
        for i, (e, g) in enumerate(zip(expected, got)):
            msg = _compare_json_values(e, g, tol, f"{where}[{i}]")
            if msg:
                return msg
        return None
    if isinstance(expected, (int, float)) and isinstance(got, (int, float)):
        if not _values_close(float(expected), float(got), tol):
            return f"{where}: {got!r} != {expected!r} (tol {tol:g})"
        return None
    if expected != got:
        return f"{where}: {got!r} != {expected!r}"
    return None


def _compare_artifact(expected: Path, got: Path, tol: float):
    if not got.exists():
        return "missing artifact"
    if _digest(expected) == _digest(got):
        return None
    if expected.suffix == ".json":
        exp = json.loads(expected.read_text(encoding="utf-8"))
        # Manifests carry a timestamp; golden cases never compare manifests,
        # so plain value comparison applies.
        new = json.loads(got.read_text(encoding="utf-8"))
        return _compare_json_values(exp, new, tol)
    return _compare_text(
        expected.read_text(encoding="utf-8"), got.read_text(encoding="utf-8"), tol
    )


def record_goldens(golden_dir=None, cases=None, scalars: bool | None = None) -> Path:
    """Run every case and bless its artifacts into the golden directory.

    The frozen consistency scalars are recorded when ``scalars`` is true; by
    default they are included only for a full recording.
    """
    golden_dir = Path(golden_dir) if golden_dir else default_golden_dir()
    golden_dir.mkdir(parents=True, exist_ok=True)
    if scalars is None:
        scalars = cases is None
    index = {"cases": {}, "scalars": consistency_scalars() if scalars else {}}
    for case in cases or GOLDEN_CASES:
        case_dir = golden_dir / case.name
        if case_dir.exists():
            shutil.rmtree(case_dir)
        case_dir.mkdir(parents=True)
        with tempfile.TemporaryDirectory() as tmp:
            workdir = Path(tmp)
            _run_case(case, workdir)
            digests = {}
            for name in case.artifacts:
                src = workdir / name
                shutil.copy2(src, case_dir / name)
                digests[name] = _digest(src)
        index["cases"][case.name] = {
            "argv": case.argv,
            "artifacts": digests,
            "figures": case.figures,
            "float_tol": case.float_tol,
        }
    (golden_dir / "goldens.json").write_text(
        json.dumps(index, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return golden_dir


def verify_goldens(golden_dir=None, cases=None) -> list:
    """Re-run every golden case and compare; returns (name, ok, message) triples."""
    golden_dir = Path(golden_dir) if golden_dir else default_golden_dir()
    index_path = golden_dir / "goldens.json"
    if not index_path.exists():
        raise FileNotFoundError(
            f"no goldens recorded at {golden_dir}; run `python -m paretotail.goldens record`"
        )
    index = json.loads(index_path.read_text(encoding="utf-8"))
    results = []
    for case in cases or GOLDEN_CASES:
        entry = index["cases"].get(case.name)
        if entry is None:
            results.append((case.name, False, "not recorded"))
            continue
        with tempfile.TemporaryDirectory() as tmp:
            workdir = Path(tmp)
            try:
                _run_case(case, workdir)
            except Exception as exc:
                results.append((case.name, False, f"run failed: {exc}"))
                continue
            failure = None
            for name in case.artifacts:
                msg = _compare_artifact(golden_dir / case.name / name, workdir / name,
                                        case.float_tol)
                if msg:
                    failure = f"{name}: {msg}"
                    break
            if failure is None:
                for name in case.figures:
                    if not (workdir / name).exists():
                        failure = f"{name}: figure not rendered"
                        break
        results.append((case.name, failure is None, failure or "ok"))
    recorded_scalars = index.get("scalars", {})
    if recorded_scalars:
        scalars = consistency_scalars()
        for key, expected in recorded_scalars.items():
            got = scalars.get(key)
            ok = got is not None and _values_close(float(expected), float(got), 0.02)
            results.append((f"scalar:{key}", ok,
                            "ok" if ok else f"{got!r} != {expected!r} (tol 0.02)"))
    return results


def main(argv=None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    if not argv or argv[0] not in {"record", "verify"}:
        print("usage: python -m paretotail.goldens {record|verify} [golden_dir]",
              file=sys.stderr)
        return 2
    golden_dir = Path(argv[1]) if len(argv) > 1 else None
    if argv[0] == "record":
        out = record_goldens(golden_dir)
        print(f"recorded {len(GOLDEN_CASES)} golden cases to {out}")
        return 0
    results = verify_goldens(golden_dir)
    for name, ok, message in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {message}")
    return 0 if all(ok for _, ok, _ in results) else 1


if __name__ == "__main__":
    sys.exit(main())
