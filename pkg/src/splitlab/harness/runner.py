"""Run scenarios and sweeps, score them, and persist CSV results."""
from __future__ import annotations

import csv
import dataclasses
import io
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..advection import Field1D
from ..mechanism import SPECIES, analytic_reference, transported_pulse
from ..metrics import EmptyRegionWarning, RRMSConfig, l2_error, rrms_species, rrms_species_mean
from ..splitting import ScenarioConfig, SplittingSequence, clamp_output, run_simulation
from .config import Reference, RunSpec, SweepSpec

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = (
    "dx_km", "dt_s", "sequence",
    "rrms_NO", "rrms_NO2", "rrms_O3", "rrms_mean",
    "l2_NO", "l2_NO2", "l2_O3",
    "mass_drift", "wall_s",
)
FIELD_COLUMNS = ("x_km",) + SPECIES


@dataclass(frozen=True)
class ErrorRecord:
    dx: float
    dt: float
    sequence: SplittingSequence
    reference: str
    rrms: tuple[float, float, float]
    rrms_mean: float
    l2: tuple[float, float, float]
    wall_s: float
    mass_drift: float

    @property
    def key(self) -> str:
        return scenario_key(self.dx, self.dt, self.sequence)

    def row(self) -> list[str]:
        return [fmt(self.dx / 1e3), fmt(self.dt), str(self.sequence),
                *map(fmt, self.rrms), fmt(self.rrms_mean), *map(fmt, self.l2),
                fmt(self.mass_drift), fmt(self.wall_s)]


def fmt(x: float) -> str:
    """Full round-trip precision."""
    return format(float(x), ".17g")


def scenario_key(dx: float, dt: float, sequence) -> str:
    return f"{sequence}_dx{dx / 1e3:g}km_dt{dt:g}s"


def analytic_for(cfg: ScenarioConfig) -> Field1D:
    """Exact final state for the scenario's sequence.

    Transport-only runs are compared with the unreacted shifted pulse and
    chemistry-only runs with the equilibrium pulse in place.
    """
    pulse = (cfg.ic.lo, cfg.ic.hi)
    if cfg.sequence is SplittingSequence.TRANSPORT_ONLY:
        return transported_pulse(cfg.horizon, cfg.grid, pulse, cfg.advection.u, cfg.ic.amplitude)
    u = 0.0 if cfg.sequence is SplittingSequence.CHEMISTRY_ONLY else cfg.advection.u
    return analytic_reference(cfg.horizon, cfg.grid, pulse, u, cfg.mechanism, cfg.ic.amplitude)


def write_fields(path: Path, fields: Field1D) -> None:
    out = clamp_output(fields)
    x_km = fields.grid.centers / 1e3
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIELD_COLUMNS)
        for x, row in zip(x_km, out.values):
            w.writerow([fmt(x), *map(fmt, row)])


def read_fields(path) -> tuple[np.ndarray, np.ndarray]:
    """(x_km, values) from a fields CSV."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != FIELD_COLUMNS:
        raise ValueError(f"{path}: expected columns {FIELD_COLUMNS}")
    data = np.array([[float(v) for v in r] for r in rows[1:]]).reshape(-1, 4)
    return data[:, 0], data[:, 1:]


def score(ref: Field1D, test: Field1D, threshold: float, reference: str, cfg: ScenarioConfig, wall_s: float, drift: float) -> ErrorRecord:
    per = rrms_species(ref, test, RRMSConfig(threshold))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyRegionWarning)
        mean = rrms_species_mean(per)
    l2 = l2_error(ref, test)
    return ErrorRecord(cfg.dx, cfg.dt_split, cfg.sequence, reference,
                       tuple(map(float, per)), mean, tuple(map(float, l2)), wall_s, drift)


def _simulate(cfg: ScenarioConfig):
    res = run_simulation(cfg)
    return res.final, res.wall_time, res.mass_drift


def run_scenario(spec: RunSpec, out_dir, reference_field: Field1D | None = None) -> ErrorRecord:
    """Run one scenario, write ``fields_<key>.csv`` and return its scores."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = spec.scenario
    final, wall, drift = _simulate(cfg)
    write_fields(out / f"fields_{scenario_key(cfg.dx, cfg.dt_split, cfg.sequence)}.csv", final)
    if reference_field is None:
        reference_field = reference_field_for(spec.reference, cfg)
    return score(reference_field, final, spec.threshold, str(spec.reference), cfg, wall, drift)


def reference_field_for(reference: Reference, cfg: ScenarioConfig) -> Field1D:
    if reference.is_analytic:
        return analytic_for(cfg)
    ref_cfg = dataclasses.replace(cfg, sequence=reference.sequence, dt_split=reference.dt_split)
    return run_simulation(ref_cfg).final


def run_sweep(spec: SweepSpec, out_dir, jobs: int = 1) -> list[ErrorRecord]:
    """Run every (dx, dt, sequence) point and write ``summary.csv``.

    Scenarios run in up to ``jobs`` worker processes; the summary is
    always assembled in sorted (dx, dt, sequence) order.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    triples = list(spec.triples())
    configs = [spec.scenario(*t) for t in triples]
    ref_cfgs = {}
    if not spec.reference.is_analytic:
        for dx in sorted(set(spec.dx_list)):
            ref_cfgs[dx] = spec.scenario(dx, spec.reference.dt_split, spec.reference.sequence)

    def run_all(mapper):
        finals = {}
        todo = list(configs) + [c for c in ref_cfgs.values() if c not in configs]
        for cfg, result in zip(todo, mapper(_simulate_checked, todo)):
            finals[cfg] = result
        return finals

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            finals = run_all(pool.map)
    else:
        finals = run_all(map)

    records = []
    for cfg in configs:
        final, wall, drift = finals[cfg]
        write_fields(out / f"fields_{scenario_key(cfg.dx, cfg.dt_split, cfg.sequence)}.csv", final)
        ref = analytic_for(cfg) if spec.reference.is_analytic else finals[ref_cfgs[cfg.dx]][0]
        rec = score(ref, final, spec.threshold, str(spec.reference), cfg, wall, drift)
        log.info("%s rrms_mean=%.4g", rec.key, rec.rrms_mean)
        records.append(rec)
    write_summary(out / "summary.csv", records)
    return records


def _simulate_checked(cfg: ScenarioConfig):
    try:
        return _simulate(cfg)
    except Exception as exc:
        raise RuntimeError(f"scenario {scenario_key(cfg.dx, cfg.dt_split, cfg.sequence)} failed: {exc}") from exc


def summary_text(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for r in sorted(records, key=lambda r: (r.dx, r.dt, r.sequence.value)):
        w.writerow(r.row())
    return buf.getvalue()


def write_summary(path, records) -> None:
    Path(path).write_text(summary_text(records))


def read_summary(path) -> list[dict]:
    """Rows of a summary CSV with numeric columns converted to float."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in SUMMARY_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        rows = []
        for r in reader:
            rows.append({k: (v if k == "sequence" else float(v)) for k, v in r.items()})
    return rows
