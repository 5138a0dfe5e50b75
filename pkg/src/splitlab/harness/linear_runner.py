"""Linear splitting-theory checks behind ``splitlab linear``."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import linear
from .config import LinearSpec
from .runner import fmt

COMMUTATOR_DT = 1e-4


@dataclass(frozen=True)
class LinearCheck:
    name: str
    value: float
    lo: float
    hi: float

    @property
    def passed(self) -> bool:
        return self.lo <= self.value <= self.hi


def run_linear(spec: LinearSpec, out_dir=None) -> list[LinearCheck]:
    rng = np.random.default_rng(spec.seed)
    pair = linear.random_pair(rng, spec.dim)
    dts = list(spec.dt_linear)
    checks = []
    for seq, target in ((linear.LinearSequence.GODUNOV_AB, 1.0), (linear.LinearSequence.STRANG_AVG, 2.0)):
        errs = [linear.global_error(pair, spec.t_end, int(round(spec.t_end / h)), seq) for h in dts]
        checks.append(LinearCheck(f"order_{seq}", linear.observed_order(dts, errs), target - 0.1, target + 0.1))

    comm = linear.random_pair(rng, spec.dim, commuting=True)
    worst = max(
        linear.global_error(comm, spec.t_end, int(round(spec.t_end / dts[0])), seq) for seq in linear.LinearSequence
    )
    checks.append(LinearCheck("commuting_max_error", worst, 0.0, 1e-10))

    measured, predicted = linear.commutator_local_error(linear.NILPOTENT_PAIR, COMMUTATOR_DT)
    ratio = float(np.linalg.norm(measured) / np.linalg.norm(predicted))
    checks.append(LinearCheck("commutator_ratio", ratio, 0.9, 1.1))

    eps = sorted(spec.eps, reverse=True)
    errs = linear.stiff_scaling(eps)
    for e, err in zip(eps[1:], errs[1:]):
        # error * eps stays constant when the error grows like 1/eps
        checks.append(LinearCheck(f"stiff_scaling_eps={e:g}", float(err * e / (errs[0] * eps[0])), 0.5, 2.0))

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "linear.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["check", "value", "lo", "hi", "passed"])
            for c in checks:
                w.writerow([c.name, fmt(c.value), fmt(c.lo), fmt(c.hi), int(c.passed)])
    return checks
