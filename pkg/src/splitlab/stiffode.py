"""Adaptive linearly-implicit integrator for the per-cell chemistry.

The default method is the two-stage ROS2 Rosenbrock scheme
(gamma = 1 + 1/sqrt(2)), second order and L-stable, with the forward
Euler-like first stage as the embedded first-order solution.  Every cell
carries its own step size, so a field of cells is integrated in one
vectorised loop whose result per cell does not depend on its neighbours.

An explicit Bogacki-Shampine 3(2) pair is available as ``method="explicit"``
for comparison runs; it is not meant for the stiff default rates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mechanism import MechanismParams, SpeciesTriple, chem_jacobian, chem_rhs

GAMMA = 1.0 + 1.0 / math.sqrt(2.0)
METHODS = ("rosenbrock", "explicit")


class StepSizeUnderflow(RuntimeError):
    """The controller asked for a step below ``h_min`` while the error was still too large."""


@dataclass(frozen=True)
class SolverConfig:
    rtol: float = 1e-3
    atol: float = 1e-10
    h_init: float = 1e-4
    h_min: float = 1e-12
    h_max: float | None = None  # None: the requested span
    safety: float = 0.9
    method: str = "rosenbrock"

    def __post_init__(self):
        if not 0 < self.rtol <= 0.1:
            raise ValueError(f"rtol must lie in (0, 0.1], got {self.rtol}")
        if not self.atol > 0:
            raise ValueError(f"atol must be positive, got {self.atol}")
        h_max = math.inf if self.h_max is None else self.h_max
        if not 0 < self.h_min <= self.h_init <= h_max:
            raise ValueError(f"need 0 < h_min <= h_init <= h_max, got {self.h_min}, {self.h_init}, {self.h_max}")
        if not 0 < self.safety <= 1:
            raise ValueError(f"safety must lie in (0, 1], got {self.safety}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")


def step_controller(error_norm, h, order: int, cfg: SolverConfig, h_max: float | None = None):
    """Next step size from a weighted error norm.

    ``h * clip(safety * err**(-1/(order+1)), 0.2, 5)`` then clipped to
    ``[h_min, h_max]``. Works elementwise on arrays.
    """
    err = np.asarray(error_norm, dtype=float)
    with np.errstate(divide="ignore"):
        factor = cfg.safety * np.power(err, -1.0 / (order + 1))
    factor = np.clip(np.nan_to_num(factor, posinf=5.0), 0.2, 5.0)
    if h_max is None:
        h_max = math.inf if cfg.h_max is None else cfg.h_max
    out = np.clip(np.asarray(h, dtype=float) * factor, cfg.h_min, h_max)
    return out if out.ndim else float(out)


def _solve3(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched 3x3 solve by cofactors; ``m`` is ``(n, 3, 3)``, ``b`` is ``(n, 3)``."""
    a, bb, c = m[:, 0, 0], m[:, 0, 1], m[:, 0, 2]
    d, e, f = m[:, 1, 0], m[:, 1, 1], m[:, 1, 2]
    g, h, i = m[:, 2, 0], m[:, 2, 1], m[:, 2, 2]
    c00 = e * i - f * h
    c01 = f * g - d * i
    c02 = d * h - e * g
    det = a * c00 + bb * c01 + c * c02
    inv = np.empty_like(m)
    inv[:, 0, 0] = c00
    inv[:, 1, 0] = c01
    inv[:, 2, 0] = c02
    inv[:, 0, 1] = c * h - bb * i
    inv[:, 1, 1] = a * i - c * g
    inv[:, 2, 1] = bb * g - a * h
    inv[:, 0, 2] = bb * f - c * e
    inv[:, 1, 2] = c * d - a * f
    inv[:, 2, 2] = a * e - bb * d
    return np.einsum("nij,nj->ni", inv, b) / det[:, None]


def _ros2_stage(y, h, params):
    """ROS2 step for all rows of ``y``; returns (solution, embedded-difference)."""
    f0 = chem_rhs(y, params)
    w = np.eye(3)[None] - (GAMMA * h)[:, None, None] * chem_jacobian(y, params)
    k1 = _solve3(w, f0)
    f1 = chem_rhs(y + h[:, None] * k1, params)
    k2 = _solve3(w, f1 - 2.0 * k1)
    y_new = y + h[:, None] * (1.5 * k1 + 0.5 * k2)
    return y_new, 0.5 * h[:, None] * (k1 + k2)


def _bs23_stage(y, h, params):
    hh = h[:, None]
    k1 = chem_rhs(y, params)
    k2 = chem_rhs(y + 0.5 * hh * k1, params)
    k3 = chem_rhs(y + 0.75 * hh * k2, params)
    y_new = y + hh * (2 * k1 + 3 * k2 + 4 * k3) / 9.0
    k4 = chem_rhs(y_new, params)
    return y_new, hh * (-5 * k1 / 72 + k2 / 12 + k3 / 9 - k4 / 8)


_STAGES = {"rosenbrock": (_ros2_stage, 1), "explicit": (_bs23_stage, 2)}


def integrate_cells(states, params: MechanismParams, t_span: float, cfg: SolverConfig | None = None, max_steps: int = 100_000):
    """Integrate every row of ``states`` (shape ``(n, 3)``) over ``t_span`` seconds.

    Returns a new ``(n, 3)`` array. Each row has independent step-size
    control, so the answer for a row is the same whatever else is in the batch.
    """
    cfg = cfg or SolverConfig()
    if not t_span > 0:
        raise ValueError(f"t_span must be positive, got {t_span}")
    y = np.array(states, dtype=float, ndmin=2)
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite chemistry state")
    stage, err_order = _STAGES[cfg.method]
    h_max = t_span if cfg.h_max is None else min(cfg.h_max, t_span)
    n = y.shape[0]
    t = np.zeros(n)
    h = np.full(n, min(cfg.h_init, h_max))
    active = np.arange(n)
    for _ in range(max_steps):
        if active.size == 0:
            return y
        ya, ta = y[active], t[active]
        # land exactly on t_span
        remaining = t_span - ta
        ha = np.minimum(h[active], remaining)
        last = ha >= remaining
        y_new, err_vec = stage(ya, ha, params)
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(ya), np.abs(y_new))
        err = np.sqrt(np.mean((err_vec / scale) ** 2, axis=1))
        if not np.all(np.isfinite(y_new)):
            bad = ~np.all(np.isfinite(y_new), axis=1)
            err[bad] = np.inf
        ok = err <= 1.0
        h_next = step_controller(err, ha, err_order, cfg, h_max)
        stuck = ~ok & (ha <= cfg.h_min)
        if np.any(stuck):
            cell = int(active[np.argmax(stuck)])
            raise StepSizeUnderflow(f"step size underflow in cell {cell} at t={t[cell]:.6g} s (h={h[cell]:.3g} s)")
        acc = active[ok]
        y[acc] = y_new[ok]
        t[acc] = np.where(last[ok], t_span, ta[ok] + ha[ok])
        h[active] = h_next
        active = active[~(ok & last)]
    raise RuntimeError(f"chemistry did not finish within {max_steps} steps")


def integrate_cell(state, params: MechanismParams, t_span: float, cfg: SolverConfig | None = None) -> SpeciesTriple:
    """Integrate one (NO, NO2, O3) state over ``t_span`` seconds."""
    return SpeciesTriple(*(float(v) for v in integrate_cells([state], params, t_span, cfg)[0]))
