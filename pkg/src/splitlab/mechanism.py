"""Three-species NO / NO2 / O3 photostationary mechanism.

Reactions::

    NO + O3  --k1-->  NO2
    NO2      --k2-->  NO + O3

Concentrations are dimensionless. Species are always ordered (NO, NO2, O3),
both in :class:`SpeciesTriple` and in the trailing axis of state arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .advection import Field1D, Grid1D, step_mask

SPECIES = ("NO", "NO2", "O3")

# any t >= guard_factor / min(k1, k2) counts as chemically equilibrated
STEADY_GUARD_FACTOR = 100.0


class SpeciesTriple(NamedTuple):
    no: float
    no2: float
    o3: float


class LumpedPair(NamedTuple):
    nox: float
    ox: float


@dataclass(frozen=True)
class MechanismParams:
    """Rate constants of the mechanism.

    ``epsilon`` is the chemistry/transport stiffness ratio. It is carried for
    bookkeeping only; the integrators consume ``k1`` and ``k2`` directly.
    """

    k1: float = 1000.0
    k2: float = 2000.0
    epsilon: float = 1e-2

    def __post_init__(self):
        if not (self.k1 > 0 and self.k2 > 0):
            raise ValueError(f"rate constants must be positive, got k1={self.k1}, k2={self.k2}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def ratio(self) -> float:
        """k2 / k1, the constant of the steady-state quadratic."""
        return self.k2 / self.k1


def chem_rhs(state, params: MechanismParams) -> np.ndarray:
    """Time derivatives of (NO, NO2, O3).

    ``state`` may be a single triple or an ``(..., 3)`` array; the result
    has the same shape. The NO and O3 rates are the same number, and the
    NO2 rate is its exact negation, so NOx and Ox are conserved bit-exactly.
    """
    y = np.asarray(state, dtype=float)
    w = params.k2 * y[..., 1] - params.k1 * y[..., 0] * y[..., 2]
    return np.stack([w, -w, w], axis=-1)


def chem_jacobian(state, params: MechanismParams) -> np.ndarray:
    """Analytic Jacobian of :func:`chem_rhs`, shape ``(..., 3, 3)``."""
    y = np.asarray(state, dtype=float)
    dw_dno = -params.k1 * y[..., 2]
    dw_dno2 = np.full_like(dw_dno, params.k2)
    dw_do3 = -params.k1 * y[..., 0]
    row = np.stack([dw_dno, dw_dno2, dw_do3], axis=-1)
    return np.stack([row, -row, row], axis=-2)


def lumped(state) -> LumpedPair:
    no, no2, o3 = (float(c) for c in state)
    return LumpedPair(no + no2, o3 + no2)


def chi(state, params: MechanismParams) -> float:
    """Net forward rate k1*NO*O3 - k2*NO2; zero at chemical equilibrium."""
    no, no2, o3 = (float(c) for c in state)
    return params.k1 * no * o3 - params.k2 * no2


def steady_state(ic: LumpedPair, params: MechanismParams | None = None) -> SpeciesTriple:
    """Chemical equilibrium reached from lumped amounts ``ic``.

    Solves ``(NOx - (Ox - O3)) * O3 - r * (Ox - O3) = 0`` with ``r = k2/k1``
    for its non-negative root. The default rates give r = 2.
    """
    params = params or MechanismParams()
    nox, ox = float(ic[0]), float(ic[1])
    if nox < 0 or ox < 0:
        raise ValueError(f"lumped concentrations must be non-negative, got NOx={nox}, Ox={ox}")
    r = params.ratio
    b = r + nox - ox
    disc = math.sqrt(b * b + 4.0 * r * ox)
    # the textbook root -b/2 + disc/2 cancels catastrophically for b >> 0
    if b > 0:
        o3 = 2.0 * r * ox / (b + disc)
    else:
        o3 = 0.5 * (disc - b)
    o3 = min(max(o3, 0.0), ox)
    no2 = ox - o3
    no = max(nox - no2, 0.0)
    return SpeciesTriple(no, no2, o3)


def steady_state_residual(ic: LumpedPair, o3: float, params: MechanismParams | None = None) -> float:
    """Left side of the equilibrium quadratic evaluated at ``o3``."""
    params = params or MechanismParams()
    nox, ox = ic
    return (nox - (ox - o3)) * o3 - params.ratio * (ox - o3)


def analytic_reference(
    t: float,
    grid: Grid1D,
    pulse: tuple[float, float],
    u: float,
    params: MechanismParams | None = None,
    amplitude: float = 1.0,
    guard_factor: float = STEADY_GUARD_FACTOR,
) -> Field1D:
    """Exact solution at time ``t`` for an equal-species step release.

    All three species start at ``amplitude`` on ``pulse = (lo, hi)`` (m).
    Once chemistry has equilibrated the plume is the steady state carried
    rigidly downstream by ``u * t``, sampled at cell centres.

    Times shorter than ``guard_factor / min(k1, k2)`` are rejected because
    the equilibrium assumption does not yet hold there.
    """
    params = params or MechanismParams()
    t_min = guard_factor / min(params.k1, params.k2)
    if not t >= t_min:
        raise ValueError(f"t={t} s is too short for chemical equilibrium (need t >= {t_min} s)")
    eq = steady_state(LumpedPair(2.0 * amplitude, 2.0 * amplitude), params)
    mask = step_mask(grid.centers - u * t, *pulse)
    return Field1D(grid, np.outer(mask, np.asarray(eq, dtype=float)))


def transported_pulse(t: float, grid: Grid1D, pulse: tuple[float, float], u: float, amplitude: float = 1.0) -> Field1D:
    """Exact chemistry-free solution: every species is the shifted step."""
    mask = step_mask(grid.centers - u * t, *pulse)
    return Field1D(grid, np.outer(mask, np.full(3, float(amplitude))))
