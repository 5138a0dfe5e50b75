"""Error measures between two runs, order fits, numerical diffusion."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .advection import Field1D

DEFAULT_THRESHOLD = 1e-4


class EmptyRegionWarning(UserWarning):
    """No reference cell exceeded the threshold for some species."""


@dataclass(frozen=True)
class RRMSConfig:
    threshold_a: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not self.threshold_a > 0:
            raise ValueError(f"threshold must be positive, got {self.threshold_a}")


@dataclass(frozen=True)
class ConvergenceEstimate:
    order: float
    constant: float
    residual: float


def _values(f) -> np.ndarray:
    return f.values if isinstance(f, Field1D) else np.asarray(f, dtype=float)


def _check_pair(ref, test):
    if isinstance(ref, Field1D) and isinstance(test, Field1D) and ref.grid != test.grid:
        raise ValueError(f"grid mismatch: {ref.grid} vs {test.grid}")
    a, b = _values(ref), _values(test)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def rrms(ref, test, cfg: RRMSConfig | None = None) -> float:
    """Relative RMS difference of ``test`` from ``ref`` over cells where ``ref > a``.

    ``ref`` and ``test`` are a single species each (Field1D with one
    column, or 1D arrays). The reference alone picks the cells and
    normalises, so the measure is not symmetric. Returns NaN when no cell
    exceeds the threshold; callers must treat that as "no data", not zero.
    """
    cfg = cfg or RRMSConfig()
    a, b = _check_pair(ref, test)
    a, b = a.ravel(), b.ravel()
    omega = a > cfg.threshold_a
    if not omega.any():
        return math.nan
    rel = (a[omega] - b[omega]) / a[omega]
    return float(np.sqrt(np.mean(rel * rel)))


def rrms_species(ref, test, cfg: RRMSConfig | None = None) -> np.ndarray:
    """Per-species :func:`rrms` for ``(n_cells, n_species)`` fields."""
    a, b = _check_pair(ref, test)
    return np.array([rrms(a[:, i], b[:, i], cfg) for i in range(a.shape[1])])


def rrms_species_mean(values: Iterable[float]) -> float:
    """Mean over species, skipping species whose threshold region was empty."""
    v = np.asarray(list(values), dtype=float)
    ok = np.isfinite(v)
    if not ok.any():
        raise ValueError("every species has an empty threshold region")
    if not ok.all():
        warnings.warn(f"{int((~ok).sum())} species skipped: empty threshold region", EmptyRegionWarning, stacklevel=2)
    return float(v[ok].mean())


def l2_error(ref, test, dx: float | None = None) -> np.ndarray | float:
    """``sqrt(sum((ref - test)**2) * dx)`` per species column.

    With Field1D inputs ``dx`` comes from the (shared) grid. A 1D input
    gives a scalar.
    """
    a, b = _check_pair(ref, test)
    if dx is None:
        if not isinstance(ref, Field1D):
            raise ValueError("dx is required for plain arrays")
        dx = ref.grid.dx
    out = np.sqrt(np.sum((a - b) ** 2, axis=0) * dx)
    return float(out) if np.ndim(out) == 0 else out


def fit_order(points: Sequence[tuple[float, float]]) -> ConvergenceEstimate:
    """Least-squares fit of ``error = constant * h**order`` in log-log space."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("need at least 3 (h, error) points")
    h, e = pts[:, 0], pts[:, 1]
    if np.any(h <= 0) or np.any(e <= 0):
        raise ValueError("step sizes and errors must be positive")
    x, y = np.log(h), np.log(e)
    design = np.column_stack([x, np.ones_like(x)])
    (slope, icpt), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([slope, icpt])
    return ConvergenceEstimate(float(slope), float(math.exp(icpt)), float(np.sqrt(np.mean(resid**2))))


def numerical_diffusion_estimate(u: float, dx: float) -> float:
    """First-order estimate ``u * dx`` (m^2/s) of an upwind-like scheme's smearing."""
    if u < 0 or dx <= 0:
        raise ValueError(f"need u >= 0 and dx > 0, got u={u}, dx={dx}")
    return u * dx
