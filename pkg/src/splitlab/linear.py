"""Splitting errors for linear systems ``dv/dt = A v + B v``.

Every sub-flow is an exact matrix exponential here, so any difference from
``exp((A + B) t) v0`` is pure splitting error.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .metrics import fit_order

# scale until ||M t|| / 2**s <= 1/16, then sum this many Taylor terms;
# the truncation remainder is below 1e-17 relative at that norm
_SCALED_NORM = 2.0**-4
_TAYLOR_TERMS = 12


class LinearSequence(str, enum.Enum):
    GODUNOV_AB = "AB"  # exp(A dt) first, then exp(B dt)
    GODUNOV_BA = "BA"
    STRANG_AVG = "StrangAvg"  # average of the two Godunov results, every step

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LinearSystem:
    a: np.ndarray
    b: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        a, b, v0 = (np.asarray(m, dtype=float) for m in (self.a, self.b, self.v0))
        n = v0.shape[0] if v0.ndim == 1 else -1
        if a.shape != (n, n) or b.shape != (n, n):
            raise ValueError(f"dimension mismatch: A{a.shape}, B{b.shape}, v0{v0.shape}")
        if not 2 <= n <= 16:
            raise ValueError(f"dimension {n} outside 2..16")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "v0", v0)

    @property
    def commutator(self) -> np.ndarray:
        return self.a @ self.b - self.b @ self.a


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    norm = np.linalg.norm(m, 1)
    s = 0 if norm <= _SCALED_NORM else int(math.ceil(math.log2(norm / _SCALED_NORM)))
    # each squaring doubles the relative round-off, so the series and the
    # squarings run in extended precision where the platform provides it
    x = m.astype(np.longdouble) / 2**s
    eye = np.eye(m.shape[0], dtype=np.longdouble)
    # Horner form of sum_k x^k / k!
    out = eye.copy()
    for k in range(_TAYLOR_TERMS, 0, -1):
        out = eye + (x @ out) / k
    for _ in range(s):
        out = out @ out
    return out.astype(float)


def expm_apply(m: np.ndarray, t: float, v: np.ndarray) -> np.ndarray:
    """``exp(m t) v``."""
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    if m.shape != (v.shape[0], v.shape[0]):
        raise ValueError(f"dimension mismatch: {m.shape} vs {v.shape}")
    return expm(m * t) @ v


def exact_solution(sys: LinearSystem, t: float) -> np.ndarray:
    return expm_apply(sys.a + sys.b, t, sys.v0)


def step_matrix(sys: LinearSystem, dt: float, sequence) -> np.ndarray:
    """Propagator of one splitting step."""
    sequence = LinearSequence(sequence)
    ea, eb = expm(sys.a * dt), expm(sys.b * dt)
    if sequence is LinearSequence.GODUNOV_AB:
        return eb @ ea
    if sequence is LinearSequence.GODUNOV_BA:
        return ea @ eb
    return 0.5 * (eb @ ea + ea @ eb)


def split_solve_linear(sys: LinearSystem, dt: float, n_steps: int, sequence) -> np.ndarray:
    """State after ``n_steps`` splitting steps of size ``dt``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    p = step_matrix(sys, dt, sequence)
    v = sys.v0.copy()
    for _ in range(n_steps):
        v = p @ v
    return v


def commutator_local_error(sys: LinearSystem, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """One-step A-then-B error, measured and as predicted by ``[A, B] dt**2 v0 / 2``."""
    measured = exact_solution(sys, dt) - split_solve_linear(sys, dt, 1, LinearSequence.GODUNOV_AB)
    predicted = 0.5 * sys.commutator @ sys.v0 * dt**2
    return measured, predicted


def global_error(sys: LinearSystem, t_end: float, n_steps: int, sequence) -> float:
    dt = t_end / n_steps
    return float(np.linalg.norm(exact_solution(sys, t_end) - split_solve_linear(sys, dt, n_steps, sequence)))


def observed_order(dts, errors) -> float:
    """Log-log slope of error against step size; zero errors are dropped."""
    pts = [(h, e) for h, e in zip(dts, errors) if e > 0]
    if len(pts) < 2:
        raise ValueError("need at least two non-zero errors to estimate an order")
    if len(pts) == 2:
        (h0, e0), (h1, e1) = pts
        return math.log(e1 / e0) / math.log(h1 / h0)
    return fit_order(pts).order


def stiff_system(chi: np.ndarray, transport: np.ndarray, v0: np.ndarray, eps: float) -> LinearSystem:
    """Singularly perturbed pair with fast operator ``chi / eps`` and slow ``transport``."""
    return LinearSystem(np.asarray(chi, dtype=float) / eps, transport, v0)


def random_pair(rng: np.random.Generator, n: int = 3, norm: float = 1.0, commuting: bool = False) -> LinearSystem:
    """Random ``n x n`` pair scaled to spectral norm ``norm``.

    With ``commuting=True`` both matrices are diagonal in one random basis.
    """
    if commuting:
        q = rng.normal(size=(n, n)) + n * np.eye(n)
        q_inv = np.linalg.inv(q)
        a = q @ np.diag(rng.uniform(-1, 1, n)) @ q_inv
        b = q @ np.diag(rng.uniform(-1, 1, n)) @ q_inv
    else:
        a, b = rng.normal(size=(n, n)), rng.normal(size=(n, n))
    a *= norm / np.linalg.norm(a, 2)
    b *= norm / np.linalg.norm(b, 2)
    v0 = rng.normal(size=n)
    return LinearSystem(a, b, v0 / np.linalg.norm(v0))


NILPOTENT_PAIR = LinearSystem(
    np.array([[0.0, 1.0], [0.0, 0.0]]),
    np.array([[0.0, 0.0], [1.0, 0.0]]),
    np.array([1.0, 0.0]),
)

# fast operator with a one-dimensional slow manifold, and a rotation as the slow operator
STIFF_CHI = np.array([[-1.0, 2.0], [1.0, -2.0]])
STIFF_T = np.array([[0.0, 1.0], [-1.0, 0.0]])


def stiff_scaling(eps_list, dt: float = 1e-6, t_end: float = 1e-4, chi=STIFF_CHI, transport=STIFF_T, v0=(1.0, 0.0)) -> np.ndarray:
    """Godunov (fast operator first) global errors for each stiffness ``eps``.

    The defaults keep ``dt`` and ``t_end`` well below every ``eps`` in
    (1e-3, 1e-1), the asymptotic regime where the error grows like ``dt / eps``.
    """
    n = int(round(t_end / dt))
    return np.array([
        global_error(stiff_system(chi, transport, np.asarray(v0, dtype=float), eps), t_end, n, LinearSequence.GODUNOV_AB)
        for eps in eps_list
    ])
