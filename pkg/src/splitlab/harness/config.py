"""Line-oriented ``key = value`` experiment files.

Example::

    # comments start with '#'
    mode = sweep
    u = 10 m/s
    length = 3000 km
    pulse = 720..1080 km
    horizon = 10 h
    dx = 22.5, 45, 90, 180, 360 km
    dt_split = 180, 360, 1800, 3600 s
    sequence = GodunovTC, GodunovCT
    reference = analytic

Lengths accept ``m``/``km``, times ``s``/``min``/``h``, velocities
``m/s``/``km/h``. A bare number is taken to be in SI units. Everything is
stored in SI after parsing.
"""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..advection import AdvectionConfig
from ..mechanism import MechanismParams
from ..splitting import Pulse, ScenarioConfig, SplittingSequence, parse_sequence
from ..stiffode import SolverConfig

PRESET_DIR = Path(__file__).resolve().parent.parent / "configs"

_UNITS = {
    "length": {"m": 1.0, "km": 1e3},
    "time": {"s": 1.0, "min": 60.0, "h": 3600.0},
    "velocity": {"m/s": 1.0, "km/h": 1e3 / 3600.0},
    "number": {},
}

# key -> (dimension, is_list)
_KEYS = {
    "mode": ("text", False),
    "name": ("text", False),
    "x_min": ("length", False),
    "length": ("length", False),
    "dx": ("length", True),
    "pulse": ("range", False),
    "amplitude": ("number", False),
    "u": ("velocity", False),
    "dt_internal": ("time", False),
    "boundary": ("text", False),
    "limiter": ("text", False),
    "horizon": ("time", False),
    "dt_split": ("time", True),
    "sequence": ("sequence", True),
    "reference": ("text", False),
    "k1": ("number", False),
    "k2": ("number", False),
    "epsilon": ("number", False),
    "rtol": ("number", False),
    "atol": ("number", False),
    "h_init": ("time", False),
    "h_min": ("time", False),
    "h_max": ("time", False),
    "safety": ("number", False),
    "method": ("text", False),
    "threshold": ("number", False),
    "max_rrms_mean": ("number", False),
    "min_rrms_mean": ("number", False),
    "max_mass_drift": ("number", False),
    # linear-theory runs
    "dim": ("int", False),
    "eps": ("number", True),
    "seed": ("int", False),
    "t_end": ("number", False),
    "dt_linear": ("number", True),
}

MODES = ("scenario", "sweep", "linear")


class ConfigError(ValueError):
    """Syntax or validation problem in an experiment file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Reference:
    """What a run is scored against: the analytic solution or another run at the same dx."""

    sequence: SplittingSequence | None = None
    dt_split: float | None = None

    @property
    def is_analytic(self) -> bool:
        return self.sequence is None

    def __str__(self):
        return "analytic" if self.is_analytic else f"{self.sequence}@{self.dt_split:g}s"

    @classmethod
    def parse(cls, text: str) -> "Reference":
        text = text.strip()
        if text.lower() == "analytic":
            return cls()
        m = re.fullmatch(r"(\w+)\s*@\s*(.+)", text)
        if not m:
            raise ValueError(f"reference must be 'analytic' or '<sequence> @ <dt>', got {text!r}")
        return cls(parse_sequence(m.group(1)), _quantity(m.group(2), "time"))


@dataclass(frozen=True)
class Assertions:
    max_rrms_mean: float | None = None
    min_rrms_mean: float | None = None
    max_mass_drift: float | None = None

    def violations(self, records) -> list[str]:
        out = []
        for r in records:
            if self.max_rrms_mean is not None and not r.rrms_mean <= self.max_rrms_mean:
                out.append(f"{r.key}: rrms_mean {r.rrms_mean:.4g} > {self.max_rrms_mean:g}")
            if self.min_rrms_mean is not None and not r.rrms_mean >= self.min_rrms_mean:
                out.append(f"{r.key}: rrms_mean {r.rrms_mean:.4g} < {self.min_rrms_mean:g}")
            if self.max_mass_drift is not None and not r.mass_drift <= self.max_mass_drift:
                out.append(f"{r.key}: mass_drift {r.mass_drift:.3g} > {self.max_mass_drift:g}")
        return out


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    dx_list: tuple[float, ...]
    dt_list: tuple[float, ...]
    sequences: tuple[SplittingSequence, ...]
    reference: Reference = field(default_factory=Reference)
    threshold: float = 1e-4
    assertions: Assertions = field(default_factory=Assertions)
    name: str = "sweep"

    def __post_init__(self):
        if not (self.dx_list and self.dt_list and self.sequences):
            raise ValueError("a sweep needs at least one dx, dt_split and sequence")
        for dx, dt, seq in self.triples():
            try:
                self.scenario(dx, dt, seq)
            except ValueError as exc:
                raise ValueError(f"invalid sweep point dx={dx:g} m, dt={dt:g} s, {seq}: {exc}") from None
        if not self.reference.is_analytic:
            for dx in self.dx_list:
                self.scenario(dx, self.reference.dt_split, self.reference.sequence)

    def triples(self):
        for dx in sorted(self.dx_list):
            for dt in sorted(self.dt_list):
                for seq in sorted(self.sequences, key=lambda s: s.value):
                    yield dx, dt, seq

    def scenario(self, dx: float, dt: float, seq) -> ScenarioConfig:
        return dataclasses.replace(self.base, dx=dx, dt_split=dt, sequence=parse_sequence(seq))


@dataclass(frozen=True)
class RunSpec:
    """A single scenario plus how to score it."""

    scenario: ScenarioConfig
    reference: Reference = field(default_factory=Reference)
    threshold: float = 1e-4
    assertions: Assertions = field(default_factory=Assertions)
    name: str = "scenario"

    def as_sweep(self) -> SweepSpec:
        s = self.scenario
        return SweepSpec(s, (s.dx,), (s.dt_split,), (s.sequence,), self.reference, self.threshold, self.assertions, self.name)


@dataclass(frozen=True)
class LinearSpec:
    dim: int = 3
    eps: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    seed: int = 0
    t_end: float = 1.0
    dt_linear: tuple[float, ...] = tuple(2.0**-k for k in range(5, 11))
    name: str = "linear"


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"not a number: {text!r}") from None


def _split_unit(text: str, dim: str) -> tuple[str, float]:
    text = text.strip()
    units = _UNITS[dim]
    for unit in sorted(units, key=len, reverse=True):
        if text.endswith(unit) and _looks_numeric(text[: -len(unit)]):
            return text[: -len(unit)].strip(), units[unit]
    if not _looks_numeric(text):
        raise ValueError(f"bad {dim} value {text!r}; allowed units: {', '.join(units) or 'none'}")
    return text, 1.0


def _looks_numeric(text: str) -> bool:
    return bool(re.fullmatch(r"\s*[-+0-9.eE, ]+\s*|\s*[-+0-9.eE ]+\.\.[-+0-9.eE ]+\s*", text))


def _quantity(text: str, dim: str) -> float:
    num, scale = _split_unit(text, dim)
    return _number(num) * scale


def _quantities(text: str, dim: str) -> list[float]:
    # a trailing unit applies to every item: "180, 360 s"
    num, scale = _split_unit(text, dim)
    items = [t for t in num.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return [_number(t) * scale for t in items]


def _convert(key: str, raw: str):
    dim, is_list = _KEYS[key]
    if dim == "text":
        return raw.strip()
    if dim == "int":
        v = _number(raw)
        if v != int(v):
            raise ValueError(f"{key} must be an integer")
        return int(v)
    if dim == "sequence":
        return [parse_sequence(t) for t in raw.split(",") if t.strip()]
    if dim == "range":
        num, scale = _split_unit(raw, "length")
        parts = num.split("..")
        if len(parts) != 2:
            raise ValueError(f"range must look like 'lo..hi km', got {raw!r}")
        return tuple(_number(p) * scale for p in parts)
    if is_list:
        return _quantities(raw, dim)
    return _quantity(raw, dim)


def parse_lines(text: str) -> dict[str, tuple[object, int]]:
    """Raw key -> (converted value, line number) mapping."""
    out: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        if not raw:
            raise ConfigError(f"empty value for {key!r}", lineno)
        try:
            out[key] = (_convert(key, raw), lineno)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", lineno) from None
    return out


def parse_config(text: str) -> RunSpec | SweepSpec | LinearSpec:
    """Parse and validate an experiment file.

    Returns a :class:`RunSpec` (``mode = scenario``, the default), a
    :class:`SweepSpec` or a :class:`LinearSpec`. Unit conversion happens
    here; defaults fill in the rest (``rtol = 1e-3``, ``dt_internal = 90 s``).
    """
    raw = parse_lines(text)
    values = {k: v for k, (v, _) in raw.items()}
    mode = values.pop("mode", "scenario")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}", raw["mode"][1])
    linear_keys = {"dim", "eps", "seed", "t_end", "dt_linear"}
    if mode == "linear":
        extra = set(values) - linear_keys - {"name"}
        if extra:
            k = min(extra, key=lambda k: raw[k][1])
            raise ConfigError(f"key {k!r} is not valid in linear mode", raw[k][1])
        kw = {k: tuple(v) if isinstance(v, list) else v for k, v in values.items()}
        return LinearSpec(**kw)
    bad = linear_keys & set(values)
    if bad:
        k = min(bad, key=lambda k: raw[k][1])
        raise ConfigError(f"key {k!r} is only valid in linear mode", raw[k][1])

    def one(key):
        v = values[key]
        if len(v) != 1:
            raise ConfigError(f"{key} takes a single value in scenario mode (use mode = sweep)", raw[key][1])
        return v[0]

    try:
        lo, hi = values.get("pulse", (Pulse.lo, Pulse.hi))
        pulse = Pulse(lo, hi, values.get("amplitude", Pulse.amplitude))
        adv = AdvectionConfig(
            u=values.get("u", AdvectionConfig.u),
            dt_internal=values.get("dt_internal", AdvectionConfig.dt_internal),
            boundary=values.get("boundary", AdvectionConfig.boundary),
            limiter=values.get("limiter", AdvectionConfig.limiter),
        )
        mech = MechanismParams(
            k1=values.get("k1", MechanismParams.k1),
            k2=values.get("k2", MechanismParams.k2),
            epsilon=values.get("epsilon", MechanismParams.epsilon),
        )
        solver_kw = {k: values[k] for k in ("rtol", "atol", "h_init", "h_min", "h_max", "safety", "method") if k in values}
        solver = SolverConfig(**solver_kw)
        reference = Reference.parse(values.get("reference", "analytic"))
        threshold = values.get("threshold", 1e-4)
        if not threshold > 0:
            raise ValueError("threshold must be positive")
        assertions = Assertions(
            values.get("max_rrms_mean"), values.get("min_rrms_mean"), values.get("max_mass_drift")
        )
        dx_list = values.get("dx", [180e3])
        dt_list = values.get("dt_split", [3600.0])
        seqs = values.get("sequence", [SplittingSequence.GODUNOV_TC])
        common = dict(
            horizon=values.get("horizon", 36000.0),
            x_min=values.get("x_min", 0.0),
            length=values.get("length", 3000e3),
            advection=adv,
            mechanism=mech,
            solver=solver,
            ic=pulse,
        )
        name = values.get("name", mode)
        if mode == "scenario":
            scenario = ScenarioConfig(dx=one("dx") if "dx" in values else dx_list[0],
                                      dt_split=one("dt_split") if "dt_split" in values else dt_list[0],
                                      sequence=one("sequence") if "sequence" in values else seqs[0],
                                      **common)
            spec = RunSpec(scenario, reference, threshold, assertions, name)
            spec.as_sweep()  # validates a named reference against this scenario
            return spec
        base = ScenarioConfig(dx=dx_list[0], dt_split=dt_list[0], sequence=seqs[0], **common)
        return SweepSpec(base, tuple(dx_list), tuple(dt_list), tuple(seqs), reference, threshold, assertions, name)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunSpec | SweepSpec | LinearSpec:
    """Read ``path``, falling back to the shipped presets by file name."""
    p = Path(path)
    if not p.exists():
        preset = PRESET_DIR / p.name
        if not preset.exists():
            preset = PRESET_DIR / f"{p.name}.cfg"
        if not preset.exists():
            raise FileNotFoundError(f"no such config file or preset: {path}")
        p = preset
    return parse_config(p.read_text(encoding="utf-8"))


def _fmt(x: float) -> str:
    return format(x, ".17g") if x != int(x) or abs(x) >= 1e15 else str(int(x))


def _length(x: float) -> str:
    return f"{_fmt(x / 1e3)} km"


def _time(x: float) -> str:
    return f"{_fmt(x)} s"


def format_config(spec: RunSpec | SweepSpec) -> str:
    """Render a parsed spec back into the file format (km for lengths, s for times)."""
    if isinstance(spec, RunSpec):
        s = spec.scenario
        mode, dxs, dts, seqs = "scenario", [s.dx], [s.dt_split], [s.sequence]
    else:
        s = spec.base
        mode, dxs, dts, seqs = "sweep", spec.dx_list, spec.dt_list, spec.sequences
    lines = [
        f"mode = {mode}",
        f"name = {spec.name}",
        f"x_min = {_length(s.x_min)}",
        f"length = {_length(s.length)}",
        f"dx = {', '.join(_fmt(d / 1e3) for d in dxs)} km",
        f"pulse = {_fmt(s.ic.lo / 1e3)}..{_fmt(s.ic.hi / 1e3)} km",
        f"amplitude = {_fmt(s.ic.amplitude)}",
        f"u = {_fmt(s.advection.u)} m/s",
        f"dt_internal = {_time(s.advection.dt_internal)}",
        f"boundary = {s.advection.boundary}",
        f"limiter = {s.advection.limiter}",
        f"horizon = {_time(s.horizon)}",
        f"dt_split = {', '.join(_fmt(d) for d in dts)} s",
        f"sequence = {', '.join(str(q) for q in seqs)}",
        f"reference = {spec.reference}",
        f"k1 = {_fmt(s.mechanism.k1)}",
        f"k2 = {_fmt(s.mechanism.k2)}",
        f"epsilon = {_fmt(s.mechanism.epsilon)}",
        f"rtol = {_fmt(s.solver.rtol)}",
        f"atol = {_fmt(s.solver.atol)}",
        f"h_init = {_time(s.solver.h_init)}",
        f"h_min = {_time(s.solver.h_min)}",
    ]
    if s.solver.h_max is not None:
        lines.append(f"h_max = {_time(s.solver.h_max)}")
    lines += [
        f"safety = {_fmt(s.solver.safety)}",
        f"method = {s.solver.method}",
        f"threshold = {_fmt(spec.threshold)}",
    ]
    for key in ("max_rrms_mean", "min_rrms_mean", "max_mass_drift"):
        v = getattr(spec.assertions, key)
        if v is not None:
            lines.append(f"{key} = {_fmt(v)}")
    return "\n".join(lines) + "\n"
