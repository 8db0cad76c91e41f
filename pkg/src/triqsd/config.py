"""Run configuration: JSON schema, validation, and built-in presets.

Configs are nested JSON with a fixed key set; unknown keys are a hard error
so typos in physics parameters cannot pass silently.  A config round-trips
through ``to_dict`` / ``from_dict`` identically.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .ensemble import InitialStateSpec, UNIFORM_REFERENCE
from .errors import ConfigError, ValidationError
from .pulses import PulseSchedule, nested_udd_times, single_layer_udd

SCHEMA_VERSION = "triqsd-csv-v1"


@dataclass(frozen=True)
class ScheduleConfig:
    outer: int = 0
    inner: int = 0
    include_boundary_intervals: bool = False

    def build(self, total_time: float) -> PulseSchedule:
        if self.outer == 0:
            if self.inner != 0:
                raise ValidationError("inner pulses require at least one outer pulse")
            return single_layer_udd(0, total_time)
        if self.inner == 0 and not self.include_boundary_intervals:
            return single_layer_udd(self.outer, total_time)
        return nested_udd_times(
            self.outer, self.inner, total_time, self.include_boundary_intervals
        )


@dataclass(frozen=True)
class InitialConfig:
    kind: str = "pure"
    amplitudes: tuple = ((1.0, 0.0), (1.0, 0.0), (1.0, 0.0))
    mixing: float = 1.0
    reference: tuple = tuple((float(x.real), 0.0) for x in UNIFORM_REFERENCE)

    def build(self) -> InitialStateSpec:
        if self.kind == "pure":
            amp = np.array([complex(re, im) for re, im in self.amplitudes])
            norm = np.linalg.norm(amp)
            if norm == 0:
                raise ValidationError("pure amplitudes must not be all zero")
            return InitialStateSpec.pure(amp / norm)
        if self.kind == "werner":
            ref = np.array([complex(re, im) for re, im in self.reference])
            norm = np.linalg.norm(ref)
            if norm == 0:
                raise ValidationError("reference state must not be all zero")
            return InitialStateSpec.werner(self.mixing, ref / norm)
        raise ValidationError("unknown initial state kind %r" % (self.kind,))


@dataclass(frozen=True)
class RunConfig:
    model: str = "dephasing"
    omega: float = 1.0
    gamma: float = 1.0
    total_time: float = 5.0
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    n_traj: int = 2000
    master_seed: int = 2026
    steps_per_segment: int = 20
    max_step: float | None = None
    output_times: int = 200
    fidelity_convention: str = "squared"
    frame: str = "toggling"
    deterministic: bool = False
    chunk_size: int = 256
    stderr_blocks: int = 50
    write_oracle: str = "auto"  # auto | always | never (analytic oracle, dephasing only)
    dump_noise: int = 0
    dump_coefficients: bool = False
    run_name: str = "run"

    def validate(self) -> None:
        if self.model not in ("dephasing", "dissipative"):
            raise ValidationError("model must be 'dephasing' or 'dissipative'")
        if self.omega != self.omega:  # NaN guard
            raise ValidationError("omega must be a number")
        if self.gamma <= 0:
            raise ValidationError("gamma must be positive")
        if self.total_time <= 0:
            raise ValidationError("total_time must be positive")
        if self.n_traj < 2:
            raise ValidationError("n_traj must be at least 2")
        if self.master_seed < 0:
            raise ValidationError("master_seed must be non-negative")
        if self.steps_per_segment < 1:
            raise ValidationError("steps_per_segment must be >= 1")
        if self.max_step is not None and self.max_step <= 0:
            raise ValidationError("max_step must be positive when given")
        if self.output_times < 2:
            raise ValidationError("output_times must be at least 2")
        if self.fidelity_convention not in ("squared", "linear"):
            raise ValidationError("fidelity_convention must be 'squared' or 'linear'")
        if self.frame not in ("toggling", "lab"):
            raise ValidationError("frame must be 'toggling' or 'lab'")
        if self.chunk_size < 1:
            raise ValidationError("chunk_size must be >= 1")
        if self.stderr_blocks < 2:
            raise ValidationError("stderr_blocks must be >= 2")
        if self.write_oracle not in ("auto", "always", "never"):
            raise ValidationError("write_oracle must be auto, always or never")
        if self.dump_noise < 0:
            raise ValidationError("dump_noise must be >= 0")
        if self.schedule.outer < 0 or self.schedule.inner < 0:
            raise ValidationError("pulse counts must be non-negative")
        self.initial.build()
        self.schedule.build(self.total_time)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "omega": self.omega,
            "gamma": self.gamma,
            "total_time": self.total_time,
            "schedule": {
                "outer": self.schedule.outer,
                "inner": self.schedule.inner,
                "include_boundary_intervals": self.schedule.include_boundary_intervals,
            },
            "initial": self._initial_dict(),
            "n_traj": self.n_traj,
            "master_seed": self.master_seed,
            "steps_per_segment": self.steps_per_segment,
            "max_step": self.max_step,
            "output_times": self.output_times,
            "fidelity_convention": self.fidelity_convention,
            "frame": self.frame,
            "deterministic": self.deterministic,
            "chunk_size": self.chunk_size,
            "stderr_blocks": self.stderr_blocks,
            "write_oracle": self.write_oracle,
            "dump_noise": self.dump_noise,
            "dump_coefficients": self.dump_coefficients,
            "run_name": self.run_name,
        }

    def _initial_dict(self) -> dict:
        if self.initial.kind == "pure":
            return {
                "kind": "pure",
                "amplitudes": [list(pair) for pair in self.initial.amplitudes],
            }
        return {
            "kind": "werner",
            "mixing": self.initial.mixing,
            "reference": [list(pair) for pair in self.initial.reference],
        }

    def to_json(self, compact: bool = False) -> str:
        if compact:
            return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


_SCHEDULE_KEYS = {"outer", "inner", "include_boundary_intervals"}
_INITIAL_KEYS = {"kind", "amplitudes", "mixing", "reference"}
_TOP_KEYS = {
    "model",
    "omega",
    "gamma",
    "total_time",
    "schedule",
    "initial",
    "n_traj",
    "master_seed",
    "steps_per_segment",
    "max_step",
    "output_times",
    "fidelity_convention",
    "frame",
    "deterministic",
    "chunk_size",
    "stderr_blocks",
    "write_oracle",
    "dump_noise",
    "dump_coefficients",
    "run_name",
}


def _reject_unknown(data: dict, allowed: set, where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError("unknown %s key(s): %s" % (where, ", ".join(sorted(unknown))))


def _pairs(raw, where: str) -> tuple:
    try:
        out = tuple((float(p[0]), float(p[1])) for p in raw)
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError("%s must be a list of [re, im] pairs" % where) from exc
    if len(out) != 3:
        raise ConfigError("%s must have exactly 3 entries" % where)
    return out


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown(data, _TOP_KEYS, "config")
    kwargs = {}
    if "schedule" in data:
        sd = data["schedule"]
        if not isinstance(sd, dict):
            raise ConfigError("schedule must be an object")
        _reject_unknown(sd, _SCHEDULE_KEYS, "schedule")
        kwargs["schedule"] = ScheduleConfig(
            outer=int(sd.get("outer", 0)),
            inner=int(sd.get("inner", 0)),
            include_boundary_intervals=bool(sd.get("include_boundary_intervals", False)),
        )
    if "initial" in data:
        idd = data["initial"]
        if not isinstance(idd, dict):
            raise ConfigError("initial must be an object")
        _reject_unknown(idd, _INITIAL_KEYS, "initial")
        kind = idd.get("kind", "pure")
        if kind == "pure":
            kwargs["initial"] = InitialConfig(
                kind="pure",
                amplitudes=_pairs(
                    idd.get("amplitudes", [[1, 0], [1, 0], [1, 0]]), "amplitudes"
                ),
            )
        elif kind == "werner":
            kwargs["initial"] = InitialConfig(
                kind="werner",
                mixing=float(idd.get("mixing", 1.0)),
                reference=_pairs(
                    idd.get(
                        "reference",
                        [[float(x.real), 0.0] for x in UNIFORM_REFERENCE],
                    ),
                    "reference",
                ),
            )
        else:
            raise ConfigError("initial.kind must be 'pure' or 'werner'")
    simple = {
        "model": str,
        "omega": float,
        "gamma": float,
        "total_time": float,
        "n_traj": int,
        "master_seed": int,
        "steps_per_segment": int,
        "output_times": int,
        "fidelity_convention": str,
        "frame": str,
        "deterministic": bool,
        "chunk_size": int,
        "stderr_blocks": int,
        "write_oracle": str,
        "dump_noise": int,
        "dump_coefficients": bool,
        "run_name": str,
    }
    for key, cast in simple.items():
        if key in data:
            try:
                kwargs[key] = cast(data[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError("config key %r has invalid value %r" % (key, data[key])) from exc
    if "max_step" in data:
        raw = data["max_step"]
        kwargs["max_step"] = None if raw is None else float(raw)
    return RunConfig(**kwargs)


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config file %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config file %s is not valid JSON: %s" % (path, exc)) from exc
    return config_from_dict(data)


def apply_overrides(config: RunConfig, pairs) -> RunConfig:
    """Apply dotted key=value overrides (values parsed as JSON fragments)."""
    data = config.to_dict()
    for item in pairs:
        if "=" not in item:
            raise ConfigError("override %r is not of the form key=value" % (item,))
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw  # bare strings allowed
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            if part not in node or not isinstance(node[part], dict):
                raise ConfigError("unknown config section %r in override %r" % (part, item))
            node = node[part]
        if parts[-1] not in node:
            raise ConfigError("unknown config key %r in override %r" % (parts[-1], item))
        node[parts[-1]] = value
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# Presets mirroring the published scenario families
# ---------------------------------------------------------------------------

_PSI0_PAIRS = tuple((1.0, 0.0) for _ in range(3))
_MIX_GRID = ((1.0 / 3.0, "m033"), (0.5, "m050"), (2.0 / 3.0, "m067"), (5.0 / 6.0, "m083"), (1.0, "m100"))


def _pure_uniform() -> InitialConfig:
    return InitialConfig(kind="pure", amplitudes=_PSI0_PAIRS)


def _werner(mix: float) -> InitialConfig:
    return InitialConfig(kind="werner", mixing=mix, reference=_PSI0_PAIRS)


def build_presets() -> dict:
    """Built-in scenarios; every preset fixes omega = 1 explicitly.

    The source figures publish no time axis, so the dephasing families use
    total_time = 5 and the dissipative families total_time = 2 (chosen so
    the uncontrolled runs visibly decay inside the window).
    """
    presets = {}

    def add(name, desc, **kw):
        presets[name] = (RunConfig(run_name=name, **kw), desc)

    for name, n_pulses in (("fig1a", 0), ("fig1b", 20), ("fig1c", 40)):
        add(
            name,
            "dephasing, %d-pulse sequence, gamma=1, uniform pure initial state" % n_pulses,
            model="dephasing",
            omega=1.0,
            gamma=1.0,
            total_time=5.0,
            schedule=ScheduleConfig(outer=n_pulses),
            initial=_pure_uniform(),
        )
    for g in (0.5, 1.0, 5.0, 10.0):
        add(
            "fig2_g%g" % g,
            "dephasing, 20 pulses, memory-rate sweep point gamma=%g" % g,
            model="dephasing",
            omega=1.0,
            gamma=g,
            total_time=5.0,
            schedule=ScheduleConfig(outer=20),
            initial=_pure_uniform(),
        )
    for mix, tag in _MIX_GRID:
        add(
            "fig3a_%s" % tag,
            "dephasing, no control, mixed initial state (mixing %.3f)" % mix,
            model="dephasing",
            omega=1.0,
            gamma=1.0,
            total_time=5.0,
            initial=_werner(mix),
        )
        add(
            "fig3b_%s" % tag,
            "dephasing, 10 pulses, mixed initial state (mixing %.3f)" % mix,
            model="dephasing",
            omega=1.0,
            gamma=1.0,
            total_time=5.0,
            schedule=ScheduleConfig(outer=10),
            initial=_werner(mix),
        )
    for name, n1, n2 in (("fig4a", 0, 0), ("fig4b", 10, 10), ("fig4c", 13, 2), ("fig4d", 5, 10)):
        add(
            name,
            "dissipative, nested sequence outer=%d inner=%d, gamma=1" % (n1, n2),
            model="dissipative",
            omega=1.0,
            gamma=1.0,
            total_time=2.0,
            schedule=ScheduleConfig(outer=n1, inner=n2),
            initial=_pure_uniform(),
        )
    for g in (1.0, 5.0, 20.0, 50.0):
        add(
            "fig5_g%g" % g,
            "dissipative, outer=20 inner=10, memory-rate sweep point gamma=%g" % g,
            model="dissipative",
            omega=1.0,
            gamma=g,
            total_time=2.0,
            schedule=ScheduleConfig(outer=20, inner=10),
            initial=_pure_uniform(),
        )
    for mix, tag in _MIX_GRID:
        add(
            "fig6a_%s" % tag,
            "dissipative, no control, mixed initial state (mixing %.3f)" % mix,
            model="dissipative",
            omega=1.0,
            gamma=1.0,
            total_time=2.0,
            initial=_werner(mix),
        )
        add(
            "fig6b_%s" % tag,
            "dissipative, outer=10 inner=10, mixed initial state (mixing %.3f)" % mix,
            model="dissipative",
            omega=1.0,
            gamma=1.0,
            total_time=2.0,
            schedule=ScheduleConfig(outer=10, inner=10),
            initial=_werner(mix),
        )
    return presets


def list_presets(prefix: str | None = None):
    """(name, description) pairs, optionally filtered by name prefix."""
    items = [(name, desc) for name, (cfg, desc) in sorted(build_presets().items())]
    if prefix:
        items = [(n, d) for n, d in items if n.startswith(prefix)]
    return items


def get_preset(name: str) -> RunConfig:
    presets = build_presets()
    if name not in presets:
        raise ValidationError(
            "unknown preset %r (try: %s ...)" % (name, ", ".join(sorted(presets)[:6]))
        )
    return presets[name][0]
