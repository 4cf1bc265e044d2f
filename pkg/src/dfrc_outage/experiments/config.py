"""Scenario and sweep configuration, read from and written to JSON.

Angles are given in degrees and SINR thresholds in dB inside the files; the
in-memory objects hold radians and linear values.
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace

from ..array_model import UlaConfig
from ..channel_model import UserSpec, db_to_linear, linear_to_db
from ..metrics import RadarSettings
from ..sdp import SolverSettings

SCHEMA_VERSION = 1
DEFAULT_NOISE_VAR = 0.2
DEFAULT_MC_TRIALS = 1000
DEFAULT_TRIALS_PER_POINT = 200

SWEEP_PARAMETERS = ("gamma_db", "outage_p", "n_antennas", "n_users", "theta0_deg")
SWEEP_OUTPUTS = ("sum_rate", "avg_rate_per_user", "max_outage", "ismr_inv_db", "p_detect",
                 "min_rate", "max_defect")


class ConfigError(ValueError):
    pass


def _take(d, key, kind, default=None, where="config"):
    if key not in d:
        if default is None:
            raise ConfigError(f"{where}: missing required key {key!r}")
        return default
    value = d[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{where}: {key!r} must be {kind.__name__}, got {value!r}")
    return value


def _no_extra(d, allowed, where):
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")


@dataclass(frozen=True)
class ScenarioConfig:
    array: UlaConfig
    theta0: float
    users: tuple
    noise_var: float = DEFAULT_NOISE_VAR
    power_budget: float = 1.0
    settings: SolverSettings = field(default_factory=SolverSettings)
    seed: int = 0
    mc_trials: int = DEFAULT_MC_TRIALS
    radar: RadarSettings = field(default_factory=RadarSettings)

    def __post_init__(self):
        if not self.users:
            raise ConfigError("at least one user is required")
        if not abs(self.theta0) <= math.pi / 2:
            raise ConfigError("theta0 must lie in [-90, 90] degrees")
        if not self.noise_var > 0:
            raise ConfigError("noise_var must be positive")
        if not self.power_budget > 0:
            raise ConfigError("power_budget must be positive")
        if self.mc_trials < 1:
            raise ConfigError("mc_trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "users", tuple(self.users))

    @property
    def n_users(self):
        return len(self.users)

    @classmethod
    def uniform(cls, n_antennas, n_users, gamma_db, outage_p, theta0_deg, sigma_delta=0.1, **kw):
        """K identical users, the layout used by every experiment."""
        user = UserSpec(float(db_to_linear(gamma_db)), outage_p, sigma_delta)
        return cls(UlaConfig(n_antennas), math.radians(theta0_deg), (user,) * n_users, **kw)

    def with_param(self, name, value):
        """Copy with one sweep parameter changed (applied to every user where relevant)."""
        if name == "gamma_db":
            users = [replace(u, gamma=float(db_to_linear(value))) for u in self.users]
            return replace(self, users=tuple(users))
        if name == "outage_p":
            return replace(self, users=tuple(replace(u, outage_p=float(value)) for u in self.users))
        if name == "n_antennas":
            return replace(self, array=replace(self.array, n_antennas=int(value)))
        if name == "n_users":
            if int(value) != value or value < 1:
                raise ConfigError("n_users must be a positive integer")
            return replace(self, users=(self.users[0],) * int(value))
        if name == "theta0_deg":
            return replace(self, theta0=math.radians(value))
        raise ConfigError(f"unknown sweep parameter {name!r}; choose from {SWEEP_PARAMETERS}")

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "array": {"n_antennas": self.array.n_antennas, "spacing": self.array.spacing},
            "theta0_deg": round(math.degrees(self.theta0), 12),
            "users": [
                {"gamma_db": round(float(linear_to_db(u.gamma)), 12), "outage_p": u.outage_p,
                 "sigma_delta": u.sigma_delta}
                for u in self.users
            ],
            "noise_var": self.noise_var,
            "power_budget": self.power_budget,
            "seed": self.seed,
            "mc_trials": self.mc_trials,
            "solver": asdict(self.settings),
            "radar": {
                "mainlobe_width_deg": round(math.degrees(self.radar.mainlobe_width), 12),
                "snr_r_db": self.radar.snr_r_db,
                "p_fa": self.radar.p_fa,
                "quad_points": self.radar.quad_points,
            },
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self):
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        _no_extra(d, ("schema_version", "array", "theta0_deg", "users", "noise_var", "power_budget",
                      "seed", "mc_trials", "solver", "radar"), "config")
        version = _take(d, "schema_version", int)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version}; expected {SCHEMA_VERSION}")
        try:
            arr = _take(d, "array", dict)
            _no_extra(arr, ("n_antennas", "spacing"), "array")
            array = UlaConfig(_take(arr, "n_antennas", int, where="array"),
                              _take(arr, "spacing", float, 0.5, where="array"))
            users = cls._users_from(d.get("users"))
            solver = _take(d, "solver", dict, {})
            _no_extra(solver, SolverSettings.__dataclass_fields__, "solver")
            radar_d = _take(d, "radar", dict, {})
            _no_extra(radar_d, ("mainlobe_width_deg", "snr_r_db", "p_fa", "quad_points"), "radar")
            radar = RadarSettings(
                mainlobe_width=math.radians(_take(radar_d, "mainlobe_width_deg", float, 20.0, "radar")),
                snr_r_db=_take(radar_d, "snr_r_db", float, 1.0, "radar"),
                p_fa=_take(radar_d, "p_fa", float, 1e-4, "radar"),
                quad_points=_take(radar_d, "quad_points", int, 256, "radar"),
            )
            return cls(
                array=array,
                theta0=math.radians(_take(d, "theta0_deg", float)),
                users=users,
                noise_var=_take(d, "noise_var", float, DEFAULT_NOISE_VAR),
                power_budget=_take(d, "power_budget", float, 1.0),
                settings=SolverSettings(**solver),
                seed=_take(d, "seed", int, 0),
                mc_trials=_take(d, "mc_trials", int, DEFAULT_MC_TRIALS),
                radar=radar,
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @staticmethod
    def _users_from(spec):
        """Either a list of per-user objects or one object with a ``count``."""
        keys = ("gamma_db", "outage_p", "sigma_delta")

        def one(u, where):
            if not isinstance(u, dict):
                raise ConfigError(f"{where} must be an object")
            _no_extra(u, keys + ("count",), where)
            return UserSpec(float(db_to_linear(_take(u, "gamma_db", float, where=where))),
                            _take(u, "outage_p", float, where=where),
                            _take(u, "sigma_delta", float, 0.1, where=where))

        if isinstance(spec, list):
            if not spec:
                raise ConfigError("users: list is empty")
            return tuple(one(u, f"users[{i}]") for i, u in enumerate(spec))
        if isinstance(spec, dict):
            count = _take(spec, "count", int, where="users")
            if count < 1:
                raise ConfigError("users: count must be at least 1")
            return (one(spec, "users"),) * count
        raise ConfigError("users must be a list or an object with a count")

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        return cls.from_json(text)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    trials_per_point: int = DEFAULT_TRIALS_PER_POINT
    outputs: tuple = ("sum_rate",)

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"unknown sweep parameter {self.parameter!r}; choose from {SWEEP_PARAMETERS}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        if self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be at least 1")
        bad = set(self.outputs) - set(SWEEP_OUTPUTS)
        if bad:
            raise ConfigError(f"unknown outputs {sorted(bad)}; choose from {SWEEP_OUTPUTS}")
        for v in self.values:
            if self.parameter == "outage_p" and not 0 < v < 1:
                raise ConfigError("outage_p values must lie in (0, 1)")
            if self.parameter in ("n_antennas", "n_users") and (int(v) != v or v < 1):
                raise ConfigError(f"{self.parameter} values must be positive integers")
            if self.parameter == "theta0_deg" and not -90 <= v <= 90:
                raise ConfigError("theta0_deg values must lie in [-90, 90]")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "outputs", tuple(self.outputs))
