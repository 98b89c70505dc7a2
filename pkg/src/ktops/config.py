"""Experiment configuration: a flat key=value text file plus CLI overrides.

Defaults reproduce the reference experiment: j=80, k1=k2=7.0, coupling
1e-4, coherent product initial state at (0.89, 0.63, 0.89, 0.63).
Every physics field is validated here before any run starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

__all__ = ["ExperimentConfig", "DEFAULTS", "load_config", "config_lines"]

# Raw string defaults, in documentation order. Units: angles in radians,
# times in kick periods, epsilon dimensionless.
DEFAULTS: dict[str, str] = {
    "j": "80",
    "k1": "7.0",
    "k2": "7.0",
    "epsilon": "1e-4",
    "theta1": "0.89",
    "phi1": "0.63",
    "theta2": "0.89",
    "phi2": "0.63",
    "steps": "200",
    "window": "100",
    "t_refs": "40,50,60,70",
    "tau_max": "30",
    "t_start": "",
    "t_end": "",
    "saturation_fraction": "0.3",
    "husimi_theta": "181",
    "husimi_phi": "361",
    "husimi_t": "15",
    "k_grid": "3,3.5,4,4.5,5,5.5,6,6.5,7,7.5,8,8.5,9,9.5,10",
    "n_init": "4",
    "init_select_k": "",
    "lyapunov_steps": "1000",
    "seed": "7",
    "samples": "25",
    "workers": "1",
}


@dataclass(frozen=True)
class ExperimentConfig:
    j: float
    k1: float
    k2: float
    epsilon: tuple[float, ...]
    theta1: float
    phi1: float
    theta2: float
    phi2: float
    steps: int
    window: int
    t_refs: tuple[int, ...]
    tau_max: int
    t_start: int | None
    t_end: int | None
    saturation_fraction: float
    husimi_theta: int
    husimi_phi: int
    husimi_t: int
    k_grid: tuple[float, ...]
    n_init: int
    init_select_k: float | None
    lyapunov_steps: int
    seed: int
    samples: int
    workers: int

    @property
    def angles(self) -> tuple[float, float, float, float]:
        return (self.theta1, self.phi1, self.theta2, self.phi2)


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _parse_float(key: str, raw: str) -> float:
    try:
        val = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if not math.isfinite(val):
        raise ConfigError(f"{key}: must be finite, got {raw!r}")
    return val


def _parse_list(key: str, raw: str, conv) -> tuple:
    return tuple(conv(key, part.strip()) for part in raw.split(",") if part.strip())


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read key=value lines; '#' starts a comment, blank lines ignored."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = text.split("=", 1)
        raw[key.strip()] = value.strip()
    return raw


def load_config(
    path: str | Path | None = None, overrides: list[str] | None = None
) -> ExperimentConfig:
    """Assemble the config from defaults, an optional file, and --set overrides."""
    raw = dict(DEFAULTS)
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config file not found: {path}")
        file_values = parse_config_file(path)
        unknown = set(file_values) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        raw.update(file_values)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key: {key}")
        raw[key] = value.strip()
    return _build(raw)


def _build(raw: dict[str, str]) -> ExperimentConfig:
    cfg = ExperimentConfig(
        j=_parse_float("j", raw["j"]),
        k1=_parse_float("k1", raw["k1"]),
        k2=_parse_float("k2", raw["k2"]),
        epsilon=_parse_list("epsilon", raw["epsilon"], _parse_float),
        theta1=_parse_float("theta1", raw["theta1"]),
        phi1=_parse_float("phi1", raw["phi1"]),
        theta2=_parse_float("theta2", raw["theta2"]),
        phi2=_parse_float("phi2", raw["phi2"]),
        steps=_parse_int("steps", raw["steps"]),
        window=_parse_int("window", raw["window"]),
        t_refs=_parse_list("t_refs", raw["t_refs"], _parse_int),
        tau_max=_parse_int("tau_max", raw["tau_max"]),
        t_start=_parse_int("t_start", raw["t_start"]) if raw["t_start"] else None,
        t_end=_parse_int("t_end", raw["t_end"]) if raw["t_end"] else None,
        saturation_fraction=_parse_float("saturation_fraction", raw["saturation_fraction"]),
        husimi_theta=_parse_int("husimi_theta", raw["husimi_theta"]),
        husimi_phi=_parse_int("husimi_phi", raw["husimi_phi"]),
        husimi_t=_parse_int("husimi_t", raw["husimi_t"]),
        k_grid=_parse_list("k_grid", raw["k_grid"], _parse_float),
        n_init=_parse_int("n_init", raw["n_init"]),
        init_select_k=(
            _parse_float("init_select_k", raw["init_select_k"])
            if raw["init_select_k"]
            else None
        ),
        lyapunov_steps=_parse_int("lyapunov_steps", raw["lyapunov_steps"]),
        seed=_parse_int("seed", raw["seed"]),
        samples=_parse_int("samples", raw["samples"]),
        workers=_parse_int("workers", raw["workers"]),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    twoj = 2.0 * cfg.j
    if twoj < 1 or abs(twoj - round(twoj)) > 1e-12:
        raise ConfigError(f"j must be a positive half-integer, got {cfg.j}")
    if not cfg.epsilon:
        raise ConfigError("epsilon must contain at least one value")
    for eps in cfg.epsilon:
        if eps < 0:
            raise ConfigError(f"epsilon must be >= 0, got {eps}")
    for name in ("theta1", "theta2"):
        theta = getattr(cfg, name)
        if not 0.0 <= theta <= math.pi:
            raise ConfigError(f"{name} must lie in [0, pi], got {theta}")
    if cfg.steps < 0:
        raise ConfigError(f"steps must be >= 0, got {cfg.steps}")
    if cfg.window < 1:
        raise ConfigError(f"window must be >= 1, got {cfg.window}")
    if not cfg.t_refs:
        raise ConfigError("t_refs must contain at least one reference step")
    for t_ref in cfg.t_refs:
        if not 0 <= t_ref < cfg.window:
            raise ConfigError(f"t_refs entries must lie in [0, window), got {t_ref}")
    if cfg.tau_max < 1:
        raise ConfigError(f"tau_max must be >= 1, got {cfg.tau_max}")
    if cfg.t_start is not None and cfg.t_start < 0:
        raise ConfigError(f"t_start must be >= 0, got {cfg.t_start}")
    if cfg.t_start is not None and cfg.t_end is not None and cfg.t_start >= cfg.t_end:
        raise ConfigError(f"need t_start < t_end, got [{cfg.t_start}, {cfg.t_end}]")
    if not 0.0 < cfg.saturation_fraction <= 1.0:
        raise ConfigError(
            f"saturation_fraction must lie in (0, 1], got {cfg.saturation_fraction}"
        )
    if cfg.husimi_theta < 2 or cfg.husimi_phi < 2:
        raise ConfigError("husimi grid sizes must be >= 2")
    if cfg.husimi_t < 0:
        raise ConfigError(f"husimi_t must be >= 0, got {cfg.husimi_t}")
    if not cfg.k_grid:
        raise ConfigError("k_grid must be nonempty")
    if cfg.n_init < 1:
        raise ConfigError(f"n_init must be >= 1, got {cfg.n_init}")
    if cfg.lyapunov_steps < 1000:
        raise ConfigError(f"lyapunov_steps must be >= 1000, got {cfg.lyapunov_steps}")
    if cfg.samples < 1:
        raise ConfigError(f"samples must be >= 1, got {cfg.samples}")
    if cfg.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {cfg.workers}")


def config_lines(cfg: ExperimentConfig) -> list[str]:
    """key=value echo of a config, in field order (manifest + logging)."""
    out = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            text = ""
        elif isinstance(value, tuple):
            text = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        out.append(f"config.{f.name} = {text}")
    return out
