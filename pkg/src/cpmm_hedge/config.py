"""Run configuration: defaults, flat ``key = value`` config files, env fallback."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "CPMM_HEDGE_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    grid_n: int = 2000
    spacing: str = "geometric"
    k_min_factor: float = 50.0
    k_max_factor: float = 50.0
    eval_n: int = 200
    il_n: int = 1001
    oracle_n: int = 10_000
    cert_eps_rel: float = 1e-9

    def validate(self) -> RunConfig:
        if self.spacing not in ("uniform", "geometric"):
            raise ConfigError(f"spacing must be uniform or geometric, got {self.spacing!r}")
        for name in ("grid_n", "eval_n", "il_n", "oracle_n"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.k_min_factor <= 1 or self.k_max_factor <= 1:
            raise ConfigError("k_min_factor and k_max_factor must exceed 1")
        if self.cert_eps_rel < 0:
            raise ConfigError("cert_eps_rel must be >= 0")
        return self


KEYS = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"config line {lineno}: expected key = value")
        if key not in KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r} (known: {', '.join(KEYS)})")
        try:
            out[key] = _CASTS[KEYS[key]](value)
        except ValueError:
            raise ConfigError(f"config line {lineno}: bad value for {key}: {value!r}") from None
    return out


def load_config(path: str | None = None, env: dict | None = None) -> RunConfig:
    """Defaults, overridden by the file at ``path`` or ``$CPMM_HEDGE_CONFIG``."""
    env = os.environ if env is None else env
    path = path or env.get(ENV_VAR) or None
    cfg = RunConfig()
    if path:
        with open(path) as fh:
            cfg = replace(cfg, **parse_config(fh.read()))
    return cfg.validate()
