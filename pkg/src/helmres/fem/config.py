"""Geometry/discretization configuration for the benchmark problems."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from helmres.errors import ConfigError

_KINDS = ("empty", "single_disk", "dimer")


@dataclass(frozen=True)
class GeometryConfig:
    """Benchmark geometry plus discretization parameters.

    kind "single_disk": resonator of radius R centred at (d, 0), index eta_s.
    kind "dimer": two disks of radius R separated by s on the y-axis.
    kind "empty": homogeneous disk (eta = 1).
    """

    kind: str
    a: float = 1.0
    R: float = 0.0
    d: float = 0.0
    s: float = 0.0
    eta_s: float = 1.0
    p: int = 4
    levels: int = 0
    nu_max: int = 20

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown geometry kind {self.kind!r}; expected one of {_KINDS}")
        if self.a <= 0:
            raise ConfigError("truncation radius a must be positive")
        if self.kind != "empty" and self.R <= 0:
            raise ConfigError("resonator radius R must be positive")
        if self.p < 1 or self.levels < 0 or self.nu_max < 0:
            raise ConfigError("p >= 1, levels >= 0, nu_max >= 0 required")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "GeometryConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        known = {f for f in GeometryConfig.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "kind" not in data:
            raise ConfigError("config must specify 'kind'")
        return GeometryConfig(**data)

    @staticmethod
    def load(path) -> "GeometryConfig":
        with open(path) as fh:
            return GeometryConfig.from_json(fh.read())
