"""Hardware-noise description shared by the simulator and mitigation."""

import dataclasses
from dataclasses import dataclass

from .errors import ConfigError

_JSON_KEYS = {"p1": "p1", "p2": "p2", "readout01": "readout_01",
              "readout10": "readout_10", "global": "global_depolarizing"}


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing gate noise plus asymmetric readout errors.

    p1 and p2 act after each rotation and entangler respectively,
    global_depolarizing once after the full circuit.  scale records the
    amplification applied by noise folding; readout rates never scale.
    """

    p1: float = 0.0
    p2: float = 0.0
    readout_01: float = 0.0
    readout_10: float = 0.0
    global_depolarizing: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        for name in ("p1", "p2", "readout_01", "readout_10", "global_depolarizing"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} = {value} outside [0, 1]")
        if self.scale <= 0.0:
            raise ValueError(f"scale = {self.scale} must be positive")

    @property
    def is_noiseless(self) -> bool:
        return (self.p1 == 0.0 and self.p2 == 0.0 and self.readout_01 == 0.0
                and self.readout_10 == 0.0 and self.global_depolarizing == 0.0)

    @property
    def has_gate_noise(self) -> bool:
        """True when the circuit itself is noisy (density path required)."""
        return self.p1 > 0.0 or self.p2 > 0.0 or self.global_depolarizing > 0.0

    def scaled(self, lam: float) -> "NoiseModel":
        """Amplify gate-noise probabilities by lam; readout stays fixed."""
        if lam < 1.0:
            raise ValueError(f"noise scale factor {lam} must be >= 1")
        for name in ("p1", "p2", "global_depolarizing"):
            if getattr(self, name) * lam > 1.0:
                raise ValueError(f"scaled {name} = {getattr(self, name) * lam} exceeds 1")
        return dataclasses.replace(
            self,
            p1=self.p1 * lam,
            p2=self.p2 * lam,
            global_depolarizing=self.global_depolarizing * lam,
            scale=self.scale * lam,
        )

    @classmethod
    def preset(cls) -> "NoiseModel":
        """Default benchmark noise level for the noisy experiments."""
        return cls(p1=0.001, p2=0.01, readout_01=0.02, readout_10=0.02)

    def to_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "readout01": self.readout_01,
                "readout10": self.readout_10, "global": self.global_depolarizing}

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseModel":
        unknown = set(data) - set(_JSON_KEYS)
        if unknown:
            raise ConfigError(f"unknown noise field(s): {', '.join(sorted(unknown))}")
        kwargs = {}
        for key, field in _JSON_KEYS.items():
            if key in data:
                value = data[key]
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise ConfigError(f"noise field {key!r} must be a number")
                kwargs[field] = float(value)
        try:
            return cls(**kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
