"""Experiment configuration: a flat key=value file with CLI overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path


@dataclass
class ExperimentConfig:
    dataset: str = ""
    out_dir: str = "runs/exp"
    clients: int = 10
    rounds: int = 50
    epochs: int = 5
    lr: float = 0.001
    weight_decay: float = 5e-4
    tau: float = 0.1
    tau_sharp: float = 0.05
    tau_base: float = 0.3
    tau_density: float = 5.0
    k_max: int = 10
    beta: float = 1.0
    alpha: float = 1.0
    lambda_hc: float = 0.1
    rho: float = 0.9
    eps: float = 1e-8
    hidden_dim: int = 64
    embed_dim: int = 32
    client_fraction: float = 1.0
    label_rate: float = 0.2
    sparsity_rate: float = 0.0
    no_gcl: bool = False
    no_unsup: bool = False
    no_trg: bool = False
    cannot_link: bool = False
    seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        if not self.dataset:
            raise ValueError("dataset path is required")
        for name in ("label_rate", "client_fraction"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must be in (0, 1]")
        if not 0.0 <= self.sparsity_rate < 1.0:
            raise ValueError("sparsity_rate must be in [0, 1)")
        for name in ("tau", "tau_sharp", "tau_base", "eps", "lr"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("clients", "rounds", "epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must be in [0, 1]")

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        values: dict[str, str] = {}
        for raw in Path(path).read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = val
        return cls().with_overrides(values)

    def with_overrides(self, values: dict) -> "ExperimentConfig":
        out = ExperimentConfig(**{f.name: getattr(self, f.name) for f in fields(self)})
        valid = {f.name: f.type for f in fields(self)}
        for key, val in values.items():
            if val is None:
                continue
            if key not in valid:
                raise ValueError(f"unknown config key: {key}")
            current = getattr(out, key)
            if isinstance(current, bool):
                parsed = val if isinstance(val, bool) else str(val).lower() in ("1", "true", "yes")
            elif isinstance(current, int):
                parsed = int(val)
            elif isinstance(current, float):
                parsed = float(val)
            else:
                parsed = str(val)
            setattr(out, key, parsed)
        return out

    def echo(self) -> str:
        lines = [f"{f.name}={getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
