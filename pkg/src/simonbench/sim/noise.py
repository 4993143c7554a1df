"""Pauli noise model and device parameter ingestion."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from ..errors import NoiseModelError


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing gate errors plus symmetric readout flips.

    ``p1``/``p2`` are the total probability of a random non-identity Pauli
    after a one-/two-qubit gate.  Router-inserted SWAPs run at
    ``p2 * swap_error_multiplier`` per constituent CNOT.
    """

    p1: float = 0.0
    p2: float = 0.0
    r: float = 0.0
    swap_error_multiplier: float = 1.0

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "r"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise NoiseModelError(f"{name}={value} is not a probability")
        m = self.swap_error_multiplier
        if not math.isfinite(m) or m < 1.0:
            raise NoiseModelError(f"swap_error_multiplier must be finite and >= 1, got {m}")

    @property
    def is_ideal(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0 and self.r == 0.0

    @property
    def p_swap(self) -> float:
        return self.p2 * self.swap_error_multiplier

    def check_swap_probability(self) -> None:
        if self.p_swap > 1.0:
            raise NoiseModelError(
                f"p2 * swap_error_multiplier = {self.p_swap:g} exceeds 1"
            )

    def scaled(self, factor: float) -> "NoiseModel":
        """All three probabilities times ``factor``, capped at 1."""
        if factor < 0:
            raise NoiseModelError(f"noise scale must be non-negative, got {factor}")
        return replace(
            self,
            p1=min(1.0, self.p1 * factor),
            p2=min(1.0, self.p2 * factor),
            r=min(1.0, self.r * factor),
        )


@dataclass(frozen=True)
class DeviceParams:
    name: str
    one_qubit_gate_error_pct: float
    two_qubit_gate_error_pct: float
    readout_error_pct: float
    topology: str
    # carried along for reference; the noise model ignores them
    t1: str = ""
    t2: str = ""
    two_qubit_gate_speed: str = ""
    native_gates: str = ""

    def __post_init__(self) -> None:
        for name in ("one_qubit_gate_error_pct", "two_qubit_gate_error_pct", "readout_error_pct"):
            value = getattr(self, name)
            if not (0.0 <= value <= 100.0):
                raise NoiseModelError(f"{self.name}: {name}={value} outside [0, 100]")

    @property
    def key(self) -> str:
        return device_key(self.name)

    @property
    def topology_preset(self) -> str:
        tag = self.topology.lower()
        if tag.startswith("eagle"):
            return "eagle127"
        if tag in ("all-to-all", "all_to_all"):
            return "all-to-all"
        raise NoiseModelError(f"{self.name}: unknown topology tag {self.topology!r}")

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "DeviceParams":
        fields = cls.__dataclass_fields__
        unknown = set(doc) - set(fields)
        if unknown:
            raise NoiseModelError(f"unknown device fields: {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise NoiseModelError(f"bad device entry {doc.get('name', '?')!r}: {exc}") from None


def device_key(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


def load_devices(path: str | Path | None = None) -> dict[str, DeviceParams]:
    """Device table keyed by lowercase alphanumeric name (``aria1``, ...)."""
    if path is None:
        text = resources.files("simonbench.data").joinpath("devices.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    doc = json.loads(text)
    entries = doc["devices"] if isinstance(doc, Mapping) else doc
    devices = [DeviceParams.from_dict(e) for e in entries]
    return {d.key: d for d in devices}


def get_device(name: str, path: str | Path | None = None) -> DeviceParams:
    devices = load_devices(path)
    try:
        return devices[device_key(name)]
    except KeyError:
        raise NoiseModelError(f"unknown device {name!r}; known: {', '.join(sorted(devices))}") from None


def noise_model_from_device(params: DeviceParams, multiplier: float = 1.0) -> NoiseModel:
    return NoiseModel(
        p1=params.one_qubit_gate_error_pct / 100.0,
        p2=params.two_qubit_gate_error_pct / 100.0,
        r=params.readout_error_pct / 100.0,
        swap_error_multiplier=multiplier,
    )
