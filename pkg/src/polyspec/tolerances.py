"""Tolerance set shared by every module; reports embed the set in force."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    planar: float = 1e-9
    unit: float = 1e-9
    closure: float = 1e-9
    align: float = 1e-9
    imbalance: float = 1e-6
    near_parallel: float = 1e-6
    ft: float = 1e-8
    zero: float = 1e-9
    coarse_zero: float = 1e-3

    def as_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **overrides: float) -> "Tolerances":
        """Return a copy with validated overrides; every tolerance lies in (0, 1)."""
        known = {f.name for f in fields(self)}
        for name, value in overrides.items():
            if name not in known:
                raise ValueError(f"unknown tolerance {name!r}; known: {sorted(known)}")
            value = float(value)
            if not 0.0 < value < 1.0:
                raise ValueError(f"tolerance {name}={value} outside (0, 1)")
            overrides[name] = value
        return replace(self, **overrides)


DEFAULT = Tolerances()
