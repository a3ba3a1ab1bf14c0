"""Model parameters for the staggered tunable-range Ising chain.

All energies are in the same (arbitrary) unit as gamma; beta is an inverse
energy.  ``alpha = math.inf`` selects the nearest-neighbor kernel and
``beta = math.inf`` selects the ground state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


def _is_half_integer(s: float) -> bool:
    return s > 0 and abs(2 * s - round(2 * s)) < 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Physical knobs of the chain.

    n:        site count, positive and even (two-sublattice structure).
    s:        spin size, half-integer > 0.
    alpha:    interaction-range exponent >= 0; math.inf = nearest-neighbor.
    gamma:    interaction strength > 0 (energy).
    omega_x:  longitudinal field (energy).
    omega_z:  transverse field (energy).
    b:        on-site kernel shift; None means "tune so min eigenvalue is 0".
    beta:     inverse temperature; math.inf = ground state.
    """

    n: int
    s: float = 0.5
    alpha: float = 0.0
    gamma: float = 1.0
    omega_x: float = 0.0
    omega_z: float = 0.0
    b: float | None = None
    beta: float = math.inf

    def __post_init__(self):
        if self.n <= 0 or self.n % 2 != 0:
            raise ValueError(f"n must be a positive even integer, got {self.n}")
        if not _is_half_integer(self.s):
            raise ValueError(f"s must be a positive half-integer, got {self.s}")
        if not (self.alpha >= 0):
            raise ValueError(f"alpha must be >= 0 or inf, got {self.alpha}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not (self.beta > 0):
            raise ValueError(f"beta must be > 0 or inf, got {self.beta}")

    @property
    def sgamma(self) -> float:
        """Natural energy scale s*Gamma of the phase diagram axes."""
        return self.s * self.gamma

    @property
    def nearest_neighbor(self) -> bool:
        return math.isinf(self.alpha)

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    def replace(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)

    def to_dict(self, units: str = "sGamma") -> dict:
        """Serialize to a plain dict; fields in units of s*gamma by default."""
        scale = self.sgamma if units == "sGamma" else 1.0
        d = {
            "n": self.n,
            "s": self.s,
            "alpha": "inf" if self.nearest_neighbor else self.alpha,
            "gamma": self.gamma,
            "omega_x": self.omega_x / scale,
            "omega_z": self.omega_z / scale,
            "b": "auto" if self.b is None else self.b,
            "beta": "inf" if self.zero_temperature else self.beta * scale,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict, units: str = "sGamma") -> "ModelParams":
        known = {"n", "s", "alpha", "gamma", "omega_x", "omega_z", "b", "beta"}
        unknown = set(d) - known
        if unknown:
            raise KeyError(f"unknown model keys: {sorted(unknown)}")
        s = float(d.get("s", 0.5))
        gamma = float(d.get("gamma", 1.0))
        scale = s * gamma if units == "sGamma" else 1.0

        def _num(value, inf_word):
            if isinstance(value, str):
                if value == inf_word:
                    return math.inf
                raise ValueError(f"expected a number or {inf_word!r}, got {value!r}")
            return float(value)

        b = d.get("b", "auto")
        beta = _num(d.get("beta", "inf"), "inf")
        return cls(
            n=int(d["n"]),
            s=s,
            alpha=_num(d.get("alpha", 0.0), "inf"),
            gamma=gamma,
            omega_x=float(d.get("omega_x", 0.0)) * scale,
            omega_z=float(d.get("omega_z", 0.0)) * scale,
            b=None if b == "auto" else float(b),
            beta=beta if math.isinf(beta) else beta / scale,
        )
