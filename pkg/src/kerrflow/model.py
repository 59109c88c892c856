"""Physical parameters, quantum/classical scaling, and shared conventions.

Parameter set of the rotating-frame Kerr resonator with single-photon loss:
detuning ``delta``, Kerr coefficient ``u``, two-photon drive ``g``,
single-photon drive amplitude ``f`` (kept >= 0, drive sign lives in the
phase ``phi``), and loss rate ``kappa``.

Quadrature convention (fixed once, used everywhere):
    X = Re<b>,  Y = Im<b>,
with operator forms  X = (b + b^dag)/2  and  Y = (b - b^dag)/(2i),
so that <X> = Re Tr[rho b] exactly. The alternative 1/sqrt(2) normalization
would rescale the chirality spectrum by a constant and is not used.

The scaling knob ``aleph`` interpolates between quantum (small) and
classical (large) regimes via

    beta_scaled = beta / sqrt(aleph),  u = tilde_u / aleph,
    f = tilde_f * sqrt(aleph),

which leaves the mean-field equation of motion invariant. ``delta``, ``g``,
``kappa`` are deliberately NOT rescaled: only the Kerr coefficient and the
linear drive appear in the transformation, and rescaling anything else
would break mean-field invariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvalidParameterError

__all__ = [
    "ModelParams",
    "ScaledParams",
    "to_physical",
    "to_scaled",
    "detuning_from_frequencies",
]


def _require_finite(**fields):
    for name, value in fields.items():
        if not math.isfinite(value):
            raise InvalidParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the driven-dissipative Kerr resonator.

    All entries are angular frequencies in the same (arbitrary) unit.
    ``kappa`` must be positive; ``f`` must be non-negative (a drive sign is
    absorbed into ``phi``).
    """

    delta: float
    u: float
    g: float
    f: float
    phi: float
    kappa: float

    def __post_init__(self):
        _require_finite(delta=self.delta, u=self.u, g=self.g, f=self.f,
                        phi=self.phi, kappa=self.kappa)
        if self.kappa <= 0:
            raise InvalidParameterError(f"kappa must be > 0, got {self.kappa}")
        if self.f < 0:
            raise InvalidParameterError(
                f"f must be >= 0 (absorb the sign into phi), got {self.f}")

    @classmethod
    def with_signed_drive(cls, delta, u, g, f, phi, kappa) -> "ModelParams":
        """Build params from a possibly negative drive amplitude.

        A negative ``f`` is canonicalized to ``|f|`` with ``phi + pi``.
        """
        if f < 0:
            f, phi = -f, phi + math.pi
        return cls(delta, u, g, f, phi, kappa)


@dataclass(frozen=True)
class ScaledParams:
    """Parameters in scaled (tilde) form together with the scale ``aleph``."""

    tilde_u: float
    tilde_f: float
    aleph: float
    delta: float
    g: float
    phi: float
    kappa: float

    def __post_init__(self):
        _require_finite(tilde_u=self.tilde_u, tilde_f=self.tilde_f,
                        aleph=self.aleph, delta=self.delta, g=self.g,
                        phi=self.phi, kappa=self.kappa)
        if self.aleph <= 0:
            raise InvalidParameterError(f"aleph must be > 0, got {self.aleph}")


def to_physical(s: ScaledParams) -> ModelParams:
    """Map scaled parameters to physical ones.

    ``u = tilde_u / aleph`` and ``f = tilde_f * sqrt(aleph)``; detuning,
    two-photon drive, phase, and loss are copied unchanged.
    """
    return ModelParams.with_signed_drive(
        delta=s.delta,
        u=s.tilde_u / s.aleph,
        g=s.g,
        f=s.tilde_f * math.sqrt(s.aleph),
        phi=s.phi,
        kappa=s.kappa,
    )


def to_scaled(p: ModelParams, aleph: float) -> ScaledParams:
    """Inverse of :func:`to_physical` for a given scale ``aleph``."""
    if aleph <= 0:
        raise InvalidParameterError(f"aleph must be > 0, got {aleph}")
    return ScaledParams(
        tilde_u=p.u * aleph,
        tilde_f=p.f / math.sqrt(aleph),
        aleph=aleph,
        delta=p.delta,
        g=p.g,
        phi=p.phi,
        kappa=p.kappa,
    )


def detuning_from_frequencies(omega: float, omega0: float) -> float:
    """Rotating-frame detuning for drive frequency ``omega`` and bare
    resonator frequency ``omega0``:  (omega^2 - omega0^2) / (2 omega)."""
    _require_finite(omega=omega, omega0=omega0)
    if omega <= 0:
        raise InvalidParameterError(f"omega must be > 0, got {omega}")
    return (omega * omega - omega0 * omega0) / (2.0 * omega)


def rescale(p: ModelParams, aleph_from: float, aleph_to: float) -> ModelParams:
    """Re-express physical params at a different quantum-fluctuation scale,
    keeping the scaled (tilde) parameters fixed."""
    return to_physical(replace(to_scaled(p, aleph_from), aleph=aleph_to))
