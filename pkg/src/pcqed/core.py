"""Shared domain types, physical constants, and unit conventions.

Unit discipline across the package: angular frequencies in rad/s, times in s,
lengths in m, dipole moments in C*m.  Every quoted frequency is angular; the
factor of 2*pi is never implicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "HBAR",
    "EPS0",
    "C_LIGHT",
    "PhysicalConstants",
    "CONSTANTS",
    "ConvergenceError",
    "CalibrationError",
    "AtomParams",
    "CavityParams",
    "AmplitudeVector",
    "basis_labels",
    "basis_index",
    "g0_from_params",
    "mode_volume_from_g0",
    "photon_lifetime",
]

# CODATA 2018
HBAR = 1.054571817e-34    # J*s
EPS0 = 8.8541878128e-12   # F/m
C_LIGHT = 299792458.0     # m/s


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants (SI)."""

    hbar: float = HBAR    # J*s
    eps0: float = EPS0    # F/m
    c: float = C_LIGHT    # m/s


CONSTANTS = PhysicalConstants()


class ConvergenceError(RuntimeError):
    """An adaptive numerical routine could not reach its tolerance.

    ``t`` carries the time (or abscissa) at which the routine gave up, when
    known.
    """

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class CalibrationError(RuntimeError):
    """No operating point exists inside the requested bounds.

    ``candidates`` lists the nearest solutions outside the bounds (m/s).
    """

    def __init__(self, message: str, candidates: tuple[float, ...] = ()):
        super().__init__(message)
        self.candidates = tuple(candidates)


def _require_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not (value > 0) or not math.isfinite(value):
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


def g0_from_params(mu_eg: float, omega: float, eps_m: float, v_mode: float) -> float:
    """Peak vacuum coupling rate (rad/s) of a dipole at the field maximum.

    mu_eg: transition dipole moment, C*m.  omega: mode angular frequency,
    rad/s.  eps_m: relative permittivity at the energy-density maximum.
    v_mode: cavity mode volume, m^3.
    """
    _require_positive(mu_eg=mu_eg, omega=omega, eps_m=eps_m, v_mode=v_mode)
    return (mu_eg / HBAR) * math.sqrt(HBAR * omega / (2.0 * EPS0 * eps_m * v_mode))


def mode_volume_from_g0(mu_eg: float, omega: float, eps_m: float, g0: float) -> float:
    """Invert the peak-coupling relation for the mode volume (m^3)."""
    _require_positive(mu_eg=mu_eg, omega=omega, eps_m=eps_m, g0=g0)
    return mu_eg**2 * omega / (2.0 * HBAR * EPS0 * eps_m * g0**2)


def photon_lifetime(q_factor: float, omega: float) -> float:
    """Cavity photon lifetime tau = Q / omega, in s (omega in rad/s)."""
    _require_positive(q_factor=q_factor, omega=omega)
    return q_factor / omega


@dataclass(frozen=True)
class AtomParams:
    """One flying two-level atom.

    dipole_moment: C*m.  zeta: angle (rad) between the dipole and the mode
    polarization, restricted to [0, pi/2].  velocity: m/s.
    transition_omega: rad/s.
    """

    dipole_moment: float
    zeta: float
    velocity: float
    transition_omega: float

    def __post_init__(self) -> None:
        _require_positive(
            dipole_moment=self.dipole_moment,
            velocity=self.velocity,
            transition_omega=self.transition_omega,
        )
        if not 0.0 <= self.zeta <= math.pi / 2:
            raise ValueError(f"zeta must lie in [0, pi/2], got {self.zeta!r}")


@dataclass(frozen=True)
class CavityParams:
    """Single-mode cavity: frequency, permittivity at the peak, volume, coupling.

    ``g0`` must be consistent with the other fields; build instances through
    :meth:`from_dipole` to guarantee that, or check with
    :meth:`g0_relative_residual`.
    """

    omega_cav: float      # rad/s
    eps_m: float          # dimensionless
    mode_volume: float    # m^3
    g0: float             # rad/s

    def __post_init__(self) -> None:
        _require_positive(
            omega_cav=self.omega_cav,
            eps_m=self.eps_m,
            mode_volume=self.mode_volume,
            g0=self.g0,
        )

    @classmethod
    def from_dipole(
        cls, mu_eg: float, omega_cav: float, eps_m: float, mode_volume: float
    ) -> "CavityParams":
        g0 = g0_from_params(mu_eg, omega_cav, eps_m, mode_volume)
        return cls(omega_cav=omega_cav, eps_m=eps_m, mode_volume=mode_volume, g0=g0)

    def g0_relative_residual(self, mu_eg: float) -> float:
        """Relative mismatch between stored g0 and the one implied by mu_eg."""
        g0_ref = g0_from_params(mu_eg, self.omega_cav, self.eps_m, self.mode_volume)
        return abs(self.g0 - g0_ref) / g0_ref


def basis_labels(n_excitations: int) -> tuple[str, ...]:
    """Canonical basis of the two-atom + mode system with n total excitations.

    A label "abm" gives atom A's excitation (0/1), atom B's (0/1), and the
    photon number m.  Ordering: photon number ascending; within a photon
    sector, atom A excited before atom B excited.  For one excitation this is
    ("100", "010", "001"); for two, ("110", "101", "011", "002").
    """
    if n_excitations < 0:
        raise ValueError(f"n_excitations must be >= 0, got {n_excitations}")
    labels: list[str] = []
    for m in range(n_excitations + 1):
        atoms = n_excitations - m
        if atoms > 2:
            continue
        if atoms == 2:
            labels.append(f"11{m}")
        elif atoms == 1:
            labels.append(f"10{m}")
            labels.append(f"01{m}")
        else:
            labels.append(f"00{m}")
    return tuple(labels)


def basis_index(n_excitations: int, label: str) -> int:
    labels = basis_labels(n_excitations)
    try:
        return labels.index(label)
    except ValueError:
        raise ValueError(
            f"label {label!r} not in the n={n_excitations} basis {labels}"
        ) from None


# Construction guard; evolution routines hold themselves to tighter bounds
# (1e-10 analytic, 1e-8 ODE) in their own contracts and tests.
NORM_TOL = 1e-6


@dataclass(frozen=True)
class AmplitudeVector:
    """Normalized complex amplitudes over a canonical n-excitation basis."""

    n_excitations: int
    basis_labels: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        expected = basis_labels(self.n_excitations)
        if tuple(self.basis_labels) != expected:
            raise ValueError(
                f"basis labels {self.basis_labels} do not match the canonical "
                f"ordering {expected}"
            )
        amps = np.asarray(self.amplitudes, dtype=complex).copy()
        if amps.shape != (len(expected),):
            raise ValueError(
                f"expected {len(expected)} amplitudes, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |amp|^2 = {norm_sq!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    @classmethod
    def from_amplitudes(cls, n_excitations: int, amplitudes) -> "AmplitudeVector":
        return cls(n_excitations, basis_labels(n_excitations), np.asarray(amplitudes))

    @classmethod
    def basis_state(cls, label: str) -> "AmplitudeVector":
        n = sum(int(ch) for ch in label[:2]) + int(label[2:])
        labels = basis_labels(n)
        amps = np.zeros(len(labels), dtype=complex)
        amps[labels.index(label)] = 1.0
        return cls(n, labels, amps)

    @property
    def norm_error(self) -> float:
        """|sum of probabilities - 1|."""
        return abs(float(np.sum(np.abs(self.amplitudes) ** 2)) - 1.0)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def index(self, label: str) -> int:
        return basis_index(self.n_excitations, label)

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[self.index(label)])

    def overlap(self, other: "AmplitudeVector") -> complex:
        """<self|other>; the two states must share a basis."""
        if (
            self.n_excitations != other.n_excitations
            or self.basis_labels != other.basis_labels
        ):
            raise ValueError("basis mismatch between states")
        return complex(np.vdot(self.amplitudes, other.amplitudes))
