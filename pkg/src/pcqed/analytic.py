"""Closed-form single-excitation dynamics for proportional coupling pulses.

When the two atoms see proportional couplings, the interaction Hamiltonians
at different times commute, so the propagator is the exponential of the
integrated Hamiltonian and everything reduces to the two pulse areas.  With
Lambda = sqrt(g_a^2 + g_b^2) the amplitudes over {|100>, |010>, |001>} are

    a     = 1 + g_a^2 (cos Lambda - 1) / Lambda^2
    b     = g_a g_b (cos Lambda - 1) / Lambda^2
    gamma = -i g_a sin(Lambda) / Lambda

for the initial state |100>.  The same expressions arise as resummed series
in powers of the integrated Hamiltonian; ``series_amplitudes`` keeps the
partial sums mostly for convergence diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PulseAreas",
    "closed_form_amplitudes",
    "series_amplitudes",
    "logical_unitary",
    "commutation_check",
    "analytic_trajectory",
]

# Below this total area the trig prefactors switch to their Taylor forms
# (removable singularity at Lambda = 0).
_SMALL_LAMBDA = 1e-6


@dataclass(frozen=True)
class PulseAreas:
    """Integrated couplings (rad) of atoms A and B over a common window."""

    g_a: float
    g_b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.g_a) and math.isfinite(self.g_b)):
            raise ValueError("pulse areas must be finite")

    @property
    def lam(self) -> float:
        """Total area sqrt(g_a^2 + g_b^2)."""
        return math.hypot(self.g_a, self.g_b)

    @property
    def ratio(self) -> float:
        """p = g_b / g_a (inf if g_a = 0 and g_b != 0)."""
        if self.g_a == 0.0:
            return math.inf if self.g_b else 0.0
        return self.g_b / self.g_a


def _cosm1_over_sq(lam: float) -> float:
    # (cos(lam) - 1) / lam^2 with its limit -1/2 at lam -> 0.
    if abs(lam) < _SMALL_LAMBDA:
        return -0.5 + lam**2 / 24.0
    return (math.cos(lam) - 1.0) / lam**2


def _sin_over(lam: float) -> float:
    # sin(lam) / lam with its limit 1 at lam -> 0.
    if abs(lam) < _SMALL_LAMBDA:
        return 1.0 - lam**2 / 6.0
    return math.sin(lam) / lam


def closed_form_amplitudes(areas: PulseAreas) -> tuple[complex, complex, complex]:
    """Final (a, b, gamma) for the initial state |100> after the full pulse."""
    lam = areas.lam
    c = _cosm1_over_sq(lam)
    s = _sin_over(lam)
    a = 1.0 + areas.g_a**2 * c
    b = areas.g_a * areas.g_b * c
    gamma = -1j * areas.g_a * s
    return (complex(a), complex(b), complex(gamma))


def series_amplitudes(areas: PulseAreas, n_terms: int) -> tuple[complex, complex, complex]:
    """Partial sums of the power series through order n_terms.

    The even series carries terms (-1)^n Lambda^(2n-2) / (2n)! and the odd
    one (-1)^n Lambda^(2n-2) / (2n-1)!; n_terms = 0 returns (1, 0, 0).
    """
    if n_terms < 0:
        raise ValueError("n_terms must be >= 0")
    lam_sq = areas.g_a**2 + areas.g_b**2
    even_sum = 0.0  # sum of (-1)^n lam^(2n-2) / (2n)!
    odd_sum = 0.0   # sum of (-1)^n lam^(2n-2) / (2n-1)!
    even_term = -0.5
    odd_term = -1.0
    for n in range(1, n_terms + 1):
        even_sum += even_term
        odd_sum += odd_term
        even_term *= -lam_sq / ((2 * n + 1) * (2 * n + 2))
        odd_term *= -lam_sq / ((2 * n) * (2 * n + 1))
    a = 1.0 + areas.g_a**2 * even_sum
    b = areas.g_a * areas.g_b * even_sum
    gamma = 1j * areas.g_a * odd_sum
    return (complex(a), complex(b), complex(gamma))


def logical_unitary(areas: PulseAreas) -> np.ndarray:
    """3x3 propagator over {|100>, |010>, |001>} for the given pulse areas.

    U = I + (cos(Lambda) - 1)/Lambda^2 * M^2 - i sin(Lambda)/Lambda * M with
    M the symmetric matrix coupling each atom slot to the photon slot.  Its
    first column reproduces :func:`closed_form_amplitudes`.
    """
    lam = areas.lam
    m = np.zeros((3, 3))
    m[0, 2] = m[2, 0] = areas.g_a
    m[1, 2] = m[2, 1] = areas.g_b
    return (
        np.eye(3, dtype=complex)
        + _cosm1_over_sq(lam) * (m @ m)
        - 1j * _sin_over(lam) * m
    )


def commutation_check(profile_a, profile_b, n_samples: int = 200) -> float:
    """Worst-case violation of the proportional-couplings assumption.

    Samples both profiles on their common window and returns
    max |g_b(t) g_a(t') - g_a(t) g_b(t')| normalized by the product of the
    peak magnitudes.  A value at rounding level (<= 1e-12) certifies that the
    interaction Hamiltonians at different times commute, which is what makes
    the closed forms applicable.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    a_lo, a_hi = profile_a.window
    b_lo, b_hi = profile_b.window
    lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
    if not lo < hi:
        raise ValueError("profiles share no time window")
    ts = np.linspace(lo, hi, n_samples)
    ga = np.asarray(profile_a(ts))
    gb = np.asarray(profile_b(ts))
    peak = float(np.max(np.abs(ga))) * float(np.max(np.abs(gb)))
    if peak == 0.0:
        return 0.0
    cross = np.abs(np.outer(gb, ga) - np.outer(ga, gb))
    return float(np.max(cross)) / peak


def analytic_trajectory(
    profile_a, p: float, times: np.ndarray, initial: str = "100", refine: int = 8
) -> np.ndarray:
    """Closed-form amplitudes along ``times`` for proportional profiles.

    Running pulse areas are accumulated by the trapezoidal rule on a grid
    ``refine`` times denser than the requested output times.  Returns an
    (len(times), 3) complex array over {|100>, |010>, |001>} for the chosen
    initial basis state; row 0 is the initial state when times[0] is the
    window start.
    """
    if initial not in ("100", "010", "001"):
        raise ValueError("initial must be one of '100', '010', '001'")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("need at least two output times")
    fine = np.linspace(times[0], times[-1], (times.size - 1) * refine + 1)
    values = np.asarray(profile_a(fine), dtype=float)
    running = np.concatenate(
        ([0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(fine)))
    )
    g_a = running[::refine]
    g_b = p * g_a

    lam = np.abs(g_a) * math.hypot(1.0, p)
    small = np.abs(lam) < _SMALL_LAMBDA
    lam_safe = np.where(small, 1.0, lam)
    c = np.where(small, -0.5 + lam**2 / 24.0, (np.cos(lam_safe) - 1.0) / lam_safe**2)
    s = np.where(small, 1.0 - lam**2 / 6.0, np.sin(lam_safe) / lam_safe)

    out = np.empty((times.size, 3), dtype=complex)
    if initial == "100":
        out[:, 0] = 1.0 + g_a**2 * c
        out[:, 1] = g_a * g_b * c
        out[:, 2] = -1j * g_a * s
    elif initial == "010":
        out[:, 0] = g_a * g_b * c
        out[:, 1] = 1.0 + g_b**2 * c
        out[:, 2] = -1j * g_b * s
    else:  # photon initially in the cavity
        out[:, 0] = -1j * g_a * s
        out[:, 1] = -1j * g_b * s
        out[:, 2] = np.cos(lam)
    return out
