"""Time-dependent coupling strengths seen by atoms crossing the cavity.

Two kinds of profile are supported: the analytic generic form (an
exponentially decaying envelope times a lattice-period oscillation, peaked
when the atom reaches the cavity center) and sampled traces, e.g. extracted
from a discretized mode field.  Both integrate into pulse areas, the angles
that drive the Rabi rotations downstream.

Sign conventions: analytic generic profiles are real and signed.  Traces
sampled from mode fields may be complex; the interaction uses their
magnitude (see :mod:`pcqed.ode`), while ``pulse_area`` integrates values
exactly as stored.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate

from .core import ConvergenceError

__all__ = [
    "GenericProfileParams",
    "GenericProfile",
    "ScaledProfile",
    "CouplingTrace",
    "generic_coupling",
    "pulse_area",
    "scaled_pair",
    "trace_to_csv",
    "trace_from_csv",
]


@dataclass(frozen=True)
class GenericProfileParams:
    """Parameters of the generic analytic coupling profile.

    omega0: peak Rabi frequency, rad/s.  path_half_length: distance from the
    entry point to the cavity center, m (the full transit covers twice this).
    defect_radius: envelope decay length, m.  lattice_const: oscillation
    period, m.  velocity: m/s.  zeta: dipole-polarization angle, rad.
    """

    omega0: float
    path_half_length: float
    defect_radius: float
    lattice_const: float
    velocity: float
    zeta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("omega0", "path_half_length", "defect_radius", "lattice_const", "velocity"):
            value = getattr(self, name)
            if not (value > 0) or not math.isfinite(value):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not math.isfinite(self.zeta):
            raise ValueError("zeta must be finite")

    def replace_velocity(self, velocity: float) -> "GenericProfileParams":
        return GenericProfileParams(
            omega0=self.omega0,
            path_half_length=self.path_half_length,
            defect_radius=self.defect_radius,
            lattice_const=self.lattice_const,
            velocity=velocity,
            zeta=self.zeta,
        )


def generic_coupling(t, params: GenericProfileParams):
    """Coupling strength (rad/s) at time t (s) for the generic profile.

    Omega0 * cos(zeta) * exp(-|V t - L| / R_def) * cos[(pi / l)(V t - L)],
    vectorized over t.
    """
    t = np.asarray(t, dtype=float)
    x = params.velocity * t - params.path_half_length
    value = (
        params.omega0
        * math.cos(params.zeta)
        * np.exp(-np.abs(x) / params.defect_radius)
        * np.cos(np.pi * x / params.lattice_const)
    )
    return value if value.ndim else float(value)


@dataclass(frozen=True)
class GenericProfile:
    """Callable wrapper of the generic analytic profile over its transit window."""

    params: GenericProfileParams

    def __call__(self, t):
        return generic_coupling(t, self.params)

    @property
    def window(self) -> tuple[float, float]:
        """Transit window [0, 2L/V], symmetric about the envelope peak."""
        return (0.0, 2.0 * self.params.path_half_length / self.params.velocity)

    @property
    def peak_time(self) -> float:
        return self.params.path_half_length / self.params.velocity

    @property
    def peak_value(self) -> float:
        return self.params.omega0 * math.cos(self.params.zeta)


@dataclass(frozen=True)
class ScaledProfile:
    """A profile multiplied by a constant factor (used when the factor is not
    representable as a dipole-orientation angle)."""

    base: object
    factor: float

    def __call__(self, t):
        return self.factor * self.base(t)

    @property
    def window(self) -> tuple[float, float]:
        return self.base.window

    @property
    def peak_time(self) -> float | None:
        return getattr(self.base, "peak_time", None)


@dataclass(frozen=True)
class CouplingTrace:
    """Sampled coupling strength: strictly increasing times (s), values (rad/s).

    Values may be complex for traces taken from complex mode fields.
    ``velocity`` optionally records the atom speed the trace was sampled at,
    which calibration needs for its exact 1/V rescaling.
    """

    times: np.ndarray
    values: np.ndarray
    velocity: float | None = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values)
        if not np.iscomplexobj(values):
            values = values.astype(float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("a trace needs at least two samples")
        if values.shape != times.shape:
            raise ValueError("times and values must have the same length")
        if not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValueError("trace samples must be finite")
        times.flags.writeable = False
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        """Linear interpolation; zero outside the sampled window."""
        t = np.asarray(t, dtype=float)
        if np.iscomplexobj(self.values):
            re = np.interp(t, self.times, self.values.real, left=0.0, right=0.0)
            im = np.interp(t, self.times, self.values.imag, left=0.0, right=0.0)
            out = re + 1j * im
        else:
            out = np.interp(t, self.times, self.values, left=0.0, right=0.0)
        return out if out.ndim else out[()]

    @property
    def window(self) -> tuple[float, float]:
        return (float(self.times[0]), float(self.times[-1]))

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.values))

    def magnitude(self) -> "CouplingTrace":
        return CouplingTrace(self.times, np.abs(self.values), velocity=self.velocity)

    def scaled(self, factor: float) -> "CouplingTrace":
        return CouplingTrace(self.times, factor * self.values, velocity=self.velocity)


def _window_of(profile) -> tuple[float, float]:
    window = getattr(profile, "window", None)
    if window is None:
        raise ValueError(
            "profile carries no window; pass explicit integration bounds"
        )
    return window


def pulse_area(profile, t0: float | None = None, t1: float | None = None, tol: float = 1e-10):
    """Integrated coupling (rad) of a profile over [t0, t1].

    Defaults to the profile's own window.  Callable profiles are integrated
    by adaptive quadrature to absolute error <= tol; traces by the
    trapezoidal rule over their samples (complex traces integrate
    componentwise).  Raises ConvergenceError if the quadrature cannot reach
    tol.
    """
    if t0 is None or t1 is None:
        w0, w1 = _window_of(profile)
        t0 = w0 if t0 is None else t0
        t1 = w1 if t1 is None else t1
    if not (t0 < t1):
        raise ValueError(f"need t0 < t1, got [{t0!r}, {t1!r}]")
    if not tol > 0:
        raise ValueError("tol must be positive")

    if isinstance(profile, CouplingTrace):
        return _trace_area(profile, t0, t1)

    points = getattr(profile, "peak_time", None)
    points = [points] if points is not None and t0 < points < t1 else None
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            area, abserr = integrate.quad(
                profile, t0, t1, epsabs=tol, epsrel=0.0, limit=500, points=points
            )
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(
                f"pulse-area quadrature did not reach tol={tol:g}: {exc}", t=t0
            ) from exc
    if abserr > 10.0 * tol:
        raise ConvergenceError(
            f"pulse-area quadrature error estimate {abserr:g} exceeds tol={tol:g}",
            t=t0,
        )
    return area


def _trace_area(trace: CouplingTrace, t0: float, t1: float):
    lo = max(t0, trace.times[0])
    hi = min(t1, trace.times[-1])
    if not lo < hi:
        return 0.0j if trace.is_complex else 0.0
    inside = (trace.times > lo) & (trace.times < hi)
    ts = np.concatenate(([lo], trace.times[inside], [hi]))
    vs = np.concatenate(([trace(lo)], trace.values[inside], [trace(hi)]))
    area = np.trapezoid(vs, ts)
    return complex(area) if trace.is_complex else float(area)


def scaled_pair(profile, p: float):
    """Profile of the companion atom: p times the given profile at every t.

    For generic profiles the factor is realized physically through the dipole
    orientation, cos(zeta_B) = p * cos(zeta_A); when |p cos(zeta_A)| > 1 no
    orientation exists, a non-physical warning is emitted, and a plainly
    scaled profile is returned instead.
    """
    if not math.isfinite(p):
        raise ValueError("p must be finite")
    if isinstance(profile, CouplingTrace):
        return profile.scaled(p)
    if p == 0.0:
        # exact zero; acos(0) would leave a cos(pi/2) rounding residue
        return ScaledProfile(profile, 0.0)
    if isinstance(profile, GenericProfile):
        target = p * math.cos(profile.params.zeta)
        if abs(target) <= 1.0:
            params = GenericProfileParams(
                omega0=profile.params.omega0,
                path_half_length=profile.params.path_half_length,
                defect_radius=profile.params.defect_radius,
                lattice_const=profile.params.lattice_const,
                velocity=profile.params.velocity,
                zeta=math.acos(target),
            )
            return GenericProfile(params)
        warnings.warn(
            f"ratio p={p:g} with cos(zeta_A)={math.cos(profile.params.zeta):g} "
            "is not realizable as a dipole orientation; returning a scaled "
            "profile anyway",
            stacklevel=2,
        )
    if isinstance(profile, ScaledProfile):
        return ScaledProfile(profile.base, p * profile.factor)
    return ScaledProfile(profile, p)


def trace_to_csv(trace: CouplingTrace, path) -> Path:
    """Write a trace as CSV: time_s, coupling_rad_per_s.

    Complex traces get three columns (time_s, coupling_re_rad_per_s,
    coupling_im_rad_per_s).  Floats are written with 17 significant digits.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        if trace.is_complex:
            writer.writerow(["time_s", "coupling_re_rad_per_s", "coupling_im_rad_per_s"])
            for t, v in zip(trace.times, trace.values):
                writer.writerow([f"{t:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])
        else:
            writer.writerow(["time_s", "coupling_rad_per_s"])
            for t, v in zip(trace.times, trace.values):
                writer.writerow([f"{t:.17g}", f"{v:.17g}"])
    return path


def trace_from_csv(path) -> CouplingTrace:
    """Read a trace written by :func:`trace_to_csv`."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:1] != ["time_s"] or len(header) not in (2, 3):
            raise ValueError(f"unrecognized trace header {header!r} in {path}")
        rows = [[float(cell) for cell in row] for row in reader if row]
    data = np.asarray(rows, dtype=float)
    if len(header) == 3:
        return CouplingTrace(data[:, 0], data[:, 1] + 1j * data[:, 2])
    return CouplingTrace(data[:, 0], data[:, 1])
