"""Discretized cavity-mode fields and the coupling machinery built on them.

A FieldGrid holds the relative permittivity and the (possibly complex)
electric field on a regular grid with samples at cell centers.  From it we
extract the energy-density maximum, the mode volume, the normalized spatial
profile along an atom path, the resulting coupling trace, and the in-plane
TM polarization fraction.  No eigenmode solving happens here: grids are
either loaded from JSON or synthesized as deterministic stand-ins shaped
like a defect mode (radially decaying, oscillating at the lattice period,
dielectric rods in air).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .core import CavityParams
from .coupling import CouplingTrace

__all__ = [
    "FieldGrid",
    "PathSpec",
    "peak_energy_point",
    "mode_volume",
    "coupling_trace_from_field",
    "polarization_fraction",
    "synthesize_mode",
    "grid_to_json",
    "grid_from_json",
]


@dataclass(frozen=True)
class FieldGrid:
    """Permittivity and field samples on a regular grid.

    spacing/origin are per-axis (m); origin is the corner of the grid box and
    samples sit at cell centers, origin + (index + 1/2) * spacing.  The field
    array is (nx, ny, nz) for scalar (TM 2D) grids or (nx, ny, nz, 3) for
    3-component grids.  lattice_const optionally records the generating
    lattice period, used as the default effective height of 2D grids.
    """

    spacing: tuple[float, float, float]
    origin: tuple[float, float, float]
    epsilon: np.ndarray
    field: np.ndarray
    lattice_const: float | None = None

    def __post_init__(self) -> None:
        eps = np.asarray(self.epsilon, dtype=float)
        fld = np.asarray(self.field, dtype=complex)
        if eps.ndim != 3:
            raise ValueError("epsilon must be a 3D array (nx, ny, nz)")
        if fld.shape not in (eps.shape, eps.shape + (3,)):
            raise ValueError(
                f"field shape {fld.shape} inconsistent with epsilon shape {eps.shape}"
            )
        if np.any(eps < 1.0):
            raise ValueError("epsilon must be >= 1 everywhere")
        if len(self.spacing) != 3 or any(not (h > 0) for h in self.spacing):
            raise ValueError("spacing must be three positive lengths")
        if len(self.origin) != 3:
            raise ValueError("origin must have three components")
        eps.flags.writeable = False
        fld.flags.writeable = False
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "field", fld)
        object.__setattr__(self, "spacing", tuple(float(h) for h in self.spacing))
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.epsilon.shape

    @property
    def components(self) -> int:
        return 3 if self.field.ndim == 4 else 1

    @property
    def is_2d(self) -> bool:
        return self.dims[2] == 1

    def axis_centers(self, axis: int) -> np.ndarray:
        n = self.dims[axis]
        return self.origin[axis] + (np.arange(n) + 0.5) * self.spacing[axis]

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.origin)
        hi = lo + np.asarray(self.dims) * np.asarray(self.spacing)
        return lo, hi

    def field_intensity(self) -> np.ndarray:
        """|E|^2 per cell (summed over components for vector fields)."""
        if self.components == 3:
            return np.sum(np.abs(self.field) ** 2, axis=-1)
        return np.abs(self.field) ** 2


@dataclass(frozen=True)
class PathSpec:
    """Straight constant-velocity atom path through the grid.

    entry: starting point (m).  direction is normalized on construction.
    length: m; velocity: m/s; zeta: dipole-polarization angle (rad).
    """

    entry: tuple[float, float, float]
    direction: tuple[float, float, float]
    length: float
    velocity: float
    zeta: float = 0.0

    def __post_init__(self) -> None:
        d = np.asarray(self.direction, dtype=float)
        norm = float(np.linalg.norm(d))
        if norm == 0.0 or not np.all(np.isfinite(d)):
            raise ValueError("direction must be a nonzero finite vector")
        if not (self.length > 0 and self.velocity > 0):
            raise ValueError("length and velocity must be positive")
        object.__setattr__(self, "direction", tuple(d / norm))
        object.__setattr__(self, "entry", tuple(float(x) for x in self.entry))


def peak_energy_point(grid: FieldGrid) -> tuple[np.ndarray, float]:
    """Position (cell center) maximizing eps |E|^2, and eps there.

    Ties break deterministically to the lowest linear (row-major) index.
    """
    density = grid.epsilon * grid.field_intensity()
    if not np.any(density > 0):
        raise ValueError("field is identically zero")
    flat_idx = int(np.argmax(density))
    idx = np.unravel_index(flat_idx, grid.dims)
    r_m = np.array(
        [grid.origin[k] + (idx[k] + 0.5) * grid.spacing[k] for k in range(3)]
    )
    return r_m, float(grid.epsilon[idx])


def mode_volume(grid: FieldGrid, effective_height: float | None = None) -> float:
    """Mode volume (m^3): integral of eps |E|^2 over the energy density at the peak.

    Midpoint rule over cell centers.  For 2D grids (nz = 1) the cell area is
    multiplied by an effective height: the explicit argument if given, else
    the grid's lattice constant.
    """
    intensity = grid.field_intensity()
    density = grid.epsilon * intensity
    if not np.any(density > 0):
        raise ValueError("field is identically zero")
    hx, hy, hz = grid.spacing
    if grid.is_2d:
        height = effective_height if effective_height is not None else grid.lattice_const
        if height is None:
            raise ValueError(
                "2D grid needs an effective height (argument or grid.lattice_const)"
            )
        if not height > 0:
            raise ValueError("effective height must be positive")
        cell = hx * hy * height
    else:
        cell = hx * hy * hz
    return float(np.sum(density) * cell / np.max(density))


def polarization_fraction(grid: FieldGrid, plane_index: int) -> float:
    """Share of |E_z|^2 in the total field energy of one z-plane, in [0, 1]."""
    if grid.components != 3:
        raise ValueError("polarization fraction needs a 3-component field")
    if not 0 <= plane_index < grid.dims[2]:
        raise ValueError(
            f"plane index {plane_index} outside 0..{grid.dims[2] - 1}"
        )
    plane = grid.field[:, :, plane_index, :]
    total = float(np.sum(np.abs(plane) ** 2))
    if total == 0.0:
        raise ValueError("field vanishes in the requested plane")
    ez = float(np.sum(np.abs(plane[..., 2]) ** 2))
    return ez / total


def _interpolators(grid: FieldGrid):
    """Linear interpolators for the coupling component of the field.

    Scalar grids interpolate the scalar field; 3-component grids interpolate
    E_z (the TM component that couples to the dipole).  Degenerate axes
    (length 1) are dropped from the interpolation.
    """
    values = grid.field if grid.components == 1 else grid.field[..., 2]
    axes = [grid.axis_centers(k) for k in range(3)]
    live = [k for k in range(3) if grid.dims[k] > 1]
    pts = tuple(axes[k] for k in live)
    squeezed = values.reshape([grid.dims[k] for k in live]) if live else values
    interp_re = RegularGridInterpolator(pts, squeezed.real)
    interp_im = RegularGridInterpolator(pts, squeezed.imag)

    def sample(positions: np.ndarray) -> np.ndarray:
        # Clamp to the cell-center hull: linear interpolation then never
        # exceeds the sampled extrema.
        q = positions[:, live].copy()
        for col, k in enumerate(live):
            q[:, col] = np.clip(q[:, col], axes[k][0], axes[k][-1])
        return interp_re(q) + 1j * interp_im(q)

    return sample


def _clip_to_bounds(path: PathSpec, grid: FieldGrid) -> tuple[float, float]:
    """Intersect the path segment [0, length] with the grid box.

    Returns the retained arclength interval.  Warns when clipping occurs;
    raises if nothing remains.
    """
    lo, hi = grid.bounds
    entry = np.asarray(path.entry)
    direction = np.asarray(path.direction)
    s_lo, s_hi = 0.0, path.length
    for k in range(3):
        if direction[k] == 0.0:
            if not lo[k] <= entry[k] <= hi[k]:
                raise ValueError("path lies outside the grid bounds")
            continue
        s1 = (lo[k] - entry[k]) / direction[k]
        s2 = (hi[k] - entry[k]) / direction[k]
        s_lo = max(s_lo, min(s1, s2))
        s_hi = min(s_hi, max(s1, s2))
    if not s_lo < s_hi:
        raise ValueError("path lies outside the grid bounds")
    if s_lo > 0.0 or s_hi < path.length:
        warnings.warn(
            f"path clipped to the grid box: arclength [{s_lo:g}, {s_hi:g}] of "
            f"[0, {path.length:g}] retained",
            stacklevel=3,
        )
    return s_lo, s_hi


def coupling_trace_from_field(
    grid: FieldGrid, path: PathSpec, cavity: CavityParams, n_samples: int = 1001
) -> CouplingTrace:
    """Coupling trace g0 * Psi(r(t)) * cos(zeta) along an atom path.

    Psi is the field normalized by its magnitude at the energy-density peak,
    sampled by multilinear interpolation at n_samples equally spaced points;
    times are arclength / velocity measured from the path entry.  Complex
    fields yield complex traces (the interaction uses their magnitude).
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    intensity = grid.field_intensity()
    density = grid.epsilon * intensity
    if not np.any(density > 0):
        raise ValueError("field is identically zero")
    # Psi normalizes by |E| at the energy-density maximum, not the global
    # |E| maximum (the two coincide only when the peak sits in dielectric).
    peak_mag = math.sqrt(float(intensity.flat[int(np.argmax(density))]))
    sample = _interpolators(grid)

    s_lo, s_hi = _clip_to_bounds(path, grid)
    s = np.linspace(s_lo, s_hi, n_samples)
    positions = np.asarray(path.entry) + np.outer(s, np.asarray(path.direction))
    psi = sample(positions) / peak_mag
    slack = float(np.max(np.abs(psi))) - 1.0
    if slack > 1e-9:
        warnings.warn(
            f"|Psi| exceeds 1 by {slack:.3g} along the path; the field magnitude "
            "is larger there than at the energy-density peak",
            stacklevel=2,
        )
    values = cavity.g0 * psi * math.cos(path.zeta)
    if np.allclose(values.imag, 0.0):
        values = values.real
    return CouplingTrace(s / path.velocity, values, velocity=path.velocity)


def _rod_coverage(x, y, cx, cy, radius, hx, hy, sub=4):
    """Fraction of each (hx x hy) cell covered by the rod, by subcell sampling.

    Anti-aliasing the rod edges keeps grid sums convergent under refinement;
    hard-rasterized disks would make cell counts jitter at O(h).
    """
    cover = np.zeros(np.broadcast(x, y).shape)
    offsets = (np.arange(sub) + 0.5) / sub - 0.5
    for ox in offsets:
        for oy in offsets:
            inside = (x + ox * hx - cx) ** 2 + (y + oy * hy - cy) ** 2 <= radius**2
            cover += inside
    return cover / sub**2


def _triangular_rod_epsilon(
    x: np.ndarray,
    y: np.ndarray,
    lattice_const: float,
    hx: float,
    hy: float,
    rod_eps: float = 12.0,
    rod_radius_frac: float = 0.175,
    defect_radius_frac: float = 0.15,
) -> np.ndarray:
    """Dielectric map: triangular lattice of rods with a reduced rod at the origin."""
    l = lattice_const
    cover = np.zeros(np.broadcast(x, y).shape)
    a1 = np.array([l, 0.0])
    a2 = np.array([0.5 * l, 0.5 * math.sqrt(3.0) * l])
    reach_i = int(np.ceil((np.max(np.abs(x)) + l) / l)) + 1
    reach_j = int(np.ceil((np.max(np.abs(y)) + l) / a2[1])) + 1
    rod_r = rod_radius_frac * l
    for j in range(-reach_j, reach_j + 1):
        for i in range(-reach_i, reach_i + 1):
            if i == 0 and j == 0:
                continue
            cx, cy = i * a1 + j * a2
            cover = np.maximum(cover, _rod_coverage(x, y, cx, cy, rod_r, hx, hy))
    defect_r = defect_radius_frac * l
    cover = np.maximum(cover, _rod_coverage(x, y, 0.0, 0.0, defect_r, hx, hy))
    return 1.0 + (rod_eps - 1.0) * cover


def synthesize_mode(
    kind: str,
    lattice_const: float,
    decay_radius: float,
    dims: tuple[int, int, int],
    spacing: tuple[float, float, float],
) -> FieldGrid:
    """Deterministic stand-in defect mode for tests and demos.

    kind "cavity2d": scalar TM field on an (nx, ny, 1) grid.  kind
    "cavity3d": 3-component complex field with a dominant E_z whose central
    plane carries >= 99% of the in-plane energy.  Both place the maximum of
    eps |E|^2 at the box center (use odd dims so a cell center sits exactly
    there) and decay radially while oscillating at the lattice period.
    """
    if kind not in ("cavity2d", "cavity3d"):
        raise ValueError(f"unknown synthetic mode kind {kind!r}")
    if not (lattice_const > 0 and decay_radius > 0):
        raise ValueError("lattice_const and decay_radius must be positive")
    nx, ny, nz = dims
    if kind == "cavity2d" and nz != 1:
        raise ValueError("cavity2d grids must have nz = 1")
    if kind == "cavity3d" and nz < 3:
        raise ValueError("cavity3d grids need nz >= 3")
    box = np.asarray(dims) * np.asarray(spacing)
    origin = tuple(-0.5 * box)
    xs = origin[0] + (np.arange(nx) + 0.5) * spacing[0]
    ys = origin[1] + (np.arange(ny) + 0.5) * spacing[1]
    zs = origin[2] + (np.arange(nz) + 0.5) * spacing[2]
    x, y = np.meshgrid(xs, ys, indexing="ij")
    rho = np.hypot(x, y)
    radial = np.exp(-rho / decay_radius) * np.cos(np.pi * rho / lattice_const)
    eps2d = _triangular_rod_epsilon(x, y, lattice_const, spacing[0], spacing[1])

    if kind == "cavity2d":
        field = radial.astype(complex)[:, :, None]
        epsilon = eps2d[:, :, None]
        return FieldGrid(
            spacing=tuple(spacing),
            origin=origin,
            epsilon=epsilon,
            field=field,
            lattice_const=lattice_const,
        )

    # cavity3d: extrude rods, modulate axially, add a weak in-plane admixture
    # and a slowly varying phase so the field is genuinely complex (also in
    # the central plane, hence the x term).
    axial = np.cos(np.pi * zs / box[2])
    phase = np.exp(
        1j * np.pi * (0.35 * zs[None, None, :] / box[2] + 0.2 * x[:, :, None] / box[0])
    )
    ez = radial[:, :, None] * axial[None, None, :] * phase
    admix = 0.07
    field = np.zeros((nx, ny, nz, 3), dtype=complex)
    field[..., 0] = admix * ez
    field[..., 1] = 0.5 * admix * ez
    field[..., 2] = ez
    epsilon = np.repeat(eps2d[:, :, None], nz, axis=2)
    return FieldGrid(
        spacing=tuple(spacing),
        origin=origin,
        epsilon=epsilon,
        field=field,
        lattice_const=lattice_const,
    )


def grid_to_json(grid: FieldGrid, path) -> Path:
    """Serialize a grid to the one-document JSON field format."""
    path = Path(path)
    if grid.components == 1:
        comps = [grid.field]
    else:
        comps = [grid.field[..., c] for c in range(3)]
    doc = {
        "dims": list(grid.dims),
        "spacing_m": list(grid.spacing),
        "origin_m": list(grid.origin),
        "components": grid.components,
        "epsilon": grid.epsilon.ravel().tolist(),
        "field_re": [c.real.ravel().tolist() for c in comps],
        "field_im": [c.imag.ravel().tolist() for c in comps],
    }
    if grid.lattice_const is not None:
        doc["lattice_const_m"] = grid.lattice_const
    path.write_text(json.dumps(doc))
    return path


def grid_from_json(path) -> FieldGrid:
    """Load a grid written by :func:`grid_to_json`."""
    doc = json.loads(Path(path).read_text())
    dims = tuple(int(n) for n in doc["dims"])
    comps = int(doc["components"])
    if comps not in (1, 3):
        raise ValueError(f"components must be 1 or 3, got {comps}")
    eps = np.asarray(doc["epsilon"], dtype=float).reshape(dims)
    planes = [
        np.asarray(re, dtype=float).reshape(dims)
        + 1j * np.asarray(im, dtype=float).reshape(dims)
        for re, im in zip(doc["field_re"], doc["field_im"])
    ]
    if len(planes) != comps:
        raise ValueError("field component count mismatch")
    field = planes[0] if comps == 1 else np.stack(planes, axis=-1)
    return FieldGrid(
        spacing=tuple(float(h) for h in doc["spacing_m"]),
        origin=tuple(float(o) for o in doc["origin_m"]),
        epsilon=eps,
        field=field,
        lattice_const=doc.get("lattice_const_m"),
    )
