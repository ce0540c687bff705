"""Asymptotic amplitude surfaces over velocity and coupling-ratio grids.

For each velocity the full-transit pulse area is computed once by
quadrature; the closed form then fills a whole row of ratios.  Surfaces
store signed real amplitudes (the closed-form rail amplitudes are real), not
probabilities.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coupling import GenericProfile, GenericProfileParams, pulse_area

__all__ = ["SweepGrid", "surface", "slice_surface", "surfaces_to_csv"]


@dataclass(frozen=True)
class SweepGrid:
    """Amplitude surfaces a(V, p) and b(V, p) for one initial rail state.

    a is the amplitude left on |10> and b the amplitude on |01>; rows follow
    v_values, columns p_values.
    """

    v_values: np.ndarray
    p_values: np.ndarray
    initial: str
    a_surface: np.ndarray
    b_surface: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.v_values, dtype=float)
        p = np.asarray(self.p_values, dtype=float)
        shape = (v.size, p.size)
        a = np.asarray(self.a_surface, dtype=float)
        b = np.asarray(self.b_surface, dtype=float)
        if a.shape != shape or b.shape != shape:
            raise ValueError("surface shapes must be (len(v), len(p))")
        if not (np.all(np.diff(v) > 0) and np.all(np.diff(p) > 0)):
            raise ValueError("v_values and p_values must be ascending")
        for arr in (v, p, a, b):
            arr.flags.writeable = False
        object.__setattr__(self, "v_values", v)
        object.__setattr__(self, "p_values", p)
        object.__setattr__(self, "a_surface", a)
        object.__setattr__(self, "b_surface", b)

    def slice(self, axis: str, value: float) -> np.ndarray:
        return slice_surface(self, axis, value)


def _row_amplitudes(area_a: float, p_values: np.ndarray, initial: str):
    """Closed-form (a, b) across ratios for one velocity's pulse area."""
    g_a = area_a
    g_b = p_values * g_a
    lam = np.hypot(g_a, g_b)
    small = lam < 1e-6
    lam_safe = np.where(small, 1.0, lam)
    c = np.where(small, -0.5 + lam**2 / 24.0, (np.cos(lam_safe) - 1.0) / lam_safe**2)
    if initial == "100":
        a = 1.0 + g_a**2 * c
        b = g_a * g_b * c
    else:  # initial "010": amplitudes still reported on (|10>, |01>)
        a = g_a * g_b * c
        b = 1.0 + g_b**2 * c
    return a, b


def surface(
    family: GenericProfileParams,
    v_range: tuple[float, float] = (150.0, 650.0),
    p_range: tuple[float, float] = (0.0, 1.0),
    initial: str = "100",
    resolution: tuple[int, int] = (251, 201),
    workers: int = 1,
    tol: float = 1e-10,
) -> SweepGrid:
    """Evaluate the amplitude surfaces on a (velocity x ratio) grid.

    family's velocity field is ignored; each grid velocity gets its own
    full-transit quadrature.  Results are independent of worker count.
    """
    if initial not in ("100", "010"):
        raise ValueError("initial state must be '100' or '010'")
    n_v, n_p = resolution
    if n_v < 2 or n_p < 2:
        raise ValueError("resolution must be at least 2 per axis")
    if not (0 < v_range[0] < v_range[1] and math.isfinite(v_range[1])):
        raise ValueError(f"invalid velocity range {v_range!r}")
    if not (0 <= p_range[0] < p_range[1]):
        raise ValueError(f"invalid ratio range {p_range!r}")
    v_values = np.linspace(v_range[0], v_range[1], n_v)
    p_values = np.linspace(p_range[0], p_range[1], n_p)

    a_surf = np.empty((n_v, n_p))
    b_surf = np.empty((n_v, n_p))

    def fill_row(i: int) -> None:
        profile = GenericProfile(family.replace_velocity(float(v_values[i])))
        area = pulse_area(profile, tol=tol)
        a_surf[i], b_surf[i] = _row_amplitudes(area, p_values, initial)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_row, range(n_v)))
    else:
        for i in range(n_v):
            fill_row(i)
    return SweepGrid(v_values, p_values, initial, a_surf, b_surf)


def slice_surface(grid: SweepGrid, axis: str, value: float) -> np.ndarray:
    """Extract the nearest gridline as rows of (abscissa, a, b).

    axis "V" slices at fixed velocity (abscissa = p); axis "p" at fixed
    ratio (abscissa = V).  No interpolation; value must lie within range.
    """
    if axis not in ("V", "p"):
        raise ValueError("axis must be 'V' or 'p'")
    coords = grid.v_values if axis == "V" else grid.p_values
    if not coords[0] <= value <= coords[-1]:
        raise ValueError(
            f"{axis} = {value!r} outside the grid range [{coords[0]}, {coords[-1]}]"
        )
    idx = int(np.argmin(np.abs(coords - value)))
    if axis == "V":
        return np.column_stack(
            (grid.p_values, grid.a_surface[idx], grid.b_surface[idx])
        )
    return np.column_stack(
        (grid.v_values, grid.a_surface[:, idx], grid.b_surface[:, idx])
    )


def surfaces_to_csv(grid: SweepGrid, out_dir, stem: str) -> tuple[Path, Path]:
    """One CSV per surface: header of p values, first column V, cells = amplitude."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, surf in (("a", grid.a_surface), ("b", grid.b_surface)):
        path = out_dir / f"{stem}_{name}.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["v_m_per_s"] + [f"{p:.17g}" for p in grid.p_values])
            for v, row in zip(grid.v_values, surf):
                writer.writerow([f"{v:.17g}"] + [f"{x:.17g}" for x in row])
        paths.append(path)
    return tuple(paths)
