import math

import numpy as np
import pytest

from pcqed import (
    GenericProfile,
    PulseAreas,
    closed_form_amplitudes,
    pulse_area,
    slice_surface,
    surface,
    surfaces_to_csv,
)

from conftest import generic_family


@pytest.fixture(scope="module")
def small_grid():
    return surface(
        generic_family(),
        v_range=(400.0, 600.0),
        p_range=(0.0, 1.0),
        resolution=(41, 51),
    )


class TestSurface:
    def test_zero_ratio_column_is_single_atom(self, small_grid):
        grid = small_grid
        assert grid.p_values[0] == 0.0
        for i, v in enumerate(grid.v_values):
            area = pulse_area(GenericProfile(generic_family(velocity=float(v))))
            assert grid.a_surface[i, 0] == pytest.approx(math.cos(area), abs=1e-9)
            assert grid.b_surface[i, 0] == 0.0

    def test_entangler_cell(self):
        grid = surface(
            generic_family(),
            v_range=(433.0, 453.0),
            p_range=(0.404, 0.424),
            resolution=(3, 3),
        )
        # (433, 0.414) is the first cell of this grid
        assert grid.a_surface[0, 1] == pytest.approx(-1 / math.sqrt(2), abs=0.01)
        assert grid.b_surface[0, 1] == pytest.approx(-1 / math.sqrt(2), abs=0.01)

    def test_cross_amplitude_symmetry(self, small_grid):
        other = surface(
            generic_family(),
            v_range=(400.0, 600.0),
            p_range=(0.0, 1.0),
            resolution=(41, 51),
            initial="010",
        )
        np.testing.assert_allclose(
            small_grid.b_surface, other.a_surface, atol=1e-12
        )

    def test_amplitudes_bounded(self, small_grid):
        total = small_grid.a_surface**2 + small_grid.b_surface**2
        assert float(np.max(total)) <= 1.0 + 1e-9

    def test_fresh_evaluation_matches_grid(self, small_grid):
        rng = np.random.default_rng(31)
        for _ in range(10):
            i = int(rng.integers(small_grid.v_values.size))
            j = int(rng.integers(small_grid.p_values.size))
            v = float(small_grid.v_values[i])
            p = float(small_grid.p_values[j])
            area = pulse_area(GenericProfile(generic_family(velocity=v)))
            a, b, _ = closed_form_amplitudes(PulseAreas(area, p * area))
            assert small_grid.a_surface[i, j] == pytest.approx(float(a.real), abs=1e-12)
            assert small_grid.b_surface[i, j] == pytest.approx(float(b.real), abs=1e-12)

    def test_worker_count_does_not_change_bits(self):
        kwargs = dict(
            v_range=(420.0, 460.0), p_range=(0.3, 0.5), resolution=(11, 13)
        )
        serial = surface(generic_family(), **kwargs, workers=1)
        threaded = surface(generic_family(), **kwargs, workers=4)
        assert np.array_equal(serial.a_surface, threaded.a_surface)
        assert np.array_equal(serial.b_surface, threaded.b_surface)

    def test_invalid_ranges_rejected(self):
        with pytest.raises(ValueError):
            surface(generic_family(), v_range=(0.0, 100.0))
        with pytest.raises(ValueError):
            surface(generic_family(), resolution=(1, 5))
        with pytest.raises(ValueError):
            surface(generic_family(), initial="001")


class TestSlice:
    def test_velocity_slice_crosses_at_silver_ratio(self):
        grid = surface(
            generic_family(),
            v_range=(433.0, 443.0),
            p_range=(0.0, 1.0),
            resolution=(2, 501),
        )
        rows = slice_surface(grid, "V", 433.0)
        crossing = rows[int(np.argmin(np.abs(rows[:, 1] - rows[:, 2]))), 0]
        assert crossing == pytest.approx(0.414, abs=0.01)

    def test_ratio_slice_reaches_full_transfer(self, small_grid):
        rows = slice_surface(small_grid, "p", 1.0)
        idx = int(np.argmin(rows[:, 2]))
        assert rows[idx, 2] <= -0.999
        # full transfer happens near the quoted 565 m/s operating point
        assert rows[idx, 0] == pytest.approx(565.0, rel=0.03)

    def test_zero_coupling_family(self):
        # dipole orthogonal to the mode: couplings vanish identically
        grid = surface(
            generic_family(zeta=math.pi / 2),
            v_range=(400.0, 600.0),
            p_range=(0.0, 1.0),
            resolution=(5, 7),
        )
        rows = slice_surface(grid, "p", 0.5)
        np.testing.assert_allclose(rows[:, 1], 1.0, atol=1e-12)
        np.testing.assert_allclose(rows[:, 2], 0.0, atol=1e-12)

    def test_out_of_range_rejected(self, small_grid):
        with pytest.raises(ValueError):
            slice_surface(small_grid, "V", 700.0)
        with pytest.raises(ValueError):
            slice_surface(small_grid, "x", 500.0)


class TestExport:
    def test_csv_layout(self, tmp_path, small_grid):
        path_a, path_b = surfaces_to_csv(small_grid, tmp_path, "surf")
        lines = path_a.read_text().strip().splitlines()
        header = lines[0].split(",")
        assert header[0] == "v_m_per_s"
        assert len(header) == 1 + small_grid.p_values.size
        assert len(lines) == 1 + small_grid.v_values.size
        first = lines[1].split(",")
        assert float(first[0]) == small_grid.v_values[0]
        assert float(first[1]) == small_grid.a_surface[0, 0]
        assert path_b.name == "surf_b.csv"
