import math

import pytest
from hypothesis import given, strategies as st
from mpmath import mp, mpf

from origami_motor.errors import GeometryError, ParameterError
from origami_motor.geometry import (
    CylinderSpec,
    KreslingCell,
    cell_height,
    deployed_geometry,
    expansion_metrics,
    format_ratio,
    max_fold_angle,
    nesting_check,
    side_length,
)

ROTOR = CylinderSpec(KreslingCell.from_degrees(30, 10, 57), 2, "rotor")
STATOR = CylinderSpec(KreslingCell.from_degrees(41, 8, 57), 2, "stator")


def hp_geometry(R, N, theta0_deg):
    """High-precision (a, theta_max, h) straight from the closed forms."""
    mp.dps = 40
    th0 = mpf(theta0_deg) * mp.pi / 180
    a = 2 * R * mp.sin(mp.pi / N)
    tm = mp.pi - 2 * mp.pi / N - th0
    h = R * mp.sqrt(2 * (mp.cos(th0) - mp.cos(tm)))
    return float(a), float(tm), float(h)


@pytest.mark.parametrize("R, N, expected", [(30, 10, 18.541), (41, 8, 31.380)])
def test_side_length_table_values(R, N, expected):
    cell = KreslingCell.from_degrees(R, N, 57)
    assert side_length(cell) == pytest.approx(expected, abs=5e-4)
    assert side_length(cell) == pytest.approx(hp_geometry(R, N, 57)[0], abs=1e-12)


def test_side_length_large_n_approaches_arc():
    cell = KreslingCell(30.0, 255, 0.1)
    a = side_length(cell)
    assert a < 2 * math.pi * 30 / 255
    # N is capped at 255; evaluate the limit on the bare formula
    a_big = 2 * 30 * math.sin(math.pi / 10000)
    assert a_big == pytest.approx(0.018850, abs=5e-7)
    assert abs(a_big * 10000 / (2 * math.pi * 30) - 1) < 1e-6


@pytest.mark.parametrize("N, theta0_deg, expected_deg", [(10, 57, 87), (8, 57, 78), (4, 0, 90)])
def test_max_fold_angle(N, theta0_deg, expected_deg):
    cell = KreslingCell.from_degrees(30, N, theta0_deg)
    assert math.degrees(max_fold_angle(cell)) == pytest.approx(expected_deg, abs=1e-12)


def test_max_fold_angle_infeasible():
    cell = KreslingCell.from_degrees(30, 8, 80)
    with pytest.raises(GeometryError):
        max_fold_angle(cell)
    with pytest.raises(GeometryError):
        cell_height(cell)


@pytest.mark.parametrize("R, N, expected", [(30, 10, 29.768), (41, 8, 33.646)])
def test_cell_height_table_values(R, N, expected):
    cell = KreslingCell.from_degrees(R, N, 57)
    assert cell_height(cell) == pytest.approx(expected, abs=5e-4)
    assert cell_height(cell) == pytest.approx(hp_geometry(R, N, 57)[2], abs=1e-11)


def test_cell_height_flat_folded_limit():
    N = 10
    cell = KreslingCell(30.0, N, (math.pi - 2 * math.pi / N) / 2)
    assert cell_height(cell) == pytest.approx(0.0, abs=1e-6)


def test_cell_height_decreases_to_zero_near_limit():
    N = 10
    limit = (math.pi - 2 * math.pi / N) / 2
    heights = [cell_height(KreslingCell(30.0, N, limit - d)) for d in (0.3, 0.2, 0.1, 0.05, 0.01, 0.001)]
    assert all(b < a for a, b in zip(heights, heights[1:]))
    assert heights[-1] < 0.1 * heights[0]


@pytest.mark.parametrize("spec, expected", [(STATOR, 67.29), (ROTOR, 59.54)])
def test_body_height(spec, expected):
    geo = deployed_geometry(spec)
    assert geo.body_height == pytest.approx(expected, abs=5e-3)
    assert geo.body_height == 2 * geo.h
    assert geo.circumradius > spec.cell.R


def test_single_cell_body_height():
    spec = CylinderSpec(ROTOR.cell, 1)
    geo = deployed_geometry(spec)
    assert geo.body_height == geo.h


def test_stator_taller_than_rotor():
    assert deployed_geometry(STATOR).body_height > deployed_geometry(ROTOR).body_height


def test_deployed_geometry_repeatable():
    assert deployed_geometry(ROTOR) == deployed_geometry(ROTOR)


@pytest.mark.parametrize("kwargs", [
    dict(R=0.0, N=8, theta0=1.0),
    dict(R=30.0, N=2, theta0=0.5),
    dict(R=30.0, N=256, theta0=0.5),
    dict(R=30.0, N=8.0, theta0=0.5),
    dict(R=30.0, N=8, theta0=-0.1),
    dict(R=30.0, N=4, theta0=math.pi / 2),
])
def test_invalid_cells(kwargs):
    with pytest.raises(ParameterError):
        KreslingCell(**kwargs)


@pytest.mark.parametrize("M", [0, 65])
def test_invalid_axial_count(M):
    with pytest.raises(ParameterError):
        CylinderSpec(ROTOR.cell, M)


def test_expansion_ratio():
    ratio = expansion_metrics(26.5, 66.0)
    assert round(ratio, 2) == 2.49
    assert format_ratio(ratio) == "2.5:1"
    assert expansion_metrics(12.0, 12.0) == 1.0
    assert expansion_metrics(10.0, 30.0) == 3.0
    with pytest.raises(ParameterError):
        expansion_metrics(0.0, 10.0)


def test_nesting_table_pair():
    report = nesting_check(ROTOR, STATOR)
    assert report.circum_gap == pytest.approx(11.0)
    assert report.inscribed_gap == pytest.approx(41 - 30 / math.cos(math.radians(18)), abs=1e-12)
    assert report.inscribed_gap == pytest.approx(9.456, abs=1e-3)
    assert report.feasible


def test_nesting_identical_specs_infeasible():
    assert not nesting_check(ROTOR, ROTOR).feasible


def test_nesting_tight_stator():
    stator = CylinderSpec(KreslingCell.from_degrees(32, 8, 57), 2, "stator")
    report = nesting_check(ROTOR, stator)
    assert report.inscribed_gap == pytest.approx(0.456, abs=1e-3)
    assert report.feasible


@given(
    R=st.floats(1.0, 500.0),
    dR=st.floats(0.01, 100.0),
    N=st.integers(3, 255),
)
def test_side_length_monotone_in_radius(R, dR, N):
    lo = side_length(KreslingCell(R, N, 0.1))
    hi = side_length(KreslingCell(R + dR, N, 0.1))
    assert hi > lo
    assert lo < math.pi * R


@given(R=st.floats(1.0, 500.0), N=st.integers(3, 254))
def test_side_length_decreases_with_n(R, N):
    assert side_length(KreslingCell(R, N + 1, 0.1)) < side_length(KreslingCell(R, N, 0.1))
