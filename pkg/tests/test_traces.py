import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from origami_motor.errors import DataQualityError, TraceFormatError
from origami_motor.traces import (
    SpeedTrace,
    format_table,
    format_trace,
    ingest_trace,
    parse_trace,
    unwrap_angles,
    write_trace,
)


def test_frame_indexed_trace_gets_timestamps():
    text = "# fps=2000\nframe,theta_rad\n0,0.0\n1,0.01\n2,0.02\n"
    tr = parse_trace(text)
    assert tr.t.tolist() == [0.0, 0.0005, 0.001]
    assert tr.dt == pytest.approx(0.5e-3)
    assert tr.is_uniform()


def test_frame_rate_argument_overrides_missing_metadata():
    tr = parse_trace("frame,theta_rad\n0,0\n10,1\n", frame_rate=100.0)
    assert tr.t.tolist() == [0.0, 0.1]
    assert tr.metadata["fps"] == 100.0


def test_frame_indexed_without_rate_fails():
    with pytest.raises(TraceFormatError):
        parse_trace("frame,theta_rad\n0,0\n1,0.1\n")


def test_unwrap_across_revolution():
    theta = unwrap_angles(np.array([6.20, 6.27, 0.05]))
    assert theta[:2].tolist() == [6.20, 6.27]
    assert theta[2] == pytest.approx(0.05 + 2 * math.pi, abs=1e-12)
    assert theta[2] == pytest.approx(6.333, abs=1e-3)


def test_unwrap_backwards():
    theta = unwrap_angles(np.array([0.05, -0.02, 6.22]))
    assert theta[2] == pytest.approx(6.22 - 2 * math.pi, abs=1e-12)


def test_unwrap_rejects_unexplained_jump():
    with pytest.raises(DataQualityError):
        unwrap_angles(np.array([0.0, 0.1, 3.4]))


@given(st.lists(st.floats(-1.5, 1.5), min_size=1, max_size=200), st.floats(-10, 10))
def test_unwrap_inverts_wrapping(steps, start):
    truth = start + np.concatenate([[0.0], np.cumsum(steps)])
    wrapped = np.mod(truth, 2 * math.pi)
    recovered = unwrap_angles(wrapped)
    assert np.allclose(recovered - recovered[0], truth - truth[0], atol=1e-9)


def test_degrees_header():
    tr = parse_trace("t_s,theta_deg\n0,0\n0.1,90\n0.2,180\n")
    assert tr.theta.tolist() == pytest.approx([0.0, math.pi / 2, math.pi])


def test_angle_unit_override():
    tr = parse_trace("t_s,theta_rad\n0,0\n0.1,90\n", angle_unit="deg")
    assert tr.theta[1] == pytest.approx(math.pi / 2)
    with pytest.raises(TraceFormatError):
        parse_trace("t_s,theta_rad\n0,0\n", angle_unit="grad")


def test_crlf_and_comments():
    text = "# voltage_kV=-25\r\n# note=bench run\r\nt_s,theta_rad\r\n0,0\r\n\r\n0.5,1\r\n"
    tr = parse_trace(text)
    assert len(tr) == 2
    assert tr.voltage == -25e3
    assert tr.metadata["note"] == "bench run"


@pytest.mark.parametrize("text", ["", "# only a comment\n", "t_s,theta_rad\n"])
def test_empty_trace(text):
    with pytest.raises(TraceFormatError):
        parse_trace(text)


@pytest.mark.parametrize("text", [
    "t_s,theta_rad\n0,0\n0.2,1\n0.1,2\n",
    "t_s,theta_rad\n0,0\n0,1\n",
])
def test_non_monotonic_time(text):
    with pytest.raises(TraceFormatError):
        parse_trace(text)


@pytest.mark.parametrize("text", [
    "time,theta_rad\n0,0\n",
    "t_s,angle\n0,0\n",
    "t_s,theta_rad,speed\n0,0,0\n",
    "t_s,theta_rad\n0,0,1\n",
    "t_s,theta_rad\n0,abc\n",
])
def test_malformed(text):
    with pytest.raises(TraceFormatError):
        parse_trace(text)


def test_speed_trace_validation():
    with pytest.raises(TraceFormatError):
        SpeedTrace(np.array([0.0, 1.0]), np.array([0.0]))
    tr = SpeedTrace(np.array([0.0, 0.1, 0.3]), np.zeros(3))
    assert not tr.is_uniform()
    assert tr.voltage is None


def test_write_and_read_back(tmp_path):
    t = np.arange(5) * 0.5e-3
    tr = SpeedTrace(t, np.sin(t * 1000) / 3, np.cos(t), {"fps": 2000.0, "voltage_kV": -29.0, "schedule": "0:-29000"})
    path = tmp_path / "trace.csv"
    write_trace(tr, path)
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    back = ingest_trace(path)
    assert np.array_equal(back.t, tr.t)
    assert np.array_equal(back.theta, tr.theta)
    assert np.array_equal(back.omega, tr.omega)
    assert back.metadata == tr.metadata
    assert format_trace(back) == format_trace(tr)


def test_format_table():
    text = format_table([[1.0, 0.1], [2.0, 1 / 3]], "a,b", {"model": "x"})
    assert text.splitlines() == ["# model=x", "a,b", "1.0,0.1", f"2.0,{1 / 3!r}"]
