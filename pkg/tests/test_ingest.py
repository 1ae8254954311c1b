import json

import numpy as np
import pytest

from motionlof import (Mission, load_mission, parse_frames, parse_imu,
                       validate_mission, write_mission)
from motionlof.errors import (CoverageError, DataValueError, FormatError,
                              OrderingError)
from motionlof.ingest import IMU_HEADER, ImuTrace

HEADER = ",".join(IMU_HEADER)


def write_csv(path, rows, header=HEADER):
    lines = [header] + [",".join(str(v) for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def valid_row(t):
    return [t, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.81]


def test_parse_imu_passthrough(tmp_path):
    p = tmp_path / "m.imu.csv"
    write_csv(p, [valid_row(0.0), valid_row(0.1), valid_row(0.2)])
    trace = parse_imu(p)
    assert len(trace) == 3
    assert trace.t.tolist() == [0.0, 0.1, 0.2]
    assert trace.channels.shape == (3, 10)
    assert trace.channels[0, 3] == 1.0


def test_parse_imu_nonmonotone_reports_row(tmp_path):
    p = tmp_path / "m.imu.csv"
    write_csv(p, [valid_row(0.0), valid_row(0.2), valid_row(0.1)])
    with pytest.raises(OrderingError, match="row 3"):
        parse_imu(p)


def test_parse_imu_nan_names_row_and_column(tmp_path):
    p = tmp_path / "m.imu.csv"
    rows = [valid_row(0.0), valid_row(0.1)]
    rows[1][8] = "NaN"  # ax
    write_csv(p, rows)
    with pytest.raises(DataValueError, match="row 2.*ax"):
        parse_imu(p)


def test_parse_imu_bad_header(tmp_path):
    p = tmp_path / "m.imu.csv"
    write_csv(p, [valid_row(0.0)], header="t,qx,qy")
    with pytest.raises(FormatError, match="header"):
        parse_imu(p)


def test_parse_imu_wrong_column_count(tmp_path):
    p = tmp_path / "m.imu.csv"
    p.write_text(HEADER + "\n0.0,1.0\n", encoding="utf-8")
    with pytest.raises(FormatError, match="row 1"):
        parse_imu(p)


def test_parse_imu_jsonl(tmp_path):
    p = tmp_path / "m.imu.jsonl"
    rows = [dict(zip(IMU_HEADER, valid_row(t))) for t in (0.0, 0.5)]
    p.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    trace = parse_imu(p)
    assert trace.t.tolist() == [0.0, 0.5]


def test_parse_imu_jsonl_missing_key(tmp_path):
    p = tmp_path / "m.imu.jsonl"
    row = dict(zip(IMU_HEADER, valid_row(0.0)))
    del row["az"]
    p.write_text(json.dumps(row) + "\n", encoding="utf-8")
    with pytest.raises(FormatError, match="az"):
        parse_imu(p)


def test_parse_frames_basic(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("0.0\n0.0333\n0.0667\n", encoding="utf-8")
    assert parse_frames(p).tolist() == [0.0, 0.0333, 0.0667]


def test_parse_frames_non_increasing(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("1.0\n1.0\n", encoding="utf-8")
    with pytest.raises(OrderingError, match="line 2"):
        parse_frames(p)


def test_parse_frames_empty(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("", encoding="utf-8")
    with pytest.raises(FormatError, match="at least 2 frames"):
        parse_frames(p)


def test_parse_frames_unparsable(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("0.0\nbogus\n", encoding="utf-8")
    with pytest.raises(FormatError, match="line 2"):
        parse_frames(p)


def _trace(ts):
    n = len(ts)
    return ImuTrace(t=np.asarray(ts, float), channels=np.zeros((n, 10)))


def test_validate_mission_overlap():
    mission = validate_mission(_trace([0.0, 5.0, 10.0]), [0.0, 10.0], "m")
    assert isinstance(mission, Mission)


def test_validate_mission_disjoint():
    with pytest.raises(CoverageError):
        validate_mission(_trace([0.0, 1.0]), [5.0, 6.0], "m")


def test_validate_mission_warns_on_overhang():
    with pytest.warns(UserWarning, match="extends beyond"):
        validate_mission(_trace([0.0, 5.0, 10.0]), [0.0, 12.0], "m")


def test_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(0)
    t = np.cumsum(rng.uniform(1e-3, 0.1, size=50))
    trace = ImuTrace(t=t, channels=rng.standard_normal((50, 10)))
    frames = np.array([t[0], t[20], t[-1]])
    mission = Mission("rt", trace, frames)
    imu_p, fr_p = tmp_path / "rt.imu.csv", tmp_path / "rt.frames.txt"
    write_mission(mission, imu_p, fr_p)
    back = load_mission(imu_p, fr_p, "rt")
    assert np.array_equal(back.samples.t, trace.t)
    assert np.array_equal(back.samples.channels, trace.channels)
    assert np.array_equal(back.frames, frames)
