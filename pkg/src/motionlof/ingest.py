"""Parsing and validation of IMU traces and frame-clock files.

A mission is stored on disk as two flat files:

* an IMU trace: CSV with header ``t,qx,qy,qz,qw,wx,wy,wz,ax,ay,az``
  (or JSONL with the same keys, one object per line), UTF-8, ``\\n`` endings;
* a frame file: one decimal frame timestamp per line.

The ten physical channels are always kept in the fixed order
``qx,qy,qz,qw,wx,wy,wz,ax,ay,az`` (orientation quaternion, angular
velocity in rad/s, linear acceleration in m/s^2). Quaternion norm is not
enforced; only finiteness is checked.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, DataValueError, FormatError, OrderingError

CHANNELS = ("qx", "qy", "qz", "qw", "wx", "wy", "wz", "ax", "ay", "az")
IMU_HEADER = ("t",) + CHANNELS
N_CHANNELS = len(CHANNELS)


@dataclass
class ImuTrace:
    """Ordered IMU samples: timestamps ``t`` (n,) and ``channels`` (n, 10)."""

    t: np.ndarray
    channels: np.ndarray

    def __len__(self):
        return self.t.shape[0]


@dataclass
class Mission:
    """One experiment's recording: an IMU trace plus its frame clock."""

    id: str
    samples: ImuTrace
    frames: np.ndarray


def _check_row(t, values, row_num):
    if not math.isfinite(t):
        raise DataValueError(f"row {row_num}: non-finite value in column t")
    for name, v in zip(CHANNELS, values):
        if not math.isfinite(v):
            raise DataValueError(f"row {row_num}: non-finite value in column {name}")


def parse_imu(path):
    """Parse an IMU trace file (CSV or JSONL) into an ImuTrace.

    Rows are kept in file order; ``t`` must be strictly increasing and every
    field finite. Row numbers in error messages are 1-based data rows.
    """
    path = str(path)
    if path.endswith(".jsonl"):
        return _parse_imu_jsonl(path)
    return _parse_imu_csv(path)


def _parse_imu_csv(path):
    ts, rows = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file, expected header "
                              + ",".join(IMU_HEADER))
        if tuple(h.strip() for h in header) != IMU_HEADER:
            raise FormatError(f"{path}: bad header {header!r}, expected "
                              + ",".join(IMU_HEADER))
        for row_num, row in enumerate(reader, start=1):
            if len(row) != len(IMU_HEADER):
                raise FormatError(f"{path}: row {row_num} has {len(row)} columns, "
                                  f"expected {len(IMU_HEADER)}")
            try:
                values = [float(v) for v in row]
            except ValueError:
                raise FormatError(f"{path}: row {row_num}: unparsable number")
            _check_row(values[0], values[1:], row_num)
            ts.append(values[0])
            rows.append(values[1:])
    return _finish_trace(path, ts, rows)


def _parse_imu_jsonl(path):
    ts, rows = [], []
    with open(path, encoding="utf-8") as fh:
        for row_num, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                raise FormatError(f"{path}: line {row_num}: invalid JSON")
            missing = [k for k in IMU_HEADER if k not in obj]
            if missing:
                raise FormatError(f"{path}: line {row_num}: missing keys {missing}")
            try:
                t = float(obj["t"])
                values = [float(obj[k]) for k in CHANNELS]
            except (TypeError, ValueError):
                raise FormatError(f"{path}: line {row_num}: unparsable number")
            _check_row(t, values, row_num)
            ts.append(t)
            rows.append(values)
    return _finish_trace(path, ts, rows)


def _finish_trace(path, ts, rows):
    for i in range(1, len(ts)):
        if ts[i] <= ts[i - 1]:
            raise OrderingError(f"{path}: row {i + 1}: timestamp {ts[i]!r} not "
                                f"greater than previous {ts[i - 1]!r}")
    return ImuTrace(t=np.asarray(ts, dtype=np.float64),
                    channels=np.asarray(rows, dtype=np.float64).reshape(len(ts), N_CHANNELS))


def parse_frames(path):
    """Parse a frame-clock file: one strictly increasing decimal per line."""
    path = str(path)
    frames = []
    with open(path, encoding="utf-8") as fh:
        for line_num, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                v = float(line)
            except ValueError:
                raise FormatError(f"{path}: line {line_num}: unparsable timestamp {line!r}")
            if not math.isfinite(v):
                raise DataValueError(f"{path}: line {line_num}: non-finite timestamp")
            if frames and v <= frames[-1]:
                raise OrderingError(f"{path}: line {line_num}: timestamp {v!r} not "
                                    f"greater than previous {frames[-1]!r}")
            frames.append(v)
    if len(frames) < 2:
        raise FormatError(f"{path}: at least 2 frames required, got {len(frames)}")
    return np.asarray(frames, dtype=np.float64)


def validate_mission(samples, frames, mission_id="mission"):
    """Combine a parsed trace and frame clock into a Mission.

    The sample span and frame span must overlap; a frame clock that extends
    beyond the sample span only triggers a warning (those frames end up with
    empty windows downstream).
    """
    if len(samples) < 2:
        raise FormatError(f"{mission_id}: at least 2 samples required")
    frames = np.asarray(frames, dtype=np.float64)
    if frames.shape[0] < 2:
        raise FormatError(f"{mission_id}: at least 2 frames required")
    s_lo, s_hi = samples.t[0], samples.t[-1]
    f_lo, f_hi = frames[0], frames[-1]
    if f_hi < s_lo or f_lo > s_hi:
        raise CoverageError(f"{mission_id}: frame span [{f_lo}, {f_hi}] does not "
                            f"overlap sample span [{s_lo}, {s_hi}]")
    if f_lo < s_lo or f_hi > s_hi:
        warnings.warn(f"{mission_id}: frame clock [{f_lo}, {f_hi}] extends beyond "
                      f"sample span [{s_lo}, {s_hi}]", stacklevel=2)
    return Mission(id=mission_id, samples=samples, frames=frames)


def load_mission(imu_path, frames_path, mission_id=None):
    """Parse + validate a mission from its two files."""
    if mission_id is None:
        mission_id = str(imu_path)
    return validate_mission(parse_imu(imu_path), parse_frames(frames_path), mission_id)


def write_mission(mission, imu_path, frames_path):
    """Write a Mission back to its on-disk format.

    Floats are written with repr() so a re-parse is bit-identical.
    """
    with open(imu_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(IMU_HEADER) + "\n")
        for i in range(len(mission.samples)):
            row = [mission.samples.t[i]] + list(mission.samples.channels[i])
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    with open(frames_path, "w", encoding="utf-8", newline="\n") as fh:
        for v in mission.frames:
            fh.write(repr(float(v)) + "\n")
