"""Deterministic synthetic mission generator.

Stands in for the original vehicle recordings: normal missions are a
stationary, gravity-aligned platform with band-limited sensor noise;
abnormal missions add a raised-cosine angular-velocity pulse whose area is
exactly pi rad, flipping the platform upside down. Everything is a pure
function of the ScenarioConfig (RNG is numpy's PCG64, seeded), so repeated
generation is bit-identical.

No claim of physical fidelity: this is acceptance-harness scaffolding with
just enough structure (gravity in the body frame, integrated orientation)
for the downstream pipeline to have something real to detect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import ConfigError
from .ingest import ImuTrace, Mission

GRAVITY = 9.81
_AXES = {"x": 0, "y": 1, "z": 2}
# max per-substep rotation angle during quaternion integration, rad
_MAX_STEP_ANGLE = 0.01
# default attitude-restoring gain, 1/s (see ScenarioConfig.restore_gain)
DEFAULT_RESTORE_GAIN = 2.0


@dataclass
class FlipConfig:
    t0: float
    duration: float
    peak_rate: float
    axis: str = "x"


@dataclass
class ScenarioConfig:
    seed: int = 0
    duration: float = 30.0
    imu_rate: float = 90.0
    frame_rate: float = 30.0
    noise_w: float = 0.05
    noise_a: float = 0.05
    restore_gain: float = DEFAULT_RESTORE_GAIN
    # smoothing cutoff for sensor noise, as a fraction of imu_rate
    noise_cutoff_ratio: float = 0.125
    # white jitter on the recorded orientation channels (estimator noise),
    # as a fraction of noise_w so the zero-noise scenario stays exactly constant
    q_jitter_ratio: float = 0.04
    flip: FlipConfig | None = None


def _validate(cfg):
    if cfg.duration <= 0 or cfg.imu_rate <= 0 or cfg.frame_rate <= 0:
        raise ConfigError("duration, imu_rate and frame_rate must be positive")
    if cfg.noise_w < 0 or cfg.noise_a < 0:
        raise ConfigError("noise levels must be non-negative")
    if not 0.0 < cfg.noise_cutoff_ratio <= 0.5 or cfg.q_jitter_ratio < 0:
        raise ConfigError("noise_cutoff_ratio must be in (0, 0.5], "
                          "q_jitter_ratio non-negative")
    if cfg.flip is not None:
        f = cfg.flip
        if f.axis not in _AXES:
            raise ConfigError(f"flip axis must be one of x/y/z, got {f.axis!r}")
        if f.peak_rate <= 0 or f.duration <= 0:
            raise ConfigError("flip peak_rate and duration must be positive")
        if f.t0 < 0 or f.t0 + f.duration > cfg.duration:
            raise ConfigError("flip window must lie within [0, duration]")
        # raised cosine at peak_rate over f.duration bounds the area by
        # peak_rate * duration / 2; it must reach pi for a half turn
        if f.peak_rate * f.duration / 2.0 < math.pi - 1e-12:
            raise ConfigError(
                f"flip pulse cannot reach area pi: peak_rate*duration/2 = "
                f"{f.peak_rate * f.duration / 2.0:.4f} < pi")
        if f.peak_rate < 3.0 * cfg.restore_gain:
            raise ConfigError(
                f"flip peak_rate {f.peak_rate} too small to overcome the "
                f"attitude restoring gain {cfg.restore_gain} (need >= 3x)")


def quat_mul(p, q):
    """Hamilton product, components ordered (x, y, z, w)."""
    px, py, pz, pw = p
    qx, qy, qz, qw = q
    return np.array([
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
        pw * qw - px * qx - py * qy - pz * qz,
    ])


def integrate_quat(q, w, dt):
    """One first-order body-rate step: q <- normalize(q + 0.5*q*(w,0)*dt)."""
    wq = np.array([w[0], w[1], w[2], 0.0])
    q = q + 0.5 * quat_mul(q, wq) * dt
    return q / np.linalg.norm(q)


def rotate_to_body(q, v):
    """Rotate a world vector into the body frame of orientation q."""
    qc = np.array([-q[0], -q[1], -q[2], q[3]])
    vq = np.array([v[0], v[1], v[2], 0.0])
    return quat_mul(qc, quat_mul(vq, q))[:3]


def _restoring_rate(q, gain):
    """Bistable attitude-restoring angular velocity -gain*sin(2*theta)*axis.

    Zero at the identity and at any half-turn, so an upright platform jitters
    around level and a flipped one stays flipped; in between it behaves like
    a statically stable body falling toward the nearer pose.
    """
    if q[3] < 0.0:
        q = -q
    v = q[:3]
    norm_v = np.linalg.norm(v)
    if norm_v < 1e-12:
        return np.zeros(3)
    angle = 2.0 * math.atan2(norm_v, q[3])
    return -gain * math.sin(2.0 * angle) * (v / norm_v)


def _bandlimited_noise(rng, n, cutoff_ratio=0.125):
    """Unit-variance low-pass noise: single-pole smoothing of white noise."""
    a = math.exp(-2.0 * math.pi * cutoff_ratio)
    x = rng.standard_normal(n)
    y = lfilter([1.0 - a], [1.0, -a], x)
    gain = math.sqrt((1.0 - a) / (1.0 + a))
    return y / gain


def _pulse_rate(flip, t):
    """Raised-cosine angular rate at time t; area over the pulse is pi rad."""
    dur_eff = 2.0 * math.pi / flip.peak_rate
    tau = t - flip.t0
    if tau < 0.0 or tau > dur_eff:
        return 0.0
    return 0.5 * flip.peak_rate * (1.0 - math.cos(2.0 * math.pi * tau / dur_eff))


def _generate(cfg):
    _validate(cfg)
    rng = np.random.default_rng(cfg.seed)
    n = int(round(cfg.duration * cfg.imu_rate))
    if n < 2:
        raise ConfigError("duration * imu_rate must give at least 2 samples")
    t = np.arange(n) / cfg.imu_rate
    dt = 1.0 / cfg.imu_rate

    cut = cfg.noise_cutoff_ratio
    w = cfg.noise_w * np.column_stack([_bandlimited_noise(rng, n, cut)
                                       for _ in range(3)])
    a_noise = cfg.noise_a * np.column_stack([_bandlimited_noise(rng, n, cut)
                                             for _ in range(3)])
    axis = _AXES[cfg.flip.axis] if cfg.flip is not None else None
    if cfg.flip is not None:
        w[:, axis] += np.array([_pulse_rate(cfg.flip, ti) for ti in t])

    q = np.array([0.0, 0.0, 0.0, 1.0])
    quats = np.empty((n, 4))
    accels = np.empty((n, 3))
    pulse_peak = cfg.flip.peak_rate if cfg.flip is not None else 0.0
    for i in range(n):
        w[i] += _restoring_rate(q, cfg.restore_gain)
        quats[i] = q
        accels[i] = rotate_to_body(q, (0.0, 0.0, GRAVITY)) + a_noise[i]
        # substeps sized so no step rotates more than _MAX_STEP_ANGLE; noise
        # and restoring are held over the sample interval, the flip pulse is
        # evaluated analytically at substep midpoints for accuracy
        rate_bound = float(np.linalg.norm(w[i])) + pulse_peak
        n_sub = max(1, int(math.ceil(rate_bound * dt / _MAX_STEP_ANGLE)))
        dt_sub = dt / n_sub
        for s in range(n_sub):
            w_sub = w[i].copy()
            if cfg.flip is not None:
                t_mid = t[i] + (s + 0.5) * dt_sub
                w_sub[axis] += _pulse_rate(cfg.flip, t_mid) - _pulse_rate(cfg.flip, t[i])
            q = integrate_quat(q, w_sub, dt_sub)

    if cfg.q_jitter_ratio > 0.0 and cfg.noise_w > 0.0:
        quats += cfg.q_jitter_ratio * cfg.noise_w * rng.standard_normal((n, 4))

    m = int(round(cfg.duration * cfg.frame_rate))
    if m < 2:
        raise ConfigError("duration * frame_rate must give at least 2 frames")
    frames = np.arange(m) / cfg.frame_rate
    frames = frames[frames <= t[-1]]

    channels = np.column_stack([quats, w, accels])
    mission_id = f"synth-seed{cfg.seed}" + ("-flip" if cfg.flip is not None else "")
    return Mission(id=mission_id, samples=ImuTrace(t=t, channels=channels),
                   frames=frames)


def gen_normal_mission(cfg):
    """Stationary mission with band-limited noise; no flip allowed."""
    if cfg.flip is not None:
        raise ConfigError("gen_normal_mission got a config with a flip")
    return _generate(cfg)


def gen_flip_mission(cfg):
    """Mission with a half-turn (pi rad) angular-rate pulse on one axis."""
    if cfg.flip is None:
        raise ConfigError("gen_flip_mission needs a flip config")
    return _generate(cfg)
