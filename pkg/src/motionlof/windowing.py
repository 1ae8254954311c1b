"""Overlapping per-frame windows over an IMU trace.

Frame ``i`` (for ``i >= span``) gets the half-open window
``[frames[i - span], frames[i])``; consecutive windows therefore share
``(span - 1) / span`` of their extent when the frame clock is uniform.
Frames earlier than ``span`` are warm-up frames and get no window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError

STATUS_OK = "scored"
STATUS_INSUFFICIENT = "insufficient"

DEFAULT_SPAN = 3
DEFAULT_MIN_SAMPLES = 4


def mean_rate(t):
    """Mean sampling rate of a strictly increasing timestamp vector, in Hz."""
    t = np.asarray(t, dtype=np.float64)
    if t.shape[0] < 2:
        raise InsufficientDataError(f"mean_rate needs >= 2 samples, got {t.shape[0]}")
    return (t.shape[0] - 1) / (t[-1] - t[0])


@dataclass
class Window:
    """IMU samples assigned to one video frame.

    ``status`` is "scored" when the window holds at least ``min_samples``
    samples, otherwise "insufficient" (the frame stays in the output stream
    but is never scored). ``t``/``channels`` are views into the mission data.
    """

    frame_index: int
    t_start: float
    t_end: float
    t: np.ndarray
    channels: np.ndarray
    mean_rate: float | None
    status: str

    @property
    def n_samples(self):
        return self.t.shape[0]


def chop(mission, span=DEFAULT_SPAN, min_samples=DEFAULT_MIN_SAMPLES):
    """Chop a mission into overlapping per-frame windows.

    Returns one Window per frame index ``i >= span``. If ``span`` is at least
    the number of frames the result is empty. Sample membership uses the
    half-open interval ``[t_start, t_end)`` so overlapping windows never
    double-count a boundary sample.
    """
    if span < 1:
        raise ValueError(f"span must be >= 1, got {span}")
    frames = mission.frames
    t = mission.samples.t
    windows = []
    for i in range(span, frames.shape[0]):
        t_start = frames[i - span]
        t_end = frames[i]
        lo = np.searchsorted(t, t_start, side="left")
        hi = np.searchsorted(t, t_end, side="left")
        seg_t = t[lo:hi]
        seg_c = mission.samples.channels[lo:hi]
        if hi - lo >= max(min_samples, 2):
            windows.append(Window(frame_index=i, t_start=t_start, t_end=t_end,
                                  t=seg_t, channels=seg_c,
                                  mean_rate=mean_rate(seg_t), status=STATUS_OK))
        else:
            windows.append(Window(frame_index=i, t_start=t_start, t_end=t_end,
                                  t=seg_t, channels=seg_c,
                                  mean_rate=None, status=STATUS_INSUFFICIENT))
    return windows
