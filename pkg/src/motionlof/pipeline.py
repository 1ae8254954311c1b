"""Glue between missions and the LOF model: features per frame, scores per frame."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lof as lof_mod
from .lof import NoveltyScore, STATUS_INSUFFICIENT, STATUS_SCORED, STATUS_WARMUP
from .spectral import feature_vector
from .windowing import STATUS_OK, chop


@dataclass
class FrameFeatures:
    frame_index: int
    t: float
    status: str
    features: np.ndarray | None


def mission_features(mission, span, bins, min_samples):
    """Per-frame feature records for one mission.

    Frames before ``span`` are warm-up; under-populated windows stay
    "insufficient". Frame order is preserved exactly.
    """
    out = [FrameFeatures(frame_index=i, t=float(mission.frames[i]),
                         status=STATUS_WARMUP, features=None)
           for i in range(min(span, mission.frames.shape[0]))]
    for window in chop(mission, span=span, min_samples=min_samples):
        t = float(mission.frames[window.frame_index])
        if window.status == STATUS_OK:
            out.append(FrameFeatures(frame_index=window.frame_index, t=t,
                                     status=STATUS_SCORED,
                                     features=feature_vector(window, bins)))
        else:
            out.append(FrameFeatures(frame_index=window.frame_index, t=t,
                                     status=STATUS_INSUFFICIENT, features=None))
    return out


def training_matrix(missions, span, bins, min_samples):
    """Stack the scored-frame features of several missions into one matrix."""
    rows = []
    for mission in missions:
        for rec in mission_features(mission, span, bins, min_samples):
            if rec.status == STATUS_SCORED:
                rows.append(rec.features)
    if not rows:
        return np.empty((0, 0))
    return np.vstack(rows)


def score_mission(model, mission, threshold=lof_mod.DEFAULT_THRESHOLD):
    """Score every frame of a mission; returns NoveltyScore per frame, in order."""
    scores = []
    for rec in mission_features(mission, model.span, model.bins, model.min_samples):
        if rec.status == STATUS_SCORED:
            scores.append(lof_mod.abnormality(model, rec.features, threshold=threshold,
                                              frame_index=rec.frame_index, t=rec.t))
        else:
            scores.append(NoveltyScore(frame_index=rec.frame_index, status=rec.status,
                                       t=rec.t))
    return scores
