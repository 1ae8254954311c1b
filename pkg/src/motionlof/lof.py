"""Local Outlier Factor in novelty-detection mode.

The model memorizes the normalized training matrix and precomputes, per
training point, its k-distance and local reachability density (lrd), with
the point excluded from its own neighborhood. Queries are scored against
the frozen model and are never inserted into it.

Definitions (Euclidean metric throughout):

* k-distance(o): distance from o to its k-th nearest training point.
* N_k(o): all training points within k-distance(o); can exceed k on ties.
* reach-dist_k(p, o) = max(k-distance(o), d(p, o)).
* lrd(p) = |N_k(p)| / sum_o reach-dist_k(p, o).
* LOF(q) = mean_o lrd(o) / lrd(q) over o in N_k(q).

The reported abnormality measure is ``offset - LOF`` (offset defaults to
1.5), so inliers land near 0.5 and isolated queries go negative; a frame is
flagged when abnormality falls strictly below the alarm threshold.

Degenerate data guard: when the reachability sum underflows (k+1 or more
coincident points) lrd is set to the finite sentinel 1e12; ratios of two
sentinel lrds still come out ~1, so co-located points score as inliers.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (InsufficientDataError, ModelChecksumError, ModelFormatError,
                     ModelVersionError, ShapeError)
from .normalize import NormStats, apply_norm, fit_norm

DEFAULT_K = 15
DEFAULT_OFFSET = 1.5
DEFAULT_THRESHOLD = 0.4

LRD_SENTINEL = 1e12
_REACH_EPS = 1e-12

MODEL_MAGIC = b"NOVM"
MODEL_VERSION = 1

STATUS_SCORED = "scored"
STATUS_INSUFFICIENT = "insufficient"
STATUS_WARMUP = "warmup"


@dataclass
class LofModel:
    """Immutable fitted model; all arrays are frozen after fit."""

    X_train: np.ndarray
    k: int
    kdist: np.ndarray
    lrd_train: np.ndarray
    offset: float
    norm_stats: NormStats
    bins: int
    span: int
    min_samples: int

    @property
    def n(self):
        return self.X_train.shape[0]

    @property
    def d(self):
        return self.X_train.shape[1]


@dataclass
class NoveltyScore:
    """Per-frame scoring result."""

    frame_index: int
    status: str
    lof: float | None = None
    abnormality: float | None = None
    flagged: bool = False
    t: float | None = field(default=None)


def knn_query(X_train, q, k):
    """k-distance of q w.r.t. X_train plus the full (tie-inclusive) neighborhood.

    Returns (indices, distances, k_distance); indices lists every training
    point at distance <= k-distance, so it may hold more than k entries.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if q.shape[-1] != X_train.shape[1]:
        raise ShapeError(f"query has {q.shape[-1]} features, "
                         f"training data has {X_train.shape[1]}")
    n = X_train.shape[0]
    if n < k:
        raise InsufficientDataError(f"need >= k={k} training points, got {n}")
    dist = cdist(X_train, q.reshape(1, -1)).ravel()
    kdistance = np.partition(dist, k - 1)[k - 1]
    idx = np.nonzero(dist <= kdistance)[0]
    return idx, dist[idx], float(kdistance)


def _lrd(counts_dist, kdist_of_neighbors):
    reach = np.maximum(kdist_of_neighbors, counts_dist)
    s = reach.sum()
    if s < _REACH_EPS:
        return LRD_SENTINEL
    return counts_dist.shape[0] / s


def fit(X_raw, k=DEFAULT_K, offset=DEFAULT_OFFSET, bins=0, span=0,
        min_samples=0, standardize=True):
    """Fit a LOF novelty model on raw training features.

    Standardization stats are learned here and stored with the model
    (``standardize=False`` keeps the features as-is, for feed-through use).
    Each training point's own row is excluded from its neighborhood.
    """
    X_raw = np.asarray(X_raw, dtype=np.float64)
    if X_raw.ndim != 2:
        raise ShapeError(f"expected 2-D training matrix, got shape {X_raw.shape}")
    n, d = X_raw.shape
    if n <= k:
        raise InsufficientDataError(f"LOF fit needs n >= k+1 = {k + 1} points, got {n}")
    if standardize:
        stats = fit_norm(X_raw)
        X = apply_norm(stats, X_raw)
    else:
        stats = NormStats(mu=np.zeros(d), sigma=np.ones(d), n_fit=n)
        X = X_raw.copy()
    D = cdist(X, X)
    np.fill_diagonal(D, np.inf)
    kdist = np.partition(D, k - 1, axis=1)[:, k - 1]
    lrd = np.empty(n, dtype=np.float64)
    for i in range(n):
        nbr = np.nonzero(D[i] <= kdist[i])[0]
        lrd[i] = _lrd(D[i, nbr], kdist[nbr])
    return LofModel(X_train=X, k=k, kdist=kdist, lrd_train=lrd, offset=float(offset),
                    norm_stats=stats, bins=int(bins), span=int(span),
                    min_samples=int(min_samples))


def lof_of_query(model, x_raw):
    """LOF of a raw query vector against the fitted model (query never inserted)."""
    q = apply_norm(model.norm_stats, np.asarray(x_raw, dtype=np.float64))
    idx, dist, _ = knn_query(model.X_train, q, model.k)
    lrd_q = _lrd(dist, model.kdist[idx])
    return float(model.lrd_train[idx].sum() / (idx.shape[0] * lrd_q))


def training_lof(model):
    """LOF of every training point under fit-time (self-excluded) semantics."""
    D = cdist(model.X_train, model.X_train)
    np.fill_diagonal(D, np.inf)
    out = np.empty(model.n, dtype=np.float64)
    for i in range(model.n):
        nbr = np.nonzero(D[i] <= model.kdist[i])[0]
        out[i] = model.lrd_train[nbr].sum() / (nbr.shape[0] * model.lrd_train[i])
    return out


def abnormality(model, x_raw, threshold=DEFAULT_THRESHOLD, frame_index=-1, t=None):
    """Score one raw feature vector into a NoveltyScore.

    abnormality = offset - LOF; flagged when strictly below the threshold.
    """
    lof = lof_of_query(model, x_raw)
    a = model.offset - lof
    return NoveltyScore(frame_index=frame_index, status=STATUS_SCORED, lof=lof,
                        abnormality=a, flagged=a < threshold, t=t)


# ---------------------------------------------------------------------------
# Serialization. Layout (little-endian):
#   magic  b"NOVM"
#   u32    format version (currently 1)
#   payload:
#     u32 k, f64 offset, u32 d, u32 bins, u32 span, u32 min_samples,
#     u32 n, u32 n_fit,
#     f64[d] mu, f64[d] sigma,
#     f64[n*d] X_train (row-major), f64[n] kdist, f64[n] lrd_train
#   u32    CRC32 of payload (zlib.crc32)
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<IdIIIIII")


def save(model, path):
    """Write the model container; load(save(m)) is bit-identical."""
    payload = bytearray()
    payload += _HEADER.pack(model.k, model.offset, model.d, model.bins,
                            model.span, model.min_samples, model.n,
                            model.norm_stats.n_fit)
    for arr in (model.norm_stats.mu, model.norm_stats.sigma,
                model.X_train, model.kdist, model.lrd_train):
        payload += np.ascontiguousarray(arr, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<I", MODEL_VERSION))
        fh.write(payload)
        fh.write(struct.pack("<I", zlib.crc32(bytes(payload))))


def load(path):
    """Read a model container, verifying magic, version, length, and CRC32."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as e:
        raise ModelFormatError(f"{path}: cannot read model file ({e.strerror})")
    if len(blob) < 8 or blob[:4] != MODEL_MAGIC:
        raise ModelFormatError(f"{path}: not a model file (bad magic)")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != MODEL_VERSION:
        raise ModelVersionError(f"{path}: unsupported format version {version}; "
                                f"this build supports version {MODEL_VERSION}")
    body = blob[8:]
    if len(body) < _HEADER.size + 4:
        raise ModelFormatError(f"{path}: truncated model file")
    payload, crc_bytes = body[:-4], body[-4:]
    (stored_crc,) = struct.unpack("<I", crc_bytes)
    if zlib.crc32(payload) != stored_crc:
        raise ModelChecksumError(f"{path}: payload CRC32 mismatch")
    k, offset, d, bins, span, min_samples, n, n_fit = _HEADER.unpack_from(payload, 0)
    expected = _HEADER.size + 8 * (2 * d + n * d + 2 * n)
    if len(payload) != expected:
        raise ModelFormatError(f"{path}: payload length {len(payload)} != "
                               f"expected {expected}")
    off = _HEADER.size

    def take(count, shape):
        nonlocal off
        arr = np.frombuffer(payload, dtype="<f8", count=count, offset=off)
        off += 8 * count
        return arr.reshape(shape).copy()

    mu = take(d, (d,))
    sigma = take(d, (d,))
    X = take(n * d, (n, d))
    kdist = take(n, (n,))
    lrd = take(n, (n,))
    return LofModel(X_train=X, k=k, kdist=kdist, lrd_train=lrd, offset=offset,
                    norm_stats=NormStats(mu=mu, sigma=sigma, n_fit=n_fit),
                    bins=bins, span=span, min_samples=min_samples)
