import numpy as np
import pytest

from motionlof import (abnormality, fit, knn_query, load, lof_of_query, save,
                       training_lof)
from motionlof.errors import (InsufficientDataError, ModelChecksumError,
                              ModelFormatError, ModelVersionError, ShapeError)

from oracles import naive_lof_fit, naive_lof_query, naive_standardize


def test_knn_simple():
    X = np.array([[0.0], [1.0]])
    idx, dist, kd = knn_query(X, np.array([0.4]), k=1)
    assert kd == pytest.approx(0.4)
    assert idx.tolist() == [0]


def test_knn_tie_returns_both():
    X = np.array([[-1.0], [1.0]])
    idx, dist, kd = knn_query(X, np.array([0.0]), k=1)
    assert kd == pytest.approx(1.0)
    assert sorted(idx.tolist()) == [0, 1]


def test_knn_matches_exhaustive_sort():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((200, 5))
    for _ in range(10):
        q = rng.standard_normal(5)
        idx, dist, kd = knn_query(X, q, k=7)
        full = np.sqrt(((X - q) ** 2).sum(axis=1))
        kd_ref = np.sort(full)[6]
        assert kd == pytest.approx(kd_ref, abs=0)
        assert set(idx.tolist()) == set(np.nonzero(full <= kd_ref)[0].tolist())


def test_knn_shape_mismatch():
    with pytest.raises(ShapeError):
        knn_query(np.zeros((5, 3)), np.zeros(4), k=1)


def test_fit_two_points_feedthrough():
    model = fit(np.array([[0.0], [1.0]]), k=1, standardize=False)
    assert model.kdist.tolist() == [1.0, 1.0]
    assert model.lrd_train.tolist() == [1.0, 1.0]


def test_fit_rejects_small_n():
    with pytest.raises(InsufficientDataError):
        fit(np.zeros((15, 2)), k=15)


def test_fit_duplicate_guard():
    X = np.zeros((6, 3))  # k+1 coincident points at k=5
    model = fit(X, k=5, standardize=False)
    assert np.all(model.lrd_train == 1e12)
    # co-located query scores like an inlier, everything stays finite
    lof = lof_of_query(model, np.zeros(3))
    assert np.isfinite(lof)
    assert lof == pytest.approx(1.0)


def test_query_hand_values_feedthrough():
    model = fit(np.array([[0.0], [1.0]]), k=1, standardize=False)
    # reach-dist to {0} = max(1, 0.4) = 1 -> lrd_q = 1 -> LOF = 1
    assert lof_of_query(model, np.array([0.4])) == pytest.approx(1.0)
    # reach-dist to {1} = max(1, 9) = 9 -> lrd_q = 1/9 -> LOF = 9
    assert lof_of_query(model, np.array([10.0])) == pytest.approx(9.0)


def test_query_hand_values_standardized():
    # standardization is affine, so these LOF values are unchanged
    model = fit(np.array([[0.0], [1.0]]), k=1)
    assert lof_of_query(model, np.array([0.4])) == pytest.approx(1.0)
    assert lof_of_query(model, np.array([10.0])) == pytest.approx(9.0)


def test_oracle_equivalence_random():
    rng = np.random.default_rng(1)
    X_raw = rng.standard_normal((300, 10)) * rng.uniform(0.5, 2.0, 10)
    model = fit(X_raw, k=15)
    Z, _, _ = naive_standardize(X_raw)
    kdist, lrd, lof, _ = naive_lof_fit(Z, 15)
    assert model.kdist == pytest.approx(kdist, abs=1e-9)
    assert model.lrd_train == pytest.approx(lrd, abs=1e-9)
    assert training_lof(model) == pytest.approx(lof, abs=1e-9)
    assert np.all(np.isfinite(model.lrd_train))
    assert np.all(model.lrd_train > 0)


def test_tie_neighborhoods_exceed_k():
    # grid data gives exact integer-distance ties
    X = np.array([[i, j] for i in range(5) for j in range(5)], dtype=float)
    model = fit(X, k=3, standardize=False)
    kdist, lrd, lof, nbrs = naive_lof_fit(X, 3)
    assert np.array_equal(model.kdist, kdist)
    assert model.lrd_train == pytest.approx(lrd, abs=0)
    # interior points have 4 equidistant neighbors at distance 1
    center = np.nonzero((X[:, 0] == 2) & (X[:, 1] == 2))[0][0]
    assert len(nbrs[center]) == 4
    q = np.array([2.0, 2.5])
    lof_ref, nbr_ref = naive_lof_query(X, kdist, lrd, q, 3)
    idx, _, _ = knn_query(X, q, 3)
    assert set(idx.tolist()) == set(nbr_ref.tolist())
    assert lof_of_query(model, q) == pytest.approx(lof_ref, abs=0)


def test_rigid_transform_invariance():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((120, 3))
    Q = rng.standard_normal((20, 3))
    theta = 0.7
    R = np.array([[np.cos(theta), -np.sin(theta), 0],
                  [np.sin(theta), np.cos(theta), 0],
                  [0, 0, 1.0]])
    shift = np.array([5.0, -2.0, 0.3])
    model_a = fit(X, k=10, standardize=False)
    model_b = fit(X @ R.T + shift, k=10, standardize=False)
    for q in Q:
        assert lof_of_query(model_b, R @ q + shift) == pytest.approx(
            lof_of_query(model_a, q), abs=1e-9)


def test_monotonic_isolation():
    model = fit(np.array([[0.0], [1.0]]), k=1, standardize=False)
    kdist, lrd, _, _ = naive_lof_fit(np.array([[0.0], [1.0]]), 1)
    grid = np.linspace(2.0, 50.0, 97)
    lofs = [lof_of_query(model, np.array([g])) for g in grid]
    assert all(b >= a for a, b in zip(lofs, lofs[1:]))
    for g, l in zip(grid[::10], lofs[::10]):
        ref, _ = naive_lof_query(np.array([[0.0], [1.0]]), kdist, lrd,
                                 np.array([g]), 1)
        assert l == pytest.approx(ref, abs=1e-9)


def test_abnormality_convention():
    model = fit(np.array([[0.0], [1.0]]), k=1, standardize=False)
    s = abnormality(model, np.array([0.4]))
    assert s.abnormality == pytest.approx(1.5 - 1.0)
    assert not s.flagged
    far = abnormality(model, np.array([10.0]))
    assert far.abnormality == pytest.approx(1.5 - 9.0)
    assert far.flagged


def test_abnormality_boundary_strict():
    # LOF at the inlier query is exactly 1, so abnormality == offset - 1
    model = fit(np.array([[0.0], [1.0]]), k=1, offset=1.1, standardize=False)
    s = abnormality(model, np.array([0.4]), threshold=0.5)
    assert s.abnormality == pytest.approx(0.1)
    assert s.flagged  # 0.1 < 0.5
    s = abnormality(model, np.array([0.4]), threshold=0.1)
    assert not s.flagged  # equality is not below threshold


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    model = fit(rng.standard_normal((60, 8)), k=5, bins=16, span=3, min_samples=4)
    path = tmp_path / "m.novm"
    save(model, path)
    back = load(path)
    assert np.array_equal(back.X_train, model.X_train)
    assert np.array_equal(back.kdist, model.kdist)
    assert back.k == model.k and back.offset == model.offset
    assert back.bins == 16 and back.span == 3 and back.min_samples == 4
    for _ in range(100):
        q = rng.standard_normal(8)
        a = abnormality(model, q).abnormality
        b = abnormality(back, q).abnormality
        assert abs(a - b) <= 1e-12


def test_load_bad_magic(tmp_path):
    p = tmp_path / "bad.novm"
    p.write_bytes(b"JUNKxxxxxxxxxxxxxxxx")
    with pytest.raises(ModelFormatError):
        load(p)


def test_load_bad_version(tmp_path):
    rng = np.random.default_rng(4)
    model = fit(rng.standard_normal((20, 2)), k=3)
    p = tmp_path / "m.novm"
    save(model, p)
    blob = bytearray(p.read_bytes())
    blob[4:8] = (99).to_bytes(4, "little")
    p.write_bytes(bytes(blob))
    with pytest.raises(ModelVersionError, match="version 1"):
        load(p)


def test_load_truncated(tmp_path):
    rng = np.random.default_rng(5)
    model = fit(rng.standard_normal((20, 2)), k=3)
    p = tmp_path / "m.novm"
    save(model, p)
    p.write_bytes(p.read_bytes()[:30])
    with pytest.raises(ModelFormatError):
        load(p)


def test_load_corrupted_payload(tmp_path):
    rng = np.random.default_rng(6)
    model = fit(rng.standard_normal((20, 2)), k=3)
    p = tmp_path / "m.novm"
    save(model, p)
    blob = bytearray(p.read_bytes())
    blob[100] ^= 0xFF
    p.write_bytes(bytes(blob))
    with pytest.raises(ModelChecksumError):
        load(p)


def test_novelty_mode_purity(tmp_path):
    rng = np.random.default_rng(7)
    model = fit(rng.standard_normal((50, 4)), k=5)
    p1, p2 = tmp_path / "a.novm", tmp_path / "b.novm"
    save(model, p1)
    for _ in range(500):
        lof_of_query(model, rng.standard_normal(4))
    save(model, p2)
    assert p1.read_bytes() == p2.read_bytes()
