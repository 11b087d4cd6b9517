import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from binvec.autoencoder import (AutoencoderModel, TrainingConfig, batch_gradients,
                                binarize_all, bit_correlation, decode, encode, encode_bits,
                                init_model, load_model, reconstruct_all,
                                reconstruction_loss, regularization_loss, save_model, train)
from binvec.bitcode import BinaryEmbedding, BitCode, sokal_michener
from binvec.embeddings import EmbeddingMatrix
from binvec.errors import ConfigurationError, DimensionError, EmptyInputError, LengthError
from binvec.synthetic import clustered_embeddings

import oracles


def relative_error(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


# -- init ---------------------------------------------------------------------

def test_init_deterministic_and_bounded():
    a, b = init_model(64, 300, seed=7), init_model(64, 300, seed=7)
    np.testing.assert_array_equal(a.W, b.W)
    assert a.W.shape == (64, 300)
    assert np.all(np.abs(a.W) <= 1 / math.sqrt(300))
    np.testing.assert_array_equal(a.c, np.zeros(300))
    assert not np.array_equal(a.W, init_model(64, 300, seed=8).W)


@pytest.mark.parametrize("n", [0, 63, 100, -64])
def test_init_rejects_unaligned(n):
    with pytest.raises(ConfigurationError):
        init_model(n, 10)


def test_training_config_defaults():
    cfg = TrainingConfig()
    assert (cfg.batch_size, cfg.epochs, cfg.learning_rate, cfg.momentum, cfg.lambda_reg) == \
        (75, 10, 0.001, 0.95, 1.0)
    with pytest.raises(ConfigurationError):
        TrainingConfig(momentum=1.0)
    with pytest.raises(ConfigurationError):
        TrainingConfig(batch_size=0)


# -- encode / decode ----------------------------------------------------------

def test_encode_identity_weights():
    model = AutoencoderModel(np.eye(64), np.zeros(64))
    assert encode(model, np.full(64, 0.5)) == BitCode.ones(64)


def test_encode_zero_input_gives_zero_code():
    model = init_model(64, 10, seed=1)
    assert encode(model, np.zeros(10)) == BitCode.zeros(64)


def test_encode_matches_naive_dot_products(rng):
    model = init_model(128, 7, seed=3)
    for _ in range(20):
        x = rng.uniform(-1, 1, 7)
        bits = encode(model, x).to_bits().tolist()
        expected = [1 if oracles.naive_dot(row, x) > 0 else 0 for row in model.W]
        assert bits == expected


def test_encode_dimension_error():
    with pytest.raises(DimensionError):
        encode(init_model(64, 5), np.zeros(4))


@given(st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
def test_encode_positive_scale_invariance(alpha, seed):
    rng = np.random.default_rng(seed)
    model = init_model(64, 6, seed=seed)
    scaled = AutoencoderModel(alpha * model.W, model.c)
    X = rng.uniform(-1, 1, size=(10, 6))
    np.testing.assert_array_equal(encode_bits(model, X), encode_bits(scaled, X))


def test_decode_zero_code():
    model = init_model(64, 9, seed=2)
    np.testing.assert_array_equal(decode(model, BitCode.zeros(64)), np.zeros(9))


def test_decode_one_hot_selects_row():
    model = init_model(64, 9, seed=2)
    bits = np.zeros(64, dtype=np.uint8)
    bits[17] = 1
    np.testing.assert_allclose(decode(model, BitCode.from_bits(bits)), np.tanh(model.W[17]),
                               rtol=0, atol=1e-15)


def test_decode_matches_naive_oracle(rng):
    model = AutoencoderModel(rng.normal(0, 0.3, (128, 6)), rng.normal(0, 0.2, 6))
    for _ in range(10):
        bits = rng.integers(0, 2, 128)
        got = decode(model, BitCode.from_bits(bits))
        want = oracles.naive_decode(model.W.tolist(), model.c.tolist(), bits.tolist())
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-6)
        assert np.all(np.abs(got) < 1)


def test_decode_length_error():
    with pytest.raises(LengthError):
        decode(init_model(64, 3), BitCode.zeros(128))


# -- losses -------------------------------------------------------------------

def test_reconstruction_loss_examples():
    assert reconstruction_loss([0.3, -0.2], [0.3, -0.2]) == 0
    assert reconstruction_loss([1, 1], [0, 0]) == 1.0
    assert reconstruction_loss([1, 0, -1], [0.5, 0, -0.5]) == pytest.approx(1 / 6, abs=1e-15)
    with pytest.raises(DimensionError):
        reconstruction_loss([1, 2], [1])


def test_regularization_zero_for_orthonormal_columns():
    W = np.zeros((64, 2))
    W[0, 0] = W[1, 1] = 1
    assert regularization_loss(AutoencoderModel(W, np.zeros(2))) == 0


@pytest.mark.parametrize("n, m", [(64, 1), (64, 5), (128, 30)])
def test_regularization_of_zero_matrix(n, m):
    assert regularization_loss(AutoencoderModel(np.zeros((n, m)), np.zeros(m))) == m / 2


def test_regularization_matches_double_loop(rng):
    # the model requires n to be a multiple of 64, so the 4x3 case lives in
    # the first rows of an otherwise-zero matrix (zero rows add nothing to W^T W)
    small = rng.normal(size=(4, 3))
    W = np.zeros((64, 3))
    W[:4] = small
    got = regularization_loss(AutoencoderModel(W, np.zeros(3)))
    assert got == pytest.approx(oracles.frobenius_reg(small), abs=1e-8)


def test_regularization_invariant_under_householder(rng):
    model = AutoencoderModel(rng.normal(0, 0.2, (64, 5)), np.zeros(5))
    for _ in range(5):
        v = rng.normal(size=64)
        H = np.eye(64) - 2 * np.outer(v, v) / (v @ v)
        reflected = AutoencoderModel(H @ model.W, model.c)
        assert regularization_loss(reflected) == pytest.approx(
            regularization_loss(model), abs=1e-6)


# -- gradients ----------------------------------------------------------------

def fd_gradients(model, X, B, lam):
    W, c = model.W.copy(), model.c.copy()
    f = lambda: oracles.objective_fixed_codes(W, c, X, B, lam)  # noqa: E731
    return oracles.central_differences(f, W), oracles.central_differences(f, c)


@pytest.mark.parametrize("m", [3, 5])
@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_gradients_match_finite_differences(m, lam, rng):
    model = AutoencoderModel(rng.normal(0, 0.15, (64, m)), rng.normal(0, 0.1, m))
    X = rng.uniform(-1, 1, size=(6, m))
    gW, gc, (rec, reg) = batch_gradients(model, X, lam)
    B = encode_bits(model, X).astype(np.float64)
    fW, fc = fd_gradients(model, X, B, lam)
    assert relative_error(gW, fW) < 1e-4
    assert relative_error(gc, fc) < 1e-4
    assert rec + lam * reg == pytest.approx(
        oracles.objective_fixed_codes(model.W, model.c, X, B, lam), rel=1e-12)


def test_gradients_zero_at_stationary_point():
    m = 4
    W = np.zeros((64, m))
    W[:m] = np.eye(m)
    model = AutoencoderModel(W, np.zeros(m))
    B = np.zeros((3, 64))
    B[0, 0] = B[1, 1] = B[2, :2] = 1
    X = np.tanh(B @ W)  # reconstruction is exact
    gW, gc, (rec, reg) = batch_gradients(model, X, 1.0, bits=B)
    assert rec == 0 and reg == 0
    np.testing.assert_array_equal(gW, 0)
    np.testing.assert_array_equal(gc, 0)


def test_zero_code_kills_weight_path(rng):
    model = AutoencoderModel(rng.normal(0, 0.2, (64, 3)), rng.normal(0, 0.2, 3))
    x = rng.uniform(-1, 1, size=(1, 3))
    gW, gc, _ = batch_gradients(model, x, 0.0, bits=np.zeros((1, 64)))
    np.testing.assert_array_equal(gW, 0)
    y = np.tanh(model.c)
    np.testing.assert_allclose(gc, (2 / 3) * (y - x[0]) * (1 - y**2), rtol=1e-12)


def test_gradients_dimension_error():
    with pytest.raises(DimensionError):
        batch_gradients(init_model(64, 3), np.zeros((2, 4)), 1.0)


# -- training -----------------------------------------------------------------

def test_train_reduces_reconstruction_loss_without_regularizer():
    rng = np.random.default_rng(0)
    X = np.clip(rng.normal(0, 0.5, size=(50, 8)), -1, 1)
    emb = EmbeddingMatrix([f"w{i}" for i in range(50)], X)
    _, report = train(emb, TrainingConfig(lambda_reg=0.0, seed=1), n_bits=64)
    assert len(report) == 10
    assert report.rec_losses[-1] < report.rec_losses[0]


def test_train_deterministic():
    emb, _ = clustered_embeddings(n_vectors=200, m=10, seed=4)
    a, ra = train(emb, TrainingConfig(epochs=3, seed=11), n_bits=64)
    b, rb = train(emb, TrainingConfig(epochs=3, seed=11), n_bits=64)
    np.testing.assert_array_equal(a.W, b.W)
    np.testing.assert_array_equal(a.c, b.c)
    assert ra.objectives == rb.objectives


def test_zero_step_leaves_model_unchanged():
    emb, _ = clustered_embeddings(n_vectors=100, m=6, seed=0)
    start = init_model(64, 6, seed=5)
    model, _ = train(emb, TrainingConfig(learning_rate=0.0, momentum=0.0, epochs=2),
                     model=start)
    np.testing.assert_array_equal(model.W, start.W)
    np.testing.assert_array_equal(model.c, start.c)


def test_train_starts_from_seeded_init():
    emb, _ = clustered_embeddings(n_vectors=80, m=6, seed=0)
    model, _ = train(emb, TrainingConfig(learning_rate=0.0, momentum=0.0, epochs=1, seed=9),
                     n_bits=64)
    np.testing.assert_array_equal(model.W, init_model(64, 6, seed=9).W)


def test_partial_last_batch_is_used():
    # 10 rows, batch 75: the only batch is partial, so training must still move W
    emb, _ = clustered_embeddings(n_vectors=10, m=4, seed=0)
    start = init_model(64, 4, seed=0)
    model, _ = train(emb, TrainingConfig(epochs=1, seed=0), model=start)
    assert not np.array_equal(model.W, start.W)


def test_train_empty_input():
    with pytest.raises(EmptyInputError):
        train(EmbeddingMatrix([], np.zeros((0, 3))), TrainingConfig())


def test_objective_decreases_each_epoch_without_regularizer():
    monotone = 0
    for seed in range(10):
        emb, _ = clustered_embeddings(seed=seed)
        _, report = train(emb, TrainingConfig(lambda_reg=0.0, seed=seed), n_bits=64)
        obj = report.objectives
        monotone += all(b < a for a, b in zip(obj, obj[1:]))
    assert monotone >= 8


def test_regularizer_decorrelates_bits():
    with_reg, without = [], []
    for seed in range(10):
        emb, _ = clustered_embeddings(seed=seed)
        m1, _ = train(emb, TrainingConfig(lambda_reg=1.0, seed=seed), n_bits=64)
        m0, _ = train(emb, TrainingConfig(lambda_reg=0.0, seed=seed), n_bits=64)
        with_reg.append(bit_correlation(binarize_all(m1, emb).bits()))
        without.append(bit_correlation(binarize_all(m0, emb).bits()))
    wins = sum(a < b for a, b in zip(with_reg, without))
    assert np.mean(with_reg) < np.mean(without)
    assert wins >= 7


def test_bit_correlation_basics():
    B = np.array([[1, 1, 0], [0, 0, 1], [1, 1, 1], [0, 0, 0]])
    # columns 0 and 1 are identical (corr 1); column 2 is uncorrelated with both
    assert bit_correlation(B) == pytest.approx(1 / 3)
    assert bit_correlation(np.ones((5, 4))) == 0.0


# -- whole-vocabulary helpers -------------------------------------------------

def test_binarize_all_and_reconstruct_all(rng):
    emb = EmbeddingMatrix(["a", "b", "c"], rng.uniform(-1, 1, (3, 5)))
    model = init_model(64, 5, seed=0)
    be = binarize_all(model, emb)
    assert be.words == ["a", "b", "c"]
    for i, w in enumerate(emb.words):
        assert be.get(w) == encode(model, emb.vectors[i])
    rec = reconstruct_all(model, be)
    assert rec.words == be.words
    for w in be.words:
        np.testing.assert_allclose(rec.get(w), decode(model, be.get(w)), atol=1e-6)
    assert np.all(np.abs(rec.vectors) < 1)


def test_binarize_dimension_mismatch(rng):
    emb = EmbeddingMatrix(["a"], rng.uniform(-1, 1, (1, 5)))
    with pytest.raises(DimensionError):
        binarize_all(init_model(64, 4), emb)
    with pytest.raises(LengthError):
        reconstruct_all(init_model(128, 5), binarize_all(init_model(64, 5), emb))


def test_clusters_share_more_bits_than_non_clusters():
    emb, labels = clustered_embeddings(n_vectors=300, m=20, n_clusters=10, seed=2)
    model, _ = train(emb, TrainingConfig(seed=2), n_bits=64)
    be = binarize_all(model, emb)
    within, across = [], []
    for i in range(0, 300, 3):
        for j in range(i + 1, 300, 7):
            s = sokal_michener(be.code(i), be.code(j))
            (within if labels[i] == labels[j] else across).append(s)
    assert np.mean(within) > np.mean(across)


def test_training_beats_untrained_reconstruction():
    emb, _ = clustered_embeddings(seed=3)
    cfg = TrainingConfig(seed=3)
    trained, _ = train(emb, cfg, n_bits=64)
    untrained = init_model(64, emb.m, seed=cfg.seed)

    def mean_rec(model):
        rec = reconstruct_all(model, binarize_all(model, emb))
        return np.mean([reconstruction_loss(x, y) for x, y in zip(emb.vectors, rec.vectors)])

    assert mean_rec(trained) < mean_rec(untrained)


def test_checkpoint_round_trip(tmp_path, rng):
    model = AutoencoderModel(rng.normal(0, 0.3, (128, 7)), rng.normal(0, 0.3, 7))
    path = tmp_path / "model.txt"
    save_model(model, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "128 7" and len(lines) == 130
    back = load_model(path)
    assert np.max(np.abs(back.W - model.W)) <= 1e-6
    assert np.max(np.abs(back.c - model.c)) <= 1e-6
