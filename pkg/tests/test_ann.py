import json

import numpy as np
import pytest

import oracles
from walshocr import ann

LABELS36 = [str(i) for i in range(36)]


def small_model(hidden=5, seed=0, n_in=11):
    rng = np.random.default_rng(seed)
    scaling = (np.zeros(n_in), np.full(n_in, 40.0))
    return ann.init_mlp(ann.TrainConfig(hidden_count=hidden, seed=seed), scaling, LABELS36, n_inputs=n_in), rng


def numeric_gradient(model, x, t, step=1e-5):
    grads = []
    for p in model.params():
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            old = p[i]
            p[i] = old + step
            up = ann.sse(model, x, t)
            p[i] = old - step
            down = ann.sse(model, x, t)
            p[i] = old
            g[i] = (up - down) / (2 * step)
        grads.append(g)
    return grads


class TestInit:
    def test_deterministic(self):
        a, _ = small_model(seed=3)
        b, _ = small_model(seed=3)
        for p, q in zip(a.params(), b.params()):
            np.testing.assert_array_equal(p, q)

    def test_seed_matters(self):
        a, _ = small_model(seed=3)
        b, _ = small_model(seed=4)
        assert not np.array_equal(a.w1, b.w1)

    def test_range_and_shapes(self):
        m, _ = small_model(hidden=24)
        assert m.dims == (11, 24, 36)
        for p in m.params():
            assert np.all((p > -0.5) & (p < 0.5))

    def test_bad_scaling(self):
        with pytest.raises(ValueError):
            ann.init_mlp(ann.TrainConfig(), (np.ones(11), np.zeros(11)), LABELS36)


class TestForward:
    def test_zero_weights(self):
        m, _ = small_model()
        for p in m.params():
            p[...] = 0
        np.testing.assert_array_equal(ann.forward(m, np.full(11, 7.0)), np.full(36, 0.5))

    def test_toy_network_by_hand(self):
        m = ann.MlpModel(
            w1=np.array([[0.1, -0.3], [0.4, 0.2]]),
            b1=np.array([0.05, -0.1]),
            w2=np.array([[0.3, -0.2], [-0.5, 0.6]]),
            b2=np.array([0.1, 0.2]),
            input_min=np.zeros(2),
            input_max=np.ones(2),
            label_order=("a", "b"),
        )
        # hidden = (0.4650570548417855, 0.5299640517645717), evaluated by hand
        out = ann.forward(m, [0.2, 0.7])
        np.testing.assert_allclose(out, [0.5333315695756079, 0.5708818308958463], atol=1e-12, rtol=0)

    def test_open_unit_interval(self):
        m, rng = small_model()
        out = ann.forward(m, rng.uniform(-100, 100, (50, 11)))
        assert np.all((out > 0) & (out < 1))

    def test_scaling(self):
        m, _ = small_model()
        m.input_min = np.array([0.0] * 10 + [3.0])
        m.input_max = np.array([10.0] * 10 + [3.0])
        x = np.array([[0.0] * 10 + [3.0], [10.0] * 10 + [99.0], [-5.0] * 10 + [3.0], [20.0] * 10 + [3.0]])
        s = ann.scale_inputs(m, x)
        np.testing.assert_array_equal(s[0], [0.0] * 10 + [0.5])
        np.testing.assert_array_equal(s[1], [1.0] * 10 + [0.5])
        np.testing.assert_array_equal(s[2, :10], 0.0)
        np.testing.assert_array_equal(s[3, :10], 1.0)


class TestSse:
    def test_exact_zero(self):
        m, rng = small_model()
        x = rng.uniform(0, 40, (4, 11))
        assert ann.sse(m, x, ann.forward(m, x)) == 0.0

    def test_single_unit(self):
        m = ann.MlpModel(
            w1=np.zeros((1, 1)), b1=np.zeros(1), w2=np.zeros((1, 1)), b2=np.zeros(1),
            input_min=np.zeros(1), input_max=np.ones(1), label_order=("x",),
        )
        assert ann.sse(m, [[0.3]], [[1.0]]) == 0.25

    def test_matches_loops(self):
        m, rng = small_model()
        x = rng.uniform(0, 40, (36, 11))
        t = ann.make_targets(36)
        assert ann.sse(m, x, t) == pytest.approx(oracles.sse_loops(ann.forward(m, x), t), rel=1e-12)


class TestGradients:
    @pytest.mark.parametrize("seed", range(3))
    def test_finite_differences(self, seed):
        m, rng = small_model(seed=seed)
        x = rng.uniform(0, 40, (36, 11))
        t = ann.make_targets(36)
        _, analytic = ann.gradients(m, x, t)
        for a, n in zip(analytic, numeric_gradient(m, x, t)):
            assert np.max(np.abs(a - n) / np.maximum(1.0, np.abs(n))) <= 1e-4


class TestTrain:
    def test_zero_epochs(self, db):
        x = np.array(db.vectors, dtype=float)
        cfg = ann.TrainConfig(max_epochs=0)
        m0 = ann.init_mlp(cfg, ann.feature_scaling(x), db.labels)
        m1, history = ann.train(m0, x, ann.make_targets(36), cfg)
        assert history == [] and m1.epochs_run == 0
        for p, q in zip(m0.params(), m1.params()):
            np.testing.assert_array_equal(p, q)

    def test_deterministic(self, db):
        x = np.array(db.vectors, dtype=float)
        cfg = ann.TrainConfig(max_epochs=50)
        runs = [ann.train(ann.init_mlp(cfg, ann.feature_scaling(x), db.labels), x, ann.make_targets(36), cfg) for _ in range(2)]
        assert runs[0][1] == runs[1][1]
        for p, q in zip(runs[0][0].params(), runs[1][0].params()):
            np.testing.assert_array_equal(p, q)

    def test_goal_stops_early(self, db):
        x = np.array(db.vectors, dtype=float)
        cfg = ann.TrainConfig(goal_sse=1e6)
        m, history = ann.train(ann.init_mlp(cfg, ann.feature_scaling(x), db.labels), x, ann.make_targets(36), cfg)
        assert len(history) == 1 and m.epochs_run == 0

    def test_divergence_reported(self):
        m, rng = small_model()
        x = rng.uniform(0, 40, (3, 11))
        x[0, 0] = np.nan
        with pytest.raises(ann.TrainingDivergedError):
            ann.train(m, x, ann.make_targets(36)[:3], ann.TrainConfig(max_epochs=3))

    def test_training_set_recognized(self, db, trained):
        model, history = trained
        assert len(history) == model.epochs_run == 1000 or model.final_sse <= model.config.goal_sse
        labels = [ann.classify(model, v)[0] for v in db.vectors]
        assert labels == list(db.labels)

    @pytest.mark.parametrize("kwargs", [{"max_epochs": -1}, {"goal_sse": 0}, {"momentum": 1.0}, {"learning_rate": 0}])
    def test_config_validation(self, kwargs):
        with pytest.raises(ValueError):
            ann.TrainConfig(**kwargs)


class TestClassify:
    def test_forced_unit(self):
        m, _ = small_model()
        m.b2[:] = -5.0
        m.b2[2] = 5.0
        m.label_order = tuple("ABCDEFGHIJKLMNOPQRSTUVWXYZ1234567890")
        label, conf, runner = ann.classify(m, np.zeros(11))
        assert label == "C" and conf == pytest.approx(ann.forward(m, np.zeros(11))[2])

    def test_matches_scan_and_scale_invariant(self):
        m, rng = small_model()
        for _ in range(50):
            x = rng.uniform(0, 40, 11)
            out = ann.forward(m, x)
            idx = oracles.argmax_scan(list(out))
            assert ann.classify(m, x)[0] == m.label_order[idx]
            assert oracles.argmax_scan(list(3.7 * out)) == idx

    def test_tie_goes_low(self):
        m, _ = small_model()
        m.w2[:] = 0
        m.b2[:] = 0
        assert ann.classify(m, np.zeros(11))[:1] == ("0",)


class TestPersistence:
    def test_round_trip(self, model, tmp_path):
        path = tmp_path / "m.json"
        ann.save_model(model, path)
        loaded = ann.load_model(path)
        for p, q in zip(model.params(), loaded.params()):
            np.testing.assert_array_equal(p, q)
        assert loaded.label_order == model.label_order and loaded.config == model.config
        assert loaded.final_sse == model.final_sse and loaded.epochs_run == model.epochs_run
        rng = np.random.default_rng(5)
        x = rng.uniform(0, 120, (1000, 11))
        np.testing.assert_array_equal(ann.forward(model, x), ann.forward(loaded, x))
        assert [ann.classify(model, r)[0] for r in x] == [ann.classify(loaded, r)[0] for r in x]

    def test_tampered_shape(self, model, tmp_path):
        path = tmp_path / "m.json"
        ann.save_model(model, path)
        doc = json.loads(path.read_text())
        doc["dims"][1] += 1
        path.write_text(json.dumps(doc))
        with pytest.raises(ann.ModelFormatError, match="shape mismatch"):
            ann.load_model(path)

    def test_version_mismatch(self, model, tmp_path):
        path = tmp_path / "m.json"
        ann.save_model(model, path)
        doc = json.loads(path.read_text())
        doc["version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(ann.ModelFormatError, match="version"):
            ann.load_model(path)

    def test_malformed(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("not json")
        with pytest.raises(ann.ModelFormatError):
            ann.load_model(path)
