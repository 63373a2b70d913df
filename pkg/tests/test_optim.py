import numpy as np
import numpy.testing as npt
import pytest

from leancast import optim


def single(value):
    return {"w": np.array([float(value)])}


class TestRmsprop:
    def test_first_step_magnitude(self):
        # s' = 0.1, update = 0.01 / sqrt(0.1 + 1e-8)
        params = single(0.0)
        state = optim.init_optimizer("rmsprop", params)
        new, state = optim.rmsprop_step(params, single(1.0), state, 0.01)
        npt.assert_allclose(state.accumulators["w"]["s"], [0.1], rtol=1e-12)
        npt.assert_allclose(-new["w"], [0.01 / np.sqrt(0.1 + 1e-8)], rtol=1e-9)
        assert abs(-new["w"][0] - 0.0316228) < 1e-6

    def test_zero_gradient_decays_accumulator(self):
        params = single(5.0)
        state = optim.init_optimizer("rmsprop", params)
        _, state = optim.rmsprop_step(params, single(2.0), state, 0.01)
        s_before = state.accumulators["w"]["s"].copy()
        new, state = optim.rmsprop_step(params, single(0.0), state, 0.01)
        npt.assert_array_equal(new["w"], params["w"])
        npt.assert_allclose(state.accumulators["w"]["s"], 0.9 * s_before, rtol=1e-12)

    def test_equal_gradients_get_equal_updates(self):
        params = {"a": np.zeros(3), "b": np.zeros(3)}
        grads = {"a": np.full(3, 0.7), "b": np.full(3, 0.7)}
        state = optim.init_optimizer("rmsprop", params)
        new, _ = optim.rmsprop_step(params, grads, state, 0.05)
        npt.assert_array_equal(new["a"], new["b"])


class TestAdam:
    def test_first_step_magnitude(self):
        params = single(0.0)
        state = optim.init_optimizer("adam", params)
        new, state = optim.adam_step(params, single(1.0), state, 0.001)
        # bias correction cancels at t=1: |update| ~ lr
        npt.assert_allclose(-new["w"], [0.001 / (1.0 + 1e-8)], rtol=1e-9)
        assert state.t == 1

    def test_zero_gradients_never_move(self):
        params = single(3.0)
        state = optim.init_optimizer("adam", params)
        for _ in range(5):
            params, state = optim.adam_step(params, single(0.0), state, 0.001)
        npt.assert_array_equal(params["w"], [3.0])
        assert state.t == 5

    def test_descent_direction(self):
        for g in (0.3, -1.7, 42.0):
            params = single(0.0)
            state = optim.init_optimizer("adam", params)
            new, _ = optim.adam_step(params, single(g), state, 0.001)
            assert np.sign(new["w"][0]) == -np.sign(g)


class TestClip:
    def test_below_threshold_untouched(self):
        grads = {"a": np.array([0.3, 0.4])}
        out = optim.clip_global_norm(grads, 5.0)
        npt.assert_array_equal(out["a"], grads["a"])

    def test_scales_jointly_to_max_norm(self):
        grads = {"a": np.array([30.0, 40.0]), "b": np.array([0.0])}
        out = optim.clip_global_norm(grads, 5.0)
        total = np.sqrt(sum(float(np.sum(g * g)) for g in out.values()))
        npt.assert_allclose(total, 5.0, rtol=1e-12)
        # direction preserved
        npt.assert_allclose(out["a"][1] / out["a"][0], 40.0 / 30.0, rtol=1e-12)


def test_dispatcher_matches_direct_calls():
    params = single(1.0)
    state = optim.init_optimizer("rmsprop", params)
    via_dispatch, _ = optim.optimizer_step(params, single(0.5), state, 0.01)
    direct, _ = optim.rmsprop_step(params, single(0.5),
                                   optim.init_optimizer("rmsprop", params), 0.01)
    npt.assert_array_equal(via_dispatch["w"], direct["w"])


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        optim.init_optimizer("sgd", single(0.0))
