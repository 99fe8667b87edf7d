"""Training-loop contracts: schedules, SGLD dynamics, energy gradients,
pretraining, and the two fine-tuning arms."""

import numpy as np
import pytest

from wdl.channel import ChannelState
from wdl.exceptions import ConfigurationError
from wdl.network import NetworkSpec, init_params
from wdl.risk import standard_risk
from wdl.training import (
    ChannelPolicy,
    Schedule,
    TrainConfig,
    decay_step,
    energy_gradient,
    pretrain_standard,
    sgld_step,
    train_robust,
    train_vanilla,
)
from wdl.harness.datasets import make_dataset


@pytest.fixture(scope="module")
def blobs():
    return make_dataset("blobs2", 200, 0.4, 7)


@pytest.fixture(scope="module")
def spec():
    return NetworkSpec(layer_sizes=(2, 8, 4, 2), split_index=2, activation="tanh")


class TestSchedule:
    def test_initial_values(self):
        sched = Schedule(eta0=0.1, beta0=0.5)
        assert decay_step(sched, 0) == (0.1, 0.5)

    def test_strictly_decreasing(self):
        sched = Schedule(eta0=0.1, beta0=0.5)
        etas = [decay_step(sched, k)[0] for k in range(200)]
        assert all(b < a for a, b in zip(etas, etas[1:]))

    def test_hand_value_at_k0(self):
        sched = Schedule(eta0=1.0, beta0=1.0, k0=100.0)
        eta, beta = decay_step(sched, 100)
        assert eta == pytest.approx(2.0**-0.55, rel=1e-12)
        assert eta == pytest.approx(0.683, abs=1e-3)
        assert beta == pytest.approx(0.5)

    def test_sum_diverges_squares_converge(self):
        # partial sums against the closed-form integrals of (1 + x/k0)^-p:
        # divergent growth at p = 0.55, finite limit at 2p = 1.1
        sched = Schedule(eta0=1.0, beta0=0.0, k0=100.0)
        k = 500_000
        ks = np.arange(k)
        etas = np.array([decay_step(sched, int(i))[0] for i in ks[:: k // 500]])
        etas_full = sched.eta0 * (1.0 + ks / sched.k0) ** -sched.eta_exponent
        np.testing.assert_allclose(etas, etas_full[:: k // 500], rtol=1e-12)
        p = sched.eta_exponent
        partial = np.cumsum(etas_full)
        integral = sched.k0 / (1 - p) * ((1 + k / sched.k0) ** (1 - p) - 1)
        assert partial[-1] == pytest.approx(integral, rel=0.02)
        assert partial[-1] > 1.35 * partial[k // 2]  # still growing: divergent
        squares = np.cumsum(etas_full**2)
        sq_integral = sched.k0 / (2 * p - 1) * (1 - (1 + k / sched.k0) ** (1 - 2 * p))
        finite_limit = 1.0 + sched.k0 / (2 * p - 1)
        assert squares[-1] == pytest.approx(sq_integral, rel=0.02, abs=1.5)
        assert squares[-1] < finite_limit

    def test_constant_scheme(self):
        sched = Schedule(eta0=0.2, beta0=0.3, scheme="constant")
        assert decay_step(sched, 10**6) == (0.2, 0.3)

    def test_invalid_schedule(self):
        with pytest.raises(ConfigurationError):
            Schedule(eta0=0.0, beta0=0.1)
        with pytest.raises(ConfigurationError):
            Schedule(eta0=0.1, beta0=0.1, scheme="linear")


class TestSgldStep:
    def test_zero_temperature_is_plain_gradient_step(self):
        rng = np.random.default_rng(0)
        w = rng.standard_normal(10)
        g = rng.standard_normal(10)
        out = sgld_step(w, g, 0.01, 0.0, rng)
        assert np.array_equal(out, w - 0.01 * g)

    def test_noise_std_calibrated(self):
        rng = np.random.default_rng(1)
        eta, beta = 1e-3, 0.5
        w = np.zeros(10**5)
        g = np.zeros(10**5)
        out = sgld_step(w, g, eta, beta, rng)
        expected = np.sqrt(2 * eta * beta)
        assert abs(out.std() - expected) < 0.02 * expected

    def test_quadratic_energy_stationary_variance(self):
        # U(x) = x^2 / 2, fixed eta and beta: samples approach N(0, beta)
        rng = np.random.default_rng(42)
        eta, beta = 1e-3, 0.5
        w = np.zeros(1)
        for _ in range(10_000):
            w = sgld_step(w, w, eta, beta, rng)
        n = 300_000
        samples = np.empty(n)
        for i in range(n):
            w = sgld_step(w, w, eta, beta, rng)
            samples[i] = w[0]
        assert 0.45 <= samples.var() <= 0.55

    def test_positive_step_required(self):
        with pytest.raises(ValueError):
            sgld_step(np.zeros(2), np.zeros(2), 0.0, 0.1, np.random.default_rng(0))


class TestEnergyGradient:
    def test_zero_beta_pure_likelihood(self, spec, blobs):
        rng = np.random.default_rng(2)
        w = init_params(spec, rng)
        theta_z = init_params(spec, np.random.default_rng(3))
        g0 = energy_gradient(
            spec, w, blobs.x_train[:8], blobs.y_train[:8], None, theta_z,
            1.0, 0.0, 4.0, rng, pipeline="none",
        )
        g1 = energy_gradient(
            spec, w, blobs.x_train[:8], blobs.y_train[:8], None, 100 + theta_z,
            1.0, 0.0, 4.0, rng, pipeline="none",
        )
        assert np.array_equal(g0, g1)

    def test_prior_vanishes_at_prior_mean(self, spec, blobs):
        rng = np.random.default_rng(4)
        theta_z = init_params(spec, rng)
        g_on = energy_gradient(
            spec, theta_z, blobs.x_train[:8], blobs.y_train[:8], None, theta_z,
            1.0, 0.7, 4.0, rng, pipeline="none",
        )
        g_off = energy_gradient(
            spec, theta_z, blobs.x_train[:8], blobs.y_train[:8], None, theta_z,
            1.0, 0.0, 4.0, rng, pipeline="none",
        )
        np.testing.assert_array_equal(g_on, g_off)

    def test_isotropic_prior_contribution(self, spec, blobs):
        rng = np.random.default_rng(5)
        theta_z = init_params(spec, rng)
        w = theta_z.copy()
        w[0] += 1.0
        g_prior_on = energy_gradient(
            spec, w, blobs.x_train[:8], blobs.y_train[:8], None, theta_z,
            2.0, 0.1, 4.0, rng, pipeline="none",
        )
        g_prior_off = energy_gradient(
            spec, w, blobs.x_train[:8], blobs.y_train[:8], None, theta_z,
            2.0, 0.0, 4.0, rng, pipeline="none",
        )
        contribution = g_prior_on - g_prior_off
        expected = np.zeros_like(w)
        expected[0] = 0.1 * 1.0 / 2.0
        np.testing.assert_allclose(contribution, expected, atol=1e-15)

    def test_wireless_pipeline_requires_state(self, spec, blobs):
        with pytest.raises(ConfigurationError):
            energy_gradient(
                spec, init_params(spec, np.random.default_rng(6)),
                blobs.x_train[:4], blobs.y_train[:4], None,
                np.zeros(spec.n_params), 1.0, 0.0, 4.0,
                np.random.default_rng(7), pipeline="wireless",
            )


class TestPretrain:
    def test_separable_blobs_converge(self, spec, blobs):
        config = TrainConfig(
            epochs=50, batch_size=32, learning_rate=0.01, clip=4.0, seed=0,
            pipeline="none",
        )
        _, risk = pretrain_standard(spec, blobs.x_train, blobs.y_train, config)
        assert risk < 0.1

    def test_zero_epochs_returns_init(self, spec, blobs):
        config = TrainConfig(
            epochs=0, batch_size=32, learning_rate=0.01, clip=4.0, seed=3,
            pipeline="none",
        )
        params, risk = pretrain_standard(spec, blobs.x_train, blobs.y_train, config)
        expected = init_params(
            spec, np.random.default_rng(np.random.SeedSequence(3).spawn(2)[0])
        )
        assert np.array_equal(params, expected)
        assert risk == standard_risk(spec, params, blobs.x_train, blobs.y_train, 4.0)

    def test_deterministic(self, spec, blobs):
        config = TrainConfig(
            epochs=5, batch_size=32, learning_rate=0.01, clip=4.0, seed=11,
            pipeline="none",
        )
        a, _ = pretrain_standard(spec, blobs.x_train, blobs.y_train, config)
        b, _ = pretrain_standard(spec, blobs.x_train, blobs.y_train, config)
        assert np.array_equal(a, b)

    def test_tolerance_stops_early(self, spec, blobs):
        config = TrainConfig(
            epochs=500, batch_size=32, learning_rate=0.01, clip=4.0, seed=0,
            pipeline="none", tolerance=0.5,
        )
        _, risk = pretrain_standard(spec, blobs.x_train, blobs.y_train, config)
        assert risk <= 0.5


def _finetune_config(**overrides):
    base = dict(
        epochs=3,
        batch_size=32,
        learning_rate=0.01,
        temperature=0.0,
        schedule="constant",
        clip=4.0,
        seed=5,
        channel=ChannelPolicy((("awgn", 10.0, "qpsk"),)),
        pipeline="none",
    )
    base.update(overrides)
    return TrainConfig(**base)


class TestFineTuning:
    def test_robust_all_disabled_equals_plain_sgd(self, spec, blobs):
        config = _finetune_config()
        theta_z = init_params(spec, np.random.default_rng(8))
        weights, _ = train_robust(
            spec, blobs.x_train, blobs.y_train, config, theta_z,
            blobs.x_test, blobs.y_test,
        )
        # reference: manual SGD with the same batch order
        from wdl.network import batch_loss_and_gradient

        ss = np.random.SeedSequence(config.seed)
        rng_batch = np.random.default_rng(ss.spawn(5)[0])
        w = theta_z.copy()
        n = blobs.x_train.shape[0]
        for _ in range(config.epochs):
            perm = rng_batch.permutation(n)
            for start in range(0, n, config.batch_size):
                idx = perm[start : start + config.batch_size]
                _, g, _ = batch_loss_and_gradient(
                    spec, w, blobs.x_train[idx], blobs.y_train[idx], config.clip
                )
                w = w - config.learning_rate * g
        assert np.array_equal(weights, w)

    def test_reproducible_traces(self, spec, blobs):
        config = _finetune_config(
            pipeline="wireless", temperature=0.01, epochs=2, seed=21,
            eval_channel=("awgn", 10.0, "qpsk"),
        )
        theta_z = init_params(spec, np.random.default_rng(9))
        w1, t1 = train_robust(
            spec, blobs.x_train, blobs.y_train, config, theta_z,
            blobs.x_test, blobs.y_test,
        )
        w2, t2 = train_robust(
            spec, blobs.x_train, blobs.y_train, config, theta_z,
            blobs.x_test, blobs.y_test,
        )
        assert np.array_equal(w1, w2)
        assert [r.params_hash for r in t1.epochs] == [r.params_hash for r in t2.epochs]
        assert [r.mi_estimate for r in t1.epochs] == [r.mi_estimate for r in t2.epochs]
        assert [r.test_accuracy for r in t1.epochs] == [r.test_accuracy for r in t2.epochs]

    def test_vanilla_reproducible_and_logged(self, spec, blobs):
        config = _finetune_config(pipeline="wireless", epochs=2, seed=22,
                                  eval_channel=("awgn", 10.0, "qpsk"))
        theta_z = init_params(spec, np.random.default_rng(10))
        w1, t1 = train_vanilla(
            spec, blobs.x_train, blobs.y_train, config, theta_z,
            blobs.x_test, blobs.y_test,
        )
        w2, t2 = train_vanilla(
            spec, blobs.x_train, blobs.y_train, config, theta_z,
            blobs.x_test, blobs.y_test,
        )
        assert np.array_equal(w1, w2)
        assert len(t1.epochs) == 2
        assert len(t1.gradient_log) == 2 * int(np.ceil(blobs.x_train.shape[0] / 32))
        assert t1.method == "vanilla"
        assert all(r.beta == 0.0 for r in t1.epochs)

    def test_vanilla_reaches_pretraining_parity(self, spec, blobs):
        # fine-tuning on the clean pipeline should keep standard risk at the
        # pretrained level
        pre_cfg = TrainConfig(
            epochs=50, batch_size=32, learning_rate=0.01, clip=4.0, seed=0,
            pipeline="none",
        )
        theta_z, pre_risk = pretrain_standard(spec, blobs.x_train, blobs.y_train, pre_cfg)
        config = _finetune_config(epochs=5, learning_rate=0.001, seed=23)
        weights, _ = train_vanilla(
            spec, blobs.x_train, blobs.y_train, config, theta_z,
            blobs.x_test, blobs.y_test,
        )
        final = standard_risk(spec, weights, blobs.x_train, blobs.y_train, 4.0)
        assert final <= pre_risk + 0.05

    def test_mi_trace_recorded(self, spec, blobs):
        config = _finetune_config(
            pipeline="wireless", temperature=0.01, epochs=3, seed=24,
            eval_channel=("rayleigh", 10.0, "qpsk"),
        )
        theta_z = init_params(spec, np.random.default_rng(11))
        _, trace = train_robust(
            spec, blobs.x_train, blobs.y_train, config, theta_z,
            blobs.x_test, blobs.y_test,
        )
        assert trace.mi_values.shape == (3,)
        assert np.all(trace.mi_values >= 0)
        assert all(0.0 <= r.test_accuracy <= 1.0 for r in trace.epochs)

    def test_divergence_aborts_with_last_snapshot(self, blobs):
        from wdl.exceptions import TrainingFailure

        spec = NetworkSpec(layer_sizes=(2, 6, 2), split_index=1, activation="identity")
        theta_z = init_params(spec, np.random.default_rng(0))
        config = _finetune_config(epochs=4, batch_size=16, learning_rate=1e308)
        with np.errstate(all="ignore"):
            with pytest.raises(TrainingFailure) as excinfo:
                train_robust(
                    spec, blobs.x_train, blobs.y_train, config, theta_z,
                    blobs.x_test, blobs.y_test,
                )
        assert hasattr(excinfo.value, "last_params")
        assert np.all(np.isfinite(excinfo.value.last_params))

    def test_channel_policy_validation(self):
        with pytest.raises(ConfigurationError):
            ChannelPolicy(())
        policy = ChannelPolicy((("awgn", 10, "qpsk"), ("rayleigh", 5, "qam16")))
        state = policy.draw(np.random.default_rng(0))
        assert isinstance(state, ChannelState)
