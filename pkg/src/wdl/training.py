"""Training loops: standard pretraining, vanilla Adam wireless fine-tuning,
and the SGLD-based robust fine-tuning with a Gaussian prior anchored at the
pretrained weights.

The robust arm minimizes (wireless loss - beta * Gaussian prior log-density)
by stochastic gradient Langevin dynamics: a gradient step plus Gaussian
noise of per-coordinate std sqrt(2 * eta_k * beta_k).  Both fine-tuning
arms log their per-batch loss gradients and a quadratic-mean weight
trajectory so the conditional-MI estimate can be tracked per epoch.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from . import channel as phy
from . import network as net
from .exceptions import ConfigurationError, TrainingFailure
from .mi import GradientLog, estimate_mi, moving_quadratic_mean

__all__ = [
    "ChannelPolicy",
    "Schedule",
    "TrainConfig",
    "EpochRecord",
    "TrainTrace",
    "decay_step",
    "sgld_step",
    "energy_gradient",
    "pretrain_standard",
    "train_robust",
    "train_vanilla",
    "wireless_accuracy",
]


@dataclass(frozen=True)
class ChannelPolicy:
    """Distribution over channel conditions sampled once per batch.

    Each condition is (kind, snr_db, scheme name); a draw picks one
    uniformly and redraws the fading coefficient.
    """

    conditions: tuple[tuple[str, float, str], ...]

    def __post_init__(self) -> None:
        if not self.conditions:
            raise ConfigurationError("channel policy needs at least one condition")
        object.__setattr__(
            self,
            "conditions",
            tuple((k, float(s), m) for k, s, m in self.conditions),
        )

    def draw(self, rng: np.random.Generator) -> phy.ChannelState:
        idx = int(rng.integers(len(self.conditions))) if len(self.conditions) > 1 else 0
        kind, snr_db, scheme = self.conditions[idx]
        return phy.ChannelState.draw(kind, snr_db, scheme, rng)


@dataclass(frozen=True)
class Schedule:
    """Learning-rate / temperature decay.

    The polynomial scheme eta_k = eta0 * (1 + k/k0)^-0.55 diverges in sum
    while its squares converge; beta decays with exponent 1.
    """

    eta0: float
    beta0: float
    scheme: str = "polynomial"
    k0: float = 100.0
    eta_exponent: float = 0.55
    beta_exponent: float = 1.0

    def __post_init__(self) -> None:
        if self.eta0 <= 0:
            raise ConfigurationError("eta0 must be positive")
        if self.beta0 < 0:
            raise ConfigurationError("beta0 must be nonnegative")
        if self.scheme not in ("polynomial", "constant"):
            raise ConfigurationError(f"unknown schedule scheme {self.scheme!r}")


def decay_step(schedule: Schedule, k: int) -> tuple[float, float]:
    """(eta_k, beta_k) at global step k (k = 0 returns the initial values)."""
    if k < 0:
        raise ValueError("step index must be nonnegative")
    if schedule.scheme == "constant":
        return schedule.eta0, schedule.beta0
    factor = 1.0 + k / schedule.k0
    return (
        schedule.eta0 * factor**-schedule.eta_exponent,
        schedule.beta0 * factor**-schedule.beta_exponent,
    )


def sgld_step(
    w: np.ndarray,
    g: np.ndarray,
    eta_k: float,
    beta_k: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """w - eta_k * g + noise with per-coordinate std sqrt(2 eta_k beta_k).

    At beta_k = 0 no noise is drawn and the update is bitwise a plain
    gradient step.
    """
    if eta_k <= 0:
        raise ValueError("step size must be positive")
    if beta_k < 0:
        raise ValueError("temperature must be nonnegative")
    out = w - eta_k * g
    if beta_k > 0:
        out = out + np.sqrt(2.0 * eta_k * beta_k) * rng.standard_normal(w.shape)
    return out


@dataclass
class TrainConfig:
    """Hyperparameters shared by the pretraining and fine-tuning loops."""

    epochs: int
    batch_size: int
    learning_rate: float
    temperature: float = 0.0
    schedule: str = "polynomial"
    schedule_k0: float = 100.0
    prior_variance: float | np.ndarray = 1.0
    clip: float = 4.0
    seed: int = 0
    channel: ChannelPolicy | None = None
    pipeline: str = "wireless"  # wireless | surrogate | none
    surrogate_step: float = 0.1
    tolerance: float | None = None
    mi_window: int = 500
    mi_rho: float = 0.99
    mi_snapshots: int = 10
    mi_signed_mean: bool = False
    eval_channel: tuple[str, float, str] | None = None

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ConfigurationError("epochs must be nonnegative")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")
        if self.temperature < 0:
            raise ConfigurationError("temperature must be nonnegative")
        if self.pipeline not in ("wireless", "surrogate", "none"):
            raise ConfigurationError(f"unknown pipeline mode {self.pipeline!r}")

    def make_schedule(self) -> Schedule:
        return Schedule(
            eta0=self.learning_rate,
            beta0=self.temperature,
            scheme=self.schedule,
            k0=self.schedule_k0,
        )


@dataclass
class EpochRecord:
    epoch: int
    params_hash: str
    mi_estimate: float
    test_accuracy: float
    eta: float
    beta: float


@dataclass
class TrainTrace:
    method: str
    seed: int
    epochs: list[EpochRecord] = field(default_factory=list)
    gradient_log: GradientLog | None = None
    final_params: np.ndarray | None = None

    @property
    def mi_values(self) -> np.ndarray:
        return np.array([r.mi_estimate for r in self.epochs])


def _params_hash(params: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(params).tobytes()).hexdigest()[:16]


def _prior_gradient(
    w: np.ndarray, theta_z: np.ndarray, prior_variance, beta: float
) -> np.ndarray:
    var = np.asarray(prior_variance, dtype=np.float64)
    if np.any(var <= 0):
        raise ConfigurationError("prior variance must be positive")
    return beta * (w - theta_z) / var


def energy_gradient(
    spec: net.NetworkSpec,
    w: np.ndarray,
    x_batch: np.ndarray,
    y_batch: np.ndarray,
    state: phy.ChannelState | None,
    theta_z: np.ndarray,
    prior_variance,
    beta: float,
    clip: float,
    rng: np.random.Generator,
    pipeline: str = "wireless",
    surrogate_step: float = 0.1,
    return_parts: bool = False,
):
    """Gradient of the mini-batch energy: mean clipped wireless loss plus
    beta times the Gaussian prior's negative log-density.

    The prior contributes beta * (w - theta_z) / variance (its log-det term
    is constant in w); the likelihood is evaluated through the configured
    split pipeline with pass-through gradients.  With return_parts, the
    bare likelihood gradient is returned alongside for logging.
    """
    if pipeline == "wireless":
        if state is None:
            raise ConfigurationError("wireless pipeline needs a channel state")
        feature_pipeline = phy.make_wireless_pipeline(state, rng)
    elif pipeline == "surrogate":
        feature_pipeline = phy.make_surrogate_pipeline(surrogate_step, rng)
    else:
        feature_pipeline = None
    loss, g_like, _ = net.batch_loss_and_gradient(
        spec, w, x_batch, y_batch, clip, feature_pipeline
    )
    g = g_like if beta == 0 else g_like + _prior_gradient(w, theta_z, prior_variance, beta)
    if return_parts:
        return g, g_like, loss
    return g


class _Adam:
    """Standard Adam with bias correction."""

    def __init__(self, dim: int, lr: float, b1=0.9, b2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps
        self.m = np.zeros(dim)
        self.v = np.zeros(dim)
        self.t = 0

    def step(self, w: np.ndarray, g: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.b1 * self.m + (1 - self.b1) * g
        self.v = self.b2 * self.v + (1 - self.b2) * g * g
        m_hat = self.m / (1 - self.b1**self.t)
        v_hat = self.v / (1 - self.b2**self.t)
        return w - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _batches(n: int, batch_size: int, rng: np.random.Generator):
    perm = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield perm[start : start + batch_size]


def pretrain_standard(
    spec: net.NetworkSpec,
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
    init: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Standard (channel-free) training of the split network with Adam.

    Stops at the epoch budget, or earlier once the epoch-end standard risk
    drops below config.tolerance.  Returns the weights and the final
    standard risk; zero epochs returns the initialization unchanged.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.intp)
    ss = np.random.SeedSequence(config.seed)
    rng_init, rng_batch = (np.random.default_rng(s) for s in ss.spawn(2))
    w = net.init_params(spec, rng_init) if init is None else np.array(init, dtype=np.float64)
    opt = _Adam(spec.n_params, config.learning_rate)
    from .risk import standard_risk  # local import to avoid a cycle

    final = standard_risk(spec, w, x, y, config.clip)
    for _ in range(config.epochs):
        for idx in _batches(x.shape[0], config.batch_size, rng_batch):
            loss, g, _ = net.batch_loss_and_gradient(
                spec, w, x[idx], y[idx], config.clip
            )
            if not np.isfinite(loss):
                raise TrainingFailure("non-finite loss during pretraining")
            w = opt.step(w, g)
        final = standard_risk(spec, w, x, y, config.clip)
        if config.tolerance is not None and final <= config.tolerance:
            break
    return w, final


def wireless_accuracy(
    spec: net.NetworkSpec,
    params: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    condition: tuple[str, float, str] | None,
    rng: np.random.Generator,
) -> float:
    """Test accuracy through the wireless pipeline (clean when condition is
    None); per-sample fading, fresh noise."""
    if condition is None:
        _, probs = net.forward_batch(spec, params, x)
        return float(np.mean(np.argmax(probs, axis=1) == np.asarray(y)))
    state = phy.ChannelState.draw(condition[0], condition[1], condition[2], rng)
    pipeline = phy.make_wireless_pipeline(state, rng)
    _, probs = net.forward_batch(spec, params, x, pipeline)
    return float(np.mean(np.argmax(probs, axis=1) == np.asarray(y)))


def _finetune(
    spec: net.NetworkSpec,
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
    theta_z: np.ndarray,
    x_test: np.ndarray,
    y_test: np.ndarray,
    method: str,
) -> tuple[np.ndarray, TrainTrace]:
    if config.pipeline == "wireless" and config.channel is None:
        raise ConfigurationError("wireless fine-tuning needs a channel policy")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.intp)
    theta_z = np.asarray(theta_z, dtype=np.float64)
    if theta_z.shape != (spec.n_params,):
        raise ConfigurationError("prior mean does not match the network spec")

    ss = np.random.SeedSequence(config.seed)
    rng_batch, rng_channel, rng_pipe, rng_noise, rng_eval_root = (
        np.random.default_rng(s) for s in ss.spawn(5)
    )
    eval_seeds = rng_eval_root.integers(0, 2**63 - 1, size=max(config.epochs, 1))

    schedule = config.make_schedule()
    w = theta_z.copy()
    theta_bar = np.abs(theta_z)
    window: list[np.ndarray] = []
    log = GradientLog(max_entries=config.mi_window)
    trace = TrainTrace(method=method, seed=config.seed, gradient_log=log)
    opt = _Adam(spec.n_params, config.learning_rate) if method == "vanilla" else None

    k = 0
    eta_k, beta_k = decay_step(schedule, 0)
    for epoch in range(config.epochs):
        for idx in _batches(x.shape[0], config.batch_size, rng_batch):
            eta_k, beta_k = decay_step(schedule, k)
            state = (
                config.channel.draw(rng_channel)
                if config.pipeline == "wireless"
                else None
            )
            g, g_like, loss = energy_gradient(
                spec,
                w,
                x[idx],
                y[idx],
                state,
                theta_z,
                config.prior_variance,
                beta_k if method == "robust" else 0.0,
                config.clip,
                rng_pipe,
                pipeline=config.pipeline,
                surrogate_step=config.surrogate_step,
                return_parts=True,
            )
            if not np.isfinite(loss) or not np.all(np.isfinite(g)):
                err = TrainingFailure(f"non-finite loss at step {k}")
                err.last_params = w.copy()
                raise err
            log.append(g_like)
            if method == "robust":
                w = sgld_step(w, g, eta_k, beta_k, rng_noise)
            else:
                w = opt.step(w, g)
            if config.mi_signed_mean:
                theta_bar = (
                    config.mi_rho * theta_bar
                    + (1 - config.mi_rho) * np.mean(_window_push(window, w, config), axis=0)
                )
            else:
                theta_bar = moving_quadratic_mean(
                    theta_bar, _window_push(window, w, config), config.mi_rho
                )
            k += 1
        mi = estimate_mi(theta_bar - theta_z, log, n=x.shape[0])
        acc = wireless_accuracy(
            spec,
            w,
            x_test,
            y_test,
            config.eval_channel,
            np.random.default_rng(eval_seeds[epoch]),
        )
        trace.epochs.append(
            EpochRecord(
                epoch=epoch,
                params_hash=_params_hash(w),
                mi_estimate=mi.value,
                test_accuracy=acc,
                eta=eta_k,
                beta=beta_k if method == "robust" else 0.0,
            )
        )
    trace.final_params = w.copy()
    return w, trace


def _window_push(window: list[np.ndarray], w: np.ndarray, config: TrainConfig):
    window.append(w.copy())
    if len(window) > config.mi_snapshots:
        window.pop(0)
    return np.stack(window)


def train_robust(
    spec: net.NetworkSpec,
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
    theta_z: np.ndarray,
    x_test: np.ndarray,
    y_test: np.ndarray,
) -> tuple[np.ndarray, TrainTrace]:
    """SGLD fine-tuning of the energy objective from the pretrained prior.

    Per batch: draw a channel condition, take the energy gradient through
    the wireless pipeline, apply the Langevin update, and decay eta/beta.
    Loss gradients and the quadratic-mean trajectory feed a per-epoch MI
    estimate; test accuracy is evaluated on the configured eval channel.
    """
    return _finetune(spec, x, y, config, theta_z, x_test, y_test, "robust")


def train_vanilla(
    spec: net.NetworkSpec,
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
    theta_z: np.ndarray,
    x_test: np.ndarray,
    y_test: np.ndarray,
) -> tuple[np.ndarray, TrainTrace]:
    """Adam fine-tuning baseline: same pipeline and logging as the robust
    arm, no prior term, no injected noise."""
    return _finetune(spec, x, y, config, theta_z, x_test, y_test, "vanilla")
