"""Desk-scale simulator and library for task-aware robustness in wireless
distributed learning.

Subpackages and modules:

- network: split feedforward classifier with exact manual gradients
- channel: quantization, Gray-mapped modulation, AWGN/Rayleigh fading
- risk: standard/wireless risks, discrepancy, and its upper bounds
- mi: conditional mutual-information estimation from training traces
- outage: task outage probability and task-aware epsilon-capacity
- training: pretraining, SGLD robust fine-tuning, Adam baseline
- estimators: scikit-learn style wrappers around the training loops
- harness: datasets, configs, experiment runners, CLI
"""

from .network import (
    NetworkSpec,
    Prediction,
    forward,
    split_forward,
    clipped_cross_entropy,
    gradient,
)
from .channel import (
    ChannelState,
    ModulationScheme,
    modulation,
    shannon_capacity,
    qfunc,
)
from .risk import (
    RiskReport,
    standard_risk,
    wireless_risk,
    discrepancy,
    sigma_from_clip,
    subgaussian_bound,
    subgamma_bound,
)
from .mi import (
    GradientLog,
    MiEstimate,
    estimate_mi,
    gaussian_kl,
    influence_shift,
    fisher_covariance,
    moving_quadratic_mean,
)
from .outage import (
    OutageRecord,
    outage_indicator,
    outage_probability,
    epsilon_capacity,
    achievable_boundary,
)
from .training import (
    ChannelPolicy,
    Schedule,
    TrainConfig,
    TrainTrace,
    decay_step,
    sgld_step,
    energy_gradient,
    pretrain_standard,
    train_robust,
    train_vanilla,
)
from .estimators import (
    SplitNetClassifier,
    RobustSGLDClassifier,
    VanillaWirelessClassifier,
)

__version__ = "0.1.0"
