"""Seeded experiment runners: bound table, rate sweep, training comparison,
and the BER sweep.

Each runner consumes a validated config, derives every random stream from
the master seed plus a cell label, and writes CSV plus a JSON mirror into
the output directory.  Reruns with the same config are bitwise identical.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .. import channel as phy
from ..exceptions import ConfigurationError
from ..network import NetworkSpec, load_params, save_params

from ..outage import (
    OutageRecord,
    achievable_boundary,
    epsilon_capacity,
    outage_indicator,
    outage_probability,
)
from ..risk import (
    evaluate_risk_report,
    sigma_from_clip,
    standard_risk,
    subgaussian_bound,
    wireless_risk,
)
from ..training import (
    ChannelPolicy,
    TrainConfig,
    pretrain_standard,
    train_robust,
    train_vanilla,
    wireless_accuracy,
)
from .config import config_hash, derive_seed
from .datasets import make_dataset
from .io import TOOL_VERSION, emit_results

__all__ = [
    "run_ber",
    "run_bound_table",
    "run_rate_sweep",
    "run_train_compare",
    "BER_COLUMNS",
    "BOUND_TABLE_COLUMNS",
    "RATE_SWEEP_COLUMNS",
    "TRAIN_TRACE_COLUMNS",
    "ACCURACY_RATE_COLUMNS",
]

BER_COLUMNS = ["scheme", "snr_db", "bits_sent", "bit_errors", "ber", "analytic_ber", "seed"]
BOUND_TABLE_COLUMNS = [
    "channel_kind", "snr_db", "scheme", "n_draws", "standard_risk",
    "g_hat", "g_signed", "sigma", "mi_estimate", "g_bound", "subgamma_bound",
    "p_e", "accuracy", "ber", "seed",
]
RATE_SWEEP_COLUMNS = [
    "rate_bits_per_symbol", "scheme", "mean_wireless_loss", "loss_std",
    "in_region", "L_hat", "G_hat", "p_e", "capacity_C", "capacity_eps", "seed",
]
TRAIN_TRACE_COLUMNS = ["epoch", "method", "mi_estimate", "test_accuracy", "eta", "beta", "seed"]
ACCURACY_RATE_COLUMNS = ["method", "rate_bits_per_symbol", "scheme", "accuracy", "seed"]


def _metadata(config: dict) -> dict:
    return {
        "config_hash": config_hash(config),
        "master_seed": config["seed"],
        "tool_version": TOOL_VERSION,
    }


def _emit(rows, columns, out_dir, stem, config, summary=None):
    out_dir = Path(out_dir)
    meta = _metadata(config)
    if summary:
        meta["summary"] = summary
    emit_results(rows, out_dir / f"{stem}.csv", columns, fmt="csv")
    emit_results(rows, out_dir / f"{stem}.json", columns, fmt="json", metadata=meta)


def _load_dataset(config: dict):
    section = config["dataset"]
    return make_dataset(
        section["generator"],
        section["n"],
        section["noise"],
        derive_seed(config["seed"], "dataset"),
    )


def _network_spec(config: dict, n_features: int, n_classes: int) -> NetworkSpec:
    section = config["network"]
    activation = section.get("activation", "relu")
    if isinstance(activation, list):
        activation = tuple(activation)
    return NetworkSpec(
        layer_sizes=(n_features, *section["hidden"], n_classes),
        split_index=section["split_index"],
        activation=activation,
    )


def _pretrain_config(config: dict, seed: int) -> TrainConfig:
    s = config["pretrain"]
    return TrainConfig(
        epochs=s["epochs"],
        batch_size=s["batch_size"],
        learning_rate=s["learning_rate"],
        clip=s.get("clip", config["clip"]),
        seed=seed,
        tolerance=s.get("tolerance"),
        pipeline="none",
    )


def _finetune_config(config: dict, seed: int, cell: dict, method: str) -> TrainConfig:
    s = config["finetune"]
    condition = (cell["kind"], cell["snr_db"], cell["scheme"])
    lr = s["learning_rate"]
    if method == "vanilla":
        lr = s.get("baseline_learning_rate", 0.001)
    return TrainConfig(
        epochs=s["epochs"],
        batch_size=s["batch_size"],
        learning_rate=lr,
        temperature=s.get("temperature", 0.0) if method == "robust" else 0.0,
        schedule=s.get("schedule", "polynomial"),
        schedule_k0=s.get("schedule_k0", 100.0),
        prior_variance=s.get("prior_variance", 1.0),
        clip=s.get("clip", config["clip"]),
        seed=seed,
        channel=ChannelPolicy((condition,)),
        pipeline=s.get("pipeline", "wireless"),
        surrogate_step=s.get("surrogate_step", 0.1),
        mi_window=s.get("mi_window", 500),
        mi_rho=s.get("mi_rho", 0.99),
        mi_snapshots=s.get("mi_snapshots", 10),
        eval_channel=condition,
    )


def _pretrained(config: dict, dataset, spec: NetworkSpec, out_dir=None):
    """Pretrain the prior weights, reusing a snapshot from the output
    directory when one with the same pretraining provenance exists."""
    snapshot = None
    if out_dir is not None:
        provenance = config_hash(
            {
                "dataset": config["dataset"],
                "network": config["network"],
                "pretrain": config["pretrain"],
                "clip": config["clip"],
                "seed": config["seed"],
            }
        )
        snapshot = Path(out_dir) / f"theta_z_{provenance}.params"
    if snapshot is not None and snapshot.exists():
        return load_params(snapshot, spec), None
    cfg = _pretrain_config(config, derive_seed(config["seed"], "pretrain"))
    theta_z, risk = pretrain_standard(spec, dataset.x_train, dataset.y_train, cfg)
    if snapshot is not None:
        snapshot.parent.mkdir(parents=True, exist_ok=True)
        save_params(snapshot, spec, theta_z)
    return theta_z, risk


def _finetune(spec, dataset, config, cell, method, seed, theta_z):
    cfg = _finetune_config(config, seed, cell, method)
    if cfg.epochs < 1:
        raise ConfigurationError("fine-tuning needs at least one epoch")
    train = train_robust if method == "robust" else train_vanilla
    return train(
        spec,
        dataset.x_train,
        dataset.y_train,
        cfg,
        theta_z,
        dataset.x_test,
        dataset.y_test,
    )


def run_ber(config: dict, out_dir) -> list[dict]:
    """BER sweep over (kind, scheme, snr) cells with an analytic reference."""
    master = config["seed"]
    section = config["ber"]
    rows = []
    for kind in section.get("kinds", ["awgn"]):
        for scheme_name in section["schemes"]:
            scheme = phy.modulation(scheme_name)
            for snr_db in section["snr_db"]:
                label = f"ber:{kind}:{scheme.name}:{snr_db}"
                seed = derive_seed(master, label)
                sent, errors = phy.ber_trial(
                    scheme, snr_db, kind, section["n_bits"], np.random.default_rng(seed)
                )
                rows.append(
                    {
                        "scheme": f"{kind}:{scheme.name}",
                        "snr_db": float(snr_db),
                        "bits_sent": sent,
                        "bit_errors": errors,
                        "ber": errors / sent,
                        "analytic_ber": phy.analytic_ber(scheme, snr_db, kind),
                        "seed": seed,
                    }
                )
    _emit(rows, BER_COLUMNS, out_dir, "ber", config)
    return rows


def run_bound_table(config: dict, out_dir) -> list[dict]:
    """One row per channel cell: risks, discrepancy, MI-based bound, outage
    probability, accuracy, BER.  A cell with discrepancy above its bound
    fails the run."""
    master = config["seed"]
    dataset = _load_dataset(config)
    n_classes = int(np.unique(dataset.y_train).size)
    spec = _network_spec(config, dataset.x_train.shape[1], n_classes)
    theta_z, _ = _pretrained(config, dataset, spec, out_dir)
    arm = config.get("finetune_arm", "vanilla")
    n_draws = config["draws_per_cell"]

    rows = []
    violations = []
    for cell in config["channel_grid"]:
        label = f"{cell['kind']}:{cell['snr_db']}:{cell['scheme']}"
        weights, trace = _finetune(
            spec, dataset, config, cell, arm,
            derive_seed(master, f"finetune:{label}"), theta_z,
        )
        mi = trace.epochs[-1].mi_estimate
        rng = np.random.default_rng(derive_seed(master, f"risk:{label}"))
        state = phy.ChannelState.draw(cell["kind"], cell["snr_db"], cell["scheme"], rng)
        report = evaluate_risk_report(
            spec,
            weights,
            dataset.x_test,
            dataset.y_test,
            state,
            config["clip"],
            n_draws,
            mi,
            rng,
            subgamma_c=config["clip"] / 2.0,
        )
        flags = (np.abs(report.sample_losses - report.standard_risk) >= report.bound)
        p_e = outage_probability(flags.ravel().astype(int))
        if report.discrepancy > report.bound:
            violations.append(label)
        rows.append(
            {
                "channel_kind": cell["kind"],
                "snr_db": float(cell["snr_db"]),
                "scheme": cell["scheme"],
                "n_draws": n_draws,
                "standard_risk": report.standard_risk,
                "g_hat": report.discrepancy,
                "g_signed": report.signed_discrepancy,
                "sigma": report.sigma,
                "mi_estimate": report.mi_estimate,
                "g_bound": report.bound,
                "subgamma_bound": report.subgamma_bound,
                "p_e": p_e.value,
                "accuracy": report.accuracy,
                "ber": report.ber,
                "seed": derive_seed(master, f"finetune:{label}"),
            }
        )
    _emit(rows, BOUND_TABLE_COLUMNS, out_dir, "bound_table", config)
    if violations:
        raise RuntimeError(
            f"wireless risk discrepancy exceeded its bound in cells: {violations}"
        )
    return rows


def run_rate_sweep(config: dict, out_dir) -> tuple[list[dict], dict]:
    """Wireless loss across the modulation rate grid with the task
    achievable region, its boundary, and capacity annotations."""
    master = config["seed"]
    dataset = _load_dataset(config)
    n_classes = int(np.unique(dataset.y_train).size)
    spec = _network_spec(config, dataset.x_train.shape[1], n_classes)
    theta_z, _ = _pretrained(config, dataset, spec, out_dir)
    ref = config["reference_channel"]
    sweep = config.get("rate_eval", {"kind": ref["kind"], "snr_db": ref["snr_db"]})
    arm = config.get("finetune_arm", "vanilla")
    n_draws = config["eval_draws"]

    weights, trace = _finetune(
        spec, dataset, config, ref, arm,
        derive_seed(master, "finetune:reference"), theta_z,
    )
    mi = trace.epochs[-1].mi_estimate
    sigma = sigma_from_clip(config["clip"])
    g_bound = subgaussian_bound(sigma, mi)
    l_hat = standard_risk(
        spec, weights, dataset.x_test, dataset.y_test, config["clip"]
    )
    capacity = phy.shannon_capacity(sweep["snr_db"])

    # dataset-mean outage records, one per (rate, channel draw), pooled over
    # the whole sweep to estimate the outage probability behind capacity_eps
    records: list[OutageRecord] = []
    per_scheme: list[dict] = []
    rates, means = [], []
    for channel_id, scheme_name in enumerate(config["rate_grid"]):
        scheme = phy.modulation(scheme_name)
        seed = derive_seed(master, f"sweep:{scheme.name}")
        rng = np.random.default_rng(seed)
        state = phy.ChannelState.draw(sweep["kind"], sweep["snr_db"], scheme, rng)
        losses = [
            wireless_risk(
                spec, weights, dataset.x_test, dataset.y_test, state, config["clip"], rng
            )
            for _ in range(n_draws)
        ]
        for value in losses:
            records.append(
                OutageRecord(
                    wireless_loss=value,
                    standard_risk=l_hat,
                    bound=g_bound,
                    indicator=outage_indicator(value, l_hat, g_bound),
                    rate=float(scheme.bits_per_symbol),
                    channel_id=channel_id,
                )
            )
        mean_loss = float(np.mean(losses))
        rates.append(float(scheme.bits_per_symbol))
        means.append(mean_loss)
        per_scheme.append(
            {
                "scheme": scheme.name,
                "rate": float(scheme.bits_per_symbol),
                "mean_loss": mean_loss,
                "loss_std": float(np.std(losses)),
                "seed": seed,
            }
        )

    p_e = outage_probability(records)
    capacity_eps = epsilon_capacity(capacity, p_e.value)
    rows = [
        {
            "rate_bits_per_symbol": item["rate"],
            "scheme": item["scheme"],
            "mean_wireless_loss": item["mean_loss"],
            "loss_std": item["loss_std"],
            "in_region": int(abs(item["mean_loss"] - l_hat) < g_bound),
            "L_hat": l_hat,
            "G_hat": g_bound,
            "p_e": p_e.value,
            "capacity_C": capacity,
            "capacity_eps": capacity_eps,
            "seed": item["seed"],
        }
        for item in per_scheme
    ]

    boundary = achievable_boundary(rates, means, l_hat, g_bound)
    summary = {
        "boundary_rate": boundary.rate,
        "boundary_refined": boundary.refined,
        "capacity_C": capacity,
        "capacity_eps": capacity_eps,
        "p_e": p_e.value,
        "diagnostic": boundary.diagnostic,
    }
    _emit(rows, RATE_SWEEP_COLUMNS, out_dir, "rate_sweep", config, summary=summary)
    if boundary.rate is not None and boundary.rate > capacity_eps:
        raise RuntimeError(
            f"achievable boundary rate {boundary.rate} exceeds the task-aware "
            f"capacity {capacity_eps}"
        )
    return rows, summary


def run_train_compare(config: dict, out_dir) -> tuple[list[dict], list[dict]]:
    """Robust vs vanilla fine-tuning from one shared pretrained model:
    per-epoch traces plus final accuracy across the rate grid."""
    master = config["seed"]
    dataset = _load_dataset(config)
    n_classes = int(np.unique(dataset.y_train).size)
    spec = _network_spec(config, dataset.x_train.shape[1], n_classes)
    theta_z, _ = _pretrained(config, dataset, spec, out_dir)
    ref = config["reference_channel"]
    eval_cell = config.get("rate_eval", ref)
    n_draws = config["eval_draws"]

    trace_rows, acc_rows = [], []
    for run_seed in config["seeds"]:
        for method in ("robust", "vanilla"):
            label = f"{method}:{run_seed}"
            weights, trace = _finetune(
                spec, dataset, config, ref, method, derive_seed(master, label), theta_z
            )
            save_params(
                Path(out_dir) / f"weights_{method}_{run_seed}.params", spec, weights
            )
            for record in trace.epochs:
                trace_rows.append(
                    {
                        "epoch": record.epoch,
                        "method": method,
                        "mi_estimate": record.mi_estimate,
                        "test_accuracy": record.test_accuracy,
                        "eta": record.eta,
                        "beta": record.beta,
                        "seed": run_seed,
                    }
                )
            for scheme_name in config["rate_grid"]:
                scheme = phy.modulation(scheme_name)
                rng = np.random.default_rng(
                    derive_seed(master, f"acc:{label}:{scheme.name}")
                )
                accs = [
                    wireless_accuracy(
                        spec,
                        weights,
                        dataset.x_test,
                        dataset.y_test,
                        (eval_cell["kind"], eval_cell["snr_db"], scheme.name),
                        rng,
                    )
                    for _ in range(n_draws)
                ]
                acc_rows.append(
                    {
                        "method": method,
                        "rate_bits_per_symbol": float(scheme.bits_per_symbol),
                        "scheme": scheme.name,
                        "accuracy": float(np.mean(accs)),
                        "seed": run_seed,
                    }
                )
    _emit(trace_rows, TRAIN_TRACE_COLUMNS, out_dir, "train_trace", config)
    _emit(acc_rows, ACCURACY_RATE_COLUMNS, out_dir, "accuracy_vs_rate", config)
    return trace_rows, acc_rows
