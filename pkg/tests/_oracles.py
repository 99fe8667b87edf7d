"""Shared independent oracles used by the unit and acceptance suites."""

import numpy as np

from wdl.network import NetworkSpec, batch_clipped_losses, unflatten_params


def random_spec(rng, activations=("relu", "tanh", "identity")):
    n_hidden = int(rng.integers(1, 3))
    sizes = (
        int(rng.integers(2, 5)),
        *[int(rng.integers(3, 8)) for _ in range(n_hidden)],
        int(rng.integers(2, 4)),
    )
    split = int(rng.integers(0, len(sizes)))
    acts = tuple(str(rng.choice(activations)) for _ in range(len(sizes) - 2))
    return NetworkSpec(layer_sizes=sizes, split_index=split, activation=acts)


def central_difference(spec, params, x, y, clip, pipeline=None, step=1e-5):
    """Central finite differences of the clipped loss at the given point."""
    fd = np.empty_like(params)
    for i in range(params.size):
        up, down = params.copy(), params.copy()
        up[i] += step
        down[i] -= step
        lu, _ = batch_clipped_losses(spec, up, x[None, :], np.array([y]), clip, pipeline)
        ld, _ = batch_clipped_losses(spec, down, x[None, :], np.array([y]), clip, pipeline)
        fd[i] = (lu[0] - ld[0]) / (2 * step)
    return fd


def well_conditioned_sample(rng):
    """Draw (spec, params, x, y) resampling away from relu kinks and the
    clip boundary so finite differences see a smooth function."""
    while True:
        spec = random_spec(rng)
        params = 0.6 * rng.standard_normal(spec.n_params)
        x = rng.standard_normal(spec.input_dim)
        y = int(rng.integers(0, spec.n_classes))
        layers = unflatten_params(spec, params)
        a, safe = x, True
        for i, (w, b) in enumerate(layers):
            z = w @ a + b
            if i < spec.n_layers - 1:
                if spec.activation[i] == "relu" and np.min(np.abs(z)) < 1e-3:
                    safe = False
                    break
                a = np.maximum(z, 0) if spec.activation[i] == "relu" else (
                    np.tanh(z) if spec.activation[i] == "tanh" else z
                )
        if not safe:
            continue
        losses, _ = batch_clipped_losses(spec, params, x[None, :], np.array([y]), 10.0)
        if abs(losses[0] - 10.0) > 1e-3:
            return spec, params, x, y
