"""Physical layer: 1-bit feature quantization, Gray-mapped modulation,
AWGN/Rayleigh quasi-static fading, coherent demodulation, BER, capacity.

All constellations are rectangular grids with independent Gray coding per
axis, normalized to unit average symbol energy.  SNR is per symbol under
that normalization, so noise_variance = 10**(-snr_db/10); Eb/N0 follows as
SNR / bits_per_symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .exceptions import ConfigurationError, NumericalError

__all__ = [
    "ModulationScheme",
    "ChannelState",
    "TransmissionStats",
    "modulation",
    "available_schemes",
    "quantize_features",
    "dequantize_features",
    "surrogate_quantize",
    "modulate",
    "apply_channel",
    "demodulate",
    "measure_ber",
    "shannon_capacity",
    "qfunc",
    "analytic_ber",
    "transmit_features",
    "ber_trial",
    "make_wireless_pipeline",
    "make_surrogate_pipeline",
    "identity_pipeline",
]

# (in-phase levels, quadrature levels) of the rectangular grid per scheme
_SCHEME_GRIDS: dict[str, tuple[int, int]] = {
    "bpsk": (2, 1),
    "qpsk": (2, 2),
    "qam8": (4, 2),
    "qam16": (4, 4),
    "qam32": (8, 4),
    "qam64": (8, 8),
    "qam256": (16, 16),
}

_ALIASES = {"8qam": "qam8", "16qam": "qam16", "32qam": "qam32",
            "64qam": "qam64", "256qam": "qam256"}


def _gray(i: np.ndarray | int):
    return i ^ (i >> 1)


def _axis_amplitudes(n_levels: int) -> np.ndarray:
    """Unscaled axis amplitudes, most positive first; position i carries
    Gray label gray(i) so grid neighbors differ in exactly one bit."""
    if n_levels == 1:
        return np.zeros(1)
    return np.array([(n_levels - 1) - 2 * i for i in range(n_levels)], dtype=np.float64)


@dataclass(frozen=True)
class ModulationScheme:
    """Gray-labeled rectangular constellation with unit average energy."""

    name: str
    bits_i: int
    bits_q: int
    scale: float
    levels_i: np.ndarray
    levels_q: np.ndarray
    points_by_label: np.ndarray

    @property
    def bits_per_symbol(self) -> int:
        return self.bits_i + self.bits_q

    @property
    def constellation(self) -> np.ndarray:
        return self.points_by_label


@lru_cache(maxsize=None)
def modulation(name: str) -> ModulationScheme:
    """Look up a modulation scheme by name (bpsk, qpsk, qam8 ... qam256)."""
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in _SCHEME_GRIDS:
        raise ConfigurationError(f"unknown modulation scheme {name!r}")
    n_i, n_q = _SCHEME_GRIDS[key]
    amps_i, amps_q = _axis_amplitudes(n_i), _axis_amplitudes(n_q)
    energy = np.mean(amps_i**2) + np.mean(amps_q**2)
    scale = 1.0 / np.sqrt(energy)
    bits_i, bits_q = int(np.log2(n_i)), int(np.log2(n_q)) if n_q > 1 else 0

    n_points = n_i * n_q
    points = np.empty(n_points, dtype=np.complex128)
    for pos_i in range(n_i):
        for pos_q in range(n_q):
            label = (_gray(pos_i) << bits_q) | (_gray(pos_q) if n_q > 1 else 0)
            points[label] = scale * (amps_i[pos_i] + 1j * amps_q[pos_q])
    return ModulationScheme(
        name=key,
        bits_i=bits_i,
        bits_q=bits_q,
        scale=scale,
        levels_i=scale * amps_i,
        levels_q=scale * amps_q,
        points_by_label=points,
    )


def available_schemes() -> tuple[str, ...]:
    return tuple(_SCHEME_GRIDS)


@dataclass(frozen=True)
class ChannelState:
    """One channel realization: fading draw, noise level, and scheme.

    The fading coefficient stays fixed for the whole transmission of one
    data sample (quasi-static); noise is fresh per symbol.  Rate accounting
    is modulation-only, so rate_bits_per_symbol equals bits_per_symbol.
    """

    kind: str
    snr_db: float
    noise_variance: float
    scheme: ModulationScheme
    fading: complex
    rate_bits_per_symbol: float

    @classmethod
    def draw(
        cls,
        kind: str,
        snr_db: float,
        scheme: ModulationScheme | str,
        rng: np.random.Generator | None = None,
    ) -> "ChannelState":
        if isinstance(scheme, str):
            scheme = modulation(scheme)
        if kind == "awgn":
            h = 1.0 + 0.0j
        elif kind == "rayleigh":
            if rng is None:
                raise ConfigurationError("rayleigh fading draw needs an rng")
            h = complex(rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
        else:
            raise ConfigurationError(f"unknown channel kind {kind!r}")
        return cls(
            kind=kind,
            snr_db=float(snr_db),
            noise_variance=float(10.0 ** (-snr_db / 10.0)),
            scheme=scheme,
            fading=h,
            rate_bits_per_symbol=float(scheme.bits_per_symbol),
        )

    def redrawn(self, rng: np.random.Generator) -> "ChannelState":
        """Fresh fading draw with everything else unchanged."""
        if self.kind == "awgn":
            return self
        h = complex(rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
        return replace(self, fading=h)


def quantize_features(feature: np.ndarray) -> tuple[np.ndarray, float]:
    """1-bit fixed-point quantization of an L2-normalized feature vector.

    Element -> 1 if >= 0 else 0; the norm is returned as the scale the
    receiver uses for dequantization.  A zero vector degenerates to
    all-ones bits with scale 0.
    """
    feature = np.asarray(feature, dtype=np.float64)
    if feature.size == 0:
        raise ValueError("feature vector is empty")
    scale = float(np.linalg.norm(feature))
    bits = (feature >= 0.0).astype(np.uint8)
    if scale == 0.0:
        bits = np.ones_like(bits)
    return bits, scale


def dequantize_features(bits: np.ndarray, scale: float) -> np.ndarray:
    """Receiver-side reconstruction: bit b -> scale * (2b - 1) / sqrt(dim)."""
    bits = np.asarray(bits)
    return scale * (2.0 * bits.astype(np.float64) - 1.0) / np.sqrt(bits.shape[-1])


def surrogate_quantize(
    feature: np.ndarray, step: float, rng: np.random.Generator
) -> np.ndarray:
    """Additive uniform noise on [-step/2, step/2]; derivative contract is
    the identity, which is exact for this surrogate."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    feature = np.asarray(feature, dtype=np.float64)
    return feature + rng.uniform(-step / 2.0, step / 2.0, size=feature.shape)


def _pack_bits(bits: np.ndarray, width: int) -> np.ndarray:
    weights = 1 << np.arange(width - 1, -1, -1)
    return bits.reshape(*bits.shape[:-1], -1, width) @ weights


def _unpack_bits(labels: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    out = (labels[..., None] >> shifts) & 1
    return out.reshape(*labels.shape[:-1], -1).astype(np.uint8)


def modulate(
    bits: np.ndarray, scheme: ModulationScheme
) -> tuple[np.ndarray, int]:
    """Map a bit sequence to Gray-labeled symbols.

    Bit streams are zero-padded up to a symbol boundary; the pad length is
    returned so the receiver can strip it after demodulation.  Accepts a
    trailing bit axis of any batch shape.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    bps = scheme.bits_per_symbol
    n_bits = bits.shape[-1]
    n_pad = (-n_bits) % bps
    if n_pad:
        pad_shape = bits.shape[:-1] + (n_pad,)
        bits = np.concatenate([bits, np.zeros(pad_shape, dtype=np.uint8)], axis=-1)
    labels = _pack_bits(bits, bps)
    return scheme.points_by_label[labels], n_pad


def apply_channel(
    symbols: np.ndarray, state: ChannelState, rng: np.random.Generator
) -> np.ndarray:
    """y = h*x + n with circularly-symmetric complex Gaussian noise."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    sigma = np.sqrt(state.noise_variance / 2.0)
    noise = sigma * (
        rng.standard_normal(symbols.shape) + 1j * rng.standard_normal(symbols.shape)
    )
    return state.fading * symbols + noise


def _slice_axis(values: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Nearest-level positions on a uniform descending grid."""
    if levels.size == 1:
        return np.zeros(values.shape, dtype=np.intp)
    step = levels[0] - levels[1]
    pos = np.rint((levels[0] - values) / step).astype(np.intp)
    return np.clip(pos, 0, levels.size - 1)


def demodulate(
    received: np.ndarray,
    state: ChannelState,
    n_bits: int | None = None,
) -> np.ndarray:
    """Coherent minimum-distance demodulation with perfect CSI.

    Equalizes by the known fading coefficient, slices each axis to the
    nearest level, and inverts the Gray labeling.  n_bits trims the zero
    padding added by modulate.
    """
    if state.fading == 0:
        raise NumericalError("fading coefficient is zero; channel is singular")
    scheme = state.scheme
    eq = np.asarray(received, dtype=np.complex128) / state.fading
    pos_i = _slice_axis(eq.real, scheme.levels_i)
    labels = _gray(pos_i)
    if scheme.bits_q > 0:
        pos_q = _slice_axis(eq.imag, scheme.levels_q)
        labels = (labels << scheme.bits_q) | _gray(pos_q)
    bits = _unpack_bits(labels, scheme.bits_per_symbol)
    if n_bits is not None:
        bits = bits[..., :n_bits]
    return bits


def measure_ber(sent: np.ndarray, received: np.ndarray) -> float:
    """Hamming distance divided by length."""
    sent = np.asarray(sent)
    received = np.asarray(received)
    if sent.shape != received.shape:
        raise ValueError(f"length mismatch: {sent.shape} vs {received.shape}")
    if sent.size == 0:
        raise ValueError("empty bit vectors")
    return float(np.mean(sent != received))


def shannon_capacity(snr_db: float) -> float:
    """log2(1 + SNR) bits per symbol."""
    return float(np.log2(1.0 + 10.0 ** (snr_db / 10.0)))


def qfunc(x):
    """Gaussian tail probability Q(x)."""
    return 0.5 * special.erfc(np.asarray(x, dtype=np.float64) / np.sqrt(2.0))


def _axis_bit_error_rate(levels: np.ndarray, n_bits: int, sigma: float) -> float:
    """Expected bit errors per axis use / bits per axis, by enumerating the
    Gaussian mass of every decision region under every sent level."""
    n = levels.size
    if n_bits == 0:
        return 0.0
    positions = np.arange(n)
    labels = _gray(positions)
    upper = np.concatenate([[np.inf], (levels[:-1] + levels[1:]) / 2.0])
    lower = np.concatenate([(levels[:-1] + levels[1:]) / 2.0, [-np.inf]])
    total = 0.0
    for i in range(n):
        mass = qfunc((lower - levels[i]) / sigma) - qfunc((upper - levels[i]) / sigma)
        flips = np.array(
            [bin(int(labels[i]) ^ int(l)).count("1") for l in labels], dtype=np.float64
        )
        total += float(mass @ flips)
    return total / (n * n_bits)


def _awgn_ber(scheme: ModulationScheme, noise_variance: float) -> float:
    sigma = np.sqrt(noise_variance / 2.0)
    errs = (
        _axis_bit_error_rate(scheme.levels_i, scheme.bits_i, sigma) * scheme.bits_i
        + _axis_bit_error_rate(scheme.levels_q, scheme.bits_q, sigma) * scheme.bits_q
    )
    return errs / scheme.bits_per_symbol


def analytic_ber(
    scheme: ModulationScheme | str, snr_db: float, kind: str = "awgn"
) -> float:
    """Exact BER under coherent detection with perfect CSI.

    AWGN: closed Gaussian decision-region enumeration per axis.  Rayleigh:
    the conditional AWGN expression integrated over |h|^2 ~ Exp(1).
    """
    if isinstance(scheme, str):
        scheme = modulation(scheme)
    nv = 10.0 ** (-snr_db / 10.0)
    if kind == "awgn":
        return _awgn_ber(scheme, nv)
    if kind == "rayleigh":
        value, _ = integrate.quad(
            lambda t: _awgn_ber(scheme, nv / t) * np.exp(-t), 0.0, np.inf, limit=200
        )
        return float(value)
    raise ConfigurationError(f"unknown channel kind {kind!r}")


@dataclass
class TransmissionStats:
    """Bit-level accounting of one feature transmission batch."""

    bits_sent: int = 0
    bit_errors: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    def add(self, other: "TransmissionStats") -> None:
        self.bits_sent += other.bits_sent
        self.bit_errors += other.bit_errors


def transmit_features(
    features: np.ndarray,
    state: ChannelState,
    rng: np.random.Generator,
    fresh_fading: bool = True,
) -> tuple[np.ndarray, TransmissionStats]:
    """Send a feature batch through quantize -> modulate -> channel ->
    demodulate -> dequantize.

    Each row gets its own quasi-static fading draw (Rayleigh) and fresh
    noise; the quantization scale travels out of band.  Accepts a single
    vector or a (B, dim) batch and preserves the input shape.
    """
    features = np.asarray(features, dtype=np.float64)
    single = features.ndim == 1
    batch = features[None, :] if single else features
    n_rows, dim = batch.shape

    norms = np.linalg.norm(batch, axis=1)
    bits = (batch >= 0.0).astype(np.uint8)
    bits[norms == 0.0] = 1

    symbols, n_pad = modulate(bits, state.scheme)
    if state.kind == "rayleigh" and fresh_fading:
        h = (rng.standard_normal(n_rows) + 1j * rng.standard_normal(n_rows)) / np.sqrt(2)
    else:
        h = np.full(n_rows, state.fading, dtype=np.complex128)
    sigma = np.sqrt(state.noise_variance / 2.0)
    noise = sigma * (
        rng.standard_normal(symbols.shape) + 1j * rng.standard_normal(symbols.shape)
    )
    received = h[:, None] * symbols + noise

    if np.any(h == 0):
        raise NumericalError("fading coefficient is zero; channel is singular")
    eq = received / h[:, None]
    scheme = state.scheme
    pos_i = _slice_axis(eq.real, scheme.levels_i)
    labels = _gray(pos_i)
    if scheme.bits_q > 0:
        pos_q = _slice_axis(eq.imag, scheme.levels_q)
        labels = (labels << scheme.bits_q) | _gray(pos_q)
    out_bits = _unpack_bits(labels, scheme.bits_per_symbol)[:, :dim]

    stats = TransmissionStats(
        bits_sent=int(bits.size), bit_errors=int(np.sum(out_bits != bits))
    )
    out = dequantize_features(out_bits, 1.0) * norms[:, None]
    return (out[0] if single else out), stats


def ber_trial(
    scheme: ModulationScheme | str,
    snr_db: float,
    kind: str,
    n_bits: int,
    rng: np.random.Generator,
) -> tuple[int, int]:
    """Monte-Carlo BER measurement over a random bit stream.

    Fading is drawn i.i.d. per symbol for rayleigh (the bit stream has no
    per-sample structure here), matching the analytic_ber average.
    Returns (bits_sent, bit_errors).
    """
    if isinstance(scheme, str):
        scheme = modulation(scheme)
    if kind not in ("awgn", "rayleigh"):
        raise ConfigurationError(f"unknown channel kind {kind!r}")
    bits = rng.integers(0, 2, size=n_bits).astype(np.uint8)
    symbols, _ = modulate(bits, scheme)
    if kind == "rayleigh":
        h = (
            rng.standard_normal(symbols.shape)
            + 1j * rng.standard_normal(symbols.shape)
        ) / np.sqrt(2)
    else:
        h = np.ones(symbols.shape, dtype=np.complex128)
    nv = 10.0 ** (-snr_db / 10.0)
    sigma = np.sqrt(nv / 2.0)
    noise = sigma * (
        rng.standard_normal(symbols.shape) + 1j * rng.standard_normal(symbols.shape)
    )
    eq = (h * symbols + noise) / h
    pos_i = _slice_axis(eq.real, scheme.levels_i)
    labels = _gray(pos_i)
    if scheme.bits_q > 0:
        pos_q = _slice_axis(eq.imag, scheme.levels_q)
        labels = (labels << scheme.bits_q) | _gray(pos_q)
    out = _unpack_bits(labels, scheme.bits_per_symbol)[:n_bits]
    return n_bits, int(np.sum(out != bits))


def identity_pipeline(feature: np.ndarray) -> np.ndarray:
    """No-op split pipeline (quantization and channel disabled)."""
    return feature


def make_wireless_pipeline(
    state: ChannelState,
    rng: np.random.Generator,
    fresh_fading: bool = True,
    stats: TransmissionStats | None = None,
):
    """Split pipeline running the full hard transmission chain.

    The backward pass of the network treats it as identity (pass-through
    surrogate).  When a stats accumulator is given, bit counts of every
    call are added to it.
    """

    def pipeline(feature: np.ndarray) -> np.ndarray:
        out, tx = transmit_features(feature, state, rng, fresh_fading=fresh_fading)
        if stats is not None:
            stats.add(tx)
        return out

    return pipeline


def make_surrogate_pipeline(step: float, rng: np.random.Generator):
    """Split pipeline adding uniform quantization-surrogate noise."""

    def pipeline(feature: np.ndarray) -> np.ndarray:
        return surrogate_quantize(feature, step, rng)

    return pipeline
