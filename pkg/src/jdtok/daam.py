"""Density-adaptive attention gating over temporal statistics.

The gate scores every timestep of a 1-channel signal by the density of a
K-component Gaussian mixture evaluated on the signal's own standardized
deviations.  Timesteps near the bulk of the signal's distribution get gate
values near the mixture's peak density; statistical outliers get small ones.
The gate then modulates a full feature tensor multiplicatively, either as a
pure product or as the residual form ``y = x * (1 + alpha * gate)``.

Pipeline per signal x of length T:

  1. mean/variance over time (population normalization, variance floored)
  2. positive per-component scales  s_k = softplus(nu_k) + eps
  3. standardized deviations        z_kt = (x_t - (mu + delta_k)) / (sigma * s_k + eps)
  4. per-component log-density      log p_k = -z^2/2 - log s_k - log(2*pi)/2
  5. mixture via logsumexp          log G_t = logsumexp_k(log p_k) - log K
  6. gate                           G_t = exp(log G_t)

The reference path runs in float64; pass ``dtype=np.float32`` for the
production-precision path.  ``daam_gate_grad`` returns exact analytic
derivatives of the gate with respect to the mean offsets, the log-scales,
and the input (chain rule through the temporal statistics), so the gate can
be trained or verified without an autodiff framework.

Statistics are computed per signal: batched callers should invoke these
functions once per row, never pooling moments across rows.  Multi-channel
gating is out of scope; the gate consumes the caller's 1-channel projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DaamParams",
    "temporal_stats",
    "daam_gate",
    "daam_gate_grad",
    "apply_gate",
    "gattn_modulate",
]

_LOG_2PI = float(np.log(2.0 * np.pi))


def _softplus(v: np.ndarray) -> np.ndarray:
    # log(1 + e^v) without overflow for large |v|
    return np.logaddexp(np.zeros_like(v), v)


def _sigmoid(v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)
    return out


@dataclass(frozen=True)
class DaamParams:
    """Learnable state of one gate: K mean offsets, K log-scales, strength.

    ``init()`` gives the standard initialization: offsets at zero and
    log-scales at log(0.5), so every component starts as the same moderately
    narrow Gaussian; ``gate_strength`` (alpha) defaults to 0.05 so the
    residual modulation starts close to identity.
    """

    mean_offsets: np.ndarray
    log_scales: np.ndarray
    gate_strength: float = 0.05
    eps: float = 1e-3
    var_floor: float = 1e-6

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "mean_offsets", np.atleast_1d(np.asarray(self.mean_offsets, dtype=np.float64))
        )
        object.__setattr__(
            self, "log_scales", np.atleast_1d(np.asarray(self.log_scales, dtype=np.float64))
        )
        if self.mean_offsets.ndim != 1 or self.log_scales.ndim != 1:
            raise ValueError("mean_offsets and log_scales must be 1-D")
        if self.mean_offsets.size != self.log_scales.size:
            raise ValueError(
                f"component count mismatch: {self.mean_offsets.size} offsets vs "
                f"{self.log_scales.size} log-scales"
            )
        if self.mean_offsets.size < 1:
            raise ValueError("need at least one mixture component")
        if not (np.all(np.isfinite(self.mean_offsets)) and np.all(np.isfinite(self.log_scales))):
            raise ValueError("parameters must be finite")
        if self.eps <= 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.var_floor <= 0:
            raise ValueError(f"var_floor must be > 0, got {self.var_floor}")

    @property
    def num_components(self) -> int:
        return self.mean_offsets.size

    def scales(self) -> np.ndarray:
        """Positive per-component scales softplus(log_scales) + eps."""
        return _softplus(self.log_scales) + self.eps

    @classmethod
    def init(cls, k: int = 4, gate_strength: float = 0.05) -> "DaamParams":
        """Default initialization with ``k`` components."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        return cls(
            mean_offsets=np.zeros(k),
            log_scales=np.full(k, np.log(0.5)),
            gate_strength=gate_strength,
        )


def _check_signal(x: np.ndarray) -> None:
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D temporal signal, got shape {x.shape}")
    if x.size == 0:
        raise ValueError("empty input")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite values")


def temporal_stats(x: np.ndarray, var_floor: float = 1e-6) -> tuple[float, float]:
    """Mean and floored population variance of a 1-D signal.

    Variance uses 1/T normalization (not 1/(T-1)) and is clamped from below
    by ``var_floor`` so constant signals still standardize.
    """
    x = np.asarray(x, dtype=np.float64)
    _check_signal(x)
    mean = float(x.mean())
    var = float(np.mean((x - mean) ** 2))
    return mean, max(var, var_floor)


def daam_gate(x: np.ndarray, params: DaamParams, dtype=np.float64) -> np.ndarray:
    """Evaluate the mixture-density gate on a 1-D signal.

    Returns an array of length T with the gate value at each timestep.  All
    intermediates are computed in ``dtype`` (float64 reference path by
    default; float32 is the production floor).  The logsumexp runs with max
    subtraction and folds the 1/K mixture weight inside the log, so a mixture
    of K identical components reproduces the K=1 gate bit-for-bit.
    """
    x = np.asarray(x, dtype=dtype)
    _check_signal(x)
    delta = params.mean_offsets.astype(dtype)
    st = (_softplus(params.log_scales) + params.eps).astype(dtype)
    k = params.num_components

    mu = x.mean(dtype=dtype)
    var = np.maximum(np.mean((x - mu) ** 2, dtype=dtype), dtype(params.var_floor))
    sigma = np.sqrt(var)

    denom = sigma * st + dtype(params.eps)
    z = (x[None, :] - (mu + delta)[:, None]) / denom[:, None]
    log_p = -dtype(0.5) * z * z - np.log(st)[:, None] - dtype(0.5 * _LOG_2PI)
    m = log_p.max(axis=0)
    log_gate = m + np.log(np.exp(log_p - m[None, :]).sum(axis=0) / k)
    return np.exp(log_gate)


def daam_gate_grad(
    x: np.ndarray, params: DaamParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic derivatives of the gate, in float64.

    Returns:
        ``(d_offsets, d_log_scales, d_input)`` where
        ``d_offsets[k, t] = dG_t / d delta_k``,
        ``d_log_scales[k, t] = dG_t / d nu_k`` and
        ``d_input[t, s] = dG_t / d x_s``.

    The input derivative chains through the temporal mean and standard
    deviation; when the variance floor is engaged the sigma path contributes
    zero (the clamp is flat there).
    """
    x = np.asarray(x, dtype=np.float64)
    _check_signal(x)
    delta = params.mean_offsets
    nu = params.log_scales
    t = x.size

    mu = x.mean()
    var_raw = float(np.mean((x - mu) ** 2))
    var = max(var_raw, params.var_floor)
    sigma = np.sqrt(var)
    st = _softplus(nu) + params.eps
    denom = sigma * st + params.eps

    z = (x[None, :] - (mu + delta)[:, None]) / denom[:, None]
    log_p = -0.5 * z * z - np.log(st)[:, None] - 0.5 * _LOG_2PI
    m = log_p.max(axis=0)
    sum_exp = np.exp(log_p - m[None, :]).sum(axis=0)
    gate = np.exp(m + np.log(sum_exp / params.num_components))
    # responsibilities: softmax over components at each timestep
    w = np.exp(log_p - (m + np.log(sum_exp))[None, :])

    d_offsets = gate[None, :] * w * z / denom[:, None]

    sig_nu = _sigmoid(nu)
    d_log_scales = (
        gate[None, :]
        * w
        * (z * z * sigma / denom[:, None] - 1.0 / st[:, None])
        * sig_nu[:, None]
    )

    # d sigma / d x_s is zero while the variance clamp is active
    if var_raw > params.var_floor:
        d_sigma = (x - mu) / (t * sigma)
    else:
        d_sigma = np.zeros(t)
    eye = np.eye(t)
    dz = (eye[None, :, :] - 1.0 / t) / denom[:, None, None] - z[:, :, None] * (
        st / denom
    )[:, None, None] * d_sigma[None, None, :]
    d_log_p = -z[:, :, None] * dz
    d_input = gate[:, None] * np.einsum("kt,kts->ts", w, d_log_p)
    return d_offsets, d_log_scales, d_input


def apply_gate(
    features: np.ndarray,
    gate: np.ndarray,
    gate_strength: float = 0.05,
    *,
    residual: bool = True,
) -> np.ndarray:
    """Modulate a feature tensor by a per-timestep gate.

    ``residual=True`` applies ``y = x * (1 + alpha * gate)``; ``residual=False``
    applies the pure product ``y = x * gate``.  The gate broadcasts over all
    leading (channel) axes; the trailing axis of ``features`` is time.
    """
    features = np.asarray(features)
    gate = np.asarray(gate)
    if gate.ndim != 1:
        raise ValueError(f"gate must be 1-D, got shape {gate.shape}")
    if features.shape[-1] != gate.shape[0]:
        raise ValueError(
            f"time axis mismatch: features have {features.shape[-1]} frames, "
            f"gate has {gate.shape[0]}"
        )
    if residual:
        return features * (1.0 + gate_strength * gate)
    return features * gate


def gattn_modulate(
    features: np.ndarray,
    attn_proj: np.ndarray,
    params: DaamParams,
    *,
    residual: bool = True,
    dtype=np.float64,
) -> np.ndarray:
    """Gate a [C, T] feature tensor from its 1-channel temporal projection.

    ``attn_proj`` is the caller's single-channel projection of ``features``
    over time (the projection weights live with the caller's network, not
    here).  Computes the gate on the projection and applies it with
    ``apply_gate``.
    """
    gate = daam_gate(attn_proj, params, dtype=dtype)
    return apply_gate(features, gate, params.gate_strength, residual=residual)
