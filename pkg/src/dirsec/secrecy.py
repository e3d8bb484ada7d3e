"""Cascaded-channel secrecy problem: effective channels, objective, gradients.

The objective minimized by the optimizer is

    f = sum_k [ logdet(P_e,k) - logdet(P_b,k) ],      (natural log)

with P_r,k = I + (P/sigma_r^2) H_r,k W_k W_k^H H_r,k^H for receivers
r in {bob, eve} and normalized precoder blocks W_k.  Minimizing f
maximizes the (unclipped) secrecy sum rate; reporting in bits with the
per-subcarrier positive-part clip lives in :func:`secrecy_rates`.

All channel matrices are stored receiver-rows x transmitter-columns.
Gradients follow the conjugate Wirtinger convention with the factor 2,
so the finite-difference reconstruction d/dRe + i d/dIm reproduces the
returned arrays entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .manifold import DimensionMismatchError, IteratePoint, TangentVector

CHANNEL_FAMILIES = ("g_a_i1", "g_a_i2", "g_i1_b", "g_i1_e",
                    "g_i2_b", "g_i2_e", "g_i1_i2")


@dataclass(frozen=True)
class SystemConfig:
    """Scalar system parameters; powers in absolute watts."""

    m_tx: int
    n_bob: int
    n_eve: int
    n_streams: int
    n_sub: int
    n_irs1: int
    n_irs2: int
    power_watts: float
    noise_bob_watts: float
    noise_eve_watts: float

    def __post_init__(self):
        for name in ("m_tx", "n_bob", "n_eve", "n_streams", "n_sub",
                     "n_irs1", "n_irs2"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_streams > min(self.m_tx, self.n_bob):
            raise ValueError("n_streams must not exceed min(m_tx, n_bob)")
        for name in ("power_watts", "noise_bob_watts", "noise_eve_watts"):
            if not float(getattr(self, name)) > 0.0:
                raise ValueError(f"{name} must be positive")

    @property
    def snr_bob(self) -> float:
        return self.power_watts / self.noise_bob_watts

    @property
    def snr_eve(self) -> float:
        return self.power_watts / self.noise_eve_watts


@dataclass(frozen=True)
class ChannelSet:
    """The seven per-subcarrier channel families.

    Arrays have shape (K, rows, cols), receiver-rows convention:

    ==========  ================  =================
    family      shape             link
    ==========  ================  =================
    g_a_i1      (K, N_i1, M)      Alice -> IRS 1
    g_a_i2      (K, N_i2, M)      Alice -> IRS 2
    g_i1_b      (K, N_b, N_i1)    IRS 1 -> Bob
    g_i1_e      (K, N_e, N_i1)    IRS 1 -> Eve
    g_i2_b      (K, N_b, N_i2)    IRS 2 -> Bob
    g_i2_e      (K, N_e, N_i2)    IRS 2 -> Eve
    g_i1_i2     (K, N_i2, N_i1)   IRS 1 -> IRS 2
    ==========  ================  =================

    Instances are frozen and their arrays are marked read-only, so a set
    can be shared across concurrent solves.
    """

    g_a_i1: np.ndarray
    g_a_i2: np.ndarray
    g_i1_b: np.ndarray
    g_i1_e: np.ndarray
    g_i2_b: np.ndarray
    g_i2_e: np.ndarray
    g_i1_i2: np.ndarray

    def __post_init__(self):
        for name in CHANNEL_FAMILIES:
            arr = np.array(getattr(self, name), dtype=complex)  # own copy
            if arr.ndim != 3:
                raise DimensionMismatchError(
                    f"{name} must be (K, rows, cols), got {arr.shape}")
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite entries")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        k, n_i1, m = self.g_a_i1.shape
        n_i2 = self.g_a_i2.shape[1]
        n_b = self.g_i1_b.shape[1]
        n_e = self.g_i1_e.shape[1]
        expected = {
            "g_a_i2": (k, n_i2, m),
            "g_i1_b": (k, n_b, n_i1),
            "g_i1_e": (k, n_e, n_i1),
            "g_i2_b": (k, n_b, n_i2),
            "g_i2_e": (k, n_e, n_i2),
            "g_i1_i2": (k, n_i2, n_i1),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionMismatchError(
                    f"{name} has shape {getattr(self, name).shape}, "
                    f"expected {shape}")

    @property
    def n_sub(self) -> int:
        return self.g_a_i1.shape[0]

    @property
    def dims(self) -> dict:
        """Dimension summary {m_tx, n_bob, n_eve, n_irs1, n_irs2, n_sub}."""
        return {
            "m_tx": self.g_a_i1.shape[2],
            "n_bob": self.g_i1_b.shape[1],
            "n_eve": self.g_i1_e.shape[1],
            "n_irs1": self.g_a_i1.shape[1],
            "n_irs2": self.g_a_i2.shape[1],
            "n_sub": self.n_sub,
        }

    def replace(self, **families) -> "ChannelSet":
        updated = {name: families.get(name, getattr(self, name))
                   for name in CHANNEL_FAMILIES}
        return ChannelSet(**updated)


@dataclass(frozen=True)
class GradientWorkspace:
    """Intermediate matrices of one gradient evaluation, exposed for tests.

    p_b/p_e are the regularized Gram matrices (Hermitian positive
    definite by construction), q_b/q_e the scaled solves against them,
    m_i1/m_i2 the precoder-weighted adjoints of the Alice-to-IRS links.
    """

    p_b: np.ndarray   # (K, N_b, N_b)
    p_e: np.ndarray   # (K, N_e, N_e)
    q_b: np.ndarray   # (K, N_b, M)
    q_e: np.ndarray   # (K, N_e, M)
    m_i1: np.ndarray  # (K, M, N_i1)
    m_i2: np.ndarray  # (K, M, N_i2)


def _hconj(a: np.ndarray) -> np.ndarray:
    return a.conj().transpose(0, 2, 1)


def _effective_parts(ch: ChannelSet, phi1: np.ndarray, phi2: np.ndarray):
    """Batched effective channels plus the reusable intermediates.

    Returns (h_b, h_e, t_b, t_e, b2s, e2s) where t_b/t_e are the total
    IRS1->receiver channels including the cascade through IRS 2, and
    b2s/e2s are the phase-scaled IRS2->receiver links.
    """
    phi1 = np.asarray(phi1, dtype=complex)
    phi2 = np.asarray(phi2, dtype=complex)
    if phi1.shape != (ch.g_a_i1.shape[1],) or phi2.shape != (ch.g_a_i2.shape[1],):
        raise DimensionMismatchError("phase vector length mismatch")
    b2s = ch.g_i2_b * phi2[None, None, :]
    e2s = ch.g_i2_e * phi2[None, None, :]
    t_b = ch.g_i1_b + b2s @ ch.g_i1_i2
    t_e = ch.g_i1_e + e2s @ ch.g_i1_i2
    h_b = (t_b * phi1[None, None, :]) @ ch.g_a_i1 + b2s @ ch.g_a_i2
    h_e = (t_e * phi1[None, None, :]) @ ch.g_a_i1 + e2s @ ch.g_a_i2
    return h_b, h_e, t_b, t_e, b2s, e2s


def effective_channels_all(ch: ChannelSet, phi1, phi2):
    """(H_b, H_e) for every subcarrier, shapes (K, N_b, M) and (K, N_e, M)."""
    h_b, h_e, *_ = _effective_parts(ch, phi1, phi2)
    return h_b, h_e


def effective_channels(ch: ChannelSet, phi1, phi2, k: int):
    """(H_b, H_e) for subcarrier ``k``: direct paths via each IRS plus the
    double-reflection cascade Alice -> IRS1 -> IRS2 -> receiver."""
    if not 0 <= k < ch.n_sub:
        raise IndexError(f"subcarrier index {k} out of range [0, {ch.n_sub})")
    h_b, h_e = effective_channels_all(ch, phi1, phi2)
    return h_b[k], h_e[k]


def _gram_logdet(h: np.ndarray, w: np.ndarray, snr: float):
    """P = I + snr*(HW)(HW)^H batched; returns (P, chol(P), per-k logdet)."""
    hw = h @ w
    n_rx = h.shape[1]
    p = np.eye(n_rx)[None, :, :] + snr * (hw @ _hconj(hw))
    p = 0.5 * (p + _hconj(p))  # kill rounding skew before factorization
    chol = np.linalg.cholesky(p)
    diag = np.real(np.diagonal(chol, axis1=1, axis2=2))
    return p, chol, 2.0 * np.sum(np.log(diag), axis=1)


def _chol_solve(chol: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    y = np.linalg.solve(chol, rhs)
    return np.linalg.solve(_hconj(chol), y)


def objective(ch: ChannelSet, pt: IteratePoint, cfg: SystemConfig) -> float:
    """sum_k [logdet P_e,k - logdet P_b,k], natural log.

    Equals -ln(2) times the secrecy sum rate in bits while every
    per-subcarrier secrecy term is positive.  Accepts off-manifold
    points: the Gram matrices stay positive definite for any W.
    """
    h_b, h_e = effective_channels_all(ch, pt.phi1, pt.phi2)
    *_, ld_b = _gram_logdet(h_b, pt.w_blocks, cfg.snr_bob)
    *_, ld_e = _gram_logdet(h_e, pt.w_blocks, cfg.snr_eve)
    return float(np.sum(ld_e - ld_b))


def euclidean_gradient(ch: ChannelSet, pt: IteratePoint,
                       cfg: SystemConfig) -> tuple[TangentVector, GradientWorkspace]:
    """Conjugate Wirtinger gradient of :func:`objective` w.r.t. (W, phi1, phi2).

    Returned as a raw (ambient, unprojected) TangentVector-shaped triple:

    * per-block W gradient  2 (H_e^H Q_e - H_b^H Q_b) W_k,
    * phi1 gradient summed over k of diag((T_e^H Q_e - T_b^H Q_b) M_i1)
      where the totals T absorb the cascade correction through IRS 2,
    * phi2 gradient summed over k of diag((G_i2e^H Q_e - G_i2b^H Q_b)
      (M_i2 + M_i1 diag(phi1)^H G_i1i2^H)).
    """
    w = pt.w_blocks
    if w.shape[0] != ch.n_sub or w.shape[1] != ch.g_a_i1.shape[2]:
        raise DimensionMismatchError(
            f"precoder blocks {w.shape} do not match channel dims {ch.dims}")
    h_b, h_e, t_b, t_e, _, _ = _effective_parts(ch, pt.phi1, pt.phi2)

    p_b, chol_b, _ = _gram_logdet(h_b, w, cfg.snr_bob)
    p_e, chol_e, _ = _gram_logdet(h_e, w, cfg.snr_eve)
    q_b = cfg.snr_bob * _chol_solve(chol_b, h_b)
    q_e = cfg.snr_eve * _chol_solve(chol_e, h_e)

    diff_mm = _hconj(h_e) @ q_e - _hconj(h_b) @ q_b
    xi = 2.0 * (diff_mm @ w)

    m_i1 = w @ _hconj(ch.g_a_i1 @ w)
    m_i2 = w @ _hconj(ch.g_a_i2 @ w)

    x1 = _hconj(t_e) @ q_e - _hconj(t_b) @ q_b
    g_phi1 = 2.0 * np.einsum("knm,kmn->n", x1, m_i1)

    x2 = _hconj(ch.g_i2_e) @ q_e - _hconj(ch.g_i2_b) @ q_b
    m2_tot = m_i2 + (m_i1 * pt.phi1.conj()[None, None, :]) @ _hconj(ch.g_i1_i2)
    g_phi2 = 2.0 * np.einsum("knm,kmn->n", x2, m2_tot)

    grad = TangentVector(xi, g_phi1, g_phi2)
    ws = GradientWorkspace(p_b=p_b, p_e=p_e, q_b=q_b, q_e=q_e,
                           m_i1=m_i1, m_i2=m_i2)
    return grad, ws


def secrecy_rates(ch: ChannelSet, w_physical, phi1, phi2,
                  cfg: SystemConfig) -> tuple[list, float]:
    """Per-subcarrier clipped secrecy rates in bits/s/Hz and their sum.

    ``w_physical`` are the de-normalized precoders sqrt(P)*W_k carrying
    the actual transmit power, so the Gram scaling is 1/noise only.
    """
    w = np.asarray(w_physical, dtype=complex)
    if w.ndim != 3:
        w = np.stack([np.asarray(b, dtype=complex) for b in w_physical])
    h_b, h_e = effective_channels_all(ch, phi1, phi2)
    *_, ld_b = _gram_logdet(h_b, w, 1.0 / cfg.noise_bob_watts)
    *_, ld_e = _gram_logdet(h_e, w, 1.0 / cfg.noise_eve_watts)
    per_k = np.maximum(0.0, (ld_b - ld_e) / np.log(2.0))
    return per_k.tolist(), float(np.sum(per_k))
