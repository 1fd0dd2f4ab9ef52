"""Black-box identification via the eigensystem realization algorithm (ERA).

Pipeline: exponential-chirp excitation -> frequency-domain deconvolution of
the impulse response -> Hankel assembly -> SVD order selection (cumulative
singular-value mass) -> state-space realization.  Identification operates on
discrete-time Markov parameters; the returned model is mapped to continuous
time with a bilinear (Tustin) transform at the data sample rate.

Single-input single-output datasets only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import LtiModel
from .linalg import dft, idft, svd


class SysIdError(Exception):
    """Base class for identification failures."""


class BadSpecError(SysIdError):
    """Chirp specification violates its invariants."""


class DegenerateInputError(SysIdError):
    """Excitation spectrum is numerically zero."""


class TooShortError(SysIdError):
    """Sequence cannot fill the requested Hankel matrix."""


class RankDeficientError(SysIdError):
    """Requested realization order exceeds the numerical Hankel rank."""


@dataclass(frozen=True)
class ChirpSpec:
    """Exponential chirp: u(k) = amp * sin(2 pi f0 (r^k - 1) / ln r).

    f_start/f_end are in Hz; num_samples is the record length; the frequency
    ratio per sample is r = (f_end / f_start)^(1 / num_samples).
    """

    amplitude: float
    f_start: float
    f_end: float
    num_samples: int
    sample_rate: float

    def __post_init__(self):
        if not self.amplitude > 0:
            raise BadSpecError(f"amplitude must be > 0, got {self.amplitude}")
        if not (0 < self.f_start < self.f_end):
            raise BadSpecError(
                f"need 0 < f_start < f_end, got {self.f_start}, {self.f_end}"
            )
        if self.num_samples < 2:
            raise BadSpecError(f"need at least 2 samples, got {self.num_samples}")
        if not self.sample_rate > 0:
            raise BadSpecError(f"sample_rate must be > 0, got {self.sample_rate}")

    @property
    def freq_ratio(self):
        return (self.f_end / self.f_start) ** (1.0 / self.num_samples)


@dataclass(frozen=True)
class EraDataset:
    """Recorded excitation/response pair at a fixed sample rate."""

    u: np.ndarray
    y: np.ndarray
    sample_rate: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if u.shape != y.shape or u.ndim != 1:
            raise ValueError("u and y must be 1-D sequences of equal length")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class IdentifiedModel:
    """Realized model with order-selection and fit diagnostics."""

    model: LtiModel
    order: int
    energy_captured: float
    fit: float
    sample_rate: float
    singular_values: np.ndarray


def gen_chirp(spec: ChirpSpec):
    """Exponential chirp sequence; u(0) == 0 and the sweep spans the band."""
    k = np.arange(spec.num_samples, dtype=float)
    r = spec.freq_ratio
    f0 = spec.f_start / spec.sample_rate  # cycles per sample
    phase = 2.0 * np.pi * f0 * (r**k - 1.0) / np.log(r)
    return spec.amplitude * np.sin(phase)


def impulse_response(u, y, regularization=None):
    """Recover the impulse response by regularized spectral deconvolution.

    h = idft( Y conj(U) / (|U|^2 + lam) ).  The default lam is
    1e-10 * max|U|^2; chirp spectra are near-zero outside the sweep band, so
    raw division would blow up there.
    """
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    if u.shape != y.shape or u.ndim != 1 or u.size < 8:
        raise ValueError("u and y must be equal-length 1-D sequences (>= 8 samples)")
    U = dft(u)
    Y = dft(y)
    peak = np.max(np.abs(U))
    if peak < 1e-12:
        raise DegenerateInputError("excitation spectrum is numerically zero")
    lam = 1e-10 * peak**2 if regularization is None else float(regularization)
    H = Y * np.conj(U) / (np.abs(U) ** 2 + lam)
    h = idft(H)
    resid = np.max(np.abs(h.imag))
    if resid > 1e-6 * max(np.linalg.norm(h.real), 1e-300):
        raise DegenerateInputError(
            f"imaginary residue {resid:.3e} too large; inputs may be inconsistent"
        )
    return h.real


def build_hankel(h, size, start):
    """(size+1) x (size+1) Hankel matrix with entry (i, j) = h[start + i + j]."""
    h = np.asarray(h, dtype=float)
    if h.size < start + 2 * size + 1:
        raise TooShortError(
            f"need {start + 2 * size + 1} samples for size {size} at start {start}, "
            f"got {h.size}"
        )
    idx = np.arange(size + 1)
    return h[start + idx[:, None] + idx[None, :]]


def select_order(sigma, threshold=0.99):
    """Smallest r whose leading singular values carry `threshold` of the mass."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0:
        raise ValueError("empty singular value list")
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    total = float(np.sum(sigma))
    if total == 0.0:
        return 1
    frac = np.cumsum(sigma) / total
    return int(np.searchsorted(frac, threshold - 1e-15) + 1)


def realize(H0, H1, order, y0=0.0):
    """Rank-r realization from the Hankel pair (discrete-time model).

    With H0 = U S V.T truncated to rank r:
        A = S^{-1/2} Ur.T H1 Vr S^{-1/2},  B = first column of S^{1/2} Vr.T,
        C = first row of Ur S^{1/2},        D = y0.
    """
    H0 = np.asarray(H0, dtype=float)
    H1 = np.asarray(H1, dtype=float)
    if H0.shape != H1.shape:
        raise ValueError("H0 and H1 must have the same shape")
    res = svd(H0)
    if order < 1 or order > H0.shape[0]:
        raise ValueError(f"order {order} out of range for {H0.shape[0]}-dim Hankel")
    if res.sigma[order - 1] <= 1e-12 * res.sigma[0]:
        raise RankDeficientError(
            f"sigma[{order - 1}] = {res.sigma[order - 1]:.3e} is numerically zero"
        )
    Ur = res.U[:, :order]
    Vr = res.V[:, :order]
    s_half = np.sqrt(res.sigma[:order])
    A = (Ur.T @ H1 @ Vr) / np.outer(s_half, s_half)
    B = (s_half[:, None] * Vr.T)[:, :1]
    C = (Ur * s_half[None, :])[:1, :]
    return LtiModel(A=A, B=B, C=C, D=np.array([[float(y0)]]))


def c2d_tustin(model: LtiModel, sample_rate: float) -> LtiModel:
    """Bilinear (Tustin) discretization at the given sample rate."""
    T = 1.0 / sample_rate
    a = T / 2.0
    n = model.n
    inv = np.linalg.inv(np.eye(n) - a * model.A)
    Ad = inv @ (np.eye(n) + a * model.A)
    Bd = inv @ model.B * T
    Cd = model.C @ inv
    Dd = model.D + a * model.C @ inv @ model.B
    return LtiModel(A=Ad, B=Bd, C=Cd, D=Dd)


def d2c_tustin(model: LtiModel, sample_rate: float) -> LtiModel:
    """Inverse of :func:`c2d_tustin` (no matrix logarithm involved)."""
    T = 1.0 / sample_rate
    a = T / 2.0
    n = model.n
    Ac = (2.0 / T) * np.linalg.solve((model.A + np.eye(n)).T, (model.A - np.eye(n)).T).T
    ima = np.eye(n) - a * Ac  # inv(ima) == (Ad + I) / 2
    Bc = ima @ model.B / T
    Cc = model.C @ ima
    Dc = model.D - a * Cc @ np.linalg.solve(ima, Bc)
    return LtiModel(A=Ac, B=Bc, C=Cc, D=Dc)


def simulate_discrete(model: LtiModel, u):
    """Response of a discrete-time quadruple from rest."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if u.shape[0] != model.m:
        u = u.reshape(model.m, -1)
    nsteps = u.shape[1]
    x = np.zeros(model.n)
    y = np.zeros((model.q, nsteps))
    for k in range(nsteps):
        y[:, k] = model.C @ x + model.D @ u[:, k]
        x = model.A @ x + model.B @ u[:, k]
    return y.squeeze(0) if model.q == 1 else y


def validate_model(model: LtiModel, dataset: EraDataset, discrete=False):
    """Normalized fit = 1 - |y_sim - y| / |y - mean(y)|, clipped to [0, 1]."""
    dmodel = model if discrete else c2d_tustin(model, dataset.sample_rate)
    y_sim = simulate_discrete(dmodel, dataset.u)
    denom = np.linalg.norm(dataset.y - np.mean(dataset.y))
    if denom == 0.0:
        return 1.0 if np.allclose(y_sim, dataset.y) else 0.0
    fit = 1.0 - np.linalg.norm(y_sim - dataset.y) / denom
    return float(np.clip(fit, 0.0, 1.0))


def identify(
    dataset: EraDataset,
    threshold=0.99,
    hankel_size=None,
    regularization=None,
    order=None,
) -> IdentifiedModel:
    """Full ERA pipeline from an excitation/response record.

    Returns a continuous-time model (Tustin map at the dataset sample rate)
    together with the selected order, captured singular-value mass, and the
    normalized output fit.
    """
    h = impulse_response(dataset.u, dataset.y, regularization)
    if hankel_size is None:
        hankel_size = min(100, (h.size - 3) // 2)
    H0 = build_hankel(h, hankel_size, 1)
    H1 = build_hankel(h, hankel_size, 2)
    sigma = svd(H0).sigma
    r = int(order) if order is not None else select_order(sigma, threshold)
    discrete = realize(H0, H1, r, y0=h[0])
    energy = float(np.sum(sigma[:r]) / np.sum(sigma))
    model = d2c_tustin(discrete, dataset.sample_rate)
    fit = validate_model(model, dataset)
    return IdentifiedModel(
        model=model,
        order=r,
        energy_captured=energy,
        fit=fit,
        sample_rate=dataset.sample_rate,
        singular_values=sigma,
    )
