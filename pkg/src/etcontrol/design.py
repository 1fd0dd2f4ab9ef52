"""Controller/observer gain design and event-trigger matrices.

Given a plant (A, B, C, D) and designer weights, computes the LQR gain
K = R^{-1} B.T P, the Luenberger gain L = S C.T V^{-1} from the dual Riccati
equation, the augmented closed-loop matrix, its Lyapunov certificate, and the
event matrix used by the trigger quadratic form.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .linalg import NotStabilizableError, solve_care, solve_lyapunov, sqrtm_psd

RANK_TOL = 1e-9


class NotObservableError(linalg.NumericsError):
    """(A, C) fails the observability rank test."""


def _mat(M, name):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


@dataclass(frozen=True)
class LtiModel:
    """State-space quadruple dx/dt = A x + B u, y = C x + D u."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = _mat(self.A, "A")
        B = _mat(self.B, "B")
        C = _mat(self.C, "C")
        D = _mat(self.D, "D")
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise ValueError(f"B must have {n} rows, got {B.shape}")
        if C.shape[1] != n:
            raise ValueError(f"C must have {n} columns, got {C.shape}")
        if D.shape != (C.shape[0], B.shape[1]):
            raise ValueError(f"D must be {C.shape[0]}x{B.shape[1]}, got {D.shape}")
        for name, M in (("A", A), ("B", B), ("C", C), ("D", D)):
            object.__setattr__(self, name, M)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def q(self):
        return self.C.shape[0]


@dataclass(frozen=True)
class DesignWeights:
    """LQR weights (Q, R) and observer weights (W, V)."""

    Q: np.ndarray
    R: np.ndarray
    W: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        for name in ("Q", "R", "W", "V"):
            M = _mat(getattr(self, name), name)
            M = linalg.symmetrize(M)
            object.__setattr__(self, name, M)
        for name, strict in (("Q", False), ("R", True), ("W", False), ("V", True)):
            w = np.linalg.eigvalsh(getattr(self, name))
            if strict and np.min(w) <= 0:
                raise ValueError(f"{name} must be positive-definite")
            if not strict and np.min(w) < -1e-10 * max(1.0, np.max(np.abs(w))):
                raise ValueError(f"{name} must be positive-semidefinite")


@dataclass(frozen=True)
class GainSet:
    """Controller gain K, observer gain L, and their Riccati solutions."""

    K: np.ndarray
    L: np.ndarray
    P_ctrl: np.ndarray
    S_obs: np.ndarray


@dataclass(frozen=True)
class TriggerDesign:
    """Augmented closed loop, Lyapunov pair, and event quadratic matrix."""

    A_tilde: np.ndarray
    P_tilde: np.ndarray
    Q_tilde: np.ndarray
    Phi: np.ndarray
    sigma: float
    epsilon: float


def controllability_matrix(A, B):
    A = _mat(A, "A")
    B = _mat(B, "B")
    blocks = [B]
    for _ in range(A.shape[0] - 1):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks)


def check_controllability(A, B):
    """True iff rank [B, AB, ..., A^{n-1}B] == n (SVD rank, 1e-9 tolerance).

    Each power block is normalized before the rank test; otherwise the
    geometric growth of |A^k B| masks genuinely independent directions in
    stiff systems (|A| ~ 100 already loses ten digits across six powers).
    """
    A = _mat(A, "A")
    B = _mat(B, "B")
    blocks = [B]
    for _ in range(A.shape[0] - 1):
        blocks.append(A @ blocks[-1])
    scaled = []
    for blk in blocks:
        norm = np.linalg.norm(blk)
        if norm > 0.0:
            scaled.append(blk / norm)
    if not scaled:
        return False
    s = np.linalg.svd(np.hstack(scaled), compute_uv=False)
    return int(np.sum(s > RANK_TOL * s[0])) == A.shape[0]


def check_observability(A, C):
    """Dual of controllability via (A.T, C.T)."""
    return check_controllability(_mat(A, "A").T, _mat(C, "C").T)


def lqr_gain(model: LtiModel, weights: DesignWeights):
    """LQR gain: K = R^{-1} B.T P with P the stabilizing CARE solution."""
    A, B = model.A, model.B
    # Detectability of (A, Q^{1/2}) is Lemma-1's hypothesis.  A failure is
    # harmless when A is already Hurwitz, fatal otherwise.
    if not check_observability(A, sqrtm_psd(weights.Q)):
        if linalg.is_hurwitz(A):
            warnings.warn(
                "(A, Q^{1/2}) is not detectable; proceeding because A is Hurwitz",
                stacklevel=2,
            )
        else:
            raise NotStabilizableError(
                "(A, Q^{1/2}) is not detectable and A is not Hurwitz"
            )
    P = solve_care(A, B, weights.Q, weights.R)
    K = np.linalg.solve(weights.R, B.T @ P)
    return K, P


def observer_gain(model: LtiModel, weights: DesignWeights):
    """Luenberger gain: L = S C.T V^{-1}, S from the dual Riccati equation."""
    A, C = model.A, model.C
    if not check_observability(A, C):
        raise NotObservableError("(A, C) is not observable")
    S = solve_care(A.T, C.T, weights.W, weights.V)
    L = np.linalg.solve(weights.V, C @ S).T
    return L, S


def design_gains(model: LtiModel, weights: DesignWeights) -> GainSet:
    K, P = lqr_gain(model, weights)
    L, S = observer_gain(model, weights)
    return GainSet(K=K, L=L, P_ctrl=P, S_obs=S)


def build_trigger_design(
    model: LtiModel,
    gains: GainSet,
    sigma: float,
    epsilon: float,
    Q_tilde=None,
) -> TriggerDesign:
    """Assemble the augmented matrix, its Lyapunov pair, and the event matrix.

    The augmented matrix stacks the control and estimation loops,

        [[A - B K,  B K    ],
         [0,        A - L C]],

    its Lyapunov certificate P solves A~.T P + P A~ + Q~ = 0, and the event
    matrix is  [[(sigma - 1) Q~, P], [P, 0]].
    """
    if not (0.0 < sigma <= 1.0):
        raise ValueError(f"sigma must be in (0, 1], got {sigma}")
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    n = model.n
    A, B, C = model.A, model.B, model.C
    BK = B @ gains.K
    A_tilde = np.block(
        [[A - BK, BK], [np.zeros((n, n)), A - gains.L @ C]]
    )
    if Q_tilde is None:
        Q_tilde = np.eye(2 * n)
    Q_tilde = linalg.symmetrize(_mat(Q_tilde, "Q_tilde"))
    if Q_tilde.shape != (2 * n, 2 * n):
        raise ValueError(f"Q_tilde must be {2 * n}x{2 * n}, got {Q_tilde.shape}")
    if np.min(np.linalg.eigvalsh(Q_tilde)) <= 0:
        raise ValueError("Q_tilde must be positive-definite")
    P_tilde = solve_lyapunov(A_tilde, Q_tilde)
    zero = np.zeros((2 * n, 2 * n))
    Phi = np.block([[(sigma - 1.0) * Q_tilde, P_tilde], [P_tilde, zero]])
    return TriggerDesign(
        A_tilde=A_tilde,
        P_tilde=P_tilde,
        Q_tilde=Q_tilde,
        Phi=Phi,
        sigma=float(sigma),
        epsilon=float(epsilon),
    )
