"""Dense linear-algebra kernel for small state-space problems (n <= ~16).

Lyapunov equations are solved by Kronecker vectorization with a dense LU,
and the continuous algebraic Riccati equation (CARE) by Kleinman-Newton
iteration on top of the Lyapunov solver.  Eigenvalues, SVD, and Fourier
transforms are thin wrappers over numpy with explicit residual contracts.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LYAP_RESIDUAL_TOL = 1e-8
CARE_RESIDUAL_TOL = 1e-8
CARE_STEP_TOL = 1e-12
CARE_MAX_ITER = 100


class NumericsError(Exception):
    """Base class for numeric-kernel failures."""


class NotHurwitzError(NumericsError):
    """A matrix required to be Hurwitz has an eigenvalue with Re >= 0."""


class SingularError(NumericsError):
    """A linear system is numerically rank-deficient."""


class NotStabilizableError(NumericsError):
    """No stabilizing Riccati solution could be found."""


class NoConvergenceError(NumericsError):
    """An iterative method exhausted its iteration cap."""


@dataclass(frozen=True)
class SvdResult:
    """Singular value decomposition M = U @ diag(sigma) @ V.T."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray


def _as_square(M, name="M"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def symmetrize(M):
    """(M + M.T) / 2 -- removes asymmetric round-off drift."""
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def eigenvalues(M):
    """Eigenvalues of a square real matrix."""
    M = _as_square(M)
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"eigenvalue iteration failed: {exc}") from exc


def is_hurwitz(M, margin=0.0):
    """True iff every eigenvalue of M has real part < -margin."""
    return bool(np.max(eigenvalues(M).real) < -margin)


def svd(M):
    """Full SVD with sigma sorted descending and orthonormal U, V columns."""
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("svd input contains non-finite entries")
    try:
        U, s, Vh = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"SVD failed to converge: {exc}") from exc
    return SvdResult(U=U, sigma=s, V=Vh.T)


def spectral_norm(M):
    """Largest singular value of M."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def dft(x):
    """Discrete Fourier transform of a nonempty sequence."""
    x = np.asarray(x)
    if x.size == 0:
        raise ValueError("dft of empty sequence")
    return np.fft.fft(x)


def idft(X):
    """Inverse discrete Fourier transform; idft(dft(x)) == x to 1e-10."""
    X = np.asarray(X)
    if X.size == 0:
        raise ValueError("idft of empty sequence")
    return np.fft.ifft(X)


def sqrtm_psd(Q, tol=1e-10):
    """Symmetric square root of a PSD matrix via eigendecomposition."""
    Q = symmetrize(_as_square(Q, "Q"))
    w, E = np.linalg.eigh(Q)
    if np.min(w) < -tol * max(1.0, np.max(np.abs(w))):
        raise ValueError(f"matrix is not PSD (min eigenvalue {np.min(w):.3e})")
    w = np.clip(w, 0.0, None)
    return symmetrize(E @ np.diag(np.sqrt(w)) @ E.T)


def solve_lyapunov(A, Q):
    """Solve A.T @ P + P @ A + Q = 0 for P; A must be Hurwitz, Q symmetric.

    Kronecker vectorization: (I (x) A.T + A.T (x) I) vec(P) = -vec(Q).
    The returned P is exactly symmetric and, for Q > 0, positive-definite.
    """
    A = _as_square(A, "A")
    Q = symmetrize(_as_square(Q, "Q"))
    if A.shape != Q.shape:
        raise ValueError("A and Q must have the same shape")
    if not is_hurwitz(A):
        raise NotHurwitzError("A has an eigenvalue with nonnegative real part")
    n = A.shape[0]
    I = np.eye(n)
    M = np.kron(I, A.T) + np.kron(A.T, I)
    try:
        vec_p = np.linalg.solve(M, -Q.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise SingularError(f"Lyapunov system is singular: {exc}") from exc
    P = symmetrize(vec_p.reshape(n, n))
    resid = np.linalg.norm(A.T @ P + P @ A + Q, "fro")
    if resid > LYAP_RESIDUAL_TOL * max(1.0, np.linalg.norm(Q, "fro")):
        raise SingularError(f"Lyapunov residual too large: {resid:.3e}")
    return P


def _initial_stabilizing_gain(A, B, R):
    """Stabilizing gain K0 via eigenvalue-shift (Bass) stabilization.

    Solves (A + beta*I) Z + Z (A + beta*I).T = 2 B B.T with beta above the
    spectral abscissa; then K0 = R^{-1} B.T Z^{-1} renders A - B K0 Hurwitz.
    """
    n, m = B.shape
    if is_hurwitz(A):
        return np.zeros((m, n))
    beta = spectral_norm(A) + 0.5
    # solve_lyapunov with M = -(A + beta I).T yields (A+bI) Z + Z (A+bI).T = Qc
    M = -(A + beta * np.eye(n)).T
    Qc = 2.0 * B @ B.T
    ridge = 0.0
    for _ in range(3):
        try:
            Z = solve_lyapunov(M, Qc + ridge * np.eye(n))
            # Z is symmetric, so B.T @ inv(Z) == solve(Z, B).T
            K0 = np.linalg.solve(R, np.linalg.solve(Z, B).T)
            if is_hurwitz(A - B @ K0):
                return K0
        except (SingularError, np.linalg.LinAlgError):
            pass
        ridge = max(ridge * 100.0, 1e-12 * max(1.0, spectral_norm(Qc)))
    raise NotStabilizableError("could not construct an initial stabilizing gain")


def solve_care(A, B, Q, R):
    """Stabilizing solution of A.T P + P A - P B R^{-1} B.T P + Q = 0.

    Kleinman-Newton iteration: each step solves one Lyapunov equation for the
    current closed loop.  Converges quadratically from a stabilizing start.
    """
    A = _as_square(A, "A")
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape[0] != A.shape[0]:
        raise ValueError("B row count must match A")
    Q = symmetrize(_as_square(Q, "Q"))
    R = symmetrize(_as_square(R, "R"))
    if np.min(np.linalg.eigvalsh(R)) <= 0:
        raise ValueError("R must be positive-definite")

    K = _initial_stabilizing_gain(A, B, R)
    P_prev = None
    for _ in range(CARE_MAX_ITER):
        Acl = A - B @ K
        if not is_hurwitz(Acl):
            raise NotStabilizableError("iterate lost the stabilizing property")
        P = solve_lyapunov(Acl, Q + K.T @ R @ K)
        K = np.linalg.solve(R, B.T @ P)
        if P_prev is not None:
            step = np.linalg.norm(P - P_prev, "fro")
            if step <= CARE_STEP_TOL * max(1.0, np.linalg.norm(P, "fro")):
                P = symmetrize(P)
                resid = np.linalg.norm(
                    A.T @ P + P @ A - P @ B @ np.linalg.solve(R, B.T @ P) + Q, "fro"
                )
                if resid > CARE_RESIDUAL_TOL * max(1.0, np.linalg.norm(Q, "fro")):
                    raise NoConvergenceError(
                        f"CARE residual {resid:.3e} exceeds tolerance"
                    )
                return P
        P_prev = P
    raise NoConvergenceError(f"CARE did not converge in {CARE_MAX_ITER} iterations")
