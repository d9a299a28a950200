"""Matrix-exponential propagation for Hermitian generators.

Small problems go through a full Hermitian eigendecomposition (exact to
machine precision).  Large sparse problems use an adaptive-step Lanczos
iteration: the Krylov dimension grows until the per-step residual estimate
drops below tolerance, and the step is halved when it does not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sparse

from .errors import PropagationError


@dataclass(frozen=True)
class PropagationInfo:
    """Diagnostics of one Krylov propagation: steps taken, worst residual, largest basis."""

    steps: int
    max_residual: float
    max_krylov_dim: int


def hermitian_propagator(hamiltonian, t: float) -> np.ndarray:
    """Return the dense unitary exp(-i*t*H) of a Hermitian matrix H.

    Uses an eigendecomposition, so the result is unitary to machine
    precision independent of ``t``.
    """
    h = hamiltonian.toarray() if sparse.issparse(hamiltonian) else np.asarray(hamiltonian)
    try:
        eigvals, eigvecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise PropagationError(f"eigendecomposition failed: {exc}") from exc
    return (eigvecs * np.exp(-1j * t * eigvals)) @ eigvecs.conj().T


def _lanczos_step(matvec, vec, dt, tol, max_dim):
    """One Lanczos approximation of exp(-i*dt*H) vec.

    Returns (residual_estimate, result_or_None, krylov_dim); result is None
    when max_dim was reached without meeting tol.
    """
    norm0 = np.linalg.norm(vec)
    if norm0 == 0.0:
        return 0.0, vec.copy(), 0
    basis = np.empty((max_dim + 1, vec.size), dtype=complex)
    alpha = np.zeros(max_dim)
    beta = np.zeros(max_dim + 1)
    basis[0] = vec / norm0
    err = prev_err = np.inf
    for j in range(max_dim):
        w = matvec(basis[j])
        alpha[j] = np.vdot(basis[j], w).real
        w = w - alpha[j] * basis[j]
        if j > 0:
            w = w - beta[j] * basis[j - 1]
        # full reorthogonalization; cheap at these Krylov sizes and immune
        # to the loss of orthogonality plain Lanczos suffers
        w -= (basis[: j + 1].conj() @ w) @ basis[: j + 1]
        beta[j + 1] = np.linalg.norm(w)
        m = j + 1
        evals, evecs = scipy.linalg.eigh_tridiagonal(alpha[:m], beta[1:m])
        small = evecs @ (np.exp(-1j * dt * evals) * evecs[0])
        # the single-term residual estimate can hit structural zeros, so
        # demand two consecutive small values before accepting
        prev_err, err = err, beta[m] * abs(small[-1])
        converged = max(err, prev_err) <= tol
        breakdown = beta[m] < 1e-14 * max(1.0, abs(alpha[j]))
        if converged or breakdown:
            reported = err if breakdown else max(err, prev_err)
            return reported, norm0 * (small @ basis[:m]), m
        basis[j + 1] = w / beta[m]
    return err, None, max_dim


def expm_krylov(hamiltonian, vec: np.ndarray, t: float, tol: float = 1e-10,
                max_dim: int = 40, return_info: bool = False):
    """Apply exp(-i*t*H) to ``vec`` for Hermitian H (dense or sparse).

    The interval is covered by adaptive substeps: a substep whose Lanczos
    residual estimate exceeds ``tol`` is halved; successful substeps let the
    step size grow again.  Raises PropagationError when the step underflows.
    """
    psi = np.asarray(vec, dtype=complex).copy()
    if t == 0.0:
        return (psi, PropagationInfo(0, 0.0, 0)) if return_info else psi
    matvec = hamiltonian.dot
    sign = 1.0 if t > 0 else -1.0
    remaining = abs(t)
    dt = remaining
    steps = 0
    max_res = 0.0
    max_m = 0
    min_step = abs(t) * 1e-12
    while remaining > abs(t) * 1e-14:
        step = min(dt, remaining)
        res, out, m = _lanczos_step(matvec, psi, sign * step, tol, max_dim)
        if out is None:
            dt = step / 2.0
            if dt < min_step:
                raise PropagationError(
                    f"Krylov step underflow: residual {res:.3e} > tol {tol:.1e} "
                    f"at step {dt:.3e} after {steps} steps"
                )
            continue
        psi = out
        remaining -= step
        steps += 1
        max_res = max(max_res, res)
        max_m = max(max_m, m)
        dt = step * 1.5
    if return_info:
        return psi, PropagationInfo(steps, max_res, max_m)
    return psi
