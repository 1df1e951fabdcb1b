"""Greedy pursuit recovery: OMP, CoSaMP, and adaptive-step SaMP.

All three select atoms by correlating normalized sensing-matrix columns with
the current residual and refit by least squares. Ties in atom selection
resolve to the lowest column index.
"""

import time

import numpy as np

from .measurement import SensingMatrix
from .recovery import RecoveryResult

_STAGNATION = 1e-2  # relative residual improvement below this counts as stalled


def _as_matrix(psi) -> np.ndarray:
    return psi.psi if isinstance(psi, SensingMatrix) else np.asarray(psi)


def _column_norms(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=0)
    if np.any(norms == 0):
        raise ValueError("sensing matrix has a zero column")
    return norms


def _lstsq(mat: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.linalg.lstsq(mat, y, rcond=None)[0]


def solve_omp(psi, y, k_max: int, residual_tol: float = 0.0) -> RecoveryResult:
    """Orthogonal matching pursuit: one atom per iteration, refit, repeat.

    Stops after k_max atoms or once the residual norm drops to residual_tol.
    The selected-atom factorization is grown one orthonormal column at a
    time, so each iteration costs one correlation pass plus a rank-1 update
    rather than a fresh least-squares solve.
    """
    t0 = time.perf_counter()
    mat = _as_matrix(psi)
    m, n = mat.shape
    if not 1 <= k_max <= m:
        raise ValueError(f"k_max must lie in [1, m={m}], got {k_max}")
    y = np.asarray(y, dtype=complex)
    norms = _column_norms(mat)

    support: list[int] = []
    q_basis = np.zeros((m, k_max), dtype=complex)
    r_fact = np.zeros((k_max, k_max), dtype=complex)
    residual = y.copy()
    while len(support) < k_max and float(np.linalg.norm(residual)) > residual_tol:
        corr = np.abs(mat.conj().T @ residual) / norms
        if support:
            corr[support] = -1.0
        j = len(support)
        atom_idx = int(np.argmax(corr))
        atom = mat[:, atom_idx]
        proj = q_basis[:, :j].conj().T @ atom
        q_new = atom - q_basis[:, :j] @ proj
        q_norm = float(np.linalg.norm(q_new))
        if q_norm <= 1e-12 * norms[atom_idx]:
            break  # atom already spanned; no progress possible
        support.append(atom_idx)
        q_basis[:, j] = q_new / q_norm
        r_fact[:j, j] = proj
        r_fact[j, j] = q_norm
        residual = residual - q_basis[:, j] * (q_basis[:, j].conj() @ residual)

    z = np.zeros(n, dtype=complex)
    if support:
        j = len(support)
        coef = np.linalg.solve(r_fact[:j, :j], q_basis[:, :j].conj().T @ y)
        z[support] = coef
    return RecoveryResult(
        z_star=z,
        residual_norm=float(np.linalg.norm(residual)),
        iterations=len(support),
        wall_time=time.perf_counter() - t0,
        converged=True,
    )


def solve_cosamp(psi, y, k: int, max_itr: int = 50, residual_tol: float = 0.0) -> RecoveryResult:
    """Compressive sampling matching pursuit with an exactly k-sparse output.

    Each round merges the top-2k residual proxies with the current support,
    least-squares fits on the merged set, prunes to the k largest entries,
    and updates the residual. Stops on max_itr, the residual tolerance, or
    residual stagnation.
    """
    t0 = time.perf_counter()
    mat = _as_matrix(psi)
    m, n = mat.shape
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, m={m}], got {k}")
    y = np.asarray(y, dtype=complex)
    norms = _column_norms(mat)

    z = np.zeros(n, dtype=complex)
    residual = y.copy()
    res_norm = float(np.linalg.norm(residual))
    iterations = 0
    converged = res_norm <= residual_tol
    while iterations < max_itr and res_norm > residual_tol:
        iterations += 1
        proxy = np.abs(mat.conj().T @ residual) / norms
        top = np.argsort(proxy)[-(2 * k):]
        merged = np.union1d(np.flatnonzero(z), top)
        b = _lstsq(mat[:, merged], y)
        pruned = np.argsort(np.abs(b))[-k:]
        z_new = np.zeros(n, dtype=complex)
        z_new[merged[pruned]] = b[pruned]
        new_residual = y - mat @ z_new
        new_norm = float(np.linalg.norm(new_residual))

        if new_norm > res_norm:
            converged = True  # stalled; keep the previous, better iterate
            break
        z, residual, improved = z_new, new_residual, res_norm - new_norm
        if new_norm <= residual_tol or improved < _STAGNATION * res_norm:
            converged = True
            res_norm = new_norm
            break
        res_norm = new_norm

    return RecoveryResult(
        z_star=z,
        residual_norm=float(np.linalg.norm(y - mat @ z)),
        iterations=iterations,
        wall_time=time.perf_counter() - t0,
        converged=converged,
    )


def solve_assamp(
    psi,
    y,
    initial_step: int = 1,
    residual_tol: float = 0.0,
    max_itr: int = 100,
) -> RecoveryResult:
    """Sparsity-adaptive matching pursuit with a shrinking growth step.

    The working support size starts at initial_step and is enlarged whenever
    a refinement round stops improving the residual (relative gain < 1%);
    each enlargement halves the growth step (floor 1), so the size estimate
    approaches the true sparsity without requiring it up front. Three stalled
    rounds in a row, the size cap, or the residual tolerance end the search.
    """
    t0 = time.perf_counter()
    mat = _as_matrix(psi)
    m, n = mat.shape
    if initial_step < 1:
        raise ValueError(f"initial_step must be >= 1, got {initial_step}")
    y = np.asarray(y, dtype=complex)
    norms = _column_norms(mat)
    cap = min(m, n)

    size = min(initial_step, cap)
    step = initial_step
    z = np.zeros(n, dtype=complex)
    residual = y.copy()
    res_norm = float(np.linalg.norm(residual))
    iterations = 0
    stalled = 0
    while iterations < max_itr and res_norm > residual_tol:
        iterations += 1
        proxy = np.abs(mat.conj().T @ residual) / norms
        top = np.argsort(proxy)[-size:]
        merged = np.union1d(np.flatnonzero(z), top)
        b = _lstsq(mat[:, merged], y)
        pruned = np.argsort(np.abs(b))[-size:]
        keep = merged[pruned]
        coef = _lstsq(mat[:, keep], y)
        new_residual = y - mat[:, keep] @ coef
        new_norm = float(np.linalg.norm(new_residual))

        if new_norm < res_norm * (1.0 - _STAGNATION) or new_norm <= residual_tol:
            z = np.zeros(n, dtype=complex)
            z[keep] = coef
            residual, res_norm = new_residual, new_norm
            stalled = 0
            continue
        stalled += 1
        if stalled >= 3 or size >= cap:
            break
        size = min(size + step, cap)
        step = max(1, step // 2)

    return RecoveryResult(
        z_star=z,
        residual_norm=float(np.linalg.norm(y - mat @ z)),
        iterations=iterations,
        wall_time=time.perf_counter() - t0,
        converged=res_norm <= residual_tol,
    )
