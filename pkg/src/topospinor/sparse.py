"""Greedy sparse coding and the two retractions used by the transform learner.

``omp`` implements orthogonal matching pursuit with exact least-squares
refitting after every atom selection.  In joint mode one support is shared by
all signal columns (atom scores are summed over the batch); in per-signal mode
each column is coded independently and the results are merged on the union
support.  ``row_hard_threshold`` and ``column_normalize`` are the Euclidean
projections onto row-sparse matrices and onto the unit-column (oblique)
manifold, respectively.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SparseCode",
    "DegenerateRetractionWarning",
    "omp",
    "nmse",
    "row_hard_threshold",
    "column_normalize",
]

_UNIT_NORM_TOL = 1e-6
_RIDGE = 1e-12


class DegenerateRetractionWarning(UserWarning):
    """A retraction hit a degenerate input (zero column, or too few nonzero rows)."""


@dataclass(frozen=True)
class SparseCode:
    """Result of a pursuit: selected atoms, refit coefficients, residual norms.

    ``support`` lists atom indices in selection order (joint mode) or as the
    sorted union of the per-signal supports (per-signal mode, in which case
    ``per_signal_supports`` records each column's own selection and the
    coefficient matrix is zero outside it).  ``residual_history[j]`` is the
    Frobenius residual after j+1 atoms, so prefix sparsity levels of a single
    run can be read off without re-running the pursuit.
    """

    support: tuple[int, ...]
    coefficients: np.ndarray
    residual_norm: float
    residual_history: tuple[float, ...] = field(default=())
    per_signal_supports: tuple[tuple[int, ...], ...] | None = None
    ridge_regularized: bool = False

    def reconstruct(self, dictionary: np.ndarray) -> np.ndarray:
        return dictionary[:, list(self.support)] @ self.coefficients


def _refit(dictionary: np.ndarray, support: list[int], signals: np.ndarray) -> tuple[np.ndarray, bool]:
    sub = dictionary[:, support]
    coef, _, rank, _ = np.linalg.lstsq(sub, signals, rcond=None)
    if rank < len(support):
        gram = sub.T @ sub + _RIDGE * np.eye(len(support))
        coef = np.linalg.solve(gram, sub.T @ signals)
        return coef, True
    return coef, False


def _greedy_select(dictionary: np.ndarray, signals: np.ndarray, sparsity: int):
    """Shared-support pursuit over a batch; scores are summed squared correlations."""
    num_atoms = dictionary.shape[1]
    support: list[int] = []
    taken = np.zeros(num_atoms, dtype=bool)
    residual = signals.copy()
    history: list[float] = []
    ridge_used = False
    coef = np.zeros((0, signals.shape[1]))
    for _ in range(sparsity):
        corr = dictionary.T @ residual
        scores = np.einsum("nt,nt->n", corr, corr)
        scores[taken] = -1.0
        best = int(np.argmax(scores))  # ties resolve to the lowest index
        support.append(best)
        taken[best] = True
        coef, ridge = _refit(dictionary, support, signals)
        ridge_used = ridge_used or ridge
        residual = signals - dictionary[:, support] @ coef
        history.append(float(np.linalg.norm(residual)))
    return support, coef, history, ridge_used


def omp(dictionary: np.ndarray, signals: np.ndarray, sparsity: int, joint: bool = True) -> SparseCode:
    """Orthogonal matching pursuit against a unit-column dictionary.

    Parameters
    ----------
    dictionary : ndarray, shape (n, N)
        Atoms in columns; column norms must equal 1 within 1e-6.
    signals : ndarray, shape (n, T) or (n,)
        Signals to code (a single vector is treated as T = 1).
    sparsity : int
        Number of atoms to select (per support).
    joint : bool
        Shared support across the batch (default) versus independent
        per-signal supports merged on their union.

    Raises
    ------
    ValueError
        On non-normalized dictionaries, sparsity out of range, or shape
        mismatch.  Rank-deficient least-squares refits do not raise; they are
        re-solved with a tiny ridge and flagged on the result.
    """
    dictionary = np.asarray(dictionary, dtype=float)
    signals = np.asarray(signals, dtype=float)
    if signals.ndim == 1:
        signals = signals[:, None]
    if dictionary.ndim != 2 or signals.shape[0] != dictionary.shape[0]:
        raise ValueError(
            f"dictionary {dictionary.shape} and signals {signals.shape} have incompatible shapes"
        )
    norms = np.linalg.norm(dictionary, axis=0)
    worst = float(np.max(np.abs(norms - 1.0))) if norms.size else 0.0
    if worst > _UNIT_NORM_TOL:
        raise ValueError(f"dictionary columns must have unit norm (max deviation {worst:.3e})")
    if not (1 <= sparsity <= dictionary.shape[1]):
        raise ValueError(f"sparsity must lie in [1, {dictionary.shape[1]}], got {sparsity}")

    if joint:
        support, coef, history, ridge_used = _greedy_select(dictionary, signals, sparsity)
        return SparseCode(
            support=tuple(support),
            coefficients=coef,
            residual_norm=history[-1],
            residual_history=tuple(history),
            ridge_regularized=ridge_used,
        )

    T = signals.shape[1]
    per_supports: list[tuple[int, ...]] = []
    per_coefs: list[np.ndarray] = []
    step_sq = np.zeros(sparsity)
    ridge_used = False
    for t in range(T):
        sup, coef, history, ridge = _greedy_select(dictionary, signals[:, t : t + 1], sparsity)
        per_supports.append(tuple(sup))
        per_coefs.append(coef[:, 0])
        step_sq += np.asarray(history) ** 2
        ridge_used = ridge_used or ridge
    union = sorted(set().union(*per_supports))
    lookup = {atom: row for row, atom in enumerate(union)}
    coefficients = np.zeros((len(union), T))
    for t, (sup, coef) in enumerate(zip(per_supports, per_coefs)):
        for atom, value in zip(sup, coef):
            coefficients[lookup[atom], t] = value
    history = tuple(float(x) for x in np.sqrt(step_sq))
    return SparseCode(
        support=tuple(union),
        coefficients=coefficients,
        residual_norm=history[-1],
        residual_history=history,
        per_signal_supports=tuple(per_supports),
        ridge_regularized=ridge_used,
    )


def nmse(S: np.ndarray, S_hat: np.ndarray) -> float:
    """Normalized mean squared error ||S - S_hat||_F^2 / ||S||_F^2."""
    S = np.asarray(S, dtype=float)
    S_hat = np.asarray(S_hat, dtype=float)
    denom = float(np.linalg.norm(S) ** 2)
    if denom == 0.0:
        raise ValueError("reference signal has zero norm")
    return float(np.linalg.norm(S - S_hat) ** 2) / denom


def row_hard_threshold(M: np.ndarray, eta0: int) -> np.ndarray:
    """Keep the eta0 rows with largest l2 norm, zeroing the rest.

    This is the Euclidean projection onto matrices with at most eta0 nonzero
    rows; norm ties at the cutoff are resolved toward lower row indices.  If
    the input has fewer than eta0 nonzero rows the output has fewer as well
    and a DegenerateRetractionWarning is issued.
    """
    M = np.asarray(M, dtype=float)
    num_rows = M.shape[0]
    if not (0 < eta0 <= num_rows):
        raise ValueError(f"eta0 must lie in [1, {num_rows}], got {eta0}")
    norms = np.linalg.norm(M, axis=1)
    keep = np.argsort(-norms, kind="stable")[:eta0]
    if np.count_nonzero(norms) < eta0:
        warnings.warn(
            f"input has only {int(np.count_nonzero(norms))} nonzero rows; "
            f"fewer than eta0={eta0} rows remain nonzero",
            DegenerateRetractionWarning,
            stacklevel=2,
        )
    out = np.zeros_like(M)
    out[keep] = M[keep]
    return out


def column_normalize(P: np.ndarray) -> np.ndarray:
    """Scale each column to unit l2 norm (projection onto the oblique manifold).

    Zero columns have no direction to keep; column j is replaced by the
    canonical basis vector e_j and a DegenerateRetractionWarning is issued.
    """
    P = np.asarray(P, dtype=float)
    norms = np.linalg.norm(P, axis=0)
    zero_cols = np.flatnonzero(norms == 0.0)
    safe = np.where(norms == 0.0, 1.0, norms)
    out = P / safe
    if zero_cols.size:
        warnings.warn(
            f"zero columns at indices {zero_cols.tolist()} replaced by canonical basis vectors",
            DegenerateRetractionWarning,
            stacklevel=2,
        )
        for j in zero_cols:
            out[j % P.shape[0], j] = 1.0
    return out
