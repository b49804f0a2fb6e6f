"""Overcomplete frame obtained by concatenating the Dirac and Laplacian eigenbases.

Stacking two orthonormal bases side by side gives a tight frame with frame
bound 2: F F^T = 2 I, so analysis followed by synthesis (which carries the
1/2 factor) reproduces any input exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["DiracLaplacianFrame", "build_frame", "frame_analysis", "frame_synthesis"]

_ORTHONORMALITY_TOL = 1e-8


@dataclass(frozen=True)
class DiracLaplacianFrame:
    """Tight frame matrix of shape (V+E) x 2(V+E) with frame bound 2."""

    matrix: np.ndarray
    frame_bound: float = 2.0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_atoms(self) -> int:
        return self.matrix.shape[1]


def _orthonormality_defect(basis: np.ndarray) -> float:
    return float(np.max(np.abs(basis.T @ basis - np.eye(basis.shape[1]))))


def build_frame(phi: np.ndarray, theta: np.ndarray) -> DiracLaplacianFrame:
    """Concatenate two orthonormal bases of the same space into a tight frame.

    Raises ValueError if the inputs have mismatched row counts or fail the
    orthonormality check (tolerance 1e-8).
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if phi.shape != theta.shape or phi.shape[0] != phi.shape[1]:
        raise ValueError(f"expected two square bases of equal shape, got {phi.shape} and {theta.shape}")
    for name, basis in (("first", phi), ("second", theta)):
        defect = _orthonormality_defect(basis)
        if defect > _ORTHONORMALITY_TOL:
            raise ValueError(f"{name} basis is not orthonormal (max Gram deviation {defect:.3e})")
    return DiracLaplacianFrame(np.hstack([phi, theta]))


def frame_analysis(frame: DiracLaplacianFrame, s: np.ndarray) -> np.ndarray:
    """Coefficients F^T s; accepts a single vector or a (V+E) x T batch."""
    s = np.asarray(s, dtype=float)
    if s.shape[0] != frame.dim:
        raise ValueError(f"signal has leading dimension {s.shape[0]}, expected {frame.dim}")
    return frame.matrix.T @ s


def frame_synthesis(frame: DiracLaplacianFrame, coefficients: np.ndarray) -> np.ndarray:
    """Reconstruction (1/A) F c with the tight-frame bound A = 2."""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape[0] != frame.num_atoms:
        raise ValueError(
            f"coefficients have leading dimension {coefficients.shape[0]}, expected {frame.num_atoms}"
        )
    return (frame.matrix @ coefficients) / frame.frame_bound
