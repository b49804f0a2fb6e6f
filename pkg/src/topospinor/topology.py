"""Oriented graphs, incidence operators, Laplacians and the network Dirac operator.

Signals live on nodes (length V), on edges (length E), or jointly as a
"topological spinor": the stacked vector (node block first, edge block second)
of length V + E.  Everything in this module is a pure function of immutable
inputs; dense numpy arrays are used throughout since the intended graph sizes
are small (V + E up to a few thousand).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GraphError",
    "OrientedGraph",
    "Spinor",
    "SpectralDecomposition",
    "build_incidence",
    "gradient",
    "divergence",
    "graph_laplacian",
    "hodge_laplacian_1",
    "dirac_operator",
    "super_laplacian",
    "dirac_apply",
    "spectral_decompose",
    "dirac_eigenbasis",
    "super_laplacian_eigenbasis",
    "decomposition_residuals",
]


class GraphError(ValueError):
    """Raised for structurally invalid graphs (self-loops, bad indices, duplicates)."""


@dataclass(frozen=True)
class OrientedGraph:
    """Simple graph with a fixed, ordered list of oriented edges.

    Parameters
    ----------
    num_nodes : int
        Number of nodes V (nodes are 0..V-1).
    edges : tuple of (tail, head) pairs
        Oriented edges; the list order defines the edge indexing (and hence
        the column order of the incidence matrix).

    Raises
    ------
    GraphError
        On self-loops, out-of-range node indices, or duplicate undirected
        edges; the message names the offending edge.
    """

    num_nodes: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.num_nodes < 1:
            raise GraphError(f"num_nodes must be positive, got {self.num_nodes}")
        object.__setattr__(self, "edges", tuple((int(t), int(h)) for t, h in self.edges))
        seen: set[frozenset[int]] = set()
        for e, (tail, head) in enumerate(self.edges):
            if not (0 <= tail < self.num_nodes and 0 <= head < self.num_nodes):
                raise GraphError(
                    f"edge {e} = ({tail}, {head}) has node index outside [0, {self.num_nodes})"
                )
            if tail == head:
                raise GraphError(f"edge {e} = ({tail}, {head}) is a self-loop")
            key = frozenset((tail, head))
            if key in seen:
                raise GraphError(f"edge {e} = ({tail}, {head}) duplicates an earlier edge")
            seen.add(key)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def dim(self) -> int:
        """Dimension V + E of the joint node-edge signal space."""
        return self.num_nodes + self.num_edges


@dataclass(frozen=True)
class Spinor:
    """Joint node-edge signal: one contiguous vector, node block first."""

    values: np.ndarray
    num_nodes: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError(f"spinor values must be 1-D, got shape {v.shape}")
        if not (0 <= self.num_nodes <= v.shape[0]):
            raise ValueError(
                f"num_nodes={self.num_nodes} inconsistent with vector of length {v.shape[0]}"
            )
        object.__setattr__(self, "values", v)

    @classmethod
    def from_parts(cls, node_part: np.ndarray, edge_part: np.ndarray) -> "Spinor":
        node_part = np.asarray(node_part, dtype=float)
        edge_part = np.asarray(edge_part, dtype=float)
        return cls(np.concatenate([node_part, edge_part]), node_part.shape[0])

    @property
    def node_part(self) -> np.ndarray:
        return self.values[: self.num_nodes]

    @property
    def edge_part(self) -> np.ndarray:
        return self.values[self.num_nodes :]

    @property
    def num_edges(self) -> int:
        return self.values.shape[0] - self.num_nodes


def build_incidence(g: OrientedGraph) -> np.ndarray:
    """Dense V x E incidence matrix: +1 at each edge's head, -1 at its tail."""
    B = np.zeros((g.num_nodes, g.num_edges))
    for e, (tail, head) in enumerate(g.edges):
        B[tail, e] = -1.0
        B[head, e] = 1.0
    return B


def _check_len(name: str, x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != n:
        raise ValueError(f"{name} has length {x.shape[0]}, expected {n}")
    return x


def gradient(B: np.ndarray, x0: np.ndarray) -> np.ndarray:
    """Edge-wise difference of a node signal: (head value) - (tail value), i.e. B^T x0."""
    x0 = _check_len("node signal", x0, B.shape[0])
    return B.T @ x0


def divergence(B: np.ndarray, x1: np.ndarray) -> np.ndarray:
    """Node-wise signed in/out flow balance of an edge signal, i.e. B x1."""
    x1 = _check_len("edge signal", x1, B.shape[1])
    return B @ x1


def graph_laplacian(B: np.ndarray) -> np.ndarray:
    """Node Laplacian B B^T (divergence of the gradient)."""
    return B @ B.T


def hodge_laplacian_1(B: np.ndarray) -> np.ndarray:
    """Edge Laplacian B^T B (gradient of the divergence)."""
    return B.T @ B


def dirac_operator(B: np.ndarray) -> np.ndarray:
    """(V+E) x (V+E) block operator [[0, B], [B^T, 0]] acting on spinors."""
    V, E = B.shape
    return np.block([[np.zeros((V, V)), B], [B.T, np.zeros((E, E))]])


def super_laplacian(B: np.ndarray) -> np.ndarray:
    """Block-diagonal (BB^T, B^T B): the square of the Dirac operator."""
    V, E = B.shape
    top = np.hstack([graph_laplacian(B), np.zeros((V, E))])
    bottom = np.hstack([np.zeros((E, V)), hodge_laplacian_1(B)])
    return np.vstack([top, bottom])


def dirac_apply(B: np.ndarray, s: Spinor) -> Spinor:
    """Apply the Dirac operator: node part becomes B x1, edge part becomes B^T x0."""
    V, E = B.shape
    if s.num_nodes != V or s.num_edges != E:
        raise ValueError(
            f"spinor split ({s.num_nodes}, {s.num_edges}) does not match incidence shape {B.shape}"
        )
    return Spinor.from_parts(B @ s.edge_part, B.T @ s.node_part)


@dataclass(frozen=True)
class SpectralDecomposition:
    """SVD of the incidence matrix split into non-harmonic and harmonic parts.

    ``u`` / ``v`` hold the left/right singular vectors with singular value
    above ``zero_tol`` (columns ordered by descending sigma); ``u_harmonic``
    spans ker(B^T) (one vector per connected component) and ``v_harmonic``
    spans ker(B) (the cycle space).
    """

    num_nodes: int
    num_edges: int
    u: np.ndarray
    v: np.ndarray
    sigma: np.ndarray
    u_harmonic: np.ndarray
    v_harmonic: np.ndarray
    zero_tol: float = field(default=1e-8)

    @property
    def rank(self) -> int:
        return self.sigma.shape[0]

    @property
    def xi0(self) -> int:
        """Node-harmonic count dim ker(B^T) (= number of connected components)."""
        return self.u_harmonic.shape[1]

    @property
    def xi1(self) -> int:
        """Edge-harmonic count dim ker(B) (= independent cycles)."""
        return self.v_harmonic.shape[1]

    @property
    def dim(self) -> int:
        return self.num_nodes + self.num_edges


def _fix_signs(cols: np.ndarray, companion: np.ndarray | None = None) -> None:
    # Deterministic orientation: largest-magnitude entry of each column positive.
    for i in range(cols.shape[1]):
        j = int(np.argmax(np.abs(cols[:, i])))
        if cols[j, i] < 0:
            cols[:, i] *= -1.0
            if companion is not None:
                companion[:, i] *= -1.0


def spectral_decompose(B: np.ndarray, zero_tol: float | None = None) -> SpectralDecomposition:
    """Split the SVD of B into singular triplets and harmonic null spaces.

    Parameters
    ----------
    B : ndarray, shape (V, E)
        Incidence matrix (any real matrix is accepted).
    zero_tol : float, optional
        Threshold below which a singular value counts as zero.  Defaults to
        1e-8 times the largest singular value.

    Raises
    ------
    ValueError
        If B contains non-finite entries or zero_tol is not positive.
    """
    B = np.asarray(B, dtype=float)
    if not np.all(np.isfinite(B)):
        raise ValueError("incidence matrix contains non-finite entries")
    V, E = B.shape
    U, s, Vt = np.linalg.svd(B, full_matrices=True)
    if zero_tol is None:
        zero_tol = 1e-8 * (s[0] if s.size else 1.0)
    if zero_tol <= 0:
        raise ValueError(f"zero_tol must be positive, got {zero_tol}")
    r = int(np.sum(s > zero_tol))

    u = U[:, :r].copy()
    vmat = Vt[:r, :].T.copy()
    _fix_signs(u, vmat)
    u_harm = U[:, r:].copy()
    v_harm = Vt[r:, :].T.copy()
    _fix_signs(u_harm)
    _fix_signs(v_harm)

    return SpectralDecomposition(
        num_nodes=V,
        num_edges=E,
        u=u,
        v=vmat,
        sigma=s[:r].copy(),
        u_harmonic=u_harm,
        v_harmonic=v_harm,
        zero_tol=float(zero_tol),
    )


def dirac_eigenbasis(d: SpectralDecomposition) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal eigenbasis of the Dirac operator.

    Returns ``(Phi, gamma)`` where the columns of Phi come in blocks
    [negative branch | edge-harmonic | node-harmonic | positive branch] and
    ``gamma`` holds the matching eigenvalues (-sigma, 0, ..., 0, +sigma).
    Branch columns are (u_i; -v_i)/sqrt(2) and (u_i; v_i)/sqrt(2); the 1/sqrt(2)
    makes the mixed columns unit norm.
    """
    V, E = d.num_nodes, d.num_edges
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    minus = np.vstack([d.u, -d.v]) * inv_sqrt2
    plus = np.vstack([d.u, d.v]) * inv_sqrt2
    edge_harm = np.vstack([np.zeros((V, d.xi1)), d.v_harmonic])
    node_harm = np.vstack([d.u_harmonic, np.zeros((E, d.xi0))])
    phi = np.hstack([minus, edge_harm, node_harm, plus])
    gamma = np.concatenate([-d.sigma, np.zeros(d.xi1 + d.xi0), d.sigma])
    return phi, gamma


def super_laplacian_eigenbasis(d: SpectralDecomposition) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal eigenbasis of the block-diagonal (node, edge) Laplacian.

    Returns ``(Theta, lam)`` with column blocks
    [node-harmonic | edge-harmonic | (u_i; 0) | (0; v_i)] and eigenvalues
    (0, ..., 0, sigma^2, sigma^2).  Every column is supported entirely on one
    of the node/edge blocks.
    """
    V, E = d.num_nodes, d.num_edges
    node_harm = np.vstack([d.u_harmonic, np.zeros((E, d.xi0))])
    edge_harm = np.vstack([np.zeros((V, d.xi1)), d.v_harmonic])
    node_modes = np.vstack([d.u, np.zeros((E, d.rank))])
    edge_modes = np.vstack([np.zeros((V, d.rank)), d.v])
    theta = np.hstack([node_harm, edge_harm, node_modes, edge_modes])
    lam = np.concatenate([np.zeros(d.xi0 + d.xi1), d.sigma**2, d.sigma**2])
    return theta, lam


def decomposition_residuals(d: SpectralDecomposition, B: np.ndarray) -> dict[str, float]:
    """Max-abs residuals of the structural identities; used for diagnostics."""
    phi, gamma = dirac_eigenbasis(d)
    theta, lam = super_laplacian_eigenbasis(d)
    D = dirac_operator(B)
    LG = super_laplacian(B)
    n = d.dim
    eye = np.eye(n)
    return {
        "svd_roundtrip": float(np.max(np.abs(B - d.u @ np.diag(d.sigma) @ d.v.T))),
        "dirac_squared_vs_super_laplacian": float(np.max(np.abs(D @ D - LG))),
        "dirac_orthonormality": float(np.max(np.abs(phi @ phi.T - eye))),
        "super_laplacian_orthonormality": float(np.max(np.abs(theta @ theta.T - eye))),
        "dirac_reconstruction": float(np.max(np.abs(phi @ np.diag(gamma) @ phi.T - D))),
        "super_laplacian_reconstruction": float(np.max(np.abs(theta @ np.diag(lam) @ theta.T - LG))),
    }
