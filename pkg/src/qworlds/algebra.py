"""Finite-dimensional *-algebras as direct sums of matrix blocks.

Commutativity is decidable by inspection (all blocks one-dimensional), states
are weight/density pairs per block, and the classical universal broadcaster
plus cloning checks live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import qmat
from .channels import KrausChannel, apply_nonselective
from .qmat import DimensionMismatchError, dagger


def _tol(tol):
    return qmat.tolerance() if tol is None else float(tol)


@dataclass(frozen=True)
class BlockAlgebra:
    """Algebra isomorphic to a direct sum of full matrix blocks M_{n_i}."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if not dims:
            raise ValueError("an algebra needs at least one block")
        if any(d < 1 for d in dims):
            raise ValueError(f"block dimensions must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def dim(self) -> int:
        return sum(self.block_dims)


def is_commutative(algebra: BlockAlgebra) -> bool:
    """True iff every block is one-dimensional."""
    return all(d == 1 for d in algebra.block_dims)


@dataclass(eq=False)
class AlgebraState:
    """Positive normalized functional: block weights plus one density per block."""

    algebra: BlockAlgebra
    weights: np.ndarray
    densities: tuple[np.ndarray, ...]

    def __post_init__(self):
        t = qmat.tolerance()
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size != len(self.algebra.block_dims):
            raise DimensionMismatchError("one weight per block is required")
        if float(w.min()) < -t:
            raise ValueError(f"negative block weight {float(w.min())}")
        if abs(float(w.sum()) - 1.0) > t:
            raise ValueError(f"block weights sum to {float(w.sum())}, not 1")
        ds = []
        for k, (d, dim) in enumerate(zip(self.densities, self.algebra.block_dims)):
            d = qmat.require_density(d, t)
            if d.shape != (dim, dim):
                raise DimensionMismatchError(
                    f"block {k} density has shape {d.shape}, expected {(dim, dim)}"
                )
            ds.append(d)
        if len(ds) != len(self.algebra.block_dims):
            raise DimensionMismatchError("one density per block is required")
        self.weights = w
        self.densities = tuple(ds)

    def to_density(self) -> np.ndarray:
        """Block-diagonal density operator on the direct-sum space."""
        n = self.algebra.dim
        out = np.zeros((n, n), dtype=complex)
        offset = 0
        for w, d in zip(self.weights, self.densities):
            k = d.shape[0]
            out[offset : offset + k, offset : offset + k] = w * d
            offset += k
        return out


def classical_state(weights) -> AlgebraState:
    """State of the commutative algebra with one 1-dim block per weight."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    algebra = BlockAlgebra((1,) * w.size)
    one = np.eye(1, dtype=complex)
    return AlgebraState(algebra, w, tuple(one for _ in range(w.size)))


def is_pure_state(state: AlgebraState, tol: float | None = None) -> bool:
    """True iff exactly one block carries weight 1 and its density is idempotent."""
    t = _tol(tol)
    heavy = [k for k, w in enumerate(state.weights) if w > t]
    if len(heavy) != 1 or abs(float(state.weights[heavy[0]]) - 1.0) > t:
        return False
    d = state.densities[heavy[0]]
    return qmat.frobenius_distance(d @ d, d) <= t * d.shape[0]


def kinematically_independent(a_ops, b_ops, tol: float | None = None) -> bool:
    """True iff every listed A operator commutes with every listed B operator."""
    t = _tol(tol)
    a_ops = [qmat.as_complex_matrix(a) for a in a_ops]
    b_ops = [qmat.as_complex_matrix(b) for b in b_ops]
    dims = {m.shape for m in a_ops + b_ops}
    if len(dims) != 1 or any(s[0] != s[1] for s in dims):
        raise DimensionMismatchError(f"operators must be square on one joint space, got {dims}")
    n = a_ops[0].shape[0]
    for a in a_ops:
        for b in b_ops:
            if qmat.frobenius_distance(a @ b, b @ a) > t * n:
                return False
    return True


def classical_broadcaster(basis, tol: float | None = None) -> KrausChannel:
    """Universal broadcaster for states diagonal in `basis`.

    Measures in the basis and prepares two copies of the observed basis state:
    rho -> sum_i <i|rho|i> |i><i| x |i><i|. Trace preserving by construction.
    """
    t = _tol(tol)
    b = np.asarray(basis, dtype=complex)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DimensionMismatchError(
            f"basis must be square (one row per vector), got shape {b.shape}"
        )
    gram = np.conj(b) @ b.T
    if qmat.frobenius_distance(gram, np.eye(b.shape[0])) > t * b.shape[0]:
        raise ValueError("basis rows are not orthonormal")
    ops = []
    for i in range(b.shape[0]):
        v = b[i]
        ops.append(np.outer(np.kron(v, v), np.conj(v)))  # (|i>|i>) <i|, shape (d^2, d)
    return KrausChannel(tuple(ops))


class BroadcastCheck(NamedTuple):
    ok: bool
    deviation: float


def broadcast_check(channel: KrausChannel, rho, tol: float | None = None) -> BroadcastCheck:
    """Test whether a one-in/two-out channel broadcasts `rho`.

    ok is True iff both marginals of the channel output equal the input within
    tolerance; deviation is the larger Frobenius distance of the two marginals
    from the input.
    """
    t = _tol(tol)
    rho = qmat.require_density(rho, t)
    d = rho.shape[0]
    if channel.d_in != d or channel.d_out != d * d:
        raise DimensionMismatchError(
            f"broadcast channel must map dim {d} to dim {d * d}, got "
            f"{channel.d_in} -> {channel.d_out}"
        )
    out = apply_nonselective(channel, rho, t)
    dev_a = qmat.frobenius_distance(qmat.partial_trace(out, (d, d), "A"), rho)
    dev_b = qmat.frobenius_distance(qmat.partial_trace(out, (d, d), "B"), rho)
    deviation = max(dev_a, dev_b)
    return BroadcastCheck(deviation <= t, deviation)


@dataclass(frozen=True)
class CloneRefusal:
    """Witness that a cloning unitary cannot exist for a nonorthogonal pair.

    A unitary would have to preserve the inner product, forcing
    |<psi|phi>| (before) to equal |<psi|phi>|^2 (after).
    """

    overlap: float
    overlap_squared: float


def _complete_orthonormal(seed_vectors: list[np.ndarray], dim: int) -> np.ndarray:
    """Orthonormal basis (columns) whose leading columns are the given vectors."""
    cols = [v / np.linalg.norm(v) for v in seed_vectors]
    for k in range(dim):
        cand = np.zeros(dim, dtype=complex)
        cand[k] = 1.0
        for c in cols:
            cand = cand - np.vdot(c, cand) * c
        norm = float(np.linalg.norm(cand))
        if norm > 1e-7:
            cols.append(cand / norm)
        if len(cols) == dim:
            break
    if len(cols) != dim:
        raise RuntimeError("failed to complete an orthonormal basis")
    return np.array(cols).T


def clone_orthogonal_pair(psi, phi, tol: float | None = None):
    """Cloning unitary for an orthogonal (or identical) pair, else a refusal.

    For orthogonal inputs, returns a unitary U on the doubled space with
    U(psi x ready) = psi x psi and U(phi x ready) = phi x phi, where the ready
    state is the first basis vector. For overlaps strictly between 0 and 1 a
    CloneRefusal carrying the inner-product invariance witness is returned.
    """
    t = _tol(tol)
    psi = qmat.as_unit_vector(psi, t)
    phi = qmat.as_unit_vector(phi, t)
    if psi.size != phi.size:
        raise DimensionMismatchError(
            f"states live in different dimensions: {psi.size} vs {phi.size}"
        )
    d = psi.size
    overlap = float(abs(np.vdot(psi, phi)))
    if t < overlap < 1.0 - t:
        return CloneRefusal(overlap=overlap, overlap_squared=overlap**2)
    ready = np.zeros(d, dtype=complex)
    ready[0] = 1.0
    sources = [np.kron(psi, ready)]
    targets = [np.kron(psi, psi)]
    if overlap <= t:
        sources.append(np.kron(phi, ready))
        targets.append(np.kron(phi, phi))
    s_basis = _complete_orthonormal(sources, d * d)
    t_basis = _complete_orthonormal(targets, d * d)
    return t_basis @ dagger(s_basis)
