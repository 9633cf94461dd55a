"""Completely positive maps, measurements, and strength-parameterized dephasing.

Channels carry explicit Kraus operator sets; a channel is nonselective
(trace preserving) when the Kraus operators resolve the identity, and
sub-normalized sets represent selective operations. Measurement sampling
uses numpy's seeded PCG64 generator, so identical seeds give identical
outcome sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qmat
from .qmat import DimensionMismatchError, dagger


def _tol(tol):
    return qmat.tolerance() if tol is None else float(tol)


@dataclass(eq=False)
class KrausChannel:
    """CP map given by Kraus operators, all of shape (d_out, d_in)."""

    kraus_ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(qmat.as_complex_matrix(k) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise DimensionMismatchError("Kraus operators must share one shape")
        self.kraus_ops = ops
        total = sum(dagger(k) @ k for k in ops)
        w = np.linalg.eigvalsh((total + dagger(total)) / 2.0)
        if float(w.max()) > 1.0 + qmat.tolerance():
            raise ValueError(
                f"Kraus set is super-normalized: max eigenvalue of sum K^dag K is {float(w.max())}"
            )

    @property
    def d_in(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus_ops[0].shape[0]

    def is_trace_preserving(self, tol: float | None = None) -> bool:
        total = sum(dagger(k) @ k for k in self.kraus_ops)
        return qmat.frobenius_distance(total, np.eye(self.d_in)) <= _tol(tol) * self.d_in


@dataclass(eq=False)
class ProjectiveMeasurement:
    """Complete set of mutually orthogonal projectors."""

    projectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        t = qmat.tolerance()
        ps = tuple(qmat.require_hermitian(p, t) for p in self.projectors)
        if not ps:
            raise ValueError("a measurement needs at least one projector")
        dim = ps[0].shape[0]
        if any(p.shape != (dim, dim) for p in ps):
            raise DimensionMismatchError("projectors must share one dimension")
        for i, p in enumerate(ps):
            if qmat.frobenius_distance(p @ p, p) > t * dim:
                raise ValueError(f"projector {i} is not idempotent")
            for j in range(i + 1, len(ps)):
                if qmat.frobenius_distance(p @ ps[j]) > t * dim:
                    raise ValueError(f"projectors {i} and {j} are not orthogonal")
        if qmat.frobenius_distance(sum(ps), np.eye(dim)) > t * dim:
            raise ValueError("projectors do not resolve the identity")
        self.projectors = ps

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.projectors)

    @property
    def effects(self) -> tuple[np.ndarray, ...]:
        return self.projectors


@dataclass(eq=False)
class GeneralizedMeasurement:
    """POVM: positive effects summing to the identity."""

    effects: tuple[np.ndarray, ...]

    def __post_init__(self):
        t = qmat.tolerance()
        es = tuple(qmat.require_hermitian(e, t) for e in self.effects)
        if not es:
            raise ValueError("a measurement needs at least one effect")
        dim = es[0].shape[0]
        if any(e.shape != (dim, dim) for e in es):
            raise DimensionMismatchError("effects must share one dimension")
        for i, e in enumerate(es):
            w = np.linalg.eigvalsh((e + dagger(e)) / 2.0)
            if float(w.min()) < -t:
                raise ValueError(f"effect {i} has negative eigenvalue {float(w.min())}")
        if qmat.frobenius_distance(sum(es), np.eye(dim)) > t * dim:
            raise ValueError("effects do not sum to the identity")
        self.effects = es

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    def is_projective(self, tol: float | None = None) -> bool:
        t = _tol(tol)
        for i, e in enumerate(self.effects):
            if qmat.frobenius_distance(e @ e, e) > t * self.dim:
                return False
            for j in range(i + 1, len(self.effects)):
                if qmat.frobenius_distance(e @ self.effects[j]) > t * self.dim:
                    return False
        return True


@dataclass(eq=False)
class DephasingChannel:
    """Damp off-diagonal entries in a fixed orthonormal basis by (1 - strength).

    `basis` holds the basis vectors as rows. strength 0 is the identity map;
    strength 1 removes the off-diagonal entries in that basis exactly.
    """

    basis: np.ndarray
    strength: float

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise DimensionMismatchError(
                f"basis must be square (one row per vector), got shape {b.shape}"
            )
        gram = np.conj(b) @ b.T
        if qmat.frobenius_distance(gram, np.eye(b.shape[0])) > qmat.tolerance() * b.shape[0]:
            raise ValueError("basis rows are not orthonormal")
        self.basis = b
        self.strength = float(self.strength)
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError(f"strength must lie in [0, 1], got {self.strength}")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


@dataclass(eq=False)
class NaimarkDilation:
    """Ancilla-extended projective realization of a POVM."""

    ancilla_dim: int
    joint: ProjectiveMeasurement
    embed: np.ndarray  # isometry from the system space into the joint space


def apply_nonselective(channel: KrausChannel, rho, tol: float | None = None) -> np.ndarray:
    """Apply a trace-preserving channel: rho -> sum_k K rho K^dag."""
    t = _tol(tol)
    rho = qmat.require_density(rho, t)
    if rho.shape[0] != channel.d_in:
        raise DimensionMismatchError(
            f"state dim {rho.shape[0]} does not match channel input dim {channel.d_in}"
        )
    if not channel.is_trace_preserving(t):
        raise ValueError("channel is not trace preserving (selective operation)")
    out = np.zeros((channel.d_out, channel.d_out), dtype=complex)
    for k in channel.kraus_ops:
        out += k @ rho @ dagger(k)
    return out


def apply_selective(p, rho, tol: float | None = None) -> tuple[float, np.ndarray | None]:
    """Yes-outcome update for an idempotent projector.

    Returns (probability, post_state); the post state is None when the
    outcome probability is below tolerance.
    """
    t = _tol(tol)
    p = qmat.require_hermitian(p, t)
    if qmat.frobenius_distance(p @ p, p) > t * p.shape[0]:
        raise ValueError("selective operation requires an idempotent projector")
    rho = qmat.require_density(rho, t)
    if rho.shape != p.shape:
        raise DimensionMismatchError(
            f"state dim {rho.shape[0]} does not match projector dim {p.shape[0]}"
        )
    prob = float(np.real(np.trace(p @ rho)))
    if prob <= t:
        return max(prob, 0.0), None
    post = p @ rho @ p / prob
    return prob, post


def _psd_sqrt(e: np.ndarray) -> np.ndarray:
    w, v = qmat.eigh(e)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dagger(v)


def dilate_povm(m, tol: float | None = None) -> NaimarkDilation:
    """Dilate a POVM to a projective measurement on system x ancilla.

    The isometry stacks the square roots of the effects, so a state rho embeds
    as V rho V^dag on a space of dimension d * n_outcomes, where ancilla index i
    carries outcome i. A measurement that is already projective is returned
    unchanged with a trivial ancilla.
    """
    t = _tol(tol)
    if isinstance(m, ProjectiveMeasurement):
        return NaimarkDilation(1, m, np.eye(m.dim, dtype=complex))
    if not isinstance(m, GeneralizedMeasurement):
        m = GeneralizedMeasurement(tuple(m))
    if m.is_projective(t):
        return NaimarkDilation(1, ProjectiveMeasurement(m.effects), np.eye(m.dim, dtype=complex))
    d, n = m.dim, m.n_outcomes
    embed = np.vstack([_psd_sqrt(e) for e in m.effects])  # shape (n*d, d), ancilla major
    joint = []
    for i in range(n):
        block = np.zeros((n * d, n * d), dtype=complex)
        block[i * d : (i + 1) * d, i * d : (i + 1) * d] = np.eye(d)
        joint.append(block)
    return NaimarkDilation(n, ProjectiveMeasurement(tuple(joint)), embed)


def dephase(channel: DephasingChannel, rho, tol: float | None = None) -> np.ndarray:
    """Apply basis dephasing: diagonal entries kept, off-diagonals scaled by (1 - strength)."""
    rho = qmat.require_density(rho, _tol(tol))
    if rho.shape[0] != channel.dim:
        raise DimensionMismatchError(
            f"state dim {rho.shape[0]} does not match channel dim {channel.dim}"
        )
    if channel.strength == 0.0:
        return rho.copy()
    b = channel.basis
    in_basis = np.conj(b) @ rho @ b.T
    damp = np.full(in_basis.shape, 1.0 - channel.strength)
    np.fill_diagonal(damp, 1.0)
    return b.T @ (in_basis * damp) @ np.conj(b)


def _effects_of(m) -> tuple[np.ndarray, ...]:
    if isinstance(m, (ProjectiveMeasurement, GeneralizedMeasurement)):
        return m.effects
    raise TypeError(f"expected a measurement, got {type(m).__name__}")


def outcome_probabilities(m, rho) -> np.ndarray:
    """Born probabilities trace(E_i rho) for every effect."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([float(np.real(np.trace(e @ rho))) for e in _effects_of(m)])


def sample_outcome(m, rho, rng_seed: int, tol: float | None = None) -> tuple[int, np.ndarray]:
    """Draw one outcome with Born probabilities and return its post-measurement state.

    The generator is numpy's default PCG64 seeded with `rng_seed`; a fixed
    seed reproduces the identical outcome on every run. The post state is
    the Luders update sqrt(E) rho sqrt(E) / p (for projectors, P rho P / p),
    which is what the Naimark dilation's projective update reduces to after
    the ancilla is traced out.
    """
    t = _tol(tol)
    rho = qmat.require_density(rho, t)
    effects = _effects_of(m)
    if rho.shape[0] != effects[0].shape[0]:
        raise DimensionMismatchError(
            f"state dim {rho.shape[0]} does not match measurement dim {effects[0].shape[0]}"
        )
    probs = outcome_probabilities(m, rho)
    total = float(probs.sum())
    if abs(total - 1.0) > max(t, 1e-12) * len(effects):
        raise ValueError(f"outcome probabilities sum to {total}, not 1")
    rng = np.random.default_rng(rng_seed)
    draw = rng.random() * total
    index = int(np.searchsorted(np.cumsum(probs), draw, side="right"))
    index = min(index, len(effects) - 1)
    e = effects[index]
    p = probs[index]
    if p <= t:
        # zero-probability branch cannot be drawn except by rounding; renormalize defensively
        raise ValueError(f"drawn outcome {index} has vanishing probability {p}")
    if isinstance(m, ProjectiveMeasurement):
        post = e @ rho @ dagger(e) / p
    else:
        root = _psd_sqrt(e)
        post = root @ rho @ root / p
    return index, post


def unitary_channel(u) -> KrausChannel:
    """Nonselective channel rho -> U rho U^dag."""
    u = qmat.as_complex_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise DimensionMismatchError("unitary must be square")
    if qmat.frobenius_distance(dagger(u) @ u, np.eye(u.shape[0])) > qmat.tolerance() * u.shape[0]:
        raise ValueError("matrix is not unitary")
    return KrausChannel((u,))


def luders_channel(m: ProjectiveMeasurement) -> KrausChannel:
    """Nonselective measurement channel rho -> sum_i P_i rho P_i."""
    return KrausChannel(tuple(m.projectors))
