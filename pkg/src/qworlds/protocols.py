"""Two-party bit-commitment runs, concealment checks, and locality trials.

A commitment scheme encodes the bits 0 and 1 as two pure-state ensembles over
Bob's space. Honest Alice samples a member and sends it; a cheating Alice
keeps half of an entangled pair whose Bob marginal matches the scheme average
and steers Bob's side into whichever ensemble she wants at unveiling. Bob
verifies an opened claim with the two-outcome projective test onto the claimed
member, which makes honest acceptance exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import qmat
from .algebra import BlockAlgebra, is_commutative
from .channels import KrausChannel
from .entangle import (
    AverageMismatchError,
    BipartiteState,
    Ensemble,
    hjw_steering_measurement,
    purify,
    pure_vector,
)
from .qmat import DimensionMismatchError, dagger


def _tol(tol):
    return qmat.tolerance() if tol is None else float(tol)


@dataclass(eq=False)
class CommitmentScheme:
    """Bit encodings: one pure-state ensemble per bit, over Bob's space."""

    ensemble_0: Ensemble
    ensemble_1: Ensemble

    def __post_init__(self):
        if self.ensemble_0.dim != self.ensemble_1.dim:
            raise DimensionMismatchError("both ensembles must live on Bob's space")
        for bit, ens in ((0, self.ensemble_0), (1, self.ensemble_1)):
            for i, member in enumerate(ens.members):
                pure_vector(member)  # raises if not rank 1

    @property
    def dim(self) -> int:
        return self.ensemble_0.dim

    def ensemble(self, bit: int) -> Ensemble:
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit}")
        return self.ensemble_0 if bit == 0 else self.ensemble_1

    def average(self) -> np.ndarray:
        """The shared pre-open density operator when the scheme conceals."""
        return self.ensemble_0.average()

    def is_concealing(self, tol: float | None = None) -> bool:
        gap = qmat.frobenius_distance(self.ensemble_0.average(), self.ensemble_1.average())
        return gap <= _tol(tol) * self.dim


def bb84_scheme() -> CommitmentScheme:
    """Qubit scheme: bit 0 as the uniform z-basis mixture, bit 1 as the x-basis one."""
    s = 1.0 / np.sqrt(2.0)
    z0, z1 = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    xp, xm = np.array([s, s], dtype=complex), np.array([s, -s], dtype=complex)
    return CommitmentScheme(
        Ensemble.from_pure_states([0.5, 0.5], [z0, z1]),
        Ensemble.from_pure_states([0.5, 0.5], [xp, xm]),
    )


def classical_scheme() -> CommitmentScheme:
    """Diagonal qubit scheme; both bits induce the same point distribution."""
    z0, z1 = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    return CommitmentScheme(
        Ensemble.from_pure_states([0.5, 0.5], [z0, z1]),
        Ensemble.from_pure_states([0.5, 0.5], [z1, z0]),
    )


@dataclass(frozen=True)
class Honest:
    """Follow the protocol for a fixed bit."""

    bit: int


@dataclass(frozen=True)
class EprAttack:
    """Commit to nothing, choose the bit at unveiling via remote steering."""

    unveil_bit: int


@dataclass(eq=False)
class ProtocolTranscript:
    """Phase-ordered record of one commitment run."""

    rng_seed: int
    commit_description: str
    opened_bit: int | None = None
    opened_index: int | None = None
    accept: bool | None = None
    acceptance_probability: float | None = None

    def __post_init__(self):
        opened = self.opened_bit is not None
        verified = self.accept is not None
        if opened != verified:
            raise ValueError("verify record must be present exactly when open is")
        if opened and self.opened_index is None:
            raise ValueError("open record needs a claimed index")
        if verified and self.acceptance_probability is None:
            raise ValueError("verify record needs its acceptance probability")

    def phases(self) -> tuple[str, ...]:
        names = ["commit", "hold"]
        if self.opened_bit is not None:
            names += ["open", "verify"]
        return tuple(names)

    def to_dict(self) -> dict:
        out: dict = {
            "phases": list(self.phases()),
            "rng_seed": int(self.rng_seed),
            "commit": {"description": self.commit_description},
        }
        if self.opened_bit is not None:
            out["open"] = {"bit": int(self.opened_bit), "index": int(self.opened_index)}
            out["verify"] = {
                "accept": bool(self.accept),
                "acceptance_probability": float(self.acceptance_probability),
            }
        return out


class ConcealmentCheck(NamedTuple):
    concealed: bool
    distance: float


def concealment_check(scheme: CommitmentScheme, world, tol: float | None = None) -> ConcealmentCheck:
    """Compare Bob's pre-open density operators for the two bits in a world."""
    t = _tol(tol)
    omega_0 = world.transmit(scheme.ensemble_0.average())
    omega_1 = world.transmit(scheme.ensemble_1.average())
    distance = qmat.frobenius_distance(omega_0, omega_1)
    return ConcealmentCheck(distance <= t * scheme.dim, distance)


def _steered_branches(state: BipartiteState, measurement) -> list[tuple[float, np.ndarray | None]]:
    """Per-effect outcome probability and Bob conditional, preserving indices."""
    da, db = state.dims
    eye_b = np.eye(db, dtype=complex)
    branches = []
    for e in measurement.effects:
        joint = np.kron(e, eye_b) @ state.rho
        p = float(np.real(np.trace(joint)))
        if p <= qmat.tolerance():
            branches.append((max(p, 0.0), None))
            continue
        cond = qmat.partial_trace(joint, (da, db), "B") / p
        branches.append((p, (cond + dagger(cond)) / 2.0))
    return branches


def run_commitment(scheme: CommitmentScheme, strategy, world, rng_seed: int) -> ProtocolTranscript:
    """Execute one commitment round and return its transcript.

    Honest(bit): Alice samples a member of that bit's ensemble and sends it
    through the world; at opening she reveals (bit, index) and Bob applies the
    projective test onto the claimed member. EprAttack(unveil_bit): Alice
    instead sends Bob half of a purification of the scheme average, and at
    opening measures her half with the steering measurement for the chosen
    ensemble, revealing the observed index. The acceptance probability is the
    exact Born value; `accept` is its seeded sample.
    """
    t = qmat.tolerance()
    if not scheme.is_concealing(t):
        raise ValueError("scheme violates concealment: ensemble averages differ")
    rng = np.random.default_rng(rng_seed)

    if isinstance(strategy, Honest):
        ens = scheme.ensemble(strategy.bit)
        index = int(rng.choice(len(ens.members), p=ens.probabilities / ens.probabilities.sum()))
        member = ens.members[index]
        received = world.transmit(member)
        acceptance = float(np.real(np.trace(member @ received)))
        accept = bool(rng.random() < acceptance)
        return ProtocolTranscript(
            rng_seed=rng_seed,
            commit_description=f"honest pure member on dim {scheme.dim}",
            opened_bit=strategy.bit,
            opened_index=index,
            accept=accept,
            acceptance_probability=acceptance,
        )

    if isinstance(strategy, EprAttack):
        omega = scheme.average()
        d = scheme.dim
        psi = purify(omega, d)
        separated = world.separate(BipartiteState(qmat.projector(psi), (d, d)))
        target = scheme.ensemble(strategy.unveil_bit)
        gap = qmat.frobenius_distance(target.average(), separated.marginal_b())
        if gap > max(t, 1e-7):
            raise AverageMismatchError(
                f"world transformation moved Bob's marginal off the target average by {gap}"
            )
        measurement = hjw_steering_measurement(psi, (d, d), target)
        branches = _steered_branches(separated, measurement)
        n_targets = len(target.members)
        fidelities = []
        for j, (p, cond) in enumerate(branches):
            if cond is None or j >= n_targets:
                fidelities.append(0.0)
                continue
            claimed = target.members[j]
            fidelities.append(float(np.real(np.trace(claimed @ cond))))
        probs = np.array([p for p, _ in branches])
        acceptance = float(np.dot(probs, fidelities) / probs.sum())
        draw = rng.random() * probs.sum()
        index = int(np.searchsorted(np.cumsum(probs), draw, side="right"))
        index = min(index, len(branches) - 1)
        accept = bool(rng.random() < fidelities[index])
        return ProtocolTranscript(
            rng_seed=rng_seed,
            commit_description=f"purification half on dim {d} (EPR attack)",
            opened_bit=strategy.unveil_bit,
            opened_index=index,
            accept=accept,
            acceptance_probability=acceptance,
        )

    raise TypeError(f"unknown strategy {type(strategy).__name__}")


def point_mass_distribution(ensemble: Ensemble, algebra: BlockAlgebra, tol: float | None = None) -> np.ndarray:
    """Distribution over the algebra's points induced by a point-mass ensemble."""
    t = _tol(tol)
    if not is_commutative(algebra):
        raise ValueError("algebra is not commutative; point distributions are undefined")
    n = algebra.dim
    if ensemble.dim != n:
        raise DimensionMismatchError(
            f"ensemble dim {ensemble.dim} does not match algebra with {n} points"
        )
    dist = np.zeros(n)
    for p, member in zip(ensemble.probabilities, ensemble.members):
        diag = np.real(np.diag(member))
        off = qmat.frobenius_distance(member - np.diag(np.diag(member)))
        k = int(np.argmax(diag))
        if off > t * n or abs(diag[k] - 1.0) > max(t, 1e-9):
            raise ValueError("ensemble member is not a point mass of the commutative algebra")
        dist[k] += p
    return dist


def classical_unique_decomposition(
    ensemble_0: Ensemble,
    ensemble_1: Ensemble,
    algebra: BlockAlgebra,
    tol: float | None = None,
) -> bool:
    """True iff two classical pure-state ensembles induce one point distribution.

    On a commutative algebra the average of a point-mass ensemble *is* its
    distribution, so equal averages leave Bob nothing that distinguishes the
    two commitments: perfectly concealing classical encodings carry no binding
    information.
    """
    t = _tol(tol)
    d0 = point_mass_distribution(ensemble_0, algebra, t)
    d1 = point_mass_distribution(ensemble_1, algebra, t)
    return float(np.max(np.abs(d0 - d1))) <= max(t, 1e-10)


def no_signaling_trial(state: BipartiteState, local_op: KrausChannel, tol: float | None = None) -> float:
    """Distance between Bob's marginal before and after a nonselective op on A.

    Selective (trace-decreasing) channels are rejected: conditioning on an
    outcome changes the sampled ensemble and is not a locality violation.
    """
    t = _tol(tol)
    da, db = state.dims
    if local_op.d_in != da or local_op.d_out != da:
        raise DimensionMismatchError(
            f"local channel must act on dim {da}, got {local_op.d_in} -> {local_op.d_out}"
        )
    if not local_op.is_trace_preserving(t):
        raise ValueError("selective channel rejected: no-signaling holds for nonselective operations")
    before = state.marginal_b()
    eye_b = np.eye(db, dtype=complex)
    after_joint = np.zeros_like(state.rho)
    for k in local_op.kraus_ops:
        kk = np.kron(k, eye_b)
        after_joint += kk @ state.rho @ dagger(kk)
    after = qmat.partial_trace(after_joint, (da, db), "B")
    return qmat.frobenius_distance(before, after)


def selective_steering_contrast(state: BipartiteState, measurement, tol: float | None = None) -> float:
    """Largest Frobenius distance of any steered conditional from Bob's marginal."""
    marginal = state.marginal_b()
    contrast = 0.0
    for p, cond in _steered_branches(state, measurement):
        if cond is None:
            continue
        contrast = max(contrast, qmat.frobenius_distance(cond, marginal))
    return contrast
