"""Physics backends and the three-constraint scenario battery.

A World decides what separation does to a shared pair: nothing (quantum),
basis dephasing of a given strength in the pair's biorthogonal product basis
(dephased), or forced diagonality in the fixed computational product basis
(classical). `evaluate_constraints` runs a fixed seeded battery of signaling,
broadcasting, and bit-commitment scenarios in a world and reports which of the
three constraints hold there, each with its concrete witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat
from .algebra import BlockAlgebra, broadcast_check, classical_broadcaster
from .channels import DephasingChannel, KrausChannel, dephase
from .entangle import BipartiteState, purify
from .protocols import (
    CommitmentScheme,
    EprAttack,
    Honest,
    bb84_scheme,
    classical_scheme,
    classical_unique_decomposition,
    no_signaling_trial,
    run_commitment,
)

_WORLD_KINDS = ("classical", "quantum", "dephased")

# threshold separating a numerically-zero witness from a genuine violation
_REPORT_EDGE = 1e-10


@dataclass(frozen=True)
class World:
    """Physics backend tag: classical, quantum, or dephased with a strength."""

    kind: str
    strength: float = 0.0

    def __post_init__(self):
        if self.kind not in _WORLD_KINDS:
            raise ValueError(f"unknown world kind {self.kind!r}; expected one of {_WORLD_KINDS}")
        s = float(self.strength)
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"dephasing strength must lie in [0, 1], got {s}")
        if self.kind != "dephased" and s != 0.0:
            raise ValueError(f"{self.kind} world takes no dephasing strength")
        object.__setattr__(self, "strength", s)

    @classmethod
    def quantum(cls) -> "World":
        return cls("quantum")

    @classmethod
    def classical(cls) -> "World":
        return cls("classical")

    @classmethod
    def dephased(cls, strength: float) -> "World":
        return cls("dephased", strength)

    def separation_basis(self, state: BipartiteState) -> np.ndarray:
        """Product basis rows (A eigenbasis x B eigenbasis) used for dephasing.

        For a pure state this is its Schmidt product basis; for mixed states the
        marginal eigenbases are used, with degeneracies resolved by the
        deterministic eigendecomposition ordering.
        """
        _, va = qmat.eigh(state.marginal_a())
        _, vb = qmat.eigh(state.marginal_b())
        rows_a, rows_b = va.T, vb.T
        return np.array([np.kron(a, b) for a in rows_a for b in rows_b])

    def separate(self, state: BipartiteState) -> BipartiteState:
        """Transform a shared pair as the world's separation process dictates.

        Quantum: unchanged. Dephased: off-diagonals in the separation basis are
        damped by (1 - strength); both marginals survive exactly. Classical:
        full dephasing in the computational product basis.
        """
        if self.kind == "quantum":
            return state
        if self.kind == "dephased":
            if self.strength == 0.0:
                return state
            channel = DephasingChannel(self.separation_basis(state), self.strength)
            return BipartiteState(dephase(channel, state.rho), state.dims)
        return BipartiteState(np.diag(np.diag(state.rho)), state.dims)

    def transmit(self, rho: np.ndarray) -> np.ndarray:
        """Transform a lone state handed from one party to the other.

        Separation dephasing erases phase relations *between* subsystems; a
        lone state has none (dephasing in its own eigenbasis fixes it), so the
        quantum and dephased worlds pass it through. The classical world forces
        diagonality in the computational basis.
        """
        rho = qmat.require_density(rho)
        if self.kind == "classical":
            return np.diag(np.diag(rho))
        return rho


@dataclass(frozen=True)
class ConstraintReport:
    """Outcome of the battery: one verdict plus witness per constraint."""

    signaling_possible: bool
    signaling_witness: dict
    broadcasting_possible: bool
    broadcasting_witness: dict
    steering_attack_succeeds: bool
    steering_witness: dict

    def to_dict(self) -> dict:
        return {
            "signaling": {"possible": self.signaling_possible, **self.signaling_witness},
            "broadcasting": {"possible": self.broadcasting_possible, **self.broadcasting_witness},
            "steering_attack": {"succeeds": self.steering_attack_succeeds, **self.steering_witness},
        }


def _random_density(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = z @ np.conj(z).T
    return m / float(np.trace(m).real)


def _random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    ph = np.diag(r).copy()
    ph = ph / np.abs(ph)
    return q * ph


def _random_channel(rng: np.random.Generator, d: int, n_kraus: int) -> KrausChannel:
    z = rng.normal(size=(d * n_kraus, d)) + 1j * rng.normal(size=(d * n_kraus, d))
    q, _ = np.linalg.qr(z)
    return KrausChannel(tuple(q[i * d : (i + 1) * d, :] for i in range(n_kraus)))


def _commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    return qmat.frobenius_distance(a @ b, b @ a)


def _signaling_battery(world: World, rng: np.random.Generator) -> tuple[bool, dict]:
    max_dist = 0.0
    trials = 0
    for dims in ((2, 2), (2, 3)):
        for _ in range(10):
            rho = _random_density(rng, dims[0] * dims[1])
            state = world.separate(BipartiteState(rho, dims))
            channel = _random_channel(rng, dims[0], int(rng.integers(1, 4)))
            max_dist = max(max_dist, no_signaling_trial(state, channel))
            trials += 1
    witness = {"trials": trials, "max_marginal_distance": max_dist, "dims": [[2, 2], [2, 3]]}
    return max_dist > _REPORT_EDGE, witness


def _broadcasting_battery(world: World, rng: np.random.Generator) -> tuple[bool, dict]:
    d = 2
    results_ok = []
    commuting_max = 0.0
    if world.kind == "classical":
        basis = np.eye(d, dtype=complex)
        channel = classical_broadcaster(basis)
        for _ in range(10):
            w = rng.dirichlet(np.ones(d))
            check = broadcast_check(channel, np.diag(w).astype(complex))
            results_ok.append(check.ok)
            commuting_max = max(commuting_max, check.deviation)
        witness = {
            "pairs": 10,
            "state_family": "diagonal (all commuting)",
            "max_deviation": commuting_max,
        }
        return all(results_ok), witness

    noncommuting_min = np.inf
    failures = 0
    for _ in range(5):
        u = _random_unitary(rng, d)
        channel = classical_broadcaster(u.T)
        for _ in range(2):
            w = rng.dirichlet(np.ones(d))
            rho = u @ np.diag(w).astype(complex) @ np.conj(u).T
            check = broadcast_check(channel, rho)
            results_ok.append(check.ok)
            commuting_max = max(commuting_max, check.deviation)
    tested = 0
    while tested < 5:
        rho = _random_density(rng, d)
        sigma = _random_density(rng, d)
        if _commutator_norm(rho, sigma) <= 0.1:
            continue
        tested += 1
        _, v = qmat.eigh(rho)
        channel = classical_broadcaster(v.T)
        check_rho = broadcast_check(channel, rho)
        check_sigma = broadcast_check(channel, sigma)
        pair_ok = check_rho.ok and check_sigma.ok
        results_ok.append(pair_ok)
        if not pair_ok:
            failures += 1
            noncommuting_min = min(noncommuting_min, max(check_rho.deviation, check_sigma.deviation))
    witness = {
        "commuting_pairs": 10,
        "commuting_max_deviation": commuting_max,
        "noncommuting_pairs": 5,
        "noncommuting_failures": failures,
        "noncommuting_min_deviation": float(noncommuting_min),
    }
    return all(results_ok), witness


def _complex_rows(mat: np.ndarray, digits: int = 12) -> list:
    return [
        [[round(float(z.real), digits), round(float(z.imag), digits)] for z in row]
        for row in np.asarray(mat, dtype=complex)
    ]


def _commitment_battery(world: World, rng: np.random.Generator) -> tuple[bool, dict]:
    # honest runs need a scheme whose members the world can carry intact;
    # the EPR attack targets the reference BB84-style scheme in every world
    honest_scheme: CommitmentScheme = (
        classical_scheme() if world.kind == "classical" else bb84_scheme()
    )
    attack_scheme = bb84_scheme()
    honest = []
    for bit in (0, 1):
        t = run_commitment(honest_scheme, Honest(bit), world, rng_seed=int(rng.integers(2**63)))
        honest.append(t.acceptance_probability)
    attack = []
    for bit in (0, 1):
        t = run_commitment(attack_scheme, EprAttack(bit), world, rng_seed=int(rng.integers(2**63)))
        attack.append(t.acceptance_probability)
    min_acceptance = min(attack)
    succeeds = min_acceptance >= 1.0 - _REPORT_EDGE
    witness = {
        "attack_scheme": "bb84",
        "honest_scheme": "classical" if world.kind == "classical" else "bb84",
        "honest_acceptance": honest,
        "acceptance_by_bit": attack,
        "min_acceptance": min_acceptance,
    }
    if world.kind == "classical":
        algebra = BlockAlgebra((1,) * honest_scheme.dim)
        witness["unique_decomposition_identical"] = bool(
            classical_unique_decomposition(
                honest_scheme.ensemble_0, honest_scheme.ensemble_1, algebra
            )
        )
    if world.kind == "dephased" and world.strength > 0.0:
        omega = attack_scheme.average()
        state = BipartiteState(
            qmat.projector(purify(omega, attack_scheme.dim)),
            (attack_scheme.dim, attack_scheme.dim),
        )
        witness["dephasing_basis"] = _complex_rows(world.separation_basis(state))
    return succeeds, witness


def evaluate_constraints(world: World, rng_seed: int = 7) -> ConstraintReport:
    """Run the fixed battery in one world and report the three constraints.

    The battery: (a) a no-signaling sweep over seeded random states and
    nonselective local channels, (b) broadcast checks with the classical
    broadcaster over commuting and (outside the classical world) non-commuting
    pairs, and (c) honest and EPR-attack commitment runs on the world's
    reference scheme. The report carries no world tag, so two worlds whose
    physics agree produce equal reports.
    """
    rng = np.random.default_rng(rng_seed)
    signaling_possible, signaling_witness = _signaling_battery(world, rng)
    broadcasting_possible, broadcasting_witness = _broadcasting_battery(world, rng)
    attack_succeeds, steering_witness = _commitment_battery(world, rng)
    return ConstraintReport(
        signaling_possible=signaling_possible,
        signaling_witness=signaling_witness,
        broadcasting_possible=broadcasting_possible,
        broadcasting_witness=broadcasting_witness,
        steering_attack_succeeds=attack_succeeds,
        steering_witness=steering_witness,
    )
