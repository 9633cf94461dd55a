"""Bipartite states: Schmidt data, purification, remote steering, teleportation.

Vector comparisons in this module are global-phase blind (fidelity based),
because measurement branches pick up outcome-dependent signs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat
from .channels import GeneralizedMeasurement, ProjectiveMeasurement
from .qmat import DimensionMismatchError, dagger

_RANK_CUTOFF = 1e-12  # spectral weight below which a branch counts as absent


def _tol(tol):
    return qmat.tolerance() if tol is None else float(tol)


class AverageMismatchError(ValueError):
    """Target ensemble does not average to the steered side's marginal."""


class UnsupportedTargetError(ValueError):
    """Target state lies outside the support of the reduced density operator."""


@dataclass(eq=False)
class BipartiteState:
    """Density operator on a two-factor space with dims (dA, dB), A index major."""

    rho: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        da, db = int(self.dims[0]), int(self.dims[1])
        rho = qmat.require_density(self.rho)
        if rho.shape != (da * db, da * db):
            raise DimensionMismatchError(
                f"state of shape {rho.shape} does not match dims {da}x{db}"
            )
        self.rho = rho
        self.dims = (da, db)

    def marginal_a(self) -> np.ndarray:
        return qmat.partial_trace(self.rho, self.dims, "A")

    def marginal_b(self) -> np.ndarray:
        return qmat.partial_trace(self.rho, self.dims, "B")

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


@dataclass(eq=False)
class SchmidtDecomposition:
    """Biorthogonal expansion data: psi = sum_k c_k |a_k> |b_k|>.

    Coefficients are the nonnegative square roots of the marginal eigenvalues,
    sorted descending; a_basis and b_basis hold the paired vectors as rows.
    """

    coefficients: np.ndarray
    a_basis: np.ndarray
    b_basis: np.ndarray

    def __post_init__(self):
        t = qmat.tolerance()
        c = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if c.size == 0:
            raise ValueError("empty Schmidt decomposition")
        if float(c.min()) < -t or np.any(np.diff(c) > t):
            raise ValueError("coefficients must be nonnegative and descending")
        if abs(float(np.sum(c**2)) - 1.0) > t:
            raise ValueError(f"squared coefficients sum to {float(np.sum(c ** 2))}, not 1")
        a = np.asarray(self.a_basis, dtype=complex)
        b = np.asarray(self.b_basis, dtype=complex)
        for name, basis in (("a_basis", a), ("b_basis", b)):
            gram = np.conj(basis) @ basis.T
            if qmat.frobenius_distance(gram, np.eye(basis.shape[0])) > t * basis.shape[0]:
                raise ValueError(f"{name} rows are not orthonormal")
        self.coefficients, self.a_basis, self.b_basis = c, a, b

    @property
    def rank(self) -> int:
        return self.coefficients.size

    def vector(self) -> np.ndarray:
        """Reassemble the decomposed vector."""
        return sum(
            c * np.kron(a, b)
            for c, a, b in zip(self.coefficients, self.a_basis, self.b_basis)
        )


@dataclass(eq=False)
class Ensemble:
    """Probability-weighted mixture of density operators of one dimension."""

    probabilities: np.ndarray
    members: tuple[np.ndarray, ...]

    def __post_init__(self):
        t = qmat.tolerance()
        p = np.asarray(self.probabilities, dtype=float).reshape(-1)
        if p.size != len(self.members):
            raise DimensionMismatchError("one probability per member is required")
        if p.size == 0:
            raise ValueError("empty ensemble")
        if float(p.min()) < -t:
            raise ValueError(f"negative probability {float(p.min())}")
        if abs(float(p.sum()) - 1.0) > max(t, 1e-12 * p.size):
            raise ValueError(f"probabilities sum to {float(p.sum())}, not 1")
        members = tuple(qmat.require_density(m, t) for m in self.members)
        dim = members[0].shape[0]
        if any(m.shape != (dim, dim) for m in members):
            raise DimensionMismatchError("ensemble members must share one dimension")
        self.probabilities, self.members = p, members

    @classmethod
    def from_pure_states(cls, probabilities, vectors) -> "Ensemble":
        return cls(
            np.asarray(probabilities, dtype=float),
            tuple(qmat.projector(qmat.as_unit_vector(v)) for v in vectors),
        )

    @property
    def dim(self) -> int:
        return self.members[0].shape[0]

    def average(self) -> np.ndarray:
        return sum(p * m for p, m in zip(self.probabilities, self.members))


@dataclass(frozen=True)
class SteeringExampleConfig:
    """Real amplitudes (alpha, beta) with alpha^2 + beta^2 = 1."""

    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if abs(a * a + b * b - 1.0) > qmat.tolerance():
            raise ValueError(f"alpha^2 + beta^2 = {a * a + b * b}, not 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)


def steering_states(config: SteeringExampleConfig) -> list[np.ndarray]:
    """The four nonorthogonal qubit states whose uniform mixture is I/2."""
    a, b = config.alpha, config.beta
    return [
        np.array([a, b], dtype=complex),
        np.array([a, -b], dtype=complex),
        np.array([b, a], dtype=complex),
        np.array([b, -a], dtype=complex),
    ]


def four_state_ensemble(config: SteeringExampleConfig) -> Ensemble:
    return Ensemble.from_pure_states([0.25] * 4, steering_states(config))


def bell_basis() -> list[np.ndarray]:
    """The four maximally entangled two-qubit vectors, singlet first."""
    s = 1.0 / np.sqrt(2.0)
    return [
        np.array([0, s, -s, 0], dtype=complex),
        np.array([0, s, s, 0], dtype=complex),
        np.array([s, 0, 0, -s], dtype=complex),
        np.array([s, 0, 0, s], dtype=complex),
    ]


def bell_measurement() -> ProjectiveMeasurement:
    return ProjectiveMeasurement(tuple(qmat.projector(v) for v in bell_basis()))


def singlet_vector() -> np.ndarray:
    s = 1.0 / np.sqrt(2.0)
    return np.array([0, s, -s, 0], dtype=complex)


def epr_singlet() -> BipartiteState:
    """Projector onto (|01> - |10>)/sqrt(2) as a 2x2 bipartite state."""
    return BipartiteState(qmat.projector(singlet_vector()), (2, 2))


def schmidt(psi, dims: tuple[int, int], tol: float | None = None) -> SchmidtDecomposition:
    """Schmidt (biorthogonal) decomposition of a bipartite unit vector.

    Coefficients below the rank cutoff are dropped, so the returned rank equals
    the rank of either marginal. Pair phases are fixed deterministically by
    making the largest component of each a-vector real nonnegative.
    """
    t = _tol(tol)
    psi = qmat.as_unit_vector(psi, t)
    da, db = int(dims[0]), int(dims[1])
    if psi.size != da * db:
        raise DimensionMismatchError(f"vector of size {psi.size} does not match dims {da}x{db}")
    m = psi.reshape(da, db)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    keep = s > _RANK_CUTOFF
    s = s[keep]
    a_rows = u.T[keep]
    b_rows = vh[keep]
    for k in range(s.size):
        idx = int(np.argmax(np.abs(a_rows[k])))
        ph = a_rows[k][idx]
        if abs(ph) > 0.0:
            ph = ph / abs(ph)
            a_rows[k] = a_rows[k] * np.conj(ph)
            b_rows[k] = b_rows[k] * ph
    dec = SchmidtDecomposition(s, a_rows, b_rows)
    if not qmat.vectors_match(dec.vector(), psi, t):
        raise RuntimeError("Schmidt reconstruction failed to match the input vector")
    return dec


def purify(rho, ancilla_dim: int, tol: float | None = None) -> np.ndarray:
    """Canonical purification of `rho` as a unit vector on ancilla x system.

    Built from the eigendecomposition: sum_k sqrt(l_k) |k>_anc |v_k>; requires
    the ancilla dimension to be at least the rank of rho.
    """
    t = _tol(tol)
    rho = qmat.require_density(rho, t)
    w, v = qmat.eigh(rho, t)
    w = np.clip(w, 0.0, None)
    rank = int(np.sum(w > _RANK_CUTOFF))
    ancilla_dim = int(ancilla_dim)
    if ancilla_dim < rank:
        raise ValueError(f"ancilla dim {ancilla_dim} is below the state rank {rank}")
    d = rho.shape[0]
    psi = np.zeros(ancilla_dim * d, dtype=complex)
    for k in range(rank):
        anc = np.zeros(ancilla_dim, dtype=complex)
        anc[k] = 1.0
        psi += np.sqrt(w[k]) * np.kron(anc, v[:, k])
    return psi / np.linalg.norm(psi)


def pure_vector(rho, tol: float | None = None) -> np.ndarray:
    """Extract the state vector of a rank-1 density operator."""
    t = _tol(tol)
    rho = qmat.require_density(rho, t)
    w, v = qmat.eigh(rho, t)
    if abs(float(w[0]) - 1.0) > max(t, 1e-8):
        raise ValueError(f"state is not pure: top eigenvalue {float(w[0])}")
    return v[:, 0]


def hjw_steering_measurement(
    purification, dims: tuple[int, int], target: Ensemble, tol: float | None = None
) -> GeneralizedMeasurement:
    """Measurement on side A that steers side B into the target ensemble.

    Given a bipartite unit vector whose B marginal equals the target average,
    returns effects E_i on A such that outcome i occurs with probability p_i
    and leaves B in the i-th target member. Effects are built from the Schmidt
    data, one rank-1 effect per target member (linearly independent targets of
    full count make them orthogonal projectors); a final complement effect is
    appended when the A-side support does not exhaust the space, and it never
    fires on the purification itself.

    Raises AverageMismatchError when the target average differs from the
    B marginal, and UnsupportedTargetError when a member leaves the support
    of the reduced density operator.
    """
    t = _tol(tol)
    psi = qmat.as_unit_vector(purification, t)
    da, db = int(dims[0]), int(dims[1])
    if psi.size != da * db:
        raise DimensionMismatchError(f"vector of size {psi.size} does not match dims {da}x{db}")
    if target.dim != db:
        raise DimensionMismatchError(
            f"target members have dim {target.dim}, steered side has dim {db}"
        )
    marginal_b = qmat.partial_trace(qmat.projector(psi), (da, db), "B")
    gap = qmat.frobenius_distance(target.average(), marginal_b)
    if gap > max(t, 1e-7):
        raise AverageMismatchError(
            f"target ensemble average deviates from the B marginal by {gap}"
        )
    dec = schmidt(psi, (da, db), t)
    coeffs = dec.coefficients
    support = sum(qmat.projector(b) for b in dec.b_basis)
    effects = []
    for i, (p, member) in enumerate(zip(target.probabilities, target.members)):
        tvec = pure_vector(member, t)
        residual = float(np.real(np.vdot(tvec, tvec) - np.vdot(tvec, support @ tvec)))
        if residual > max(t, 1e-9):
            raise UnsupportedTargetError(
                f"target member {i} lies outside the marginal support (residual {residual})"
            )
        overlaps = np.conj(dec.b_basis) @ tvec  # <b_k|t_i>
        d_k = np.sqrt(p) * overlaps / coeffs
        alpha = np.conj(d_k) @ dec.a_basis
        effects.append(qmat.projector(alpha))
    total = sum(effects)
    remainder = np.eye(da, dtype=complex) - total
    if qmat.frobenius_distance(remainder) > t * da:
        effects.append((remainder + dagger(remainder)) / 2.0)
    return GeneralizedMeasurement(tuple(effects))


def steer(state: BipartiteState, measurement, tol: float | None = None) -> Ensemble:
    """Apply a measurement on side A and collect Bob's conditional states.

    Outcome i occurs with p_i = trace((E_i x I) rho) and leaves B in
    Tr_A[(E_i x I) rho] / p_i. Branches with probability below tolerance are
    dropped and the remaining probabilities renormalized.
    """
    t = _tol(tol)
    effects = measurement.effects
    da, db = state.dims
    if effects[0].shape[0] != da:
        raise DimensionMismatchError(
            f"measurement dim {effects[0].shape[0]} does not match side A dim {da}"
        )
    probs, members = [], []
    eye_b = np.eye(db, dtype=complex)
    for e in effects:
        joint = np.kron(e, eye_b) @ state.rho
        p = float(np.real(np.trace(joint)))
        if p <= t:
            continue
        cond = qmat.partial_trace(joint, (da, db), "B") / p
        cond = (cond + dagger(cond)) / 2.0
        probs.append(p)
        members.append(cond)
    probs = np.asarray(probs, dtype=float)
    return Ensemble(probs / probs.sum(), tuple(members))


@dataclass(frozen=True)
class TeleportResult:
    outcome: int  # 1..4, indexing the Bell basis
    corrected_state: np.ndarray
    fidelity: float


def teleport_corrections() -> tuple[np.ndarray, ...]:
    """Local fix-ups for Bell outcomes 1..4: I, sigma_z, sigma_x, -i sigma_y."""
    return (
        np.eye(2, dtype=complex),
        np.array(qmat.PAULI_Z),
        np.array(qmat.PAULI_X),
        -1j * np.array(qmat.PAULI_Y),
    )


def teleport(
    input_state,
    shared: BipartiteState,
    rng_seed: int = 0,
    force_outcome: int | None = None,
    corrections: tuple[np.ndarray, ...] | None = None,
    tol: float | None = None,
) -> TeleportResult:
    """Teleport a qubit through a shared singlet.

    Measures the (input, A) pair in the Bell basis, applies the outcome's
    correction to B, and reports the fidelity of the corrected state against
    the input. `force_outcome` (1..4) conditions on a specific branch instead
    of sampling; `corrections` may override the canonical fix-up table.
    """
    t = _tol(tol)
    chi = qmat.as_unit_vector(input_state, t)
    if chi.size != 2:
        raise DimensionMismatchError("teleportation input must be a qubit")
    if shared.dims != (2, 2):
        raise DimensionMismatchError(f"shared state must be 2x2 bipartite, got {shared.dims}")
    table = teleport_corrections() if corrections is None else tuple(corrections)
    if len(table) != 4:
        raise ValueError("correction table needs exactly four entries")
    joint = np.kron(qmat.projector(chi), shared.rho)  # order: input, A, B
    eye_b = np.eye(2, dtype=complex)
    branch_projs = [np.kron(qmat.projector(v), eye_b) for v in bell_basis()]
    probs = np.array([float(np.real(np.trace(p @ joint))) for p in branch_projs])
    if force_outcome is not None:
        outcome = int(force_outcome)
        if not 1 <= outcome <= 4:
            raise ValueError(f"force_outcome must be 1..4, got {force_outcome}")
        idx = outcome - 1
        if probs[idx] <= t:
            raise ValueError(f"forced outcome {outcome} has vanishing probability")
    else:
        rng = np.random.default_rng(rng_seed)
        draw = rng.random() * probs.sum()
        idx = int(np.searchsorted(np.cumsum(probs), draw, side="right"))
        idx = min(idx, 3)
    post = branch_projs[idx] @ joint @ branch_projs[idx] / probs[idx]
    bob = qmat.partial_trace(post, (4, 2), "B")
    c = table[idx]
    corrected = c @ bob @ dagger(c)
    fid = qmat.fidelity_to_vector(chi, corrected)
    return TeleportResult(outcome=idx + 1, corrected_state=corrected, fidelity=fid)


def negativity(state: BipartiteState) -> float:
    """Sum of |negative eigenvalues| of the partial transpose; 0 on separable states."""
    da, db = state.dims
    pt = state.rho.reshape(da, db, da, db).transpose(0, 3, 2, 1).reshape(da * db, da * db)
    w = np.linalg.eigvalsh((pt + dagger(pt)) / 2.0)
    return float(-w[w < 0.0].sum())


def spin_observable(theta: float) -> np.ndarray:
    """Spin component along angle theta in the x-z plane: cos(t) Z + sin(t) X."""
    return np.cos(theta) * np.array(qmat.PAULI_Z) + np.sin(theta) * np.array(qmat.PAULI_X)


def correlation(state: BipartiteState, theta_a: float, theta_b: float) -> float:
    """Joint spin-correlation expectation for x-z plane angles on each side."""
    if state.dims != (2, 2):
        raise DimensionMismatchError(f"correlations need a 2x2 state, got {state.dims}")
    obs = np.kron(spin_observable(theta_a), spin_observable(theta_b))
    return float(np.real(np.trace(obs @ state.rho)))


def canonical_chsh_settings() -> tuple[tuple[float, float], ...]:
    """Angle pairs at which the singlet reaches score magnitude 2 sqrt(2).

    The four pairs are (a,b), (a,b'), (a',b), (a',b') for a = pi/2, a' = 0,
    b = pi/4, b' = 3 pi/4; the signed score there is -2 sqrt(2).
    """
    a, ap, b, bp = np.pi / 2, 0.0, np.pi / 4, 3 * np.pi / 4
    return ((a, b), (a, bp), (ap, b), (ap, bp))


def chsh_score(state: BipartiteState, settings) -> float:
    """E(a,b) + E(a,b') + E(a',b) - E(a',b') over four angle pairs."""
    pairs = tuple(settings)
    if len(pairs) != 4:
        raise ValueError("CHSH needs exactly four angle pairs")
    e = [correlation(state, float(ta), float(tb)) for ta, tb in pairs]
    return e[0] + e[1] + e[2] - e[3]
