"""Independent reference implementations used as test oracles.

Everything here is deliberately written with plain loops or closed forms,
separate from the library code paths it checks.
"""

from __future__ import annotations

import numpy as np


def rand_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    ph = np.diag(r).copy()
    ph = ph / np.abs(ph)
    return q * ph


def rand_density(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = z @ np.conj(z).T
    return m / float(np.trace(m).real)


def rand_pure(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return z / np.linalg.norm(z)


def rand_channel(rng: np.random.Generator, d: int, n_kraus: int) -> list[np.ndarray]:
    """Kraus blocks of a random isometry dilation; trace preserving by construction."""
    z = rng.normal(size=(d * n_kraus, d)) + 1j * rng.normal(size=(d * n_kraus, d))
    q, _ = np.linalg.qr(z)
    return [q[i * d : (i + 1) * d, :] for i in range(n_kraus)]


def kron_by_loops(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product expanded index by index, A-index major."""
    (ra, ca), (rb, cb) = a.shape, b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for m in range(cb):
                    out[i * rb + k, j * cb + m] = a[i, j] * b[k, m]
    return out


def partial_trace_by_loops(m: np.ndarray, da: int, db: int, keep: str) -> np.ndarray:
    """Partial trace written as explicit index sums."""
    if keep == "A":
        out = np.zeros((da, da), dtype=complex)
        for i in range(da):
            for k in range(da):
                for j in range(db):
                    out[i, k] += m[i * db + j, k * db + j]
        return out
    out = np.zeros((db, db), dtype=complex)
    for j in range(db):
        for m_idx in range(db):
            for i in range(da):
                out[j, m_idx] += m[i * db + j, i * db + m_idx]
    return out


def matching_pure_ensemble(
    rho: np.ndarray, n_members: int, rng: np.random.Generator
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Random pure-state ensemble averaging exactly to `rho`.

    Measures a random orthonormal basis on an n-dim ancilla purifying rho;
    the resulting branch states average to rho by construction.
    """
    d = rho.shape[0]
    w, v = np.linalg.eigh(rho)
    w = np.clip(w[::-1], 0.0, None)
    v = v[:, ::-1]
    rank = int(np.sum(w > 1e-12))
    if n_members < rank:
        raise ValueError("need at least rank many members")
    psi = np.zeros(n_members * d, dtype=complex)
    for k in range(rank):
        anc = np.zeros(n_members, dtype=complex)
        anc[k] = 1.0
        psi += np.sqrt(w[k]) * np.kron(anc, v[:, k])
    u = rand_unitary(rng, n_members)
    probs, members = [], []
    for k in range(n_members):
        basis_vec = u[:, k]
        # (<u_k| x I) psi
        branch = np.conj(basis_vec) @ psi.reshape(n_members, d)
        p = float(np.real(np.vdot(branch, branch)))
        probs.append(p)
        members.append(branch / np.sqrt(p))
    return np.asarray(probs), members


def dephase_by_loops(rho: np.ndarray, basis_rows: np.ndarray, lam: float) -> np.ndarray:
    """Basis dephasing computed entry by entry in the given basis."""
    n = rho.shape[0]
    coeff = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            coeff[i, j] = np.conj(basis_rows[i]) @ rho @ basis_rows[j]
            if i != j:
                coeff[i, j] *= 1.0 - lam
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            out += coeff[i, j] * np.outer(basis_rows[i], np.conj(basis_rows[j]))
    return out


def attack_acceptance_by_enumeration(
    effects: list[np.ndarray], targets: list[np.ndarray], rho_joint: np.ndarray
) -> float:
    """Exact Born probability that Bob's verification accepts an EPR unveiling.

    Enumerates the steering-measurement branches: outcome j steers Bob, who
    then projects onto target j, so the acceptance is
    sum_j trace[(E_j x |t_j><t_j|) rho].
    """
    total = 0.0
    for e, t in zip(effects, targets):
        proj = np.outer(t, np.conj(t))
        total += float(np.real(np.trace(np.kron(e, proj) @ rho_joint)))
    return total


def correlation_matrix_xz(rho4: np.ndarray) -> np.ndarray:
    """2x2 matrix of spin correlations over the {z, x} axes of each qubit."""
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    axes = [sz, sx]
    m = np.zeros((2, 2))
    for i, oa in enumerate(axes):
        for j, ob in enumerate(axes):
            m[i, j] = float(np.real(np.trace(np.kron(oa, ob) @ rho4)))
    return m


def chsh_grid_max(rho4: np.ndarray, step_degrees: float = 1.0) -> float:
    """Largest |CHSH score| over an angle grid in the x-z plane.

    Exhaustive over all (a, a', b, b') grid assignments, using the identity
    S = [E(a,b) + E(a,b')] + [E(a',b) - E(a',b')] to split the maximization.
    """
    m = correlation_matrix_xz(rho4)
    angles = np.deg2rad(np.arange(0.0, 360.0, step_degrees))
    u = np.stack([np.cos(angles), np.sin(angles)], axis=1)  # (n, 2): (z, x) weights
    e = u @ m @ u.T  # e[a, b]
    n = e.shape[0]
    chunk = 64
    f_max = np.full((n, n), -np.inf)
    f_min = np.full((n, n), np.inf)
    g_max = np.full((n, n), -np.inf)
    g_min = np.full((n, n), np.inf)
    for start in range(0, n, chunk):
        block = e[start : start + chunk]  # (c, n)
        f = block[:, :, None] + block[:, None, :]  # (c, b, b')
        g = block[:, :, None] - block[:, None, :]
        f_max = np.maximum(f_max, f.max(axis=0))
        f_min = np.minimum(f_min, f.min(axis=0))
        g_max = np.maximum(g_max, g.max(axis=0))
        g_min = np.minimum(g_min, g.min(axis=0))
    best = max(float((f_max + g_max).max()), float(-(f_min + g_min).min()))
    return best
