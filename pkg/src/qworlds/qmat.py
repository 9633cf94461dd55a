"""Dense complex linear algebra for small operators (dims <= 64).

Everything here works on plain numpy arrays with complex128 entries.
Vectors are 1-D arrays, operators are square 2-D arrays, and sequences
of basis vectors are stored as rows of a 2-D array.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

DEFAULT_TOL = 1e-9

_tolerance = DEFAULT_TOL


class DimensionMismatchError(ValueError):
    """Operands do not have the dimensions an operation requires."""


class ConvergenceError(RuntimeError):
    """Eigendecomposition failed to converge within its iteration budget."""


def tolerance() -> float:
    """Current process-wide numeric tolerance used by invariant checks."""
    return _tolerance


def set_tolerance(value: float) -> None:
    """Override the process-wide tolerance. Set once, before concurrent use."""
    global _tolerance
    value = float(value)
    if not (value > 0.0 and np.isfinite(value)):
        raise ValueError(f"tolerance must be a positive finite number, got {value}")
    _tolerance = value


def _tol(tol: float | None) -> float:
    return _tolerance if tol is None else float(tol)


def as_complex_matrix(entries) -> np.ndarray:
    """Coerce to a 2-D complex matrix, rejecting non-finite entries."""
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def as_unit_vector(amplitudes, tol: float | None = None) -> np.ndarray:
    """Coerce to a 1-D complex vector with unit norm within tolerance."""
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size == 0:
        raise ValueError("empty vector")
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValueError("vector contains NaN or Inf entries")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > _tol(tol):
        raise ValueError(f"vector norm {norm} is not 1 within tolerance")
    return v


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def is_hermitian(m, tol: float | None = None) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.max(np.abs(m - dagger(m)))) <= _tol(tol)


def require_hermitian(m, tol: float | None = None) -> np.ndarray:
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"operator must be square, got shape {m.shape}")
    dev = float(np.max(np.abs(m - dagger(m))))
    if dev > _tol(tol):
        raise ValueError(f"operator deviates from Hermiticity by {dev}")
    return m


def require_density(rho, tol: float | None = None) -> np.ndarray:
    """Validate a density operator: Hermitian, PSD, and unit trace within tolerance."""
    t = _tol(tol)
    rho = require_hermitian(rho, t)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > t:
        raise ValueError(f"density operator trace {tr} is not 1 within tolerance")
    w = np.linalg.eigvalsh((rho + dagger(rho)) / 2.0)
    if float(w.min()) < -t:
        raise ValueError(f"density operator has negative eigenvalue {float(w.min())}")
    return rho


def projector(v) -> np.ndarray:
    """Rank-1 projector |v><v| from a vector."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, np.conj(v))


def tensor(*factors) -> np.ndarray:
    """Kronecker product with the first factor's index as the major index."""
    if not factors:
        raise ValueError("tensor needs at least one factor")
    mats = [as_complex_matrix(f) for f in factors]
    return reduce(np.kron, mats)


def tensor_vectors(*factors) -> np.ndarray:
    """Kronecker product of vectors, first factor major."""
    vecs = [np.asarray(f, dtype=complex).reshape(-1) for f in factors]
    return reduce(np.kron, vecs)


def _keep_index(keep) -> int:
    if keep in (0, 1):
        return int(keep)
    if isinstance(keep, str) and keep.upper() in ("A", "B"):
        return 0 if keep.upper() == "A" else 1
    raise ValueError(f"keep must be 0/1 or 'A'/'B', got {keep!r}")


def partial_trace(m, dims: tuple[int, int], keep) -> np.ndarray:
    """Trace out one tensor factor of a bipartite operator, keeping the other.

    `dims` is (dA, dB) with the A index major; `keep` selects the surviving
    subsystem as 0/'A' or 1/'B'. The total trace is preserved.
    """
    m = as_complex_matrix(m)
    da, db = int(dims[0]), int(dims[1])
    if m.shape != (da * db, da * db):
        raise DimensionMismatchError(
            f"operator of shape {m.shape} does not match subsystem dims {da}x{db}"
        )
    t = m.reshape(da, db, da, db)
    if _keep_index(keep) == 0:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def eigh(h, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian operator.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending and
    eigenvectors as the corresponding columns. The output is deterministic:
    LAPACK ordering plus a phase fix that makes the largest-magnitude component
    of each eigenvector real and nonnegative.
    """
    m = require_hermitian(h, tol)
    m = (m + dagger(m)) / 2.0
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition did not converge: {exc}") from exc
    w = w[::-1].astype(float)
    v = v[:, ::-1]
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = int(np.argmax(np.abs(col)))
        a = col[idx]
        if abs(a) > 0.0:
            v[:, k] = col * (np.conj(a) / abs(a))
    return w, v


def frobenius_distance(a, b=None) -> float:
    a = np.asarray(a, dtype=complex)
    if b is not None:
        a = a - np.asarray(b, dtype=complex)
    return float(np.linalg.norm(a))


def fidelity_to_vector(v, rho) -> float:
    """<v|rho|v> for a unit vector and a density operator."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    return float(np.real(np.conj(v) @ np.asarray(rho, dtype=complex) @ v))


def vectors_match(u, v, tol: float | None = None) -> bool:
    """Equality up to global phase: |<u|v>| = 1 within tolerance."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    return abs(abs(np.vdot(u, v)) - 1.0) <= _tol(tol)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


IDENTITY_2 = _readonly(np.eye(2, dtype=complex))
PAULI_X = _readonly(np.array([[0, 1], [1, 0]], dtype=complex))
PAULI_Y = _readonly(np.array([[0, -1j], [1j, 0]], dtype=complex))
PAULI_Z = _readonly(np.array([[1, 0], [0, -1]], dtype=complex))
