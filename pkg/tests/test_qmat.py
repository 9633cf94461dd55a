import numpy as np
import pytest

from qworlds import qmat

from tests.oracles import kron_by_loops, partial_trace_by_loops, rand_density, rand_pure


def test_tensor_of_identities_is_identity():
    assert np.array_equal(qmat.tensor(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_of_projectors_is_product_projector():
    s = 1 / np.sqrt(2)
    plus = np.array([s, s])
    minus = np.array([s, -s])
    left = qmat.tensor(qmat.projector(plus), qmat.projector(minus))
    right = qmat.projector(np.kron(plus, minus))
    assert np.allclose(left, right, atol=1e-15)
    w = np.linalg.eigvalsh(left)
    assert np.sum(w > 1e-12) == 1


def test_tensor_sigma_z_sigma_x_matches_hand_expansion():
    expected = np.array(
        [
            [0, 1, 0, 0],
            [1, 0, 0, 0],
            [0, 0, 0, -1],
            [0, 0, -1, 0],
        ],
        dtype=complex,
    )
    assert np.array_equal(qmat.tensor(qmat.PAULI_Z, qmat.PAULI_X), expected)


def test_tensor_matches_loop_expansion_on_random_pair():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    b = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    assert np.allclose(qmat.tensor(a, b), kron_by_loops(a, b), atol=1e-13)


def test_tensor_associative():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    b = np.array([[0, 1j], [-1j, 5]], dtype=complex)
    c = np.array([[2, 0], [7, 1]], dtype=complex)
    assert np.array_equal(qmat.tensor(qmat.tensor(a, b), c), qmat.tensor(a, qmat.tensor(b, c)))
    rng = np.random.default_rng(3)
    x, y, z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
    assert np.allclose(qmat.tensor(qmat.tensor(x, y), z), qmat.tensor(x, qmat.tensor(y, z)), atol=1e-14)


def test_partial_trace_of_product_state():
    rng = np.random.default_rng(5)
    rho_a = rand_density(rng, 2)
    rho_b = rand_density(rng, 3)
    joint = np.kron(rho_a, rho_b)
    assert np.allclose(qmat.partial_trace(joint, (2, 3), "A"), rho_a, atol=1e-13)
    assert np.allclose(qmat.partial_trace(joint, (2, 3), "B"), rho_b, atol=1e-13)


def test_partial_trace_singlet_gives_maximally_mixed():
    s = 1 / np.sqrt(2)
    singlet = qmat.projector(np.array([0, s, -s, 0]))
    for keep in ("A", "B"):
        assert np.allclose(qmat.partial_trace(singlet, (2, 2), keep), np.eye(2) / 2, atol=1e-12)


def test_partial_trace_matches_loop_oracle():
    rng = np.random.default_rng(17)
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert np.allclose(qmat.partial_trace(m, (2, 3), "A"), partial_trace_by_loops(m, 2, 3, "A"), atol=1e-13)
    assert np.allclose(qmat.partial_trace(m, (2, 3), "B"), partial_trace_by_loops(m, 2, 3, "B"), atol=1e-13)


def test_partial_trace_marginals_share_spectrum_for_pure_states():
    rng = np.random.default_rng(23)
    for _ in range(10):
        psi = rand_pure(rng, 6)
        rho = qmat.projector(psi)
        wa, _ = qmat.eigh(qmat.partial_trace(rho, (2, 3), "A"))
        wb, _ = qmat.eigh(qmat.partial_trace(rho, (2, 3), "B"))
        nza = wa[wa > 1e-10]
        nzb = wb[wb > 1e-10]
        assert nza.size == nzb.size
        assert np.allclose(nza, nzb[: nza.size], atol=1e-10)


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(29)
    for _ in range(20):
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        for keep in ("A", "B"):
            assert abs(np.trace(qmat.partial_trace(m, (2, 3), keep)) - np.trace(m)) < 1e-9


def test_partial_trace_dimension_mismatch():
    with pytest.raises(qmat.DimensionMismatchError):
        qmat.partial_trace(np.eye(5), (2, 3), "A")


def test_eigh_identity():
    w, _ = qmat.eigh(np.eye(2))
    assert np.allclose(w, [1.0, 1.0])


def test_eigh_sigma_z():
    w, v = qmat.eigh(qmat.PAULI_Z)
    assert np.allclose(w, [1.0, -1.0])
    assert qmat.vectors_match(v[:, 0], [1, 0])
    assert qmat.vectors_match(v[:, 1], [0, 1])


def test_eigh_reconstructs_random_hermitian():
    rng = np.random.default_rng(41)
    z = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    h = z + np.conj(z).T
    w, v = qmat.eigh(h)
    rebuilt = (v * w) @ np.conj(v).T
    assert np.linalg.norm(rebuilt - h) < 1e-10
    assert np.allclose(np.conj(v).T @ v, np.eye(8), atol=1e-10)
    assert np.all(np.diff(w) <= 1e-12)


def test_eigh_rejects_nonhermitian():
    with pytest.raises(ValueError):
        qmat.eigh(np.array([[0, 1], [0, 0]], dtype=complex))


def test_hermiticity_survives_symbolically_hermitian_closure():
    rng = np.random.default_rng(7)
    z1 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    z2 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h1 = z1 + np.conj(z1).T
    h2 = z2 + np.conj(z2).T
    combos = [
        h1 + h2,
        h1 @ h2 + h2 @ h1,
        qmat.tensor(h1, h2),
        qmat.tensor(h1, h1) + qmat.tensor(h2, h2),
    ]
    for h in combos:
        assert float(np.max(np.abs(h - qmat.dagger(h)))) < qmat.tolerance()


def test_unit_vector_validation():
    qmat.as_unit_vector([1, 0, 0])
    with pytest.raises(ValueError):
        qmat.as_unit_vector([1, 1])


def test_matrix_rejects_nonfinite_entries():
    with pytest.raises(ValueError):
        qmat.as_complex_matrix([[np.nan, 0], [0, 1]])
    with pytest.raises(ValueError):
        qmat.as_complex_matrix([[np.inf, 0], [0, 1]])


def test_tolerance_override_roundtrip():
    assert qmat.tolerance() == qmat.DEFAULT_TOL
    qmat.set_tolerance(1e-7)
    try:
        assert qmat.tolerance() == 1e-7
    finally:
        qmat.set_tolerance(qmat.DEFAULT_TOL)
    with pytest.raises(ValueError):
        qmat.set_tolerance(-1.0)
