import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from landscape_lattice import linalg
from landscape_lattice.errors import DimensionMismatch, NoConvergence, NotSymmetric, SingularMatrix
from landscape_lattice.linalg import max_norm, operator_norm, solve_linear, symmetric_eigen

entries = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)


@st.composite
def symmetric_matrices(draw, max_n=24):
    n = draw(st.integers(1, max_n))
    a = draw(arrays(np.float64, (n, n), elements=entries))
    return np.triu(a) + np.triu(a, 1).T


# --- solve_linear


def test_solve_identity():
    np.testing.assert_array_equal(solve_linear(np.eye(3), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])


def test_solve_diagonal():
    np.testing.assert_allclose(solve_linear(np.diag([2.0, 4.0]), [1.0, 1.0]), [0.5, 0.25], rtol=0, atol=1e-15)


def test_solve_two_by_two_against_closed_form_inverse():
    m = np.array([[3.0, -1.0], [-1.0, 3.0]])
    # inverse by adjugate / determinant: (1/8) [[3, 1], [1, 3]]
    inverse = np.array([[3.0, 1.0], [1.0, 3.0]]) / 8.0
    expected = inverse @ np.array([1.0, 1.0])
    np.testing.assert_allclose(expected, [0.5, 0.5])
    np.testing.assert_allclose(solve_linear(m, [1.0, 1.0]), expected, atol=1e-15)


def test_solve_matrix_rhs():
    m = np.array([[3.0, -1.0], [-1.0, 3.0]])
    np.testing.assert_allclose(solve_linear(m, np.eye(2)), np.array([[3.0, 1.0], [1.0, 3.0]]) / 8.0, atol=1e-15)


def test_solve_needs_pivoting():
    m = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_array_equal(solve_linear(m, [2.0, 5.0]), [5.0, 2.0])


def test_solve_singular():
    with pytest.raises(SingularMatrix):
        solve_linear([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])
    with pytest.raises(SingularMatrix):
        solve_linear(np.zeros((2, 2)), [1.0, 1.0])


def test_solve_shapes():
    with pytest.raises(DimensionMismatch):
        solve_linear(np.eye(2), [1.0, 2.0, 3.0])
    with pytest.raises(DimensionMismatch):
        solve_linear(np.ones((2, 3)), [1.0, 2.0])


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        solve_linear([[1.0, np.nan], [0.0, 1.0]], [1.0, 1.0])


def test_solve_does_not_mutate_input():
    m = np.array([[0.0, 2.0], [1.0, 1.0]])
    b = np.array([1.0, 1.0])
    solve_linear(m, b)
    np.testing.assert_array_equal(m, [[0.0, 2.0], [1.0, 1.0]])
    np.testing.assert_array_equal(b, [1.0, 1.0])


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 40), seed=st.integers(0, 2**32 - 1))
def test_solve_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    m = a + a.T + 2 * n * np.eye(n)  # well conditioned
    rhs = rng.normal(size=n) * 10
    x = solve_linear(m, rhs)
    assert np.max(np.abs(m @ x - rhs)) <= 1e-9 * (1 + np.max(np.abs(rhs)))


# --- symmetric_eigen


def test_eigen_diagonal():
    d = symmetric_eigen(np.diag([5.0, 1.0, 3.0]))
    np.testing.assert_array_equal(d.eigenvalues, [1.0, 3.0, 5.0])
    np.testing.assert_array_equal(np.abs(d.eigenvectors), np.eye(3)[:, [1, 2, 0]])


def test_eigen_swap():
    np.testing.assert_allclose(symmetric_eigen([[0.0, 1.0], [1.0, 0.0]]).eigenvalues, [-1.0, 1.0], atol=1e-15)


def test_eigen_chain_of_three_matches_characteristic_polynomial():
    a = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    # det(lambda I - A) = lambda^3 - 2 lambda
    roots = np.sort(np.roots([1.0, 0.0, -2.0, 0.0]).real)
    np.testing.assert_allclose(roots, [-np.sqrt(2), 0.0, np.sqrt(2)], atol=1e-15)
    np.testing.assert_allclose(symmetric_eigen(a).eigenvalues, roots, atol=1e-14)


def test_eigen_one_by_one():
    d = symmetric_eigen([[7.5]])
    assert d.eigenvalues.tolist() == [7.5]
    assert d.eigenvectors.tolist() == [[1.0]]


def test_eigen_not_symmetric():
    with pytest.raises(NotSymmetric):
        symmetric_eigen([[1.0, 2.0], [0.0, 1.0]])


def test_eigen_tolerates_roundoff_asymmetry():
    m = np.array([[1.0, 2.0], [2.0 + 1e-15, 1.0]])
    np.testing.assert_allclose(symmetric_eigen(m).eigenvalues, [-1.0, 3.0], atol=1e-14)


def test_eigen_iteration_cap(monkeypatch):
    monkeypatch.setattr(linalg, "MAX_SWEEPS", 0)
    with pytest.raises(NoConvergence):
        symmetric_eigen([[0.0, 1.0], [1.0, 0.0]])


def test_eigen_deterministic(rng):
    a = rng.normal(size=(30, 30))
    a = a + a.T
    d1, d2 = symmetric_eigen(a), symmetric_eigen(a)
    assert d1.eigenvalues.tobytes() == d2.eigenvalues.tobytes()
    assert d1.eigenvectors.tobytes() == d2.eigenvectors.tobytes()


@settings(max_examples=150, deadline=None)
@given(symmetric_matrices())
def test_eigen_invariants(m):
    d = symmetric_eigen(m)
    n = m.shape[0]
    assert np.all(np.diff(d.eigenvalues) >= 0)
    assert np.max(np.abs(d.eigenvectors.T @ d.eigenvectors - np.eye(n))) <= 1e-10
    assert max_norm(d.reconstruct() - m) <= 1e-9 * (1 + max_norm(m))
    # independent LAPACK oracle
    np.testing.assert_allclose(d.eigenvalues, np.linalg.eigvalsh(m), atol=1e-10 * (1 + max_norm(m)))


def test_eigen_invariants_up_to_64(rng):
    for n in (33, 48, 64):
        a = rng.normal(size=(n, n))
        m = a + a.T
        d = symmetric_eigen(m)
        assert np.max(np.abs(d.eigenvectors.T @ d.eigenvectors - np.eye(n))) <= 1e-10
        assert max_norm(d.reconstruct() - m) <= 1e-9 * (1 + max_norm(m))


def test_eigen_repeated_eigenvalues():
    m = np.ones((5, 5))  # eigenvalues 0 (x4), 5
    d = symmetric_eigen(m)
    np.testing.assert_allclose(d.eigenvalues, [0, 0, 0, 0, 5], atol=1e-14)
    assert max_norm(d.reconstruct() - m) <= 1e-13


# --- operator_norm


def test_norm_zero():
    assert operator_norm(np.zeros((4, 4))) == 0.0


def test_norm_diag():
    assert operator_norm(np.diag([-3.0, 2.0])) == 3.0


def test_norm_chain_of_two():
    # eigenvalues of [[0,1],[1,0]] are +-1
    assert operator_norm([[0.0, 1.0], [1.0, 0.0]]) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(symmetric_matrices(max_n=16), st.floats(-5, 5, allow_nan=False))
def test_norm_properties(m, c):
    norm = operator_norm(m)
    assert norm >= 0
    assert operator_norm(m @ m) <= norm**2 + 1e-8
    assert operator_norm(c * m) == pytest.approx(abs(c) * norm, rel=1e-10, abs=1e-300)
    assert norm == pytest.approx(np.linalg.norm(m, 2), rel=1e-10, abs=1e-12)
