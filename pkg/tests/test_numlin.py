import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstardual.errors import (
    NotCommuting,
    NotHermitian,
    NotNormal,
    NotSquare,
)
from cstardual.numlin import (
    DEFAULT_TOL,
    Tolerance,
    hermitian_eig,
    max_abs,
    numeric_rank,
    simultaneous_diag,
)


def random_hermitian(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return A + A.conj().T


class TestHermitianEig:
    def test_identity(self):
        evals, U = hermitian_eig(np.eye(2))
        assert np.allclose(evals, [1.0, 1.0])
        assert np.array_equal(U, np.eye(2))

    def test_pauli_x(self):
        evals, U = hermitian_eig(np.array([[0, 1], [1, 0]], dtype=complex))
        assert np.allclose(evals, [-1.0, 1.0])
        assert max_abs(U.conj().T @ U - np.eye(2)) < 1e-12

    def test_two_by_two_with_imaginary_offdiag(self):
        # characteristic polynomial x^2 - 4x + 3 by hand
        M = np.array([[2, 1j], [-1j, 2]])
        evals, U = hermitian_eig(M)
        assert np.allclose(evals, [1.0, 3.0])
        assert max_abs(U @ np.diag(evals) @ U.conj().T - M) < 1e-12

    def test_not_square(self):
        with pytest.raises(NotSquare):
            hermitian_eig(np.ones((2, 3)))

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))

    @given(st.integers(0, 10_000), st.integers(1, 24))
    @settings(max_examples=60, deadline=None)
    def test_reconstruction_budget(self, seed, n):
        M = random_hermitian(seed, n)
        evals, U = hermitian_eig(M)
        tol = DEFAULT_TOL
        budget = 10 * tol.abs_eps * (1 + max_abs(M))
        assert max_abs(U @ np.diag(evals) @ U.conj().T - M) <= budget
        assert max_abs(U.conj().T @ U - np.eye(n)) <= 10 * tol.abs_eps
        assert np.all(np.diff(evals) >= -1e-12)

    def test_larger_scale(self):
        M = 1e4 * random_hermitian(5, 12)
        evals, U = hermitian_eig(M)
        assert max_abs(U @ np.diag(evals) @ U.conj().T - M) <= \
            10 * DEFAULT_TOL.abs_eps * (1 + max_abs(M))


class TestSimultaneousDiag:
    def test_single_identity(self):
        assert np.array_equal(simultaneous_diag([np.eye(2)]), np.eye(2))

    def test_already_diagonal(self):
        U = simultaneous_diag([np.diag([1.0, 2.0]), np.diag([3.0, 3.0])])
        assert np.array_equal(U, np.eye(2))

    def test_pauli_x_with_identity(self):
        X = np.array([[0, 1], [1, 0]], dtype=complex)
        U = simultaneous_diag([X, np.eye(2)])
        D = U.conj().T @ X @ U
        assert max_abs(D - np.diag(np.diag(D))) < 1e-10
        assert sorted(np.round(np.diag(D).real, 8)) == [-1.0, 1.0]
        assert np.allclose(np.abs(U), np.full((2, 2), 1 / np.sqrt(2)))

    def test_degenerate_family(self):
        rng = np.random.default_rng(3)
        Q = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))[0]
        diags = [np.diag([0, 0, 0, 1, 1, 2.0]), np.diag([0, 1, 1, 0, 2, 2.0]),
                 np.diag([3, 3, 1, 1, 0, 0.0])]
        Ms = [Q @ D @ Q.conj().T for D in diags]
        U = simultaneous_diag(Ms)
        for M in Ms:
            D = U.conj().T @ M @ U
            assert max_abs(D - np.diag(np.diag(D))) <= 100 * DEFAULT_TOL.abs_eps * 4

    def test_normal_but_not_hermitian(self):
        # unitary (normal, complex spectrum) commuting with a projector
        W = np.diag([1j, 1j, -1.0])
        P = np.diag([1.0, 1.0, 0.0])
        rng = np.random.default_rng(11)
        Q = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
        U = simultaneous_diag([Q @ W @ Q.conj().T, Q @ P @ Q.conj().T])
        for M in (Q @ W @ Q.conj().T, Q @ P @ Q.conj().T):
            D = U.conj().T @ M @ U
            assert max_abs(D - np.diag(np.diag(D))) < 1e-9

    def test_order_invariance_of_joint_spectrum(self):
        rng = np.random.default_rng(7)
        Q = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
        Ms = [Q @ np.diag(rng.normal(size=4)) @ Q.conj().T for _ in range(3)]

        def joint(Ms):
            U = simultaneous_diag(Ms)
            cols = []
            for k in range(4):
                cols.append(tuple(
                    np.round((U[:, k].conj() @ M @ U[:, k]).real, 6) for M in Ms))
            return cols

        a = joint(Ms)
        b = joint(Ms[::-1])
        assert sorted(a) == sorted(tuple(t[::-1]) for t in b)

    def test_not_commuting(self):
        X = np.array([[0, 1], [1, 0]], dtype=complex)
        Z = np.diag([1.0, -1.0])
        with pytest.raises(NotCommuting):
            simultaneous_diag([X, Z])

    def test_not_normal(self):
        with pytest.raises(NotNormal):
            simultaneous_diag([np.array([[0, 1], [0, 0]], dtype=complex)])


class TestNumericRank:
    def test_zero_rect(self):
        assert numeric_rank(np.zeros((2, 3))) == 0

    def test_identity(self):
        assert numeric_rank(np.eye(3)) == 3

    def test_rank_one(self):
        # singular values 2, 0 by hand
        assert numeric_rank(np.ones((2, 2))) == 1

    @given(st.integers(0, 10_000), st.integers(1, 8), st.integers(1, 8))
    @settings(max_examples=40, deadline=None)
    def test_rank_of_adjoint(self, seed, n, m):
        rng = np.random.default_rng(seed)
        M = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
        # random rank truncation
        r = min(n, m)
        if r > 1 and seed % 2:
            U, s, Vh = np.linalg.svd(M)
            s[r // 2:] = 0.0
            M = (U[:, :r] * s) @ Vh[:r]
        assert numeric_rank(M) == numeric_rank(M.conj().T)


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        Tolerance(abs_eps=0.0)
    with pytest.raises(ValueError):
        Tolerance(rel_eps=-1.0)
