import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhcube.linalg import (
    FundamentalDomain,
    LogBranchError,
    SingularMatrixError,
    commute_residual,
    expm_2pii,
    kernel_basis,
    phi_matrix,
    principal_log_over_2pii,
    rank_tol,
    rel_residual,
    solve_intertwiners,
    spec_norm,
)
from helpers import phi_series_oracle, random_complex, random_theta

TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------- phi


def test_phi_scalar_values():
    assert np.allclose(phi_matrix([[0.0]]), [[TWO_PI_I]], atol=1e-12)
    assert np.allclose(phi_matrix([[1.0]]), [[0.0]], atol=1e-12)


def test_phi_jordan_block_at_zero():
    # Taylor at 0: phi(0) = 2*pi*i on the diagonal, phi'(0) = (2*pi*i)^2/2 above.
    got = phi_matrix([[0.0, 1.0], [0.0, 0.0]])
    expected = np.array([[TWO_PI_I, TWO_PI_I**2 / 2], [0.0, TWO_PI_I]])
    assert np.allclose(got, expected, atol=1e-12)
    oracle = phi_series_oracle(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
    assert np.allclose(got, oracle, atol=1e-12)


def test_phi_euler_identity_random():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(1, 7))
        theta = random_theta(rng, n, 4.0)
        p = phi_matrix(theta)
        e = expm_2pii(theta)
        bound = 1e-10 * (1.0 + spec_norm(e))
        assert spec_norm(p @ theta - (e - np.eye(n))) <= bound
        assert spec_norm(theta @ p - (e - np.eye(n))) <= bound


def test_phi_matches_series_oracle():
    rng = np.random.default_rng(7)
    for _ in range(20):
        theta = random_theta(rng, 6, 4.0)
        p = phi_matrix(theta)
        o = phi_series_oracle(theta)
        assert spec_norm(p - o) <= 1e-10 * (1.0 + spec_norm(o))


def test_phi_identity_up_to_norm_ten():
    rng = np.random.default_rng(19)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        theta = random_theta(rng, n, 10.0)
        p = phi_matrix(theta)
        e = expm_2pii(theta)
        bound = 1e-10 * (1.0 + spec_norm(e))
        assert spec_norm(p @ theta - (e - np.eye(n))) <= bound
        o = phi_series_oracle(theta, terms=60)
        assert spec_norm(p - o) <= 1e-10 * (1.0 + spec_norm(o))


def test_phi_singular_iff_nonzero_integer_eigenvalue():
    assert rank_tol(phi_matrix(np.diag([0.0, 0.5, 2.0])), 1e-8) == 2
    assert rank_tol(phi_matrix(np.diag([0.3, 0.7])), 1e-8) == 2


def test_phi_zero_size_and_shape_errors():
    assert phi_matrix(np.zeros((0, 0))).shape == (0, 0)
    with pytest.raises(ValueError):
        phi_matrix(np.zeros((2, 3)))


def test_phi_block_dispatch_is_exact_on_direct_sums():
    rng = np.random.default_rng(3)
    a = random_theta(rng, 3, 2.0)
    b = random_theta(rng, 2, 2.0)
    ab = np.zeros((5, 5), dtype=complex)
    ab[:3, :3] = a
    ab[3:, 3:] = b
    got = phi_matrix(ab)
    assert np.array_equal(got[:3, :3], phi_matrix(a))
    assert np.array_equal(got[3:, 3:], phi_matrix(b))
    assert np.all(got[:3, 3:] == 0) and np.all(got[3:, :3] == 0)


# ---------------------------------------------------------------------- log


def test_log_identity_is_zero():
    out = principal_log_over_2pii(np.eye(2), FundamentalDomain(0.0))
    assert np.allclose(out, 0.0, atol=1e-12)


def test_log_scalar_quarter_turn():
    out = principal_log_over_2pii(np.array([[1j]]), FundamentalDomain(0.0))
    assert np.allclose(out, [[0.25]], atol=1e-12)


def test_log_roundtrip_random():
    rng = np.random.default_rng(5)
    for _ in range(10):
        theta0 = random_theta(rng, 3, 0.8)
        # push eigenvalues into [0, 1) interior
        w = np.linalg.eigvals(theta0)
        theta0 = theta0 - np.eye(3) * (min(w.real) - 0.1)
        theta0 *= 0.7 / max(1.0, max(np.linalg.eigvals(theta0).real) + 0.1)
        m = expm_2pii(theta0)
        theta = principal_log_over_2pii(m, FundamentalDomain(0.0))
        assert spec_norm(theta - theta0) <= 1e-7
        assert spec_norm(expm_2pii(theta) - m) <= 1e-8 * max(1.0, spec_norm(m))


def test_log_places_eigenvalues_in_strip():
    rng = np.random.default_rng(13)
    for sigma in (0.0, -0.5, -1.0, 0.25):
        dom = FundamentalDomain(sigma)
        for _ in range(5):
            m = random_complex(rng, 4, 4)
            m += np.eye(4) * 4  # keep well away from singular
            theta = principal_log_over_2pii(m, dom)
            for lam in np.linalg.eigvals(theta):
                assert dom.contains(lam, tol=1e-9)
            assert spec_norm(expm_2pii(theta) - m) <= 1e-8 * max(1.0, spec_norm(m))


def test_log_mixed_branches():
    # eigenvalues i and -i need different shifts for sigma = 0
    m = np.diag([1j, -1j])
    theta = principal_log_over_2pii(m, FundamentalDomain(0.0))
    assert np.allclose(sorted(np.diag(theta).real), [0.25, 0.75], atol=1e-12)
    v = np.array([[1.0, 1.0], [0.0, 1.0]])
    m2 = v @ m @ np.linalg.inv(v)
    theta2 = principal_log_over_2pii(m2, FundamentalDomain(0.0))
    assert spec_norm(expm_2pii(theta2) - m2) <= 1e-8


def test_log_jordan_block():
    m = np.array([[1.0, 1.0], [0.0, 1.0]])
    theta = principal_log_over_2pii(m, FundamentalDomain(0.0))
    assert np.allclose(theta, [[0.0, 1 / TWO_PI_I], [0.0, 0.0]], atol=1e-12)


def test_log_mixed_branches_with_jordan_blocks():
    # two defective blocks whose eigenvalues need different branch shifts
    j1 = np.array([[1j, 1.0], [0.0, 1j]])          # arg pi/2 -> Re 0.25
    j2 = np.array([[-1j, 1.0], [0.0, -1j]])        # arg -pi/2 -> Re 0.75
    m = np.zeros((4, 4), dtype=complex)
    m[:2, :2] = j1
    m[2:, 2:] = j2
    rng = np.random.default_rng(6)
    v = np.eye(4) + 0.3 * rng.standard_normal((4, 4))
    mm = v @ m @ np.linalg.inv(v)
    theta = principal_log_over_2pii(mm, FundamentalDomain(0.0))
    eigs = sorted(np.linalg.eigvals(theta).real)
    assert np.allclose(eigs, [0.25, 0.25, 0.75, 0.75], atol=1e-8)
    assert spec_norm(expm_2pii(theta) - mm) <= 1e-8 * max(1.0, spec_norm(mm))


def test_log_singular_rejected():
    with pytest.raises(SingularMatrixError):
        principal_log_over_2pii(np.zeros((2, 2)))


def test_log_branch_clash_reported():
    eps = 1e-13
    m = np.diag([1.0 + eps * 1j, 1.0 - eps * 1j])
    v = np.array([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(LogBranchError):
        principal_log_over_2pii(v @ m @ np.linalg.inv(v), FundamentalDomain(0.0))


def test_distinguished_integer():
    assert FundamentalDomain(0.0).distinguished_integer == 0
    assert FundamentalDomain(-0.5).distinguished_integer == 0
    assert FundamentalDomain(0.25).distinguished_integer == 1


# --------------------------------------------------------------- rank etc.


def test_rank_tol_examples():
    assert rank_tol(np.zeros((3, 3)), 1e-9) == 0
    assert rank_tol(np.eye(3), 1e-9) == 3
    assert rank_tol(np.zeros((0, 4)), 1e-9) == 0


def test_kernel_basis_example():
    k = kernel_basis(np.array([[1.0, 1.0], [1.0, 1.0]]), 1e-9)
    assert k.shape == (2, 1)
    v = k[:, 0]
    expected = np.array([1.0, -1.0]) / math.sqrt(2)
    phase = v[0] / expected[0]
    assert np.allclose(v, phase * expected, atol=1e-12)
    assert abs(abs(phase) - 1) < 1e-12


def test_kernel_basis_degenerate_shapes():
    assert kernel_basis(np.zeros((0, 3))).shape == (3, 3)
    assert kernel_basis(np.zeros((3, 0))).shape == (0, 0)


def test_commute_residual_examples():
    assert commute_residual(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])) == 0.0
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    b = np.array([[1.0, 0.0], [0.0, 2.0]])
    r1 = commute_residual(a, b)
    r2 = commute_residual(b, a)
    assert r1 == pytest.approx(r2)
    assert r1 > 0.1


@settings(max_examples=30, deadline=None, derandomize=True)
@given(st.integers(0, 2**31 - 1))
def test_commute_residual_symmetry_property(seed):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, 3, 3)
    b = random_complex(rng, 3, 3)
    assert commute_residual(a, b) == pytest.approx(commute_residual(b, a), rel=1e-9)


# --------------------------------------------------------------- intertwiners


def test_solve_intertwiners_dimensions():
    eye2 = np.eye(2)
    assert len(solve_intertwiners([(eye2, eye2)])) == 4
    basis = solve_intertwiners([(np.diag([1.0, 2.0]), np.diag([1.0, 2.0]))])
    assert len(basis) == 2
    for x in basis:
        assert abs(x[0, 1]) < 1e-10 and abs(x[1, 0]) < 1e-10
    assert solve_intertwiners([(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))]) == []


def test_solve_intertwiners_solutions_intertwine():
    rng = np.random.default_rng(17)
    p = random_complex(rng, 3, 3)
    q = random_complex(rng, 2, 2)
    basis = solve_intertwiners([(p, q)])
    for x in basis:
        assert spec_norm(x @ p - q @ x) < 1e-9


def test_rel_residual():
    assert rel_residual(np.eye(2), np.eye(2)) == 0.0
    assert rel_residual([[0.0]], [[0.5]]) == pytest.approx(0.5)
