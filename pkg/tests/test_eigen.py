"""In-repo dense nonsymmetric eigensolver."""

import numpy as np
import pytest

import breather_lab as bl


def test_diagonal():
    dec = bl.eig_dense(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(dec.values, [3.0, 2.0, 1.0])


def test_rotation_gives_conjugate_pair():
    dec = bl.eig_dense(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert np.allclose(dec.values, [1j, -1j])
    assert dec.values[0] == np.conj(dec.values[1])


def test_defective_jordan_block():
    dec = bl.eig_dense(np.array([[0.0, 1.0], [0.0, 0.0]]), compute_vectors=False)
    assert np.max(np.abs(dec.values)) < 1e-12


def test_sorting_contract():
    a = np.diag([1.0, -1.0, 0.5])
    a[0, 1] = 3.0
    dec = bl.eig_dense(a)
    re = dec.values.real
    assert np.all(np.diff(re) <= 1e-12)


@pytest.mark.parametrize("n", [3, 5, 8, 20, 40])
def test_random_matrices_match_lapack(n):
    rng = np.random.default_rng(n)
    for _ in range(3 if n <= 8 else 1):
        a = rng.standard_normal((n, n))
        dec = bl.eig_dense(a)
        scale = np.max(np.abs(dec.values))
        ref = np.sort_complex(np.linalg.eigvals(a))
        assert np.max(np.abs(np.sort_complex(dec.values) - ref)) < 1e-10 * scale
        # residual contract for every pair
        anorm = np.linalg.norm(a)
        for i in range(n):
            r = np.linalg.norm(a @ dec.vectors[:, i] - dec.values[i] * dec.vectors[:, i])
            assert r <= 1e-9 * anorm


@pytest.mark.parametrize("n", [4, 6, 8])
def test_trace_and_determinant_identities(n):
    rng = np.random.default_rng(100 + n)
    a = rng.standard_normal((n, n))
    dec = bl.eig_dense(a, compute_vectors=False)
    anorm = np.linalg.norm(a)
    assert abs(np.sum(dec.values) - np.trace(a)) <= 1e-9 * anorm
    det = np.linalg.det(a)
    assert abs(np.prod(dec.values) - det) <= 1e-9 * max(abs(det), anorm ** n * 1e-12)


def test_conjugate_pairing_is_exact_to_tolerance():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((12, 12))
    vals = bl.eig_dense(a, compute_vectors=False).values
    scale = np.max(np.abs(vals))
    cplx = vals[vals.imag > 0]
    for v in cplx:
        assert np.min(np.abs(vals - np.conj(v))) < 1e-10 * scale


def test_balanced_badly_scaled_matrix():
    a = np.array([[1.0, 1e8], [1e-8, 2.0]])
    dec = bl.eig_dense(a)
    ref = np.sort_complex(np.linalg.eigvals(a))
    assert np.max(np.abs(np.sort_complex(dec.values) - ref)) < 1e-9 * np.max(np.abs(ref))


def test_input_validation():
    with pytest.raises(bl.InvalidInputError):
        bl.eig_dense(np.ones((2, 3)))
    with pytest.raises(bl.InvalidInputError):
        bl.eig_dense(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_two_site_linearization_against_polynomial_roots():
    # independent oracle: characteristic polynomial roots of the 3x3 matrix
    eps, gamma = -0.1, 0.005
    beta = bl.beta_for_site1_energy(eps, gamma, 0.5)
    fp = bl.damped_driven_fixed_point(eps, gamma, beta)
    lin = bl.two_site_jacobian(fp, eps, gamma, beta)
    j = lin.jacobian
    coeffs = np.poly(j)
    roots = np.sort_complex(np.roots(coeffs))
    assert np.max(np.abs(np.sort_complex(lin.eigenvalues) - roots)) < 1e-10
