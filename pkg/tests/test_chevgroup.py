import numpy as np
import pytest

from todamirror.chevgroup import (
    estar,
    factorize_unipotent,
    fstar,
    gauss_minus_plus,
    is_totally_positive,
    lemma_yi,
    lower_factor,
)
from todamirror.errors import FactorizationError, SingularParameterError
from todamirror.rootsys import all_reduced_words_w0


def a2_braid_map(a):
    """Pinned oracle for the A2 chart change under the braid move.

    Solved once from the 3x3 matrix identity
    x1(a1) x2(a2) x1(a3) = x2(b1) x1(b2) x2(b3).
    """
    a1, a2, a3 = a
    return np.array([a2 * a3 / (a1 + a3), a1 + a3, a1 * a2 / (a1 + a3)])


def test_a2_braid_map_matrix_identity(families, rng):
    fam = families["A2"]
    for _ in range(20):
        a = rng.uniform(0.2, 1.5, 3)
        b = a2_braid_map(a)
        lhs = fam.x_product((0, 1, 0), a)
        rhs = fam.x_product((1, 0, 1), b)
        assert lhs.distance(rhs) < 1e-13 * max(1.0, lhs.norm())


def test_estar_is_letter_sum(families, rng):
    # [PAPER] e_i^*(x_{i1}(a1)...x_{iN}(aN)) = sum of a_j over letters i
    for fam in families.values():
        word = fam.w0_word
        a = rng.uniform(0.1, 2.0, word.length)
        u = fam.x_product(word, a)
        for i in range(fam.rank):
            expect = sum(a[j] for j, l in enumerate(word.letters) if l == i)
            assert abs(estar(fam, u, i) - expect) < 1e-12 * max(1.0, expect)


def test_estar_identity_and_antisymmetry(families, rng):
    fam = families["B2"]
    for i in range(2):
        assert estar(fam, fam.identity(), i) == 0.0
    a = rng.uniform(0.1, 1.5, 4)
    u = fam.x_product(fam.w0_word, a)
    uinv = fam.x_product_inverse(fam.w0_word, a)
    for i in range(2):
        assert abs(estar(fam, uinv, i) + estar(fam, u, i)) < 1e-12


def test_estar_rejects_non_unipotent(families):
    fam = families["A2"]
    with pytest.raises(FactorizationError):
        estar(fam, fam.torus([0.3, 0.0]), 0)


def test_fstar_a1(families):
    fam = families["A1"]
    assert abs(fstar(fam, fam.y(0, 0.81), 0) - 0.81) < 1e-15


def test_gauss_constructed_example(families, rng):
    # M = y(c) * torus * x(d) in A1: fstar = c, minors nonzero
    fam = families["A1"]
    c = 0.57
    M = fam.y(0, c) @ fam.torus([0.2]) @ fam.x(0, 1.1)
    gf = gauss_minus_plus(fam, M)
    assert gf.success
    assert abs(gf.fstar[0] - c) < 1e-14


def test_gauss_a1_oracle(families):
    # M = e^{-h} x(a) w0dot: f*(ybar) = e^{alpha(h)}/a  (2x2 LU oracle)
    fam = families["A1"]
    a, hc = 0.8, 0.25
    M = fam.torus([-hc]) @ fam.x(0, a) @ fam.w0dot
    gf = gauss_minus_plus(fam, M)
    assert gf.success
    assert abs(gf.fstar[0] - np.exp(2 * hc) / a) < 1e-13


def test_gauss_fails_off_big_cell(families):
    gf = gauss_minus_plus(families["A2"], families["A2"].w0dot)
    assert not gf.success
    assert gf.failing_index is not None


def _dense_ul_free_lu(M):
    """Doolittle LU without pivoting: M = L U, L unit lower triangular."""
    n = M.shape[0]
    L = np.eye(n, dtype=complex)
    U = M.astype(complex).copy()
    for k in range(n - 1):
        for r in range(k + 1, n):
            f = U[r, k] / U[k, k]
            L[r, k] = f
            U[r, :] -= f * U[k, :]
    return L, U


def test_gauss_vs_dense_lu_type_a(families, rng):
    # type-A defining representation: f_i^*(ybar) equals the subdiagonal
    # of the unit-lower factor of the dense LU (log of L starts there)
    for name in ["A2", "A3"]:
        fam = families[name]
        N = fam.w0_word.length
        for _ in range(25):
            M = (
                fam.y_product(fam.w0_word, rng.uniform(0.2, 1.4, N))
                @ fam.torus(rng.uniform(-0.4, 0.4, fam.rank))
                @ fam.x_product(fam.w0_word, rng.uniform(0.2, 1.4, N))
            )
            gf = gauss_minus_plus(fam, M)
            assert gf.success
            L, U = _dense_ul_free_lu(M.block(0))
            for i in range(fam.rank):
                assert abs(gf.fstar[i] - L[i + 1, i]) < 1e-12 * max(1.0, abs(L[i + 1, i]))


def test_gauss_recovery_reconstructs_m(families, rng):
    # recover the full lower factor and check M = ybar * b with b in B+
    for name in ["A2", "B2", "G2"]:
        fam = families[name]
        N = fam.w0_word.length
        for _ in range(10):
            ybar_true = fam.y_product(fam.w0_word, rng.uniform(0.2, 1.3, N))
            b_true = fam.torus(rng.uniform(-0.3, 0.3, fam.rank)) @ fam.x_product(
                fam.w0_word, rng.uniform(0.1, 1.0, N)
            )
            M = ybar_true @ b_true
            ybar, coords = lower_factor(fam, M)
            assert ybar.distance(ybar_true) < 1e-10 * max(1.0, ybar_true.norm())
            # remainder fixes the highest-weight line in every module
            b = ybar.inv() @ M
            for k in range(fam.rank):
                col = b.block(k)[:, 0]
                assert np.abs(col[1:]).max() < 1e-10 * max(1.0, abs(col[0]))
            # consistency with the coefficient-only route
            gf = gauss_minus_plus(fam, M)
            for i in range(fam.rank):
                assert abs(gf.fstar[i] - fstar(fam, ybar, i)) < 1e-11


def test_factorize_round_trip_all_types(families, rng):
    for fam in families.values():
        N = fam.w0_word.length
        for _ in range(10):
            a = rng.uniform(0.1, 2.0, N)
            u = fam.x_product(fam.w0_word, a)
            rec = factorize_unipotent(fam, u)
            assert np.abs(rec - a).max() < 1e-10 * max(1.0, a.max())
            ac = rng.uniform(0.3, 1.5, N) * np.exp(1j * rng.uniform(0, 2 * np.pi, N))
            rec = factorize_unipotent(fam, fam.x_product(fam.w0_word, ac))
            assert np.abs(rec - ac).max() < 1e-9


def test_factorize_all_words(families, rng):
    for name in ["A3", "G2"]:
        fam = families[name]
        for word in all_reduced_words_w0(fam.datum):
            a = rng.uniform(0.2, 1.6, fam.w0_word.length)
            rec = factorize_unipotent(fam, fam.x_product(word, a), word)
            assert np.abs(rec - a).max() < 1e-10


def test_factorize_a2_braid_transform(families, rng):
    fam = families["A2"]
    a = rng.uniform(0.3, 1.4, 3)
    u = fam.x_product((0, 1, 0), a)
    b = factorize_unipotent(fam, u, (1, 0, 1))
    assert np.abs(b - a2_braid_map(a)).max() < 1e-11


def test_factorize_off_stratum_errors(families):
    # a_1 = 0 leaves the open stratum
    fam = families["A2"]
    u = fam.x_product((0, 1, 0), [0.0, 1.0, 0.9])
    with pytest.raises(FactorizationError):
        factorize_unipotent(fam, u)


def test_lemma_yi_zero_parameter(families, rng):
    fam = families["A2"]
    u = fam.x_product(fam.w0_word, rng.uniform(0.2, 1.2, 3))
    b, u_s = lemma_yi(fam, u, 0, 0.0)
    assert b.distance(fam.identity()) < 1e-14
    assert u_s.distance(u) < 1e-14


def test_lemma_yi_a1_torus_part(families):
    # [PAPER] the Borel factor's torus part is (1 + s e_i^*(u))^{coroot}
    fam = families["A1"]
    a, s = 0.9, 0.4
    u = fam.x(0, a)
    b, _ = lemma_yi(fam, u, 0, s)
    expect = fam.coroot_power(0, 1 + s * a) @ fam.y(0, s * (1 + s * a))
    assert b.distance(expect) < 1e-14


def test_lemma_yi_product_identity(families, rng):
    for name in ["A2", "B2", "G2"]:
        fam = families[name]
        N = fam.w0_word.length
        for _ in range(100):
            u = fam.x_product(fam.w0_word, rng.uniform(0.1, 1.5, N))
            i = int(rng.integers(0, fam.rank))
            s = float(rng.uniform(-0.5, 1.0))
            if abs(1 + s * estar(fam, u, i)) < 1e-3:
                continue
            b, u_s = lemma_yi(fam, u, i, s)
            lhs = u @ fam.y(i, s)
            rhs = b @ u_s
            assert lhs.distance(rhs) < 1e-12 * max(1.0, lhs.norm())


def test_lemma_yi_singular_parameter(families):
    fam = families["A1"]
    u = fam.x(0, 1.0)
    with pytest.raises(SingularParameterError):
        lemma_yi(fam, u, 0, -1.0)


def test_totally_positive_examples(families):
    famA2 = families["A2"]
    ok, coords = is_totally_positive(famA2, famA2.x_product((0, 1, 0), [1, 1, 1]))
    assert ok and np.allclose(coords, [1, 1, 1])
    famA1 = families["A1"]
    ok, _ = is_totally_positive(famA1, famA1.x(0, -1.0))
    assert not ok


def test_positivity_word_independent(families, rng):
    # the braid transform maps the positive octant to itself
    fam = families["A2"]
    for _ in range(20):
        a = rng.uniform(0.05, 3.0, 3)
        u = fam.x_product((0, 1, 0), a)
        ok, coords = is_totally_positive(fam, u, (1, 0, 1))
        assert ok and (coords > 0).all()
