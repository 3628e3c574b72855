"""Tests for the Clifford identities and the finite oscillator model."""
from __future__ import annotations

from fractions import Fraction
from random import Random

import pytest

from symsemi.qlinalg import SparseMat, kernel_basis
from symsemi.cliffordlab import (
    BadDimension,
    DimensionMismatch,
    EXACT_DIM_LIMIT,
    FLOAT_DIM_LIMIT,
    NoRationalRoot,
    NotUnit,
    Sector,
    Singular,
    TruncationTooSmall,
    clifford,
    dvol_action,
    eta_scaling,
    gaussian_gram,
    gaussian_moment,
    hodge_star,
    kernel_and_parity,
    model_L,
    omega_skew,
    omega_wedge,
    random_model_matrix,
    random_rational_orthogonal,
    random_rational_unit_vector,
    sector_matrix_D,
    sector_matrix_L,
    spectrum_scaling,
    verify_car,
    verify_complex_structure,
    verify_volume_omega,
    verify_volume_star,
)
from oracles import (car_oracle, gaussian_matching_oracle,
                     gaussian_moment_oracle, star_sign_oracle)

EYE4 = [[1 if i == j else 0 for j in range(4)] for i in range(4)]


def basis_vector(m, i):
    return [1 if j == i else 0 for j in range(m)]


# -- exterior-algebra operators ------------------------------------------


def test_chat_on_scalar_is_wedge():
    # chat(e_1) applied to the empty form is e^1 (mask 1).
    op = clifford(basis_vector(4, 0), "chat")
    col = {r: v for (r, c), v in op.mat.entries.items() if c == 0}
    assert col == {1: Fraction(1)}


def test_c_on_scalar_is_wedge_too():
    op = clifford(basis_vector(4, 0), "c")
    col = {r: v for (r, c), v in op.mat.entries.items() if c == 0}
    assert col == {1: Fraction(1)}


def test_clifford_rejects_bad_input():
    with pytest.raises(ValueError):
        clifford([1, 0, 0, 0], "dagger")
    with pytest.raises(DimensionMismatch):
        clifford([], "chat")


def test_volume_action_examples():
    vol = dvol_action(4)
    # On the empty form it produces the volume form with sign +1.
    assert {r: v for (r, c), v in vol.mat.entries.items() if c == 0} == {
        15: Fraction(1)}
    # On e^1 it produces -e^{234} (mask 0b1110 = 14).
    assert {r: v for (r, c), v in vol.mat.entries.items() if c == 1} == {
        14: Fraction(-1)}


def test_volume_action_is_its_own_transpose():
    vol = dvol_action(4)
    assert vol.mat == vol.mat.transpose()
    vol8 = dvol_action(8)
    assert vol8.mat == vol8.mat.transpose()


def test_volume_action_needs_multiple_of_four():
    with pytest.raises(BadDimension):
        dvol_action(6)


def test_double_star_sign_by_degree():
    m = 4
    twice = (hodge_star(m) @ hodge_star(m)).mat
    for mask in range(1 << m):
        k = bin(mask).count("1")
        expect = Fraction(-1 if (k * (m - k)) % 2 else 1)
        assert twice.get(mask, mask) == expect
    # Degree 1 in dimension 4 really does pick up the sign.
    assert twice.get(1, 1) == -1


def test_star_signs_match_permutation_oracle():
    m = 4
    star = hodge_star(m).mat
    full = (1 << m) - 1
    for mask in range(1 << m):
        assert star.get(full & ~mask, mask) == star_sign_oracle(mask, m)


def test_omega_wedge_on_scalar():
    # The standard form pairs coordinates (1,2) and (3,4).
    col = {r: v for (r, c), v in omega_wedge(4).mat.entries.items() if c == 0}
    assert col == {0b0011: Fraction(1), 0b1100: Fraction(1)}


def test_omega_skew_is_skew_symmetric():
    sk = omega_skew(4).mat
    assert sk.transpose() == sk.scale(-1)
    z = SparseMat.zeros(16, 16)
    block = SparseMat.block([[sk, z], [z, sk.scale(-1)]])
    assert block.transpose() == block.scale(-1)


# -- identity verdicts ----------------------------------------------------


def test_car_identities_exact_m4_and_m8():
    for m in (4, 8):
        verdict = verify_car(m)
        assert verdict.passed
        assert verdict.mode == "exact"
        assert verdict.max_residual == 0.0
        # Independent signed-permutation check of the same relations.
        assert car_oracle(m)


def test_volume_identities_exact_m4_and_m8():
    for m in (4, 8):
        for verify in (verify_volume_star, verify_volume_omega):
            verdict = verify(m)
            assert verdict.passed and verdict.max_residual == 0.0


def test_volume_identities_reject_m6():
    with pytest.raises(BadDimension):
        verify_volume_star(6)


def test_dimension_limits():
    assert EXACT_DIM_LIMIT == 8 and FLOAT_DIM_LIMIT == 12
    with pytest.raises(BadDimension):
        verify_car(EXACT_DIM_LIMIT + 4, "exact")
    with pytest.raises(BadDimension):
        verify_car(FLOAT_DIM_LIMIT + 4, "float")
    with pytest.raises(BadDimension):
        model_L([[1 if i == j else 0 for j in range(12)] for i in range(12)],
                1, "exact")


def test_complex_structure_canonical_vector():
    verdict = verify_complex_structure(
        [Fraction(3, 5), Fraction(4, 5), 0, 0])
    assert verdict.passed and verdict.max_residual == 0.0


def test_complex_structure_random_unit_vectors():
    rng = Random(31)
    for _ in range(10):
        v = random_rational_unit_vector(4, rng)
        assert sum(x * x for x in v) == 1
        assert verify_complex_structure(v).passed


def test_complex_structure_rejects_non_unit():
    with pytest.raises(NotUnit):
        verify_complex_structure([2, 0, 0, 0])


# -- the model operator ---------------------------------------------------


def test_model_operator_diag_1234():
    op = model_L([[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 3, 0], [0, 0, 0, 4]], 1)
    assert op.mode == "exact"
    assert op.det_sign == 1
    assert op.trace_sqrt() == 10
    assert op.sqrt_gram @ op.sqrt_gram == op.a.transpose() @ op.a


def test_model_rejects_bad_inputs():
    with pytest.raises(Singular):
        model_L([[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 1)
    with pytest.raises(BadDimension):
        model_L([[1 if i == j else 0 for j in range(6)] for i in range(6)], 1)
    with pytest.raises(ValueError):
        model_L(EYE4, 0)
    with pytest.raises(ValueError):
        model_L(EYE4, 1, "sideways")


def test_model_exact_mode_needs_rational_root():
    shear = [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    with pytest.raises(NoRationalRoot):
        model_L(shear, 1, "exact")
    # Float mode happily approximates the same matrix.
    op = model_L(shear, 1, "float")
    assert op.mode == "float"
    assert op.sqrt_residual <= 1e-9


def test_model_sqrt_gram_validation():
    bad = SparseMat.from_rows([[2, 0, 0, 0], [0, 1, 0, 0],
                               [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(ValueError):
        model_L(EYE4, 1, "exact", sqrt_gram=bad)
    asym = SparseMat.from_rows([[1, 1, 0, 0], [0, 1, 0, 0],
                                [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(ValueError):
        model_L(EYE4, 1, "exact", sqrt_gram=asym)


def test_kernel_and_parity_examples():
    op = model_L(EYE4, 1)
    assert kernel_and_parity(op) == (1, 0)
    flipped = model_L([[-1, 0, 0, 0], [0, 1, 0, 0],
                       [0, 0, 1, 0], [0, 0, 0, 1]], 1)
    assert kernel_and_parity(flipped) == (1, 1)
    # A higher polynomial cap finds no additional kernel.
    assert kernel_and_parity(op, cap=1) == (1, 0)


def test_kernel_and_parity_float_mode():
    rng = Random(17)
    rows = [[Fraction(rng.randint(1, 3)) if j > i else Fraction(0)
             for j in range(4)] for i in range(4)]
    for i in range(4):
        rows[i][i] = Fraction(rng.randint(1, 3))
    op = model_L(rows, 1, "float")
    assert op.det_sign == 1
    assert kernel_and_parity(op) == (1, 0)


# -- spectrum and eta scaling --------------------------------------------


def test_spectrum_scaling_identity_matrix():
    verdict = spectrum_scaling(EYE4, (1, 10, 100), cap=2, mode="exact")
    assert verdict.passed
    assert verdict.mode == "exact"
    assert verdict.structure_ok and verdict.blocks_match
    assert verdict.max_deviation == 0.0
    assert verdict.gap == 2.0
    assert verdict.spectrum[0] == 0.0


def test_spectrum_scaling_degenerate_diagonal():
    verdict = spectrum_scaling([[1, 0, 0, 0], [0, 1, 0, 0],
                                [0, 0, 2, 0], [0, 0, 0, 2]],
                               (1, 10, 100), cap=2, mode="exact")
    assert verdict.passed and verdict.blocks_match


def test_spectrum_scaling_input_guards():
    with pytest.raises(ValueError):
        spectrum_scaling(EYE4, (1, 10), cap=2)
    with pytest.raises(ValueError):
        spectrum_scaling(EYE4, (1, 10, 100), cap=1)
    with pytest.raises(ValueError):
        spectrum_scaling(EYE4, (1, 1, 10), cap=2)


def test_eta_scaling_identity_matrix():
    verdict = eta_scaling(EYE4, (1, 4, 16), mode="exact")
    assert verdict.passed
    assert verdict.mode == "exact"
    assert verdict.c1_squared == Fraction(1, 8)
    assert verdict.constant and verdict.orthogonal
    assert not verdict.source_vanished
    assert abs(verdict.c1 - 0.3535533905932738) < 1e-15


def test_eta_scaling_float_mode():
    verdict = eta_scaling(EYE4, (1, 4, 16), mode="float")
    assert verdict.passed
    assert abs(verdict.c1 - 0.35355339059327373) <= 1e-6


def test_eta_scaling_input_guards():
    with pytest.raises(TruncationTooSmall):
        eta_scaling(EYE4, (1, 4, 16), cap=0)
    with pytest.raises(ValueError):
        eta_scaling(EYE4, (5,))


def test_eta_source_orthogonal_to_ground_state():
    # The skew form action applied to the ground form is orthogonal to it,
    # for random coefficient matrices of both determinant signs.
    rng = Random(19)
    skew = omega_skew(4).mat
    for trial in range(20):
        a, s = random_model_matrix(4, rng, 1 if trial % 2 else -1)
        op = model_L(a, 1, "exact", sqrt_gram=s)
        ker = kernel_basis(op.form_op)
        assert ker.cols == 1
        src = skew @ ker
        dot = sum((src.get(r, 0) * ker.get(r, 0) for r in range(16)),
                  Fraction(0))
        assert dot == 0


# -- sector machinery -----------------------------------------------------


def test_sector_bases_are_prefix_compatible():
    small = Sector(4, 1)
    large = Sector(4, 2)
    assert large.monomials[:len(small.monomials)] == small.monomials
    assert small.degree_of((len(small.monomials) - 1) << 4) == 1


def test_dirac_squares_to_laplacian():
    rng = Random(5)
    a, s = random_model_matrix(4, rng, -1)
    op = model_L(a, 1, "exact", sqrt_gram=s)
    comp = sector_matrix_D(op, 3, 4) @ sector_matrix_D(op, 2, 3)
    lap = sector_matrix_L(op, 2)
    size = Sector(4, 2).size
    # The composite never escapes the degree <= 2 block ...
    assert all(r < size for (r, _) in comp.entries)
    # ... and agrees with the second-order operator there, exactly.
    sub = SparseMat(size, size, dict(comp.entries))
    assert sub == lap


def test_dirac_annihilates_ground_state():
    rng = Random(5)
    a, s = random_model_matrix(4, rng, -1)
    op = model_L(a, 1, "exact", sqrt_gram=s)
    delta = kernel_basis(op.form_op)
    assert (sector_matrix_D(op, 0, 1) @ delta).is_zero()


def test_dirac_truncation_guard():
    op = model_L(EYE4, 1)
    with pytest.raises(TruncationTooSmall):
        sector_matrix_D(op, 0, 0)


def test_gaussian_gram_low_degrees():
    op = model_L(EYE4, 1)
    gram = gaussian_gram(op, 1)
    # Constant monomial then the four coordinates, variance 1/2 each.
    expect = [[Fraction(1), 0, 0, 0, 0]] + [
        [0] * (1 + i) + [Fraction(1, 2)] + [0] * (3 - i) for i in range(4)]
    assert gram.to_rows() == [[Fraction(x) for x in row] for row in expect]


def test_gaussian_moments_match_symbolic_integration():
    half = [[Fraction(1, 2)]]
    cache: dict = {}
    for alpha, expect in (((2,), Fraction(1, 2)), ((4,), Fraction(3, 4)),
                          ((6,), Fraction(15, 8)), ((3,), Fraction(0))):
        got = gaussian_moment(half, alpha, cache)
        assert got == expect
        assert got == gaussian_moment_oracle(half, alpha)
    cov = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    assert gaussian_moment(cov, (1, 1), {}) == gaussian_moment_oracle(
        cov, (1, 1)) == 1


def test_gaussian_moments_match_wick_pairings():
    cov = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    cache: dict = {}
    for alpha, expect in (((1, 1), Fraction(1)), ((2, 2), Fraction(4)),
                          ((3, 1), Fraction(6)), ((1, 2), Fraction(0))):
        got = gaussian_moment(cov, alpha, cache)
        assert got == expect
        assert got == gaussian_matching_oracle(cov, alpha)
    rng = Random(37)
    dense = [[Fraction(rng.randint(-2, 2)) for _ in range(3)]
             for _ in range(3)]
    sym = [[dense[i][j] + dense[j][i] for j in range(3)] for i in range(3)]
    cache = {}
    for alpha in ((2, 0, 0), (1, 1, 0), (2, 1, 1), (0, 2, 2), (1, 1, 2)):
        assert gaussian_moment(sym, alpha, cache) == \
            gaussian_matching_oracle(sym, alpha)


# -- rational random sources ----------------------------------------------


def test_random_orthogonal_is_orthogonal():
    rng = Random(23)
    for _ in range(5):
        q = random_rational_orthogonal(4, rng)
        assert q.transpose() @ q == SparseMat.identity(4)


def test_random_model_matrix_contract():
    rng = Random(29)
    for sign in (1, -1):
        a, s = random_model_matrix(4, rng, sign)
        assert s == s.transpose()
        assert s @ s == a.transpose() @ a
        op = model_L(a, 1, "exact", sqrt_gram=s)
        assert op.det_sign == sign
