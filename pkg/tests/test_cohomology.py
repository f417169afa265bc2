from fractions import Fraction

import pytest
import sympy as sp

from qck.cohomology import (
    CohomologyError,
    cup_product_matrix,
    default_basis,
    frobenius_matrix,
    hecke_from_frobenius,
    load_frobenius,
    ns_class,
    recognize_integer,
    save_frobenius,
    unit_root_splitting,
    zeta_congruence,
)
from qck.hyperelliptic import count_points, l_polynomial
from qck.padic import PadicNumber
from qck.padic_matrix import PadicMatrix

QUINTIC = [1, -1, 0, 0, 0, 1]
F107 = [1, 2, 5, 2, -2, -4, -3]
BASIS107 = [
    [-1],
    [0, 1],
    [0, 0, Fraction(1, 9), Fraction(1, 3), Fraction(1, 3)],
    [Fraction(1, 18), 0, Fraction(1, 9), Fraction(1, 6)],
]


@pytest.fixture(scope="module")
def frob7():
    return frobenius_matrix(QUINTIC, 7, 6)


def test_reverse_charpoly_matches_counts(frob7):
    assert zeta_congruence(frob7.matrix, l_polynomial(QUINTIC, 7), 4)
    wrong = l_polynomial(QUINTIC, 7)
    wrong[1] += 1
    assert not zeta_congruence(frob7.matrix, wrong, 4)


def test_det_is_p_to_the_genus(frob7):
    det = frob7.matrix.det()
    assert det == PadicNumber.from_int(49, 7, det.prec)


def test_hecke_trace_matches_count(frob7):
    A = hecke_from_frobenius(frob7.matrix)
    assert recognize_integer(A.trace(), 50) == 2 * (7 + 1 - count_points(QUINTIC, 7))


def test_hecke_on_genus_one_toy():
    p, N = 5, 8
    u = PadicNumber.from_int(3, p, N)
    F = PadicMatrix.from_entries([[u, PadicNumber.zero(p, N)], [PadicNumber.zero(p, N), u.inverse() * p]])
    A = hecke_from_frobenius(F, weil_check=False)
    s = u + u.inverse() * p
    assert A[0, 0] == s and A[1, 1] == s
    assert A[0, 1].is_zero() and A[1, 0].is_zero()


def test_frobenius_rejects_bad_input():
    with pytest.raises(CohomologyError):
        frobenius_matrix(F107, 61, 4)
    with pytest.raises(CohomologyError):
        frobenius_matrix([1, -1, 0, 0, 0, 2], 7, 4)
    with pytest.raises(CohomologyError, match="bad reduction"):
        frobenius_matrix([0, 0, 0, 0, 0, 1], 7, 4)


def test_frobenius_file_round_trip(frob7, tmp_path):
    path = tmp_path / "frob.json"
    save_frobenius(frob7, path)
    back = load_frobenius(path)
    assert back.matrix == frob7.matrix
    assert back.H == frob7.H and back.S == frob7.S


def test_frobenius_cache_dir(tmp_path):
    a = frobenius_matrix(QUINTIC, 5, 4, cache_dir=tmp_path)
    assert len(list(tmp_path.glob("frob-*.json"))) == 1
    b = frobenius_matrix(QUINTIC, 5, 4, cache_dir=tmp_path)
    assert a.matrix == b.matrix


def test_cup_product_default_basis_antisymmetric_and_stable():
    C = cup_product_matrix(QUINTIC, default_basis(2))
    assert all(C[i][j] == -C[j][i] for i in range(4) for j in range(4))
    assert sp.Matrix(C).det() != 0
    assert cup_product_matrix(QUINTIC, default_basis(2), prec=80) == C


def test_cup_product_on_sextic_basis_matches_series_oracle():
    # residues at both points at infinity of y^2 = F107, computed in Q(sqrt(-3))
    t = sp.symbols("t")
    x = 1 / t
    f = sum(c * x**i for i, c in enumerate(F107))
    s = sp.sqrt(sp.expand(f * t**6 / (-3)))
    forms = [sum(sp.Rational(str(c)) * x**i for i, c in enumerate(a)) for a in BASIS107]
    n = 14
    ref = sp.zeros(4, 4)
    for sign in (1, -1):
        y = sign * sp.sqrt(-3) * t**-3 * s
        om = [sp.series(A * (-1 / t**2) / y, t, 0, n).removeO() for A in forms]
        ints = [sp.integrate(sp.expand(o), t) for o in om]
        for i in range(4):
            for j in range(4):
                ref[i, j] += sp.expand(om[j] * ints[i]).coeff(t, -1)
    ref = ref.applyfunc(sp.nsimplify)
    assert sp.Matrix(cup_product_matrix(F107, BASIS107)) == ref


def test_ns_class_rejects_scalar():
    p, N = 7, 8
    A = PadicMatrix.from_rationals([[3 * int(i == j) for j in range(4)] for i in range(4)], p, N)
    C = cup_product_matrix(QUINTIC, default_basis(2))
    with pytest.raises(CohomologyError, match="degenerate"):
        ns_class(A, C, bound=50)
    with pytest.raises(CohomologyError, match="trivial"):
        ns_class(A, C, bound=50, check_generator=False)


def test_ns_class_on_self_adjoint_hecke_matrix():
    # a Hecke matrix of X0+(107) at 61 on the sextic basis, self-adjoint for C
    h = Fraction(-1, 2)
    Aq = [[-5, 3, 0, 0], [3, -8, 0, 0], [0, h, -5, -3], [h, 0, -3, -8]]
    C = cup_product_matrix(F107, BASIS107)
    assert sp.Matrix(Aq) * sp.Matrix(C) == sp.Matrix(C) * sp.Matrix(Aq).T
    A = PadicMatrix.from_rationals(Aq, 61, 6)
    Z = ns_class(A, C)
    Zm = sp.Matrix(Z)
    assert Zm.T == -Zm
    assert (Zm * sp.Matrix(C)).trace() == 0
    assert ns_class(A, C, sign="minus") == [[-z for z in r] for r in Z]
    assert ns_class(A, C, power=2) != Z


def test_unit_root_splitting_needs_ordinary_reduction(frob7):
    # x^5 - x + 1 has a_2 = 0 at 7
    assert l_polynomial(QUINTIC, 7)[2] % 7 == 0
    with pytest.raises(CohomologyError, match="choose another p"):
        unit_root_splitting(frob7.matrix)


def test_unit_root_splitting_projectors():
    frob = frobenius_matrix([3, 1, 0, 2, 0, 1], 7, 6)
    s1, s2 = unit_root_splitting(frob.matrix)
    n = 4
    I = PadicMatrix.identity(n, 7, s1.min_prec())
    assert s1 + s2 == I
    assert s1 @ s1 == s1
    assert (s1 @ s2) == PadicMatrix.zeros(n, n, 7, s1.min_prec())
    # image of s2 is spanned by the holomorphic coordinates
    for i in range(2, 4):
        for j in range(4):
            assert s2[i, j].is_zero()
    # the unit root subspace is Frobenius stable
    Ft = frob.matrix.T
    lhs = s2 @ Ft @ s1
    assert lhs == PadicMatrix.zeros(n, n, 7, lhs.min_prec())
