import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import check_zeros, constructed_series
from qck.padic import PadicNumber, PrecisionError
from qck.qc import (
    CalibrationDatum,
    DiskExpansion,
    HeightDatum,
    HeightPairing,
    QCError,
    QCLocalExpansion,
    RankDeficiencyError,
    RootReport,
    UpsilonSet,
    assemble_rho,
    attach_cosets,
    calibrate_away_constants,
    dump_expansions,
    find_zeros,
    intersect_roots,
    load_expansions,
    newton_polygon_count,
    roots_of_rho,
    solve_height_pairing,
    zeros_to_cosets,
)

p, N = 7, 8


def P(n):
    return PadicNumber.from_rational(n, p, N)


def logs(rng, g=2):
    # abelian logs of points are divisible by p
    return tuple(P(p * rng.randint(-400, 400)) for _ in range(g))


def test_zeros_of_t_times_t_minus_p():
    roots = find_zeros([0, -p, 1], p, N)
    assert [(r.residue(), m) for r, m in roots] == [(0, 1), (p, 1)]


def test_double_root_times_unit():
    # (t - 3)^2 (1 + 7t)
    poly = [9, -6 + 63, 1 - 42, 7]
    assert [(r.residue(), m) for r, m in find_zeros(poly, p, 4)] == [(3, 2)]


def test_zero_series_needs_more_precision():
    with pytest.raises(PrecisionError, match="raise N"):
        find_zeros([0, p**N, 0], p, N)


def test_constructed_factorizations():
    rng = random.Random(2024)
    for _ in range(200):
        q = rng.choice([3, 5, 7, 11])
        prec = rng.randint(5, 10)
        poly, roots = constructed_series(rng, q, prec)
        assert check_zeros(poly, roots, q, prec) == []


@given(st.integers(0, 2**32), st.sampled_from([3, 5, 7]), st.integers(4, 9))
@settings(max_examples=100)
def test_multiplicity_total_matches_newton_polygon(seed, q, prec):
    poly, roots = constructed_series(random.Random(seed), q, prec)
    assert newton_polygon_count(poly, q, prec) == len(roots)
    assert sum(m for _, m in find_zeros(poly, q, prec)) == len(roots)


def test_pairing_recovered_exactly():
    rng = random.Random(1)
    alpha = {(0, 0): P(Fraction(3, 7)), (0, 1): P(5), (1, 1): P(-2)}
    H = HeightPairing(2, p, alpha)
    data = []
    for _ in range(3):
        a, b = logs(rng), logs(rng)
        data.append(HeightDatum(a, b, H(a, b)))
    sol = solve_height_pairing(data)
    assert set(sol.alpha) == {(0, 0), (0, 1), (1, 1)}
    for k in alpha:
        assert sol.alpha[k] == alpha[k]
    assert sol.residuals == ()


def test_pairing_with_away_contributions_and_residuals():
    rng = random.Random(9)
    alpha = {(0, 0): P(1), (0, 1): P(2), (1, 1): P(3)}
    H = HeightPairing(2, p, alpha)
    away = P(4)
    data = []
    for _ in range(5):
        a, b = logs(rng), logs(rng)
        data.append(HeightDatum(a, b, H(a, b) - away, away))
    sol = solve_height_pairing(data)
    assert all(sol.alpha[k] == alpha[k] for k in alpha)
    assert len(sol.residuals) == 2 and all(r.is_zero() or r.val >= 2 for r in sol.residuals)


def test_duplicate_rows_are_rank_deficient():
    rng = random.Random(3)
    a, b = logs(rng), logs(rng)
    row = HeightDatum(a, b, P(1))
    with pytest.raises(RankDeficiencyError, match="insufficiently independent") as info:
        solve_height_pairing([row, row, row])
    assert len(info.value.null_direction) == 3


def test_too_few_rows():
    rng = random.Random(3)
    with pytest.raises(QCError, match="at least 3"):
        solve_height_pairing([HeightDatum(logs(rng), logs(rng), P(1))])


def test_calibration_recovers_single_constant():
    rng = random.Random(5)
    alpha = {(0, 0): P(2), (0, 1): P(-1), (1, 1): P(Fraction(1, 3))}
    H = HeightPairing(2, p, alpha)
    c = P(Fraction(4, 3)) * P(p)
    data = []
    for m in (2, 0, 1, 0):
        a = logs(rng)
        # total height h = h_p + m c, and h = H(a, a)
        data.append(CalibrationDatum((Fraction(m),), H(a, a) - c * m, a, a))
    cal = calibrate_away_constants(data)
    assert cal.constants[0] == c
    assert all(cal.pairing.alpha[k] == alpha[k] for k in alpha)


def test_calibration_without_constants_is_plain_solve():
    rng = random.Random(6)
    H = HeightPairing(2, p, {(0, 0): P(1), (0, 1): P(0), (1, 1): P(1)})
    data = []
    for _ in range(3):
        a, b = logs(rng), logs(rng)
        data.append(CalibrationDatum((Fraction(0),), H(a, b), a, b))
    cal = calibrate_away_constants(data)
    assert cal.constants[0].is_zero()
    assert cal.pairing.alpha[(1, 1)] == P(1)


def test_calibration_reports_solution_dimension():
    rng = random.Random(7)
    a, b = logs(rng), logs(rng)
    data = [CalibrationDatum((Fraction(1),), P(1), a, b)] * 4
    with pytest.raises(RankDeficiencyError, match="dimension 3"):
        calibrate_away_constants(data)


def _expansion(rng, disks=((1, 2), (3, 4)), n=5):
    def ser():
        return tuple(P(rng.randint(0, 10**6)) for _ in range(n))

    return QCLocalExpansion(p, N, tuple(
        DiskExpansion(d, ser(), (ser(), ser()), (ser(), ser()), (P(p * rng.randint(0, 50)),)) for d in disks))


def test_expansion_file_round_trip(tmp_path):
    exp = _expansion(random.Random(4))
    path = tmp_path / "exp.json"
    dump_expansions(exp, path)
    assert load_expansions(path) == exp
    assert load_expansions(tmp_path) == exp
    raw = json.loads(path.read_text())
    raw["version"] = 99
    path.write_text(json.dumps(raw))
    with pytest.raises(QCError, match="version"):
        load_expansions(path)


def test_missing_disk_is_reported():
    exp = _expansion(random.Random(4))
    with pytest.raises(QCError, match="no expansion data"):
        exp.disk((0, 0))


def test_assemble_rho_zero_case():
    zero = tuple(P(0) for _ in range(4))
    disk = DiskExpansion((1, 1), zero, (zero, zero), (zero, zero))
    exp = QCLocalExpansion(p, N, (disk,))
    H = HeightPairing(2, p, {(0, 0): P(0), (0, 1): P(0), (1, 1): P(0)})
    (rho,) = assemble_rho(H, exp, UpsilonSet.trivial(p, N))
    assert all(c.is_zero() for c in rho.coeffs)


def test_assemble_rho_is_affine_in_pairing_and_upsilon():
    rng = random.Random(8)
    exp = _expansion(rng)
    A = HeightPairing(2, p, {(0, 0): P(1), (0, 1): P(2), (1, 1): P(3)})
    B = HeightPairing(2, p, {(0, 0): P(5), (0, 1): P(-1), (1, 1): P(0)})
    S = HeightPairing(2, p, {k: A.alpha[k] + B.alpha[k] for k in A.alpha})
    ups = UpsilonSet((P(0), P(11)))
    ra, rb, rs = (assemble_rho(H, exp, ups) for H in (A, B, S))
    r0 = assemble_rho(HeightPairing(2, p, {k: P(0) for k in A.alpha}), exp, ups)
    assert len(rs) == 4
    for x, y, z, w in zip(ra, rb, rs, r0):
        # rho_A + rho_B - rho_0 = rho_{A+B}
        assert all(a + b - c == s for a, b, c, s in zip(x.coeffs, y.coeffs, w.coeffs, z.coeffs))
    assert rs[1].coeffs[0] == rs[0].coeffs[0] - P(11)


def test_roots_of_rho_flags_known_points():
    # rho = t (t - 7) on one disk, with a known point at t = 7
    zero = tuple(P(0) for _ in range(3))
    disk = DiskExpansion((2, 3), (P(0), P(p), P(-1)), (zero, zero), (zero, zero), (P(p),))
    exp = QCLocalExpansion(p, N, (disk,))
    H = HeightPairing(2, p, {(0, 0): P(0), (0, 1): P(0), (1, 1): P(0)})
    reports = roots_of_rho(assemble_rho(H, exp, UpsilonSet.trivial(p, N)), exp)
    assert sorted((r.t0.residue(), r.matched) for r in reports) == [(0, False), (p, True)]
    assert json.loads(json.dumps(reports[0].to_json()))["multiplicity"] == 1
    assert len(intersect_roots(reports, reports, 4)) == 2


def test_cosets_base_point_and_known_integers():
    rng = random.Random(12)
    L1, L2 = logs(rng), logs(rng)
    zero = (P(0), P(0))
    tup, prec = zeros_to_cosets(zero, [L1, L2], p, N)
    assert tup == (0, 0) and prec > 0
    a1, a2 = 5, -3
    pt = tuple(x * a1 + y * a2 for x, y in zip(L1, L2))
    tup, prec = zeros_to_cosets(pt, [L1, L2], p, N)
    assert tup == (a1 % p**prec, a2 % p**prec)


def test_cosets_precision_loss_and_bad_prime():
    L1 = (P(p), P(0))
    L2 = (P(0), P(p**3))
    tup, prec = zeros_to_cosets((P(2 * p), P(3 * p**3)), [L1, L2], p, N)
    assert tup == (2 % p**prec, 3 % p**prec)
    # the second coordinate is divided by p^3
    assert prec == N - 3
    with pytest.raises(QCError, match="bad prime"):
        zeros_to_cosets((P(p), P(p)), [(P(p), P(p)), (P(p), P(p))], p, N)


def test_attach_cosets_uses_log_expansions():
    rng = random.Random(13)
    L1, L2 = logs(rng), logs(rng)
    # log1 series: constant term 2*L1 + L2, zero slope
    const = [x * 2 + y for x, y in zip(L1, L2)]
    disk = DiskExpansion((1, 1), (P(0), P(1)), tuple((c, P(0)) for c in const), ((P(0),), (P(0),)))
    exp = QCLocalExpansion(p, N, (disk,))
    rep = RootReport((1, 1), P(0), 1)
    (out,) = attach_cosets([rep], exp, [L1, L2])
    assert out.coset == (2 % p**out.coset_prec, 1)
