"""Coleman integrals of x^i dx/(2y) on odd-degree models y^2 = Q(x) over Z_p.

Points are pairs (x, y) of PadicNumbers.  Global integrals go through
Teichmuller points, which the Frobenius lift x -> x^p fixes; there
phi^* w_i = sum_j F_ij w_j + d h_i turns into a linear system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import polys as P
from .cohomology import FrobeniusData
from .padic import INF, PadicNumber, PrecisionError, teichmuller
from .padic_matrix import PadicMatrix, padic_linear_solve


class ColemanError(ValueError):
    pass


Point = tuple[PadicNumber, PadicNumber]


@dataclass(frozen=True)
class ResidueDisk:
    """Residue disk of an affine F_p-point (xbar, ybar), centred at its Teichmuller lift."""

    p: int
    xbar: int
    ybar: int

    @property
    def is_weierstrass(self) -> bool:
        return self.ybar % self.p == 0

    @classmethod
    def of(cls, P: Point) -> ResidueDisk:
        x, y = P
        if x.val < 0 or y.val < 0:
            raise ColemanError("point is in a disk at infinity")
        return cls(x.p, x.residue(1), y.residue(1))


def evaluate(Q: Sequence[int], x: PadicNumber) -> PadicNumber:
    acc = PadicNumber.zero(x.p, x.prec + 64)
    for c in reversed(Q):
        acc = acc * x + int(c)
    return acc


def padic_sqrt(a: PadicNumber, residue: int | None = None) -> PadicNumber:
    """Square root of a p-adic unit, congruent to ``residue`` mod p if given."""
    p = a.p
    if a.is_zero() or a.val != 0:
        raise ColemanError("square root only implemented for units")
    from .hyperelliptic import sqrt_mod

    r = sqrt_mod(a.residue(1), p)
    if r is None:
        raise ColemanError("not a square modulo p")
    if residue is not None:
        if (residue - r) % p and (residue + r) % p:
            raise ColemanError("requested residue is not a square root")
        if (residue + r) % p == 0:
            r = -r % p
    N = a.prec
    k = 1
    x = r
    while k < N:
        k = min(2 * k, N)
        m = p**k
        x = (x - (x * x - a.residue(k)) * pow(2 * x, -1, m)) % m
    return PadicNumber.from_int(x, p, N)


def lift_point(Q: Sequence[int], x, p: int, N: int, ybar: int) -> Point:
    """The point with given x-coordinate whose y reduces to ybar."""
    X = x if isinstance(x, PadicNumber) else PadicNumber.from_rational(x, p, N)
    return X, padic_sqrt(evaluate(Q, X).add_bigoh(N), ybar)


def teichmuller_point(Q: Sequence[int], P: Point, N: int) -> Point:
    x, y = P
    p = x.p
    if y.residue(1) == 0:
        raise ColemanError("Weierstrass disk")
    xt = PadicNumber.from_int(teichmuller(x.residue(1), p, N), p, N)
    return lift_point(Q, xt, p, N, y.residue(1))


def involution(P: Point) -> Point:
    return P[0], -P[1]


# ---------------------------------------------------------------------------
# tiny integrals


def _series_mul(a: list, b: list, n: int, zero) -> list:
    out = [zero] * n
    for i, x in enumerate(a[:n]):
        if x.is_zero():
            continue
        for j, y in enumerate(b[: n - i]):
            out[i + j] = out[i + j] + x * y
    return out


def tiny_integrals(Q: Sequence[int], P: Point, R: Point, N: int, terms: int | None = None) -> list[PadicNumber]:
    """int_P^R x^i dx/(2y), i < 2g, for P, R in the same non-Weierstrass disk."""
    xP, yP = P
    xR, yR = R
    p = xP.p
    g = (len(Q) - 2) // 2
    if ResidueDisk.of(P) != ResidueDisk.of(R):
        raise ColemanError("points are not in the same residue disk")
    if yP.residue(1) == 0:
        raise ColemanError("tiny integrals in Weierstrass disks are not supported")
    tau = xR - xP
    if tau.is_zero():
        if (yR - yP).is_zero():
            return [PadicNumber.zero(p, N) for _ in range(2 * g)]
        raise ColemanError("distinct points with equal x in one disk")
    v = int(tau.val)
    if terms is None:
        terms = 1
        while (terms + 1) * v - _ilog(terms + 1, p) < N + 2:
            terms += 1
        terms += 2
    work = N + _ilog(terms + 1, p) + 4
    zero = PadicNumber.zero(p, work)
    one = PadicNumber.from_int(1, p, work)
    X = xP.add_bigoh(work)
    # Q(X + t) as a polynomial in t
    Qt = [zero]
    for c in reversed(Q):
        Qt = [zero] + Qt  # multiply by (X + t): shift ...
        for k in range(len(Qt) - 1):
            Qt[k] = Qt[k] + X * Qt[k + 1]
        Qt[0] = Qt[0] + int(c)
    y2inv = (yP * yP).inverse().add_bigoh(work)
    u = [zero] + [c * y2inv for c in Qt[1:]]
    u = (u + [zero] * terms)[:terms]
    # (1 + u)^(-1/2) = sum_k binom(-1/2, k) u^k
    s = [zero] * terms
    s[0] = one
    uk = [one] + [zero] * (terms - 1)
    binom = Fraction(1)
    for k in range(1, terms):
        binom *= Fraction(-1, 2) - (k - 1)
        binom /= k
        uk = _series_mul(uk, u, terms, zero)
        c = PadicNumber.from_rational(binom, p, work + 10)
        s = [a + c * b for a, b in zip(s, uk)]
    half_inv_y = (yP * 2).inverse().add_bigoh(work)
    s = [c * half_inv_y for c in s]
    out = []
    xi = [one] + [zero] * (terms - 1)  # (X + t)^i
    for i in range(2 * g):
        integrand = _series_mul(xi, s, terms, zero)
        total = PadicNumber.zero(p, N)
        tpow = tau
        for n, a in enumerate(integrand):
            total = total + a * tpow / (n + 1)
            tpow = tpow * tau
        out.append(total.add_bigoh(N))
        xi = _series_mul(xi, [X, one], terms, zero)
    return out


def _ilog(n: int, p: int) -> int:
    e = 0
    while n >= p:
        n //= p
        e += 1
    return e


# ---------------------------------------------------------------------------
# global integrals


def basis_integrals(P: Point, R: Point, frob: FrobeniusData) -> list[PadicNumber]:
    """int_P^R x^i dx/(2y) for i < 2g via the Frobenius equation."""
    Q = frob.Q
    N = frob.N
    p = frob.p
    g = frob.genus
    for pt in (P, R):
        if pt[0].val < 0:
            raise ColemanError("endpoint in a disk at infinity")
        if pt[1].residue(1) == 0:
            raise ColemanError("endpoint in a Weierstrass disk")
    Pt = teichmuller_point(Q, P, N + 2)
    Rt = teichmuller_point(Q, R, N + 2)
    F = frob.matrix
    n = 2 * g
    diff = [frob.primitive(i, *Rt) - frob.primitive(i, *Pt) for i in range(n)]
    I = PadicMatrix.identity(n, p, N + 10)
    M = I - F
    rhs = PadicMatrix(p, tuple((d,) for d in diff))
    try:
        v = padic_linear_solve(M, rhs)
    except PrecisionError as exc:
        raise ColemanError("I - F is singular: data corruption suspected") from exc
    middle = [v[i, 0] for i in range(n)]
    t1 = tiny_integrals(Q, P, Pt, N)
    t2 = tiny_integrals(Q, Rt, R, N)
    return [(a + b + c).add_bigoh(N) for a, b, c in zip(t1, middle, t2)]


def integral_from_infinity(P: Point, frob: FrobeniusData) -> list[PadicNumber]:
    """int_inf^P x^i dx/(2y), using the hyperelliptic involution."""
    half = PadicNumber.from_rational(Fraction(1, 2), frob.p, frob.N + 10)
    return [c * half for c in basis_integrals(involution(P), P, frob)]


def abelian_log(
    points: Sequence[tuple[int, Point]],
    frob: FrobeniusData,
    holomorphic: Sequence[Sequence[PadicNumber]] | None = None,
) -> list[PadicNumber]:
    """log of sum n_k [P_k - inf] against holomorphic forms.

    ``holomorphic`` gives rows of coefficients on the basis x^i dx/(2y)
    (default: the first g basis forms).
    """
    g = frob.genus
    p, N = frob.p, frob.N
    total = [PadicNumber.zero(p, N) for _ in range(2 * g)]
    for n, pt in points:
        if n:
            vals = integral_from_infinity(pt, frob)
            total = [a + b * n for a, b in zip(total, vals)]
    if holomorphic is None:
        return total[:g]
    out = []
    for row in holomorphic:
        acc = PadicNumber.zero(p, N)
        for c, t in zip(row, total):
            acc = acc + c * t
        out.append(acc.add_bigoh(N))
    return out


def split_mumford(a: Sequence, b: Sequence, Q: Sequence[int], p: int, N: int) -> list[Point]:
    """Q_p-points of a Mumford divisor (a, b) with rational coefficients, a split mod p."""
    a = [Fraction(c) for c in a]
    b = [Fraction(c) for c in b]
    mod = p ** (N + 4)

    def red(q: Fraction, m: int) -> int:
        return q.numerator * pow(q.denominator, -1, m) % m

    ai = [red(c, mod) for c in a]
    roots = [r for r in range(p) if P.peval(ai, r, p) == 0]
    da = P.pderiv(ai, mod)
    if len(roots) != len(a) - 1:
        raise ColemanError("divisor does not split into distinct Q_p-points")
    out = []
    for r in roots:
        if P.peval(da, r, p) % p == 0:
            raise ColemanError("repeated root modulo p")
        k = 1
        while k < N + 4:
            k = min(2 * k, N + 4)
            m = p**k
            r = (r - P.peval(ai, r, m) * pow(P.peval(da, r, m), -1, m)) % m
        x = PadicNumber.from_int(r, p, N + 4)
        y = PadicNumber.from_int(P.peval([red(c, mod) for c in b], r, mod), p, N + 4)
        out.append((x, y))
    return out


# ---------------------------------------------------------------------------
# local series with integer coefficients modulo p^M


def _smul(a: list[int], b: list[int], n: int, mod: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return [c % mod for c in out]


def _sinv(a: list[int], n: int, mod: int) -> list[int]:
    a = list(a) + [0] * n
    inv0 = pow(a[0], -1, mod)
    out = [inv0] + [0] * (n - 1)
    for k in range(1, n):
        acc = sum(a[i] * out[k - i] for i in range(1, k + 1))
        out[k] = -acc * inv0 % mod
    return out


def _ssqrt(a: list[int], s0: int, n: int, mod: int) -> list[int]:
    """Square root of a power series with a[0] = s0^2, s0 a unit."""
    a = list(a) + [0] * n
    inv = pow(2 * s0, -1, mod)
    s = [s0 % mod] + [0] * (n - 1)
    for k in range(1, n):
        acc = a[k] - sum(s[i] * s[k - i] for i in range(1, k))
        s[k] = acc * inv % mod
    return s


def _disk_y(Q: Sequence[int], xc: int, yc: int, n: int, mod: int) -> list[int]:
    """y(t) on the disk through (xc, yc), x = xc + t."""
    Qt = P.pcompose([int(c) % mod for c in Q], [xc % mod, 1], mod)
    return _ssqrt(Qt, yc, n, mod)


def _omega_pt_series(Q, pole: tuple[int, int], centre: tuple[int, int], n: int, mod: int, p: int):
    """(y + y_P)/(x - x_P) dx/(2y) as a series in t = x - x_centre.

    The centre must not lie in the residue disk of P = pole.
    """
    xP, yP = pole
    xc, yc = centre
    extra = n + 40
    y = _disk_y(Q, xc, yc, extra, mod)
    yinv = _sinv(y, n, mod)
    D = (xc - xP) % mod
    if D % p:
        Dinv = pow(D, -1, mod)
        A = [pow(-1, k) * pow(Dinv, k + 1, mod) % mod for k in range(n)]
        num = list(y[:n])
        num[0] = (num[0] + yP) % mod
        q = _smul(num, A, n, mod)
    else:
        # disk of wP: divided difference (y(t) - y(tau)) / (t - tau), y(tau) = -y_P
        if (yc + yP) % p:
            raise ColemanError("series centre lies in the disk of the pole")
        tau = (xP - xc) % mod
        q = [0] * n
        for k in range(n):
            acc, tp = 0, 1
            for m in range(k + 1, extra):
                acc += y[m] * tp
                tp = tp * tau % mod
            q[k] = acc % mod
    half = pow(2, -1, mod)
    return [c * half % mod for c in _smul(q, yinv, n, mod)]


def _integrate_to(series: list[int], tau: int, p: int, N: int) -> PadicNumber:
    """sum_n c_n tau^(n+1)/(n+1)."""
    total = PadicNumber.zero(p, N)
    tp = tau
    mod_hint = None
    for n, c in enumerate(series):
        if c and tp:
            total = total + PadicNumber.from_int(c * tp, p, N + 2 * _ilog(n + 1, p) + 4) / (n + 1)
        tp = tp * tau
    return total.add_bigoh(N)


def _ival(x: int, p: int) -> int:
    if x == 0:
        return 10**9
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# cup product on the odd model (coefficients modulo p^M)


def _infinity_s(Q: Sequence[int], n: int, mod: int) -> list[int]:
    """s(t) with x = t^-2, y = t^-d s(t), as a series in t."""
    d = len(Q) - 1
    base = [0] * (2 * d + 1)
    for k, c in enumerate(Q):
        base[2 * (d - k)] = (base[2 * (d - k)] + c) % mod
    return _ssqrt(base, 1, n, mod)


def cup_product_odd(Q: Sequence[int], p: int, N: int) -> PadicMatrix:
    """C[i][j] = Res_inf(int(w_i) w_j) for w_i = x^i dx/(2y) on a monic odd model over Z_p."""
    d = len(Q) - 1
    g = (d - 1) // 2
    mod = p ** (N + 4)
    n = 4 * g + 4
    sinv = _sinv(_infinity_s(Q, n, mod), n, mod)
    # w_i = -t^(2g-2-2i) sinv(t) dt
    def laurent(i):
        return 2 * g - 2 - 2 * i, [(-c) % mod for c in sinv]

    C = [[None] * (2 * g) for _ in range(2 * g)]
    for i in range(2 * g):
        li, ci = laurent(i)
        Fi = []
        for k, c in enumerate(ci):
            e = li + k
            if e + 1 > 2 * g:
                break
            Fi.append(c * pow(e + 1, -1, mod) % mod if c else 0)
        lF = li + 1
        for j in range(2 * g):
            lj, cj = laurent(j)
            r = 0
            for k, a in enumerate(Fi):
                m = -1 - lF - k - lj
                if 0 <= m < len(cj):
                    r += a * cj[m]
            C[i][j] = PadicNumber.from_int(r % mod, p, N)
    return PadicMatrix(p, tuple(tuple(r) for r in C))


# ---------------------------------------------------------------------------
# Coleman-Gross local height at p


Divisor = Sequence[tuple[int, Point]]


@dataclass
class HeightContext:
    """Data shared by height computations on one curve at one prime."""

    frob: FrobeniusData
    cup: PadicMatrix
    s1: PadicMatrix
    s2: PadicMatrix

    @classmethod
    def build(cls, frob: FrobeniusData, cup: PadicMatrix | None = None) -> HeightContext:
        from .cohomology import unit_root_splitting

        if cup is None:
            cup = cup_product_odd(frob.Q, frob.p, frob.N)
        s1, s2 = unit_root_splitting(frob.matrix)
        return cls(frob, cup, s1, s2)

    @property
    def p(self) -> int:
        return self.frob.p

    @property
    def N(self) -> int:
        return self.frob.N


def _check_divisor(D: Divisor, p: int):
    if sum(n for n, _ in D) != 0:
        raise ColemanError("divisor must have degree 0")
    for _, (x, y) in D:
        if x.val < 0:
            raise ColemanError("support at infinity is not supported")
        if y.residue(1) == 0:
            raise ColemanError("Weierstrass support is not supported")


def _ints(pt: Point, mod_exp: int) -> tuple[int, int]:
    return pt[0].residue(mod_exp), pt[1].residue(mod_exp)


def psi(D: Divisor, ctx: HeightContext) -> list[PadicNumber]:
    """Coefficient vector of Psi(w_D) for w_D = sum n_P (y + y_P)/(x - x_P) dx/(2y)."""
    frob = ctx.frob
    p, N = frob.p, frob.N
    g = frob.genus
    Q = frob.Q
    d = len(Q) - 1
    M = N + 6
    mod = p**M
    n = 4 * g + 6
    s = _infinity_s(Q, n, mod)
    sinv = _sinv(s, n, mod)
    # omega_D = -sum n_P [sum_k>=1 x_P^k t^(2k-1) + y_P t^(d-1) sinv / (1 - x_P t^2)] dt
    f1 = [0] * n
    for mult, pt in D:
        xP, yP = _ints(pt, M)
        geo = [0] * n
        for k in range(0, n, 2):
            geo[k] = pow(xP, k // 2, mod)
        for k in range(1, n // 2 + 1):
            if 2 * k - 1 < n:
                f1[2 * k - 1] -= mult * pow(xP, k, mod)
        tail = _smul(sinv, geo, n, mod)
        for k, c in enumerate(tail):
            if d - 1 + k < n:
                f1[d - 1 + k] -= mult * yP * c
    f1 = [c % mod for c in f1]
    F1 = [0] + [f1[k] * pow(k + 1, -1, mod) % mod for k in range(2 * g)]  # integral, from t^1
    sym = []
    ints = [PadicNumber.zero(p, N) for _ in range(2 * g)]
    for mult, pt in D:
        vals = integral_from_infinity(pt, frob)
        ints = [a + b * mult for a, b in zip(ints, vals)]
    for j in range(2 * g):
        low = 2 * g - 2 - 2 * j  # w_j = -t^low sinv dt
        r = 0
        for k, a in enumerate(F1):
            m = -1 - k - low
            if 0 <= m < n:
                r -= a * sinv[m]
        res = PadicNumber.from_int(r % mod, p, N + 4)
        sym.append((res - ints[j]).add_bigoh(N))
    # sum_k c_k C[k][j] = sym_j
    rhs = PadicMatrix(p, tuple((x,) for x in sym))
    c = padic_linear_solve(ctx.cup.T, rhs)
    return [c[i, 0] for i in range(2 * g)]


@dataclass
class EtaReduction:
    """phi^* eta_a = dG + sum_j c_j u^j du/y + c_m1 eta_a on |x - a| = 1.

    Here eta_a = dx/(y (x - a)) and u = x - a.  All integers are scaled by
    p^E modulo ``mod``; G = G1(u) y - sum_t 2 S_t(u) / ((t - 2) y^(t-2)).
    """

    a: int
    p: int
    N: int
    E: int
    mod: int
    coeffs: list[int]
    c_m1: int
    G1: dict[int, int]
    S: dict[int, list[int]]


def _ppow(a: list[int], e: int, mod: int, trunc: int | None = None) -> list[int]:
    out, base = [1], list(a)
    while e:
        if e & 1:
            out = P.pmul(out, base, mod)
            if trunc is not None:
                out = out[:trunc]
        e >>= 1
        if e:
            base = P.pmul(base, base, mod)
            if trunc is not None:
                base = base[:trunc]
    return out


def reduce_eta(Q: Sequence[int], a: int, p: int, N: int) -> EtaReduction:
    """Reduce the Frobenius pullback of dx/(y (x - a)) in cohomology of X minus the x-disk of a."""
    from .cohomology import _divide, _vp, bezout

    d = len(Q) - 1
    g = (d - 1) // 2
    J = N + 4
    K = N + 4 + _ilog(p * (2 * N + 9), p)
    s = p * J
    tmax = p * (2 * K - 1)
    E = _ilog(tmax, p) + _ilog(s, p) + _ilog(d * tmax, p) + 3
    L = sum(_vp(t - 2, p) for t in range(3, tmax + 1, 2))
    L += sum(_vp(n, p) for n in range(1, s + 1)) + _ilog(d * tmax, p)
    W = N + E + L + g + 4
    mod = p ** (W + E)
    a %= mod
    Qu = P.pcompose([int(c) % mod for c in Q], [a, 1], mod)
    q0 = Qu[0]
    if q0 % p == 0:
        raise ColemanError("x = a reduces to a Weierstrass point")
    q0inv = pow(q0, -1, mod)
    dQ = P.pderiv(Qu, mod)
    _, V = bezout(Qu, p, mod)
    X = _ppow([a, 1], p, mod)
    QX = P.pcompose([int(c) % mod for c in Q], X, mod)
    Eu = P.psub(QX, _ppow(Qu, p, mod), mod)
    mt = list(X) + [0]
    mt[0] -= a
    mt[p] -= 1
    neg_mt = P.pmod([-c for c in mt], mod)
    Mser: list[int] = []
    pw = [1]
    for j in range(J):
        Mser = P.padd(Mser, [0] * (p * (J - 1 - j)) + pw, mod)
        pw = P.pmul(pw, neg_mt, mod)
    base = P.pmul(P.pscale(_ppow([a, 1], p - 1, mod), p, mod), Mser, mod)
    inv_Qu = _sinv(Qu, s, mod)
    inv4 = pow(-4, -1, mod)
    levels: dict[int, list[int]] = {}
    principal = [0] * s  # principal[k] multiplies u^(k - s)
    Ek = [1]
    for k in range(K):
        t = p * (2 * k + 1)
        ck = math.comb(2 * k, k) * pow(inv4, k, mod) * p**E % mod
        B = P.pscale(P.pmul(base, Ek, mod), ck, mod)
        Bp, Bpoly = (B[:s] + [0] * s)[:s], B[s:]
        levels[t] = P.trim(list(Bpoly))
        if any(Bp):
            m = (t - 1) // 2
            R = P.pmul(Bp, _ppow(inv_Qu, m, mod, trunc=s), mod)[:s]
            prod = P.pmul(_ppow(Qu, m, mod), R, mod)
            diff = P.psub(Bp, prod, mod) + [0] * s
            if any(c % mod for c in diff[:s]):
                raise ColemanError("internal: principal part split failed")
            levels[t] = P.padd(levels[t], diff[s:], mod)
            for i, c in enumerate(R):
                principal[i] = (principal[i] + c) % mod
        Ek = P.pmul(Ek, Eu, mod)
    S_t: dict[int, list[int]] = {}
    for t in range(max(levels), 2, -2):
        A = levels.pop(t, [])
        if not A:
            continue
        if len(A) > d:
            q, A = P.pdivmod_monic(A, Qu, mod)
            levels[t - 2] = P.padd(levels.get(t - 2, []), q, mod)
        if not A:
            continue
        Sp = P.pdivmod_monic(P.pmul(A, V, mod), Qu, mod)[1]
        R, rem = P.pdivmod_monic(P.psub(A, P.pmul(Sp, dQ, mod), mod), Qu, mod)
        if rem:
            raise ColemanError("internal: Bezout reduction not exact")
        twoSp = P.pscale(P.pderiv(Sp, mod), 2, mod)
        levels[t - 2] = P.padd(levels.get(t - 2, []), P.padd(R, _divide(twoSp, t - 2, p, mod, N), mod), mod)
        S_t[t] = Sp
    A = list(levels.pop(1, [])) + [0] * (d + 2)
    half = pow(2, -1, mod)
    G1: dict[int, int] = {}
    pr = {s - k: c for k, c in enumerate(principal) if c}
    for i in range(s, 1, -1):
        b = pr.pop(i, 0) % mod
        if not b:
            continue
        n = i - 1
        # u^-i du/y = (sum_k>=1 q_k (k/2 - n) u^(k-i) du/y - d(y u^-n)) / (n q0)
        cc = _divide([b * q0inv % mod], n, p, mod, N)[0]
        G1[-n] = (G1.get(-n, 0) - cc) % mod
        for k in range(1, d + 1):
            term = cc * Qu[k] % mod * (k - 2 * n) % mod * half % mod
            e = k - i
            if e < 0:
                pr[-e] = (pr.get(-e, 0) + term) % mod
            else:
                A[e] = (A[e] + term) % mod
    c_m1 = pr.pop(1, 0) % mod
    for m in range(len(A) - 1, 2 * g - 1, -1):
        am = A[m] % mod
        if not am:
            continue
        j = m - d + 1
        c = _divide([2 * am % mod], 2 * j + d, p, mod, N)[0]
        G1[j] = (G1.get(j, 0) + c) % mod
        for k, qk in enumerate(Qu):
            if j:
                A[j - 1 + k] = (A[j - 1 + k] - c * j * qk) % mod
        for k, qk in enumerate(dQ):
            A[j + k] = (A[j + k] - c * qk * half) % mod
        if A[m] % mod:
            raise ColemanError("internal: level-1 reduction failed")
    return EtaReduction(a, p, N, E, mod, [A[j] % mod for j in range(2 * g)], c_m1, G1, S_t)


def _scaled(x: int, red: EtaReduction, extra: int = 0) -> PadicNumber:
    p = red.p
    return PadicNumber.from_int(x, p, red.N + red.E + extra + 8) / p**red.E


def _eta_point_terms(red: EtaReduction, Q: Sequence[int], S: Point, yP: int) -> PadicNumber:
    """G(S) - int_S^{phi S} eta_a, continued into the disk of (a, -y_P) when needed."""
    from .padic import padic_log

    p, N, mod = red.p, red.N, red.mod
    work = N + 8
    wmod = p ** (work + red.E + 4)
    xS = S[0].residue(work + red.E + 4)
    yS = S[1].residue(work + red.E + 4)
    a = red.a % wmod
    uS = (xS - a) % wmod
    yinv = pow(yS, -1, wmod)
    # higher levels: -2 S_t(u) / ((t - 2) y^(t-2))
    total = PadicNumber.zero(p, work)
    for t, St in red.S.items():
        v = P.peval([c % wmod for c in St], uS, wmod) * pow(yinv, t - 2, wmod) % wmod
        total = total + PadicNumber.from_int(-2 * v % wmod, p, work + red.E + 4) / (t - 2) / p**red.E
    inside = uS % p == 0
    uphi = (pow(xS, p, wmod) - a) % wmod
    if not inside:
        uinv = pow(uS, -1, wmod)
        g1 = 0
        for e, c in red.G1.items():
            g1 += c * (pow(uS, e, wmod) if e >= 0 else pow(uinv, -e, wmod))
        total = total + PadicNumber.from_int(g1 % wmod * yS % wmod, p, work + red.E + 4) / p**red.E
        # tiny integral of dx/(y (x - a)) from S to phi(S)
        n = work + 6 + _ilog(work + 6, p)
        ys = _disk_y(Q, xS, yS, n, wmod)
        ser = _smul(_sinv([uS, 1], n, wmod), _sinv(ys, n, wmod), n, wmod)
        tiny = _integrate_to(ser, (uphi - uS) % wmod, p, work)
        return (total - tiny).add_bigoh(N + 2)
    # S lies in the disk of (a, -y_P)
    if (yS + yP) % p:
        raise ColemanError("point lies in the pole disk")
    nmax = work + red.E + 6
    lo = min(red.G1)
    ylen = nmax - lo + 2
    yser = _disk_y(Q, a, -yP % wmod, ylen, wmod)
    h = 0
    upow = 1
    for n_ in range(nmax):
        hn = 0
        for e, c in red.G1.items():
            if 0 <= n_ - e < ylen:
                hn += c * yser[n_ - e]
        h += hn % wmod * upow
        upow = upow * uS % wmod
    total = total + PadicNumber.from_int(h % wmod, p, work + red.E + 4) / p**red.E
    ypinv = PadicNumber.from_int(-pow(yP, -1, wmod) % wmod, p, work + 4)  # 1/y(wP)
    mu = (pow(uS + a, p, wmod) - a) % wmod
    U = PadicNumber.from_int(uS, p, work + 4)
    Mu = PadicNumber.from_int(mu, p, work + 8)
    total = total + ypinv * (padic_log(Mu) - padic_log(U) * p)
    # tiny integral of du/(u y(u)) from u_S to u_phi with its log term
    n = work + 6
    r = _sinv(yser, n + 1, wmod)
    Uphi = PadicNumber.from_int(uphi, p, work + 4)
    tiny = ypinv * (padic_log(Uphi) - padic_log(U))
    for k in range(1, n):
        if r[k]:
            tiny = tiny + PadicNumber.from_int(r[k] * (pow(uphi, k, wmod) - pow(uS, k, wmod)) % wmod, p, work + 4) / k
    return (total - tiny).add_bigoh(N + 2)


def eta_integral(red: EtaReduction, frob: FrobeniusData, D2: Divisor, yP: int) -> PadicNumber:
    """int_{D2} dx/(y (x - a)) for a degree-0 divisor D2 away from the disk of (a, y_P)."""
    p, N = red.p, red.N
    g = frob.genus
    mod = red.mod
    # sum_j c_j u^j du/y in the basis x^k dx/(2y)
    e = [0] * (2 * g)
    for j, c in enumerate(red.coeffs):
        for k in range(j + 1):
            e[k] = (e[k] + 2 * c * math.comb(j, k) * pow(-red.a, j - k, mod)) % mod
    acc = PadicNumber.zero(p, N + 2)
    for nS, S in D2:
        acc = acc + _eta_point_terms(red, frob.Q, S, yP) * nS
        vals = integral_from_infinity(S, frob)
        for k in range(2 * g):
            acc = acc + _scaled(e[k], red) * vals[k] * nS
    return acc / (1 - p)


# ---------------------------------------------------------------------------
# Coleman-Gross local height at p


def _avoid_conjugates(D1: Divisor, D2: Divisor, frob: FrobeniusData, M: int):
    """Move points of D2 sitting exactly at some wP, P in D1, to a nearby point.

    w_{D1} is holomorphic there but its even and odd halves are not, so the
    integral up to such a point is split off as a tiny integral.
    """
    p, N, Q = frob.p, frob.N, frob.Q
    mod = p**M
    poles = [(nP, _ints(Pt, M)) for nP, Pt in D1]
    out, extra = [], PadicNumber.zero(p, N)
    for nS, S in D2:
        xS, yS = _ints(S, M)
        if not any((S[0] - Pt[0]).is_zero() and (S[1] + Pt[1]).is_zero() for _, Pt in D1):
            out.append((nS, S))
            continue
        Sn = lift_point(Q, S[0] + p, p, M, yS % p)
        centre = _ints(Sn, M)
        n = N + 8
        while n - _ilog(n, p) < N + 4:
            n += 1
        series = [0] * n
        for nP, pole in poles:
            part = _omega_pt_series(Q, pole, centre, n, mod, p)
            series = [(a + nP * b) % mod for a, b in zip(series, part)]
        extra = extra + _integrate_to(series, (xS - centre[0]) % mod, p, N) * nS
        out.append((nS, Sn))
    return out, extra


def raw_integral(D1: Divisor, D2: Divisor, frob: FrobeniusData, cache: dict | None = None) -> PadicNumber:
    """int_{D2} sum n_P (y + y_P)/(x - x_P) dx/(2y)."""
    from .padic import padic_log

    p, N = frob.p, frob.N
    cache = {} if cache is None else cache
    M = N + 12
    total = PadicNumber.zero(p, N)
    D2, shift = _avoid_conjugates(D1, D2, frob, M)
    total = total + shift
    for nP, Pt in D1:
        xP, yP = _ints(Pt, M)
        even = PadicNumber.zero(p, N + 2)
        for nS, S in D2:
            even = even + padic_log((S[0] - Pt[0]).add_bigoh(N + 6)) * nS
        key = (xP % p**(N + 8), N)
        if key not in cache:
            cache[key] = reduce_eta(frob.Q, xP, p, N)
        odd = eta_integral(cache[key], frob, D2, yP)
        half = PadicNumber.from_rational(Fraction(1, 2), p, N + 4)
        total = total + (even * half + odd * Pt[1] * half) * nP
    return total.add_bigoh(N)


def cg_height_p(D1: Divisor, D2: Divisor, ctx: HeightContext, cache: dict | None = None) -> PadicNumber:
    """Local height h_p(D1, D2) = int_{D2} w_{D1} for the unit root splitting."""
    frob = ctx.frob
    p, N = frob.p, frob.N
    g = frob.genus
    _check_divisor(D1, p)
    _check_divisor(D2, p)
    disks1 = {ResidueDisk.of(pt) for _, pt in D1}
    for _, pt in D2:
        if ResidueDisk.of(pt) in disks1:
            raise ColemanError("D1 and D2 must have support in disjoint residue disks")
    c1 = psi(D1, ctx)
    hol = ctx.s2 @ PadicMatrix(p, tuple((x,) for x in c1))
    raw = raw_integral(D1, D2, frob, cache)
    corr = PadicNumber.zero(p, N + 4)
    for nS, S in D2:
        vals = integral_from_infinity(S, frob)
        for k in range(g):
            corr = corr + hol[k, 0] * vals[k] * nS
    return (raw - corr).add_bigoh(N)
