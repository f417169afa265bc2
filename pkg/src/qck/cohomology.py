"""Frobenius on H^1_dR of odd-degree hyperelliptic curves, cup products, Hecke and NS classes.

The Frobenius lift is x -> x^p, y -> y^p (1 + E/y^{2p})^{1/2} with
E = Q(x^p) - Q(x)^p.  Pulled-back forms x^m dx/y^t are reduced to the basis
x^i dx/(2y), 0 <= i < 2g, keeping track of the exact parts, which Coleman
integration needs later.

Matrices follow the row convention: phi^* w_i = sum_j F[i][j] w_j.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import polys as P
from .padic import INF, PadicNumber, PrecisionError, rational_reconstruct, valuation
from .padic_matrix import PadicMatrix, deserialize_matrix, serialize_matrix


class CohomologyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# modular helpers


def _ilog(n: int, p: int) -> int:
    """floor(log_p n) for n >= 1."""
    e = 0
    while n >= p:
        n //= p
        e += 1
    return e


def _vp(n: int, p: int) -> int:
    return valuation(n, p) if n else 10**9


def solve_mod(A: list[list[int]], b: list[int], p: int, mod: int) -> list[int]:
    """Solve A x = b over Z/mod, mod a power of p, assuming det A is a p-unit."""
    n = len(A)
    M = [[x % mod for x in row] + [b[i] % mod] for i, row in enumerate(A)]
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] % p), None)
        if piv is None:
            raise CohomologyError("matrix is singular modulo p")
        M[k], M[piv] = M[piv], M[k]
        inv = pow(M[k][k], -1, mod)
        M[k] = [x * inv % mod for x in M[k]]
        for i in range(n):
            if i != k and M[i][k]:
                c = M[i][k]
                M[i] = [(x - c * y) % mod for x, y in zip(M[i], M[k])]
    return [M[i][n] for i in range(n)]


def bezout(Q: list[int], p: int, mod: int) -> tuple[list[int], list[int]]:
    """U, V with U Q + V Q' = 1 over Z/mod (Sylvester system)."""
    d = len(Q) - 1
    dQ = P.pderiv(Q, mod) + [0] * d
    dQ = dQ[:d]
    nu, nv = d - 1, d  # deg U <= d - 2, deg V <= d - 1
    size = nu + nv
    A = [[0] * size for _ in range(size)]
    for j in range(nu):
        for k, c in enumerate(Q):
            if j + k < size:
                A[j + k][j] = c
    for j in range(nv):
        for k, c in enumerate(dQ):
            if j + k < size:
                A[j + k][nu + j] = c
    rhs = [1] + [0] * (size - 1)
    sol = solve_mod(A, rhs, p, mod)
    return P.pmod(sol[:nu], mod), P.pmod(sol[nu:], mod)


# ---------------------------------------------------------------------------
# Frobenius


@dataclass
class FrobeniusData:
    """Frobenius matrix and the primitives h_i with phi^* w_i - sum_j F_ij w_j = d h_i.

    ``h_i = H_i(x) y + sum_t S_{i,t}(x) / ((2 - t) y^(t-2))`` where the stored
    integers are scaled by p^scale and known modulo ``modulus``.
    """

    Q: tuple[int, ...]
    p: int
    N: int
    matrix: PadicMatrix
    scale: int
    modulus: int
    H: list[list[int]] = field(default_factory=list)
    S: list[dict[int, list[int]]] = field(default_factory=list)

    @property
    def genus(self) -> int:
        return (len(self.Q) - 2) // 2

    def primitive(self, i: int, x: PadicNumber, y: PadicNumber) -> PadicNumber:
        """h_i(x, y) for the basis form x^i dx/(2y); y must be a unit."""
        p, N = self.p, self.N
        prec = N + self.scale + 4
        X = x.add_bigoh(prec)
        acc = _horner(self.H[i], X) * y
        yinv2 = (y * y).inverse()
        power = y.inverse()  # y^-(t-2) for t = 3
        t = 3
        for tt in sorted(self.S[i]):
            while t < tt:
                power = power * yinv2
                t += 2
            acc = acc + _horner(self.S[i][tt], X) * power * 2 / PadicNumber.from_int(2 - tt, p, prec + 10)
        denom = PadicNumber.from_int(2 * p**self.scale, p, prec + 2 * self.scale + 10)
        return (acc / denom).add_bigoh(N)


def _horner(coeffs: Sequence[int], x: PadicNumber) -> PadicNumber:
    p = x.p
    acc = PadicNumber.zero(p, x.prec + 64)
    for c in reversed(coeffs):
        acc = acc * x + PadicNumber.from_int(c, p, x.prec + 64)
    return acc


def _frobenius_parameters(d: int, p: int, N: int) -> tuple[int, int, int, int]:
    """Number of series terms K, denominator scale E, loss bound L, working digits."""
    g = (d - 1) // 2
    K = N + 2
    for _ in range(20):
        tmax = p * (2 * K - 1)
        degmax = p * 2 * g - 1 + (K - 1) * p * d
        E = _ilog(tmax, p) + _ilog(2 * degmax + d, p) + 1
        K_new = N + E + 1
        if K_new == K:
            break
        K = K_new
    tmax = p * (2 * K - 1)
    degmax = p * 2 * g - 1 + (K - 1) * p * d
    L = sum(_vp(t - 2, p) for t in range(3, tmax + 1, 2))
    L += max(_vp(2 * j + d, p) for j in range(0, degmax + 1))
    W = N + E + L + g + 2
    return K, E, L, W


def frobenius_matrix(
    Q: Sequence[int],
    p: int,
    N: int,
    cache_dir: str | os.PathLike | None = None,
) -> FrobeniusData:
    """Frobenius on x^i dx/(2y) for y^2 = Q(x), Q monic odd degree over Z_p.

    Q is given by integer coefficients (read modulo a large power of p).  The
    result carries absolute precision N.
    """
    Q = [int(c) for c in Q]
    d = len(Q) - 1
    if d % 2 == 0 or d < 3:
        raise CohomologyError("need an odd-degree model")
    if Q[-1] != 1:
        raise CohomologyError("model must be monic")
    g = (d - 1) // 2
    if p < 3:
        raise CohomologyError("p must be an odd prime")
    disc = P.discriminant(Q)
    if disc.numerator % p == 0:
        raise CohomologyError(f"bad reduction at {p}")
    key = None
    if cache_dir is not None:
        key = hashlib.sha256(json.dumps([Q, p, N]).encode()).hexdigest()[:24]
        path = Path(cache_dir) / f"frob-{key}.json"
        if path.exists():
            try:
                return load_frobenius(path)
            except (ValueError, KeyError, json.JSONDecodeError):
                path.unlink()
    data = _compute_frobenius(Q, p, N)
    if key is not None:
        save_frobenius(data, Path(cache_dir) / f"frob-{key}.json")
    return data


def _compute_frobenius(Q: list[int], p: int, N: int) -> FrobeniusData:
    d = len(Q) - 1
    g = (d - 1) // 2
    K, E, L, W = _frobenius_parameters(d, p, N)
    mod = p ** (W + E)
    Q = [c % mod for c in Q]
    dQ = P.pderiv(Q, mod)
    U, V = bezout(Q, p, mod)
    # E(x) = Q(x^p) - Q(x)^p
    Qxp = [0] * (p * d + 1)
    for k, c in enumerate(Q):
        Qxp[k * p] = c
    Qp = [1]
    base, e = Q, p
    while e:
        if e & 1:
            Qp = P.pmul(Qp, base, mod)
        base = P.pmul(base, base, mod)
        e >>= 1
    Ep = P.psub(Qxp, Qp, mod)
    # c_k = binom(-1/2, k), times p * p^E
    inv4 = pow(-4, -1, mod)
    coeffs = []
    for k in range(K):
        ck = math.comb(2 * k, k) * pow(inv4, k, mod)
        coeffs.append(ck * p ** (1 + E) % mod)
    Epows = [[1]]
    for k in range(1, K):
        Epows.append(P.pmul(Epows[-1], Ep, mod))
    half = pow(2, -1, mod)
    rows, Hs, Ss = [], [], []
    for i in range(2 * g):
        shift = p * (i + 1) - 1
        levels: dict[int, list[int]] = {}
        for k in range(K):
            t = p * (2 * k + 1)
            levels[t] = [0] * shift + P.pscale(Epows[k], coeffs[k], mod)
        tmax = max(levels)
        S_i: dict[int, list[int]] = {}
        for t in range(tmax, 2, -2):
            A = levels.pop(t, [])
            if not A:
                continue
            if len(A) > d:
                q, A = P.pdivmod_monic(A, Q, mod)
                levels[t - 2] = P.padd(levels.get(t - 2, []), q, mod)
            if not A:
                continue
            S = P.pdivmod_monic(P.pmul(A, V, mod), Q, mod)[1]
            R, rem = P.pdivmod_monic(P.psub(A, P.pmul(S, dQ, mod), mod), Q, mod)
            if rem:
                raise CohomologyError("internal: Bezout reduction not exact")
            twoSp = P.pscale(P.pderiv(S, mod), 2, mod)
            levels[t - 2] = P.padd(levels.get(t - 2, []), P.padd(R, _divide(twoSp, t - 2, p, mod, N), mod), mod)
            S_i[t] = S
        A = levels.pop(1, [])
        H = [0] * max(1, len(A) - d + 1)
        A = list(A) + [0]
        for m in range(len(A) - 1, 2 * g - 1, -1):
            a = A[m] % mod
            if not a:
                continue
            j = m - d + 1
            # d(x^j y) = (j x^(j-1) Q + x^j Q'/2) dx/y, leading coefficient (2j + d)/2
            c = _divide([2 * a % mod], 2 * j + d, p, mod, N)[0] if a else 0
            if not c:
                continue
            H[j] = c
            for k, qk in enumerate(Q):
                if j:
                    A[j - 1 + k] = (A[j - 1 + k] - c * j * qk) % mod
            for k, qk in enumerate(dQ):
                A[j + k] = (A[j + k] - c * qk * half) % mod
            if A[m] % mod:
                raise CohomologyError("internal: level-1 reduction failed")
        rows.append([A[j] % mod for j in range(2 * g)])
        Hs.append(P.pmod(H, mod))
        Ss.append(S_i)
    matrix = PadicMatrix.from_residues(rows, p, W + E, shift=E).add_bigoh(N)
    return FrobeniusData(tuple(Q), p, N, matrix, E, mod, Hs, Ss)


def _divide(a: list[int], n: int, p: int, mod: int, N: int) -> list[int]:
    """Divide a (known to be divisible in truth) by the integer n modulo mod."""
    v = _vp(n, p)
    u = n // p**v
    uinv = pow(u, -1, mod)
    if v == 0:
        return [x * uinv % mod for x in a]
    pv = p**v
    out = []
    for x in a:
        if x % pv:
            raise PrecisionError(
                f"reduction denominator p^{v} not absorbed; raise N above {N}"
            )
        out.append(x // pv * uinv % mod)
    return out


def save_frobenius(data: FrobeniusData, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "Q": list(data.Q),
        "p": data.p,
        "N": data.N,
        "matrix": serialize_matrix(data.matrix),
        "scale": data.scale,
        "modulus": data.modulus,
        "H": data.H,
        "S": [{str(t): s for t, s in Si.items()} for Si in data.S],
    }
    body = json.dumps(payload, sort_keys=True)
    digest = hashlib.sha256(body.encode()).hexdigest()
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps({"sha256": digest, "payload": payload}, sort_keys=True))
    os.replace(tmp, path)


def load_frobenius(path: Path) -> FrobeniusData:
    raw = json.loads(path.read_text())
    payload = raw["payload"]
    if hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest() != raw["sha256"]:
        raise ValueError("checksum mismatch")
    return FrobeniusData(
        tuple(payload["Q"]),
        payload["p"],
        payload["N"],
        deserialize_matrix(payload["matrix"]),
        payload["scale"],
        payload["modulus"],
        payload["H"],
        [{int(t): s for t, s in Si.items()} for Si in payload["S"]],
    )


# ---------------------------------------------------------------------------
# checks against point counts


def reverse_charpoly(F: PadicMatrix) -> list[PadicNumber]:
    """Coefficients of det(I - T F), lowest degree first."""
    return list(reversed(F.charpoly()))


def zeta_congruence(F: PadicMatrix, lpoly: Sequence[int], precision: int) -> bool:
    """True iff det(I - T F) agrees with the L-polynomial modulo p^precision."""
    p = F.p
    rc = reverse_charpoly(F)
    for c, a in zip(rc, lpoly):
        diff = c - PadicNumber.from_int(a, p, precision)
        if not diff.is_zero() and diff.val < precision:
            return False
    return True


def recognize_integer(x: PadicNumber, bound: int) -> int:
    q = rational_reconstruct(x, bound)
    if q.denominator != 1:
        raise PrecisionError(f"{q} is not an integer")
    return int(q)


# ---------------------------------------------------------------------------
# Hecke operator and Neron-Severi class


def hecke_from_frobenius(F: PadicMatrix, p: int | None = None, weil_check: bool = True) -> PadicMatrix:
    """A_p = F + p F^{-1}; optionally checks integrality of its charpoly."""
    p = F.p if p is None else p
    A = F + F.inverse().scale(PadicNumber.from_int(p, F.p, F.min_prec() + 64))
    if weil_check:
        n = F.nrows
        prec = A.min_prec()
        for k, c in enumerate(A.charpoly()):
            bound = math.comb(n, k) * int(2 * math.sqrt(p) + 1) ** (n - k) + 1
            if 2 * bound * bound >= p**prec:
                continue
            try:
                recognize_integer(c, bound)
            except Exception as exc:
                raise PrecisionError(f"charpoly of A_p not integral at precision {prec}: {exc}") from exc
    return A


def minimal_polynomial_degree(A: PadicMatrix, bound: int = 10**6) -> int:
    """Degree of the minimal polynomial of A (entries recognized as rationals)."""
    import sympy

    M = sympy.Matrix([[rational_reconstruct(x, bound) for x in r] for r in A.rows])
    return sympy.degree(_minpoly(M), sympy.Symbol("t"))


def _minpoly(M):
    import sympy

    t = sympy.Symbol("t")
    n = M.shape[0]
    vecs = [sympy.eye(n)]
    for k in range(1, n + 1):
        vecs.append(vecs[-1] * M)
        A = sympy.Matrix([list(v) for v in vecs]).T
        ns = A.nullspace()
        if ns:
            c = ns[0] / ns[0][-1]
            return sum(c[i] * t**i for i in range(len(c)))
    raise CohomologyError("no minimal polynomial found")


def rational_matrix(M: PadicMatrix, bound: int) -> list[list[Fraction]]:
    return [[rational_reconstruct(x, bound) for x in r] for r in M.rows]


def ns_class(
    A: PadicMatrix,
    C: Sequence[Sequence[Fraction]],
    sign: str = "plus",
    power: int = 1,
    bound: int = 10**4,
    check_generator: bool = True,
) -> list[list[Fraction]]:
    """Z = +-(Tr(B) I - 2g B) C^{-1} with B = A^power, reconstructed exactly.

    ``sign='minus'`` gives the class built from 2g B - Tr(B) I.
    """
    import sympy

    n = A.nrows
    B = A
    for _ in range(power - 1):
        B = B @ A
    Bq = sympy.Matrix(rational_matrix(B, bound))
    if check_generator:
        if _minpoly(Bq).as_poly().degree() < n // 2:
            raise CohomologyError("A_p does not generate End^0(J): degenerate minimal polynomial")
    Zm = (Bq.trace() * sympy.eye(n) - n * Bq) * sympy.Matrix(C).inv()
    if sign == "minus":
        Zm = -Zm
    elif sign != "plus":
        raise ValueError("sign must be 'plus' or 'minus'")
    if Zm == sympy.zeros(n, n):
        raise CohomologyError("trivial Neron-Severi class (A_p is scalar)")
    return [[Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in Zm.row(i)] for i in range(n)]


# ---------------------------------------------------------------------------
# unit root splitting


def unit_root_splitting(F: PadicMatrix) -> tuple[PadicMatrix, PadicMatrix]:
    """(s1, s2): projectors on coefficient vectors onto W (unit root) and Fil^0.

    Coefficient vectors c represent sum_i c_i w_i; Frobenius acts on them by F^T.
    Fil^0 is spanned by the first g basis vectors.
    """
    p = F.p
    n = F.nrows
    g = n // 2
    N = F.min_prec()
    Ft = F.T
    M = Ft
    for _ in range(max(1, (N + 2).bit_length())):
        M = (M @ M).add_bigoh(N)
    # choose g columns of M with unit pivots
    cols = [M.column(j) for j in range(n)]
    chosen, work = [], [list(c) for c in cols]
    used_rows = []
    for j in range(n):
        v = work[j]
        piv = next((r for r in range(n) if r not in used_rows and not v[r].is_zero() and v[r].val == 0), None)
        if piv is None:
            continue
        chosen.append(j)
        used_rows.append(piv)
        inv = v[piv].inverse()
        for k in range(j + 1, n):
            c = work[k][piv] * inv
            work[k] = [a - c * b for a, b in zip(work[k], v)]
        if len(chosen) == g:
            break
    if len(chosen) != g:
        raise CohomologyError("reduction is not ordinary at p: choose another p")
    one = PadicNumber.from_int(1, p, N)
    zero = PadicNumber.zero(p, N)
    basis_cols = [[one if r == k else zero for r in range(n)] for k in range(g)] + [cols[j] for j in chosen]
    B = PadicMatrix(p, tuple(zip(*basis_cols)))
    Binv = B.inverse()
    D1 = PadicMatrix.from_rationals([[int(i == j and i >= g) for j in range(n)] for i in range(n)], p, N)
    D2 = PadicMatrix.from_rationals([[int(i == j and i < g) for j in range(n)] for i in range(n)], p, N)
    s1 = (B @ D1 @ Binv).add_bigoh(N)
    s2 = (B @ D2 @ Binv).add_bigoh(N)
    return s1, s2


# ---------------------------------------------------------------------------
# cup product


def _series_sqrt(a: list[Fraction], n: int) -> list[Fraction]:
    """sqrt of a power series with a[0] = 1, to n terms."""
    a = list(a) + [Fraction(0)] * n
    s = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for k in range(1, n):
        acc = a[k] - sum(s[i] * s[k - i] for i in range(1, k))
        s[k] = acc / 2
    return s


def _series_inv(a: list[Fraction], n: int) -> list[Fraction]:
    a = list(a) + [Fraction(0)] * n
    out = [Fraction(1) / a[0]] + [Fraction(0)] * (n - 1)
    for k in range(1, n):
        out[k] = -sum(a[i] * out[k - i] for i in range(1, k + 1)) / a[0]
    return out


def _laurent_at_infinity(f: Sequence[Fraction], A: Sequence[Fraction], prec: int):
    """Local expansion of A(x) dx/y at (one of) the point(s) at infinity.

    Returns (lowest exponent, coefficients) of the Laurent series psi(t) with
    A dx/y = kappa * psi(t) dt; kappa = 1 for odd degree and 1/sqrt(lc) for
    even degree (the other point at infinity gives -psi).
    """
    f = [Fraction(c) for c in f]
    A = [Fraction(c) for c in A]
    d = len(f) - 1
    lc = f[-1]
    if d % 2:
        # x = t^-2, y = t^-d s(t), dx = -2 t^-3 dt
        base = [Fraction(0)] * (2 * d + 1)
        for k, c in enumerate(f):
            base[2 * (d - k)] += c / lc
        s = _series_sqrt(base, prec)
        sinv = _series_inv(s, prec)
        # A(t^-2) = sum a_k t^-2k ; form = -2 A(t^-2) t^(d-3) / s dt
        low = d - 3 - 2 * (len(A) - 1)
        num = [Fraction(0)] * (2 * (len(A) - 1) + 1)
        for k, c in enumerate(A):
            num[2 * (len(A) - 1 - k)] += -2 * c
        if lc != 1:
            raise CohomologyError("odd-degree model must be monic")
        coeffs = P.qmul(num, sinv)[:prec]
        return low, coeffs
    # even degree: x = 1/t, y = sqrt(lc) t^-(g+1) s(t)
    g1 = d // 2
    base = [Fraction(0)] * (d + 1)
    for k, c in enumerate(f):
        base[d - k] += c / lc
    s = _series_sqrt(base, prec)
    sinv = _series_inv(s, prec)
    # A(1/t) (-dt/t^2) t^(g+1) / s
    n = len(A) - 1
    num = [Fraction(0)] * (n + 1)
    for k, c in enumerate(A):
        num[n - k] += -c
    low = g1 - 2 - n
    coeffs = P.qmul(num, sinv)[:prec]
    return low, coeffs


def _integrate_laurent(low: int, coeffs: list[Fraction]) -> tuple[int, list[Fraction]]:
    out = []
    for k, c in enumerate(coeffs):
        e = low + k
        if e == -1:
            if c:
                raise CohomologyError("form has a nonzero residue: not of the second kind")
            out.append(Fraction(0))
        else:
            out.append(c / (e + 1))
    return low + 1, out


def cup_product_matrix(f: Sequence, forms: Sequence[Sequence], prec: int | None = None) -> list[list[Fraction]]:
    """Cup product of forms A_i(x) dx/y on y^2 = f via residues at infinity.

    C[i][j] = sum over points at infinity of Res(w_j * integral(w_i)).
    Forms are polynomials (lowest degree first); they must be of the second kind.
    """
    f = [Fraction(c) for c in f]
    d = len(f) - 1
    if prec is None:
        prec = 4 * d + 4 * max(len(a) for a in forms) + 8
    exps = [_laurent_at_infinity(f, a, prec) for a in forms]
    for low, co in exps:
        _integrate_laurent(low, co)  # residue check
    n = len(forms)
    C = [[Fraction(0)] * n for _ in range(n)]
    factor = Fraction(1) if d % 2 else 2 / f[-1]
    for i in range(n):
        li, ci = _integrate_laurent(*exps[i])
        for j in range(n):
            lj, cj = exps[j]
            # coefficient of t^-1 in (sum ci t^(li+k)) (sum cj t^(lj+m))
            r = Fraction(0)
            for k, a in enumerate(ci):
                m = -1 - li - k - lj
                if 0 <= m < len(cj):
                    r += a * cj[m]
            C[i][j] = factor * r
    return C


def default_basis(g: int) -> list[list[Fraction]]:
    """x^i dx/(2y), as numerators of dx/y."""
    return [[Fraction(0)] * i + [Fraction(1, 2)] for i in range(2 * g)]


# ---------------------------------------------------------------------------
# forms on a sextic model expressed in an odd model basis


def sextic_forms_in_odd_basis(forms: Sequence[Sequence], model, p: int, W: int) -> list[list[int]]:
    """Rows T with  A_k(x) dx/y  ==  sum_j T[k][j] U^j dU/(2W)  in H^1_dR.

    ``model`` is an OddModel over Z/p^W (x = r + c/U, y = c W/U^3).  Returns
    integers modulo p^W.
    """
    mod = p**W
    r, c = model.root % mod, model.scale % mod
    gpoly = [x % mod for x in model.g]
    d = len(gpoly) - 1
    genus = (d - 1) // 2
    dg = P.pderiv(gpoly, mod)
    half = pow(2, -1, mod)
    out = []
    for A in forms:
        A = [Fraction(a) for a in A]
        n = len(A) - 1
        B: list[int] = []
        for k, a in enumerate(A):
            lin = [c, r]  # r U + c
            pk = [1]
            for _ in range(k):
                pk = P.pmul(pk, lin, mod)
            pk = [0] * (n - k) + pk
            av = a.numerator * pow(a.denominator, -1, mod) % mod
            B = P.padd(B, P.pscale(pk, av, mod), mod)
        # form = -B(U) U^(1-n) dU/W ; store as Laurent: coefficient list with offset
        off = 1 - n
        coeffs = {off + k: (-b) % mod for k, b in enumerate(B)}
        # kill negative powers U^(-m-1) with d(W/U^m) = (-m g + U g'/2) U^(-m-1) dU/W
        while True:
            neg = [e for e, v in coeffs.items() if e < 0 and v % mod]
            if not neg:
                break
            e = min(neg)
            if e == -1:
                raise CohomologyError("form has a residue at the points at infinity")
            m = -e - 1
            a = coeffs[e]
            # (-m g + U g'/2) has constant term -m g0
            lam = a * pow(-m * gpoly[0] % mod, -1, mod) % mod
            expr = [(-m * gk) % mod for gk in gpoly]
            for k, dk in enumerate(dg):
                expr[k + 1] = (expr[k + 1] + dk * half) % mod
            for k, v in enumerate(expr):
                coeffs[e + k] = (coeffs.get(e + k, 0) - lam * v) % mod
        poly = [0] * (max(coeffs) + 1)
        for e, v in coeffs.items():
            if e >= 0:
                poly[e] = v % mod
        # reduce U^m dU/W, m >= 2g, with d(U^j W) = (j U^(j-1) g + U^j g'/2) dU/W
        for m in range(len(poly) - 1, 2 * genus - 1, -1):
            a = poly[m]
            if not a:
                continue
            j = m - d + 1
            lam = a * 2 * pow(2 * j + d, -1, mod) % mod
            for k, gk in enumerate(gpoly):
                if j:
                    poly[j - 1 + k] = (poly[j - 1 + k] - lam * j * gk) % mod
            for k, dk in enumerate(dg):
                poly[j + k] = (poly[j + k] - lam * dk * half) % mod
        row = [(2 * poly[j]) % mod if j < len(poly) else 0 for j in range(2 * genus)]
        out.append(row)
    return out


def change_basis(F: PadicMatrix, T: PadicMatrix) -> PadicMatrix:
    """Matrix of the same operator on the basis w' = T w (row convention)."""
    return T @ F @ T.inverse()
