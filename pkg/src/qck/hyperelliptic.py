"""Odd-degree hyperelliptic curves: models, point counts, Jacobian arithmetic.

Curves are ``y^2 = f(x)``.  Over finite fields the Jacobian is handled with
Cantor's algorithm on reduced Mumford pairs ``(a, b)``; ``a`` is monic of
degree at most g, ``deg b < deg a`` and ``a | b^2 - f``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import polys as P
from .padic import is_prime
from .smith import smith_normal_form


class CurveError(ValueError):
    """Base class for rejected curve models."""


class EvenDegreeModelError(CurveError):
    pass


class NonMonicModelError(CurveError):
    pass


class NonIntegralModelError(CurveError):
    pass


class BadReductionError(CurveError):
    pass


class SingularCurveError(CurveError):
    pass


class BudgetExceededError(RuntimeError):
    """Point counting over F_{q^2} would exceed the configured budget."""


DEFAULT_COUNT_BUDGET = 2 * 10**8


@dataclass(frozen=True)
class HyperellipticCurve:
    """``y^2 = f(x)`` with exact rational coefficients, lowest degree first."""

    f: tuple[Fraction, ...]
    base: str = "Q"
    p: int | None = None
    label: str = ""

    @property
    def degree(self) -> int:
        return len(self.f) - 1

    @property
    def genus(self) -> int:
        return (self.degree - 1) // 2

    def reduce(self, p: int) -> list[int]:
        """Coefficients of f modulo p (f must be p-integral)."""
        out = []
        for c in self.f:
            c = Fraction(c)
            if c.denominator % p == 0:
                raise NonIntegralModelError(f"coefficient {c} is not {p}-integral")
            out.append(c.numerator * pow(c.denominator, -1, p) % p)
        return out

    def __str__(self):
        return f"y^2 = {format_poly(self.f)}"


def format_poly(f, var: str = "x") -> str:
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = Fraction(f[i])
        if c == 0:
            continue
        mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mon and abs(c) == 1:
            s = ("-" if c < 0 else "+") + mon
        else:
            s = f"{'+' if c > 0 else '-'}{abs(c)}{'*' + mon if mon else ''}"
        terms.append(s)
    out = "".join(terms).lstrip("+") or "0"
    return out


def validate_curve(f: Sequence, p: int | None = None) -> HyperellipticCurve:
    """Accept an odd-degree monic squarefree model with good reduction at p."""
    f = tuple(P.qtrim([Fraction(c) for c in f]))
    d = len(f) - 1
    if d < 5:
        raise CurveError(f"degree {d} < 5: not a hyperelliptic curve of genus >= 2")
    if d % 2 == 0:
        raise EvenDegreeModelError(
            f"even degree {d}: convert to an odd-degree model by moving a Q_p-rational "
            "Weierstrass point to infinity (see qck.hyperelliptic.odd_model)"
        )
    if f[-1] != 1:
        raise NonMonicModelError(f"leading coefficient {f[-1]} is not 1")
    disc = P.discriminant(f)
    if disc == 0:
        raise SingularCurveError("f is not squarefree (discriminant 0)")
    if p is not None:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        for c in f:
            if c.denominator % p == 0:
                raise NonIntegralModelError(f"coefficient {c} is not {p}-integral")
        if disc.numerator % p == 0:
            raise BadReductionError(f"bad reduction at {p}: discriminant {disc} divisible by {p}")
    return HyperellipticCurve(f, "Q" if p is None else "Qp", p)


# ---------------------------------------------------------------------------
# finite field helpers


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a modulo the odd prime p, or None."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def smallest_nonresidue(p: int) -> int:
    n = 2
    while pow(n, (p - 1) // 2, p) != p - 1:
        n += 1
    return n


def _square_table(p: int) -> np.ndarray:
    chi = -np.ones(p, dtype=np.int64)
    sq = (np.arange(p, dtype=np.int64) ** 2) % p
    chi[sq] = 1
    chi[0] = 0
    return chi


def count_points(f: Sequence[int], p: int, k: int = 1, budget: int = DEFAULT_COUNT_BUDGET) -> int:
    """#X(F_{p^k}) for y^2 = f, k in {1, 2}, including points at infinity.

    f has integer coefficients (reduced mod p here).  For k = 2 the field is
    F_p[t]/(t^2 - n) with n the smallest non-residue.
    """
    f = [int(c) % p for c in f]
    if P.trim(list(f)) == [] or len(P.trim(list(f))) - 1 < 1:
        raise SingularCurveError("degenerate polynomial")
    deg = len(P.trim(list(f))) - 1
    disc = P.discriminant(f)
    if disc.numerator % p == 0 or f[deg] % p == 0:
        raise SingularCurveError(f"singular reduction at {p}")
    chi = _square_table(p)
    if k == 1:
        xs = np.arange(p, dtype=np.int64)
        acc = np.zeros(p, dtype=np.int64)
        for c in reversed(f[: deg + 1]):
            acc = (acc * xs + c) % p
        affine = p + int(chi[acc].sum())
        if deg % 2:
            inf = 1
        else:
            inf = 1 + int(chi[f[deg]])
        return affine + inf
    if k != 2:
        raise ValueError("only k = 1, 2 supported")
    if p * p > budget:
        raise BudgetExceededError(f"counting over F_{p}^2 ({p * p} elements) exceeds budget {budget}")
    n = smallest_nonresidue(p)
    a = np.arange(p, dtype=np.int64)
    total = 0
    block = max(1, min(p, 2**22 // p))
    for b0 in range(0, p, block):
        b = np.arange(b0, min(p, b0 + block), dtype=np.int64)[:, None]
        A = np.zeros((b.shape[0], p), dtype=np.int64)
        B = np.zeros_like(A)
        for c in reversed(f[: deg + 1]):
            # (A + B t)(a + b t) + c
            A, B = (A * a + n * ((B * b) % p) + c) % p, (A * b + B * a) % p
        norm = (A * A - n * ((B * B) % p)) % p
        total += chi[norm].sum()
    affine = p * p + int(total)
    inf = 1 if deg % 2 else 2
    return affine + inf


def l_polynomial(f: Sequence[int], p: int, budget: int = DEFAULT_COUNT_BUDGET) -> list[int]:
    """L-polynomial coefficients [1, a1, ..., a_{2g}] of a genus-2 curve over F_p.

    Computed from #X(F_p), #X(F_{p^2}) via Newton's identities and the
    functional equation.
    """
    deg = len(P.trim([int(c) % p for c in f])) - 1
    g = (deg - 1) // 2
    if g != 2:
        raise ValueError("l_polynomial implemented for genus 2")
    N1 = count_points(f, p, 1)
    N2 = count_points(f, p, 2, budget=budget)
    s1 = p + 1 - N1  # sum of Frobenius eigenvalues
    s2 = p * p + 1 - N2
    a1 = -s1
    a2 = (s1 * s1 - s2) // 2
    return [1, a1, a2, p * a1, p * p]


def jacobian_order(f: Sequence[int], p: int, budget: int = DEFAULT_COUNT_BUDGET) -> int:
    return sum(l_polynomial(f, p, budget))


# ---------------------------------------------------------------------------
# Mumford divisors and Cantor's algorithm


@dataclass(frozen=True)
class MumfordDivisor:
    """Reduced divisor class [D - deg(a) * inf] as the pair (a, b)."""

    a: tuple[int, ...]
    b: tuple[int, ...]

    def is_identity(self) -> bool:
        return self.a == (1,)

    def __str__(self):
        return f"({format_poly(self.a)}, {format_poly(self.b)})"


class JacobianFp:
    """Jacobian of an odd-degree curve y^2 = f over the prime field F_p."""

    def __init__(self, f: Sequence[int], p: int, seed: int = 0):
        if p == 2:
            raise ValueError("p = 2 is not supported")
        self.p = p
        self.f = P.pmod([int(c) for c in f], p)
        deg = len(self.f) - 1
        if deg % 2 == 0:
            raise EvenDegreeModelError("Cantor arithmetic needs an odd-degree model")
        if P.deg(P.pgcd(self.f, P.pderiv(self.f, p), p)) > 0:
            raise SingularCurveError(f"f is not squarefree mod {p}")
        self.g = (deg - 1) // 2
        self.rng = random.Random(seed)
        self.identity = MumfordDivisor((1,), ())

    # -- group law ------------------------------------------------------------
    def _check(self, D: MumfordDivisor):
        if not isinstance(D, MumfordDivisor):
            raise TypeError("expected a MumfordDivisor")

    def is_valid(self, D: MumfordDivisor) -> bool:
        p = self.p
        a, b = list(D.a), list(D.b)
        if not a or a[-1] != 1 or len(a) - 1 > self.g or len(b) >= len(a):
            return False
        r = P.pdivmod_monic(P.psub(P.pmul(b, b, p), self.f, p), a, p)[1]
        return r == []

    def add(self, D1: MumfordDivisor, D2: MumfordDivisor) -> MumfordDivisor:
        p, f = self.p, self.f
        a1, b1, a2, b2 = list(D1.a), list(D1.b), list(D2.a), list(D2.b)
        if a1 == [1]:
            return D2
        if a2 == [1]:
            return D1
        d0, e1, e2 = P.pxgcd(a1, a2, p)
        if d0 == [1]:
            a = P.pmul(a1, a2, p)
            b = P.padd(P.pmul(P.pmul(e1, a1, p), b2, p), P.pmul(P.pmul(e2, a2, p), b1, p), p)
            b = P.pdivmod_monic(b, a, p)[1]
        else:
            d, c1, c2 = P.pxgcd(d0, P.padd(b1, b2, p), p)
            s1, s2, s3 = P.pmul(c1, e1, p), P.pmul(c1, e2, p), c2
            a = P.pdivmod_monic(P.pmul(a1, a2, p), P.pmul(d, d, p), p)[0]
            num = P.padd(
                P.padd(P.pmul(P.pmul(s1, a1, p), b2, p), P.pmul(P.pmul(s2, a2, p), b1, p), p),
                P.pmul(s3, P.padd(P.pmul(b1, b2, p), f, p), p),
                p,
            )
            b = P.pdivmod_monic(num, d, p)[0]
            b = P.pdivmod_monic(b, a, p)[1]
        return self._reduce(a, b)

    def _reduce(self, a, b) -> MumfordDivisor:
        p, f, g = self.p, self.f, self.g
        while len(a) - 1 > g:
            a = P.pdivmod(P.psub(f, P.pmul(b, b, p), p), a, p)[0]
            a = P.pmonic(a, p)
            b = P.pdivmod_monic(P.pmod([-c for c in b], p), a, p)[1]
        return MumfordDivisor(tuple(a), tuple(b))

    def neg(self, D: MumfordDivisor) -> MumfordDivisor:
        return MumfordDivisor(D.a, tuple(P.pmod([-c for c in D.b], self.p)))

    def sub(self, D1, D2):
        return self.add(D1, self.neg(D2))

    def double(self, D):
        return self.add(D, D)

    def mul(self, n: int, D: MumfordDivisor) -> MumfordDivisor:
        if n < 0:
            return self.mul(-n, self.neg(D))
        out = self.identity
        base = D
        while n:
            if n & 1:
                out = self.add(out, base)
            n >>= 1
            if n:
                base = self.add(base, base)
        return out

    # -- points ---------------------------------------------------------------
    def point(self, x: int, y: int) -> MumfordDivisor:
        """The class [(x, y) - inf]."""
        p = self.p
        if (y * y - P.peval(self.f, x, p)) % p:
            raise ValueError(f"({x}, {y}) is not on the curve mod {p}")
        return MumfordDivisor(((-x) % p, 1), ((y % p,) if y % p else ()))

    def affine_points(self) -> list[tuple[int, int]]:
        p = self.p
        out = []
        xs = np.arange(p, dtype=np.int64)
        acc = np.zeros(p, dtype=np.int64)
        for c in reversed(self.f):
            acc = (acc * xs + c) % p
        chi = _square_table(p)
        for x in np.nonzero(chi[acc] >= 0)[0]:
            x = int(x)
            v = int(acc[x])
            if v == 0:
                out.append((x, 0))
            else:
                r = sqrt_mod(v, p)
                out.append((x, r))
                out.append((x, p - r))
        return out

    def random_element(self) -> MumfordDivisor:
        """A random element supported on a degree-g effective divisor (g = 2) or points."""
        p, f = self.p, self.f
        while True:
            if self.g != 2:
                D = self.identity
                for _ in range(self.g):
                    x = self.rng.randrange(p)
                    y = sqrt_mod(P.peval(f, x, p), p)
                    if y is None:
                        continue
                    D = self.add(D, self.point(x, y if self.rng.random() < 0.5 else -y))
                return D
            # degree <= 1 classes too, so tiny groups cannot stall the loop
            if self.rng.randrange(p + 1) == 0:
                pts = self.affine_points()
                k = self.rng.randrange(len(pts) + 1)
                return self.identity if k == len(pts) else self.point(*pts[k])
            c0, c1 = self.rng.randrange(p), self.rng.randrange(p)
            a = [c0, c1, 1]
            disc = (c1 * c1 - 4 * c0) % p
            if disc == 0:
                continue
            r = sqrt_mod(disc, p)
            if r is not None:
                inv2 = pow(2, -1, p)
                x1, x2 = (-c1 + r) * inv2 % p, (-c1 - r) * inv2 % p
                y1 = sqrt_mod(P.peval(f, x1, p), p)
                y2 = sqrt_mod(P.peval(f, x2, p), p)
                if y1 is None or y2 is None:
                    continue
                if self.rng.random() < 0.5:
                    y1 = -y1 % p
                if self.rng.random() < 0.5:
                    y2 = -y2 % p
                return self.add(self.point(x1, y1), self.point(x2, y2))
            fa = P.pdivmod_monic(f, a, p)[1]
            b = _sqrt_in_quadratic_field(fa, a, p, self.rng)
            if b is None:
                continue
            return MumfordDivisor(tuple(a), tuple(b))

    # -- orders ---------------------------------------------------------------
    @cached_property
    def l_polynomial(self) -> list[int]:
        return l_polynomial(self.f, self.p)

    @cached_property
    def order(self) -> int:
        return sum(self.l_polynomial)

    def element_order(self, D: MumfordDivisor, multiple: int | None = None) -> int:
        n = self.order if multiple is None else multiple
        for q, e in factorint(n).items():
            for _ in range(e):
                if self.mul(n // q, D).is_identity():
                    n //= q
                else:
                    break
        return n


def _sqrt_in_quadratic_field(z, a, p: int, rng: random.Random):
    """Square root of z in F_p[x]/(a), a irreducible monic quadratic."""
    z = P.pdivmod_monic(z, a, p)[1]
    if not z:
        return []
    Q = p * p
    mod = lambda u: P.pdivmod_monic(u, a, p)[1]
    mul = lambda u, v: mod(P.pmul(u, v, p))

    def power(u, e):
        out = [1]
        while e:
            if e & 1:
                out = mul(out, u)
            u = mul(u, u)
            e >>= 1
        return out

    if power(z, (Q - 1) // 2) != [1]:
        return None
    q, s = Q - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    while True:
        n = [rng.randrange(p), rng.randrange(1, p)]
        if power(n, (Q - 1) // 2) == [p - 1]:
            break
    m, c, t, r = s, power(n, q), power(z, q), power(z, (q + 1) // 2)
    while t != [1]:
        i, t2 = 0, t
        while t2 != [1]:
            t2 = mul(t2, t2)
            i += 1
        b = power(c, 1 << (m - i - 1))
        m, c, t, r = i, mul(b, b), mul(t, mul(b, b)), mul(r, b)
    return r


def factorint(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# group structure


@dataclass
class AbelianGroupStructure:
    """J(F_q) as a product of cyclic groups with explicit generators.

    ``invariants`` are d_1 | d_2 | ... ; ``sylow`` records, for each prime l,
    a basis of the l-Sylow subgroup as (element, exponent) pairs.
    """

    order: int
    invariants: list[int]
    generators: list[MumfordDivisor]
    sylow: dict[int, list[tuple[MumfordDivisor, int]]] = field(default_factory=dict)


class SylowBasis:
    """Basis of an l-group inside a black-box abelian group, with discrete logs."""

    def __init__(self, J: JacobianFp, ell: int):
        self.J = J
        self.ell = ell
        self.gens: list[MumfordDivisor] = []
        self.exps: list[int] = []
        self._tables: dict = {}

    @property
    def log_size(self) -> int:
        return sum(self.exps)

    def dlog(self, y: MumfordDivisor) -> list[int] | None:
        """Coefficients c with y = sum c_i g_i, or None if y is not in the span."""
        J, ell = self.J, self.ell
        if not self.gens:
            return [] if y.is_identity() else None
        M = max(self.exps)
        coeffs = [0] * len(self.gens)
        cur = y
        for s in range(M):
            active = [i for i, m in enumerate(self.exps) if m >= M - s]
            target = J.mul(ell ** (M - 1 - s), cur)
            digits = self._elementary_dlog(tuple(active), target)
            if digits is None:
                return None
            for i, d in zip(active, digits):
                if d:
                    pos = s - (M - self.exps[i])
                    coeffs[i] += d * ell**pos
                    cur = J.sub(cur, J.mul(d * ell**pos, self.gens[i]))
        if not cur.is_identity():
            return None
        return [c % ell**m for c, m in zip(coeffs, self.exps)]

    def _elementary_dlog(self, active: tuple[int, ...], target: MumfordDivisor):
        J, ell = self.J, self.ell
        if target.is_identity():
            return [0] * len(active)
        key = (active, tuple(self.exps[i] for i in active))
        if key not in self._tables:
            hs = [J.mul(ell ** (self.exps[i] - 1), self.gens[i]) for i in active]
            r = len(hs)
            step = math.isqrt(ell - 1) + 1  # baby steps per coordinate
            baby = {}
            for combo in _product(range(step), r):
                e = J.identity
                for c, h in zip(combo, hs):
                    if c:
                        e = J.add(e, J.mul(c, h))
                baby.setdefault(e, combo)
            giants = [J.mul(step, h) for h in hs]
            self._tables[key] = (baby, giants, step)
        baby, giants, step = self._tables[key]
        nb = -(-ell // step)
        for combo in _product(range(nb), len(active)):
            e = target
            for c, gnt in zip(combo, giants):
                if c:
                    e = J.sub(e, J.mul(c, gnt))
            hit = baby.get(e)
            if hit is not None:
                return [(b + c * step) % ell for b, c in zip(hit, combo)]
        return None

    def extend(self, x: MumfordDivisor) -> bool:
        """Enlarge the basis so that its span contains x.  Returns True if it grew."""
        J, ell = self.J, self.ell
        t = 0
        y = x
        while True:
            c = self.dlog(y)
            if c is not None:
                break
            y = J.mul(ell, y)
            t += 1
        if t == 0:
            return False
        r = len(self.gens)
        rel = [[0] * (r + 1) for _ in range(r + 1)]
        for i, m in enumerate(self.exps):
            rel[i][i] = ell**m
        for i in range(r):
            rel[r][i] = -c[i]
        rel[r][r] = ell**t
        D, _, _, Vinv = smith_normal_form(rel)
        olds = self.gens + [x]
        gens, exps = [], []
        for i in range(r + 1):
            d = abs(D[i][i])
            if d == 1:
                continue
            e = J.identity
            for j in range(r + 1):
                if Vinv[i][j]:
                    e = J.add(e, J.mul(Vinv[i][j], olds[j]))
            m = 0
            while d % ell == 0:
                d //= ell
                m += 1
            gens.append(e)
            exps.append(m)
        order = sorted(range(len(gens)), key=lambda i: exps[i])
        self.gens = [gens[i] for i in order]
        self.exps = [exps[i] for i in order]
        self._tables = {}
        return True


def _product(rng, r):
    import itertools

    return itertools.product(rng, repeat=r)


def jacobian_group_structure(
    f: Sequence[int], p: int, seed: int = 0, budget: int = DEFAULT_COUNT_BUDGET
) -> AbelianGroupStructure:
    """Invariant factors and generators of J(F_p) for a genus-2 odd model."""
    J = JacobianFp(f, p, seed=seed)
    if J.g != 2:
        raise ValueError("group structure implemented for genus 2")
    J.l_polynomial = l_polynomial(J.f, p, budget)  # may raise BudgetExceededError
    n = J.order
    sylow = {}
    for ell, e in sorted(factorint(n).items()):
        sylow[ell] = sylow_basis(J, ell, e)
    return _assemble(J, n, sylow)


def sylow_basis(J: JacobianFp, ell: int, e: int) -> SylowBasis:
    n = J.order
    cof = n // ell**e
    S = SylowBasis(J, ell)
    while S.log_size < e:
        x = J.mul(cof, J.random_element())
        S.extend(x)
    return S


def _assemble(J: JacobianFp, n: int, sylow: dict[int, SylowBasis]) -> AbelianGroupStructure:
    # combine Sylow bases into invariant factors d_1 | d_2 | ...
    rank = max((len(S.gens) for S in sylow.values()), default=0)
    invariants = [1] * rank
    generators = [J.identity] * rank
    for ell, S in sylow.items():
        k = len(S.gens)
        for idx in range(k):
            slot = rank - k + idx  # largest exponents go to the last slots
            invariants[slot] *= ell ** S.exps[idx]
            generators[slot] = J.add(generators[slot], S.gens[idx])
    return AbelianGroupStructure(
        order=n,
        invariants=invariants,
        generators=generators,
        sylow={ell: list(zip(S.gens, S.exps)) for ell, S in sylow.items()},
    )


# ---------------------------------------------------------------------------
# even degree -> odd degree


@dataclass(frozen=True)
class OddModel:
    """Odd-degree model obtained by sending the root r of a sextic f to infinity.

    With x = r + c/U and y = c W / U^3, where c = f'(r), the curve
    y^2 = f(x) becomes W^2 = g(U) with g monic of degree 5.  Coefficients
    live modulo ``modulus`` (a prime or a prime power).
    """

    f: tuple[int, ...]
    g: tuple[int, ...]
    root: int
    scale: int
    modulus: int

    def map_point(self, x: int, y: int) -> tuple[int, int]:
        m, r, c = self.modulus, self.root, self.scale
        u = c * pow((x - r) % m, -1, m) % m
        w = y * pow(u, 3, m) * pow(c, -1, m) % m
        return u, w

    def map_infinity(self, y_over_x3: int) -> tuple[int, int]:
        """Image of the point at infinity of the sextic with y/x^3 = y_over_x3."""
        m, c = self.modulus, self.scale
        return 0, y_over_x3 * pow(c, 2, m) % m


def odd_model(f: Sequence[int], root: int, modulus: int) -> OddModel:
    """Move the (modular) root ``root`` of the sextic f to infinity."""
    m = modulus
    f = [int(c) % m for c in f]
    if len(f) != 7:
        raise ValueError("expected a sextic")
    if P.peval(f, root, m) % m:
        raise ValueError("root is not a root of f modulo the modulus")
    h = P.pcompose(f, [root, 1], m) + [0] * 7  # f(r + s)
    c = h[1] % m
    cinv = pow(c, -1, m)
    g = [0] * 6
    for k in range(1, 7):
        g[6 - k] = h[k] * pow(cinv, 2 - k, m) % m if k < 2 else h[k] * pow(c, k - 2, m) % m
    return OddModel(tuple(f), tuple(g), root, c, m)


def hensel_root(f: Sequence[int], r0: int, p: int, W: int) -> int:
    """Lift a simple root r0 of f mod p to a root modulo p^W."""
    mod = p**W
    f = [int(c) for c in f]
    df = P.pderiv(f, mod)
    r = r0 % p
    if P.peval(f, r, p) or P.peval(df, r, p) % p == 0:
        raise ValueError(f"{r0} is not a simple root of f mod {p}")
    k = 1
    while k < W:
        k = min(2 * k, W)
        m = p**k
        r = (r - P.peval(f, r, m) * pow(P.peval(df, r, m), -1, m)) % m
    return r


def odd_model_padic(f: Sequence[int], p: int, W: int, root_residue: int | None = None) -> OddModel:
    """Odd model over Z/p^W of a sextic with a simple root modulo p."""
    roots = [r for r in range(p) if P.peval([int(c) for c in f], r, p) == 0]
    if root_residue is None:
        if not roots:
            raise ValueError(f"f has no root modulo {p}")
        root_residue = roots[0]
    r = hensel_root(f, root_residue, p, W)
    return odd_model(f, r, p**W)
