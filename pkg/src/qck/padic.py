"""Capped absolute-precision arithmetic in Q_p.

A :class:`PadicNumber` is ``p^v * u + O(p^N)`` with ``u`` a unit known modulo
``p^(N - v)``.  Exact zeros carry ``v = INF`` and still remember ``N`` (the
``O(p^N)`` they stand for).  Arithmetic never claims more absolute precision
than its inputs justify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when a computation runs out of p-adic precision."""


class NotRationalError(ValueError):
    """Raised by :func:`rational_reconstruct` when no small rational fits."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def valuation(n: int, p: int) -> int | float:
    """p-adic valuation of an integer (INF for 0)."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _split(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


@dataclass(frozen=True)
class PadicNumber:
    """An element ``p^val * unit + O(p^prec)`` of Q_p."""

    p: int
    val: int | float
    unit: int
    prec: int

    def __post_init__(self):
        if self.val == INF:
            object.__setattr__(self, "unit", 0)
            return
        if self.val >= self.prec:
            object.__setattr__(self, "val", INF)
            object.__setattr__(self, "unit", 0)
            return
        m = self.p ** (self.prec - self.val)
        object.__setattr__(self, "unit", self.unit % m)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, p: int, prec: int) -> PadicNumber:
        return cls(p, INF, 0, prec)

    @classmethod
    def from_int(cls, n: int, p: int, prec: int) -> PadicNumber:
        if n == 0:
            return cls(p, INF, 0, prec)
        v, u = _split(n, p)
        return cls(p, v, u, prec)

    @classmethod
    def from_rational(cls, q, p: int, prec: int) -> PadicNumber:
        q = Fraction(q)
        if q == 0:
            return cls(p, INF, 0, prec)
        vn, a = _split(q.numerator, p)
        vd, b = _split(q.denominator, p)
        v = vn - vd
        if v >= prec:
            return cls(p, INF, 0, prec)
        m = p ** (prec - v)
        return cls(p, v, a * pow(b, -1, m), prec)

    @classmethod
    def from_residue(cls, n: int, p: int, prec: int) -> PadicNumber:
        """The class of the integer ``n`` read modulo ``p^prec``."""
        return cls.from_int(n % p**prec, p, prec)

    # -- inspection --------------------------------------------------------
    @property
    def relprec(self) -> int | float:
        return 0 if self.val == INF else self.prec - self.val

    def is_zero(self) -> bool:
        return self.val == INF

    def is_unit(self) -> bool:
        return self.val == 0

    def lift(self) -> Fraction:
        """A rational representative (integer when ``val >= 0``)."""
        if self.val == INF:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self, n: int | None = None) -> int:
        """The integer representative modulo ``p^n`` (default ``p^prec``)."""
        n = self.prec if n is None else n
        if self.val == INF:
            return 0
        if self.val < 0:
            raise ValueError("element is not p-integral")
        return (self.unit * self.p**self.val) % self.p**n

    def digits(self) -> list[int]:
        """Base-p digits of ``unit`` (``relprec`` of them)."""
        out, u = [], self.unit
        for _ in range(int(self.relprec)):
            out.append(u % self.p)
            u //= self.p
        return out

    def add_bigoh(self, prec: int) -> PadicNumber:
        return PadicNumber(self.p, self.val, self.unit, min(self.prec, prec))

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> PadicNumber:
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        if isinstance(other, (int, Rational)):
            # exact constants are given the precision of self plus headroom
            q = Fraction(other)
            if q == 0:
                return PadicNumber(self.p, INF, 0, 10**9)
            vq = int(valuation(q.numerator, self.p) - valuation(q.denominator, self.p))
            vs = 0 if self.val == INF else abs(int(self.val))
            return PadicNumber.from_rational(q, self.p, abs(self.prec) + vs + 2 * abs(vq) + 64)
        return NotImplemented

    def __neg__(self):
        return PadicNumber(self.p, self.val, -self.unit, self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        if self.val == INF:
            return other.add_bigoh(prec)
        if other.val == INF:
            return self.add_bigoh(prec)
        v = min(self.val, other.val)
        if v >= prec:
            return PadicNumber(self.p, INF, 0, prec)
        n = self.unit * self.p ** (self.val - v) + other.unit * self.p ** (other.val - v)
        n %= self.p ** (prec - v)
        if n == 0:
            return PadicNumber(self.p, INF, 0, prec)
        w, u = _split(n, self.p)
        return PadicNumber(self.p, v + w, u, prec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec + other.val, other.prec + self.val)
        prec = int(prec) if prec != INF else max(self.prec, other.prec)
        if self.val == INF or other.val == INF:
            return PadicNumber(self.p, INF, 0, prec)
        return PadicNumber(self.p, self.val + other.val, self.unit * other.unit, prec)

    __rmul__ = __mul__

    def inverse(self) -> PadicNumber:
        if self.val == INF:
            raise ZeroDivisionError("inverse of p-adic zero")
        prec = self.prec - 2 * self.val
        m = self.p ** (self.prec - self.val)
        return PadicNumber(self.p, -self.val, pow(self.unit, -1, m), prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PadicNumber.from_int(1, self.p, self.prec - (0 if self.val == INF else min(self.val, 0)))
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def __eq__(self, other):
        """Equality up to the smaller of the two precisions."""
        if isinstance(other, (int, Rational)) and not isinstance(other, PadicNumber):
            other = self._coerce(other)
        if not isinstance(other, PadicNumber) or other.p != self.p:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.p, self.val, self.unit, self.prec))

    def __repr__(self):
        return f"PadicNumber({serialize(self)})"

    def __str__(self):
        if self.val == INF:
            return f"O({self.p}^{self.prec})"
        terms = []
        for i, d in enumerate(self.digits()):
            if d:
                e = self.val + i
                terms.append(f"{d}" if e == 0 else f"{d}*{self.p}^{e}")
        return " + ".join(terms + [f"O({self.p}^{self.prec})"])


def padic_from_rational(q, p: int, N: int) -> PadicNumber:
    """The class of ``q`` in Q_p to absolute precision ``N``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if N < 1:
        raise ValueError("precision must be at least 1")
    return PadicNumber.from_rational(q, p, N)


# -- serialization ----------------------------------------------------------

def serialize(x: PadicNumber) -> str:
    v = "inf" if x.val == INF else str(x.val)
    return f"v:{v} u:{x.unit} mod {x.p}^{x.prec}"


def deserialize(s: str) -> PadicNumber:
    parts = s.split()
    if len(parts) != 4 or not parts[0].startswith("v:") or not parts[1].startswith("u:"):
        raise ValueError(f"bad p-adic literal {s!r}")
    v = parts[0][2:]
    p, prec = parts[3].split("^")
    val = INF if v == "inf" else int(v)
    return PadicNumber(int(p), val, int(parts[1][2:]), int(prec))


# -- logarithm ---------------------------------------------------------------

@dataclass(frozen=True)
class LogBranch:
    """Branch of the p-adic logarithm: the value assigned to ``log p``."""

    p: int
    log_p: Fraction | PadicNumber = Fraction(0)

    @classmethod
    def iwasawa(cls, p: int) -> LogBranch:
        return cls(p, Fraction(0))


def teichmuller(a: int, p: int, N: int) -> int:
    """Teichmueller lift of ``a mod p`` as an integer modulo ``p^N``."""
    a %= p
    if a == 0:
        return 0
    m = p**N
    w = a
    for _ in range(N):
        w = pow(w, p, m)
    return w


def _log_one_unit(w: int, p: int, N: int) -> PadicNumber:
    """log(1 + w) for ``w`` divisible by p, as a p-adic number mod p^N."""
    if w % p**N == 0:
        return PadicNumber.zero(p, N)
    vw = int(valuation(w, p))
    ks = []
    k = 1
    # term k has valuation k*vw - v_p(k) >= k*vw - log_p(k)
    while k * vw - math.log(k, p) < N:
        if k * vw - valuation(k, p) < N:
            ks.append(k)
        k += 1
    e = max(int(valuation(k, p)) for k in ks)
    M = p ** (N + e)
    total = 0
    wk, last = 1, 0
    for k in ks:
        wk = wk * pow(w, k - last, M) % M
        last = k
        vk, uk = _split(k, p)
        t = wk * p ** (e - vk) * pow(uk, -1, M) % M
        total += t if k % 2 else -t
    total %= M
    # total = p^e * log(1 + w) mod p^(N + e)
    return PadicNumber(p, INF, 0, N) if total % p**e else _shift_down(total, e, p, N)


def _shift_down(n: int, e: int, p: int, N: int) -> PadicNumber:
    return PadicNumber.from_int((n // p**e) % p**N, p, N)


def padic_log(u: PadicNumber, branch: LogBranch | None = None) -> PadicNumber:
    """Logarithm on Q_p^x: log p = branch constant, log of roots of unity = 0."""
    if u.is_zero():
        raise ValueError("log of zero")
    p = u.p
    branch = branch or LogBranch.iwasawa(p)
    N = int(u.relprec)
    m = p**N
    omega = teichmuller(u.unit % p, p, N)
    one_unit = u.unit * pow(omega, -1, m) % m
    out = _log_one_unit(one_unit - 1, p, N)
    if u.val:
        c = branch.log_p
        if not isinstance(c, PadicNumber):
            c = PadicNumber.from_rational(c, p, N)
        out = out + c * u.val
    return out


def log_rational(q, p: int, N: int, branch: LogBranch | None = None) -> PadicNumber:
    """log_p of a nonzero rational to absolute precision N."""
    q = Fraction(q)
    v = valuation(q.numerator, p) - valuation(q.denominator, p)
    return padic_log(PadicNumber.from_rational(q, p, N + int(v)), branch)


# -- rational reconstruction --------------------------------------------------

def rational_reconstruct(x: PadicNumber, height_bound: int) -> Fraction:
    """The unique a/b with |a|, |b| <= bound, p not dividing b, and a/b = x.

    Uses the half-extended Euclidean algorithm on (p^N, x).  Requires
    ``2 * bound^2 < p^N`` for uniqueness.
    """
    p = x.p
    if x.is_zero():
        return Fraction(0)
    shift = 0
    if x.val < 0:
        shift = -x.val
        x = x * PadicNumber.from_int(p**shift, p, x.prec + 2 * shift)
    N = x.prec
    m = p**N
    if 2 * height_bound**2 >= m:
        raise NotRationalError(f"bound {height_bound} too large for precision {p}^{N}")
    r0, r1 = m, x.residue()
    s0, s1 = 0, 1
    while r1 > height_bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    a, b = r1, s1
    if b == 0 or abs(b) > height_bound or b % p == 0:
        raise NotRationalError("not recognizably rational")
    out = Fraction(a, b)
    if (out.numerator - x.residue() * out.denominator) % m:
        raise NotRationalError("not recognizably rational")
    return out / p**shift
