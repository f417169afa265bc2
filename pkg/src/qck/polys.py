"""Dense univariate polynomials as coefficient lists, lowest degree first.

Arithmetic is modulo an integer ``m`` (a prime for field operations, or a
prime power for p-adic work).  The zero polynomial is ``[]``.
"""

from __future__ import annotations

from fractions import Fraction


def trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def deg(a: list) -> int:
    return len(a) - 1


def pmod(a, m: int) -> list[int]:
    return trim([x % m for x in a])


def padd(a, b, m: int) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % m
    return trim([x % m for x in out])


def psub(a, b, m: int) -> list[int]:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, x in enumerate(b):
        out[i] -= x
    return trim([x % m for x in out])


def pscale(a, c, m: int) -> list[int]:
    return trim([x * c % m for x in a])


def pmul(a, b, m: int) -> list[int]:
    if not a or not b:
        return []
    if len(a) > 40 and len(b) > 40:
        return _kronecker_mul(a, b, m)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([x % m for x in out])


def _kronecker_mul(a, b, m: int) -> list[int]:
    # pack into big integers; slots wide enough for the exact convolution
    n = min(len(a), len(b))
    bits = 2 * (m - 1).bit_length() + n.bit_length() + 1
    A = _pack([x % m for x in a], bits)
    B = _pack([x % m for x in b], bits)
    return trim([x % m for x in _unpack(A * B, bits, len(a) + len(b) - 1)])


def _pack(a, bits: int) -> int:
    out = 0
    for x in reversed(a):
        out = (out << bits) | x
    return out


def _unpack(n: int, bits: int, count: int) -> list[int]:
    mask = (1 << bits) - 1
    out = []
    for _ in range(count):
        out.append(n & mask)
        n >>= bits
    return out


def pdivmod_monic(a, b, m: int) -> tuple[list[int], list[int]]:
    """Division by a monic ``b`` over Z/m."""
    a = [x % m for x in a]
    db = len(b) - 1
    if len(a) <= db:
        return [], trim(a)
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] % m
        if c:
            q[i - db] = c
            for j in range(db):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % m
        a[i] = 0
    return trim(q), trim([x % m for x in a[:db]])


def pdivmod(a, b, p: int) -> tuple[list[int], list[int]]:
    """Division over the field F_p."""
    b = trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    bm = [x * inv % p for x in b]
    q, r = pdivmod_monic(a, bm, p)
    return pscale(q, inv, p), r


def pmonic(a, p: int) -> list[int]:
    a = trim([x % p for x in a])
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def pxgcd(a, b, p: int) -> tuple[list[int], list[int], list[int]]:
    """(d, s, t) with s a + t b = d monic gcd over F_p."""
    r0, r1 = trim([x % p for x in a]), trim([x % p for x in b])
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = pdivmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1, p), p)
        t0, t1 = t1, psub(t0, pmul(q, t1, p), p)
    if not r0:
        return [], [], []
    inv = pow(r0[-1], -1, p)
    return pscale(r0, inv, p), pscale(s0, inv, p), pscale(t0, inv, p)


def pgcd(a, b, p: int) -> list[int]:
    return pxgcd(a, b, p)[0]


def peval(a, x, m: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % m
    return acc


def pderiv(a, m: int) -> list[int]:
    return trim([i * a[i] % m for i in range(1, len(a))])


def ppowmod(a, e: int, mod, p: int) -> list[int]:
    result = [1]
    base = pdivmod(a, mod, p)[1]
    while e:
        if e & 1:
            result = pdivmod(pmul(result, base, p), mod, p)[1]
        base = pdivmod(pmul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def pcompose(a, b, m: int) -> list[int]:
    """a(b(x))."""
    acc: list[int] = []
    for c in reversed(a):
        acc = padd(pmul(acc, b, m), [c], m)
    return acc


# -- exact rational polynomials ------------------------------------------------

def qtrim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def qadd(a, b):
    n = max(len(a), len(b))
    return qtrim([Fraction(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def qsub(a, b):
    return qadd(a, [-x for x in b])


def qmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return qtrim(out)


def qscale(a, c):
    return qtrim([Fraction(x) * c for x in a])


def qdivmod(a, b):
    a = [Fraction(x) for x in a]
    b = qtrim([Fraction(x) for x in b])
    db = len(b) - 1
    if len(a) <= db:
        return [], qtrim(a)
    q = [Fraction(0)] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] / b[-1]
        q[i - db] = c
        for j in range(db + 1):
            a[i - db + j] -= c * b[j]
    return qtrim(q), qtrim(a[:db])


def qxgcd(a, b):
    r0, r1 = qtrim([Fraction(x) for x in a]), qtrim([Fraction(x) for x in b])
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = qdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, qsub(s0, qmul(q, s1))
        t0, t1 = t1, qsub(t0, qmul(q, t1))
    c = r0[-1]
    return qscale(r0, 1 / c), qscale(s0, 1 / c), qscale(t0, 1 / c)


def qeval(a, x):
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def qderiv(a):
    return qtrim([i * Fraction(a[i]) for i in range(1, len(a))])


def qcompose(a, b):
    acc: list = []
    for c in reversed(a):
        acc = qadd(qmul(acc, b), [c])
    return acc


def discriminant(f) -> Fraction:
    """Discriminant via the resultant res(f, f') (exact rationals)."""
    f = qtrim([Fraction(x) for x in f])
    n = len(f) - 1
    r = resultant(f, qderiv(f))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * r / f[-1]


def resultant(a, b) -> Fraction:
    a = qtrim([Fraction(x) for x in a])
    b = qtrim([Fraction(x) for x in b])
    if not a or not b:
        return Fraction(0)
    res = Fraction(1)
    while len(b) > 1:
        da, db = len(a) - 1, len(b) - 1
        _, r = qdivmod(a, b)
        if not r:
            return Fraction(0)
        dr = len(r) - 1
        res *= (-1) ** (da * db) * b[-1] ** (da - dr)
        a, b = b, r
    # b is a nonzero constant
    return res * b[0] ** (len(a) - 1)
