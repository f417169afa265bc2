"""Brute-force divisor-class oracle for genus-2 curves y^2 = F(x) over small F_q.

Decides whether an effective divisor E is the zero divisor of some f in
L(6*inf) = <1, x, x^2, x^3, y>, by enumerating every such f up to scalars.
Points are recorded over F_{q^2}, which holds every point of a divisor
defined over F_q of degree <= 2.  Nothing here uses Cantor's algorithm.
"""

from collections import Counter
from itertools import product

from qck.hyperelliptic import smallest_nonresidue


class Fq2:
    """F_q[s]/(s^2 - n), elements encoded as u + q*v."""

    def __init__(self, q):
        self.q = q
        n = smallest_nonresidue(q)
        size = q * q
        self.size = size
        self.mul = [[0] * size for _ in range(size)]
        self.add = [[0] * size for _ in range(size)]
        for e1 in range(size):
            u1, v1 = e1 % q, e1 // q
            for e2 in range(size):
                u2, v2 = e2 % q, e2 // q
                self.add[e1][e2] = (u1 + u2) % q + q * ((v1 + v2) % q)
                self.mul[e1][e2] = (u1 * u2 + n * v1 * v2) % q + q * ((u1 * v2 + u2 * v1) % q)
        self.neg = [(-(e % q)) % q + q * ((-(e // q)) % q) for e in range(size)]
        self.inv = [0] * size
        for e1 in range(1, size):
            for e2 in range(1, size):
                if self.mul[e1][e2] == 1:
                    self.inv[e1] = e2
                    break
        self.sqrt = {}
        for e in range(size):
            self.sqrt.setdefault(self.mul[e][e], []).append(e)

    def ev(self, poly, x):
        acc = 0
        for c in reversed(poly):
            acc = self.add[self.mul[acc][x]][c % self.q]
        return acc


def _divmod_fq(a, b, q):
    """Division of integer polynomials (low to high) over F_q by a monic b."""
    a = [c % q for c in a]
    out = [0] * max(len(a) - len(b) + 1, 0)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1]
        out[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] = (a[i + j] - c * bj) % q
    rem = a[: len(b) - 1]
    while rem and rem[-1] == 0:
        rem.pop()
    return out, rem


def _trim(a, q):
    a = [c % q for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


class DivisorOracle:
    def __init__(self, F, q):
        self.q = q
        self.F = [c % q for c in F]
        self.K = Fq2(q)
        K = self.K
        # monic linear and irreducible quadratic factors, with their roots in F_{q^2}
        self.factors = [((-r) % q, 1) for r in range(q)]
        self.factor_roots = [[r] for r in range(q)]
        for s, t in product(range(q), repeat=2):
            quad = [t, s, 1]
            if any((t + s * r + r * r) % q == 0 for r in range(q)):
                continue
            roots = [x for x in range(K.size) if K.ev(quad, x) == 0]
            self.factors.append(tuple(quad))
            self.factor_roots.append(roots)
        self.principal = set()
        for coeffs in product(range(q), repeat=5):
            lead = next((c for c in coeffs if c), 0)
            if lead != 1:
                continue
            key = self._zeros(list(coeffs[:4]), coeffs[4])
            if key is not None:
                self.principal.add(key)

    def _roots(self, poly):
        """Roots in F_{q^2} with multiplicity, or None if some root lies outside."""
        poly = _trim(poly, self.q)
        out = Counter()
        deg = len(poly) - 1
        found = 0
        for fac, roots in zip(self.factors, self.factor_roots):
            while len(poly) >= len(fac):
                quo, rem = _divmod_fq(poly, list(fac), self.q)
                if rem:
                    break
                poly = _trim(quo, self.q)
                for r in roots:
                    out[r] += 1
                found += len(fac) - 1
        return out if found == deg else None

    def _zeros(self, c, d):
        K, q = self.K, self.q
        pts = Counter()
        if d == 0:
            roots = self._roots(c)
            if roots is None:
                return None
            for x, m in roots.items():
                fx = K.ev(self.F, x)
                ys = K.sqrt.get(fx)
                if ys is None:
                    return None
                if fx == 0:
                    pts[(x, 0)] += 2 * m
                else:
                    for y in ys:
                        pts[(x, y)] += m
            return frozenset(pts.items())
        cc = [ci % q for ci in c]
        norm = [0] * 7
        for i, a in enumerate(cc):
            for j, b in enumerate(cc):
                norm[i + j] += a * b
        for i, fi in enumerate(self.F):
            norm[i] -= d * d * fi
        roots = self._roots(norm)
        if roots is None:
            return None
        dinv = K.inv[d % q]
        for x, m in roots.items():
            y = K.mul[K.neg[K.ev(cc, x)]][dinv]
            pts[(x, y)] += m
        return frozenset(pts.items())

    def points(self, a, b, sign=1):
        """Point multiset of the semi-reduced divisor (a, sign*b)."""
        K = self.K
        roots = self._roots(list(a))
        pts = Counter()
        for x, m in roots.items():
            y = K.ev(list(b), x)
            pts[(x, y if sign == 1 else K.neg[y])] += m
        return pts

    def is_sum(self, D1, D2, D3):
        """Whether [D1] + [D2] = [D3] by exhibiting D1 + D2 - D3 as principal."""
        E = self.points(D1.a, D1.b) + self.points(D2.a, D2.b) + self.points(D3.a, D3.b, -1)
        E = self._strip_vertical(E)
        return frozenset(E.items()) in self.principal if E else True

    def _strip_vertical(self, E):
        # P + iota(P) is div(x - x(P)) + 2 inf; remove such pairs, keeping the class.
        K = self.K
        E = Counter(E)
        for (x, y) in list(E):
            if y == 0:
                E[(x, y)] %= 2
            else:
                partner = (x, K.neg[y])
                k = min(E[(x, y)], E.get(partner, 0))
                if k:
                    E[(x, y)] -= k
                    E[partner] -= k
        return Counter({P: m for P, m in E.items() if m > 0})
