"""Mordell-Weil sieve over J(F_v) / M J(F_v).

Group elements are mapped to the quotient by discrete logarithms in the
l-Sylow subgroups for the primes l dividing gcd(#J(F_v), M).  The quotient is
then a product of cyclic groups Z/m_i with every m_i dividing M, so a target
tuple a mod M acts on generator images by plain modular arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import polys as P
from .hyperelliptic import (
    CurveError,
    JacobianFp,
    MumfordDivisor,
    factorint,
    l_polynomial,
    odd_model,
    sylow_basis,
)
from .padic import PadicNumber


class SieveError(ValueError):
    pass


# ---------------------------------------------------------------------------
# quotient maps


class QuotientMap:
    """J(F_v) -> prod Z/m_i, the quotient by M J(F_v) in Sylow coordinates."""

    def __init__(self, J: JacobianFp, M: int, order: int | None = None):
        self.J = J
        self.M = M
        self.order = J.order if order is None else order
        self.parts = []  # (ell, cofactor, SylowBasis, moduli)
        fac = factorint(self.order)
        for ell in sorted(factorint(M)):
            e = fac.get(ell, 0)
            if e == 0:
                continue
            k = _vp(M, ell)
            S = sylow_basis(J, ell, e)
            mods = [ell ** min(m, k) for m in S.exps]
            self.parts.append((ell, self.order // ell**e, S, mods))
        self.moduli = tuple(m for part in self.parts for m in part[3])

    @property
    def size(self) -> int:
        return math.prod(self.moduli)

    def __call__(self, D: MumfordDivisor) -> tuple[int, ...]:
        out = []
        for ell, cof, S, mods in self.parts:
            c = S.dlog(self.J.mul(cof, D))
            if c is None:
                raise SieveError(f"element outside the {ell}-Sylow span; group data inconsistent")
            out.extend(x % m for x, m in zip(c, mods))
        return tuple(out)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def abel_jacobi_image(J: JacobianFp, base: tuple[int, int] | None) -> list[MumfordDivisor]:
    """[P - b] for every P in X(F_v) (affine points and the point at infinity).

    ``base`` None means the point at infinity.
    """
    B = J.identity if base is None else J.point(*base)
    nb = J.neg(B)
    out = [nb]
    for pt in J.affine_points():
        out.append(J.add(J.point(*pt), nb))
    return out


# ---------------------------------------------------------------------------
# curves given by sextic models


def _red(q, m: int) -> int:
    q = Fraction(q)
    if q.denominator % m == 0 or math.gcd(q.denominator, m) != 1:
        raise CurveError(f"denominator {q.denominator} not invertible mod {m}")
    return q.numerator * pow(q.denominator, -1, m) % m


@dataclass(frozen=True)
class LocalCurve:
    """An odd model of the curve over F_v and the maps into it."""

    v: int
    g: tuple[int, ...]
    root: int | None = None
    scale: int = 1

    def jacobian(self, seed: int = 0) -> JacobianFp:
        return JacobianFp(list(self.g), self.v, seed=seed)

    def point(self, x, y) -> tuple[int, int] | None:
        """Image of an affine point of the original model; None for the point at infinity."""
        v = self.v
        x, y = _red(x, v), _red(y, v)
        if self.root is None:
            return x, y
        if (x - self.root) % v == 0:
            return None
        u = self.scale * pow(x - self.root, -1, v) % v
        return u, y * pow(u, 3, v) * pow(self.scale, -1, v) % v

    def mumford(self, a: Sequence, b: Sequence) -> MumfordDivisor:
        """Class of (a, b) on the original model, measured against the divisor at infinity."""
        v = self.v
        a = [_red(c, v) for c in a]
        b = [_red(c, v) for c in b]
        if self.root is None:
            J = JacobianFp(list(self.g), v)
            D = MumfordDivisor(tuple(P.pmod(a, v)), tuple(P.pmod(b, v)))
            if not J.is_valid(D):
                raise SieveError("invalid Mumford representation")
            return D
        if len(a) != 3:
            raise SieveError("sextic Mumford data must have deg a = 2")
        r, c = self.root, self.scale
        # u^2 a(r + c/u) and u^3 b(r + c/u) / c
        a0, a1, a2 = a
        A = [c * c * a2 % v, c * (a1 + 2 * a2 * r) % v, (a0 + a1 * r + a2 * r * r) % v]
        if A[2] == 0:
            raise SieveError("divisor meets the Weierstrass point sent to infinity")
        inv = pow(A[2], -1, v)
        A = [x * inv % v for x in A]
        b = b + [0] * (2 - len(b))
        cinv = pow(c, -1, v)
        Bu = [0, 0, b[1] % v, (b[0] + b[1] * r) * cinv % v]
        Bu = P.pdivmod_monic(Bu, A, v)[1]
        D = MumfordDivisor(tuple(A), tuple(Bu))
        J = JacobianFp(list(self.g), v)
        if not J.is_valid(D):
            raise SieveError("converted Mumford representation is not on the curve")
        return D


def local_curve(f: Sequence[int], v: int) -> LocalCurve:
    """An odd model over F_v of y^2 = f (quintic or sextic with a root mod v)."""
    f = [int(c) for c in f]
    fv = P.pmod(f, v)
    if len(f) - 1 == 5:
        if fv[-1] != 1:
            raise SieveError("quintic models must be monic")
        return LocalCurve(v, tuple(fv))
    if len(f) - 1 != 6:
        raise SieveError("genus 2 models of degree 5 or 6 supported")
    roots = [r for r in range(v) if P.peval(fv, r, v) == 0]
    if not roots:
        raise SieveError(f"sextic has no root mod {v}: no odd model over F_{v}")
    om = odd_model(f, roots[0], v)
    return LocalCurve(v, tuple(om.g), om.root, om.scale)


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class PrimeData:
    v: int
    order: int
    moduli: tuple[int, ...]
    generator_images: tuple[tuple[int, ...], ...]
    image: frozenset

    @property
    def information(self) -> int:
        return math.prod(self.moduli)


@dataclass
class SieveInstance:
    rank: int
    M: int
    primes: list[PrimeData]
    targets: list[tuple[int, ...]]
    known: list[tuple[int, ...]] = field(default_factory=list)

    def __post_init__(self):
        if self.M < 1:
            raise SieveError("M must be positive")
        for pd in self.primes:
            if len(pd.generator_images) != self.rank:
                raise SieveError(f"prime {pd.v}: expected {self.rank} generator images")
            for m in pd.moduli:
                if self.M % m:
                    raise SieveError(f"prime {pd.v}: quotient modulus {m} does not divide M = {self.M}")
                if pd.order % m:
                    raise SieveError(f"prime {pd.v}: quotient modulus {m} does not divide #J = {pd.order}")
            for img in pd.generator_images:
                if len(img) != len(pd.moduli) or any(not 0 <= x < m for x, m in zip(img, pd.moduli)):
                    raise SieveError(f"prime {pd.v}: generator image outside the quotient group")


def prime_data(
    curve: LocalCurve,
    M: int,
    generators: Sequence[MumfordDivisor],
    base: tuple[int, int] | None,
    seed: int = 0,
    budget: int | None = None,
    multiplier: int = 1,
) -> PrimeData:
    """Quotient data at one prime.

    ``multiplier`` k > 1 is for generators spanning a sublattice of index k:
    then k [P - b] lies in their span, so the image is multiplied by k.
    """
    J = curve.jacobian(seed)
    if budget is not None:
        J.l_polynomial = l_polynomial(J.f, J.p, budget)
    Q = QuotientMap(J, M)
    gens = tuple(Q(D) for D in generators)
    mods = Q.moduli
    qb = (0,) * len(mods) if base is None else Q(J.point(*base))
    image = set()

    def put(c):
        image.add(tuple(multiplier * (x - y) % m for x, y, m in zip(c, qb, mods)))

    put((0,) * len(mods))
    seen = set()
    for x, y in J.affine_points():
        if x in seen:
            continue
        seen.add(x)
        c = Q(J.point(x, y))
        put(c)
        if y % curve.v:
            # the conjugate point is -[P] on an odd model
            put(tuple(-t % m for t, m in zip(c, mods)))
    return PrimeData(curve.v, Q.order, mods, gens, frozenset(image))


def _apply(pd: PrimeData, a: Sequence[int]) -> tuple[int, ...]:
    return tuple(
        sum(ai * img[k] for ai, img in zip(a, pd.generator_images)) % m for k, m in enumerate(pd.moduli)
    )


def prime_order(instance: SieveInstance) -> list[PrimeData]:
    """Most informative primes first; ties broken by the prime itself."""
    return sorted(instance.primes, key=lambda pd: (-math.gcd(pd.order, instance.M), pd.v))


def sieve_cosets(instance: SieveInstance) -> list[tuple[int, ...]]:
    """Targets a mod M whose images lie in the Abel-Jacobi image at every prime."""
    alive = [tuple(x % instance.M for x in a) for a in instance.targets]
    for pd in prime_order(instance):
        if not alive:
            break
        alive = [a for a in alive if _apply(pd, a) in pd.image]
    return alive


def all_tuples(M: int, r: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(M), repeat=r))


@dataclass(frozen=True)
class DiskConstraint:
    """The tuples mod ``modulus`` that points of a residue disk can map to."""

    modulus: int
    classes: tuple[tuple[int, ...], ...]

    @classmethod
    def coset(cls, modulus: int, base: Sequence[int], directions: Sequence[Sequence[int]] = ()) -> DiskConstraint:
        m = modulus
        out = {tuple(x % m for x in base)}
        for d in directions:
            out = {tuple((x + c * y) % m for x, y in zip(t, d)) for t in out for c in range(m)}
        return cls(m, tuple(sorted(out)))

    def tuples(self, M: int) -> list[tuple[int, ...]]:
        if M % self.modulus:
            raise SieveError("constraint modulus must divide M")
        m = self.modulus
        r = len(self.classes[0]) if self.classes else 0
        lifts = list(itertools.product(range(M // m), repeat=r))
        return [tuple(ci + ki * m for ci, ki in zip(c, k)) for c in self.classes for k in lifts]


def _solve_in_quotient(pd_moduli, gen_images, target, M: int, r: int) -> list[tuple[int, ...]]:
    """All a mod M with sum a_i gen_i = target in prod Z/m_k, one prime of M at a time."""
    per_prime = []
    for ell, k in sorted(factorint(M).items()):
        q = ell**k
        idx = [j for j, m in enumerate(pd_moduli) if m % ell == 0]
        sols = []
        for a in itertools.product(range(q), repeat=r):
            if all(sum(ai * g[j] for ai, g in zip(a, gen_images)) % pd_moduli[j] == target[j] % pd_moduli[j]
                   for j in idx):
                sols.append(a)
        per_prime.append((q, sols))
    out = []
    for combo in itertools.product(*[s for _, s in per_prime]):
        t = [0] * r
        for (q, _), a in zip(per_prime, combo):
            e = (M // q) * pow(M // q, -1, q)  # CRT idempotent
            t = [(x + ai * e) % M for x, ai in zip(t, a)]
        out.append(tuple(t))
    return sorted(out)


def disk_constraint_from_reduction(
    curve: LocalCurve,
    M: int,
    generators: Sequence[MumfordDivisor],
    base: tuple[int, int] | None,
    disk_point: tuple[int, int] | None,
    seed: int = 0,
) -> DiskConstraint:
    """Tuples a mod M with sum a_i P_i = [disk_point - b] in J(F_p)/M J(F_p).

    ``disk_point`` is on the odd model over F_p (None for its point at infinity).
    """
    J = curve.jacobian(seed)
    Q = QuotientMap(J, M)
    gens = [Q(D) for D in generators]
    B = J.identity if base is None else J.point(*base)
    T = J.identity if disk_point is None else J.point(*disk_point)
    target = Q(J.sub(T, B))
    return DiskConstraint(M, tuple(_solve_in_quotient(Q.moduli, gens, target, M, len(generators))))


@dataclass(frozen=True)
class SieveVerdict:
    status: str  # EMPTY or UNDECIDED
    survivors: tuple[tuple[int, ...], ...]
    candidates: int


def sieve_disk(instance: SieveInstance, constraint: DiskConstraint) -> SieveVerdict:
    cands = constraint.tuples(instance.M)
    inst = SieveInstance(instance.rank, instance.M, instance.primes, cands, instance.known)
    alive = sieve_cosets(inst)
    return SieveVerdict("EMPTY" if not alive else "UNDECIDED", tuple(alive), len(cands))


def disk_constraint_from_logs(
    generator_logs: Sequence[Sequence[PadicNumber]],
    offset_log: Sequence[PadicNumber],
    free_coordinates: Sequence[int],
    p: int,
) -> DiskConstraint:
    """Tuples mod p compatible with sum a_i log(P_i) = offset + (free directions).

    Coordinates listed in ``free_coordinates`` are unconstrained modulo
    p^(1+s), where p^s is the common power dividing the generator logs; the
    others must match.
    """
    r = len(generator_logs)
    s = min(int(x.val) for row in generator_logs for x in row if not x.is_zero())
    fixed = [k for k in range(len(offset_log)) if k not in set(free_coordinates)]

    def red(x):
        if x.val < s:
            raise SieveError("offset is not in the lattice of generator logs modulo p")
        return 0 if x.is_zero() else x.residue(s + 1) // p**s

    rows = [[red(generator_logs[i][k]) for i in range(r)] for k in fixed]
    rhs = [red(offset_log[k]) for k in fixed]
    sols = [a for a in itertools.product(range(p), repeat=r)
            if all(sum(c * x for c, x in zip(row, a)) % p == b for row, b in zip(rows, rhs))]
    return DiskConstraint(p, tuple(sols))


# ---------------------------------------------------------------------------
# exhaustive oracle for small fields


def enumerate_jacobian(J: JacobianFp) -> list[MumfordDivisor]:
    """All reduced divisors of a genus-2 Jacobian, by brute force."""
    p, f = J.p, J.f
    out = [J.identity]
    for a0 in range(p):
        a = [a0, 1]
        for b0 in range(p):
            D = MumfordDivisor(tuple(a), (b0,) if b0 else ())
            if J.is_valid(D):
                out.append(D)
    for a0, a1 in itertools.product(range(p), repeat=2):
        a = [a0, a1, 1]
        for b0, b1 in itertools.product(range(p), repeat=2):
            b = P.pmod([b0, b1], p)
            D = MumfordDivisor(tuple(a), tuple(b))
            if J.is_valid(D):
                out.append(D)
    return out


def exhaustive_survivors(
    curves: Sequence[JacobianFp],
    generators: Sequence[Sequence[MumfordDivisor]],
    bases: Sequence[tuple[int, int] | None],
    M: int,
    targets: Iterable[tuple[int, ...]],
) -> list[tuple[int, ...]]:
    """Direct test of a in image + M J(F_v) with the whole group enumerated."""
    data = []
    for J, gens, b in zip(curves, generators, bases):
        elems = enumerate_jacobian(J)
        MJ = {J.mul(M, x) for x in elems}
        img = abel_jacobi_image(J, b)
        allowed = {J.add(x, y) for x in img for y in MJ}
        data.append((J, gens, allowed))
    out = []
    for a in targets:
        ok = True
        for J, gens, allowed in data:
            e = J.identity
            for ai, G in zip(a, gens):
                e = J.add(e, J.mul(ai, G))
            if e not in allowed:
                ok = False
                break
        if ok:
            out.append(tuple(a))
    return out
