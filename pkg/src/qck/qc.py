"""Height pairing solve, quadratic Chabauty functions and their p-adic zeros.

Residue disks are parameterized as x = w(xbar) + p t with t in Z_p and w the
Teichmuller lift, so a root is a p-adic integer t0 and its digits do not move
when the precision is raised.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .padic import PadicNumber, PrecisionError, deserialize, serialize


class QCError(ValueError):
    pass


class RankDeficiencyError(QCError):
    def __init__(self, message: str, null_direction: list[PadicNumber]):
        super().__init__(message)
        self.null_direction = null_direction


INF = float("inf")


# ---------------------------------------------------------------------------
# exact-ish p-adic elimination for rectangular systems


def _solve_rect(rows: list[list[PadicNumber]], rhs: list[PadicNumber], labels: Sequence[str]):
    """Solve an overdetermined consistent system by full pivoting.

    Returns (solution, residuals) where residuals are the leftover right-hand
    sides of the rows not used as pivots.
    """
    m, n = len(rows), len(rows[0])
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    perm = list(range(n))
    for k in range(n):
        best = None
        for i in range(k, m):
            for j in range(k, n):
                x = a[i][j]
                if not x.is_zero() and (best is None or x.val < a[best[0]][best[1]].val):
                    best = (i, j)
        if best is None:
            # columns k.. are zero below row k: kernel vector
            free = k
            null = [None] * n
            null[perm[free]] = PadicNumber.from_int(1, rows[0][0].p, rows[0][0].prec)
            for j in range(k + 1, n):
                null[perm[j]] = PadicNumber.zero(rows[0][0].p, rows[0][0].prec)
            for i in range(k - 1, -1, -1):
                acc = a[i][free]
                for j in range(i + 1, k):
                    acc = acc + a[i][j] * null[perm[j]]
                null[perm[i]] = -acc
            desc = " + ".join(f"({c})*{labels[j]}" for j, c in enumerate(null) if not c.is_zero())
            raise RankDeficiencyError(f"insufficiently independent data; null direction {desc}", null)
        i, j = best
        a[k], a[i] = a[i], a[k]
        if j != k:
            for r in a:
                r[k], r[j] = r[j], r[k]
            perm[k], perm[j] = perm[j], perm[k]
        inv = a[k][k].inverse()
        a[k] = [x * inv for x in a[k]]
        for i2 in range(m):
            if i2 != k and not a[i2][k].is_zero():
                f = a[i2][k]
                a[i2] = [x - f * y for x, y in zip(a[i2], a[k])]
    x = [None] * n
    for k in range(n):
        x[perm[k]] = a[k][n]
    return x, [a[i][n] for i in range(n, m)]


# ---------------------------------------------------------------------------
# height pairings


def _pairs(g: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(g) for j in range(i, g)]


def g_basis(logD: Sequence[PadicNumber], logE: Sequence[PadicNumber]) -> list[PadicNumber]:
    """Values g_ij(D, E), i <= j, of the symmetrized products of log coordinates."""
    g = len(logD)
    half = PadicNumber.from_rational(Fraction(1, 2), logD[0].p, max(x.prec for x in logD) + 4)
    return [(logD[i] * logE[j] + logD[j] * logE[i]) * half for i, j in _pairs(g)]


@dataclass(frozen=True)
class HeightPairing:
    """h = sum_{i<=j} alpha_ij g_ij."""

    g: int
    p: int
    alpha: Mapping[tuple[int, int], PadicNumber]
    residuals: tuple[PadicNumber, ...] = ()

    @property
    def prec(self) -> int:
        return min(int(x.prec) for x in self.alpha.values())

    def __call__(self, logD: Sequence[PadicNumber], logE: Sequence[PadicNumber]) -> PadicNumber:
        vals = g_basis(logD, logE)
        total = PadicNumber.zero(self.p, max(int(x.prec) for x in vals) + 4)
        for (ij, gv) in zip(_pairs(self.g), vals):
            total = total + self.alpha[ij] * gv
        return total

    def scaled(self, c) -> HeightPairing:
        return HeightPairing(self.g, self.p, {k: v * c for k, v in self.alpha.items()}, self.residuals)

    def to_json(self) -> dict:
        return {"g": self.g, "p": self.p, "alpha": {f"{i},{j}": serialize(v) for (i, j), v in self.alpha.items()}}

    @classmethod
    def from_json(cls, d: dict) -> HeightPairing:
        alpha = {tuple(int(t) for t in k.split(",")): deserialize(v) for k, v in d["alpha"].items()}
        return cls(int(d["g"]), int(d["p"]), alpha)


@dataclass(frozen=True)
class HeightDatum:
    """One equation h(D, E) = value, with value = h_p + sum of away-from-p terms."""

    logD: tuple[PadicNumber, ...]
    logE: tuple[PadicNumber, ...]
    hp: PadicNumber
    away: PadicNumber | None = None

    @property
    def value(self) -> PadicNumber:
        return self.hp if self.away is None else self.hp + self.away


def solve_height_pairing(data: Sequence[HeightDatum]) -> HeightPairing:
    """Solve for alpha_ij from at least g(g+1)/2 height values."""
    if not data:
        raise QCError("no height data")
    g = len(data[0].logD)
    need = g * (g + 1) // 2
    if len(data) < need:
        raise QCError(f"need at least {need} data rows for genus {g}, got {len(data)}")
    rows = [g_basis(d.logD, d.logE) for d in data]
    rhs = [d.value for d in data]
    labels = [f"alpha{i}{j}" for i, j in _pairs(g)]
    x, res = _solve_rect(rows, rhs, labels)
    p = data[0].hp.p
    return HeightPairing(g, p, dict(zip(_pairs(g), x)), tuple(res))


@dataclass(frozen=True)
class CalibrationDatum:
    """A point (or divisor pair) with local height at p and the multiplicities
    m_k of the unknown away-from-p constants c_k in its total height."""

    m: tuple[Fraction, ...]
    hp: PadicNumber
    logD: tuple[PadicNumber, ...]
    logE: tuple[PadicNumber, ...]


@dataclass(frozen=True)
class Calibration:
    pairing: HeightPairing
    constants: tuple[PadicNumber, ...]


def calibrate_away_constants(data: Sequence[CalibrationDatum]) -> Calibration:
    """Jointly solve sum alpha_ij g_ij(D, E) = h_p + sum_k m_k c_k."""
    if not data:
        raise QCError("no calibration data")
    g = len(data[0].logD)
    k = len(data[0].m)
    if not any(any(d.m) for d in data):
        pairing = solve_height_pairing([HeightDatum(d.logD, d.logE, d.hp) for d in data])
        return Calibration(pairing, tuple(PadicNumber.zero(pairing.p, pairing.prec) for _ in range(k)))
    p = data[0].hp.p
    prec = int(data[0].hp.prec) + 4
    rows = []
    for d in data:
        if len(d.m) != k:
            raise QCError("inconsistent number of away-from-p constants")
        rows.append(g_basis(d.logD, d.logE) + [-PadicNumber.from_rational(c, p, prec) for c in d.m])
    labels = [f"alpha{i}{j}" for i, j in _pairs(g)] + [f"c{t}" for t in range(k)]
    if len(rows) < len(labels):
        raise QCError(f"need at least {len(labels)} data rows, got {len(rows)}")
    try:
        x, res = _solve_rect(rows, [d.hp for d in data], labels)
    except RankDeficiencyError as exc:
        dim = _nullity(rows)
        raise RankDeficiencyError(f"non-unique solution: solution space has dimension {dim}; {exc}",
                                  exc.null_direction) from None
    n = len(_pairs(g))
    pairing = HeightPairing(g, p, dict(zip(_pairs(g), x[:n])), tuple(res))
    return Calibration(pairing, tuple(x[n:]))


def _nullity(rows: list[list[PadicNumber]]) -> int:
    a = [list(r) for r in rows]
    m, n = len(a), len(a[0])
    rank = 0
    for col in range(n):
        piv = None
        for i in range(rank, m):
            if not a[i][col].is_zero() and (piv is None or a[i][col].val < a[piv][col].val):
                piv = i
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = a[rank][col].inverse()
        for i in range(m):
            if i != rank and not a[i][col].is_zero():
                f = a[i][col] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return n - rank


# ---------------------------------------------------------------------------
# local expansions


def _series_eval(coeffs: Sequence[PadicNumber], t: PadicNumber) -> PadicNumber:
    acc = PadicNumber.zero(t.p, max(int(c.prec) for c in coeffs) if coeffs else t.prec)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


@dataclass(frozen=True)
class DiskExpansion:
    """Series in the disk parameter t for h_p and the log coordinates."""

    disk: tuple[int, int]
    hp: tuple[PadicNumber, ...]
    log1: tuple[tuple[PadicNumber, ...], ...]
    log2: tuple[tuple[PadicNumber, ...], ...]
    points: tuple[PadicNumber, ...] = ()

    def logs_at(self, t: PadicNumber) -> tuple[list[PadicNumber], list[PadicNumber]]:
        return [_series_eval(s, t) for s in self.log1], [_series_eval(s, t) for s in self.log2]


@dataclass(frozen=True)
class QCLocalExpansion:
    p: int
    N: int
    disks: tuple[DiskExpansion, ...]
    provenance: str = "ingested"

    def disk(self, key: tuple[int, int]) -> DiskExpansion:
        for d in self.disks:
            if d.disk == tuple(key):
                return d
        raise QCError(f"no expansion data for disk {key}")


EXPANSION_FORMAT = "qck-expansions"
EXPANSION_VERSION = 1


def load_expansions(path: str | Path) -> QCLocalExpansion:
    """Read a JSON expansion file (a single file or every *.json in a directory)."""
    path = Path(path)
    files = sorted(path.glob("*.json")) if path.is_dir() else [path]
    if not files:
        raise QCError(f"no expansion files in {path}")
    disks, p, N, prov = [], None, None, set()
    for f in files:
        raw = json.loads(f.read_text())
        if raw.get("format") != EXPANSION_FORMAT:
            raise QCError(f"{f}: not an expansion file")
        if int(raw.get("version", 0)) != EXPANSION_VERSION:
            raise QCError(f"{f}: unsupported expansion format version {raw.get('version')}")
        if p is not None and int(raw["p"]) != p:
            raise QCError(f"{f}: prime {raw['p']} does not match {p}")
        p, N = int(raw["p"]), int(raw["N"]) if N is None else min(N, int(raw["N"]))
        prov.add(raw.get("provenance", "ingested"))
        for rec in raw["disks"]:
            disks.append(DiskExpansion(
                tuple(int(c) for c in rec["disk"]),
                tuple(deserialize(s) for s in rec["hp"]),
                tuple(tuple(deserialize(s) for s in ser) for ser in rec["log1"]),
                tuple(tuple(deserialize(s) for s in ser) for ser in rec["log2"]),
                tuple(deserialize(s) for s in rec.get("points", ())),
            ))
    return QCLocalExpansion(p, N, tuple(disks), "+".join(sorted(prov)))


def dump_expansions(exp: QCLocalExpansion, path: str | Path) -> None:
    payload = {
        "format": EXPANSION_FORMAT,
        "version": EXPANSION_VERSION,
        "p": exp.p,
        "N": exp.N,
        "provenance": exp.provenance,
        "disks": [
            {
                "disk": list(d.disk),
                "hp": [serialize(c) for c in d.hp],
                "log1": [[serialize(c) for c in s] for s in d.log1],
                "log2": [[serialize(c) for c in s] for s in d.log2],
                "points": [serialize(c) for c in d.points],
            }
            for d in exp.disks
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True))


# ---------------------------------------------------------------------------
# quadratic Chabauty functions


@dataclass(frozen=True)
class UpsilonSet:
    values: tuple[PadicNumber, ...]

    @classmethod
    def trivial(cls, p: int, N: int) -> UpsilonSet:
        return cls((PadicNumber.zero(p, N),))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def _series_mul(a: Sequence[PadicNumber], b: Sequence[PadicNumber], n: int, p: int, N: int) -> list[PadicNumber]:
    out = [PadicNumber.zero(p, N) for _ in range(n)]
    for i, x in enumerate(a[:n]):
        if x.is_zero():
            continue
        for j, y in enumerate(b[: n - i]):
            out[i + j] = out[i + j] + x * y
    return out


@dataclass(frozen=True)
class RhoSeries:
    disk: tuple[int, int]
    upsilon_index: int
    upsilon: PadicNumber
    coeffs: tuple[PadicNumber, ...]


def rho_series(pairing: HeightPairing, disk: DiskExpansion, p: int, N: int) -> list[PadicNumber]:
    """Coefficients of h(t) - h_p(t) on one disk."""
    n = max([len(disk.hp)] + [len(s) for s in disk.log1 + disk.log2])
    g = pairing.g
    if len(disk.log1) != g or len(disk.log2) != g:
        raise QCError(f"disk {disk.disk}: expected {g} log series")
    half = PadicNumber.from_rational(Fraction(1, 2), p, N + 4)
    total = [PadicNumber.zero(p, N) for _ in range(n)]
    for (i, j) in _pairs(g):
        prod = _series_mul(disk.log1[i], disk.log2[j], n, p, N)
        prod2 = _series_mul(disk.log1[j], disk.log2[i], n, p, N)
        a = pairing.alpha[(i, j)]
        total = [t + a * (x + y) * half for t, x, y in zip(total, prod, prod2)]
    hp = list(disk.hp) + [PadicNumber.zero(p, N)] * (n - len(disk.hp))
    return [(t - h).add_bigoh(N) for t, h in zip(total, hp)]


def assemble_rho(
    pairing: HeightPairing,
    expansions: QCLocalExpansion,
    upsilon: UpsilonSet,
    disks: Sequence[tuple[int, int]] | None = None,
) -> list[RhoSeries]:
    """rho - upsilon on every requested disk, for every upsilon."""
    p, N = expansions.p, expansions.N
    chosen = [expansions.disk(k) for k in disks] if disks is not None else list(expansions.disks)
    out = []
    for d in chosen:
        base = rho_series(pairing, d, p, N)
        for k, u in enumerate(upsilon):
            coeffs = list(base)
            coeffs[0] = (coeffs[0] - u).add_bigoh(N)
            out.append(RhoSeries(d.disk, k, u, tuple(coeffs)))
    return out


# ---------------------------------------------------------------------------
# roots of p-adic power series in the closed unit disk


def _as_ints(series: Sequence, p: int, N: int) -> list[int]:
    mod = p**N
    out = []
    for c in series:
        if isinstance(c, PadicNumber):
            if c.val < 0:
                raise QCError("series coefficients must be p-adic integers")
            if c.prec < N:
                raise QCError(f"coefficient known only to O(p^{c.prec}) < O(p^{N})")
            out.append(c.residue(N))
        else:
            out.append(int(Fraction(c)) % mod if Fraction(c).denominator == 1
                       else PadicNumber.from_rational(Fraction(c), p, N).residue(N))
    return out


def _vp(n: int, p: int, cap: int) -> int:
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


def _weierstrass_degree(c: list[int], p: int, N: int) -> int | None:
    """Last index of minimal valuation; None if all coefficients vanish mod p^N."""
    vals = [_vp(x % p**N, p, N) for x in c]
    m = min(vals)
    if m >= N:
        return None
    return max(i for i, v in enumerate(vals) if v == m)


def _shift(c: list[int], centre: int, radius_exp: int, p: int, N: int) -> list[int]:
    """Coefficients of f(centre + p^k s) mod p^N."""
    mod = p**N
    n = len(c)
    # Taylor shift by centre, then scale
    a = list(c)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            a[j] = (a[j] + centre * a[j + 1]) % mod
    scale = pow(p, radius_exp, mod) if radius_exp < N else 0
    out, s = [], 1
    for x in a:
        out.append(x * s % mod)
        s = s * scale % mod
    return out


def find_zeros(series: Sequence, p: int, N: int) -> list[tuple[PadicNumber, int]]:
    """Roots in Z_p of a series known mod p^N, with multiplicities.

    Disks are subdivided until each contains at most one root (then Newton
    iteration) or until the series is indistinguishable from (t - t0)^m times
    a unit, in which case t0 is reported with multiplicity m.
    """
    c = _as_ints(series, p, N)
    if not c or _weierstrass_degree(c, p, N) is None:
        raise PrecisionError("series vanishes identically to the working precision; raise N")
    out: list[tuple[PadicNumber, int]] = []
    _zeros_rec(c, 0, 0, p, N, out)
    out.sort(key=lambda r: (r[0].residue(r[0].prec) if not r[0].is_zero() else 0))
    return out


def _root_multiplicities_mod_p(h: list[int], p: int) -> list[int]:
    """Multiplicity of each a in F_p as a root of h mod p."""
    out = []
    for a in range(p):
        m, cur = 0, [x % p for x in h]
        while any(cur):
            # synthetic division by (s - a)
            q, acc = [], 0
            for x in reversed(cur):
                acc = (acc * a + x) % p
                q.append(acc)
            if q[-1]:
                break
            m += 1
            cur = list(reversed(q[:-1]))
        out.append(m)
    return out


def _zeros_rec(c: list[int], centre: int, k: int, p: int, N: int, out: list, expected: int | None = None):
    g = _shift(c, centre, k, p, N)
    d = _weierstrass_degree(g, p, N)
    if d is None:
        if expected is None:
            raise PrecisionError(
                f"insufficient precision: series vanishes mod p^{N} on the disk {centre} + p^{k} Z_p; raise N")
        # the parent disk fixed the root count here but no digits remain to separate them
        out.append((PadicNumber.from_int(centre, p, max(k, 1)), expected))
        return
    if d == 0:
        return
    if d == 1:
        out.append((_newton_root(g, centre, k, p, N), 1))
        return
    mod = p**N
    if all(x % mod == 0 for x in g[:d]):
        # s^d times a unit to precision: d roots with v(s) >= (N - v(g_d)) / d
        prec = k + (N - _vp(g[d], p, N)) // d
        out.append((PadicNumber.from_int(centre, p, max(prec, 1)), d))
        return
    v = _vp(g[d], p, N)
    counts = _root_multiplicities_mod_p([x // p**v for x in g[: d + 1]], p)
    step = p**k
    for a in range(p):
        if counts[a]:
            _zeros_rec(c, centre + a * step, k + 1, p, N, out, counts[a])


def _newton_root(g: list[int], centre: int, k: int, p: int, N: int) -> PadicNumber:
    """The unique zero s in Z_p of g (Weierstrass degree 1); returns centre + p^k s."""
    v = _vp(g[1] % p**N, p, N)
    prec = N - v
    if prec <= 0:
        return PadicNumber.from_int(centre, p, max(k, 1))
    mod = p**prec
    h = [(x // p**v) % mod for x in g]  # valid: all coefficients divisible by p^v

    def ev(poly, s):
        acc = 0
        for x in reversed(poly):
            acc = (acc * s + x) % mod
        return acc

    dh = [(i * h[i]) % mod for i in range(1, len(h))]
    s = 0
    for _ in range(2 * prec.bit_length() + 4):
        fs = ev(h, s)
        if fs == 0:
            break
        s = (s - fs * pow(ev(dh, s), -1, mod)) % mod
    return PadicNumber.from_int(centre + p**k * s, p, prec + k)


def newton_polygon_count(series: Sequence, p: int, N: int) -> int:
    """Number of zeros in Z_p counted with multiplicity (Weierstrass degree)."""
    c = _as_ints(series, p, N)
    d = _weierstrass_degree(c, p, N)
    if d is None:
        raise PrecisionError("series vanishes identically to the working precision; raise N")
    return d


# ---------------------------------------------------------------------------
# root reports and Mordell-Weil cosets


@dataclass(frozen=True)
class RootReport:
    disk: tuple[int, int]
    t0: PadicNumber
    multiplicity: int
    upsilon_index: int = 0
    matched: bool = False
    coset: tuple[int, ...] | None = None
    coset_prec: int = 0

    def to_json(self) -> dict:
        return {
            "disk": list(self.disk),
            "t0": serialize(self.t0),
            "multiplicity": self.multiplicity,
            "upsilon_index": self.upsilon_index,
            "matched": self.matched,
            "coset": list(self.coset) if self.coset is not None else None,
            "coset_prec": self.coset_prec,
        }


def roots_of_rho(rhos: Sequence[RhoSeries], expansions: QCLocalExpansion, match_prec: int | None = None) -> list[RootReport]:
    """Root reports for each (disk, upsilon) series; roots agreeing with a
    supplied known point to match_prec digits are flagged as matched."""
    p, N = expansions.p, expansions.N
    match_prec = N - 2 if match_prec is None else match_prec
    out = []
    for r in rhos:
        disk = expansions.disk(r.disk)
        for t0, mult in find_zeros(r.coeffs, p, N):
            matched = any(_agree(t0, pt, match_prec) for pt in disk.points)
            out.append(RootReport(r.disk, t0, mult, r.upsilon_index, matched))
    return out


def _agree(a: PadicNumber, b: PadicNumber, digits: int) -> bool:
    prec = min(digits, int(a.prec), int(b.prec))
    return (a - b).add_bigoh(prec).is_zero()


def zeros_to_cosets(
    log_point: Sequence[PadicNumber],
    generator_logs: Sequence[Sequence[PadicNumber]],
    p: int,
    N: int,
) -> tuple[tuple[int, ...], int]:
    """Integers a_i mod p^prec with log(P - b) = sum a_i log(P_i).

    Returns (tuple, prec) where prec = N - v and v is the valuation of the
    determinant of the generator log matrix.
    """
    from .padic_matrix import PadicMatrix, padic_linear_solve

    g = len(generator_logs)
    if any(len(v) != g for v in generator_logs) or len(log_point) != g:
        raise QCError("need g generators with g log coordinates each")
    L = PadicMatrix(p, tuple(tuple(generator_logs[i][r] for i in range(g)) for r in range(g)))
    det = L.det()
    if det.is_zero():
        raise QCError("bad prime for sieving: generator log matrix is singular to working precision")
    # logs are divisible by p in general; remove the common power before measuring the loss
    shift = min(int(x.val) for row in L.rows for x in row if not x.is_zero())
    v = int(det.val) - g * shift
    try:
        sol = padic_linear_solve(L, PadicMatrix(p, tuple((x,) for x in log_point)))
    except PrecisionError as exc:
        raise QCError(f"bad prime for sieving: {exc}") from exc
    prec = N - v
    out = []
    for i in range(g):
        a = sol[i, 0]
        if a.val < 0:
            raise QCError("point is not in the lattice spanned by the generators (non-integral coefficient)")
        prec = min(prec, int(a.prec))
        out.append(a)
    if prec <= 0:
        raise QCError("no precision left for coset coordinates")
    return tuple(a.residue(prec) for a in out), prec


def attach_cosets(
    reports: Sequence[RootReport],
    expansions: QCLocalExpansion,
    generator_logs: Sequence[Sequence[PadicNumber]],
) -> list[RootReport]:
    p, N = expansions.p, expansions.N
    out = []
    for r in reports:
        log1, _ = expansions.disk(r.disk).logs_at(r.t0)
        try:
            coset, prec = zeros_to_cosets(log1, generator_logs, p, N)
        except QCError:
            coset, prec = None, 0
        out.append(RootReport(r.disk, r.t0, r.multiplicity, r.upsilon_index, r.matched, coset, prec))
    return out


def intersect_roots(a: Sequence[RootReport], b: Sequence[RootReport], digits: int) -> list[RootReport]:
    """Roots common to two root sets (same disk, parameters agreeing to digits,
    equal multiplicities), used when several cycles are available."""
    out = []
    for r in a:
        for s in b:
            if r.disk == s.disk and r.multiplicity == s.multiplicity and _agree(r.t0, s.t0, digits):
                out.append(r)
                break
    return out
