"""Forward-construction oracles shared by the unit and acceptance tests."""

import random

from qck.hyperelliptic import JacobianFp, SingularCurveError
from qck.qc import find_zeros


def constructed_series(rng: random.Random, p: int, N: int, max_roots: int = 4):
    """A polynomial prod (t - r_i) * u(t) mod p^N with u a unit on Z_p, and its roots.

    Roots are drawn with occasional exact repeats and near collisions.
    """
    mod = p**N
    roots = []
    for _ in range(rng.randint(1, max_roots)):
        kind = rng.random()
        if roots and kind < 0.2:
            roots.append(rng.choice(roots))
        elif roots and kind < 0.35:
            roots.append((rng.choice(roots) + p ** rng.randint(1, N - 1) * rng.randrange(1, p)) % mod)
        else:
            roots.append(rng.randrange(mod))
    unit = [rng.randrange(1, p)] + [p * rng.randrange(mod) % mod for _ in range(rng.randint(0, 3))]
    poly = unit
    for r in roots:
        out = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            out[i + 1] = (out[i + 1] + c) % mod
            out[i] = (out[i] - r * c) % mod
        poly = out
    return poly, roots


def check_zeros(poly, roots, p, N) -> list[str]:
    """Empty list iff find_zeros reports exactly the root multiset."""
    problems = []
    found = find_zeros(poly, p, N)
    if sum(m for _, m in found) != len(roots):
        problems.append(f"multiplicities {sum(m for _, m in found)} != {len(roots)}")
    covered = [0] * len(roots)
    for t0, m in found:
        k = int(t0.prec)
        near = [i for i, r in enumerate(roots) if (r - t0.residue(k)) % p**k == 0]
        if len(near) != m:
            problems.append(f"root {t0} claims multiplicity {m}, oracle has {len(near)}")
        for i in near:
            covered[i] += 1
    if any(c != 1 for c in covered):
        problems.append(f"coverage {covered}")
    return problems


def random_small_curve(rng: random.Random, q: int):
    while True:
        f = [rng.randrange(q) for _ in range(5)] + [1]
        try:
            return JacobianFp(f, q, seed=rng.randrange(10**6))
        except SingularCurveError:
            continue


def random_sieve_case(rng: random.Random, max_rank: int = 2, max_M: int = 8, max_primes: int = 3):
    """A small sieve instance together with the inputs of the exhaustive oracle."""
    from qck.mwsieve import LocalCurve, SieveInstance, all_tuples, prime_data

    r = rng.randint(1, max_rank)
    M = rng.randint(1, max_M)
    primes = rng.sample([3, 5, 7, 11, 13], rng.randint(1, max_primes))
    curves, gens, bases, data = [], [], [], []
    for v in primes:
        J = random_small_curve(rng, v)
        pts = J.affine_points()
        base = rng.choice(pts) if pts and rng.random() < 0.8 else None
        G = [J.random_element() for _ in range(r)]
        pd = prime_data(LocalCurve(v, tuple(J.f)), M, G, base, seed=rng.randrange(100))
        curves.append(J)
        gens.append(G)
        bases.append(base)
        data.append(pd)
    inst = SieveInstance(r, M, data, all_tuples(M, r))
    return inst, (curves, gens, bases, M, all_tuples(M, r))


def random_measured_graph(rng: random.Random):
    """A connected metric graph with a random total-mass-zero measure."""
    from fractions import Fraction as F

    from qck.graphheights import GraphMeasure, MetricGraph

    n = rng.randint(1, 5)
    vs = [f"v{i}" for i in range(n)]
    length = lambda: F(rng.randint(1, 6), rng.randint(1, 4))  # noqa: E731
    edges = [(f"t{i}", vs[rng.randrange(i)], vs[i], length()) for i in range(1, n)]
    edges += [(f"c{k}", rng.choice(vs), rng.choice(vs), length()) for k in range(rng.randint(0, 3))]
    G = MetricGraph.build(vs, edges)
    dens = {e.name: tuple(F(rng.randint(-5, 5)) for _ in range(rng.randint(0, 2))) for e in G.edges}
    masses = {v: F(rng.randint(-5, 5)) for v in vs}
    masses[vs[0]] -= GraphMeasure(dens, masses).total_mass(G)
    return G, GraphMeasure(dens, masses)
