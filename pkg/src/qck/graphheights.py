"""Metric graphs, piecewise polynomial potentials and local heights away from p.

Edges carry a source, a target and a positive rational length; an edge is
parameterized by x_e in [0, length] (or [0, 1] in unit-parameter mode).  A
potential j is stored edge by edge as a polynomial in x_e with rational
coefficients, together with its values at vertices.

The Laplacian of g has edge density -g'' on every edge and, at a vertex v,
mass sum_{t(e)=v} g'(end) - sum_{s(e)=v} g'(0).  With this sign the total
mass of a Laplacian is always zero.  The opposite vertex sign is available as
``convention="display"``; its image satisfies sum(masses) = sum(edge masses).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .padic import LogBranch, PadicNumber, padic_log, serialize


class GraphError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Edge:
    name: str
    source: str
    target: str
    length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "length", _frac(self.length))
        if self.length <= 0:
            raise GraphError(f"edge {self.name} must have positive length")


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.vertices:
            raise GraphError("graph has no vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex names")
        names = [e.name for e in self.edges]
        if len(set(names)) != len(names):
            raise GraphError("duplicate edge names")
        vs = set(self.vertices)
        for e in self.edges:
            if e.source not in vs or e.target not in vs:
                raise GraphError(f"edge {e.name} has an unknown endpoint")
        if not self._connected():
            raise GraphError("graph is not connected")

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[tuple]) -> MetricGraph:
        """edges: (name, source, target, length) tuples."""
        return cls(tuple(vertices), tuple(Edge(n, s, t, _frac(l)) for n, s, t, l in edges))

    def _connected(self) -> bool:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            adj[e.source].add(e.target)
            adj[e.target].add(e.source)
        seen = {self.vertices[0]}
        todo = [self.vertices[0]]
        while todo:
            for w in adj[todo.pop()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e.name == name:
                return e
        raise GraphError(f"no edge named {name}")

    @property
    def edge_names(self) -> list[str]:
        return [e.name for e in self.edges]

    @property
    def genus(self) -> int:
        """First Betti number."""
        return len(self.edges) - len(self.vertices) + 1

    def reversed_edge(self, name: str) -> MetricGraph:
        es = [Edge(e.name, e.target, e.source, e.length) if e.name == name else e for e in self.edges]
        return MetricGraph(self.vertices, tuple(es))


@dataclass(frozen=True)
class GraphPoint:
    """A rational point: offset along an edge, or a vertex."""

    edge: str | None = None
    offset: Fraction = Fraction(0)
    vertex: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "offset", _frac(self.offset))
        if (self.edge is None) == (self.vertex is None):
            raise GraphError("a graph point is either on an edge or a vertex")

    @classmethod
    def at(cls, vertex: str) -> GraphPoint:
        return cls(vertex=vertex)

    def check(self, graph: MetricGraph):
        if self.vertex is not None:
            if self.vertex not in graph.vertices:
                raise GraphError(f"point off graph: no vertex {self.vertex}")
            return
        e = graph.edge(self.edge)
        if not 0 <= self.offset <= e.length:
            raise GraphError(f"point off graph: offset {self.offset} outside [0, {e.length}]")

    def __str__(self):
        return self.vertex if self.vertex is not None else f"{self.edge}@{self.offset}"


# ---------------------------------------------------------------------------
# polynomials with Fraction coefficients, lowest degree first


def _trim(a: list[Fraction]) -> tuple[Fraction, ...]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def _peval(a: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pderiv(a: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return _trim([k * a[k] for k in range(1, len(a))])


def _pint(a: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return _trim([Fraction(0)] + [Fraction(c) / (k + 1) for k, c in enumerate(a)])


@dataclass(frozen=True)
class PiecewisePoly:
    """Edge polynomials (in x_e) plus vertex values."""

    edges: Mapping[str, tuple[Fraction, ...]]
    vertex_values: Mapping[str, Fraction]
    unit_parameter: bool = False

    @classmethod
    def from_edges(cls, graph: MetricGraph, edges: Mapping[str, Sequence], unit_parameter: bool = False) -> PiecewisePoly:
        """Build from edge polynomials, reading vertex values off the edges.

        Raises GraphError if the polynomials disagree at a vertex.
        """
        polys = {e.name: _trim([_frac(c) for c in edges.get(e.name, ())]) for e in graph.edges}
        values: dict[str, Fraction] = {}
        for e in graph.edges:
            end = Fraction(1) if unit_parameter else e.length
            for v, x in ((e.source, Fraction(0)), (e.target, end)):
                val = _peval(polys[e.name], x)
                if v in values and values[v] != val:
                    raise GraphError(f"discontinuous at vertex {v}")
                values[v] = val
        for v in graph.vertices:
            values.setdefault(v, Fraction(0))
        return cls(polys, values, unit_parameter)

    def value(self, point: GraphPoint, graph: MetricGraph) -> Fraction:
        point.check(graph)
        if point.vertex is not None:
            return self.vertex_values[point.vertex]
        x = point.offset
        if self.unit_parameter:
            x = x / graph.edge(point.edge).length
        return _peval(self.edges[point.edge], x)

    def is_continuous(self, graph: MetricGraph) -> bool:
        try:
            other = PiecewisePoly.from_edges(graph, self.edges, self.unit_parameter)
        except GraphError:
            return False
        return all(other.vertex_values[v] == self.vertex_values[v] for v in graph.vertices if _touches(graph, v))

    def __sub__(self, other: PiecewisePoly) -> PiecewisePoly:
        keys = set(self.edges) | set(other.edges)
        edges = {}
        for k in keys:
            a, b = list(self.edges.get(k, ())), list(other.edges.get(k, ()))
            n = max(len(a), len(b))
            a += [Fraction(0)] * (n - len(a))
            b += [Fraction(0)] * (n - len(b))
            edges[k] = _trim([x - y for x, y in zip(a, b)])
        vals = {v: self.vertex_values.get(v, 0) - other.vertex_values.get(v, 0)
                for v in set(self.vertex_values) | set(other.vertex_values)}
        return PiecewisePoly(edges, vals, self.unit_parameter)


def _touches(graph: MetricGraph, v: str) -> bool:
    return any(v in (e.source, e.target) for e in graph.edges)


@dataclass(frozen=True)
class GraphMeasure:
    """Polynomial edge densities (in x_e) plus vertex point masses."""

    densities: Mapping[str, tuple[Fraction, ...]] = field(default_factory=dict)
    masses: Mapping[str, Fraction] = field(default_factory=dict)

    def edge_mass(self, graph: MetricGraph, unit_parameter: bool = False) -> Fraction:
        total = Fraction(0)
        for e in graph.edges:
            d = self.densities.get(e.name, ())
            end = Fraction(1) if unit_parameter else e.length
            total += _peval(_pint(d), end)
        return total

    def total_mass(self, graph: MetricGraph, unit_parameter: bool = False) -> Fraction:
        return self.edge_mass(graph, unit_parameter) + sum(self.masses.values(), Fraction(0))

    def normalized(self, graph: MetricGraph) -> GraphMeasure:
        dens = {e.name: _trim(list(self.densities.get(e.name, ()))) for e in graph.edges}
        mass = {v: _frac(self.masses.get(v, 0)) for v in graph.vertices}
        return GraphMeasure(dens, mass)

    def __eq__(self, other):
        if not isinstance(other, GraphMeasure):
            return NotImplemented
        keys = set(self.densities) | set(other.densities)
        if any(_trim(list(self.densities.get(k, ()))) != _trim(list(other.densities.get(k, ()))) for k in keys):
            return False
        keys = set(self.masses) | set(other.masses)
        return all(_frac(self.masses.get(k, 0)) == _frac(other.masses.get(k, 0)) for k in keys)

    def __hash__(self):
        return hash((tuple(sorted((k, _trim(list(v))) for k, v in self.densities.items() if _trim(list(v)))),
                     tuple(sorted((k, v) for k, v in self.masses.items() if v))))


# ---------------------------------------------------------------------------
# Laplacian


def _vertex_sign(convention: str) -> int:
    if convention == "balanced":
        return 1
    if convention == "display":
        return -1
    raise ValueError(f"unknown Laplacian convention {convention!r}")


def laplacian(g: PiecewisePoly, graph: MetricGraph, convention: str = "balanced") -> GraphMeasure:
    """Edge densities -g'' and vertex masses of g."""
    sign = _vertex_sign(convention)
    if not g.is_continuous(graph):
        raise GraphError("laplacian needs a continuous function")
    dens: dict[str, tuple[Fraction, ...]] = {}
    mass = {v: Fraction(0) for v in graph.vertices}
    for e in graph.edges:
        poly = g.edges.get(e.name, ())
        d1 = _pderiv(poly)
        dens[e.name] = _trim([-c for c in _pderiv(d1)])
        end = Fraction(1) if g.unit_parameter else e.length
        mass[e.target] += sign * _peval(d1, end)
        mass[e.source] -= sign * _peval(d1, Fraction(0))
    return GraphMeasure(dens, mass)


# ---------------------------------------------------------------------------
# homology


def cycle_basis(graph: MetricGraph) -> list[dict[str, int]]:
    """Fundamental cycles of a BFS spanning tree, as signed edge vectors."""
    root = graph.vertices[0]
    parent: dict[str, tuple[str, str, int] | None] = {root: None}
    tree: set[str] = set()
    adj: dict[str, list[tuple[Edge, str, int]]] = {v: [] for v in graph.vertices}
    for e in graph.edges:
        adj[e.source].append((e, e.target, 1))
        if e.source != e.target:
            adj[e.target].append((e, e.source, -1))
    todo = deque([root])
    while todo:
        v = todo.popleft()
        for e, w, s in adj[v]:
            if w not in parent:
                parent[w] = (v, e.name, s)
                tree.add(e.name)
                todo.append(w)

    def path_to_root(v: str) -> dict[str, int]:
        out: dict[str, int] = {}
        while parent[v] is not None:
            u, name, s = parent[v]
            # traversing from v back to u runs against the direction u -> v
            out[name] = out.get(name, 0) - s
            v = u
        return out

    basis = []
    for e in graph.edges:
        if e.name in tree:
            continue
        # e then target -> root -> source
        vec = {e.name: 1}
        for k, c in path_to_root(e.target).items():
            vec[k] = vec.get(k, 0) + c
        for k, c in path_to_root(e.source).items():
            vec[k] = vec.get(k, 0) - c
        basis.append({k: c for k, c in vec.items() if c})
    return basis


def _dm(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> DomainMatrix:
    ncols = len(rows[0]) if rows else (ncols or 0)
    return DomainMatrix([[QQ(int(Fraction(x).numerator), int(Fraction(x).denominator)) for x in r] for r in rows],
                        (len(rows), ncols), QQ)


def _to_frac(m: DomainMatrix) -> list[list[Fraction]]:
    return [[Fraction(int(x.numerator), int(x.denominator)) for x in row] for row in m.to_list()]


@dataclass(frozen=True)
class HomologyProjection:
    """Orthogonal projection QE -> H_1 for the pairing e.e' = length * delta.

    ``matrix[i][j]`` is the e_i-coefficient of pi(e_j); ``coords[k][j]`` is the
    k-th cycle-basis coordinate of pi(e_j).
    """

    edges: tuple[str, ...]
    cycles: tuple[Mapping[str, Fraction], ...]
    matrix: tuple[tuple[Fraction, ...], ...]
    coords: tuple[tuple[Fraction, ...], ...]

    def image(self, edge: str) -> dict[str, Fraction]:
        j = self.edges.index(edge)
        return {self.edges[i]: self.matrix[i][j] for i in range(len(self.edges)) if self.matrix[i][j]}


def homology_projection(graph: MetricGraph, cycles: Sequence[Mapping[str, int]] | None = None) -> HomologyProjection:
    names = graph.edge_names
    if cycles is None:
        cycles = cycle_basis(graph)
    cyc = tuple({k: _frac(v) for k, v in c.items()} for c in cycles)
    E, r = len(names), len(cyc)
    if r == 0:
        zero = tuple(tuple(Fraction(0) for _ in range(E)) for _ in range(E))
        return HomologyProjection(tuple(names), cyc, zero, ())
    for c in cyc:
        if set(c) - set(names):
            raise GraphError("cycle mentions an unknown edge")
        for v in graph.vertices:
            flow = sum((c.get(e.name, 0) for e in graph.edges if e.target == v), Fraction(0)) \
                - sum((c.get(e.name, 0) for e in graph.edges if e.source == v), Fraction(0))
            if flow:
                raise GraphError("supplied cycle is not closed")
    lengths = [graph.edge(n).length for n in names]
    B = [[c.get(n, Fraction(0)) for c in cyc] for n in names]  # E x r
    BtL = _dm([[B[i][k] * lengths[i] for i in range(E)] for k in range(r)])  # r x E
    G = BtL * _dm(B)
    if G.rank() < r:
        raise GraphError("supplied cycles are linearly dependent")
    coords = G.inv() * BtL  # r x E
    P = _dm(B) * coords
    return HomologyProjection(tuple(names), cyc,
                              tuple(tuple(r_) for r_ in _to_frac(P)),
                              tuple(tuple(r_) for r_ in _to_frac(coords)))


# ---------------------------------------------------------------------------
# the measure attached to a correspondence


@dataclass(frozen=True)
class BDInput:
    """Action of F on H_1 (columns are images of the cycle-basis vectors) and
    per-vertex traces on the component Tate modules."""

    f_action: tuple[tuple[Fraction, ...], ...]
    traces: Mapping[str, Fraction] = field(default_factory=dict)
    cycles: tuple[Mapping[str, int], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "f_action", tuple(tuple(_frac(x) for x in r) for r in self.f_action))
        object.__setattr__(self, "traces", {k: _frac(v) for k, v in self.traces.items()})


def bd_measure(graph: MetricGraph, data: BDInput, unit_parameter: bool = False) -> GraphMeasure:
    """sum_e (1/len e) e*(F(pi(e))) e + 1/2 sum_v Tr(F | V_p(X_v)) v."""
    proj = homology_projection(graph, data.cycles)
    r = len(proj.cycles)
    A = data.f_action
    if len(A) != r or any(len(row) != r for row in A):
        raise GraphError(f"F-action must be {r}x{r} for a graph with first Betti number {r}")
    for v in data.traces:
        if v not in graph.vertices:
            raise GraphError(f"trace given for unknown vertex {v}")
    dens = {}
    names = proj.edges
    for j, name in enumerate(names):
        e = graph.edge(name)
        coord = [proj.coords[k][j] for k in range(r)]
        image = [sum((A[m][k] * coord[k] for k in range(r)), Fraction(0)) for m in range(r)]
        coeff = sum((image[m] * proj.cycles[m].get(name, 0) for m in range(r)), Fraction(0))
        dens[name] = _trim([coeff / e.length])
    mass = {v: data.traces.get(v, Fraction(0)) / 2 for v in graph.vertices}
    mu = GraphMeasure(dens, mass)
    total = mu.total_mass(graph, unit_parameter)
    if total:
        raise GraphError(f"measure has total mass {total}; no potential exists "
                         f"(edge part {mu.edge_mass(graph, unit_parameter)}, vertex part {total - mu.edge_mass(graph, unit_parameter)})")
    return mu


# ---------------------------------------------------------------------------
# solving the Laplace equation


def solve_laplacian(
    mu: GraphMeasure,
    basepoint: GraphPoint,
    graph: MetricGraph,
    unit_parameter: bool = False,
    convention: str = "balanced",
) -> PiecewisePoly:
    """The continuous piecewise polynomial j with laplacian(j) = mu, j(basepoint) = 0."""
    sign = _vertex_sign(convention)
    basepoint.check(graph)
    edge_total = mu.edge_mass(graph, unit_parameter)
    vertex_total = sum((_frac(m) for m in mu.masses.values()), Fraction(0))
    if vertex_total + sign * edge_total:
        raise GraphError(f"measure has total mass {edge_total + vertex_total}; no potential exists")
    for k in mu.densities:
        graph.edge(k)
    for v in mu.masses:
        if v not in graph.vertices:
            raise GraphError(f"mass at unknown vertex {v}")
    # particular solutions of -g'' = d with no constant or linear term
    part = {e.name: _trim([-c for c in _pint(_pint(mu.densities.get(e.name, ())))]) for e in graph.edges}
    E, V = len(graph.edges), len(graph.vertices)
    vidx = {v: i for i, v in enumerate(graph.vertices)}
    n = 2 * E + V  # c0_e, c1_e, phi_v
    rows, rhs = [], []

    def row():
        return [Fraction(0)] * n

    for k, e in enumerate(graph.edges):
        end = Fraction(1) if unit_parameter else e.length
        r = row()
        r[2 * k] = Fraction(1)
        r[2 * E + vidx[e.source]] = Fraction(-1)
        rows.append(r)
        rhs.append(-_peval(part[e.name], Fraction(0)))
        r = row()
        r[2 * k] = Fraction(1)
        r[2 * k + 1] = end
        r[2 * E + vidx[e.target]] = Fraction(-1)
        rows.append(r)
        rhs.append(-_peval(part[e.name], end))
    for v in graph.vertices:
        r = row()
        const = Fraction(0)
        for k, e in enumerate(graph.edges):
            end = Fraction(1) if unit_parameter else e.length
            dp = _pderiv(part[e.name])
            if e.target == v:
                r[2 * k + 1] += sign
                const += sign * _peval(dp, end)
            if e.source == v:
                r[2 * k + 1] -= sign
                const -= sign * _peval(dp, Fraction(0))
        rows.append(r)
        rhs.append(_frac(mu.masses.get(v, 0)) - const)
    r = row()
    if basepoint.vertex is not None:
        r[2 * E + vidx[basepoint.vertex]] = Fraction(1)
        rows.append(r)
        rhs.append(Fraction(0))
    else:
        k = graph.edge_names.index(basepoint.edge)
        x = basepoint.offset / graph.edges[k].length if unit_parameter else basepoint.offset
        r[2 * k] = Fraction(1)
        r[2 * k + 1] = x
        rows.append(r)
        rhs.append(-_peval(part[basepoint.edge], x))
    sol = _solve_consistent(rows, rhs, n)
    edges = {}
    for k, e in enumerate(graph.edges):
        poly = list(part[e.name]) + [Fraction(0)] * 2
        poly[0] += sol[2 * k]
        poly[1] += sol[2 * k + 1]
        edges[e.name] = _trim(poly)
    values = {v: sol[2 * E + vidx[v]] for v in graph.vertices}
    return PiecewisePoly(edges, values, unit_parameter)


def _solve_consistent(rows: list[list[Fraction]], rhs: list[Fraction], n: int) -> list[Fraction]:
    """Unique solution of an overdetermined but consistent exact system."""
    aug = _dm([r + [b] for r, b in zip(rows, rhs)])
    red, pivots = aug.rref()
    if n in pivots:
        raise GraphError("inconsistent Laplace system")
    if len(pivots) < n:
        raise GraphError("Laplace system is underdetermined")
    M = _to_frac(red)
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = M[i][n]
    return sol


# ---------------------------------------------------------------------------
# local heights


@dataclass(frozen=True)
class LocalHeightTable:
    ell: int
    p: int
    values: Mapping[str, PadicNumber]
    potentials: Mapping[str, Fraction]
    upsilon: tuple[PadicNumber, ...]


def local_height_values(
    j: PiecewisePoly,
    graph: MetricGraph,
    ell: int,
    reduction: Mapping[str, GraphPoint],
    p: int,
    N: int,
    branch: LogBranch | None = None,
) -> LocalHeightTable:
    """h_ell(label) = j(red(label)) * log_p(ell), with the set of attained values."""
    if ell == p:
        raise GraphError("local heights on graphs are for primes different from p")
    lg = padic_log(PadicNumber.from_int(ell, p, N), branch)
    pots = {}
    vals = {}
    for label, pt in reduction.items():
        jv = j.value(pt, graph)
        pots[label] = jv
        vals[label] = (lg * PadicNumber.from_rational(jv, p, N + 4)).add_bigoh(N) if jv else PadicNumber.zero(p, N)
    distinct = sorted(set(pots.values()) | ({Fraction(0)} if not pots else set()))
    ups = tuple((lg * PadicNumber.from_rational(x, p, N + 4)).add_bigoh(N) if x else PadicNumber.zero(p, N)
                for x in distinct)
    return LocalHeightTable(ell, p, vals, pots, ups)


def upsilon_sums(tables: Sequence[LocalHeightTable]) -> list[PadicNumber]:
    """All sums of one attained value per bad prime."""
    if not tables:
        return []
    out = list(tables[0].upsilon)
    for t in tables[1:]:
        out = [a + b for a in out for b in t.upsilon]
    seen, uniq = set(), []
    for x in out:
        key = serialize(x.add_bigoh(min(t.values[k].prec for t in tables for k in t.values) if any(t.values for t in tables) else x.prec))
        if key not in seen:
            seen.add(key)
            uniq.append(x)
    return uniq


# ---------------------------------------------------------------------------
# graph files
#
#   vertices: v0 v1 v2
#   e1: v0 -> v2 length 1/3
#   Faction: [[1, 0], [0, -1]]
#   traces: v0=1 v1=-1
#   cycles: e1+e2, e3-e1
#   basepoint: v1            (or e1@1/2)
#   reduction: P=v0, Q=e1@1/3
#   convention: balanced     (or display)
#   unit_parameter: no


@dataclass(frozen=True)
class GraphFile:
    graph: MetricGraph
    bd: BDInput | None
    basepoint: GraphPoint | None
    reduction: Mapping[str, GraphPoint]
    convention: str = "balanced"
    unit_parameter: bool = False


_EDGE_RE = re.compile(r"^\s*([\w.]+)\s*:\s*([\w.]+)\s*->\s*([\w.]+)\s+length\s+(-?[\d/]+)\s*$")


def parse_point(text: str) -> GraphPoint:
    text = text.strip()
    if "@" in text:
        e, off = text.split("@", 1)
        return GraphPoint(edge=e.strip(), offset=Fraction(off.strip()))
    return GraphPoint(vertex=text)


def parse_graph_file(text: str) -> GraphFile:
    vertices: list[str] = []
    edges: list[tuple] = []
    faction = None
    traces: dict[str, Fraction] = {}
    cycles = None
    basepoint = None
    reduction: dict[str, GraphPoint] = {}
    convention = "balanced"
    unit = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _EDGE_RE.match(line)
        if m:
            edges.append((m.group(1), m.group(2), m.group(3), Fraction(m.group(4))))
            continue
        if ":" not in line:
            raise GraphError(f"line {lineno}: cannot parse {raw!r}")
        key, val = (s.strip() for s in line.split(":", 1))
        k = key.lower()
        if k == "vertices":
            vertices = val.replace(",", " ").split()
        elif k == "faction":
            faction = _parse_matrix(val, lineno)
        elif k == "traces":
            for item in val.replace(",", " ").split():
                v, t = item.split("=")
                traces[v.strip()] = Fraction(t.strip())
        elif k == "cycles":
            cycles = tuple(_parse_cycle(c) for c in val.split(","))
        elif k == "basepoint":
            basepoint = parse_point(val)
        elif k == "reduction":
            for item in val.split(","):
                if item.strip():
                    lab, pt = item.split("=")
                    reduction[lab.strip()] = parse_point(pt)
        elif k == "convention":
            convention = val
        elif k == "unit_parameter":
            unit = val.lower() in ("1", "yes", "true")
        else:
            raise GraphError(f"line {lineno}: unknown key {key!r}")
    graph = MetricGraph.build(vertices, edges)
    bd = None
    if faction is not None or traces:
        r = graph.genus if cycles is None else len(cycles)
        bd = BDInput(faction if faction is not None else tuple((0,) * r for _ in range(r)), traces, cycles)
    for pt in ([basepoint] if basepoint else []) + list(reduction.values()):
        pt.check(graph)
    return GraphFile(graph, bd, basepoint, reduction, convention, unit)


def _parse_matrix(text: str, lineno: int) -> tuple[tuple[Fraction, ...], ...]:
    text = text.strip()
    if text in ("[]", "[[]]"):
        return ()
    rows = re.findall(r"\[([^\[\]]*)\]", text)
    if not rows:
        raise GraphError(f"line {lineno}: bad matrix {text!r}")
    return tuple(tuple(Fraction(x.strip()) for x in r.split(",") if x.strip()) for r in rows)


def _parse_cycle(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for sign, name in re.findall(r"([+-]?)\s*([\w.]+)", text):
        out[name] = out.get(name, 0) + (-1 if sign == "-" else 1)
    return out


def format_graph_file(gf: GraphFile) -> str:
    lines = ["vertices: " + " ".join(gf.graph.vertices)]
    for e in gf.graph.edges:
        lines.append(f"{e.name}: {e.source} -> {e.target} length {e.length}")
    if gf.bd is not None:
        lines.append("Faction: [" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in gf.bd.f_action) + "]")
        if gf.bd.traces:
            lines.append("traces: " + " ".join(f"{k}={v}" for k, v in gf.bd.traces.items()))
        if gf.bd.cycles is not None:
            lines.append("cycles: " + ", ".join(
                "".join(("+" if c > 0 else "-") * abs(int(c)) + k for k, c in cyc.items()) for cyc in gf.bd.cycles))
    if gf.basepoint is not None:
        lines.append(f"basepoint: {gf.basepoint}")
    if gf.reduction:
        lines.append("reduction: " + ", ".join(f"{k}={v}" for k, v in gf.reduction.items()))
    if gf.convention != "balanced":
        lines.append(f"convention: {gf.convention}")
    if gf.unit_parameter:
        lines.append("unit_parameter: yes")
    return "\n".join(lines) + "\n"


def heights_from_file(gf: GraphFile, ell: int, p: int, N: int, branch: LogBranch | None = None) -> LocalHeightTable:
    """Measure, potential and local heights for a parsed graph file."""
    if gf.basepoint is None:
        raise GraphError("graph file has no basepoint")
    if gf.bd is None:
        mu = GraphMeasure({}, {})
    else:
        mu = bd_measure(gf.graph, gf.bd, gf.unit_parameter)
    j = solve_laplacian(mu, gf.basepoint, gf.graph, gf.unit_parameter, gf.convention)
    return local_height_values(j, gf.graph, ell, gf.reduction, p, N, branch)
