import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qck.graphheights import (
    BDInput,
    GraphError,
    GraphMeasure,
    GraphPoint,
    MetricGraph,
    PiecewisePoly,
    bd_measure,
    cycle_basis,
    format_graph_file,
    heights_from_file,
    homology_projection,
    laplacian,
    local_height_values,
    parse_graph_file,
    solve_laplacian,
    upsilon_sums,
)
from qck.padic import PadicNumber, log_rational

F = Fraction


def two_loops(length=2):
    return MetricGraph.build(["v"], [("e1", "v", "v", length), ("e2", "v", "v", length)])


def path_188():
    return MetricGraph.build(["v0", "v2", "v1"], [("e1", "v0", "v2", F(1, 3)), ("e2", "v2", "v1", F(1, 3))])


def test_constant_has_zero_laplacian():
    G = path_188()
    g = PiecewisePoly.from_edges(G, {"e1": [5], "e2": [5]})
    assert laplacian(g, G) == GraphMeasure({}, {})


def test_linear_function_on_one_edge():
    G = MetricGraph.build(["a", "b"], [("e", "a", "b", 3)])
    g = PiecewisePoly.from_edges(G, {"e": [0, 1]})
    # outgoing slope convention: mass +1 at the source, -1 at the target
    assert laplacian(g, G, convention="display") == GraphMeasure({"e": ()}, {"a": 1, "b": -1})
    # mass-balanced convention has the opposite vertex signs
    assert laplacian(g, G) == GraphMeasure({"e": ()}, {"a": -1, "b": 1})


def test_quadratic_on_one_edge_balances():
    L = F(3)
    G = MetricGraph.build(["a", "b"], [("e", "a", "b", L)])
    mu = laplacian(PiecewisePoly.from_edges(G, {"e": [0, 0, 1]}), G)
    assert mu == GraphMeasure({"e": (F(-2),)}, {"a": 0, "b": 2 * L})
    assert mu.total_mass(G) == 0


def test_discontinuous_input_rejected():
    G = path_188()
    with pytest.raises(GraphError, match="discontinuous"):
        PiecewisePoly.from_edges(G, {"e1": [0, 1], "e2": [0]})


def test_projection_on_tree_and_loop():
    tree = MetricGraph.build(["a", "b", "c"], [("x", "a", "b", 1), ("y", "b", "c", 2)])
    proj = homology_projection(tree)
    assert all(v == 0 for row in proj.matrix for v in row)
    loop = MetricGraph.build(["v"], [("e", "v", "v", 5)])
    assert homology_projection(loop).image("e") == {"e": 1}


def test_projection_two_loops_is_diagonal():
    proj = homology_projection(two_loops())
    assert proj.image("e1") == {"e1": 1}
    assert proj.image("e2") == {"e2": 1}


def test_projection_is_orthogonal_idempotent():
    G = MetricGraph.build("abc", [("x", "a", "b", 1), ("y", "b", "c", 2), ("z", "c", "a", 3), ("w", "a", "c", F(1, 2))])
    proj = homology_projection(G)
    n = len(proj.edges)
    M = proj.matrix
    sq = [[sum(M[i][k] * M[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert sq == [list(r) for r in M]
    lengths = [G.edge(e).length for e in proj.edges]
    # self-adjoint for the length-weighted pairing
    for i in range(n):
        for j in range(n):
            assert lengths[i] * M[i][j] == lengths[j] * M[j][i]


def test_bd_measure_e161():
    a, b, c = F(-4), F(3), F(5)
    mu = bd_measure(two_loops(), BDInput(((a, b), (c, -a))))
    assert mu == GraphMeasure({"e1": (a / 2,), "e2": (-a / 2,)}, {})


def test_bd_measure_tree_is_zero():
    tree = MetricGraph.build(["a", "b"], [("x", "a", "b", 1)])
    assert bd_measure(tree, BDInput((), {})) == GraphMeasure({}, {})


def test_bd_measure_traces_on_path():
    t = F(7, 2)
    mu = bd_measure(path_188(), BDInput((), {"v0": 2 * t, "v1": -2 * t}))
    assert mu.masses == {"v0": t, "v2": 0, "v1": -t}


def test_bd_measure_nonzero_mass_rejected():
    with pytest.raises(GraphError, match="total mass"):
        bd_measure(path_188(), BDInput((), {"v0": 2}))


def test_zero_measure_gives_zero_potential():
    G = two_loops()
    j = solve_laplacian(GraphMeasure({}, {}), GraphPoint.at("v"), G)
    assert j.value(GraphPoint("e1", 1), G) == 0


def test_e161_potential_values():
    a = F(-4)
    G = two_loops()
    mu = bd_measure(G, BDInput(((a, 3), (5, -a))))
    j = solve_laplacian(mu, GraphPoint.at("v"), G)
    values = [j.value(P, G) for P in (GraphPoint("e1", 1), GraphPoint.at("v"), GraphPoint("e2", 1))]
    # an edge of length 2 with density a/2 peaks at a/4 at its midpoint
    assert values == [a / 4, 0, -a / 4]
    assert laplacian(j, G) == mu


def test_path_188_ratio():
    G = path_188()
    t = F(5)
    j = solve_laplacian(bd_measure(G, BDInput((), {"v0": 2 * t, "v1": -2 * t})), GraphPoint.at("v1"), G)
    v0, v2, v1 = (j.value(GraphPoint.at(v), G) for v in ("v0", "v2", "v1"))
    assert v1 == 0 and v0 == 2 * v2 and v2 != 0


def test_unsolvable_measure_rejected():
    G = path_188()
    with pytest.raises(GraphError, match="no potential"):
        solve_laplacian(GraphMeasure({}, {"v0": 1}), GraphPoint.at("v0"), G)


def test_trivial_graph_heights():
    G = MetricGraph.build(["v"], [])
    j = solve_laplacian(GraphMeasure({}, {}), GraphPoint.at("v"), G)
    tab = local_height_values(j, G, 3, {"P": GraphPoint.at("v"), "Q": GraphPoint.at("v")}, 7, 5)
    assert all(v.is_zero() for v in tab.values.values())
    assert len(tab.upsilon) == 1 and tab.upsilon[0].is_zero()


def test_upsilon_e161_with_a_equal_minus_four():
    # potentials a, 0, -a at the three reduction points, a = -4
    p, N = 29, 5
    G = MetricGraph.build(["v"], [("e1", "v", "v", 2), ("e2", "v", "v", 2)])
    j = PiecewisePoly.from_edges(G, {"e1": [0, -8, 4], "e2": [0, 8, -4]})
    red = {"P": GraphPoint("e1", 1), "Q": GraphPoint.at("v"), "R": GraphPoint("e2", 1)}
    assert [j.value(pt, G) for pt in red.values()] == [-4, 0, 4]
    tab = local_height_values(j, G, 7, red, p, N)
    lg = log_rational(7, p, N)
    assert set(map(str, tab.upsilon)) == {str(lg * -4), str(PadicNumber.zero(p, N)), str(lg * 4)}


def test_h2_188_heights_are_multiples():
    G = path_188()
    t = F(3)
    j = solve_laplacian(bd_measure(G, BDInput((), {"v0": 2 * t, "v1": -2 * t})), GraphPoint.at("v1"), G)
    red = {"A": GraphPoint.at("v0"), "B": GraphPoint.at("v2"), "C": GraphPoint.at("v1")}
    tab = local_height_values(j, G, 2, red, 3, 6)
    c = tab.values["B"]
    assert tab.values["A"] == c * 2 and tab.values["C"].is_zero()


def test_upsilon_sums_combine_tables():
    G = path_188()
    j = PiecewisePoly.from_edges(G, {"e1": [2, -3], "e2": [1, -3]})
    t1 = local_height_values(j, G, 2, {"A": GraphPoint.at("v0"), "B": GraphPoint.at("v1")}, 5, 6)
    t2 = local_height_values(j, G, 3, {"A": GraphPoint.at("v2")}, 5, 6)
    assert len(upsilon_sums([t1, t2])) == 2


@st.composite
def random_graph(draw):
    n = draw(st.integers(1, 5))
    vs = [f"v{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        edges.append((f"t{i}", vs[draw(st.integers(0, i - 1))], vs[i], F(draw(st.integers(1, 6)), draw(st.integers(1, 4)))))
    for k in range(draw(st.integers(0, 3))):
        s, t = draw(st.sampled_from(vs)), draw(st.sampled_from(vs))
        edges.append((f"c{k}", s, t, F(draw(st.integers(1, 6)), draw(st.integers(1, 4)))))
    G = MetricGraph.build(vs, edges)
    dens = {e.name: tuple(F(draw(st.integers(-5, 5))) for _ in range(draw(st.integers(0, 2)))) for e in G.edges}
    masses = {v: F(draw(st.integers(-5, 5))) for v in vs}
    mu = GraphMeasure(dens, masses)
    # fix the total mass at the first vertex
    masses[vs[0]] -= mu.total_mass(G)
    return G, GraphMeasure(dens, masses)


@given(random_graph(), st.sampled_from(["balanced", "display"]))
@settings(max_examples=200)
def test_solve_then_laplacian_round_trip(data, convention):
    G, mu = data
    if convention == "display":
        # the vertex masses flip sign under the other convention
        mu = GraphMeasure(mu.densities, {v: -m for v, m in mu.masses.items()})
    j = solve_laplacian(mu, GraphPoint.at(G.vertices[0]), G, convention=convention)
    assert j.is_continuous(G)
    assert j.value(GraphPoint.at(G.vertices[0]), G) == 0
    assert laplacian(j, G, convention=convention) == mu.normalized(G)


def test_cycle_basis_is_closed():
    G = MetricGraph.build("abc", [("x", "a", "b", 1), ("y", "b", "c", 1), ("z", "c", "a", 1), ("w", "a", "c", 2)])
    basis = cycle_basis(G)
    assert len(basis) == G.genus == 2
    homology_projection(G, basis)  # validates closedness


GRAPH_FILE = """\
vertices: v0 v2 v1
e1: v0 -> v2 length 1/3
e2: v2 -> v1 length 1/3
traces: v0=4 v1=-4
basepoint: v1
reduction: A=v0, B=v2, C=v1, D=e1@1/6
"""


def test_graph_file_round_trip_and_heights():
    gf = parse_graph_file(GRAPH_FILE)
    again = parse_graph_file(format_graph_file(gf))
    assert again == gf
    tab = heights_from_file(gf, 2, 5, 6)
    assert tab.potentials == {"A": F(4, 3), "B": F(2, 3), "C": 0, "D": 1}


def test_graph_file_errors():
    with pytest.raises(GraphError, match="unknown key"):
        parse_graph_file("vertices: a\nbogus: 1\n")
    with pytest.raises(GraphError):
        parse_graph_file("vertices: a b\ne: a -> c length 1\n")
    with pytest.raises(GraphError, match="not connected"):
        parse_graph_file("vertices: a b\n")
    with pytest.raises(GraphError, match="positive"):
        parse_graph_file("vertices: a b\ne: a -> b length 0\n")
