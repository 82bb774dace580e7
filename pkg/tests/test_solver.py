from fractions import Fraction

import pytest

from bstiling.coloring import build_patch, extract_pattern, verify_patch
from bstiling.dynsys import kari_map, make_orbit
from bstiling.group import BS32, GroupParams, ball, britton_reduce, inverse_word, multiply, normalize
from bstiling.solver import (
    BUDGET_EXHAUSTED, SAT, UNSAT, Region, SolverConfig, is_period_on, pattern_table,
    period_overlap, region_ball, region_slab, shift_patch, slab_elements, solve,
)
from bstiling.tiles import TileSet, enumerate_times2, kari_bs32_tileset

F = Fraction
TS = kari_bs32_tileset()
Q2 = enumerate_times2()
ORBIT = make_orbit(kari_map(), F(5, 4), 8, 8)
OMEGA = "baBaabABAA"


def oracle_anchor_count(p, r):
    """Anchors of ball(r), decided with Britton reduction on plain words."""
    words = [g.word for g in ball(p, r)]

    def inside(w):
        return any(britton_reduce(p, w + inverse_word(u)) == "" for u in words)

    shape = ["", "a", "aa", "aaa", "b", "ba", "baa"]
    return sum(all(inside(g + s) for s in shape) for g in words)


def test_region_structure():
    R = region_ball(BS32, 4)
    assert len(R) == 147
    assert len(R.anchors) == 21
    assert all(len(keys) == 7 for keys in R.shapes.values())
    for g, gen in R.edges:
        assert multiply(BS32, g, gen) in R


@pytest.mark.parametrize("r", [2, 3])
def test_anchor_count_against_oracle(r):
    assert len(region_ball(BS32, r).anchors) == oracle_anchor_count(BS32, r)


def test_slab_shape():
    els = slab_elements(BS32, 5, 3, [1, 0])
    assert len(els) == 18
    assert {g.height for g in els} == {0, 1, 2}
    R = region_slab(BS32, 36, 2)
    assert (len(R), len(R.anchors)) == (74, 12)
    with pytest.raises(ValueError):
        slab_elements(BS32, 4, 2, [2])
    with pytest.raises(ValueError):
        slab_elements(BS32, 0, 2)


def test_pattern_table_merges_families():
    colors, table = pattern_table(TS)
    assert table.shape == (44, 7)
    assert colors["a"] == [0, 1, 2]
    assert len(colors["b"]) == 4


def check_witness(out, R, ts):
    assert out.status == SAT
    rep = verify_patch(out.witness, ts)
    assert rep.ok and rep.checked == len(R.anchors)
    assert set(out.witness) == set(R.edges)


def test_sat_on_ball3():
    R = region_ball(BS32, 3)
    out = solve(R, TS)
    check_witness(out, R, TS)
    assert out.exit_code == 0


@pytest.mark.parametrize("order", ["mrv", "dom/wdeg", "lex"])
def test_variable_orders_agree(order):
    cfg = SolverConfig(variable_order=order)
    check_witness(solve(region_ball(BS32, 4), TS, cfg), region_ball(BS32, 4), TS)
    assert solve(region_ball(BS32, 4), Q2, cfg).status == UNSAT


def test_minimal_refuting_radius_for_q2_subset():
    statuses = [solve(region_ball(BS32, r), Q2).status for r in range(5)]
    assert statuses == [SAT, SAT, SAT, SAT, UNSAT]


def test_budget_exhaustion():
    out = solve(region_ball(BS32, 6), TS, SolverConfig(budget=50))
    assert out.status == BUDGET_EXHAUSTED
    assert out.exit_code == 2
    assert out.witness is None


def test_hint_reproduces_the_orbit_coloring():
    R = region_ball(BS32, 4)
    gamma = build_patch(BS32, ORBIT, R.elements)
    hint = {k: c for k, c in gamma.items()}
    out = solve(R, TS, SolverConfig(value_order="hint", value_hint=hint))
    assert out.status == SAT
    assert out.witness == gamma.restrict(R.edges)


def test_deterministic_output():
    R = region_ball(BS32, 4)
    a, b = solve(R, TS), solve(R, TS)
    assert a.witness == b.witness
    assert a.stats.nodes == b.stats.nodes


def test_parallel_root_split():
    cfg = SolverConfig(parallel=True, deterministic=False, workers=2)
    R = region_ball(BS32, 3)
    check_witness(solve(R, TS, cfg), R, TS)
    assert solve(region_ball(BS32, 4), Q2, cfg).status == UNSAT


def test_degenerate_inputs():
    R = region_ball(BS32, 3)
    assert solve(R, TileSet(BS32, [])).status == UNSAT
    small = region_ball(BS32, 1)
    assert small.anchors == ()
    assert solve(small, TS).status == SAT
    with pytest.raises(ValueError):
        solve(region_ball(GroupParams(2, 1), 2), TS)


# -- periodicity probes ------------------------------------------------------------

def test_weak_period_on_ball3():
    patch = build_patch(BS32, ORBIT, ball(BS32, 3))
    assert is_period_on(patch, OMEGA)
    compared, bad = period_overlap(patch, "a")
    assert compared > 0 and bad > 0
    assert not is_period_on(patch, "a")


def test_weak_period_is_not_vacuous():
    # enlarge the region so that the omega-translate overlaps it
    els = set(ball(BS32, 3))
    els |= {multiply(BS32, OMEGA, g) for g in ball(BS32, 3)}
    patch = build_patch(BS32, ORBIT, els)
    compared, bad = period_overlap(patch, OMEGA)
    assert compared >= 2 * len(ball(BS32, 3))
    assert bad == 0


def test_shift_patch_moves_colors():
    patch = build_patch(BS32, ORBIT, ball(BS32, 2))
    h = normalize(BS32, "a")
    moved = shift_patch(BS32, patch, h)
    for (g, gen), c in patch.items():
        assert moved[(multiply(BS32, "A", g), gen)] == c
