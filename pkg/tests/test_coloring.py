from fractions import Fraction

import pytest

from bstiling.coloring import (
    IncompletePattern, OrbitWindowError, Patch, build_patch, dump_patch, extract_pattern,
    gamma_a_label, gamma_b_label, load_patch, shape_edges, verify_patch,
)
from bstiling.dynsys import BalancedRepSpec, balanced_digit, kari_map, make_orbit
from bstiling.group import BS32, GroupParams, PlanePoint, ball, normalize, project
from bstiling.render import level_rows
from bstiling.solver import slab_elements
from bstiling.tiles import MODE_Q2, MODE_Q23, ParseError, enumerate_times2, kari_bs32_tileset

F = Fraction
ORBIT = make_orbit(kari_map(), F(5, 4), 8, 8)
TS = kari_bs32_tileset()


def relation_holds(pattern, orbit, height, p=BS32):
    """q * avg(top) + left == avg(bottom) + right, with q read off the orbit."""
    q = orbit.q(height)
    lhs = q * F(sum(pattern.top), p.n) + pattern.left.value
    rhs = F(sum(pattern.bottom), p.m) + pattern.right.value
    return lhs == rhs


@pytest.fixture(scope="module")
def ball5():
    return build_patch(BS32, ORBIT, ball(BS32, 5))


@pytest.fixture(scope="module")
def slab():
    return build_patch(BS32, ORBIT, slab_elements(BS32, 18, 3))


def test_ball_patch_verifies(ball5):
    rep = verify_patch(ball5, TS)
    assert rep.checked == 69
    assert rep.ok and len(rep) == 0


def test_slab_patch_verifies(slab):
    rep = verify_patch(slab, TS)
    assert rep.checked > 0 and rep.ok


def test_relation_at_every_anchor(ball5):
    # independent of the tile set: only the orbit's multipliers are used
    n = 0
    for g in ball5.sources():
        try:
            pat = extract_pattern(ball5, g)
        except IncompletePattern:
            continue
        n += 1
        assert relation_holds(pat, ORBIT, g.height)
    assert n == 69


def test_color_ranges(ball5):
    a_colors = {c for (g, gen), c in ball5.items() if gen == "a"}
    assert a_colors <= {0, 1, 2}
    for (g, gen), c in ball5.items():
        if gen != "b":
            continue
        if c.mode == MODE_Q23:
            assert c.value == 0
        else:
            assert c.mode == MODE_Q2 and c.value in {0, F(1, 3), F(2, 3)}


def test_a_labels_are_balanced_digits_at_height_zero():
    x = ORBIT.x(0)
    for k in range(-10, 10):
        assert gamma_a_label(ORBIT, PlanePoint(F(k), 0)) == balanced_digit(BalancedRepSpec(x), k + 1)


def test_labels_depend_only_on_projection(ball5):
    counts, colors = {}, {}
    for (g, gen), c in ball5.items():
        k = (project(BS32, g), gen)
        counts[k] = counts.get(k, 0) + 1
        colors.setdefault(k, set()).add(c)
    assert max(counts.values()) > 1   # distinct sheets do overlap in the plane
    assert all(len(cs) == 1 for cs in colors.values())


def test_figure_rows(slab):
    rows = {r.height: r.text() for r in level_rows(slab)}
    assert set(rows) == {0, 1, 2}
    for piece in ("112111", "11121112", "111211"):
        assert piece in rows[0]
    assert "110111110111" in rows[1]
    bottom = [int(c) for c in rows[2]]
    assert set(bottom) <= {1, 2}
    # balanced: every window sum is within 1 of L * 5/3
    for L in range(1, len(bottom)):
        for i in range(len(bottom) - L + 1):
            assert abs(sum(bottom[i:i + L]) - L * F(5, 3)) < 1


def test_q2_subset_rejects_the_coloring(ball5):
    assert not verify_patch(ball5, enumerate_times2()).ok


def test_tampering_is_detected(ball5):
    edges = dict(ball5.items())
    key = (normalize(BS32, ""), "a")
    edges[key] = F(2) if edges[key] != 2 else F(0)
    rep = verify_patch(Patch(BS32, edges), TS)
    assert not rep.ok
    for v in rep.violations:
        bottom, top, left, right = shape_edges(BS32, v.anchor)
        assert key in bottom + top


def test_orbit_window_is_enforced():
    short = make_orbit(kari_map(), F(5, 4), 0, 0)
    with pytest.raises(OrbitWindowError):
        gamma_b_label(short, PlanePoint(F(0), 0))
    with pytest.raises(OrbitWindowError):
        build_patch(BS32, short, ball(BS32, 1))


def test_other_groups_need_the_experimental_flag():
    p = GroupParams(2, 1)
    with pytest.raises(ValueError):
        build_patch(p, ORBIT, ball(p, 1))
    assert len(build_patch(p, ORBIT, ball(p, 1), experimental=True)) == 2 * len(ball(p, 1))


def test_shape_edges():
    bottom, top, left, right = shape_edges(BS32, normalize(BS32, ""))
    assert [g.word for g, _ in bottom] == ["", "a", "aa"]
    assert [g.word for g, _ in top] == ["b", "ba"]
    assert left[0].is_identity and right[0].word == "aaa"


def test_incomplete_pattern_names_missing_edges():
    patch = build_patch(BS32, ORBIT, ball(BS32, 1))
    with pytest.raises(IncompletePattern) as exc:
        extract_pattern(patch, "")
    assert exc.value.missing


def test_patch_json_round_trip(ball5):
    text = dump_patch(ball5)
    back = load_patch(BS32, text)
    assert back == ball5
    assert dump_patch(back) == text


def test_patch_parse_errors():
    with pytest.raises(ParseError):
        load_patch(BS32, "{")
    with pytest.raises(ParseError, match="entry #0"):
        load_patch(BS32, '[{"source": "x", "gen": "a", "color": "1"}]')
    with pytest.raises(ParseError):
        load_patch(BS32, '[{"source": "", "gen": "c", "color": "1"}]')
