import json
import math
import random
from fractions import Fraction
from itertools import product

import pytest

from bstiling.group import BS32
from bstiling.reduction import (
    AffineBranch, AffineSystem, ValidationError, branch_mode, carry_box, compile_system,
    default_denom, escape_system, identity_system, immortality_probe, load_system,
    scaling_system, system_to_json, tile_relation_holds, validate_system,
)
from bstiling.solver import SAT, UNSAT, region_slab, solve
from bstiling.tiles import ParseError, Tile

F = Fraction
ZERO = (F(0), F(0))


def expected_count(system, p=BS32, denom=None):
    """Closed-form tile count: for each (top, bottom) with an on-grid gap g,
    component c admits 2K+1-|g_c| carries."""
    box = carry_box(system, p, denom)
    K = math.floor(box.bound * box.denom)
    total = 0
    for br in system.branches:
        for top in product(br.digits(), repeat=p.n):
            img = br((sum(v[0] for v in top) / F(p.n), sum(v[1] for v in top) / F(p.n)))
            for target in system.branches:
                for bottom in product(target.digits(), repeat=p.m):
                    gap = [(img[c] - sum(v[c] for v in bottom) / F(p.m)) * box.denom for c in range(2)]
                    if all(g.denominator == 1 for g in gap):
                        total += math.prod(max(0, 2 * K + 1 - abs(int(g))) for g in gap)
    return total


@pytest.fixture(scope="module")
def identity_tiles():
    return compile_system(identity_system(), BS32)


@pytest.fixture(scope="module")
def escape_tiles():
    return compile_system(escape_system(), BS32)


def test_validation():
    assert validate_system(identity_system())
    assert validate_system(scaling_system())
    touching = AffineSystem((AffineBranch(((1, 0), (0, 1)), (0, 0), (0, 0)),
                             AffineBranch(((1, 0), (0, 1)), (0, 0), (1, 0))))
    assert not validate_system(touching)
    assert not validate_system(AffineSystem(()))
    with pytest.raises(ValidationError):
        compile_system(touching, BS32)
    with pytest.raises(ValidationError):
        AffineBranch(((1, 0),), (0, 0), (0, 0))
    with pytest.raises(ValidationError):
        AffineBranch(((1, 0), (0, 1)), (0, 0), (F(1, 2), 0))


def test_carry_box():
    box = carry_box(identity_system(), BS32)
    assert (box.bound, box.denom) == (3, 3)
    assert len(box.grid()) == 19
    assert box.contains((F(1, 3), F(-3))) and not box.contains((F(1, 2), 0))
    assert carry_box(escape_system(), BS32).bound == 5
    assert default_denom(scaling_system(), BS32) == 6
    with pytest.raises(ValueError):
        carry_box(identity_system(), BS32, denom=0)


def test_identity_compiles(identity_tiles):
    assert len(identity_tiles) == expected_count(identity_system()) == 78400
    zero = Tile(branch_mode(0), (ZERO,) * 2, (ZERO,) * 3, ZERO, ZERO)
    assert zero in identity_tiles


def test_escape_count(escape_tiles):
    assert len(escape_tiles) == expected_count(escape_system())


def test_compiled_tiles_satisfy_the_relation(identity_tiles, escape_tiles):
    rng = random.Random(5)
    for system, ts in ((identity_system(), identity_tiles), (escape_system(), escape_tiles)):
        box = carry_box(system, BS32)
        for t in rng.sample(ts.tiles, 300):
            br = system.branches[int(t.mode[1:])]
            assert tile_relation_holds(br, t, BS32)
            assert box.contains(t.left) and box.contains(t.right)
            assert set(t.top) <= set(br.digits())
            assert set(t.bottom) <= set(system.branches[t.family].digits())


def test_scaling_system_has_two_modes():
    # the default grid (denominator 6) gives millions of tiles; integers suffice here
    ts = compile_system(scaling_system(), BS32, denom=1)
    assert ts.modes() == ["f0", "f1"]
    assert len(ts) == expected_count(scaling_system(), denom=1)
    assert {t.family for t in ts} == {0, 1}


def test_identity_tiles_a_slab(identity_tiles):
    out = solve(region_slab(BS32, 36, 2), identity_tiles)
    assert out.status == SAT


def test_escape_is_refuted(escape_tiles):
    out = solve(region_slab(BS32, 36, 2), escape_tiles)
    assert out.status == UNSAT


def test_immortality_probe():
    assert immortality_probe(identity_system(), (F(1, 2), F(1, 3)), 20).survived
    res = immortality_probe(escape_system(), (0, 0), 10)
    assert not res.survived and res.escaped_at == 1
    assert res.trajectory == [ZERO, (F(2), F(2))]
    # 2x then x/2 cycles between (1,1) and (2,2)
    res = immortality_probe(scaling_system(), (F(1, 2), F(1, 2)), 30)
    assert res.survived and res.trajectory[-1] in {(F(1), F(1)), (F(2), F(2))}
    assert "escaped at step 0" == str(immortality_probe(identity_system(), (5, 5), 3))


def test_system_json_round_trip():
    sys = scaling_system()
    assert load_system(json.dumps(system_to_json(sys))) == sys


def test_system_parse_errors():
    with pytest.raises(ParseError):
        load_system("[")
    with pytest.raises(ParseError):
        load_system('{"branches": [{"M": [[1, 0], [0, 1]], "b": [0, 0]}]}')
