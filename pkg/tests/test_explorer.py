from semiflag.explorer import (
    conjecture_check, enumerate_one, fiber_sample, point_from_supports, torus_fixed_points,
)
from semiflag.flags import act, check_consistency, map_semifield, normalize
from semiflag.monoid import parse_word
from semiflag.semifield import ONE, TROPICAL, identity_hom, to_one_hom


def _supports(points):
    return {tuple(tuple(sorted(v.coeffs)) for _, v in sorted(p.components.items())) for p in points}


def test_a1_enumeration():
    pts = enumerate_one("A1", (), 4)
    assert _supports(pts) == {(("b0",),), (("b1",),), (("b0", "b1"),)}


def test_a1xa1_is_a_product():
    pts = enumerate_one("A1xA1", (), 4)
    assert len(pts) == 9
    singles = [("b0",), ("b1",), ("b0", "b1")]
    assert _supports(pts) == {(a, b) for a in singles for b in singles}


def test_partial_flag_a2():
    pts = enumerate_one("A2", {2}, 3)
    assert all(set(p.components) == {1} for p in pts)
    assert len(pts) == 7


def test_enumeration_is_order_independent():
    base = _supports(enumerate_one("A2", (), 3))
    for seed in (1, 2):
        assert _supports(enumerate_one("A2", (), 3, shuffle_seed=seed)) == base


def test_enumerated_points_are_fixed_by_the_trivial_hom():
    for p in enumerate_one("A2", (), 2):
        q = map_semifield(p, identity_hom(ONE))
        assert q.components == p.components
        assert map_semifield(p, to_one_hom(ONE)).components == p.components


def test_conjecture_reports():
    rep = conjecture_check("A1", 4)
    assert (rep.enumerated, rep.bruhat_pairs, rep.match) == (3, 3, True)
    rep = conjecture_check("A1xA1", 3)
    assert rep.match and rep.enumerated == 9
    assert "height <= 3" in rep.caveat
    d = rep.to_dict()
    assert d["bruhat_pairs"] == 9 and len(d["points"]) == 9


def test_a2_counts_stabilise_from_depth_two():
    rep = conjecture_check("A2", 4)
    assert rep.counts_by_depth[2] == rep.counts_by_depth[3] == rep.counts_by_depth[4]
    assert rep.collections == rep.enumerated


def test_torus_fixed_points_are_consistent():
    pts = torus_fixed_points("A2")
    assert len(pts) == 6
    assert all(check_consistency(p, 3) for p in pts)


def test_a1_open_cell_fiber():
    target = point_from_supports("A1", {1: ["b0", "b1"]})
    rep = fiber_sample("A1", target, range(-5, 6))
    assert rep.count == 11
    expected = {act(parse_word(f"-1:{k}", TROPICAL), torus_fixed_points("A1")[0]).key() for k in range(-5, 6)}
    assert {p.key() for p in rep.points} == expected
    assert len({normalize(p).key() for p in rep.points}) == rep.count


def test_a1_closed_cell_fibers():
    for labels in (["b0"], ["b1"]):
        rep = fiber_sample("A1", point_from_supports("A1", {1: labels}), range(-5, 6))
        assert rep.count == 1


def test_empty_fiber_counts_zero():
    # {b0, b1} in each A1xA1 factor, restricted to a grid that never leaves the basepoint
    target = point_from_supports("A1xA1", {1: ["b0", "b1"], 2: ["b0", "b1"]})
    rep = fiber_sample("A1xA1", target, range(0, 1), length=1)
    assert rep.count == 0
