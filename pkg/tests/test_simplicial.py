import json
import random

import pytest

from oracles import c2_periodic_homology
from polyhom.localsystem import FiniteCategoryData, LocalSystemData
from polyhom.simplicial import (CapExceeded, Face, SimplicialMapData, SimplicialSetData,
                                boundary_simplex, c1_polygraph, canonical_degeneracies,
                                comparison_iso_check, constant_on, cover_identification_check,
                                fundamental_category, induced_simplicial_chain_map, nd, nerve,
                                normalized_complex, pi1, random_weak_system,
                                realization_polygraph, simplicial_from_json,
                                simplicial_homology, simplicial_to_json, standard_simplex,
                                universal_cover, PiOne)
from polyhom.fixtures import c2_sign_system
from polyhom.orientals import DimensionUnsupported
from polyhom.zlinalg import IntMatrix, PresentedGroup, homology_of_complex


def c2():
    return FiniteCategoryData.from_group(
        ["e", "a"], lambda g, f: "a" if (g == "a") != (f == "a") else "e", "e")


def hstr(groups):
    return [str(g) for g in groups]


def test_simplices_and_identities():
    for x in (standard_simplex(3), boundary_simplex(3), nerve(c2(), 5)):
        assert x.check().ok


def test_degeneracy_normal_form():
    # s_0 s_0 = s_1 s_0
    assert canonical_degeneracies([0, 0]) == canonical_degeneracies([1, 0])


def test_circle_and_point():
    assert hstr(simplicial_homology(boundary_simplex(2), constant_on(boundary_simplex(2)))) == ["Z", "Z"]
    assert hstr(simplicial_homology(standard_simplex(0), constant_on(standard_simplex(0)))) == ["Z"]
    x = boundary_simplex(3)
    assert hstr(simplicial_homology(x, constant_on(x))) == ["Z", "0", "Z"]


def test_nerve_counts():
    x = nerve(c2(), 4)
    assert [len(r) for r in x.simplices] == [1] * 5
    arrow = FiniteCategoryData.from_poset([0, 1], lambda a, b: a <= b)
    y = nerve(arrow, 3)
    assert [len(r) for r in y.simplices if r] == [2, 1]
    tri = FiniteCategoryData.from_poset([0, 1, 2], lambda a, b: a <= b)
    assert [len(r) for r in nerve(tri, 3).simplices if r] == [3, 3, 1]


@pytest.mark.parametrize("sign", [-1, 1])
def test_c2_nerve_matches_periodic_oracle(sign):
    x = nerve(c2(), 5)
    m = c2_sign_system(c1_polygraph(x)) if sign == -1 else constant_on(x)
    got = hstr(homology_of_complex(normalized_complex(x, m), 4))
    assert got == c2_periodic_homology(sign, 4)


def test_c2_sign_differentials():
    x = nerve(c2(), 5)
    c = normalized_complex(x, c2_sign_system(c1_polygraph(x)))
    assert [c.d(n)[0, 0] for n in range(1, 6)] == [2, 0, 2, 0, 2]


def test_truncation_reliability():
    x = nerve(c2(), 5)
    assert not x.complete and x.reliable_degrees() == 5
    assert len(simplicial_homology(x, constant_on(x))) == 5


def test_remark_inclusion_of_a_vertex():
    d1 = standard_simplex(1)
    pt = SimplicialSetData([["1"]], {"1": ()})
    f = SimplicialMapData(pt, d1, {"1": nd("1")})
    z, zero = PresentedGroup(1), PresentedGroup(0)
    m = LocalSystemData(c1_polygraph(d1), {"0": z, "1": zero}, {"01": IntMatrix.zeros(1, 0)})
    fm = induced_simplicial_chain_map(f, m)
    assert hstr(homology_of_complex(fm.source)) == ["0"]
    assert hstr(homology_of_complex(fm.target))[0] == "Z"


def test_collapse_is_quasi_iso():
    d1, d0 = standard_simplex(1), standard_simplex(0)
    f = SimplicialMapData(d1, d0, {"0": nd("0"), "1": nd("0"), "01": Face((0,), "0")})
    fm = induced_simplicial_chain_map(f, constant_on(d0))
    assert hstr(homology_of_complex(fm.source)) == hstr(homology_of_complex(fm.target)) + ["0"]


def test_identity_map():
    x = standard_simplex(2)
    f = SimplicialMapData(x, x, {s: nd(s) for r in x.simplices for s in r})
    fm = induced_simplicial_chain_map(f, constant_on(x))
    assert all(fm.component(n) == IntMatrix.identity(fm.source.rank(n)) for n in range(3))


def test_fundamental_category():
    p = fundamental_category(standard_simplex(2))
    assert p.relations == [("012", ["02"], ["12", "01"])]
    assert fundamental_category(SimplicialSetData([["a", "b"]], {"a": (), "b": ()})).relations == []
    q = fundamental_category(nerve(c2(), 3))
    assert q.relations[0][1] == [] and q.relations[0][2] == ["a", "a"]


def test_pi1_orders():
    assert PiOne(pi1(standard_simplex(2), "0"), 100).order == 1
    assert PiOne(pi1(nerve(c2(), 3), "*"), 100).order == 2
    pres = pi1(boundary_simplex(2), "0")
    assert len(pres.generators) == 1
    with pytest.raises(CapExceeded):
        PiOne(pres, 100)


def test_universal_cover_c2():
    x = nerve(c2(), 3)
    cover, proj, group = universal_cover(x, "*")
    assert group.order == 2
    assert [len(r) for r in cover.simplices] == [2, 2, 2, 2]
    assert cover.check().ok
    rep = cover_identification_check(x, "*")
    assert rep["ok"] and set(rep["fibers"].values()) == {2}


def test_universal_cover_simply_connected():
    x = standard_simplex(2)
    cover, proj, group = universal_cover(x, "0")
    assert group.order == 1 and [len(r) for r in cover.simplices] == [3, 3, 1]
    assert cover_identification_check(x, "0")["ok"]


def test_universal_cover_cap():
    with pytest.raises(CapExceeded):
        universal_cover(boundary_simplex(2), "0", cap=100)


def test_realization():
    p = realization_polygraph(standard_simplex(1))
    assert [len(p.cells(n)) for n in range(2)] == [2, 1]
    p = realization_polygraph(boundary_simplex(3))
    assert [len(p.cells(n)) for n in range(3)] == [4, 6, 4]
    with pytest.raises(DimensionUnsupported):
        realization_polygraph(nerve(c2(), 5))


SPACES = {"Δ0": lambda: standard_simplex(0), "Δ1": lambda: standard_simplex(1),
          "Δ2": lambda: standard_simplex(2), "Δ3": lambda: standard_simplex(3),
          "∂Δ2": lambda: boundary_simplex(2), "∂Δ3": lambda: boundary_simplex(3),
          "NC2": lambda: nerve(c2(), 3)}


@pytest.mark.parametrize("name", sorted(SPACES))
def test_comparison_iso(name):
    x = SPACES[name]()
    rng = random.Random(hash(name) % 1000)
    assert comparison_iso_check(x, constant_on(x)).ok
    for _ in range(20):
        m = random_weak_system(x, rng, rank=rng.choice([1, 2]))
        r = comparison_iso_check(x, m)
        assert r.ok, r.message


def test_comparison_iso_detects_a_wrong_differential():
    x = standard_simplex(2)
    m = random_weak_system(x, random.Random(1), rank=1, lo=2, hi=2)
    y = SimplicialSetData(x.simplices, dict(x.faces, **{"012": (nd("12"), nd("01"), nd("02"))}))
    r = comparison_iso_check(y, m)
    assert not r.ok


def test_json_round_trip():
    for x in (standard_simplex(3), nerve(c2(), 4)):
        y = simplicial_from_json(json.loads(json.dumps(simplicial_to_json(x))))
        assert y.simplices == x.simplices and y.faces == x.faces
