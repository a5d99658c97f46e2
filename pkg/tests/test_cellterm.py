import json
import random

import pytest

from oracles import random_composites
from polyhom.cellterm import (Comp, Gen, Generator, Id, OmegaFunctorData, Polygraph, SRC,
                              TGT, TermParseError, UnknownGenerator, abelian_class, boundary,
                              cells_equivalent, check_functor, comp, dim, dumps,
                              normal_form_1, polygraph_from_json, polygraph_to_json,
                              term_from_json, term_to_json, unit, validate_polygraph)
from polyhom.chaincomplexer import cylinder
from polyhom.fixtures import bubble, disk, sphere, sphere_to_bubble, z2_resolution
from polyhom.orientals import oriental


def corpus():
    out = {f"D{n}": disk(n) for n in range(5)}
    out.update({f"S{n - 1}": sphere(n - 1) for n in range(1, 5)})
    out.update({f"O{n}": oriental(n) for n in range(4)})
    out["B"] = bubble()
    out["Z2"] = z2_resolution()
    return out


@pytest.mark.parametrize("name", sorted(corpus()))
def test_fixtures_validate(name):
    rep = validate_polygraph(corpus()[name])
    assert rep.ok, rep.to_json()


def _replace_first_leaf(t, new):
    if isinstance(t, Gen):
        return new
    if isinstance(t, Id):
        return Id(_replace_first_leaf(t.inner, new))
    return Comp(t.i, _replace_first_leaf(t.left, new), t.right)


def _with(p, name, side, term):
    gens = []
    for g in p:
        if g.name == name:
            g = Generator(g.name, g.dim, term if side == SRC else g.src,
                          term if side == TGT else g.tgt)
        gens.append(g)
    return Polygraph(gens)


def _candidates(p, n):
    return [Gen(g.name) for g in p if g.dim == n] + \
        [unit(Gen(g.name), n - g.dim) for g in p if g.dim < n]


@pytest.mark.parametrize("name", sorted(corpus()))
def test_single_boundary_corruptions_are_rejected(name):
    p = corpus()[name]
    for g in p:
        if g.dim == 0:
            continue
        for side in (SRC, TGT):
            orig = g.src if side == SRC else g.tgt
            # unknown generator
            bad = _with(p, g.name, side, _replace_first_leaf(orig, Gen("zz")))
            assert not validate_polygraph(bad).ok
            # wrong dimension
            bad = _with(p, g.name, side, Id(orig))
            assert not validate_polygraph(bad).ok
            if g.dim < 2:
                continue
            # a cell of the right dimension that is not parallel to the original
            for cand in _candidates(p, g.dim - 1):
                if all(cells_equivalent(boundary(cand, g.dim - 2, s, p),
                                        boundary(orig, g.dim - 2, s, p), p)
                       for s in (SRC, TGT)):
                    continue
                bad = _with(p, g.name, side, cand)
                rep = validate_polygraph(bad)
                assert not rep.ok, (g.name, side, cand)
                assert rep.violations[0].location


def test_duplicate_and_kinds():
    p = Polygraph([Generator("a", 0), Generator("a", 0)])
    assert "DuplicateName" in validate_polygraph(p).kinds()
    p = disk(2)
    bad = _with(p, "x", SRC, Gen("t1"))
    bad = _with(bad, "x", TGT, Gen("t0"))
    assert not validate_polygraph(bad).ok


def test_unknown_generator_lookup():
    with pytest.raises(UnknownGenerator):
        disk(1)["nope"]


def test_boundaries_of_composites():
    p = oriental(2)
    t = comp(0, Gen("12"), Gen("01"), p)
    assert normal_form_1(t, p).word == ("12", "01")
    assert boundary(t, 0, SRC, p) == Gen("0") and boundary(t, 0, TGT, p) == Gen("2")
    x = p["012"]
    assert dim(x.tgt, p) == 1 and cells_equivalent(x.tgt, t, p)


def test_abelian_class_and_units():
    p = z2_resolution()
    g = p["c"]
    assert abelian_class(g.src, p) == abelian_class(g.tgt, p)
    assert abelian_class(Id(Gen("a")), p) == {}


@pytest.mark.parametrize("name", sorted(corpus()))
def test_term_json_round_trip(name):
    p = corpus()[name]
    for g in p:
        if g.dim:
            assert term_from_json(json.loads(json.dumps(term_to_json(g.src)))) == g.src
    assert polygraph_from_json(polygraph_to_json(p)) == p


def test_shipped_polygraph_files_round_trip_bit_exact(data):
    for path in sorted(data.glob("*.json")):
        obj = json.loads(path.read_text())
        if not isinstance(obj, dict) or "generators" not in obj:
            continue
        assert dumps(polygraph_to_json(polygraph_from_json(obj))) == path.read_text(), path.name


def test_parse_errors():
    for bad in ({"gen": 3}, {"comp": [0, {"gen": "a"}]}, {"what": 1}, [1]):
        with pytest.raises(TermParseError):
            term_from_json(bad)
    with pytest.raises(TermParseError):
        polygraph_from_json({"gens": []})


def test_functors_check():
    assert check_functor(sphere_to_bubble()).ok
    f = sphere_to_bubble()
    bad = OmegaFunctorData(f.source, f.target, dict(f.images, t1=Gen("x")))
    assert not check_functor(bad).ok
    q, a = cylinder(oriental(2))
    assert check_functor(a.f0).ok and check_functor(a.f1).ok


def test_random_composites_have_consistent_boundaries():
    rng = random.Random(5)
    q, _ = cylinder(oriental(2))
    for i, a, b in random_composites(q, rng, 50):
        t = Comp(i, a, b)
        n = dim(t, q)
        assert cells_equivalent(boundary(t, i, SRC, q), boundary(b, i, SRC, q), q)
        assert cells_equivalent(boundary(t, i, TGT, q), boundary(a, i, TGT, q), q)
        if i + 1 < n:
            s = boundary(t, n - 1, SRC, q)
            assert dim(s, q) == n - 1
