from math import comb

import pytest

from polyhom.cellterm import Gen, abelian_class, cells_equivalent, comp, validate_polygraph
from polyhom.chaincomplexer import chain_complex, cls
from polyhom.fixtures import scalar_system
from polyhom.localsystem import constant_system
from polyhom.orientals import (DimensionUnsupported, face_name, oriental,
                               oriental_boundary_shape_check, principal, relabel, _vertex_map)


@pytest.mark.parametrize("n", range(4))
def test_counts_and_validity(n):
    p = oriental(n)
    assert [len(p.cells(i)) for i in range(n + 1)] == [comb(n + 1, i + 1) for i in range(n + 1)]
    assert validate_polygraph(p).ok


def test_low_orientals():
    assert oriental(0).cells(0) == ["0"]
    x = oriental(1)["01"]
    assert (x.src, x.tgt) == (Gen("0"), Gen("1"))
    p = oriental(2)
    x = p["012"]
    assert x.src == Gen("02")
    assert cells_equivalent(x.tgt, comp(0, Gen("12"), Gen("01"), p), p)


def test_o3_principal_boundary():
    p = oriental(3)
    x = p["0123"]
    s = comp(1, comp(0, Gen("23"), Gen("012"), p), Gen("023"), p)
    t = comp(1, comp(0, Gen("123"), Gen("01"), p), Gen("013"), p)
    assert x.src == s and x.tgt == t


@pytest.mark.parametrize("n", [1, 2, 3])
def test_shape_check(n):
    rep = oriental_boundary_shape_check(n)
    assert rep.ok, rep.to_json()


def test_unsupported():
    with pytest.raises(DimensionUnsupported):
        oriental(4)


@pytest.mark.parametrize("n", [2, 3])
def test_constant_classes_are_odd_and_even_faces(n):
    p = oriental(n)
    x = p[principal(n)]
    src = abelian_class(x.src, p)
    tgt = abelian_class(x.tgt, p)
    top = n - 1
    assert {k for k, v in src.items() if p[k].dim == top and v} == \
        {face_name(n, i) for i in range(1, n + 1, 2)}
    assert {k for k, v in tgt.items() if p[k].dim == top and v} == \
        {face_name(n, i) for i in range(0, n + 1, 2)}


@pytest.mark.parametrize("n", [2, 3])
def test_only_face_n_is_twisted(n):
    p = oriental(n)
    vals = {"01": 2, "12": 3, "23": 5}
    vals.update({"02": 6, "13": 15, "03": 30})
    m = scalar_system(p, {g: vals[g] for g in p.cells(1)})
    x = p[principal(n)]
    t = cls(p, m, x.tgt, (1,))
    s = cls(p, m, x.src, (1,))
    twist = vals[f"{n - 1}{n}"]
    for i in range(n + 1):
        f = face_name(n, i)
        got = t.get(f, (0,))[0] - s.get(f, (0,))[0]
        sign = 1 if i % 2 == 0 else -1
        assert got == sign * (twist if i == n else 1)


@pytest.mark.parametrize("n", [2, 3])
def test_faces_restrict_to_lower_orientals(n):
    p, q = oriental(n), oriental(n - 1)
    for i in range(n + 1):
        verts = [k for k in range(n + 1) if k != i]
        f = _vertex_map(verts)
        for g in q:
            if g.dim == 0:
                continue
            name = "".join(str(verts[int(c)]) for c in g.name)
            assert relabel(g.src, f) == p[name].src
            assert relabel(g.tgt, f) == p[name].tgt


def test_oriental_homology_contractible():
    for n in range(4):
        c = chain_complex(oriental(n), constant_system(oriental(n)))
        from polyhom.zlinalg import homology_of_complex
        assert [str(h) for h in homology_of_complex(c)] == ["Z"] + ["0"] * n
