import random

import pytest

from oracles import disk_matrices, random_composites
from polyhom.cellterm import Comp, Gen, Id, OmegaFunctorData, boundary, TGT, dim
from polyhom.chaincomplexer import (chain_complex, check_oplax, cls, coefficient_chain_map,
                                    cylinder, extend_oplax, homotopy_from_oplax,
                                    identity_oplax, induced_chain_map, oplax_from_json,
                                    polygraphic_homology, random_cylinder_system)
from polyhom.fixtures import (bubble, c2_sign_system, disk, scalar_system, sphere,
                              sphere_to_bubble, z2_resolution)
from polyhom.localsystem import constant_system, evaluate_on_1cell, pullback
from polyhom.orientals import oriental
from polyhom.zlinalg import IntMatrix, PresentedGroup, induced_on_homology


def hom(p, m=None, degrees=None):
    return [str(h) for h in polygraphic_homology(p, m or constant_system(p), degrees)]


def test_bubble_and_sphere():
    assert hom(bubble(), degrees=4) == ["Z", "0", "Z", "0"]
    assert hom(sphere(2), degrees=4) == ["Z", "0", "Z", "0"]


@pytest.mark.parametrize("n", range(5))
def test_disks_are_contractible(n):
    assert hom(disk(n)) == ["Z"] + ["0"] * n


def test_sphere3():
    assert hom(sphere(3)) == ["Z", "0", "0", "Z"]


def test_z2_resolution():
    p = z2_resolution()
    assert hom(p, degrees=4) == ["Z", "Z/2", "0", "Z/2"]
    assert hom(p, c2_sign_system(p), 4) == ["Z/2", "0", "Z/2", "0"]


def _disk_system(n, k):
    p = disk(n)
    return p, scalar_system(p, {g: k for g in p.cells(1)})


@pytest.mark.parametrize("n", range(1, 5))
def test_disk_complex_matches_oracle(n):
    rng = random.Random(n)
    for _ in range(10):
        k = rng.randint(-5, 5)
        p, m = _disk_system(n, k)
        c = chain_complex(p, m)
        assert [c.d(i).to_rows() for i in range(1, n + 1)] == disk_matrices(n, k)


@pytest.mark.parametrize("fixture", ["D3", "S2", "B", "Z2", "O3", "cylO2"])
def test_dd_zero(fixture):
    p = {"D3": disk(3), "S2": sphere(2), "B": bubble(), "Z2": z2_resolution(),
         "O3": oriental(3), "cylO2": cylinder(oriental(2))[0]}[fixture]
    c = chain_complex(p, constant_system(p))
    for n in range(2, c.top + 1):
        assert (c.d(n - 1) @ c.d(n)).is_zero()


def _vadd(a, b):
    keys = set(a) | set(b)
    z = next(iter(a.values() or b.values()), ())
    out = {}
    for k in keys:
        x = a.get(k, (0,) * len(b.get(k, z)))
        y = b.get(k, (0,) * len(x))
        v = tuple(i + j for i, j in zip(x, y))
        if any(v):
            out[k] = v
    return out


def _nz(d):
    return {k: v for k, v in d.items() if any(v)}


def test_cls_relations_on_200_composites():
    rng = random.Random(3)
    q, a = cylinder(oriental(2))
    m = random_cylinder_system(a, rng)
    comps = random_composites(q, rng, 200)
    assert len(comps) == 200
    for i, x1, x0 in comps:
        t = Comp(i, x1, x0)
        v = (rng.randint(-3, 3),)
        if i == 0:
            tw = evaluate_on_1cell(m, boundary(x1, 1, TGT, q) if dim(x1, q) > 1 else x1)
            want = _vadd(cls(q, m, x1, v), cls(q, m, x0, tw.apply(v)))
        else:
            want = _vadd(cls(q, m, x1, v), cls(q, m, x0, v))
        assert _nz(cls(q, m, t, v)) == want
        assert _nz(cls(q, m, Id(t), v)) == {}


def test_cls_associativity_and_units():
    p = oriental(3)
    m = scalar_system(p, {"01": 2, "12": -1, "23": 3, "02": -2, "13": -3, "03": 6})
    f = Comp(0, Gen("23"), Comp(0, Gen("12"), Gen("01")))
    g = Comp(0, Comp(0, Gen("23"), Gen("12")), Gen("01"))
    assert cls(p, m, f, (1,)) == cls(p, m, g, (1,))
    assert _nz(cls(p, m, Comp(0, Id(Gen("1")), Gen("01")), (1,))) == {"01": (1,)}


def test_functoriality_on_corpus_pairs():
    # collapse the cylinder back onto its base: r . f0 = id
    p = oriental(2)
    q, a = cylinder(p)
    images = {}
    for g in p:
        images[f"{g.name}.0"] = Gen(g.name)
        images[f"{g.name}.1"] = Gen(g.name)
        images[f"{g.name}.α"] = Id(Gen(g.name))
    r = OmegaFunctorData(q, p, images)
    m = scalar_system(p, {"01": 2, "12": 3, "02": 6})
    rf = a.f0.then(r)
    cr = induced_chain_map(r, m)
    cf = induced_chain_map(a.f0, pullback(m, r), target=cr.source)
    crf = induced_chain_map(rf, m, target=cr.target)
    assert (cr @ cf).equals(crf)
    for n in range(crf.source.top + 1):
        assert crf.component(n) == IntMatrix.identity(crf.source.rank(n))
    # S1 inside S2, then S2 onto the bubble
    s1, s2 = sphere(1), sphere(2)
    inc = OmegaFunctorData(s1, s2, {g.name: Gen(g.name) for g in s1})
    f = sphere_to_bubble()
    mb = constant_system(bubble())
    cf = induced_chain_map(f, mb)
    ci = induced_chain_map(inc, pullback(mb, f), target=cf.source)
    both = induced_chain_map(inc.then(f), mb, target=cf.target)
    assert (cf @ ci).equals(both)


def test_sphere_to_bubble_probe_records_degree_two():
    f = sphere_to_bubble()
    cf = induced_chain_map(f, constant_system(bubble()))
    h = [(str(s), str(t), mtx.to_rows()) for s, t, mtx in
         (induced_on_homology(cf, n) for n in range(3))]
    assert [x[0] for x in h] == ["Z", "0", "Z"]
    assert [x[1] for x in h] == ["Z", "0", "Z"]
    assert h[0][2] == [[1]]
    # the degree-2 map is recorded, not asserted against an expected value
    print("H2(f) =", h[2][2])


@pytest.mark.parametrize("name", ["point", "d1", "o2", "bubble"])
def test_oplax_homotopy_cylinder_fixtures(data, name):
    import json
    a = oplax_from_json(json.loads((data / f"cylinder_{name}.json").read_text()))
    assert check_oplax(a).ok
    res = homotopy_from_oplax(a, constant_system(a.target))
    assert res.is_zero


@pytest.mark.parametrize("base", ["D1", "O2"])
def test_oplax_homotopy_random(base):
    p = {"D1": disk(1), "O2": oriental(2)}[base]
    q, a = cylinder(p)
    rng = random.Random(12)
    for _ in range(10):
        m = random_cylinder_system(a, rng)
        res = homotopy_from_oplax(a, m)
        assert res.is_zero, res.first_nonzero()


def test_oplax_homotopy_detects_wrong_homotopy():
    q, a = cylinder(disk(1))
    m = constant_system(q)
    res = homotopy_from_oplax(a, m)
    bad = IntMatrix.zeros(*res.h[0].shape)
    r = res.target.d(1) @ bad
    assert not (r - (res.residual[0] + res.target.d(1) @ res.h[0])).is_zero()


def test_identity_oplax_and_extension():
    p = oriental(2)
    a = identity_oplax(p)
    assert check_oplax(a).ok
    assert homotopy_from_oplax(a, constant_system(p)).is_zero
    q, c = cylinder(disk(0))
    assert extend_oplax(c, Id(Gen("x"))) == Id(Gen("x.α"))


def test_coefficient_map_naturality():
    p = disk(1)
    m = scalar_system(p, {"x": 2})
    phi = {"s0": IntMatrix.scalar(1, 3), "t0": IntMatrix.scalar(1, 3)}
    cm = coefficient_chain_map(p, phi, m, m)
    assert cm.is_chain_map()
    phi = {"s0": IntMatrix.scalar(1, 1), "t0": IntMatrix.scalar(1, 3)}
    with pytest.raises(Exception):
        coefficient_chain_map(p, phi, m, m)


def test_presented_coefficients():
    p = disk(1)
    z4 = PresentedGroup.cyclic(4)
    from polyhom.localsystem import LocalSystemData
    m = LocalSystemData(p, {"s0": z4, "t0": z4}, {"x": IntMatrix.scalar(1, 1)})
    assert [str(h) for h in polygraphic_homology(p, m)] == ["Z/4", "0"]
