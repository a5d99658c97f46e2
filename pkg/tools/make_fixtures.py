"""Regenerate the JSON fixtures shipped in polyhom/data."""

import os

from polyhom.cellterm import (Gen, OmegaFunctorData, dumps, functor_to_json,
                              polygraph_to_json)
from polyhom.chaincomplexer import OplaxData, cylinder, oplax_to_json
from polyhom.constructions import SetFunctorData, set_functor_to_json
from polyhom.fixtures import (bubble, c2_sign_system, disk, sphere, sphere_to_bubble,
                              z2_resolution)
from polyhom.localsystem import FiniteCategoryData, system_to_json
from polyhom.orientals import oriental
from polyhom.simplicial import (boundary_simplex, c1_polygraph, category_to_json,
                                constant_on, nerve, simplicial_to_json, standard_simplex)

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "polyhom", "data")


def write(name, obj):
    with open(os.path.join(OUT, name), "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def main():
    write("bubble.json", polygraph_to_json(bubble()))
    for n in range(4):
        write(f"sphere{n}.json", polygraph_to_json(sphere(n)))
    for n in range(5):
        write(f"disk{n}.json", polygraph_to_json(disk(n)))
    for n in range(4):
        write(f"oriental{n}.json", polygraph_to_json(oriental(n)))
    write("z2_resolution.json", polygraph_to_json(z2_resolution()))
    write("z2_resolution_sign.json", system_to_json(c2_sign_system(z2_resolution())))
    f = sphere_to_bubble()
    write("sphere2_to_bubble.json", {"source": polygraph_to_json(f.source),
                                     "target": polygraph_to_json(f.target),
                                     **functor_to_json(f)})
    c2 = FiniteCategoryData.from_group(["e", "a"], lambda g, f: "a" if (g == "a") != (f == "a") else "e", "e")
    write("nerve_c2.json", {"category": category_to_json(c2), "cap": 5})
    x = nerve(c2, 5)
    write("nerve_c2_sign.json", system_to_json(c2_sign_system(c1_polygraph(x))))
    write("nerve_c2_constant.json", system_to_json(constant_on(x)))
    for n in range(4):
        write(f"simplex{n}.json", simplicial_to_json(standard_simplex(n)))
    for n in (2, 3):
        write(f"boundary_simplex{n}.json", simplicial_to_json(boundary_simplex(n)))
    # the interval as a cylinder on a point: f0 -> s0, f1 -> t0, alpha = x
    d0, d1 = disk(0), disk(1)
    a = OplaxData(OmegaFunctorData(d0, d1, {"x": Gen("s0")}),
                  OmegaFunctorData(d0, d1, {"x": Gen("t0")}), {"x": Gen("x")})
    write("cylinder_point.json", oplax_to_json(a))
    for name, p in (("d1", disk(1)), ("o2", oriental(2)), ("bubble", bubble())):
        write(f"cylinder_{name}.json", oplax_to_json(cylinder(p)[1]))
    e = SetFunctorData(d1, {"s0": ["u", "v"], "t0": ["a", "b", "c"]},
                       {"x": {"a": "u", "b": "u", "c": "v"}})
    write("d1_set_functor.json", set_functor_to_json(e))


if __name__ == "__main__":
    main()
