"""Builders for the standard test polygraphs.

Cells of disks and spheres are named ``t{k}`` / ``s{k}`` (target / source
k-cell), with the target listed first in every dimension.
"""

from __future__ import annotations

from .cellterm import Gen, Id, OmegaFunctorData, Polygraph, comp
from .localsystem import LocalSystemData
from .zlinalg import IntMatrix, PresentedGroup


def sphere(n: int) -> Polygraph:
    """S^n: two k-cells for every k <= n (S^-1 is empty)."""
    p = Polygraph()
    for k in range(n + 1):
        for side in ("t", "s"):
            if k == 0:
                p.add(f"{side}0", 0)
            else:
                p.add(f"{side}{k}", k, Gen(f"s{k - 1}"), Gen(f"t{k - 1}"))
    return p


def disk(n: int, top: str = "x") -> Polygraph:
    """D_n: the sphere S^{n-1} filled by one n-cell ``top``."""
    p = sphere(n - 1)
    if n == 0:
        p.add(top, 0)
    else:
        p.add(top, n, Gen(f"s{n - 1}"), Gen(f"t{n - 1}"))
    return p


def bubble() -> Polygraph:
    """One object ``*`` and one 2-cell ``x: 1_* => 1_*``."""
    p = Polygraph()
    p.add("*", 0)
    p.add("x", 2, Id(Gen("*")), Id(Gen("*")))
    return p


def sphere_to_bubble() -> OmegaFunctorData:
    """S^2 -> B collapsing the 1-skeleton and sending both 2-cells to x."""
    s, b = sphere(2), bubble()
    star = Gen("*")
    images = {"t0": star, "s0": star, "t1": Id(star), "s1": Id(star),
              "t2": Gen("x"), "s2": Gen("x")}
    return OmegaFunctorData(s, b, images)


def z2_resolution() -> Polygraph:
    """A polygraph with one cell per dimension <= 4 and differentials 0, 2, 0, 2.

    It is the low-dimensional part of a resolution of the group Z/2 seen as
    a one-object category: ``a`` generates, ``b: 1 => a a`` says a^2 = 1,
    and ``c``, ``d`` kill the resulting syzygies.
    """
    p = Polygraph()
    star = p.add("*", 0)
    a = p.add("a", 1, star, star)
    aa = comp(0, a, a, p)
    b = p.add("b", 2, Id(star), aa)
    # c: a b => b a, two 2-cells a => a a a
    c = p.add("c", 3, comp(0, a, b, p), comp(0, b, a, p))
    aab = comp(0, aa, b, p)
    c1 = comp(0, Id(Id(a)), c, p)
    c2 = comp(0, c, Id(Id(a)), p)
    # 1 on (a a b) *_1 b  =>  ((c a) *_2 (a c)) *_1 b
    src_d = Id(comp(1, aab, b, p))
    tgt_d = comp(1, comp(2, c2, c1, p), b, p)
    p.add("d", 4, src_d, tgt_d)
    return p


def c2_sign_system(p: Polygraph, arrow: str = "a") -> LocalSystemData:
    """Z on every object, the 1-cell ``arrow`` acting by -1."""
    z = PresentedGroup(1)
    arrows = {g: IntMatrix(1, 1, [-1 if g == arrow else 1]) for g in p.cells(1)}
    return LocalSystemData(p, {x: z for x in p.cells(0)}, arrows)


def scalar_system(p: Polygraph, values: dict, rank: int = 1) -> LocalSystemData:
    """Free rank-1 groups with ``values[g]`` as the 1x1 matrix of ``g``."""
    z = PresentedGroup(rank)
    return LocalSystemData(p, {x: z for x in p.cells(0)},
                           {g: IntMatrix.scalar(rank, values.get(g, 1)) for g in p.cells(1)})
