"""Street's orientals O_n for n <= 3, as polygraphs.

The generators of O_n are the nondegenerate simplices of Δ^n, named by
their vertex strings (``"0"``, ``"01"``, ``"012"``, ...). Only the principal
cells of O_1, O_2, O_3 are written out by hand; every other generator gets
the boundary of a lower principal cell relabeled along its vertices.
"""

from __future__ import annotations

from itertools import combinations

from .cellterm import (CellTerm, Comp, Gen, Id, Polygraph, SRC, TGT,
                       ValidationReport, abelian_class, boundary, comp,
                       normal_form_1, validate_polygraph)


class DimensionUnsupported(ValueError):
    pass


def _g(s):
    return Gen(s)


# principal cells over vertices 0..n, as (src, tgt) builders taking the
# polygraph so that whiskers get padded
def _principal(n: int, p: Polygraph):
    if n == 1:
        return _g("0"), _g("1")
    if n == 2:
        return _g("02"), comp(0, _g("12"), _g("01"), p)
    if n == 3:
        s = comp(1, comp(0, _g("23"), _g("012"), p), _g("023"), p)
        t = comp(1, comp(0, _g("123"), _g("01"), p), _g("013"), p)
        return s, t
    raise DimensionUnsupported(f"oriental of dimension {n} is not tabulated")


def relabel(t: CellTerm, mapping) -> CellTerm:
    """Rename generators of ``t``; ``mapping`` takes a vertex string to a term."""
    if isinstance(t, Gen):
        return mapping(t.name)
    if isinstance(t, Id):
        return Id(relabel(t.inner, mapping))
    return Comp(t.i, relabel(t.left, mapping), relabel(t.right, mapping))


def _proper_faces(n: int) -> Polygraph:
    """All cells of O_n below the principal one; used to pad whiskers."""
    p = Polygraph()
    for d in range(n):
        for s in combinations(range(n + 1), d + 1):
            name = "".join(map(str, s))
            if d == 0:
                p.add(name, 0)
            else:
                src, tgt = principal_boundary(d)
                f = _vertex_map(s)
                p.add(name, d, relabel(src, f), relabel(tgt, f))
    return p


_PRINCIPAL = {}


def principal_boundary(n: int):
    """(source, target) of ξ_n over vertex names 0..n."""
    if n not in _PRINCIPAL:
        if n > 3 or n < 1:
            raise DimensionUnsupported(f"oriental of dimension {n} is not tabulated")
        _PRINCIPAL[n] = _principal(n, _proper_faces(n))
    return _PRINCIPAL[n]


def _vertex_map(vertices):
    def f(name):
        return Gen("".join(str(vertices[int(c)]) for c in name))
    return f


def oriental(n: int) -> Polygraph:
    if n < 0 or n > 3:
        raise DimensionUnsupported(f"oriental of dimension {n} is not tabulated")
    p = Polygraph()
    for d in range(n + 1):
        for s in combinations(range(n + 1), d + 1):
            name = "".join(map(str, s))
            if d == 0:
                p.add(name, 0)
                continue
            src, tgt = principal_boundary(d)
            f = _vertex_map(s)
            p.add(name, d, relabel(src, f), relabel(tgt, f))
    return p


def principal(n: int) -> str:
    return "".join(str(i) for i in range(n + 1))


def face_name(n: int, i: int) -> str:
    """The face (0 .. î .. n)."""
    return "".join(str(k) for k in range(n + 1) if k != i)


def _factors(t: CellTerm, level: int) -> list:
    if isinstance(t, Comp) and t.i == level:
        return _factors(t.left, level) + _factors(t.right, level)
    return [t]


def oriental_boundary_shape_check(n: int) -> ValidationReport:
    """Check the principal cell of O_n against the odd/even face pattern.

    The source must be ``A_{odd} *_{n-2} ... *_{n-2} A_1`` (descending) and
    the target ``A_0 *_{n-2} A_2 ...`` (ascending), each factor a whisker of
    one face. From n = 3 on, the 1-dimensional whisker parts are units
    except ``R_1 = (01)`` around face 0 and ``L_1 = (n-1 n)`` around face n.
    """
    report = ValidationReport()
    p = oriental(n)
    xi = p[principal(n)]
    report.extend(validate_polygraph(p))
    expected = {SRC: [i for i in range(n, -1, -1) if i % 2 == 1],
                TGT: [i for i in range(n + 1) if i % 2 == 0]}
    for side, term in ((SRC, xi.src), (TGT, xi.tgt)):
        factors = _factors(term, n - 2) if n >= 2 else [term]
        faces = []
        for a in factors:
            cl = abelian_class(a, p)
            top = [g for g in cl if p[g].dim == n - 1]
            if len(top) != 1 or cl[top[0]] != 1:
                report.add("ShapeMismatch", f"{side}",
                           f"factor {a} is not a whisker of a single face")
                continue
            face = top[0]
            missing = [i for i in range(n + 1) if str(i) not in face]
            i = missing[0]
            faces.append(i)
            if n >= 3:
                _check_whisker(p, a, face, i, n, side, report)
        if faces != expected[side]:
            report.add("ShapeMismatch", side,
                       f"faces {faces} in {side}, expected {expected[side]}")
    return report


def _check_whisker(p, a, face, i, n, side, report):
    w = normal_form_1(boundary(a, 1, SRC, p), p).word
    fw = normal_form_1(boundary(Gen(face), 1, SRC, p), p).word
    for k in range(len(w) - len(fw) + 1):
        if w[k:k + len(fw)] == fw:
            left, right = w[:k], w[k + len(fw):]
            break
    else:
        report.add("ShapeMismatch", side, f"face {face} not found in its whisker")
        return
    want_r = ("01",) if i == 0 else ()
    want_l = (f"{n - 1}{n}",) if i == n else ()
    if right != want_r or left != want_l:
        report.add("ShapeMismatch", side,
                   f"whisker of face {face} has L_1={list(left)}, R_1={list(right)}")
