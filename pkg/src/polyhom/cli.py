"""Command-line interface: homology, checks and report comparison.

Every command prints a short human-readable summary on stdout and can
write a JSON RunReport (``--report FILE``) or print it (``--json``).
Exit codes: 0 ok or PASS, 1 FAIL (checks) or difference (compare),
2 validation failure, 3 parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from pathlib import Path

from .cellterm import (CellTermError, TermParseError, ValidationReport, dumps,
                       functor_from_json, polygraph_from_json, validate_polygraph,
                       check_functor)
from .chaincomplexer import (chain_complex, check_oplax, homotopy_from_oplax,
                             induced_chain_map, oplax_from_json, random_cylinder_system)
from .constructions import (abelianization_check, adjunction_triangle_check,
                            random_complex, random_set_functor, set_functor_from_json)
from .localsystem import check_weak_local_system, constant_system, system_from_json
from .simplicial import (CapExceeded, c1_polygraph, comparison_iso_check, constant_on,
                         load_space, normalized_complex, random_weak_system)
from .zlinalg import EntryTooLarge, FgAbGroup, homology_of_complex, induced_on_homology

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_PARSE = 0, 1, 2, 3

DATA_DIR = Path(__file__).parent / "data"


class InvalidInput(Exception):
    def __init__(self, report: ValidationReport | None, message: str = ""):
        super().__init__(message or (report.violations[0].message if report is not None else ""))
        self.report = report


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise TermParseError(f"{path}: {e}") from None


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _inputs(**paths) -> dict:
    return {k: {"path": str(v), "sha256": sha256(v)} for k, v in paths.items() if v}


def _table(groups, start: int = 0) -> dict:
    return {str(n + start): g.to_json() for n, g in enumerate(groups)}


def summary(groups) -> str:
    return " ".join(f"H{n}={g.compact()}" for n, g in enumerate(groups))


def _validate(report: ValidationReport):
    if not report.ok:
        raise InvalidInput(report)


def _load_system(path, base):
    if path is None:
        return constant_system(base)
    return system_from_json(_read_json(path), base)


# commands


def cmd_homology(args) -> tuple:
    p = polygraph_from_json(_read_json(args.polygraph))
    _validate(validate_polygraph(p))
    m = _load_system(args.system, p)
    _validate(check_weak_local_system(m))
    degrees = (args.max_degree + 1) if args.max_degree is not None else None
    groups = homology_of_complex(chain_complex(p, m), degrees)
    report = {"command": "homology",
              "inputs": _inputs(polygraph=args.polygraph, system=args.system),
              "results": {"homology": _table(groups)}}
    return report, summary(groups), EXIT_OK


def cmd_simplicial(args) -> tuple:
    x = load_space(args.space)
    _validate(x.check())
    base = c1_polygraph(x)
    m = constant_on(x) if args.system is None else system_from_json(_read_json(args.system), base)
    _validate(check_weak_local_system(m))
    degrees = x.reliable_degrees()
    if args.max_degree is not None:
        degrees = min(degrees, args.max_degree + 1)
    groups = homology_of_complex(normalized_complex(x, m, degrees), degrees)
    report = {"command": "simplicial",
              "inputs": _inputs(space=args.space, system=args.system),
              "results": {"homology": _table(groups),
                          "reliable_degrees": x.reliable_degrees()}}
    return report, summary(groups), EXIT_OK


def cmd_map(args) -> tuple:
    """Induced maps on homology of a functor between polygraphs."""
    obj = _read_json(args.functor)
    try:
        p, q = polygraph_from_json(obj["source"]), polygraph_from_json(obj["target"])
    except (KeyError, TypeError):
        raise TermParseError("functor file needs 'source', 'target' and 'images'") from None
    for r in (validate_polygraph(p), validate_polygraph(q)):
        _validate(r)
    f = functor_from_json(obj, p, q)
    _validate(check_functor(f))
    m = _load_system(args.system, q)
    _validate(check_weak_local_system(m))
    cmap = induced_chain_map(f, m)
    top = max(cmap.source.top, cmap.target.top)
    if args.max_degree is not None:
        top = args.max_degree
    src_h = homology_of_complex(cmap.source, top + 1)
    tgt_h = homology_of_complex(cmap.target, top + 1)
    maps, lines = {}, []
    for n in range(top + 1):
        if n > cmap.source.top or n > cmap.target.top:
            mat = []
        else:
            _, _, mat = induced_on_homology(cmap, n)
            mat = mat.to_rows()
        maps[str(n)] = {"source": src_h[n].to_json(), "target": tgt_h[n].to_json(),
                        "matrix": mat}
        lines.append(f"H{n}: {src_h[n].compact()} -> {tgt_h[n].compact()} {mat}")
    report = {"command": "map", "inputs": _inputs(functor=args.functor, system=args.system),
              "results": {"induced": maps}}
    return report, "\n".join(lines), EXIT_OK


def _check_prop4_7(args, rng):
    x = load_space(args.inputs[0])
    _validate(x.check())
    outcomes = []
    if len(args.inputs) > 1:
        systems = [system_from_json(_read_json(args.inputs[1]), c1_polygraph(x))]
    else:
        systems = [constant_on(x)] + [random_weak_system(x, rng, rank=rng.choice([1, 2]))
                                      for _ in range(args.samples)]
    for k, m in enumerate(systems):
        r = comparison_iso_check(x, m, args.top)
        outcomes.append(r.to_json())
        if not r.ok:
            return False, f"system {k}: {r.message}", outcomes
    return True, f"{len(systems)} systems, differentials equal", outcomes


def _check_lemma3_12(args, rng):
    a = oplax_from_json(_read_json(args.inputs[0]))
    for r in (validate_polygraph(a.source), validate_polygraph(a.target)):
        _validate(r)
    rep = check_oplax(a)
    if not rep.ok:
        v = rep.violations[0]
        return False, f"{v.location}: {v.message}", [rep.to_json()]
    if len(args.inputs) > 1:
        systems = [system_from_json(_read_json(args.inputs[1]), a.target)]
    else:
        systems = [constant_system(a.target)]
        try:
            systems += [random_cylinder_system(a, rng) for _ in range(args.samples)]
        except (ValueError, KeyError, AttributeError):
            pass
    outcomes = []
    for k, m in enumerate(systems):
        _validate(check_weak_local_system(m))
        h = homotopy_from_oplax(a, m)
        bad = h.first_nonzero()
        outcomes.append({"system": k, "residual_zero": bad is None})
        if bad is not None:
            return False, f"system {k}: residual nonzero in degree {bad}", outcomes
    return True, f"{len(systems)} systems, residual zero", outcomes


def _check_adjunction(args, rng):
    from .cellterm import OmegaFunctorData
    x = polygraph_from_json(_read_json(args.inputs[0]))
    _validate(validate_polygraph(x))
    m = _load_system(args.inputs[1] if len(args.inputs) > 1 else None, x)
    _validate(check_weak_local_system(m))
    ranks = [rng.randint(1, 2) for _ in range(x.max_dim + 2)]
    n_complex = random_complex(ranks, rng)
    rep = adjunction_triangle_check(x, OmegaFunctorData.identity(x), m, n_complex, rng,
                                    samples=args.samples)
    if not rep.ok:
        v = rep.violations[0]
        return False, f"{v.kind} at {v.location}: {v.message}", [rep.to_json()]
    return True, f"triangle identities hold, N ranks {ranks}", [rep.to_json()]


def _check_grothendieck(args, rng):
    x = polygraph_from_json(_read_json(args.inputs[0]))
    _validate(validate_polygraph(x))
    if len(args.inputs) > 1:
        es = [set_functor_from_json(_read_json(args.inputs[1]), x)]
    else:
        es = [random_set_functor(x, rng) for _ in range(args.samples)]
    outcomes = []
    for k, e in enumerate(es):
        _validate(e.check())
        r = abelianization_check(x, e)
        outcomes.append(r)
        if not (r["ok"] and r["valid"] and r["projection"]):
            return False, f"set functor {k}: abelianization identity fails", outcomes
    return True, f"{len(es)} set functors, complexes equal", outcomes


def _check_globularity(args, rng):
    obj = _read_json(args.inputs[0])
    p = polygraph_from_json(obj)
    rep = validate_polygraph(p)
    if not rep.ok:
        v = rep.violations[0]
        return False, f"{v.kind} at {v.location}: {v.message}", [rep.to_json()]
    return True, f"{len(p)} generators, boundaries globular", [rep.to_json()]


CHECKS = {"prop4_7": _check_prop4_7, "lemma3_12": _check_lemma3_12,
          "adjunction": _check_adjunction, "grothendieck": _check_grothendieck,
          "globularity": _check_globularity}


def cmd_check(args) -> tuple:
    rng = random.Random(args.seed)
    ok, message, outcomes = CHECKS[args.what](args, rng)
    verdict = "PASS" if ok else "FAIL"
    report = {"command": f"check {args.what}",
              "inputs": _inputs(**{f"input{k}": v for k, v in enumerate(args.inputs)}),
              "results": {"verdict": verdict, "message": message, "seed": args.seed,
                          "details": outcomes}}
    return report, f"{verdict} {args.what}: {message}", EXIT_OK if ok else EXIT_FAIL


def cmd_compare(args) -> tuple:
    left, right = _read_json(args.left), _read_json(args.right)
    try:
        lh = left.get("results", {}).get("homology", {}) if left else {}
        rh = right.get("results", {}).get("homology", {}) if right else {}
        lg = {int(k): FgAbGroup(v["rank"], tuple(v["torsion"])) for k, v in lh.items()}
        rg = {int(k): FgAbGroup(v["rank"], tuple(v["torsion"])) for k, v in rh.items()}
    except (AttributeError, KeyError, TypeError, ValueError):
        raise TermParseError("reports must carry a homology table") from None
    degrees = sorted(set(lg) & set(rg))
    if args.max_degree is not None:
        degrees = [n for n in degrees if n <= args.max_degree]
    verdicts = {}
    for n in degrees:
        verdicts[str(n)] = {"left": str(lg[n]), "right": str(rg[n]), "equal": lg[n] == rg[n]}
    same = all(v["equal"] for v in verdicts.values())
    lines = [f"H{n}: {v['left']} {'==' if v['equal'] else '!='} {v['right']}"
             for n, v in verdicts.items()]
    lines.append("equal" if same else "differ")
    report = {"command": "compare", "inputs": _inputs(left=args.left, right=args.right),
              "results": {"degrees": verdicts, "equal": same}}
    return report, "\n".join(lines), EXIT_OK if same else EXIT_FAIL


def cmd_fixtures(args) -> tuple:
    names = sorted(p.name for p in DATA_DIR.glob("*.json"))
    report = {"command": "fixtures", "inputs": {},
              "results": {"dir": str(DATA_DIR), "files": names}}
    return report, "\n".join([str(DATA_DIR)] + names), EXIT_OK


# entry point


class _Parser(argparse.ArgumentParser):
    # usage errors count as parse errors, keeping 2 for invalid data
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="polyhom", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--report", help="write the JSON RunReport to this file")
        sp.add_argument("--json", action="store_true", help="print the RunReport instead of the summary")
        sp.add_argument("--timing", action="store_true", help="include wall time in the report")

    sp = sub.add_parser("homology", help="homology of C(P, M) for a polygraph")
    sp.add_argument("--polygraph", required=True)
    sp.add_argument("--system")
    sp.add_argument("--max-degree", type=int)
    common(sp)
    sp.set_defaults(func=cmd_homology)

    sp = sub.add_parser("simplicial", help="homology of the normalized twisted complex")
    sp.add_argument("--space", required=True)
    sp.add_argument("--system")
    sp.add_argument("--max-degree", type=int)
    common(sp)
    sp.set_defaults(func=cmd_simplicial)

    sp = sub.add_parser("map", help="maps induced on homology by a functor")
    sp.add_argument("--functor", required=True)
    sp.add_argument("--system")
    sp.add_argument("--max-degree", type=int)
    common(sp)
    sp.set_defaults(func=cmd_map)

    sp = sub.add_parser("check", help="run one of the structural checks")
    sp.add_argument("--what", required=True, choices=sorted(CHECKS))
    sp.add_argument("--inputs", nargs="+", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--top", type=int, default=3, help="top degree for prop4_7")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("compare", help="compare the homology tables of two reports")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--max-degree", type=int)
    common(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("fixtures", help="list the shipped JSON fixtures")
    common(sp)
    sp.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_PARSE
    start = time.perf_counter()
    try:
        report, text, code = args.func(args)
    except InvalidInput as e:
        print(f"invalid input: {e}", file=sys.stderr)
        if e.report is not None:
            print(dumps(e.report.to_json()), file=sys.stderr, end="")
        return EXIT_INVALID
    except (EntryTooLarge, CapExceeded) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (TermParseError, OSError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except CellTermError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    out = dumps(report)
    if args.report:
        Path(args.report).write_text(out, encoding="utf-8")
    print(out, end="") if args.json else print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
