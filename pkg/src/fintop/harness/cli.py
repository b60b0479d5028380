"""Command-line interface.

Exit codes: 0 pass, 1 mathematical failure, 2 malformed input, 3 resource cap.
Every report is deterministic; no timings or addresses are printed.
"""

import argparse
import random
import sys
from pathlib import Path

from fintop._canon import canon
from fintop.elementary import dependent_product_elementary
from fintop.errors import FintopError, InputError, ResourceError
from fintop.harness.fixtures import STANDARD, fixture_names, get_fixture
from fintop.harness.oracles import (
    forall_sweep,
    iso_in_slice,
    verify_adjunction,
    verify_lemma1,
)
from fintop.harness.serialize import (
    category_to_json,
    dumps,
    load_document,
    nat_trans_to_json,
    presheaf_to_json,
)
from fintop.powersub import DEFAULT_CAP
from fintop.presheaf import elements_category, elements_functor
from fintop.sheaves import (
    check_comorphism,
    dependent_product_sheaf,
    induced_topology,
    is_sheaf,
    subtopos_square_check,
    validate_topology,
)
from fintop.sites import dependent_product_kan

PASS, FAIL, BAD_INPUT, CAP = 0, 1, 2, 3
METHODS = ("elementary", "kan")


def _out(lines):
    for line in lines:
        print(line)


def _write(path, obj):
    Path(path).write_text(dumps(obj), encoding="utf-8")


def _pi(method, f, h, cap, topology=None):
    if method == "elementary":
        return dependent_product_elementary(f, h, cap).slice()
    if method == "kan":
        return dependent_product_kan(f, h)
    if method == "sheaf":
        if topology is None:
            raise InputError("method 'sheaf' needs a topology")
        return dependent_product_sheaf(f, h, topology, cap=cap)
    raise InputError(f"unknown method {method!r}")


def _slice_json(pi):
    D = pi.domain
    fibers = {}
    for x in D.base.objects:
        counts = {canon(q): 0 for q in pi.base.sets[x]}
        for a in D.sets[x]:
            counts[canon(pi.arrow(x, a))] += 1
        fibers[x] = counts
    return {
        "fiber_counts": fibers,
        "sizes": {x: len(D.sets[x]) for x in D.base.objects},
        "structural": nat_trans_to_json(pi.arrow, "Pi", "Q"),
        "presheaf": presheaf_to_json(D),
    }


def cmd_validate(args):
    kind, obj = load_document(args.file)
    lines = [f"{kind} {args.file}: pass"]
    if kind == "fixture":
        for name, J in obj.topologies.items():
            lines.append(f"  topology {name}: {validate_topology(J).summary()}")
        lines.append(
            "  "
            + ", ".join(f"{k}={len(v)}" for k, v in (("presheaves", obj.presheaves), ("arrows", obj.arrows)))
        )
    _out(lines)
    return PASS


def _load_arrow(path):
    kind, obj = load_document(path)
    if kind != "nat_trans":
        raise InputError("expected a natural transformation document", str(path))
    return obj


def cmd_compute(args):
    if args.fixture:
        fx = get_fixture(args.fixture)
        f, h, J = fx.f, fx.h, fx.topology
    else:
        if not (args.f and args.h):
            raise InputError("compute dp needs --f and --h, or --fixture")
        f, h, J = _load_arrow(args.f), _load_arrow(args.h), None
    if args.topology:
        kind, J = load_document(args.topology)
        if kind != "topology":
            raise InputError("not a topology document", args.topology)
    if h.target != f.source:
        raise InputError("the target of h is not the source of f")
    pi = _pi(args.method, f, h, args.cap, J)
    doc = {"method": args.method, **_slice_json(pi)}
    if args.out:
        _write(args.out, doc)
    lines = [f"dependent product ({args.method})"]
    for x, counts in doc["fiber_counts"].items():
        parts = ", ".join(f"{q}: {n}" for q, n in counts.items())
        lines.append(f"  {x}: {doc['sizes'][x]} elements ({parts})")
    _out(lines)
    return PASS


def _fixtures(args):
    names = [args.fixture] if args.fixture else fixture_names()
    return [(n, get_fixture(n)) for n in names]


def _methods(args):
    if args.all_methods:
        return list(METHODS)
    return [args.method]


def verify_adjunction_cmd(args):
    ok, lines, doc = True, [], {}
    for name, fx in _fixtures(args):
        for method in _methods(args):
            cand = (
                dependent_product_elementary(fx.f, fx.h, args.cap)
                if method == "elementary"
                else dependent_product_kan(fx.f, fx.h)
            )
            rep = verify_adjunction(fx.f, fx.h, cand)
            ok &= rep.ok
            doc[f"{fx.name}/{method}"] = rep.to_json()
            lines.append(f"{fx.name} adjunction {method}: {rep.verdict} ({len(rep.records)} test objects)")
            if not rep.ok:
                w = rep.witness
                lines.append(f"  witness {w.k_id}: left={w.left} right={w.right} {w.witness}")
    return ok, lines, doc


def verify_equivalence_cmd(args):
    ok, lines, doc = True, [], {}
    for name, fx in _fixtures(args):
        f, h = fx.f, fx.h
        el = dependent_product_elementary(f, h, args.cap).slice()
        kan = dependent_product_kan(f, h)
        pairs = [("elementary", "kan", el, kan)]
        if args.all_methods and fx.topology is not None:
            J = fx.topology
            for m in METHODS:
                pairs.append((f"sheaf-{m}", "kan", dependent_product_sheaf(f, h, J, m, args.cap), kan))
        entry = {}
        for a, b, x, y in pairs:
            iso = iso_in_slice(x, y)
            good = iso is not None
            ok &= good
            entry[f"{a}~{b}"] = {
                "iso": good,
                "sizes": {o: len(x.domain.sets[o]) for o in x.domain.base.objects},
            }
            lines.append(f"{fx.name} equivalence {a} ~ {b}: {'pass' if good else 'fail'}")
        doc[fx.name] = entry
    return ok, lines, doc


def verify_lemma1_cmd(args):
    ok, lines, doc = True, [], {}
    for name, fx in _fixtures(args):
        rep = verify_lemma1(dependent_product_elementary(fx.f, fx.h, args.cap))
        ok &= rep.ok
        doc[fx.name] = {"arrows": rep.arrows, "holds": rep.holds, "mismatches": rep.mismatches}
        verdict = "pass" if rep.ok else "fail"
        lines.append(f"{fx.name} lemma1: {verdict} ({rep.arrows} arrows, holds {rep.holds})")
    return ok, lines, doc


def verify_forall_cmd(args):
    ok, lines, doc = True, [], {}
    for name, fx in _fixtures(args):
        arrows = list(fx.arrows.items()) + [("h;f", fx.h.then(fx.f))]
        checked, mismatches, skipped = forall_sweep(arrows, cap=args.cap)
        ok &= not mismatches and checked > 0
        doc[fx.name] = {"checked": checked, "mismatches": mismatches, "skipped": skipped}
        verdict = "pass" if not mismatches and checked else "fail"
        lines.append(f"{fx.name} forall: {verdict} ({checked} subobjects, skipped {skipped})")
    return ok, lines, doc


def verify_sheaf_remark_cmd(args):
    ok, lines, doc = True, [], {}
    for name, fx in _fixtures(args):
        J = fx.topology
        if J is None:
            lines.append(f"{fx.name} sheaf-remark: skipped (no topology)")
            doc[fx.name] = {"status": "skipped"}
            continue
        f, h = fx.f, fx.h
        P, Q = f.source, f.target
        EP, EQ = elements_category(P), elements_category(Q)
        JP, JQ = induced_topology(P, J, EP), induced_topology(Q, J, EQ)
        checks = {
            "topology": validate_topology(J).ok,
            "induced_P": validate_topology(JP).ok,
            "induced_Q": validate_topology(JQ).ok,
            "comorphism": check_comorphism(elements_functor(f, EP, EQ), JP, JQ).ok,
        }
        # the comparison is about sheaves; anything else is reported as an unmet precondition
        checks["sheaves"] = all(is_sheaf(X, J).ok for X in (P, Q, h.source))
        if checks["sheaves"]:
            for m in _methods(args) if args.all_methods else ["kan"]:
                pre = _pi(m, f, h, args.cap)
                sh = dependent_product_sheaf(f, h, J, m, args.cap)
                checks[f"carrier_{m}"] = sh.domain == pre.domain and sh.arrow == pre.arrow
        square = subtopos_square_check(f, h, J)
        checks["square"] = square.ok
        ok &= all(checks.values())
        doc[fx.name] = {"checks": checks, "square": square.status}
        if not square.ok:
            lines.append(f"{fx.name} sheaf-remark: {square.status} ({square.detail})")
        for key, val in checks.items():
            lines.append(f"{fx.name} sheaf-remark {key}: {'pass' if val else 'fail'}")
    return ok, lines, doc


VERIFY = {
    "adjunction": verify_adjunction_cmd,
    "equivalence": verify_equivalence_cmd,
    "lemma1": verify_lemma1_cmd,
    "forall": verify_forall_cmd,
    "sheaf-remark": verify_sheaf_remark_cmd,
}


def cmd_verify(args):
    ok, lines, doc = VERIFY[args.what](args)
    if args.out:
        _write(args.out, {"check": args.what, "pass": ok, "results": doc})
    lines.append(f"verify {args.what}: {'pass' if ok else 'FAIL'}")
    _out(lines)
    return PASS if ok else FAIL


def cmd_fixtures(args):
    if args.action == "list":
        for name in fixture_names():
            fx = get_fixture(name)
            print(f"{name}  {STANDARD[name]}  {fx.description}")
        return PASS
    fx = get_fixture(args.name)
    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    for key, t in fx.arrows.items():
        _write(out / f"{key}.json", nat_trans_to_json(t))
    for key, P in fx.presheaves.items():
        _write(out / f"{key}.json", presheaf_to_json(P))
    for key, J in fx.topologies.items():
        _write(
            out / f"{key}.json",
            {
                "category": category_to_json(J.base),
                "covers": {x: [s.sorted() for s in sieves] for x, sieves in J.covers.items()},
                "saturate": False,
            },
        )
    print(f"wrote {len(fx.arrows) + len(fx.presheaves) + len(fx.topologies)} files to {out}")
    return PASS


def build_parser():
    p = argparse.ArgumentParser(prog="fintop", description="Dependent products on finite sites.")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="power-object size cap")
    p.add_argument("--seed", type=int, default=0, help="seed for any randomized step")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="load and validate a document")
    v.add_argument("file")
    v.set_defaults(run=cmd_validate)

    c = sub.add_parser("compute", help="compute a construction")
    c.add_argument("what", choices=["dp"])
    c.add_argument("--f", help="nat_trans JSON file for f: P -> Q")
    c.add_argument("--h", help="nat_trans JSON file for h: H -> P")
    c.add_argument("--fixture", help="take f, h and the topology from a fixture")
    c.add_argument("--method", choices=["elementary", "kan", "sheaf"], default="elementary")
    c.add_argument("--topology", help="topology JSON file, needed by --method sheaf")
    c.add_argument("--out", help="write the result as JSON to this file")
    c.set_defaults(run=cmd_compute)

    r = sub.add_parser("verify", help="run an oracle check")
    r.add_argument("what", choices=sorted(VERIFY))
    r.add_argument("--fixture", help="fixture name or file (default: all standard fixtures)")
    r.add_argument("--method", choices=METHODS, default="elementary")
    r.add_argument("--all-methods", action="store_true", help="also run the sheaf-level variants")
    r.add_argument("--out", help="write the report as JSON to this file")
    r.set_defaults(run=cmd_verify)

    x = sub.add_parser("fixtures", help="list or export the standard fixtures")
    xs = x.add_subparsers(dest="action", required=True)
    xs.add_parser("list")
    e = xs.add_parser("export")
    e.add_argument("name")
    e.add_argument("--dir", required=True)
    x.set_defaults(run=cmd_fixtures)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else PASS
    random.seed(args.seed)
    try:
        return args.run(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except ResourceError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return CAP
    except FintopError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
