"""Expected values for fixtures, computed by brute force only.

Run ``python -m fintop.harness.expected`` to rewrite the ``expected`` table
of every standard fixture.  The tests compare the shipped tables with a
fresh derivation.
"""

import itertools
import json

from fintop._canon import canon
from fintop.harness.fixtures import STANDARD, DATA_DIR, get_fixture
from fintop.harness.oracles import (
    default_test_family,
    kan_families_direct,
    pullback_counts,
    sheafify_by_colimit,
)
from fintop.presheaf import pullback

PROVENANCE = "DERIVED"


def count_subpresheaves_direct(P):
    """Number of subsets of elements closed under every restriction map."""
    elems = P.elements()
    moves = [
        ((m.cod, a), (m.dom, P.action[m.id][a]))
        for m in P.base.morphisms
        for a in P.sets[m.cod]
    ]
    total = 0
    for mask in range(1 << len(elems)):
        chosen = {e for i, e in enumerate(elems) if mask >> i & 1}
        if all(dst in chosen for src, dst in moves if src in chosen):
            total += 1
    return total


def count_slice_homs_direct(a, b):
    """Slice morphisms ``[a] -> [b]`` by trying every componentwise function."""
    A, B = a.source, b.source
    c = A.base
    comps = []
    for x in c.objects:
        choices = [[v for v in B.sets[x] if b(x, v) == a(x, u)] for u in A.sets[x]]
        comps.append([dict(zip(A.sets[x], pick)) for pick in itertools.product(*choices)])
    total = 0
    for pick in itertools.product(*comps):
        t = dict(zip(c.objects, pick))
        if all(
            B.action[m.id][t[m.cod][u]] == t[m.dom][A.action[m.id][u]]
            for m in c.morphisms
            for u in A.sets[m.cod]
        ):
            total += 1
    return total


def derive(fx):
    out = []

    def put(query, value):
        out.append({"query": query, "value": value, "provenance": PROVENANCE})

    f, h = fx.f, fx.h
    for x in f.target.base.objects:
        for q in f.target.sets[x]:
            put(f"pi.fiber/{x}/{canon(q)}", len(kan_families_direct(f, h, x, q)))
    for name, P in fx.presheaves.items():
        if len(P.elements()) <= 16:
            put(f"sub.count/{name}", count_subpresheaves_direct(P))
    put("pullback.size/h*h", sum(pullback_counts(h, h).values()))
    for obj in default_test_family(f.target):
        pb, to_p, _ = pullback(f, obj.arrow)
        put(f"adjunction.homs/{obj.id}", count_slice_homs_direct(to_p, h))
    J = fx.topology
    if J is not None:
        for name, P in fx.presheaves.items():
            aP, _ = sheafify_by_colimit(P, J)
            for x in P.base.objects:
                put(f"sheafify.size/{name}/{x}", len(aP.sets[x]))
    return out


def main():
    for name, file in STANDARD.items():
        path = DATA_DIR / file
        doc = json.loads(path.read_text(encoding="utf-8"))
        doc["expected"] = derive(get_fixture(name))
        path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        print(f"{name}: {len(doc['expected'])} expected values")


if __name__ == "__main__":
    main()
