"""Brute-force oracles that check the constructions from the outside.

Everything here is written against definitions rather than against the
constructions it checks.  Families are enumerated by plain products and
filters, sheafification is recomputed as a colimit over all covers, and the
adjunction is checked by counting both hom-sets and transposing across.
"""

import itertools
from dataclasses import dataclass, field

from fintop._canon import canon
from fintop.elementary import (
    DependentProductResult,
    SliceObject,
    transpose_to_alpha,
    transpose_to_beta,
)
from fintop.errors import FintopError
from fintop.powersub import (
    classified,
    enumerate_subpresheaves,
    forall_direct,
    forall_via_power,
    full_sub,
    pullback_sub,
)
from fintop.presheaf import (
    NatTrans,
    Presheaf,
    empty_presheaf,
    enumerate_nat_trans,
    find_iso,
    product,
    pullback,
    slice_homs,
    validate_nat_trans,
    yoneda,
    yoneda_element,
)
from fintop.sites import (
    dependent_product_kan,
    family_key,
    kan_transpose_to_alpha,
    kan_transpose_to_family,
)

__all__ = [
    "TestObject",
    "Transposes",
    "AdjunctionRecord",
    "AdjunctionReport",
    "pullback_functor",
    "default_test_family",
    "elementary_transposes",
    "kan_transposes",
    "verify_adjunction",
    "iso_in_slice",
    "forall_by_sweep",
    "forall_sweep",
    "kan_families_direct",
    "pi_fiber_counts",
    "pullback_counts",
    "matching_families_direct",
    "plus_by_colimit",
    "sheafify_by_colimit",
    "Lemma1Report",
    "verify_lemma1",
    "corrupt_carrier",
    "break_naturality",
]


@dataclass
class TestObject:
    """A named slice object ``[k: K -> Q]`` used to probe the adjunction."""

    __test__ = False

    id: str
    arrow: NatTrans


@dataclass
class Transposes:
    """The two directions of the claimed bijection, indexed by ``k``."""

    to_right: object
    to_left: object
    label: str = ""


@dataclass
class AdjunctionRecord:
    k_id: str
    left: int
    right: int
    bijection: bool
    naturality: str
    witness: tuple = ()

    @property
    def ok(self):
        return self.left == self.right and self.bijection and self.naturality == "ok"


@dataclass
class AdjunctionReport:
    method: str
    records: list = field(default_factory=list)

    @property
    def verdict(self):
        return "pass" if self.records and all(r.ok for r in self.records) else "fail"

    @property
    def ok(self):
        return self.verdict == "pass"

    @property
    def witness(self):
        """First record with unequal hom-set sizes, else the first failing record."""
        failing = [r for r in self.records if not r.ok]
        for r in failing:
            if r.left != r.right:
                return r
        return failing[0] if failing else None

    def to_json(self):
        return {
            "method": self.method,
            "verdict": self.verdict,
            "records": [
                {
                    "k": r.k_id,
                    "left": r.left,
                    "right": r.right,
                    "bijection": r.bijection,
                    "naturality": r.naturality,
                    "witness": [canon(w) if not isinstance(w, str) else w for w in r.witness],
                }
                for r in self.records
            ],
        }


def pullback_functor(f, k):
    """``f*[k]`` as a slice object over ``f.source``."""
    arrow = k.arrow if isinstance(k, (SliceObject, TestObject)) else k
    _, to_p, _ = pullback(f, arrow)
    return SliceObject(to_p, "pullback")


def default_test_family(Q):
    """Every ``よ(X)`` sliced by each ``q ∈ Q(X)``, then every binary product of those over ``Q``."""
    c = Q.base
    reps = [
        TestObject(f"y({x})/{canon(q)}", yoneda_element(c, x, Q, q))
        for x in c.objects
        for q in Q.sets[x]
    ]
    prods = []
    for i, a in enumerate(reps):
        for b in reps[i:]:
            pb, p1, _ = pullback(a.arrow, b.arrow)
            prods.append(TestObject(f"{a.id}*{b.id}", p1.then(a.arrow)))
    return reps + prods


def elementary_transposes(result):
    return Transposes(
        lambda k, alpha: transpose_to_beta(result, k, alpha),
        lambda k, m: transpose_to_alpha(result, k, m),
        "elementary",
    )


def kan_transposes(f, h, pi):
    return Transposes(
        lambda k, alpha: kan_transpose_to_family(f, h, pi, k, alpha),
        lambda k, m: kan_transpose_to_alpha(f, h, pi, k, m),
        "kan",
    )


def _transported(f, h, candidate):
    """Kan transposes moved onto ``candidate`` along a slice iso, if one exists."""
    ref = dependent_product_kan(f, h)
    iso = iso_in_slice(ref, candidate)
    if iso is None:
        return None
    inv = NatTrans(iso.target, iso.source, {x: {b: a for a, b in c.items()} for x, c in iso.components.items()})
    base = kan_transposes(f, h, ref)
    return Transposes(
        lambda k, alpha: base.to_right(k, alpha).then(iso),
        lambda k, m: base.to_left(k, m.then(inv)),
        "iso-transport",
    )


def _pull_map(f, s, k1, k2):
    """``f*(s): f*K1 -> f*K2`` for a slice arrow ``s: [k1] -> [k2]``."""
    src, _, _ = pullback(f, k1)
    tgt, _, _ = pullback(f, k2)
    return NatTrans.from_function(src, tgt, lambda x, pu: (pu[0], s(x, pu[1])))


def verify_adjunction(f, h, candidate, family=None, transposes=None, naturality=True):
    """Check ``Hom(f*[k], [h]) ≅ Hom([k], Π)`` for each ``k`` in ``family``.

    ``candidate`` is a slice object over ``Q`` or an elementary result.  The
    bijection is tested through ``transposes`` when given, else through the
    construction's own transposes, else through Kan transposes transported
    along a slice isomorphism.
    """
    if isinstance(candidate, DependentProductResult):
        transposes = transposes or elementary_transposes(candidate)
        pi = candidate.slice()
    else:
        pi = candidate
        if transposes is None and pi.base_label == "kan":
            transposes = kan_transposes(f, h, pi)
    if transposes is None:
        transposes = _transported(f, h, pi)
    family = family if family is not None else default_test_family(f.target)
    report = AdjunctionReport(transposes.label if transposes else "none")
    lefts = {}
    for obj in family:
        k = obj.arrow
        left = slice_homs(pullback_functor(f, k).arrow, h)
        right = slice_homs(k, pi.arrow)
        lefts[obj.id] = left
        rec = AdjunctionRecord(obj.id, len(left), len(right), False, "skipped")
        if rec.left != rec.right:
            rec.witness = ("cardinality", obj.id, rec.left, rec.right)
        elif transposes is None:
            rec.witness = ("no-transposes", obj.id)
        else:
            rec.bijection, rec.witness = _check_bijection(k, left, right, transposes, obj.id)
        report.records.append(rec)
    if not naturality:
        for rec in report.records:
            rec.naturality = "ok" if rec.bijection else rec.naturality
        return report
    for rec, target in zip(report.records, family):
        if not rec.bijection:
            continue
        rec.naturality = "ok"
        w = _check_naturality(f, target, family, lefts[target.id], transposes)
        if w:
            rec.naturality = "fail"
            rec.witness = w
    return report


def _check_bijection(k, left, right, transposes, kid):
    right_keys = {m.key() for m in right}
    seen = set()
    for i, alpha in enumerate(left):
        try:
            m = transposes.to_right(k, alpha)
        except FintopError as exc:
            return False, ("transpose-error", kid, i, str(exc))
        rep = validate_nat_trans(m)
        if not rep.ok:
            law, wit = rep.first
            return False, ("not-natural", kid, i, law) + tuple(map(str, wit))
        key = m.key()
        if key not in right_keys:
            return False, ("not-a-slice-arrow", kid, i)
        if key in seen:
            return False, ("not-injective", kid, i)
        seen.add(key)
        try:
            back = transposes.to_left(k, m)
        except FintopError as exc:
            return False, ("transpose-error", kid, i, str(exc))
        if back != alpha:
            return False, ("round-trip", kid, i)
    return True, ()


def _check_naturality(f, target, family, left, transposes):
    """For every ``s: [k'] -> [k]`` in the family, ``(α ∘ f*(s))^♯ = α^♯ ∘ s``."""
    for src in family:
        for j, s in enumerate(slice_homs(src.arrow, target.arrow)):
            fs = _pull_map(f, s, src.arrow, target.arrow)
            for i, alpha in enumerate(left):
                lhs = transposes.to_right(src.arrow, fs.then(alpha))
                rhs = s.then(transposes.to_right(target.arrow, alpha))
                if lhs.components != rhs.components:
                    return ("naturality", src.id, target.id, j, i)
    return ()


def iso_in_slice(a, b):
    """First invertible slice arrow ``a -> b`` or ``None``."""
    if a.base.base != b.base.base or a.base != b.base:
        return None
    return find_iso(a.domain, b.domain, over=(a.arrow, b.arrow))


def forall_by_sweep(g, A):
    """``∀_g(A)`` as the union of every ``B ≤ Y`` with ``g*(B) ≤ A``."""
    Y = g.target
    out = {x: set() for x in Y.base.objects}
    for B in enumerate_subpresheaves(Y):
        if pullback_sub(g, B) <= A:
            for x in out:
                out[x] |= B.subsets[x]
    return type(A)(Y, out)


def forall_sweep(arrows, limit=256, cap=None):
    """Compare the three ∀ implementations on every ``A ≤ source`` of each arrow.

    Arrows whose source has more than ``limit`` subobjects are skipped.
    Returns ``(checked, mismatches, skipped)``.
    """
    checked, mismatches, skipped = 0, [], []
    for name, g in arrows:
        try:
            subs = enumerate_subpresheaves(g.source, cap=limit)
        except FintopError:
            skipped.append(name)
            continue
        for i, A in enumerate(subs):
            kwargs = {} if cap is None else {"cap": cap}
            direct = forall_direct(g, A)
            power = forall_via_power(g, A, **kwargs)
            sweep = forall_by_sweep(g, A)
            checked += 1
            if not (direct == power == sweep):
                mismatches.append((name, i))
    return checked, mismatches, skipped


def _index_pairs(f, X, q):
    P, Q = f.source, f.target
    c = P.base
    return [
        (g, p)
        for y in c.objects
        for g in c.hom(y, X)
        for p in P.sets[y]
        if f(y, p) == Q.action[g][q]
    ]


def kan_families_direct(f, h, X, q, compatible=True):
    """Families ``(x_{g,p})`` at ``(X, q)`` by product-and-filter.

    With ``compatible=False`` the compatibility filter is dropped, which
    serves as a negative control.
    """
    P, H = f.source, h.source
    c = P.base
    idx = _index_pairs(f, X, q)
    fibers = [[x for x in H.sets[c.dom(g)] if h(c.dom(g), x) == p] for g, p in idx]
    out = []
    for choice in itertools.product(*fibers):
        fam = dict(zip(idx, choice))
        if compatible and not _compatible(P, H, c, fam):
            continue
        out.append(family_key(fam))
    return out


def _compatible(P, H, c, fam):
    for (g, p), x in fam.items():
        for phi in c.arrows_into(c.dom(g)):
            if H.action[phi][x] != fam[(c.compose(g, phi), P.action[phi][p])]:
                return False
    return True


def pi_fiber_counts(f, h, compatible=True):
    """``{X: {q: |fiber|}}`` from :func:`kan_families_direct`."""
    Q = f.target
    return {
        x: {canon(q): len(kan_families_direct(f, h, x, q, compatible)) for q in Q.sets[x]}
        for x in Q.base.objects
    }


def pullback_counts(f, k):
    """``|f*(K)(X)|`` by enumerating pairs."""
    P, K = f.source, k.source
    return {
        x: sum(1 for p in P.sets[x] for u in K.sets[x] if f(x, p) == k(x, u)) for x in P.base.objects
    }


def matching_families_direct(P, arrows):
    """Matching families for a sieve given by its arrows, by product-and-filter."""
    c = P.base
    arrows = sorted(arrows)
    out = []
    for choice in itertools.product(*[P.sets[c.dom(g)] for g in arrows]):
        fam = dict(zip(arrows, choice))
        if all(
            P.action[phi][fam[g]] == fam[c.compose(g, phi)]
            for g in arrows
            for phi in c.arrows_into(c.dom(g))
        ):
            out.append(tuple(sorted(fam.items())))
    return out


def plus_by_colimit(P, J):
    """``P⁺`` as the colimit of matching families over all covers.

    Two families agree when they restrict to the same family on some cover
    contained in both sieves.  Classes are named by their least member.
    """
    c = P.base
    covers = {x: [s.arrows for s in J.covers[x]] for x in c.objects}
    reps, cls = {}, {}
    for x in c.objects:
        members = [
            (tuple(sorted(s)), fam) for s in covers[x] for fam in matching_families_direct(P, s)
        ]
        parent = list(range(len(members)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i, j in itertools.combinations(range(len(members)), 2):
            si, fi = members[i]
            sj, fj = members[j]
            di, dj = dict(fi), dict(fj)
            common = set(si) & set(sj)
            if any(t <= common and all(di[g] == dj[g] for g in t) for t in covers[x]):
                parent[find(i)] = find(j)
        groups = {}
        for i, m in enumerate(members):
            groups.setdefault(find(i), []).append(m)
        names = []
        for ms in groups.values():
            name = min(ms, key=canon)
            names.append(name)
            for m in ms:
                cls[(x, m)] = name
        reps[x] = sorted(names, key=canon)
    action = {}
    for m in c.morphisms:
        act = {}
        for s, fam in reps[m.cod]:
            d = dict(fam)
            pulled = tuple(sorted(phi for phi in c.arrows_into(m.dom) if c.compose(m.id, phi) in d))
            act[(s, fam)] = cls[(m.dom, (pulled, tuple((g, d[c.compose(m.id, g)]) for g in pulled)))]
        action[m.id] = act
    plus = Presheaf(c, reps, action)
    unit = NatTrans.from_function(
        P,
        plus,
        lambda x, a: cls[(x, (tuple(sorted(c.arrows_into(x))), tuple((g, P.action[g][a]) for g in sorted(c.arrows_into(x)))))],
    )
    return plus, unit


def sheafify_by_colimit(P, J):
    p1, e1 = plus_by_colimit(P, J)
    p2, e2 = plus_by_colimit(p1, J)
    return p2, e1.then(e2)


@dataclass
class Lemma1Report:
    """Per clause, the number of arrows tested and those where the two sides disagree."""

    arrows: int = 0
    holds: dict = field(default_factory=lambda: {"i": 0, "ii": 0, "iii": 0})
    mismatches: dict = field(default_factory=lambda: {"i": [], "ii": [], "iii": []})

    @property
    def ok(self):
        return self.arrows > 0 and not any(self.mismatches.values())


def _lemma1_family(c):
    return [("0", empty_presheaf(c))] + [(f"y({x})", yoneda(c, x)) for x in c.objects]


def verify_lemma1(result, family=None):
    """Evaluate both sides of each clause on every arrow ``K -> Q × P(H×P)``."""
    ctx = result.context
    f, h = ctx.f, ctx.h
    T1, T2, FS = result.parts["T1"], result.parts["T2"], result.parts["forall_S"]
    family = family if family is not None else _lemma1_family(f.source.base)
    rep = Lemma1Report()
    for kname, K in family:
        amb = product(ctx.HP, K)
        for n, t in enumerate(enumerate_nat_trans(K, ctx.QPHP)):
            k = NatTrans.from_function(K, ctx.Q, lambda x, u: t(x, u)[0])
            beta = NatTrans.from_function(K, ctx.PHP.carrier, lambda x, u: t(x, u)[1])
            M = classified(beta, ctx.PHP, amb)
            lhs = {
                "i": _factors(t, T1),
                "ii": _factors(t, T2),
                "iii": _factors(t, FS),
            }
            rhs = {
                "i": all(f(x, p) == k(x, u) for x, s in M.subsets.items() for (_, p), u in s),
                "ii": all(h(x, hx) == p for x, s in M.subsets.items() for (hx, p), _ in s),
                "iii": _graph_over_pullback(f, k, M),
            }
            rep.arrows += 1
            for clause in lhs:
                rep.holds[clause] += lhs[clause]
                if lhs[clause] != rhs[clause]:
                    rep.mismatches[clause].append((kname, n))
    return rep


def _factors(t, sub):
    return all(v in sub.subsets[x] for x, comp in t.components.items() for v in comp.values())


def _graph_over_pullback(f, k, M):
    """Each ``(p, u)`` with ``f(p) = k(u)`` has exactly one ``x`` with ``((x, p), u) ∈ M``."""
    P, K = f.source, k.source
    for x in P.base.objects:
        counts = {}
        for (_, p), u in M.subsets[x]:
            if f(x, p) == k(x, u):
                counts[(p, u)] = counts.get((p, u), 0) + 1
        for p in P.sets[x]:
            for u in K.sets[x]:
                if f(x, p) == k(x, u) and counts.get((p, u), 0) != 1:
                    return False
    return True


def corrupt_carrier(pi):
    """Drop one element from the domain of ``pi`` keeping it a presheaf.

    The dropped element is the last one, in object order, that no restriction
    map reaches.  Returns ``(corrupted slice, (object, element))``.
    """
    D = pi.domain
    c = D.base
    reached = {x: set() for x in c.objects}
    for m in c.morphisms:
        if not c.is_identity(m.id):
            reached[m.dom] |= set(D.action[m.id].values())
    for x in reversed(c.objects):
        free = [a for a in D.sets[x] if a not in reached[x]]
        if free:
            victim = free[-1]
            break
    else:
        raise ValueError("every element is reached by a restriction")
    sub = full_sub(D)
    sub.subsets[x] = sub.subsets[x] - {victim}
    S, incl = sub.as_presheaf()
    return SliceObject(incl.then(pi.arrow), "corrupted"), (x, victim)


def break_naturality(t):
    """Change one component value so that ``t`` stops being natural.

    Returns ``(broken, (object, element, new value))`` or ``None`` if every
    single-entry change stays natural.
    """
    for x in t.source.base.objects:
        for a in t.source.sets[x]:
            for b in t.target.sets[x]:
                if b == t(x, a):
                    continue
                comps = {y: dict(comp) for y, comp in t.components.items()}
                comps[x][a] = b
                broken = NatTrans(t.source, t.target, comps)
                if not validate_nat_trans(broken).ok:
                    return broken, (x, a, b)
    return None
