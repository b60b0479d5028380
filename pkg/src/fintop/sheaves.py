"""Grothendieck topologies on finite categories and sheaves for them.

Covering sieves are listed extensionally.  Sheafification is the plus
construction applied twice; on a finite site every topology has a smallest
cover at each object, and that single sieve is cofinal among the covers, so
``P⁺(X)`` is the set of matching families for it.
"""

import logging
from dataclasses import dataclass, field

from fintop import kernels
from fintop.elementary import SliceObject, dependent_product_elementary
from fintop.errors import PreconditionError
from fintop.fincat import FinFunctor, ValidationReport
from fintop.presheaf import (
    NatTrans,
    Presheaf,
    elements_category,
    enumerate_nat_trans,
    find_iso,
    pullback,
)
from fintop.sites import dependent_product_kan

log = logging.getLogger(__name__)

__all__ = [
    "Sieve",
    "GrothTopology",
    "SquareReport",
    "all_sieves",
    "generated_sieve",
    "pullback_sieve",
    "trivial_topology",
    "validate_topology",
    "saturate",
    "induced_topology",
    "check_comorphism",
    "matching_families",
    "is_sheaf",
    "plus_construction",
    "sheafify",
    "sheafify_map",
    "slice_inclusion_direct_image",
    "dependent_product_sheaf",
    "subtopos_square_check",
]


@dataclass(frozen=True)
class Sieve:
    on: str
    arrows: frozenset

    def __contains__(self, g):
        return g in self.arrows

    def __len__(self):
        return len(self.arrows)

    def sorted(self):
        return sorted(self.arrows)


def _sieve_key(s):
    return (len(s.arrows), sorted(s.arrows))


class GrothTopology:
    """Covering sieves per object; ``covers[X]`` is a tuple of :class:`Sieve`."""

    def __init__(self, base, covers):
        self.base = base
        self.covers = {}
        for x in base.objects:
            sieves = {s if isinstance(s, Sieve) else Sieve(x, frozenset(s)) for s in covers.get(x, ())}
            self.covers[x] = tuple(sorted(sieves, key=_sieve_key))

    def __repr__(self):
        counts = ", ".join(f"{x}:{len(s)}" for x, s in self.covers.items())
        return f"GrothTopology([{counts}])"

    def __eq__(self, other):
        if not isinstance(other, GrothTopology):
            return NotImplemented
        return self.base == other.base and self.covers == other.covers

    def is_cover(self, x, arrows):
        return Sieve(x, frozenset(arrows)) in self.covers[x]

    def minimal_cover(self, x):
        """The intersection of all covers of ``x``, which must itself cover."""
        arrows = frozenset(self.base.arrows_into(x))
        for s in self.covers[x]:
            arrows &= s.arrows
        if not self.is_cover(x, arrows):
            raise PreconditionError(f"covers of {x} are not closed under intersection")
        return Sieve(x, arrows)


def all_sieves(c, x):
    """Every sieve on ``x`` (empty first), via the order-ideal kernel."""
    arrows = c.arrows_into(x)
    pos = {g: i for i, g in enumerate(arrows)}
    succ = [[pos[c.compose(g, phi)] for phi in c.arrows_into(c.dom(g)) if not c.is_identity(phi)] for g in arrows]
    down, up = kernels.closure_masks(len(arrows), succ)
    return [Sieve(x, frozenset(arrows[i] for i in kernels.bits(m))) for m in kernels.closed_subsets(down, up, 0)]


def generated_sieve(c, x, arrows):
    return Sieve(x, frozenset(c.compose(g, phi) for g in arrows for phi in c.arrows_into(c.dom(g))))


def pullback_sieve(c, s, g):
    """``g*(S) = {φ | g ∘ φ ∈ S}`` for ``g: Y -> X``."""
    return Sieve(c.dom(g), frozenset(phi for phi in c.arrows_into(c.dom(g)) if c.compose(g, phi) in s.arrows))


def trivial_topology(c):
    return GrothTopology(c, {x: [c.arrows_into(x)] for x in c.objects})


def validate_topology(J):
    """Check well-formedness, maximality, stability and transitivity exhaustively."""
    c = J.base
    rep = ValidationReport("topology")
    for x in c.objects:
        into = set(c.arrows_into(x))
        for s in J.covers[x]:
            stray = sorted(s.arrows - into)
            if stray:
                rep.fail("sieve-arrows", x, stray[0])
                continue
            for g in sorted(s.arrows):
                for phi in c.arrows_into(c.dom(g)):
                    if c.compose(g, phi) not in s.arrows:
                        rep.fail("sieve-closed", x, g, phi)
    if not rep.ok:
        return rep
    for x in c.objects:
        if not J.is_cover(x, c.arrows_into(x)):
            rep.fail("maximal", x)
    for x in c.objects:
        for s in J.covers[x]:
            for g in c.arrows_into(x):
                if pullback_sieve(c, s, g) not in J.covers[c.dom(g)]:
                    rep.fail("stability", x, s.sorted(), g)
    for x in c.objects:
        for r in all_sieves(c, x):
            if r in J.covers[x]:
                continue
            for s in J.covers[x]:
                if all(pullback_sieve(c, r, g) in J.covers[c.dom(g)] for g in s.arrows):
                    rep.fail("transitivity", x, r.sorted(), s.sorted())
                    break
    return rep


def saturate(c, generators):
    """Smallest topology containing ``generators``, by fixpoint iteration."""
    covers = {x: {Sieve(x, frozenset(c.arrows_into(x)))} for x in c.objects}
    for x, gens in generators.items():
        covers[x] |= {s if isinstance(s, Sieve) else generated_sieve(c, x, s) for s in gens}
    sieves = {x: all_sieves(c, x) for x in c.objects}
    rounds = 0
    changed = True
    while changed:
        changed = False
        rounds += 1
        for x in c.objects:
            for s in list(covers[x]):
                for g in c.arrows_into(x):
                    t = pullback_sieve(c, s, g)
                    if t not in covers[t.on]:
                        covers[t.on].add(t)
                        changed = True
        for x in c.objects:
            for r in sieves[x]:
                if r in covers[x]:
                    continue
                if any(all(pullback_sieve(c, r, g) in covers[c.dom(g)] for g in s.arrows) for s in covers[x]):
                    covers[x].add(r)
                    changed = True
    log.info("saturated topology in %d rounds: %s", rounds, {x: len(s) for x, s in covers.items()})
    return GrothTopology(c, covers)


def induced_topology(P, J, EP=None):
    """``J_P`` on ``∫P``: a sieve covers iff its projection generates a ``J``-cover."""
    EP = EP or elements_category(P)
    base = J.base
    covers = {}
    for n, (x, _) in EP.labels.items():
        covers[n] = [
            s
            for s in all_sieves(EP.cat, n)
            if generated_sieve(base, x, [EP.proj.mor(a) for a in s.arrows]) in J.covers[x]
        ]
    return GrothTopology(EP.cat, covers)


def check_comorphism(F: FinFunctor, J, K):
    """Covering-lifting: every ``K``-cover ``R`` of ``F(X)`` contains ``F(S)`` for a ``J``-cover ``S``."""
    rep = ValidationReport("comorphism")
    for x in F.source.objects:
        for r in K.covers[F.obj(x)]:
            if not any(all(F.mor(a) in r.arrows for a in s.arrows) for s in J.covers[x]):
                rep.fail("covering-lifting", x, r.sorted())
    return rep


def _sieve_presheaf(c, s):
    sets = {y: [g for g in c.arrows_into(s.on) if g in s.arrows and c.dom(g) == y] for y in c.objects}
    action = {m.id: {g: c.compose(g, m.id) for g in sets[m.cod]} for m in c.morphisms}
    return Presheaf(c, sets, action)


def matching_families(P, s):
    """Matching families for ``s`` as sorted tuples of ``(arrow, element)``."""
    c = P.base
    out = []
    for t in enumerate_nat_trans(_sieve_presheaf(c, s), P):
        out.append(tuple(sorted((g, a) for comp in t.components.values() for g, a in comp.items())))
    return out


def _restrict_to(P, s, a):
    return tuple(sorted((g, P.action[g][a]) for g in s.arrows))


def is_sheaf(P, J):
    """Every matching family for every cover has exactly one amalgamation."""
    rep = ValidationReport("sheaf")
    for x in J.base.objects:
        for s in J.covers[x]:
            seen = {}
            for a in P.sets[x]:
                fam = _restrict_to(P, s, a)
                if fam in seen:
                    rep.fail("uniqueness", x, s.sorted(), seen[fam], a)
                else:
                    seen[fam] = a
            for fam in matching_families(P, s):
                if fam not in seen:
                    rep.fail("existence", x, s.sorted(), fam)
    return rep


def plus_construction(P, J):
    """``(P⁺, η)`` using the minimal cover at each object."""
    c = P.base
    mins = {x: J.minimal_cover(x) for x in c.objects}
    sets = {x: matching_families(P, mins[x]) for x in c.objects}
    action = {}
    for m in c.morphisms:
        y = m.dom
        act = {}
        for fam in sets[m.cod]:
            d = dict(fam)
            act[fam] = tuple(sorted((g, d[c.compose(m.id, g)]) for g in mins[y].arrows))
        action[m.id] = act
    plus = Presheaf(c, sets, action, name=f"{P.name or 'P'}+")
    unit = NatTrans.from_function(P, plus, lambda x, a: _restrict_to(P, mins[x], a))
    return plus, unit


def _plus_map(t, J, src, tgt):
    c = t.source.base
    return NatTrans.from_function(
        src, tgt, lambda x, fam: tuple(sorted((g, t(c.dom(g), a)) for g, a in fam))
    )


def _full_sheafify(P, J):
    p1, e1 = plus_construction(P, J)
    p2, e2 = plus_construction(p1, J)
    return p2, e1.then(e2), p1


def sheafify(P, J):
    """``(a(P), unit)``; a presheaf that already is a sheaf is returned unchanged with the identity."""
    if is_sheaf(P, J).ok:
        return P, NatTrans.identity(P)
    aP, unit, _ = _full_sheafify(P, J)
    aP.name = f"a({P.name or 'P'})"
    return aP, unit


def _invert(t):
    return NatTrans(t.target, t.source, {x: {b: a for a, b in comp.items()} for x, comp in t.components.items()})


def sheafify_map(t, J, source=None, target=None):
    """``a(t): a(P) -> a(Q)`` against the given (or freshly computed) sheafifications."""
    P, Q = t.source, t.target
    aP, _ = source or sheafify(P, J)
    aQ, _ = target or sheafify(Q, J)
    P2, uP, P1 = _full_sheafify(P, J)
    Q2, uQ, Q1 = _full_sheafify(Q, J)
    s = _plus_map(_plus_map(t, J, P1, Q1), J, P2, Q2)
    if aP is P:
        s = uP.then(s)
    if aQ is Q:
        s = s.then(_invert(uQ))
    return NatTrans(aP, aQ, s.components)


def slice_inclusion_direct_image(w, J, unit=None):
    """Pull ``w: W -> a(P)`` back along the unit ``P -> a(P)``."""
    if unit is None:
        raise PreconditionError("the unit P -> a(P) is required")
    if unit.source is unit.target or unit == NatTrans.identity(unit.source):
        if w.target != unit.source:
            raise PreconditionError("w does not land in a(P)")
        return SliceObject(w, "direct-image")
    if w.target != unit.target:
        raise PreconditionError("w does not land in a(P)")
    _, to_p, _ = pullback(unit, w)
    return SliceObject(to_p, "direct-image")


def dependent_product_sheaf(f, h, J, method="kan", cap=None):
    """``Π_{a(f)}[h] ≅ a_Q(Π_f(i_P[h]))`` as a slice object over ``a(Q)``."""
    P, Q = f.source, f.target
    aP, unitP = sheafify(P, J)
    aQ, unitQ = sheafify(Q, J)
    hp = slice_inclusion_direct_image(h, J, unitP).arrow
    if method == "kan":
        pi = dependent_product_kan(f, hp).arrow
    elif method == "elementary":
        kwargs = {} if cap is None else {"cap": cap}
        pi = dependent_product_elementary(f, hp, **kwargs).structural
    else:
        raise ValueError(f"unknown method {method!r}")
    aPi, unitPi = sheafify(pi.source, J)
    api = sheafify_map(pi, J, (aPi, unitPi), (aQ, unitQ))
    return SliceObject(api, f"sheaf-{method}")


@dataclass
class SquareReport:
    """Outcome of :func:`subtopos_square_check`; ``status`` is pass, fail or precondition unmet."""

    status: str
    detail: str = ""
    witness: tuple = field(default_factory=tuple)

    @property
    def ok(self):
        return self.status == "pass"


def subtopos_square_check(f, h, J, method="kan"):
    """Π computed in sheaves is the restriction of the presheaf-level Π."""
    for name, X in (("P", f.source), ("Q", f.target), ("H", h.source)):
        rep = is_sheaf(X, J)
        if not rep.ok:
            return SquareReport("precondition unmet", f"{name} is not a sheaf", rep.first)
    sheaf = dependent_product_sheaf(f, h, J, method)
    pre = dependent_product_kan(f, h)
    rep = is_sheaf(pre.domain, J)
    if not rep.ok:
        return SquareReport("fail", "presheaf-level product is not a sheaf", rep.first)
    iso = find_iso(sheaf.domain, pre.domain, over=(sheaf.arrow, pre.arrow))
    if iso is None:
        return SquareReport("fail", "no slice isomorphism between the two products")
    return SquareReport("pass", "slice isomorphism found")
