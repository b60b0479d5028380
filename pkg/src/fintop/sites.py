"""The site-theoretic construction of the dependent product.

Slices over ``P`` are presheaves on the category of elements ``∫P``
(``r_functor`` / ``l_functor``), and ``Π_f`` becomes the right Kan extension
along ``(∫f)^op``, computed pointwise as a limit over a comma category.

An element of ``Π_f[h](X)`` is a pair ``(q, family)`` where ``family`` is a
sorted tuple of ``((g, p), x)`` entries: one ``x ∈ h_Y⁻¹(p)`` for each
``g: Y -> X`` and ``p ∈ P(Y)`` with ``f_Y(p) = Q(g)(q)``.
"""

from fintop._canon import canon
from fintop.elementary import SliceObject
from fintop.errors import PreconditionError, ShapeError
from fintop.fincat import build_comma
from fintop.presheaf import (
    NatTrans,
    Presheaf,
    SetDiagram,
    elements_category,
    elements_functor,
    limit_of_sets,
    pullback,
)

__all__ = [
    "r_functor",
    "l_functor",
    "ran_along_elements",
    "dependent_product_kan",
    "family_key",
    "kan_transpose_to_family",
    "kan_transpose_to_alpha",
]


def r_functor(P, h, EP=None):
    """``R_P[h](X, p) = h_X⁻¹(p)`` as a presheaf on ``∫P``."""
    if h.target != P:
        raise PreconditionError("h is not an object of the slice over P")
    EP = EP or elements_category(P)
    H = h.source
    sets = {n: [x for x in H.sets[X] if h(X, x) == p] for n, (X, p) in EP.labels.items()}
    action = {}
    for aid, (g, p) in EP.arrow_labels.items():
        X = P.base.cod(g)
        action[aid] = {x: H.action[g][x] for x in sets[EP.node_of[(X, p)]]}
    return Presheaf(EP.cat, sets, action, name="R[h]")


def l_functor(P, W, EP=None):
    """``L_P(W)(X) = ⨆_{p ∈ P(X)} W(X, p)`` with the projection onto the tag."""
    EP = EP or elements_category(P)
    c = P.base
    sets = {X: [(p, w) for p in P.sets[X] for w in W.sets[EP.node_of[(X, p)]]] for X in c.objects}
    action = {}
    for m in c.morphisms:
        act = {}
        for p, w in sets[m.cod]:
            act[(p, w)] = (P.action[m.id][p], W.action[EP.arrow_of[(m.id, p)]][w])
        action[m.id] = act
    L = Presheaf(c, sets, action)
    return SliceObject(NatTrans.from_function(L, P, lambda x, pw: pw[0]))


def family_key(entries):
    """Canonical tuple for a family given as ``{(g, p): x}`` or pairs."""
    items = entries.items() if isinstance(entries, dict) else entries
    return tuple(sorted(items, key=lambda e: (e[0][0], canon(e[0][1]))))


def ran_along_elements(f, V, EP=None, EQ=None):
    """``Ran_{(∫f)^op} V`` for a presheaf ``V`` on ``∫P``, as a presheaf on ``∫Q``."""
    P, Q = f.source, f.target
    c = P.base
    EP = EP or elements_category(P)
    EQ = EQ or elements_category(Q)
    Fop = elements_functor(f, EP, EQ).op()
    sets = {}
    lookup = {}
    for n, (X, q) in EQ.labels.items():
        comma = build_comma(n, Fop)
        keys = {}
        dsets = {}
        for node, (garrow, A) in comma.labels.items():
            g, _ = EQ.arrow_labels[garrow]
            keys[node] = (g, EP.labels[A][1])
            dsets[node] = V.sets[A]
        maps = {e: V.action[gamma] for e, gamma in comma.edge_labels.items()}
        fams = limit_of_sets(SetDiagram(comma.base, dsets, maps))
        order = comma.base.objects
        vals = []
        for fam in fams:
            vals.append(family_key([(keys[node], x) for node, x in zip(order, fam)]))
        sets[n] = vals
        lookup[n] = {v: dict(v) for v in vals}
    action = {}
    for aid, (phi, q) in EQ.arrow_labels.items():
        X = c.cod(phi)
        n = EQ.node_of[(X, q)]
        q2 = Q.action[phi][q]
        act = {}
        for fam in sets[n]:
            entries = lookup[n][fam]
            act[fam] = family_key(
                [((g2, p), entries[(c.compose(phi, g2), p)]) for g2, p in _nodes_of(P, Q, f, c.dom(phi), q2)]
            )
        action[aid] = act
    return Presheaf(EQ.cat, sets, action, name="Ran")


def _nodes_of(P, Q, f, X, q):
    """Index pairs ``(g, p)`` of the limit at ``(X, q)``."""
    c = P.base
    out = []
    for Y in c.objects:
        for g in c.hom(Y, X):
            target = Q.action[g][q]
            for p in P.sets[Y]:
                if f(Y, p) == target:
                    out.append((g, p))
    return out


def dependent_product_kan(f, h):
    """``Π_f[h] = L_Q ∘ Ran_{(∫f)^op} ∘ R_P``, as a slice object over ``Q``."""
    P, Q = f.source, f.target
    EP, EQ = elements_category(P), elements_category(Q)
    ran = ran_along_elements(f, r_functor(P, h, EP), EP, EQ)
    out = l_functor(Q, ran, EQ)
    out.base_label = "kan"
    out.arrow.source.name = "Pi"
    return out


def kan_transpose_to_family(f, h, pi, k, alpha):
    """``α: f*[k] -> [h]`` to ``[k] -> Π_f[h]``, ``u ↦ (k(u), (α(p, K(g)u))_{g,p})``."""
    P, Q = f.source, f.target
    K = k.source
    fK, to_p, _ = pullback(f, k)
    if alpha.source != fK or alpha.then(h) != to_p:
        raise PreconditionError("alpha is not a slice morphism f*[k] -> [h]")
    target = pi.domain

    def value(X, u):
        q = k(X, u)
        fam = family_key(
            [((g, p), alpha(P.base.dom(g), (p, K.action[g][u]))) for g, p in _nodes_of(P, Q, f, X, q)]
        )
        return (q, fam)

    t = NatTrans.from_function(K, target, value)
    for X in K.base.objects:
        carrier = set(target.sets[X])
        for u in K.sets[X]:
            if t(X, u) not in carrier:
                raise ShapeError(f"family for {u!r} at {X} is not in the carrier")
    return t


def kan_transpose_to_alpha(f, h, pi, k, m):
    """Inverse of :func:`kan_transpose_to_family`: ``α(p, u) = family(u)[(id, p)]``."""
    c = f.source.base
    fK, _, _ = pullback(f, k)
    comps = {}
    for X in c.objects:
        ident = c.identity[X]
        comp = {}
        for p, u in fK.sets[X]:
            q, fam = m(X, u)
            if q != k(X, u):
                raise ShapeError(f"m is not a slice morphism over Q at {X}")
            comp[(p, u)] = dict(fam)[(ident, p)]
        comps[X] = comp
    return NatTrans(fK, h.source, comps)
