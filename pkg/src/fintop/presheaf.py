"""Presheaves of finite sets, natural transformations and pointwise limits.

A presheaf assigns an ordered tuple of hashable elements to each object and,
to each morphism ``g: Y -> X``, a dict sending elements of ``P(X)`` to
elements of ``P(Y)``.  Product and pullback elements are tuples ``(a, b)``.
"""

import itertools
from dataclasses import dataclass

from fintop import kernels
from fintop._canon import canon
from fintop.errors import ShapeError
from fintop.fincat import FinCategory, FinFunctor, ValidationReport

__all__ = [
    "Presheaf",
    "NatTrans",
    "ElementsCategory",
    "SetDiagram",
    "validate_presheaf",
    "validate_nat_trans",
    "yoneda",
    "yoneda_element",
    "terminal_presheaf",
    "empty_presheaf",
    "product",
    "proj",
    "pair",
    "product_map",
    "pullback",
    "equalizer",
    "limit_of_sets",
    "elements_category",
    "elements_functor",
    "enumerate_nat_trans",
    "slice_homs",
    "find_iso",
    "terminal_map",
]


class Presheaf:
    def __init__(self, base, sets, action, factors=None, name=None):
        self.base = base
        self.sets = {x: tuple(sets[x]) for x in base.objects}
        self.action = {}
        for m in base.morphisms:
            if m.id in action:
                self.action[m.id] = dict(action[m.id])
            elif base.is_identity(m.id):
                self.action[m.id] = {a: a for a in self.sets[m.cod]}
            else:
                raise ShapeError(f"no action given for morphism {m.id}")
        self.factors = factors
        self.name = name
        self._index = None

    def __repr__(self):
        sizes = ", ".join(f"{x}:{len(s)}" for x, s in self.sets.items())
        return f"Presheaf({self.name or ''}[{sizes}])"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Presheaf):
            return NotImplemented
        return self.base == other.base and self.sets == other.sets and self.action == other.action

    __hash__ = object.__hash__

    def restrict(self, m, a):
        return self.action[m][a]

    def index(self, x):
        """Map from elements of ``P(x)`` to their positions."""
        if self._index is None:
            self._index = {y: {a: i for i, a in enumerate(s)} for y, s in self.sets.items()}
        return self._index[x]

    def elements(self):
        """All ``(object, element)`` pairs in canonical order."""
        return [(x, a) for x in self.base.objects for a in self.sets[x]]

    def total_size(self):
        return sum(len(s) for s in self.sets.values())

    def is_empty(self):
        return all(not s for s in self.sets.values())


class NatTrans:
    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        self.components = {x: dict(components[x]) for x in source.base.objects}

    def __call__(self, x, a):
        return self.components[x][a]

    def __repr__(self):
        return f"NatTrans({self.source!r} -> {self.target!r})"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, NatTrans):
            return NotImplemented
        return (
            self.components == other.components
            and self.source == other.source
            and self.target == other.target
        )

    __hash__ = object.__hash__

    @classmethod
    def from_function(cls, source, target, fn):
        return cls(source, target, {x: {a: fn(x, a) for a in source.sets[x]} for x in source.base.objects})

    @classmethod
    def identity(cls, P):
        return cls(P, P, {x: {a: a for a in P.sets[x]} for x in P.base.objects})

    def then(self, other):
        """``other ∘ self``."""
        return NatTrans(
            self.source,
            other.target,
            {x: {a: other.components[x][b] for a, b in comp.items()} for x, comp in self.components.items()},
        )

    def is_mono(self):
        return all(len(set(c.values())) == len(c) for c in self.components.values())

    def is_iso(self):
        return self.is_mono() and all(
            len(self.components[x]) == len(self.target.sets[x]) for x in self.components
        )

    def image_sets(self):
        return {x: set(c.values()) for x, c in self.components.items()}

    def key(self):
        """Canonical hashable summary of the components."""
        return tuple(
            tuple(self.components[x][a] for a in self.source.sets[x]) for x in self.source.base.objects
        )


def validate_presheaf(P):
    rep = ValidationReport("presheaf")
    c = P.base
    for x in c.objects:
        if len(set(P.sets[x])) != len(P.sets[x]):
            rep.fail("distinct-elements", x)
    for m in c.morphisms:
        act = P.action[m.id]
        dom_set = set(P.sets[m.dom])
        if set(act) != set(P.sets[m.cod]):
            rep.fail("action-total", m.id)
            continue
        for a, b in act.items():
            if b not in dom_set:
                rep.fail("action-typed", m.id, a)
    if not rep.ok:
        return rep
    for x in c.objects:
        i = c.identity[x]
        for a in P.sets[x]:
            if P.action[i][a] != a:
                rep.fail("identity", i, a)
    for (g, f), gf in c.compose_table.items():
        for a in P.sets[c.cod(g)]:
            if P.action[gf][a] != P.action[f][P.action[g][a]]:
                rep.fail("functoriality", g, f, a)
    return rep


def validate_nat_trans(t):
    """Check typing and every naturality square; witnesses are ``(morphism, element)``."""
    rep = ValidationReport("nat_trans")
    P, Q = t.source, t.target
    if P.base != Q.base:
        rep.fail("same-base")
        return rep
    for x in P.base.objects:
        comp = t.components.get(x, {})
        qs = set(Q.sets[x])
        for a in P.sets[x]:
            if a not in comp or comp[a] not in qs:
                rep.fail("component-typed", x, a)
    if not rep.ok:
        return rep
    for m in P.base.morphisms:
        for a in P.sets[m.cod]:
            if t(m.dom, P.action[m.id][a]) != Q.action[m.id][t(m.cod, a)]:
                rep.fail("naturality", m.id, a)
    return rep


def yoneda(c, x):
    """The representable presheaf ``よ(x)``: arrows into ``x``, acted on by precomposition."""
    sets = {y: c.hom(y, x) for y in c.objects}
    action = {m.id: {a: c.compose(a, m.id) for a in sets[m.cod]} for m in c.morphisms}
    return Presheaf(c, sets, action, name=f"y({x})")


def yoneda_element(c, x, P, a):
    """The transformation ``よ(x) -> P`` corresponding to ``a ∈ P(x)``."""
    Y = yoneda(c, x)
    return NatTrans.from_function(Y, P, lambda y, g: P.action[g][a])


def terminal_presheaf(c):
    return Presheaf(
        c, {x: ("*",) for x in c.objects}, {m.id: {"*": "*"} for m in c.morphisms}, name="1"
    )


def empty_presheaf(c):
    return Presheaf(c, {x: () for x in c.objects}, {m.id: {} for m in c.morphisms}, name="0")


def terminal_map(P, one=None):
    one = one or terminal_presheaf(P.base)
    return NatTrans.from_function(P, one, lambda x, a: "*")


def product(P, Q):
    """Binary product with elements ``(a, b)``; records its factors."""
    if P.base != Q.base:
        raise ShapeError("product of presheaves on different bases")
    sets = {x: list(itertools.product(P.sets[x], Q.sets[x])) for x in P.base.objects}
    action = {
        m.id: {(a, b): (P.action[m.id][a], Q.action[m.id][b]) for a, b in sets[m.cod]}
        for m in P.base.morphisms
    }
    return Presheaf(P.base, sets, action, factors=(P, Q))


def _factors(prod):
    if prod.factors is None:
        raise ShapeError("presheaf is not a tagged binary product")
    return prod.factors


def proj(prod, i):
    """The ``i``-th projection (0 or 1) of a product built by :func:`product`."""
    target = _factors(prod)[i]
    return NatTrans.from_function(prod, target, lambda x, ab: ab[i])


def pair(f, g, prod=None):
    """``⟨f, g⟩: Z -> A × B``."""
    prod = prod or product(f.target, g.target)
    return NatTrans.from_function(f.source, prod, lambda x, z: (f(x, z), g(x, z)))


def product_map(f, g, source=None, target=None):
    """``f × g: A × B -> C × D``."""
    source = source or product(f.source, g.source)
    target = target or product(f.target, g.target)
    return NatTrans.from_function(source, target, lambda x, ab: (f(x, ab[0]), g(x, ab[1])))


def pullback(f, g):
    """Pullback of ``f: A -> Z`` and ``g: B -> Z`` with its two projections."""
    A, B = f.source, g.source
    sets = {}
    for x in A.base.objects:
        over = {}
        gx = g.components[x]
        for b in B.sets[x]:
            over.setdefault(gx[b], []).append(b)
        fx = f.components[x]
        sets[x] = [(a, b) for a in A.sets[x] for b in over.get(fx[a], ())]
    action = {
        m.id: {(a, b): (A.action[m.id][a], B.action[m.id][b]) for a, b in sets[m.cod]}
        for m in A.base.morphisms
    }
    pb = Presheaf(A.base, sets, action)
    p1 = NatTrans.from_function(pb, A, lambda x, ab: ab[0])
    p2 = NatTrans.from_function(pb, B, lambda x, ab: ab[1])
    return pb, p1, p2


def equalizer(f, g):
    """Equalizer of parallel ``f, g: A -> B`` with its inclusion."""
    A = f.source
    sets = {x: [a for a in A.sets[x] if f(x, a) == g(x, a)] for x in A.base.objects}
    action = {m.id: {a: A.action[m.id][a] for a in sets[m.cod]} for m in A.base.morphisms}
    E = Presheaf(A.base, sets, action)
    return E, NatTrans.from_function(E, A, lambda x, a: a)


@dataclass
class SetDiagram:
    """A covariant functor from ``shape`` into finite sets."""

    shape: FinCategory
    sets: dict
    maps: dict


def limit_of_sets(diagram, limit=0):
    """Compatible families of a finite diagram of sets.

    Each family is a tuple with one element per object of ``diagram.shape``
    (in object order) such that every map of the diagram sends the entry at
    its domain to the entry at its codomain.
    """
    shape = diagram.shape
    nodes = list(shape.objects)
    pos = {n: i for i, n in enumerate(nodes)}
    sets = [list(diagram.sets[n]) for n in nodes]
    idx = [{a: i for i, a in enumerate(s)} for s in sets]
    edges = []
    for m in shape.morphisms:
        if shape.is_identity(m.id):
            continue
        i, j = pos[m.dom], pos[m.cod]
        fn = diagram.maps[m.id]
        edges.append((i, j, [idx[j][fn[a]] for a in sets[i]]))
    sols = kernels.solve_functional([len(s) for s in sets], None, edges, None, limit)
    return [tuple(sets[i][v] for i, v in enumerate(sol)) for sol in sols]


@dataclass
class ElementsCategory:
    """The category of elements ``∫P`` with its projection to the base.

    ``labels`` maps node ids to ``(object, element)``; ``arrow_labels`` maps
    arrow ids to ``(base arrow g: Y -> X, element of P(X))``, i.e. the arrow
    ``(Y, P(g)(x)) -> (X, x)``.
    """

    cat: FinCategory
    proj: FinFunctor
    labels: dict
    node_of: dict
    arrow_labels: dict
    arrow_of: dict
    presheaf: "Presheaf"


def elements_category(P):
    c = P.base
    labels, node_of = {}, {}
    for x in c.objects:
        for a in P.sets[x]:
            n = f"({x},{canon(a)})"
            labels[n] = (x, a)
            node_of[(x, a)] = n
    morphisms, arrow_labels, arrow_of = [], {}, {}
    for m in c.morphisms:
        for a in P.sets[m.cod]:
            aid = f"{m.id}:{canon(a)}"
            src = node_of[(m.dom, P.action[m.id][a])]
            morphisms.append((aid, src, node_of[(m.cod, a)]))
            arrow_labels[aid] = (m.id, a)
            arrow_of[(m.id, a)] = aid
    compose = {}
    for (g, f), gf in c.compose_table.items():
        for z in P.sets[c.cod(g)]:
            x = P.action[g][z]
            compose[(arrow_of[(g, z)], arrow_of[(f, x)])] = arrow_of[(gf, z)]
    identity = {n: arrow_of[(c.identity[x], a)] for n, (x, a) in labels.items()}
    cat = FinCategory(list(labels), morphisms, identity, compose)
    projection = FinFunctor(
        cat, c, {n: x for n, (x, _) in labels.items()}, {aid: g for aid, (g, _) in arrow_labels.items()}
    )
    return ElementsCategory(cat, projection, labels, node_of, arrow_labels, arrow_of, P)


def elements_functor(f, EP=None, EQ=None):
    """``∫f: ∫P -> ∫Q``, ``(X, p) ↦ (X, f_X(p))`` and identity on base arrows."""
    EP = EP or elements_category(f.source)
    EQ = EQ or elements_category(f.target)
    obj_map = {n: EQ.node_of[(x, f(x, a))] for n, (x, a) in EP.labels.items()}
    mor_map = {
        aid: EQ.arrow_of[(g, f(f.source.base.cod(g), a))] for aid, (g, a) in EP.arrow_labels.items()
    }
    return FinFunctor(EP.cat, EQ.cat, obj_map, mor_map)


def _hom_problem(P, Q):
    variables = P.elements()
    pos = {v: i for i, v in enumerate(variables)}
    edges = []
    for m in P.base.morphisms:
        if P.base.is_identity(m.id):
            continue
        qi = Q.index(m.dom)
        table = [qi[Q.action[m.id][b]] for b in Q.sets[m.cod]]
        for a in P.sets[m.cod]:
            edges.append((pos[(m.cod, a)], pos[(m.dom, P.action[m.id][a])], table))
    sizes = [len(Q.sets[x]) for x, _ in variables]
    return variables, sizes, edges


def enumerate_nat_trans(P, Q, over=None, injective=False, limit=0):
    """All natural transformations ``P -> Q`` in deterministic order.

    ``over=(p, q)`` with ``p: P -> B`` and ``q: Q -> B`` restricts to slice
    morphisms (``q ∘ t = p``).  ``injective`` restricts to componentwise
    injective ones.
    """
    if P.base != Q.base:
        raise ShapeError("transformations between presheaves on different bases")
    variables, sizes, edges = _hom_problem(P, Q)
    candidates = None
    if over is not None:
        p, q = over
        candidates = [
            [j for j, b in enumerate(Q.sets[x]) if q(x, b) == p(x, a)] for x, a in variables
        ]
    groups = None
    if injective:
        gid = {x: i for i, x in enumerate(P.base.objects)}
        groups = [gid[x] for x, _ in variables]
    sols = kernels.solve_functional(sizes, candidates, edges, groups, limit)
    out = []
    for sol in sols:
        comps = {x: {} for x in P.base.objects}
        for (x, a), j in zip(variables, sol):
            comps[x][a] = Q.sets[x][j]
        out.append(NatTrans(P, Q, comps))
    return out


def slice_homs(a, b, limit=0):
    """Morphisms ``[a] -> [b]`` in the slice over the common codomain."""
    return enumerate_nat_trans(a.source, b.source, over=(a, b), limit=limit)


def find_iso(P, Q, over=None):
    """First invertible transformation ``P -> Q`` (over a base if given), or ``None``."""
    if P.base != Q.base:
        return None
    if any(len(P.sets[x]) != len(Q.sets[x]) for x in P.base.objects):
        return None
    found = enumerate_nat_trans(P, Q, over=over, injective=True, limit=1)
    return found[0] if found else None
