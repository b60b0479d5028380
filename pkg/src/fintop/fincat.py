"""Finite categories, functors between them, opposites and comma categories.

Categories are stored extensionally: every morphism is listed and the
composition table is total on composable pairs.  Object and morphism ids are
strings and every iteration follows declaration order.
"""

from dataclasses import dataclass, field

__all__ = [
    "Morphism",
    "FinCategory",
    "FinFunctor",
    "CommaCategory",
    "ValidationReport",
    "validate_category",
    "validate_functor",
    "opposite",
    "build_comma",
    "terminal_category",
    "interval_category",
    "parallel_pair_category",
]


@dataclass(frozen=True)
class Morphism:
    id: str
    dom: str
    cod: str


@dataclass
class ValidationReport:
    """Outcome of an exhaustive law scan.

    ``failures`` holds every violation found as ``(law, witness)`` pairs in
    scan order; the scan never stops early.
    """

    subject: str
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    @property
    def first(self):
        return self.failures[0] if self.failures else None

    def fail(self, law, *witness):
        self.failures.append((law, tuple(witness)))

    def __bool__(self):
        return self.ok

    def summary(self):
        if self.ok:
            return f"{self.subject}: pass"
        law, witness = self.first
        return f"{self.subject}: fail ({law}, witness {witness}; {len(self.failures)} violation(s))"


class FinCategory:
    """A finite category given by explicit tables."""

    def __init__(self, objects, morphisms, identity, compose):
        self.objects = tuple(objects)
        self.morphisms = tuple(
            m if isinstance(m, Morphism) else Morphism(*m) for m in morphisms
        )
        self.identity = dict(identity)
        self.compose_table = dict(compose)
        self._mor = {m.id: m for m in self.morphisms}
        self._hom = {}
        self._into = {x: [] for x in self.objects}
        self._out = {x: [] for x in self.objects}
        for m in self.morphisms:
            self._hom.setdefault((m.dom, m.cod), []).append(m.id)
            if m.cod in self._into:
                self._into[m.cod].append(m.id)
            if m.dom in self._out:
                self._out[m.dom].append(m.id)
        self._identities = set(self.identity.values())

    @classmethod
    def from_generators(cls, objects, arrows, compose=()):
        """Build a category adding identities ``id_<object>`` automatically.

        ``arrows`` lists the non-identity morphisms as ``(id, dom, cod)``;
        ``compose`` lists ``(g, f, gf)`` for the non-identity composable pairs.
        """
        objects = list(objects)
        identity = {x: f"id_{x}" for x in objects}
        morphisms = [Morphism(identity[x], x, x) for x in objects]
        morphisms += [a if isinstance(a, Morphism) else Morphism(*a) for a in arrows]
        table = {}
        if isinstance(compose, dict):
            compose = [(g, f, gf) for (g, f), gf in compose.items()]
        for g, f, gf in compose:
            table[(g, f)] = gf
        for m in morphisms:
            table.setdefault((identity[m.cod], m.id), m.id)
            table.setdefault((m.id, identity[m.dom]), m.id)
        return cls(objects, morphisms, identity, table)

    def __repr__(self):
        return f"FinCategory({len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.morphisms == other.morphisms
            and self.identity == other.identity
            and self.compose_table == other.compose_table
        )

    __hash__ = object.__hash__

    def mor(self, m):
        return self._mor[m]

    def dom(self, m):
        return self._mor[m].dom

    def cod(self, m):
        return self._mor[m].cod

    def compose(self, g, f):
        """``g ∘ f``; raises ``KeyError`` if the pair is not composable."""
        return self.compose_table[(g, f)]

    def is_identity(self, m):
        return m in self._identities

    def hom(self, y, x):
        """Morphisms ``y -> x`` in declaration order."""
        return list(self._hom.get((y, x), ()))

    def arrows_into(self, x):
        return list(self._into[x])

    def arrows_out_of(self, y):
        return list(self._out[y])


def validate_category(c):
    """Check identity laws, composition typing and associativity exhaustively."""
    rep = ValidationReport("category")
    mors = c._mor
    for x in c.objects:
        i = c.identity.get(x)
        if i is None or i not in mors or mors[i].dom != x or mors[i].cod != x:
            rep.fail("identity-exists", x)
    for m in c.morphisms:
        if m.dom not in c._into or m.cod not in c._into:
            rep.fail("morphism-endpoints", m.id)
    for (g, f), gf in c.compose_table.items():
        if g not in mors or f not in mors or mors[f].cod != mors[g].dom:
            rep.fail("compose-domain", g, f)
            continue
        if gf not in mors or mors[gf].dom != mors[f].dom or mors[gf].cod != mors[g].cod:
            rep.fail("compose-typing", g, f)
    for f in c.morphisms:
        for g in c.morphisms:
            if f.cod == g.dom and (g.id, f.id) not in c.compose_table:
                rep.fail("compose-total", g.id, f.id)
    for f in c.morphisms:
        if f.cod in c.identity and c.compose_table.get((c.identity[f.cod], f.id)) != f.id:
            rep.fail("left-identity", c.identity[f.cod], f.id)
        if f.dom in c.identity and c.compose_table.get((f.id, c.identity[f.dom])) != f.id:
            rep.fail("right-identity", f.id, c.identity[f.dom])
    comp = c.compose_table
    for f in c.morphisms:
        for g in c._out.get(f.cod, ()):
            gf = comp.get((g, f.id))
            if gf is None:
                continue
            for h in c._out.get(c.cod(g), ()):
                hg = comp.get((h, g))
                if hg is None:
                    continue
                if comp.get((h, gf)) != comp.get((hg, f.id)):
                    rep.fail("associativity", h, g, f.id)
    return rep


def opposite(c):
    """The opposite category; morphism ids are kept, dom/cod swapped."""
    morphisms = [Morphism(m.id, m.cod, m.dom) for m in c.morphisms]
    compose = {(f, g): gf for (g, f), gf in c.compose_table.items()}
    return FinCategory(c.objects, morphisms, c.identity, compose)


class FinFunctor:
    def __init__(self, source, target, obj_map, mor_map):
        self.source = source
        self.target = target
        self.obj_map = dict(obj_map)
        self.mor_map = dict(mor_map)

    def obj(self, x):
        return self.obj_map[x]

    def mor(self, m):
        return self.mor_map[m]

    def op(self):
        return FinFunctor(opposite(self.source), opposite(self.target), self.obj_map, self.mor_map)

    def then(self, other):
        """``other ∘ self``."""
        return FinFunctor(
            self.source,
            other.target,
            {x: other.obj(y) for x, y in self.obj_map.items()},
            {m: other.mor(n) for m, n in self.mor_map.items()},
        )

    @classmethod
    def identity(cls, c):
        return cls(c, c, {x: x for x in c.objects}, {m.id: m.id for m in c.morphisms})

    def __eq__(self, other):
        if not isinstance(other, FinFunctor):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.obj_map == other.obj_map
            and self.mor_map == other.mor_map
        )

    __hash__ = object.__hash__


def validate_functor(F):
    rep = ValidationReport("functor")
    s, t = F.source, F.target
    for x in s.objects:
        if F.obj_map.get(x) not in t._into:
            rep.fail("object-map", x)
    for m in s.morphisms:
        n = F.mor_map.get(m.id)
        if n is None or n not in t._mor:
            rep.fail("morphism-map", m.id)
            continue
        if t.dom(n) != F.obj_map.get(m.dom) or t.cod(n) != F.obj_map.get(m.cod):
            rep.fail("preserves-endpoints", m.id)
    if not rep.ok:
        return rep
    for x in s.objects:
        if F.mor(s.identity[x]) != t.identity[F.obj(x)]:
            rep.fail("preserves-identity", x)
    for (g, f), gf in s.compose_table.items():
        if t.compose(F.mor(g), F.mor(f)) != F.mor(gf):
            rep.fail("preserves-composition", g, f)
    return rep


@dataclass
class CommaCategory:
    """The comma category ``d ↓ F`` with its projection to ``F.source``.

    ``labels`` maps node ids to ``(arrow d -> F(A), A)``; ``edge_labels`` maps
    morphism ids to the underlying morphism of ``F.source``.
    """

    base: FinCategory
    projection: FinFunctor
    labels: dict
    edge_labels: dict


def _node_id(g, a):
    return f"({g},{a})"


def build_comma(d, F):
    src, tgt = F.source, F.target
    labels = {}
    nodes = []
    for a in src.objects:
        for g in tgt.hom(d, F.obj(a)):
            n = _node_id(g, a)
            labels[n] = (g, a)
            nodes.append(n)
    node_of = {lab: n for n, lab in labels.items()}

    def edge_name(gamma, n):
        return f"id_{n}" if src.is_identity(gamma) else f"{gamma}@{n}"

    morphisms = []
    edge_labels = {}
    out = {}
    for n in nodes:
        g, a = labels[n]
        for gamma in src.arrows_out_of(a):
            target = node_of[(tgt.compose(F.mor(gamma), g), src.cod(gamma))]
            e = edge_name(gamma, n)
            morphisms.append(Morphism(e, n, target))
            edge_labels[e] = gamma
            out.setdefault(n, []).append((gamma, e, target))
    compose = {}
    for n in nodes:
        for gamma, e, mid in out.get(n, ()):
            for gamma2, e2, _ in out.get(mid, ()):
                compose[(e2, e)] = edge_name(src.compose(gamma2, gamma), n)
    identity = {n: f"id_{n}" for n in nodes}
    base = FinCategory(nodes, morphisms, identity, compose)
    proj = FinFunctor(base, src, {n: labels[n][1] for n in nodes}, edge_labels)
    return CommaCategory(base, proj, labels, edge_labels)


def terminal_category(obj="*"):
    return FinCategory.from_generators([obj], [])


def interval_category():
    """``0 --u--> 1``."""
    return FinCategory.from_generators(["0", "1"], [("u", "0", "1")])


def parallel_pair_category():
    """Two arrows ``s, t: V -> E``; presheaves on it are directed multigraphs."""
    return FinCategory.from_generators(["V", "E"], [("s", "V", "E"), ("t", "V", "E")])
