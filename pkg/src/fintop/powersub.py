"""Subpresheaves, power objects and the quantifier operations on them.

An element of ``P(Z)(X)`` is a closed subset of ``よ(X) × Z``, stored as a
frozenset of pairs ``(g, z)`` with ``g: Y -> X`` and ``z ∈ Z(Y)``.
"""

from dataclasses import dataclass

from fintop import kernels
from fintop.errors import ResourceError, ShapeError
from fintop.fincat import ValidationReport
from fintop.presheaf import (
    NatTrans,
    Presheaf,
    equalizer,
    product,
    proj,
    pullback,
)

DEFAULT_CAP = 4096

__all__ = [
    "DEFAULT_CAP",
    "Subpresheaf",
    "PowerObject",
    "validate_subpresheaf",
    "full_sub",
    "empty_sub",
    "image_sub",
    "pullback_sub",
    "generated_sub",
    "graph_sub",
    "enumerate_subpresheaves",
    "power_object",
    "classify",
    "classified",
    "singleton_map",
    "inverse_image",
    "exists_along",
    "intersection_map",
    "forall_direct",
    "forall_via_power",
    "relative_power",
]


class Subpresheaf:
    """A restriction-closed family of subsets of ``ambient``."""

    def __init__(self, ambient, subsets):
        self.ambient = ambient
        self.subsets = {x: frozenset(subsets.get(x, ())) for x in ambient.base.objects}

    def __repr__(self):
        sizes = ", ".join(f"{x}:{len(s)}" for x, s in self.subsets.items())
        return f"Subpresheaf([{sizes}] of {self.ambient!r})"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Subpresheaf):
            return NotImplemented
        return self.subsets == other.subsets and self.ambient == other.ambient

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return tuple(self.subsets[x] for x in self.ambient.base.objects)

    def __contains__(self, xa):
        x, a = xa
        return a in self.subsets[x]

    def __le__(self, other):
        return all(self.subsets[x] <= other.subsets[x] for x in self.subsets)

    def __and__(self, other):
        return Subpresheaf(self.ambient, {x: self.subsets[x] & other.subsets[x] for x in self.subsets})

    def __or__(self, other):
        return Subpresheaf(self.ambient, {x: self.subsets[x] | other.subsets[x] for x in self.subsets})

    def size(self):
        return sum(len(s) for s in self.subsets.values())

    def as_presheaf(self):
        """The subpresheaf as a presheaf (ambient order kept) with its inclusion."""
        amb = self.ambient
        sets = {x: [a for a in amb.sets[x] if a in self.subsets[x]] for x in amb.base.objects}
        action = {
            m.id: {a: amb.action[m.id][a] for a in sets[m.cod]} for m in amb.base.morphisms
        }
        S = Presheaf(amb.base, sets, action)
        return S, NatTrans.from_function(S, amb, lambda x, a: a)


def validate_subpresheaf(S):
    rep = ValidationReport("subpresheaf")
    amb = S.ambient
    for x, sub in S.subsets.items():
        extra = sub - set(amb.sets[x])
        if extra:
            rep.fail("contained", x, sorted(map(repr, extra))[0])
    for m in amb.base.morphisms:
        for a in S.subsets[m.cod]:
            if a in amb.action[m.id] and amb.action[m.id][a] not in S.subsets[m.dom]:
                rep.fail("closed", m.id, a)
    return rep


def full_sub(P):
    return Subpresheaf(P, {x: P.sets[x] for x in P.base.objects})


def empty_sub(P):
    return Subpresheaf(P, {})


def image_sub(t):
    """Image of ``t: A -> Y`` as a subpresheaf of ``Y``."""
    return Subpresheaf(t.target, {x: set(c.values()) for x, c in t.components.items()})


def pullback_sub(g, B):
    """``g*(B)`` for ``g: X -> Y`` and ``B ≤ Y``."""
    X = g.source
    return Subpresheaf(X, {x: {a for a in X.sets[x] if g(x, a) in B.subsets[x]} for x in X.base.objects})


def generated_sub(P, x, a):
    """Smallest subpresheaf of ``P`` containing ``a ∈ P(x)``."""
    c = P.base
    subsets = {y: set() for y in c.objects}
    for g in c.arrows_into(x):
        subsets[c.dom(g)].add(P.action[g][a])
    return Subpresheaf(P, subsets)


def graph_sub(f, ambient=None):
    """Graph of ``f: Y -> X`` as a subpresheaf of ``Y × X``."""
    ambient = ambient or product(f.source, f.target)
    return Subpresheaf(ambient, {x: {(a, f(x, a)) for a in f.source.sets[x]} for x in f.source.base.objects})


def _closed_subsets(elements, succ, cap, what):
    down, up = kernels.closure_masks(len(elements), succ)
    limit = cap + 1 if cap else 0
    masks = kernels.closed_subsets(down, up, limit)
    if cap and len(masks) > cap:
        raise ResourceError(f"{what} has more than {cap} subobjects")
    return [frozenset(elements[i] for i in kernels.bits(m)) for m in masks]


def enumerate_subpresheaves(P, cap=None):
    """All subpresheaves of ``P`` (empty first) in deterministic order."""
    elements = P.elements()
    pos = {e: i for i, e in enumerate(elements)}
    succ = [[] for _ in elements]
    for m in P.base.morphisms:
        if P.base.is_identity(m.id):
            continue
        for a in P.sets[m.cod]:
            succ[pos[(m.cod, a)]].append(pos[(m.dom, P.action[m.id][a])])
    out = []
    for fs in _closed_subsets(elements, succ, cap, f"presheaf {P!r}"):
        subsets = {x: set() for x in P.base.objects}
        for x, a in fs:
            subsets[x].add(a)
        out.append(Subpresheaf(P, subsets))
    return out


@dataclass
class PowerObject:
    """``P(Z)`` with its membership relation ``∈_Z ≤ Z × P(Z)``.

    ``points[X]`` lists the pairs ``(g, z)`` making up ``よ(X) × Z``.
    """

    of: Presheaf
    carrier: Presheaf
    membership: Subpresheaf
    points: dict


def power_object(Z, cap=DEFAULT_CAP):
    c = Z.base
    points, sets = {}, {}
    for x in c.objects:
        pts = [(g, z) for y in c.objects for g in c.hom(y, x) for z in Z.sets[y]]
        points[x] = pts
        pos = {p: i for i, p in enumerate(pts)}
        succ = [[] for _ in pts]
        for i, (g, z) in enumerate(pts):
            for phi in c.arrows_into(c.dom(g)):
                if not c.is_identity(phi):
                    succ[i].append(pos[(c.compose(g, phi), Z.action[phi][z])])
        sets[x] = _closed_subsets(pts, succ, cap, f"Sub(y({x}) x {Z!r})")
    action = {}
    for m in c.morphisms:
        pts = points[m.dom]
        action[m.id] = {
            w: frozenset((g, z) for g, z in pts if (c.compose(m.id, g), z) in w) for w in sets[m.cod]
        }
    carrier = Presheaf(c, sets, action, name=f"P({Z.name or '?'})")
    amb = product(Z, carrier)
    membership = Subpresheaf(
        amb, {x: {(z, w) for z, w in amb.sets[x] if (c.identity[x], z) in w} for x in c.objects}
    )
    return PowerObject(Z, carrier, membership, points)


def _check_power(power, X):
    if power.of is not X and power.of != X:
        raise ShapeError("power object is not built on the first factor")


def classify(n, power):
    """Classifying arrow ``Y -> P(X)`` of ``n ≤ X × Y``."""
    X, Y = _product_factors(n.ambient)
    _check_power(power, X)
    c = Y.base

    def value(x, y):
        return frozenset(
            (g, a) for g, a in power.points[x] if (a, Y.action[g][y]) in n.subsets[c.dom(g)]
        )

    return NatTrans.from_function(Y, power.carrier, value)


def classified(t, power, ambient=None):
    """The subpresheaf of ``X × Y`` classified by ``t: Y -> P(X)``."""
    X = power.of
    ambient = ambient or product(X, t.source)
    ident = X.base.identity
    return Subpresheaf(
        ambient,
        {x: {(a, y) for a, y in ambient.sets[x] if (ident[x], a) in t(x, y)} for x in X.base.objects},
    )


def _product_factors(P):
    if P.factors is None:
        raise ShapeError("ambient is not a tagged binary product")
    return P.factors


def singleton_map(X, power=None, cap=DEFAULT_CAP):
    """``{·}_X: X -> P(X)``, the classifying arrow of the diagonal."""
    power = power or power_object(X, cap)
    c = X.base
    return NatTrans.from_function(
        X, power.carrier, lambda x, a: frozenset((g, X.action[g][a]) for g in c.arrows_into(x))
    )


def inverse_image(omega, PX, PY):
    """``P(ω): P(Y) -> P(X)`` for ``ω: X -> Y``."""
    c = omega.source.base
    return NatTrans.from_function(
        PY.carrier,
        PX.carrier,
        lambda x, w: frozenset((g, a) for g, a in PX.points[x] if (g, omega(c.dom(g), a)) in w),
    )


def exists_along(f, PY, PX):
    """``∃f: P(Y) -> P(X)`` for ``f: Y -> X``: direct image of subobjects."""
    c = f.source.base
    return NatTrans.from_function(
        PY.carrier, PX.carrier, lambda x, S: frozenset((g, f(c.dom(g), a)) for g, a in S)
    )


def intersection_map(PK, square=None):
    """``∩_K: P(K) × P(K) -> P(K)``."""
    square = square or product(PK.carrier, PK.carrier)
    return NatTrans.from_function(square, PK.carrier, lambda x, st: st[0] & st[1])


def forall_direct(g, A):
    """``∀_g(A)``: the largest subpresheaf ``B`` of ``Y`` with ``g*(B) ≤ A``.

    ``y`` belongs to it iff the subpresheaf generated by ``y`` pulls back into
    ``A``, i.e. for every ``φ: Z -> X`` the fiber of ``g`` over ``Y(φ)(y)``
    lies in ``A``.
    """
    X, Y = g.source, g.target
    c = Y.base
    bad = {x: {g(x, a) for a in X.sets[x] if a not in A.subsets[x]} for x in c.objects}
    out = {}
    for x in c.objects:
        arrows = c.arrows_into(x)
        out[x] = {
            y for y in Y.sets[x] if all(Y.action[phi][y] not in bad[c.dom(phi)] for phi in arrows)
        }
    return Subpresheaf(Y, out)


def forall_via_power(f, A, cap=DEFAULT_CAP):
    """``∀_f(A)`` as the pullback of ``∃i: P(A) -> P(Y)`` along the classifier of the graph of ``f``."""
    Y = f.source
    A_ps, incl = A.as_presheaf()
    PA = power_object(A_ps, cap)
    PY = power_object(Y, cap)
    ex = exists_along(incl, PA, PY)
    horizontal = classify(graph_sub(f), PY)
    _, _, to_x = pullback(ex, horizontal)
    return image_sub(to_x)


def relative_power(k, power=None, cap=DEFAULT_CAP):
    """``P_Q(k)`` for ``k: K -> Q`` as a subpresheaf of ``Q × P(K)``.

    Computed as the equalizer of the projection onto ``P(K)`` and
    ``∩_K ∘ ((P(k) ∘ {·}_Q) × 1)``.
    """
    K, Q = k.source, k.target
    PK = power or power_object(K, cap)
    QP = product(Q, PK.carrier)
    fiber = classify(graph_sub(k), PK)
    # ∩_K ∘ (fiber × 1) evaluated pointwise; P(K) × P(K) itself is never built
    right = NatTrans.from_function(QP, PK.carrier, lambda x, qs: fiber(x, qs[0]) & qs[1])
    _, incl = equalizer(proj(QP, 1), right)
    return image_sub(incl)
