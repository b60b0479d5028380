"""The power-object construction of the dependent product.

For ``f: P -> Q`` and ``h: H -> P`` the dependent product ``Π_f[h]`` is
carved out of ``Q × P(H × P)`` as

    ∀_{f×1}(S) ∩ T1 ∩ T2

where ``S`` says "``w`` is functional at ``p``", ``T1`` says "``w`` lives over
the fiber of ``q``" and ``T2`` says "``w`` lies in the graph of ``h``".

Products are nested pairs.  The regroupings used below are::

    H × P × P(H×P)       ((x, p), w)      membership ambient
    H × (P × P(H×P))     (x, (p, w))      for classifying φ
    Q × ∈_{H×P}          (q, ((x, p), w))
    Q × (H × P(H×P))     (q, (x, w))      domain of 1 × ⟨1, h⟩ × 1
"""

from dataclasses import dataclass, field
from functools import cached_property

from fintop.errors import PreconditionError, ShapeError
from fintop.powersub import (
    DEFAULT_CAP,
    Subpresheaf,
    classified,
    classify,
    exists_along,
    forall_direct,
    image_sub,
    power_object,
    relative_power,
    singleton_map,
)
from fintop.presheaf import (
    NatTrans,
    pair,
    product,
    product_map,
    pullback,
)

__all__ = [
    "SliceObject",
    "ElementaryContext",
    "DependentProductResult",
    "build_phi",
    "build_S",
    "build_tau",
    "build_W1",
    "build_W2",
    "build_T1",
    "build_T2",
    "t12_via_relative_power",
    "dependent_product_elementary",
    "transpose_to_beta",
    "transpose_to_alpha",
]


@dataclass
class SliceObject:
    """An object ``[arrow]`` of the slice over ``arrow.target``."""

    arrow: NatTrans
    base_label: str = ""

    @property
    def domain(self):
        return self.arrow.source

    @property
    def base(self):
        return self.arrow.target


class ElementaryContext:
    """The objects shared by every step of the construction for ``(f, h)``."""

    def __init__(self, f, h, cap=DEFAULT_CAP):
        if h.target is not f.source and h.target != f.source:
            raise PreconditionError("h must land in the domain of f")
        self.f, self.h, self.cap = f, h, cap
        self.P, self.Q, self.H = f.source, f.target, h.source
        self.HP = product(self.H, self.P)
        self.PHP = power_object(self.HP, cap)
        self.QPHP = product(self.Q, self.PHP.carrier)
        self.PPHP = product(self.P, self.PHP.carrier)

    @cached_property
    def PH(self):
        return power_object(self.H, self.cap)

    @cached_property
    def membership(self):
        """``∈_{H×P}`` as a presheaf with its inclusion into ``(H×P) × P(H×P)``."""
        return self.PHP.membership.as_presheaf()

    @cached_property
    def QMem(self):
        return product(self.Q, self.membership[0])

    @cached_property
    def QHPW(self):
        return product(self.Q, self.PHP.membership.ambient)

    @cached_property
    def one_e(self):
        """``1_Q × e: Q × ∈ -> Q × ((H×P) × P(H×P))``."""
        return product_map(NatTrans.identity(self.Q), self.membership[1], self.QMem, self.QHPW)


def build_phi(ctx):
    """``φ: P × P(H×P) -> P(H)``, ``(p, w) ↦ {x | (x, p) ∈ w}``, by classifying ``e``."""
    e = ctx.PHP.membership
    amb = product(ctx.H, ctx.PPHP)
    regrouped = Subpresheaf(
        amb, {x: {(hx, (p, w)) for (hx, p), w in e.subsets[x]} for x in e.subsets}
    )
    return classify(regrouped, ctx.PH)


def build_S(ctx, phi=None):
    """``S ≤ P × P(H×P)``: pullback of ``{·}_H`` along ``φ``."""
    phi = phi or build_phi(ctx)
    _, to_ppw, _ = pullback(phi, singleton_map(ctx.H, ctx.PH))
    return image_sub(to_ppw)


def build_forall_S(ctx, S=None):
    S = S or build_S(ctx)
    f1 = product_map(ctx.f, NatTrans.identity(ctx.PHP.carrier), ctx.PPHP, ctx.QPHP)
    return forall_direct(f1, S)


def build_tau(ctx):
    """``τ: Q × ∈_{H×P} -> Q × P(H×P)``: ``1 × e`` followed by dropping ``(x, p)``."""
    drop = NatTrans.from_function(ctx.QHPW, ctx.QPHP, lambda x, t: (t[0], t[1][1]))
    return ctx.one_e.then(drop)


def build_W1(ctx):
    """Quadruples ``(q, x, p, w)`` with ``(x, p) ∈ w`` and ``q = f(p)``."""
    f = ctx.f
    f_pi = NatTrans.from_function(
        ctx.PHP.membership.ambient, ctx.QHPW, lambda x, t: (f(x, t[0][1]), t)
    )
    _, to_qmem, _ = pullback(ctx.one_e, f_pi)
    return image_sub(to_qmem)


def build_W2(ctx):
    """Quadruples ``(q, x, p, w)`` with ``(x, p) ∈ w`` and ``p = h(x)``."""
    h = ctx.h
    QHW = product(ctx.Q, product(ctx.H, ctx.PHP.carrier))
    graph_h = NatTrans.from_function(
        QHW, ctx.QHPW, lambda x, t: (t[0], ((t[1][0], h(x, t[1][0])), t[1][1]))
    )
    _, to_qmem, _ = pullback(ctx.one_e, graph_h)
    return image_sub(to_qmem)


def build_T1(ctx, tau=None):
    tau = tau or build_tau(ctx)
    return forall_direct(tau, build_W1(ctx))


def build_T1_relative(ctx):
    """``T1`` as ``P_Q(f ∘ π_P)`` for ``f ∘ π_P: H × P -> Q``."""
    f = ctx.f
    k = NatTrans.from_function(ctx.HP, ctx.Q, lambda x, xp: f(x, xp[1]))
    return relative_power(k, power=ctx.PHP)


def build_T2(ctx, tau=None):
    tau = tau or build_tau(ctx)
    return forall_direct(tau, build_W2(ctx))


def t12_via_relative_power(ctx):
    """``T1 ∩ T2`` as the image of ``P_Q(f∘h)`` under ``1 × ∃⟨1, h⟩``."""
    fh = ctx.h.then(ctx.f)
    PQ = relative_power(fh, power=ctx.PH)
    graph = pair(NatTrans.identity(ctx.H), ctx.h, ctx.HP)
    ex = exists_along(graph, ctx.PH, ctx.PHP)
    return Subpresheaf(
        ctx.QPHP, {x: {(q, ex(x, S)) for q, S in PQ.subsets[x]} for x in PQ.subsets}
    )


@dataclass
class DependentProductResult:
    carrier: Subpresheaf
    presheaf: object
    structural: NatTrans
    parts: dict
    context: ElementaryContext = field(repr=False)

    def slice(self):
        return SliceObject(self.structural, "elementary")


def dependent_product_elementary(f, h, cap=DEFAULT_CAP, ctx=None):
    """``Π_f[h] = ∀_{f×1}(S) ∩ T1 ∩ T2`` with the projection onto ``Q``."""
    ctx = ctx or ElementaryContext(f, h, cap)
    tau = build_tau(ctx)
    parts = {
        "forall_S": build_forall_S(ctx),
        "T1": build_T1(ctx, tau),
        "T2": build_T2(ctx, tau),
    }
    carrier = parts["forall_S"] & parts["T1"] & parts["T2"]
    pres, _ = carrier.as_presheaf()
    pres.name = "Pi"
    structural = NatTrans.from_function(pres, ctx.Q, lambda x, qw: qw[0])
    return DependentProductResult(carrier, pres, structural, parts, ctx)


def _pullback_along_f(ctx, k):
    return pullback(ctx.f, k)


def transpose_to_beta(result, k, alpha):
    """Send ``α: f*[k] -> [h]`` to ``⟨k, β⟩: [k] -> Π_f[h]``.

    ``β`` classifies the graph of ``α`` viewed inside ``H × P × K``.
    """
    ctx = result.context
    K = k.source
    fK, to_p, _ = _pullback_along_f(ctx, k)
    if alpha.source != fK or alpha.target != ctx.H:
        raise PreconditionError("alpha must be an arrow f*(K) -> H")
    if alpha.then(ctx.h) != to_p:
        raise PreconditionError("alpha is not a slice morphism over P")
    amb = product(ctx.HP, K)
    M = Subpresheaf(
        amb, {x: {((alpha(x, (p, u)), p), u) for p, u in fK.sets[x]} for x in K.base.objects}
    )
    beta = classify(M, ctx.PHP)
    carrier = result.carrier

    def value(x, u):
        qw = (k(x, u), beta(x, u))
        if qw not in carrier.subsets[x]:
            raise ShapeError(f"<k, beta> does not factor through the carrier at {x}")
        return qw

    return NatTrans.from_function(K, result.presheaf, value)


def transpose_to_alpha(result, k, m):
    """Send ``m: [k] -> Π_f[h]`` to ``α: f*[k] -> [h]`` read off the subobject classified by ``β``."""
    ctx = result.context
    K = k.source
    for x in K.base.objects:
        for u in K.sets[x]:
            qw = m(x, u)
            if qw not in result.carrier.subsets[x]:
                raise ShapeError(f"m does not land in the carrier at {x}")
            if qw[0] != k(x, u):
                raise ShapeError(f"m is not a slice morphism over Q at {x}")
    beta = NatTrans.from_function(K, ctx.PHP.carrier, lambda x, u: m(x, u)[1])
    M = classified(beta, ctx.PHP, product(ctx.HP, K))
    fK, _, _ = _pullback_along_f(ctx, k)
    comps = {}
    for x in K.base.objects:
        by_pu = {}
        for (hx, p), u in M.subsets[x]:
            by_pu.setdefault((p, u), []).append(hx)
        comp = {}
        for pu in fK.sets[x]:
            xs = by_pu.get(pu, [])
            if len(xs) != 1:
                raise ShapeError(f"classified subobject is not a graph over {pu!r} at {x}")
            comp[pu] = xs[0]
        comps[x] = comp
    return NatTrans(fK, ctx.H, comps)
