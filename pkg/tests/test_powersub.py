import pytest
from hypothesis import given, settings

from conftest import fixture
from strategies import arrows, presheaves

from fintop.errors import ResourceError, ShapeError
from fintop.harness.expected import count_subpresheaves_direct
from fintop.harness.oracles import forall_by_sweep
from fintop.powersub import (
    Subpresheaf,
    classified,
    classify,
    empty_sub,
    enumerate_subpresheaves,
    exists_along,
    forall_direct,
    forall_via_power,
    full_sub,
    generated_sub,
    graph_sub,
    image_sub,
    intersection_map,
    inverse_image,
    power_object,
    pullback_sub,
    relative_power,
    singleton_map,
    validate_subpresheaf,
)
from fintop.presheaf import NatTrans, product, validate_nat_trans, validate_presheaf


@given(presheaves("graph", max_size=2))
@settings(max_examples=40, deadline=None)
def test_subpresheaf_count_matches_brute_force(P):
    subs = enumerate_subpresheaves(P)
    assert len(subs) == count_subpresheaves_direct(P)
    assert subs[0] == empty_sub(P)
    assert full_sub(P) in subs
    assert all(validate_subpresheaf(s).ok for s in subs)


def test_set_case_power_object_is_power_set():
    fx = fixture("A")
    H = fx.h.source
    PH = power_object(H)
    assert len(PH.carrier.sets["*"]) == 2 ** 5
    assert validate_presheaf(PH.carrier).ok
    assert validate_subpresheaf(PH.membership).ok


@pytest.mark.parametrize("name", "BCD")
def test_power_object_fibres_are_subobjects_of_representables(name):
    fx = fixture(name)
    P = fx.f.source
    PP = power_object(P)
    c = P.base
    assert validate_presheaf(PP.carrier).ok
    from fintop.presheaf import yoneda

    for x in c.objects:
        assert len(PP.carrier.sets[x]) == count_subpresheaves_direct(product(yoneda(c, x), P))


def test_power_object_cap_is_a_resource_error():
    fx = fixture("A")
    with pytest.raises(ResourceError):
        power_object(fx.h.source, cap=31)
    assert len(power_object(fx.h.source, cap=32).carrier.sets["*"]) == 32


@pytest.mark.parametrize("name", "ABD")
def test_classify_round_trip(name):
    fx = fixture(name)
    X, Y = fx.f.target, fx.f.source
    PX = power_object(X)
    amb = product(X, Y)
    for n in enumerate_subpresheaves(amb):
        chi = classify(n, PX)
        assert validate_nat_trans(chi).ok
        assert classified(chi, PX, amb) == n


def test_classify_needs_a_tagged_product():
    fx = fixture("A")
    P = fx.f.source
    with pytest.raises(ShapeError):
        classify(full_sub(P), power_object(P))


def test_singleton_map_is_mono_and_classifies_diagonal():
    fx = fixture("C")
    P = fx.f.source
    PP = power_object(P)
    s = singleton_map(P, PP)
    assert s.is_mono() and validate_nat_trans(s).ok
    diag = graph_sub(NatTrans.identity(P))
    assert classify(diag, PP) == s


@given(arrows("interval"))
@settings(max_examples=30, deadline=None)
def test_forall_is_right_adjoint_to_pullback(g):
    X, Y = g.source, g.target
    subs_x = enumerate_subpresheaves(X)
    subs_y = enumerate_subpresheaves(Y)
    for A in subs_x[:12]:
        fa = forall_direct(g, A)
        assert validate_subpresheaf(fa).ok
        assert fa == forall_by_sweep(g, A)
        for B in subs_y:
            assert (B <= fa) == (pullback_sub(g, B) <= A)


@given(arrows("interval", max_size=2))
@settings(max_examples=15, deadline=None)
def test_forall_via_power_objects(g):
    for A in enumerate_subpresheaves(g.source)[:6]:
        assert forall_via_power(g, A) == forall_direct(g, A)


def test_exists_and_inverse_image():
    fx = fixture("B")
    f = fx.f
    P, Q = f.source, f.target
    PP, PQ = power_object(P), power_object(Q)
    ex = exists_along(f, PP, PQ)
    inv = inverse_image(f, PP, PQ)
    assert validate_nat_trans(ex).ok and validate_nat_trans(inv).ok
    # ∃f ⊣ f⁻¹ pointwise: ∃f(S) ⊆ T iff S ⊆ f⁻¹(T)
    for x in P.base.objects:
        for S in PP.carrier.sets[x]:
            for T in PQ.carrier.sets[x]:
                assert (ex(x, S) <= T) == (S <= inv(x, T))


def test_image_and_generated():
    fx = fixture("C")
    h = fx.h
    img = image_sub(h)
    assert validate_subpresheaf(img).ok
    for x, a in h.source.elements():
        g = generated_sub(h.source, x, a)
        assert validate_subpresheaf(g).ok
        assert a in g.subsets[x]


def test_intersection_map():
    fx = fixture("A")
    PP = power_object(fx.f.source)
    cap = intersection_map(PP)
    assert validate_nat_trans(cap).ok


@pytest.mark.parametrize("name", "ABC")
def test_relative_power_fibres(name):
    fx = fixture(name)
    k = fx.h.then(fx.f)
    PK = power_object(k.source)
    rel = relative_power(k, PK)
    for x, pairs in rel.subsets.items():
        for q, w in pairs:
            # every point of w lives over the restriction of q
            assert all(k(k.source.base.dom(g), z) == fx.f.target.action[g][q] for g, z in w)
        expected = {
            (q, w)
            for q in fx.f.target.sets[x]
            for w in PK.carrier.sets[x]
            if all(k(k.source.base.dom(g), z) == fx.f.target.action[g][q] for g, z in w)
        }
        assert set(pairs) == expected


def test_subpresheaf_lattice_ops():
    fx = fixture("B")
    P = fx.f.source
    subs = enumerate_subpresheaves(P)
    for a in subs:
        for b in subs:
            assert validate_subpresheaf(a & b).ok and validate_subpresheaf(a | b).ok
            assert (a & b) <= a <= (a | b)
    S, incl = subs[-1].as_presheaf()
    assert validate_presheaf(S).ok and incl.is_mono()
    assert isinstance(subs[0], Subpresheaf) and subs[0].size() == 0
