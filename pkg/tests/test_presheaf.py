import pytest
from hypothesis import given, settings

from conftest import fixture
from strategies import arrows, presheaves

from fintop.fincat import FinCategory, interval_category, parallel_pair_category, terminal_category
from fintop.presheaf import (
    NatTrans,
    Presheaf,
    SetDiagram,
    elements_category,
    elements_functor,
    empty_presheaf,
    enumerate_nat_trans,
    equalizer,
    find_iso,
    limit_of_sets,
    pair,
    product,
    proj,
    pullback,
    slice_homs,
    terminal_map,
    terminal_presheaf,
    validate_nat_trans,
    validate_presheaf,
    yoneda,
    yoneda_element,
)
from fintop.fincat import validate_category, validate_functor


def test_fixture_presheaves_validate():
    for name in "ABCD":
        fx = fixture(name)
        for P in fx.presheaves.values():
            assert validate_presheaf(P).ok
        for t in fx.arrows.values():
            assert validate_nat_trans(t).ok


def test_validation_witnesses():
    g = parallel_pair_category()
    P = Presheaf(g, {"V": ["v"], "E": ["e"]}, {"s": {"e": "v"}, "t": {"e": "w"}})
    assert validate_presheaf(P).first == ("action-typed", ("t", "e"))
    # the idempotent monoid x∘x = x; swapping two points is not a valid action
    idem = FinCategory.from_generators(["*"], [("x", "*", "*")], [("x", "x", "x")])
    assert validate_category(idem).ok
    swap = Presheaf(idem, {"*": ["a", "b"]}, {"x": {"a": "b", "b": "a"}})
    assert validate_presheaf(swap).first == ("functoriality", ("x", "x", "a"))
    assert validate_presheaf(terminal_presheaf(interval_category())).ok


def test_naturality_witness():
    fx = fixture("B")
    f = fx.f
    comps = {x: dict(c) for x, c in f.components.items()}
    comps["0"] = {a: "r0" for a in comps["0"]}
    law, witness = validate_nat_trans(NatTrans(f.source, f.target, comps)).first
    assert law == "naturality"
    assert witness[0] == "u"


@pytest.mark.parametrize("name", "ABC")
def test_yoneda_lemma_counts(name):
    fx = fixture(name)
    c = fx.f.source.base
    for P in fx.presheaves.values():
        for x in c.objects:
            homs = enumerate_nat_trans(yoneda(c, x), P)
            assert len(homs) == len(P.sets[x])
            assert [t(x, c.identity[x]) for t in homs] == list(P.sets[x]) or sorted(
                t(x, c.identity[x]) for t in homs
            ) == sorted(P.sets[x])
            for a in P.sets[x]:
                assert validate_nat_trans(yoneda_element(c, x, P, a)).ok


def test_pullback_sizes_on_set_fixture():
    fx = fixture("A")
    hh, _, _ = pullback(fx.h, fx.h)
    assert len(hh.sets["*"]) == 2 * 2 + 3 * 3
    ff, _, _ = pullback(fx.f, fx.f)
    assert len(ff.sets["*"]) == 4


@given(arrows("interval"), arrows("interval"))
@settings(max_examples=40, deadline=None)
def test_pullback_is_a_pullback(f, g):
    if f.target != g.target:
        return
    pb, p1, p2 = pullback(f, g)
    assert validate_presheaf(pb).ok
    assert p1.then(f) == p2.then(g)
    for x in pb.base.objects:
        expected = sum(1 for a in f.source.sets[x] for b in g.source.sets[x] if f(x, a) == g(x, b))
        assert len(pb.sets[x]) == expected


@given(presheaves("graph"), presheaves("graph", prefix="z"))
@settings(max_examples=40, deadline=None)
def test_product_projections_and_pairing(P, Q):
    PQ = product(P, Q)
    assert validate_presheaf(PQ).ok
    p0, p1 = proj(PQ, 0), proj(PQ, 1)
    assert pair(p0, p1, PQ) == NatTrans.identity(PQ)
    for x in P.base.objects:
        assert len(PQ.sets[x]) == len(P.sets[x]) * len(Q.sets[x])


def test_equalizer_of_parallel_arrows():
    fx = fixture("B")
    f = fx.f
    const = NatTrans.from_function(f.source, f.target, lambda x, a: f.target.sets[x][0] if x == "0" else f(x, a))
    if validate_nat_trans(const).ok:
        E, incl = equalizer(f, const)
        assert validate_presheaf(E).ok
        assert incl.then(f) == incl.then(const)
    E, incl = equalizer(f, f)
    assert incl.is_iso()


def test_terminal_and_empty():
    c = parallel_pair_category()
    one = terminal_presheaf(c)
    zero = empty_presheaf(c)
    assert len(enumerate_nat_trans(zero, one)) == 1
    assert len(enumerate_nat_trans(one, zero)) == 0
    assert validate_nat_trans(terminal_map(zero, one)).ok
    assert zero.is_empty() and not one.is_empty()


def test_limit_of_discrete_diagram_is_product():
    c = terminal_category()
    d = SetDiagram(c, {"*": ["a", "b", "c"]}, {})
    assert limit_of_sets(d) == [("a",), ("b",), ("c",)]


def test_limit_of_cospan_shape():
    g = parallel_pair_category()
    d = SetDiagram(g, {"V": [0, 1, 2], "E": ["x", "y"]}, {"s": {0: "x", 1: "y", 2: "x"}, "t": {0: "x", 1: "x", 2: "y"}})
    # families (v, e) with s(v) = e = t(v)
    assert limit_of_sets(d) == [(0, "x")]


@pytest.mark.parametrize("name", "ABCD")
def test_elements_category_is_a_category(name):
    fx = fixture(name)
    EP = elements_category(fx.f.source)
    EQ = elements_category(fx.f.target)
    assert validate_category(EP.cat).ok
    assert validate_functor(EP.proj).ok
    F = elements_functor(fx.f, EP, EQ)
    assert validate_functor(F).ok
    assert len(EP.cat.objects) == fx.f.source.total_size()


def test_find_iso_and_slice_homs():
    fx = fixture("C")
    P = fx.f.source
    assert find_iso(P, P) == NatTrans.identity(P)
    assert find_iso(P, fx.f.target) is None or P.total_size() == fx.f.target.total_size()
    homs = slice_homs(fx.h, fx.h)
    assert NatTrans.identity(fx.h.source) in homs


@given(presheaves("interval", max_size=3))
@settings(max_examples=30, deadline=None)
def test_isomorphic_copy_is_found(P):
    rename = {x: {a: f"r{a}" for a in P.sets[x]} for x in P.base.objects}
    action = {m.id: {rename[m.cod][a]: rename[m.dom][b] for a, b in P.action[m.id].items()} for m in P.base.morphisms}
    R = Presheaf(P.base, {x: list(reversed([rename[x][a] for a in P.sets[x]])) for x in P.base.objects}, action)
    iso = find_iso(P, R)
    assert iso is not None and iso.is_iso()
    assert validate_nat_trans(iso).ok
