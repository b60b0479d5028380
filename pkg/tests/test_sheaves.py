import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture, kan
from strategies import SHAPES, presheaves

from fintop.errors import PreconditionError
from fintop.fincat import FinFunctor, terminal_category
from fintop.harness.oracles import iso_in_slice, matching_families_direct, sheafify_by_colimit
from fintop.presheaf import (
    NatTrans,
    elements_category,
    elements_functor,
    find_iso,
    terminal_presheaf,
    validate_nat_trans,
    validate_presheaf,
)
from fintop.sheaves import (
    GrothTopology,
    Sieve,
    all_sieves,
    check_comorphism,
    dependent_product_sheaf,
    induced_topology,
    is_sheaf,
    matching_families,
    plus_construction,
    saturate,
    sheafify,
    sheafify_map,
    slice_inclusion_direct_image,
    subtopos_square_check,
    trivial_topology,
    validate_topology,
)
from fintop.sites import dependent_product_kan


@pytest.fixture(scope="module")
def D():
    return fixture("D")


def test_sieves_on_interval():
    c = SHAPES["interval"]
    assert [s.sorted() for s in all_sieves(c, "1")] == [[], ["u"], ["id_1", "u"]]
    assert [s.sorted() for s in all_sieves(c, "0")] == [[], ["id_0"]]


@pytest.mark.parametrize("shape", sorted(SHAPES))
def test_trivial_topology(shape):
    c = SHAPES[shape]
    J = trivial_topology(c)
    assert validate_topology(J).ok


def test_fixture_topology_and_failures(D):
    J = D.topology
    c = J.base
    assert validate_topology(J).ok
    no_max = GrothTopology(c, {"1": [["u"]], "0": [["id_0"]]})
    assert validate_topology(no_max).first == ("maximal", ("1",))
    unstable = GrothTopology(c, {"1": [[], ["u"], ["u", "id_1"]], "0": [["id_0"]]})
    assert validate_topology(unstable).first[0] == "stability"
    not_closed = GrothTopology(c, {"1": [["id_1"], ["u", "id_1"]], "0": [["id_0"]]})
    assert validate_topology(not_closed).first[0] == "sieve-closed"


def test_transitivity_failure():
    # the empty sieve covers 0 and {u} covers 1, so transitivity forces the empty sieve on 1
    c = SHAPES["interval"]
    J = GrothTopology(c, {"1": [["u"], ["u", "id_1"]], "0": [[], ["id_0"]]})
    assert validate_topology(J).first == ("transitivity", ("1", [], ["u"]))
    assert validate_topology(saturate(c, {"1": [["u"]], "0": [[]]})).ok


@given(st.sampled_from(sorted(SHAPES)), st.data())
@settings(max_examples=40, deadline=None)
def test_saturation_gives_a_topology(shape, data):
    c = SHAPES[shape]
    gens = {x: data.draw(st.lists(st.sampled_from(all_sieves(c, x)), max_size=2)) for x in c.objects}
    J = saturate(c, gens)
    assert validate_topology(J).ok
    for x, sieves in gens.items():
        for s in sieves:
            assert s in J.covers[x]
    assert saturate(c, {x: list(J.covers[x]) for x in c.objects}) == J
    for x in c.objects:
        J.minimal_cover(x)


def test_saturate_reproduces_fixture(D):
    assert saturate(D.topology.base, {"1": [["u"]]}) == D.topology


@given(presheaves("interval", max_size=3))
@settings(max_examples=60, deadline=None)
def test_sheaves_on_dense_interval_are_bijections(P):
    J = fixture("D").topology
    bij = len(set(P.action["u"].values())) == len(P.sets["1"]) == len(P.sets["0"])
    assert is_sheaf(P, J).ok == bij
    assert is_sheaf(P, trivial_topology(P.base)).ok


@given(presheaves("interval", max_size=3))
@settings(max_examples=40, deadline=None)
def test_sheafify_against_colimit_oracle(P):
    J = fixture("D").topology
    aP, unit = sheafify(P, J)
    assert validate_presheaf(aP).ok and validate_nat_trans(unit).ok
    assert is_sheaf(aP, J).ok
    oracle, _ = sheafify_by_colimit(P, J)
    assert find_iso(aP, oracle) is not None
    assert unit.is_iso() == is_sheaf(P, J).ok
    again, unit2 = sheafify(aP, J)
    assert again is aP and unit2 == NatTrans.identity(aP)


def test_sheafify_sizes_match_fixture_table(D):
    J = D.topology
    for name, P in D.presheaves.items():
        aP, _ = sheafify(P, J)
        for x in P.base.objects:
            assert len(aP.sets[x]) == D.expected_value(f"sheafify.size/{name}/{x}")


def test_matching_families_match_direct(D):
    N = D.presheaves["N"]
    for x in N.base.objects:
        for s in D.topology.covers[x]:
            assert sorted(matching_families(N, s)) == sorted(matching_families_direct(N, s.arrows))


def test_plus_once_on_non_separated(D):
    N = D.presheaves["N"]
    plus, unit = plus_construction(N, D.topology)
    assert validate_nat_trans(unit).ok
    assert len(plus.sets["1"]) == len(N.sets["0"])


def test_sheafify_map(D):
    J = D.topology
    g = D.arrows["g"]
    ag = sheafify_map(g, J)
    assert validate_nat_trans(ag).ok
    aN, unit = sheafify(g.source, J)
    assert unit.then(ag) == g.then(sheafify(g.target, J)[1])


def test_induced_topology(D):
    J = D.topology
    for name in ("P", "Q", "N"):
        P = D.presheaves[name]
        JP = induced_topology(P, J)
        assert validate_topology(JP).ok
    triv = trivial_topology(J.base)
    P = D.presheaves["P"]
    EP = elements_category(P)
    assert induced_topology(P, triv, EP) == trivial_topology(EP.cat)
    one = terminal_presheaf(J.base)
    E1 = elements_category(one)
    J1 = induced_topology(one, J, E1)
    for x in J.base.objects:
        assert len(J1.covers[E1.node_of[(x, "*")]]) == len(J.covers[x])


@pytest.mark.parametrize("name", "ABCD")
def test_elements_functor_is_comorphism(name):
    fx = fixture(name)
    J = fx.topology or trivial_topology(fx.f.source.base)
    if fx.topology is None:
        # the dense topology on the interval, or a saturated one elsewhere
        c = fx.f.source.base
        J = saturate(c, {x: all_sieves(c, x)[1:2] for x in c.objects})
    P, Q = fx.f.source, fx.f.target
    EP, EQ = elements_category(P), elements_category(Q)
    JP, JQ = induced_topology(P, J, EP), induced_topology(Q, J, EQ)
    assert validate_topology(JP).ok and validate_topology(JQ).ok
    assert check_comorphism(elements_functor(fx.f, EP, EQ), JP, JQ).ok


def test_comorphism_failure_has_witness(D):
    J = D.topology
    t = terminal_category()
    F = FinFunctor(t, J.base, {"*": "1"}, {"id_*": "id_1"})
    rep = check_comorphism(F, trivial_topology(t), J)
    assert rep.first == ("covering-lifting", ("*", ["u"]))
    assert check_comorphism(FinFunctor.identity(J.base), J, J).ok


def test_direct_image_along_unit(D):
    J = D.topology
    N = D.presheaves["N"]
    aN, unit = sheafify(N, J)
    w = NatTrans.identity(aN)
    pulled = slice_inclusion_direct_image(w, J, unit)
    assert pulled.base == N
    assert len(pulled.domain.sets["0"]) == len(N.sets["0"])
    h = D.h
    same = slice_inclusion_direct_image(h, J, NatTrans.identity(h.target))
    assert same.arrow is h
    with pytest.raises(PreconditionError):
        slice_inclusion_direct_image(h, J)


def test_sheaf_level_product(D):
    J = D.topology
    f, h = D.f, D.h
    sh = dependent_product_sheaf(f, h, J)
    pre = kan("D")
    assert sh.domain == pre.domain and sh.arrow == pre.arrow
    el = dependent_product_sheaf(f, h, J, method="elementary")
    assert iso_in_slice(el, pre) is not None
    with pytest.raises(ValueError):
        dependent_product_sheaf(f, h, J, method="nope")


def test_sheaf_level_product_trivial_topology():
    fx = fixture("B")
    J = trivial_topology(fx.f.source.base)
    sh = dependent_product_sheaf(fx.f, fx.h, J)
    pre = dependent_product_kan(fx.f, fx.h)
    assert sh.domain == pre.domain


def test_sheaf_level_product_of_identity_is_terminal(D):
    J = D.topology
    g = D.arrows["g"]
    aN, _ = sheafify(g.source, J)
    out = dependent_product_sheaf(g, NatTrans.identity(aN), J)
    aQ, _ = sheafify(g.target, J)
    for x in aQ.base.objects:
        assert len(out.domain.sets[x]) == len(aQ.sets[x])


def test_subtopos_square(D):
    J = D.topology
    assert subtopos_square_check(D.f, D.h, J).status == "pass"
    assert subtopos_square_check(D.f, D.h, J, method="elementary").ok
    triv = trivial_topology(J.base)
    assert subtopos_square_check(D.f, D.h, triv).ok
    rep = subtopos_square_check(D.arrows["g"], NatTrans.identity(D.presheaves["N"]), J)
    assert rep.status == "precondition unmet" and not rep.ok


def test_minimal_cover_requires_intersections():
    c = SHAPES["graph"]
    J = GrothTopology(c, {"E": [["s"], ["t"], ["s", "t", "id_E"]], "V": [["id_V"]]})
    with pytest.raises(PreconditionError):
        J.minimal_cover("E")
    assert Sieve("E", frozenset({"s"})) in J.covers["E"]
