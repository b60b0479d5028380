import pytest

from conftest import elementary, fixture, kan

from fintop.errors import PreconditionError, ShapeError
from fintop.harness.oracles import (
    default_test_family,
    iso_in_slice,
    kan_families_direct,
    pi_fiber_counts,
    pullback_functor,
)
from fintop.presheaf import NatTrans, elements_category, slice_homs, validate_nat_trans, validate_presheaf
from fintop.sites import (
    dependent_product_kan,
    family_key,
    kan_transpose_to_alpha,
    kan_transpose_to_family,
    l_functor,
    r_functor,
    ran_along_elements,
)


@pytest.mark.parametrize("name", "ABCD")
def test_kan_fibres_match_direct_enumeration(name):
    fx = fixture(name)
    pi = kan(name)
    assert validate_presheaf(pi.domain).ok and validate_nat_trans(pi.arrow).ok
    Q = fx.f.target
    for x in Q.base.objects:
        for q in Q.sets[x]:
            fibre = [fam for (qq, fam) in pi.domain.sets[x] if qq == q]
            assert sorted(fibre) == sorted(kan_families_direct(fx.f, fx.h, x, q))


def test_expected_fibre_values_in_fixture_tables():
    for name in "ABCD":
        fx = fixture(name)
        counts = pi_fiber_counts(fx.f, fx.h)
        for x, per in counts.items():
            for q, n in per.items():
                assert fx.expected_value(f"pi.fiber/{x}/{q}") == n


def test_compatibility_filter_matters():
    fx = fixture("B")
    loose = pi_fiber_counts(fx.f, fx.h, compatible=False)
    tight = pi_fiber_counts(fx.f, fx.h)
    assert loose["1"]["q"] > tight["1"]["q"]


@pytest.mark.parametrize("name", "ABCD")
def test_r_and_l_are_inverse_up_to_iso(name):
    fx = fixture(name)
    P = fx.f.source
    EP = elements_category(P)
    R = r_functor(P, fx.h, EP)
    assert validate_presheaf(R).ok
    L = l_functor(P, R, EP)
    assert iso_in_slice(L, type(L)(fx.h)) is not None


def test_r_functor_needs_slice_over_P():
    fx = fixture("A")
    with pytest.raises(PreconditionError):
        r_functor(fx.f.source, fx.f)


@pytest.mark.parametrize("name", "ABCD")
def test_equivalent_to_elementary(name):
    e = elementary(name).slice()
    k = kan(name)
    iso = iso_in_slice(e, k)
    assert iso is not None and iso.is_iso()
    assert iso.then(k.arrow) == e.arrow


def test_ran_is_a_presheaf_on_elements():
    fx = fixture("C")
    EP, EQ = elements_category(fx.f.source), elements_category(fx.f.target)
    ran = ran_along_elements(fx.f, r_functor(fx.f.source, fx.h, EP), EP, EQ)
    assert ran.base == EQ.cat
    assert validate_presheaf(ran).ok


def test_identity_cases():
    fx = fixture("B")
    P = fx.f.source
    pi = dependent_product_kan(fx.f, NatTrans.identity(P))
    Q = fx.f.target
    assert all(len(pi.domain.sets[x]) == len(Q.sets[x]) for x in Q.base.objects)
    pi2 = dependent_product_kan(NatTrans.identity(P), fx.h)
    assert iso_in_slice(pi2, type(pi2)(fx.h)) is not None


@pytest.mark.parametrize("name", "ABC")
def test_kan_transposes_round_trip(name):
    fx = fixture(name)
    pi = kan(name)
    for obj in default_test_family(fx.f.target):
        for alpha in slice_homs(pullback_functor(fx.f, obj).arrow, fx.h):
            m = kan_transpose_to_family(fx.f, fx.h, pi, obj.arrow, alpha)
            assert validate_nat_trans(m).ok
            assert kan_transpose_to_alpha(fx.f, fx.h, pi, obj.arrow, m) == alpha


def test_kan_transpose_errors():
    fx = fixture("B")
    pi = kan("B")
    k = default_test_family(fx.f.target)[0].arrow
    with pytest.raises(PreconditionError):
        kan_transpose_to_family(fx.f, fx.h, pi, k, NatTrans.identity(fx.h.source))
    # send each u to an element lying over the wrong point of Q
    wrong = NatTrans.from_function(
        k.source, pi.domain, lambda x, u: next(e for e in pi.domain.sets[x] if e[0] != k(x, u))
    )
    with pytest.raises(ShapeError):
        kan_transpose_to_alpha(fx.f, fx.h, pi, k, wrong)


def test_family_key_is_canonical():
    a = family_key({("u", "p"): "x", ("id_1", "p"): "y"})
    b = family_key([(("id_1", "p"), "y"), (("u", "p"), "x")])
    assert a == b and a[0][0][0] == "id_1"
