import pytest

from fintop.fincat import (
    FinCategory,
    FinFunctor,
    Morphism,
    build_comma,
    interval_category,
    opposite,
    parallel_pair_category,
    terminal_category,
    validate_category,
    validate_functor,
)


def commuting_square():
    """Objects a, b, c, d with a -> b -> d and a -> c -> d equal."""
    return FinCategory.from_generators(
        ["a", "b", "c", "d"],
        [("f", "a", "b"), ("g", "a", "c"), ("h", "b", "d"), ("k", "c", "d"), ("diag", "a", "d")],
        [("h", "f", "diag"), ("k", "g", "diag")],
    )


@pytest.mark.parametrize(
    "make", [terminal_category, interval_category, parallel_pair_category, commuting_square]
)
def test_builders_validate(make):
    c = make()
    assert validate_category(c).ok
    assert validate_category(opposite(c)).ok
    assert opposite(opposite(c)) == c


def test_interval_shape():
    c = interval_category()
    assert c.hom("0", "1") == ["u"]
    assert c.hom("1", "0") == []
    assert c.compose("u", "id_0") == "u"
    assert c.arrows_into("1") == ["id_1", "u"]


def test_missing_composite_is_reported():
    c = FinCategory.from_generators(["a", "b", "c"], [("f", "a", "b"), ("g", "b", "c")])
    rep = validate_category(c)
    assert not rep.ok
    assert rep.first == ("compose-total", ("g", "f"))


def test_non_associative_table_is_reported():
    # a monoid on {e, x} with x∘x = x but a broken table entry
    c = FinCategory(
        ["*"],
        [Morphism("e", "*", "*"), Morphism("x", "*", "*"), Morphism("y", "*", "*")],
        {"*": "e"},
        {
            ("e", "e"): "e", ("e", "x"): "x", ("x", "e"): "x", ("e", "y"): "y", ("y", "e"): "y",
            ("x", "x"): "y", ("y", "y"): "x", ("x", "y"): "x", ("y", "x"): "y",
        },
    )
    rep = validate_category(c)
    assert any(law == "associativity" for law, _ in rep.failures)


def test_bad_identity_is_reported():
    c = FinCategory(["*"], [Morphism("e", "*", "*")], {"*": "nope"}, {("e", "e"): "e"})
    assert validate_category(c).first[0] == "identity-exists"


def test_functor_validation():
    c = interval_category()
    t = terminal_category()
    to_point = FinFunctor(c, t, {"0": "*", "1": "*"}, {"id_0": "id_*", "id_1": "id_*", "u": "id_*"})
    assert validate_functor(to_point).ok
    assert validate_functor(FinFunctor.identity(c)).ok
    broken = FinFunctor(c, c, {"0": "1", "1": "0"}, {"id_0": "id_1", "id_1": "id_0", "u": "u"})
    assert validate_functor(broken).first[0] == "preserves-endpoints"
    assert to_point.op().source == opposite(c)
    assert FinFunctor.identity(c).then(to_point) == to_point


def test_comma_of_identity_is_slice():
    c = commuting_square()
    comma = build_comma("d", FinFunctor.identity(c))
    # d ↓ 1 is the coslice under d: one node per arrow out of d
    assert len(comma.base.objects) == len(c.arrows_out_of("d")) == 1
    comma_a = build_comma("a", FinFunctor.identity(c))
    assert len(comma_a.base.objects) == len(c.arrows_out_of("a"))
    assert validate_category(comma_a.base).ok
    assert validate_functor(comma_a.projection).ok
