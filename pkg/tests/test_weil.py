"""Tests for exact Weil-rig arithmetic, homs and bounded enumeration.

The independent oracle here is a naive dense polynomial arithmetic over flat
exponent vectors (one slot per generator of every factor), reducing by the
defining relations after every product.  The library's sparse pick-vector
representation is checked against it throughout.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weiltangent import (
    NAT,
    W,
    W2,
    BudgetExceeded,
    ConstantPartNonzero,
    ObjectMismatch,
    RelationViolation,
    RigHom,
    WeilElement,
    WeilObject,
    add,
    apply_hom,
    compose,
    enumerate_homs,
    mk_hom,
    mul,
    objects_within,
    parse_element,
    square_zero_elements,
    tensor_hom,
    tensor_obj,
)
from weiltangent.weil import compose_many, count_homs_within, embed_element, swap_blocks

WW = W.tensor(W)


# -- independent oracle: flat exponent vectors, reduce after multiplying -----


def _gen_slots(obj):
    """(factor, gen) pairs indexing the flat exponent vector."""
    return [(i, j) for i, n in enumerate(obj.widths, 1) for j in range(1, n + 1)]


def _exponent_dies(obj, exp):
    """An exponent vector is killed when some factor carries total degree >= 2."""
    slots = _gen_slots(obj)
    for factor in range(1, obj.factor_count + 1):
        degree = sum(e for (i, _), e in zip(slots, exp) if i == factor)
        if degree >= 2:
            return True
    return False


def to_flat(u):
    slots = _gen_slots(u.obj)
    flat = {}
    for picks, c in u.coeffs.items():
        exp = tuple(1 if picks[i - 1] == j else 0 for (i, j) in slots)
        flat[exp] = flat.get(exp, 0) + c
    return flat


def from_flat(obj, flat):
    slots = _gen_slots(obj)
    coeffs = {}
    for exp, c in flat.items():
        if c == 0:
            continue
        picks = [0] * obj.factor_count
        for (i, j), e in zip(slots, exp):
            assert e in (0, 1)
            if e:
                assert picks[i - 1] == 0
                picks[i - 1] = j
        key = tuple(picks)
        coeffs[key] = coeffs.get(key, 0) + c
    return WeilElement(obj, coeffs)


def oracle_mul(u, v):
    obj = u.obj
    out = {}
    for e1, c1 in to_flat(u).items():
        for e2, c2 in to_flat(v).items():
            exp = tuple(a + b for a, b in zip(e1, e2))
            if not _exponent_dies(obj, exp):
                out[exp] = out.get(exp, 0) + c1 * c2
    return from_flat(obj, out)


def oracle_table_valid(dom, images):
    """Brute-force relation check on a generator-image table."""
    for n, row in zip(dom.widths, images):
        for u in row:
            if u.unit_coefficient:
                return False
        for j in range(n):
            for jp in range(j, n):
                if not oracle_mul(row[j], row[jp]).is_zero():
                    return False
    return True


def el(obj, text):
    return parse_element(obj, text)


# -- elements and multiplication ---------------------------------------------


class TestMul:
    def test_cross_terms_die_in_w2(self):
        u = el(W2, "1 + x_1")
        v = el(W2, "1 + x_2")
        assert mul(W2, u, v) == el(W2, "1 + x_1 + x_2")

    def test_unit_law(self):
        u = el(WW, "3 + 2x + 7xy")
        assert mul(WW, u, WeilElement.one(WW)) == u

    def test_mixed_monomial_survives_in_ww(self):
        x = WeilElement.generator(WW, 1, 1)
        y = WeilElement.generator(WW, 2, 1)
        expected = oracle_mul(x, y)
        assert expected == WeilElement.monomial(WW, (1, 1))
        assert mul(WW, x, y) == expected

    def test_object_mismatch(self):
        with pytest.raises(ObjectMismatch):
            mul(W, WeilElement.one(W), WeilElement.one(W2))


class TestAdd:
    def test_coefficients_add(self):
        assert add(W, el(W, "2x"), el(W, "3x")) == el(W, "5x")

    def test_additive_unit(self):
        u = el(W, "1 + 4x")
        assert add(W, u, WeilElement.zero(W)) == u

    def test_coefficientwise_in_ww(self):
        assert add(WW, el(WW, "1 + x"), el(WW, "x + xy")) == el(WW, "1 + 2x + xy")


class TestTensor:
    def test_widths_concatenate(self):
        assert tensor_obj(WeilObject((2,)), W) == WeilObject((2, 1))

    def test_unit_object(self):
        a = WeilObject((2, 1))
        assert tensor_obj(NAT, a) == a
        assert tensor_obj(a, NAT) == a

    def test_strictly_associative(self):
        a, b, c = WeilObject((1,)), WeilObject((2,)), WeilObject((1, 2))
        assert tensor_obj(tensor_obj(a, b), c) == tensor_obj(a, tensor_obj(b, c))

    def test_tensor_hom_kills_second_generator(self):
        p_hat = mk_hom(W, NAT, [[WeilElement.zero(NAT)]])
        t = tensor_hom(RigHom.identity(W), p_hat)
        assert t.dom == WW and t.cod == W
        assert t.image(1, 1) == WeilElement.generator(W, 1, 1)
        assert t.image(2, 1) == WeilElement.zero(W)


class TestMkHom:
    def test_scaled_generator_is_valid(self):
        u = el(W, "5x")
        assert oracle_mul(u, u).is_zero()
        f = mk_hom(W, W, [[u]])
        assert f.image(1, 1) == u

    def test_constant_part_rejected(self):
        bad = el(W, "1 + x")
        assert not oracle_mul(bad, bad).is_zero()
        with pytest.raises(ConstantPartNonzero):
            mk_hom(W, W, [[bad]])

    def test_relation_violation_names_the_pair(self):
        x = WeilElement.generator(WW, 1, 1)
        y = WeilElement.generator(WW, 2, 1)
        assert not oracle_mul(x, y).is_zero()
        with pytest.raises(RelationViolation) as err:
            mk_hom(W2, WW, [[x, y]])
        assert err.value.factor == 1
        assert err.value.pair == (1, 2)

    def test_acceptance_matches_brute_force_oracle(self):
        # mk_hom accepts exactly the tables the naive relation check confirms
        dom = W2
        for cod in (W, WW):
            monos = cod.nonunit_monomials()
            elements = [
                WeilElement(cod, dict(zip(monos, coeffs)))
                for coeffs in itertools.product(range(2), repeat=len(monos))
            ]
            for pair in itertools.product(elements, repeat=2):
                expected = oracle_table_valid(dom, [pair])
                try:
                    mk_hom(dom, cod, [list(pair)])
                    accepted = True
                except (RelationViolation, ConstantPartNonzero):
                    accepted = False
                assert accepted == expected, [str(u) for u in pair]


class TestApplyHom:
    def test_projection_formula(self):
        p_hat = mk_hom(W, NAT, [[WeilElement.zero(NAT)]])
        assert apply_hom(p_hat, el(W, "4 + 9x")) == WeilElement.from_nat(NAT, 4)

    def test_identity(self):
        u = el(WW, "2 + x + 3y + 5xy")
        assert apply_hom(RigHom.identity(WW), u) == u

    def test_addition_formula(self):
        x = WeilElement.generator(W, 1, 1)
        m_hat = mk_hom(W2, W, [[x, x]])
        assert apply_hom(m_hat, el(W2, "3 + 2x_1 + 5x_2")) == el(W, "3 + 7x")


class TestCompose:
    def test_projection_after_unit_is_identity(self):
        p_hat = mk_hom(W, NAT, [[WeilElement.zero(NAT)]])
        e_hat = RigHom.unit_hom(W)
        assert compose(p_hat, e_hat) == RigHom.identity(NAT)

    def test_identity_laws(self):
        for f in enumerate_homs(W2, WW, 1):
            assert compose(RigHom.identity(WW), f) == f
            assert compose(f, RigHom.identity(W2)) == f

    def test_associative_unital_on_enumerated_triples(self):
        # small sweep: triples of composable homs over tiny objects at bound 1
        objs = [NAT, W, W2, WW]
        for a, b, c, d in itertools.product(objs[:3], repeat=4):
            fs = enumerate_homs(a, b, 1)[:4]
            gs = enumerate_homs(b, c, 1)[:4]
            hs = enumerate_homs(c, d, 1)[:4]
            for f, g, h in itertools.product(fs, gs, hs):
                assert compose(h, compose(g, f)) == compose(compose(h, g), f)

    def test_compose_many_order(self):
        p_hat = mk_hom(W, NAT, [[WeilElement.zero(NAT)]])
        e_hat = RigHom.unit_hom(W)
        assert compose_many(p_hat, e_hat) == RigHom.identity(NAT)


class TestEnumeration:
    def test_homs_w_to_w(self):
        homs = enumerate_homs(W, W, 3)
        assert len(homs) == 4
        images = {h.image(1, 1) for h in homs}
        assert images == {el(W, "0"), el(W, "x"), el(W, "2x"), el(W, "3x")}

    def test_nat_is_initial(self):
        for cod in (NAT, W, WW, WeilObject((2, 2))):
            assert enumerate_homs(NAT, cod, 5) == [RigHom.unit_hom(cod)]

    def test_homs_w_to_w2(self):
        homs = enumerate_homs(W, W2, 1)
        assert len(homs) == 4
        images = {h.image(1, 1) for h in homs}
        assert images == {
            el(W2, "0"),
            el(W2, "x_1"),
            el(W2, "x_2"),
            el(W2, "x_1 + x_2"),
        }

    def test_order_is_deterministic(self):
        first = enumerate_homs(W2, WW, 1)
        second = enumerate_homs(W2, WW, 1)
        assert first == second
        keys = [h.canon_key() for h in first]
        assert keys == sorted(keys)

    def test_budget_exceeded(self):
        with pytest.raises(BudgetExceeded):
            enumerate_homs(WeilObject((2, 2)), WeilObject((2, 2)), 1, cap=1000)
        assert count_homs_within(WeilObject((2, 2)), WeilObject((2, 2)), 1) is None

    def test_matches_brute_force_on_small_pairs(self):
        # independent path: filter ALL coefficient tables by the naive check
        for dom, cod in [(W, W), (W, WW), (W2, W)]:
            monos = cod.nonunit_monomials()
            brute = []
            width = dom.widths[0]
            for rows in itertools.product(
                (
                    WeilElement(cod, dict(zip(monos, coeffs)))
                    for coeffs in itertools.product(range(2), repeat=len(monos))
                ),
                repeat=width,
            ):
                if oracle_table_valid(dom, [rows]):
                    brute.append(mk_hom(dom, cod, [list(rows)]))
            fast = enumerate_homs(dom, cod, 1)
            assert sorted(h.canon_key() for h in brute) == [
                h.canon_key() for h in fast
            ]


class TestSquareZero:
    def test_nat_has_only_zero(self):
        assert square_zero_elements(NAT, 7) == [WeilElement.zero(NAT)]

    def test_w_bound_two(self):
        assert set(square_zero_elements(W, 2)) == {
            el(W, "0"),
            el(W, "x"),
            el(W, "2x"),
        }

    def test_ww_bound_one_excludes_x_with_y(self):
        got = set(square_zero_elements(WW, 1))
        expected = {
            el(WW, "0"),
            el(WW, "x"),
            el(WW, "y"),
            el(WW, "xy"),
            el(WW, "x + xy"),
            el(WW, "y + xy"),
        }
        assert got == expected
        # independent brute force over all supports
        monos = WW.nonunit_monomials()
        brute = set()
        for coeffs in itertools.product(range(2), repeat=len(monos)):
            u = WeilElement(WW, dict(zip(monos, coeffs)))
            if oracle_mul(u, u).is_zero():
                brute.add(u)
        assert got == brute

    def test_agrees_with_hom_images(self):
        for cod in (W, W2, WW):
            elements = set(square_zero_elements(cod, 2))
            images = {h.image(1, 1) for h in enumerate_homs(W, cod, 2)}
            assert elements == images


# -- algebraic laws, property-tested ------------------------------------------

SMALL_OBJECTS = objects_within(2, 2)


@st.composite
def object_and_elements(draw, count=2, max_coeff=4):
    obj = draw(st.sampled_from(SMALL_OBJECTS))
    monos = list(obj.monomials())
    elements = []
    for _ in range(count):
        coeffs = draw(
            st.lists(
                st.integers(min_value=0, max_value=max_coeff),
                min_size=len(monos),
                max_size=len(monos),
            )
        )
        elements.append(WeilElement(obj, dict(zip(monos, coeffs))))
    return (obj, *elements)


@settings(max_examples=120, deadline=None)
@given(object_and_elements(count=3))
def test_mul_laws(data):
    obj, u, v, t = data
    one = WeilElement.one(obj)
    assert mul(obj, u, v) == mul(obj, v, u)
    assert mul(obj, mul(obj, u, v), t) == mul(obj, u, mul(obj, v, t))
    assert mul(obj, u, one) == u
    assert mul(obj, u, add(obj, v, t)) == add(obj, mul(obj, u, v), mul(obj, u, t))


@settings(max_examples=120, deadline=None)
@given(object_and_elements(count=2))
def test_mul_matches_oracle(data):
    obj, u, v = data
    assert mul(obj, u, v) == oracle_mul(u, v)


@settings(max_examples=60, deadline=None)
@given(object_and_elements(count=2), st.integers(min_value=0, max_value=3))
def test_apply_hom_is_a_rig_hom(data, idx):
    obj, u, v = data
    homs = enumerate_homs(obj, WW, 1)
    f = homs[idx % len(homs)]
    assert f.apply(u + v) == f.apply(u) + f.apply(v)
    assert f.apply(u * v) == f.apply(u) * f.apply(v)
    assert f.apply(WeilElement.zero(obj)) == WeilElement.zero(WW)
    assert f.apply(WeilElement.one(obj)) == WeilElement.one(WW)


def test_tensor_hom_functorial():
    for f in enumerate_homs(W, W2, 1):
        for g in enumerate_homs(W2, W, 1):
            assert tensor_hom(
                RigHom.identity(W), RigHom.identity(W2)
            ) == RigHom.identity(W.tensor(W2))
            lhs = tensor_hom(compose(g, f), compose(f, g))
            rhs = compose(tensor_hom(g, f), tensor_hom(f, g))
            assert lhs == rhs


def test_swap_blocks_is_an_involution():
    a, b = WeilObject((2,)), WeilObject((1, 1))
    s = swap_blocks(a, b)
    assert compose(swap_blocks(b, a), s) == RigHom.identity(a.tensor(b))


def test_embed_element_multiplicative():
    big = W.tensor(WW)
    u, v = el(W, "1 + 2x"), el(W, "3x")
    assert embed_element(u, big, 0) * embed_element(v, big, 0) == embed_element(
        u * v, big, 0
    )


# -- serialization and display ------------------------------------------------


class TestJsonRoundTrip:
    def test_element(self):
        u = el(WW, "2 + 3x + xy")
        assert WeilElement.from_json(WW, u.to_json()) == u
        assert u.to_json() == [[[0, 0], "2"], [[1, 0], "3"], [[1, 1], "1"]]

    def test_hom(self):
        for h in enumerate_homs(W2, WW, 1)[:8]:
            assert RigHom.from_json(h.to_json()) == h

    def test_object(self):
        a = WeilObject((2, 1))
        assert WeilObject.from_json(a.to_json()) == a


class TestDisplay:
    def test_paper_sized_aliases(self):
        assert str(el(W, "4 + 9x")) == "4 + 9x"
        assert str(el(W2, "3 + 2x_1 + 5x_2")) == "3 + 2x_1 + 5x_2"
        assert str(el(WW, "5 + 2x + 3y + 7xy")) == "5 + 2x + 3y + 7xy"

    def test_general_generators(self):
        obj = WeilObject((2, 2))
        u = WeilElement.generator(obj, 2, 1)
        assert str(u) == "x(2,1)"


def test_objects_within():
    objs = objects_within(2, 2)
    assert objs[0] == NAT
    assert len(objs) == 1 + 2 + 4
    assert WeilObject((2, 2)) in objs


def test_basis_sizes():
    assert NAT.basis_size == 1
    assert W.basis_size == 2
    assert WeilObject((3, 2)).basis_size == 12
    assert WW.basis_size == 4
