"""Tests for the tangent structure on Weil rigs and its bounded verifiers."""

import json
from pathlib import Path

import pytest

from weiltangent import (
    NAT,
    W,
    W2,
    NotACone,
    RigHom,
    WeilElement,
    WeilObject,
    compose,
    enumerate_homs,
    parse_element,
    tensor_hom,
)
from weiltangent.tangent import (
    T_hom,
    T_n_obj,
    T_obj,
    bundle_proj_hom,
    component,
    equaliser_factor,
    equaliser_pair,
    fibre_diagonal,
    fibre_add_hom,
    flip_hom,
    pairing,
    pairing_at,
    proj_hom,
    vertical_lift_hom,
    verify_axioms,
    verify_universality,
    w_composite,
    zero_section_hom,
)

WW = W.tensor(W)
ORACLES = Path(__file__).resolve().parent.parent / "oracles"


def el(obj, text):
    return parse_element(obj, text)


class TestTangentObjects:
    def test_T_of_nat_is_w(self):
        assert T_obj(NAT) == W

    def test_T0_is_identity(self):
        a = WeilObject((2, 1))
        assert T_n_obj(0, a) == a

    def test_double_tangent_basis(self):
        t2 = T_obj(T_obj(NAT))
        assert t2 == WW
        assert sorted(t2.monomials()) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert {str(WeilElement.monomial(t2, m)) for m in t2.monomials()} == {
            "1",
            "x",
            "y",
            "xy",
        }


class TestTangentFunctor:
    def test_preserves_identity(self):
        a = WeilObject((2, 2))
        assert T_hom(RigHom.identity(a)) == RigHom.identity(T_obj(a))

    def test_T_of_projection_kills_second_generator(self):
        t = T_hom(bundle_proj_hom())
        assert t.dom == WW and t.cod == W
        assert t.image(1, 1) == WeilElement.generator(W, 1, 1)
        assert t.image(2, 1) == WeilElement.zero(W)

    def test_T_of_zero_section_is_first_inclusion(self):
        t = T_hom(zero_section_hom())
        assert t.dom == W and t.cod == WW
        assert t.image(1, 1) == WeilElement.monomial(WW, (1, 0))

    def test_strictly_functorial(self):
        for f in enumerate_homs(W, W2, 1):
            for g in enumerate_homs(W2, WW, 1):
                assert T_hom(compose(g, f)) == compose(T_hom(g), T_hom(f))


class TestComponents:
    def test_flip_formula(self):
        c = component("c", NAT)
        assert c.apply(el(WW, "5 + 2x + 3y + 7xy")) == el(WW, "5 + 3x + 2y + 7xy")

    def test_zero_section_formula(self):
        e = component("e", NAT)
        assert e.apply(WeilElement.from_nat(NAT, 7)) == el(W, "7")

    def test_lift_formula(self):
        lift = component("l", NAT)
        assert lift.apply(el(W, "4 + 9x")) == el(WW, "4 + 9xy")

    def test_projection_formula(self):
        p = component("p", NAT)
        assert p.apply(el(W, "4 + 9x")) == WeilElement.from_nat(NAT, 4)

    def test_addition_formula(self):
        m = component("m", NAT)
        assert m.apply(el(W2, "3 + 2x_1 + 5x_2")) == el(W, "3 + 7x")

    def test_component_is_whiskered_generator(self):
        a = WeilObject((2,))
        for name, gen in [
            ("p", bundle_proj_hom()),
            ("e", zero_section_hom()),
            ("m", fibre_add_hom()),
            ("l", vertical_lift_hom()),
            ("c", flip_hom()),
        ]:
            assert component(name, a) == tensor_hom(gen, RigHom.identity(a))
        assert component("proj", a, n=3, i=2) == tensor_hom(
            proj_hom(3, 2), RigHom.identity(a)
        )

    def test_flip_after_lift_is_lift(self):
        # resolves the ill-typed literal reading: c . l = l is the equation
        assert compose(flip_hom(), vertical_lift_hom()) == vertical_lift_hom()

    def test_bad_name(self):
        from weiltangent import BadName

        with pytest.raises(BadName):
            component("q", NAT)


class TestPairing:
    def test_projections_recover_legs_exhaustively(self):
        a = NAT
        ta = T_obj(a)
        for z in (W, W2, WW):
            homs = enumerate_homs(z, ta, 1)
            proj1 = component("proj", a, n=2, i=1)
            proj2 = component("proj", a, n=2, i=2)
            p = component("p", a)
            by_base = {}
            for f in homs:
                by_base.setdefault(compose(p, f).canon_key(), []).append(f)
            for group in by_base.values():
                for g1 in group:
                    for g2 in group:
                        h = pairing([g1, g2], 2)
                        assert compose(proj1, h) == g1
                        assert compose(proj2, h) == g2

    def test_pairing_roundtrip(self):
        a = NAT
        for h in enumerate_homs(W, T_n_obj(2, a), 1):
            legs = [
                compose(component("proj", a, n=2, i=i), h) for i in (1, 2)
            ]
            assert pairing(legs, 2) == h

    def test_doubling(self):
        a = NAT
        f = RigHom.identity(T_obj(a))
        doubled = compose(component("m", a), pairing([f, f], 2))
        assert doubled.apply(el(W, "3 + 5x")) == el(W, "3 + 10x")
        assert compose(component("m", a), fibre_diagonal(a, 2)) == doubled

    def test_zero_fold_pairing_is_base(self):
        a = WeilObject((2,))
        p = component("p", a)
        assert pairing([], 0, base=p) == p

    def test_not_a_cone(self):
        leg1 = RigHom.identity(WW)
        leg2 = compose(
            component("e", W), component("p", W)
        )  # x |-> 0, y |-> y: picks a different base part than leg1 on y
        # build a genuinely disagreeing pair: x |-> y vs x |-> 0
        f1 = RigHom(W, WW, [[WeilElement.generator(WW, 2, 1)]], _validated=True)
        f2 = RigHom(W, WW, [[WeilElement.zero(WW)]], _validated=True)
        with pytest.raises(NotACone):
            pairing([f1, f2], 2)
        assert pairing([leg1, leg1], 2) is not None
        assert pairing([leg2, leg2], 2) is not None


class TestEqualiserComposite:
    def test_preserves_units(self):
        w = w_composite(NAT)
        assert w.apply(WeilElement.one(W2)) == WeilElement.one(WW)

    def test_closed_form_at_nat(self):
        w = w_composite(NAT)
        a, b, c = 2, 3, 5
        u = WeilElement(W2, {(0,): a, (1,): b, (2,): c})
        expected = WeilElement(WW, {(0, 0): a, (1, 1): b, (0, 1): c})
        assert w.apply(u) == expected  # a + b*xy + c*y

    def test_matches_golden_file(self):
        golden = json.loads((ORACLES / "w_component.json").read_text())
        assert RigHom.from_json(golden["hom"]) == w_composite(NAT)

    def test_equalises(self):
        for a in (NAT, W, W2, WW):
            w = w_composite(a)
            tp, collapse = equaliser_pair(a)
            assert compose(tp, w) == compose(collapse, w)

    def test_whiskers(self):
        base = w_composite(NAT)
        for a in (W, W2, WW):
            assert w_composite(a) == tensor_hom(base, RigHom.identity(a))

    def test_equaliser_factor_roundtrip(self):
        a = NAT
        w = w_composite(a)
        for g in enumerate_homs(W, T_n_obj(2, a), 1):
            h = compose(w, g)
            assert equaliser_factor(a, h) == g

    def test_equaliser_factor_rejects_non_equalising(self):
        # x |-> x in W (x) W has a pure first-slot part, so it cannot factor
        h = RigHom(W, WW, [[WeilElement.generator(WW, 1, 1)]], _validated=True)
        assert equaliser_factor(NAT, h) is None


class TestVerifyAxioms:
    def test_small_sweep_all_pass(self):
        report = verify_axioms(2, 2, 1, hom_cap=512)
        assert report.all_pass, str(report)
        assert report.failures == []
        # naturality pairs over budget are reported as skipped, not failed
        assert all(r.passed in (True, None) for r in report.results)

    def test_report_serializes(self):
        report = verify_axioms(1, 2, 1)
        doc = report.to_document()
        assert doc["counts"]["failed"] == 0
        entry = doc["results"][0]
        assert set(entry) >= {"diagram_id", "object", "pass"}

    def test_diagram_ids_present(self):
        report = verify_axioms(1, 1, 1)
        ids = {r.diagram_id for r in report.results}
        for expected in [
            "monoid.unit_left",
            "monoid.unit_right",
            "monoid.assoc",
            "monoid.comm",
            "monoid.bundle",
            "lift_compat.proj",
            "lift_compat.zero",
            "lift_compat.add",
            "flip_compat.proj",
            "flip_compat.zero",
            "flip_compat.add",
            "flip.involution",
            "flip.fixes_lift",
            "lift.coassoc",
            "flip.braid",
            "flip.lift_exchange",
            "lift.equalises",
            "naturality",
        ]:
            assert expected in ids
        assert any("well-typed" in note for note in report.notes)

    def test_bad_bounds_rejected(self):
        with pytest.raises(ValueError):
            verify_axioms(2, 0, 1)


class TestVerifyUniversality:
    def test_nat_bound_one(self):
        report = verify_universality(NAT, 2, 1)
        assert report.all_pass, str(report)
        # the only in-budget casualty is the widest probe under T^2
        assert {r.diagram_id for r in report.skipped} <= {"pullback.T^2.universal"}

    def test_nat_full_coverage_on_small_probes(self):
        report = verify_universality(NAT, 2, 1, z_objects=[NAT, W])
        assert report.all_pass, str(report)
        assert not report.skipped

    def test_w_bound_one(self):
        report = verify_universality(W, 2, 1, z_objects=[NAT, W])
        assert report.all_pass, str(report)

    def test_threefold_pullback(self):
        report = verify_universality(NAT, 3, 1, z_objects=[NAT, W])
        assert report.all_pass, str(report)
