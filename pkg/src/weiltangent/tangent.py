"""The tangent structure carried by Weil rigs, with bounded exact verifiers.

The tangent functor is T(A) = W (x) A and more generally T_n(A) = W_n (x) A.
The structure maps are generated by five homs on the small objects

    p : W -> N          bundle projection          x |-> 0
    e : N -> W          zero section               (unique hom)
    m : W_2 -> W        fibre addition             x_1, x_2 |-> x
    l : W -> W (x) W    vertical lift              x |-> xy
    c : W (x) W -> same canonical flip              x <-> y

together with the projections W_n -> W, each whiskered by the identity of A
to give its component there.  Every verification in this module is an exact
equality of rig homs; there are no tolerances anywhere.

``verify_axioms`` sweeps the tangent-category axioms over a bounded object
universe: the bundle commutative-monoid laws, the compatibility squares of
the vertical lift and the canonical flip, the flip involution and braid
identities, the equaliser identity for the composite ``w``, and naturality
of every generating component against bounded hom enumerations.  Pairs whose
hom enumeration exceeds the budget are reported as skipped, never silently
dropped and never counted as failures.
"""

from __future__ import annotations

import itertools

from .errors import BadName, BudgetExceeded, NotACone
from .report import VerificationReport
from .weil import (
    NAT,
    W,
    W2,
    DEFAULT_ENUM_CAP,
    RigHom,
    WeilElement,
    WeilObject,
    compose,
    compose_many,
    enumerate_homs,
    objects_within,
    tensor_hom,
)

# -- generating homs ----------------------------------------------------------


def bundle_proj_hom() -> RigHom:
    """p : W -> N, killing the tangent generator."""
    return RigHom(W, NAT, [[WeilElement.zero(NAT)]], _validated=True)


def zero_section_hom() -> RigHom:
    """e : N -> W, the unique hom out of N."""
    return RigHom.unit_hom(W)


def fibre_add_hom() -> RigHom:
    """m : W_2 -> W, sending both generators to the single one."""
    x = WeilElement.generator(W, 1, 1)
    return RigHom(W2, W, [[x, x]], _validated=True)


def vertical_lift_hom() -> RigHom:
    """l : W -> W (x) W, sending the generator to the mixed monomial xy."""
    ww = W.tensor(W)
    return RigHom(W, ww, [[WeilElement.monomial(ww, (1, 1))]], _validated=True)


def flip_hom() -> RigHom:
    """c : W (x) W -> W (x) W, exchanging the two tensor factors."""
    ww = W.tensor(W)
    x = WeilElement.generator(ww, 1, 1)
    y = WeilElement.generator(ww, 2, 1)
    return RigHom(ww, ww, [[y], [x]], _validated=True)


def proj_hom(n: int, i: int) -> RigHom:
    """The i-th projection W_n -> W (1-based), killing the other generators."""
    if not (1 <= i <= n):
        raise BadName(f"no projection index {i} for width {n}")
    wn = WeilObject((n,))
    x = WeilElement.generator(W, 1, 1)
    zero = WeilElement.zero(W)
    return RigHom(wn, W, [[x if j == i else zero for j in range(1, n + 1)]],
                  _validated=True)


def inclusion_hom(a: WeilObject) -> RigHom:
    """The basis inclusion A -> W (x) A (the zero section's component at A)."""
    return component("e", a)


# -- the functors T and T_n ---------------------------------------------------


def T_obj(a: WeilObject) -> WeilObject:
    return W.tensor(a)


def T_n_obj(n: int, a: WeilObject) -> WeilObject:
    if n < 0:
        raise ValueError("n must be >= 0")
    return WeilObject((n,) + a.widths) if n else a


def T_hom(f: RigHom) -> RigHom:
    return tensor_hom(RigHom.identity(W), f)


def T_n_hom(n: int, f: RigHom) -> RigHom:
    if n == 0:
        return f
    return tensor_hom(RigHom.identity(WeilObject((n,))), f)


def T_power_obj(m: int, a: WeilObject) -> WeilObject:
    for _ in range(m):
        a = T_obj(a)
    return a


def T_power_hom(m: int, f: RigHom) -> RigHom:
    for _ in range(m):
        f = T_hom(f)
    return f


# -- components ---------------------------------------------------------------

_GENERATORS = {
    "p": bundle_proj_hom,
    "e": zero_section_hom,
    "m": fibre_add_hom,
    "l": vertical_lift_hom,
    "c": flip_hom,
}


def component(name: str, a: WeilObject, n: int = None, i: int = None) -> RigHom:
    """The component at A of a generating transformation.

    Sources and targets: p: TA -> A, e: A -> TA, m: T_2 A -> TA,
    l: TA -> T^2 A, c: T^2 A -> T^2 A, proj(n, i): T_n A -> TA.
    """
    if name == "proj":
        generating = proj_hom(n, i)
    elif name in _GENERATORS:
        generating = _GENERATORS[name]()
    else:
        raise BadName(f"unknown component name {name!r}")
    return tensor_hom(generating, RigHom.identity(a))


# -- pairing into chosen fibre products ---------------------------------------


def _split_by_position(u: WeilElement, pos: int):
    """Split an element of ... (x) W (x) ... by the pick at `pos` (0-based):
    returns (base coeffs with pick 0, residue coeffs with the slot cleared)."""
    base, part = {}, {}
    for m, c in u.coeffs.items():
        if m[pos]:
            cleared = m[:pos] + (0,) + m[pos + 1 :]
            part[cleared] = c
        else:
            base[m] = c
    return base, part


def pairing_at(legs, n: int, pos: int, base: RigHom = None) -> RigHom:
    """The unique hom into a width-n fibre-product slot at tensor position `pos`.

    Each leg maps Z into an object whose factor at `pos` has width 1; the
    result maps Z into the same object with that factor widened to n, such
    that collapsing the slot onto its i-th generator recovers leg i.  The
    legs must agree away from the slot (the cone condition over the bundle
    projection); otherwise NotACone is raised.  For n = 0 the slot is
    dropped entirely and `base` must supply the common projection.

    Solving is exact: images are assembled generator by generator from the
    split of each leg's image at `pos`, so the factorization is unique by
    construction.
    """
    if n == 0:
        if base is None:
            raise NotACone("n = 0 pairing needs the base map")
        return base
    if len(legs) != n:
        raise NotACone(f"expected {n} legs, got {len(legs)}")
    first = legs[0]
    z = first.dom
    ambient = first.cod
    if ambient.widths[pos] != 1:
        raise NotACone(f"position {pos} of {ambient} is not a width-1 slot")
    for leg in legs:
        if leg.dom != z or leg.cod != ambient:
            raise NotACone("pairing legs must share source and target")
    target = WeilObject(
        ambient.widths[:pos] + (n,) + ambient.widths[pos + 1 :]
    )

    def widen(m, pick):
        return m[:pos] + (pick,) + m[pos + 1 :]

    images = []
    for fi, width in enumerate(z.widths, start=1):
        row = []
        for j in range(1, width + 1):
            splits = [_split_by_position(leg.image(fi, j), pos) for leg in legs]
            base_coeffs = splits[0][0]
            for other_base, _ in splits[1:]:
                if other_base != base_coeffs:
                    raise NotACone(
                        f"legs disagree under the projection at generator ({fi},{j})"
                    )
            coeffs = {widen(m, 0): c for m, c in base_coeffs.items()}
            for i, (_, part) in enumerate(splits, start=1):
                for m, c in part.items():
                    key = widen(m, i)
                    coeffs[key] = coeffs.get(key, 0) + c
            row.append(WeilElement(target, coeffs, _validated=True))
        images.append(row)
    return RigHom(z, target, images, _validated=True)


def pairing(cone, n: int, base: RigHom = None) -> RigHom:
    """The unique hom Z -> T_n A through the front fibre-product slot."""
    return pairing_at(cone, n, 0, base=base)


def fibre_diagonal(a: WeilObject, n: int) -> RigHom:
    """The n-fold diagonal TA -> T_n A, pairing the identity with itself."""
    return pairing([RigHom.identity(T_obj(a))] * n, n)


# -- the equaliser composite ---------------------------------------------------


def w_composite(a: WeilObject) -> RigHom:
    """The composite T_2 A -> T^2 A built from the lift and the zero section.

    Assembled as T(m) after the pairing of (l . proj_1) and (e_T . proj_2)
    into the T-applied fibre product; no closed form is trusted or
    hand-coded here.
    """
    lift = component("l", a)
    zero_at_ta = component("e", T_obj(a))
    legs = [
        compose(lift, component("proj", a, n=2, i=1)),
        compose(zero_at_ta, component("proj", a, n=2, i=2)),
    ]
    inner = pairing_at(legs, 2, 1)
    return compose(T_hom(component("m", a)), inner)


def equaliser_pair(a: WeilObject):
    """The parallel pair T^2 A -> TA equalised by ``w_composite``:
    T(p) and e . p . p_T."""
    tp = T_hom(component("p", a))
    collapse = compose_many(
        component("e", a), component("p", a), component("p", T_obj(a))
    )
    return tp, collapse


def equaliser_factor(a: WeilObject, h: RigHom):
    """The unique g with w_composite(a) . g = h, or None when h does not
    equalise the pair.

    An element of T^2 A splits by the picks of the two leading slots; h
    equalises exactly when every image has no pure-first-slot part, and then
    the factorization reads off the remaining parts.
    """
    tp, collapse = equaliser_pair(a)
    if compose(tp, h) != compose(collapse, h):
        return None
    z = h.dom
    target = T_n_obj(2, a)
    images = []
    for fi, width in enumerate(z.widths, start=1):
        row = []
        for j in range(1, width + 1):
            u = h.image(fi, j)
            coeffs = {}
            for m, c in u.coeffs.items():
                first, second, rest = m[0], m[1], m[2:]
                if first and second:  # the xy part, sent to the first generator
                    coeffs[(1,) + rest] = coeffs.get((1,) + rest, 0) + c
                elif second:  # the pure y part, sent to the second generator
                    coeffs[(2,) + rest] = coeffs.get((2,) + rest, 0) + c
                elif first:  # pure x part: cannot happen for an equalising hom
                    return None
                else:
                    coeffs[(0,) + rest] = coeffs.get((0,) + rest, 0) + c
            row.append(WeilElement(target, coeffs, _validated=True))
        images.append(row)
    g = RigHom(z, target, images, _validated=True)
    if compose(w_composite(a), g) != h:
        return None
    return g


# -- axiom verification ---------------------------------------------------------

#: Informational note attached to every axiom report.
FLIP_FIXES_LIFT_NOTE = (
    "the composite of the flip after the vertical lift has source T and "
    "target T^2, so an equation ending in the flip alone would equate maps "
    "of different types; the well-typed equality c . l = l is what is "
    "verified here"
)


def _diagram_checks(a: WeilObject):
    """Yield (diagram_id, lhs, rhs) triples for every axiom at the object A."""
    ta = T_obj(a)
    p = component("p", a)
    e = component("e", a)
    m = component("m", a)
    lift = component("l", a)
    flip = component("c", a)
    pi1 = component("proj", a, n=2, i=1)
    pi2 = component("proj", a, n=2, i=2)
    ident_ta = RigHom.identity(ta)

    # bundle commutative monoid in the slice over A
    zero_leg = compose(e, p)
    yield (
        "monoid.unit_left",
        compose(m, pairing([zero_leg, ident_ta], 2)),
        ident_ta,
    )
    yield (
        "monoid.unit_right",
        compose(m, pairing([ident_ta, zero_leg], 2)),
        ident_ta,
    )
    proj3 = [component("proj", a, n=3, i=i) for i in (1, 2, 3)]
    add_left = pairing([compose(m, pairing([proj3[0], proj3[1]], 2)), proj3[2]], 2)
    add_right = pairing([proj3[0], compose(m, pairing([proj3[1], proj3[2]], 2))], 2)
    yield ("monoid.assoc", compose(m, add_left), compose(m, add_right))
    yield ("monoid.comm", compose(m, pairing([pi2, pi1], 2)), m)
    yield ("monoid.bundle", compose(p, m), compose(p, pi1))

    # vertical lift compatibilities
    yield ("lift_compat.proj", compose(T_hom(p), lift), compose(e, p))
    yield ("lift_compat.zero", compose(T_hom(e), e), compose(lift, e))
    lift_pair = pairing_at([compose(lift, pi1), compose(lift, pi2)], 2, 1)
    yield ("lift_compat.add", compose(T_hom(m), lift_pair), compose(lift, m))

    # canonical flip compatibilities
    yield ("flip_compat.proj", compose(component("p", ta), flip), T_hom(p))
    yield ("flip_compat.zero", compose(flip, T_hom(e)), component("e", ta))
    flip_pair = pairing(
        [compose(flip, T_hom(pi1)), compose(flip, T_hom(pi2))], 2
    )
    yield (
        "flip_compat.add",
        compose(component("m", ta), flip_pair),
        compose(flip, T_hom(m)),
    )

    # flip involution, lift fixed point, coassociativity, braid, exchange
    yield ("flip.involution", compose(flip, flip), RigHom.identity(flip.dom))
    yield ("flip.fixes_lift", compose(flip, lift), lift)
    lift_at_ta = component("l", ta)
    yield ("lift.coassoc", compose(T_hom(lift), lift), compose(lift_at_ta, lift))
    flip_at_ta = component("c", ta)
    t_flip = T_hom(flip)
    yield (
        "flip.braid",
        compose_many(t_flip, flip_at_ta, t_flip),
        compose_many(flip_at_ta, t_flip, flip_at_ta),
    )
    yield (
        "flip.lift_exchange",
        compose_many(flip_at_ta, t_flip, lift_at_ta),
        compose(T_hom(lift), flip),
    )

    # the equaliser identity for w
    w = w_composite(a)
    tp, collapse = equaliser_pair(a)
    yield ("lift.equalises", compose(tp, w), compose(collapse, w))


_NATURAL_COMPONENTS = ("p", "e", "m", "l", "c")


def naturality_failures(a, b, homs, proj_widths=(2, 3)):
    """Check each generating component's naturality square against every hom.

    Returns {diagram_id: counterexample hom} for the squares that fail.
    """
    comps = {
        name: (component(name, a), component(name, b))
        for name in _NATURAL_COMPONENTS
    }
    projs = {
        (n, i): (component("proj", a, n=n, i=i), component("proj", b, n=n, i=i))
        for n in proj_widths
        for i in range(1, n + 1)
    }
    failed = {}

    def run(diagram_id, lhs, rhs, f):
        if diagram_id not in failed and lhs != rhs:
            failed[diagram_id] = f

    for f in homs:
        tf = T_hom(f)
        t2f = T_hom(tf)
        p_a, p_b = comps["p"]
        e_a, e_b = comps["e"]
        m_a, m_b = comps["m"]
        l_a, l_b = comps["l"]
        c_a, c_b = comps["c"]
        run("naturality.p", compose(p_b, tf), compose(f, p_a), f)
        run("naturality.e", compose(e_b, f), compose(tf, e_a), f)
        run("naturality.m", compose(m_b, T_n_hom(2, f)), compose(tf, m_a), f)
        run("naturality.l", compose(l_b, tf), compose(t2f, l_a), f)
        run("naturality.c", compose(c_b, t2f), compose(t2f, c_a), f)
        for (n, i), (pi_a, pi_b) in projs.items():
            run(
                f"naturality.proj_{n}_{i}",
                compose(pi_b, T_n_hom(n, f)),
                compose(tf, pi_a),
                f,
            )
    return failed


def verify_axioms(
    max_factors: int,
    max_width: int,
    coeff_bound: int,
    hom_cap: int = DEFAULT_ENUM_CAP,
) -> VerificationReport:
    """Check every tangent-category axiom over the bounded object universe.

    Diagram checks run at every object with at most ``max_factors`` factors
    of width at most ``max_width``; naturality of each generating component
    is checked against every hom produced by the bounded enumeration at
    ``coeff_bound`` between such objects, skipping (and reporting) pairs
    whose enumeration exceeds ``hom_cap``.
    """
    if max_factors < 1 or max_width < 1 or coeff_bound < 1:
        raise ValueError("bounds must be >= 1")
    report = VerificationReport(
        "tangent axioms",
        bounds={
            "max_factors": max_factors,
            "max_width": max_width,
            "coeff_bound": coeff_bound,
            "hom_cap": hom_cap,
        },
    )
    report.notes.append("flip.fixes_lift: " + FLIP_FIXES_LIFT_NOTE)
    universe = objects_within(max_factors, max_width)
    for a in universe:
        try:
            for diagram_id, lhs, rhs in _diagram_checks(a):
                report.check(diagram_id, str(a), lhs, rhs)
        except NotACone as err:
            report.record(
                "diagram.construction", str(a), False, counterexample={"error": str(err)}
            )
    for a in universe:
        for b in universe:
            subject = f"{a} -> {b}"
            try:
                homs = enumerate_homs(a, b, coeff_bound, cap=hom_cap)
            except BudgetExceeded:
                report.skip(
                    "naturality",
                    subject,
                    f"hom enumeration exceeds cap {hom_cap}",
                )
                continue
            failed = naturality_failures(a, b, homs)
            if failed:
                for diagram_id, f in sorted(failed.items()):
                    report.record(
                        diagram_id,
                        subject,
                        False,
                        counterexample={"hom": f.to_json()},
                    )
            else:
                report.record("naturality", subject, True)
    return report


# -- universality of the chosen tangent limits ----------------------------------


def verify_universality(
    a: WeilObject,
    n: int,
    coeff_bound: int,
    z_objects=None,
    hom_cap: int = DEFAULT_ENUM_CAP,
    t_powers=(0, 1, 2),
) -> VerificationReport:
    """Check that the chosen fibre products and equalisers are limits.

    For each probe object Z: every bounded cone over the n-fold bundle span
    at A factors uniquely through T_n A (uniqueness checked against every
    enumerated candidate); every bounded hom into T^2 A equalising the
    structural pair factors uniquely through ``w_composite``.  The fibre
    product check is repeated under T^m for each m in ``t_powers``, which is
    the preservation statement for the chosen limits.
    """
    if n < 1 or coeff_bound < 1:
        raise ValueError("bounds must be >= 1")
    if z_objects is None:
        z_objects = [NAT, W, W2]
    report = VerificationReport(
        "tangent limit universality",
        bounds={
            "object": str(a),
            "n": n,
            "coeff_bound": coeff_bound,
            "hom_cap": hom_cap,
            "probes": [str(z) for z in z_objects],
        },
    )
    for m_power in t_powers:
        _check_pullback_universality(report, a, n, m_power, z_objects, coeff_bound, hom_cap)
    _check_equaliser_universality(report, a, z_objects, coeff_bound, hom_cap)
    return report


def _check_pullback_universality(report, a, n, m_power, z_objects, bound, cap):
    """Universality of T^m(T_n A) with projections T^m(proj_i) against all
    bounded cones, by bucketing candidate homs on their projection tuples."""
    prefix = f"pullback.T^{m_power}" if m_power else "pullback"
    ta = T_power_obj(m_power, T_obj(a))
    tna = T_power_obj(m_power, T_n_obj(n, a))
    projs = [
        T_power_hom(m_power, component("proj", a, n=n, i=i)) for i in range(1, n + 1)
    ]
    tp = T_power_hom(m_power, component("p", a))
    for z in z_objects:
        subject = f"{z} over {a}, n={n}"
        try:
            legs = enumerate_homs(z, ta, bound, cap=cap)
            candidates = enumerate_homs(z, tna, bound, cap=cap)
        except BudgetExceeded:
            report.skip(prefix + ".universal", subject, f"enumeration exceeds cap {cap}")
            continue
        by_projection = {}
        for h in candidates:
            key = tuple(compose(pi, h).canon_key() for pi in projs)
            by_projection.setdefault(key, []).append(h)
        by_base = {}
        for f in legs:
            by_base.setdefault(compose(tp, f).canon_key(), []).append(f)
        ok = True
        counterexample = None
        try:
            for group in by_base.values():
                if not ok:
                    break
                for cone in _cones_from(group, n, cap):
                    built = pairing_at(cone, n, m_power)
                    key = tuple(k.canon_key() for k in cone)
                    matches = by_projection.get(key, [])
                    if [built] != matches:
                        ok = False
                        counterexample = {
                            "cone": [f.to_json() for f in cone],
                            "matches": len(matches),
                        }
                        break
                    if any(compose(pi, built) != leg for pi, leg in zip(projs, cone)):
                        ok = False
                        counterexample = {"cone": [f.to_json() for f in cone]}
                        break
        except BudgetExceeded:
            report.skip(prefix + ".universal", subject, f"cone sweep exceeds cap {cap}")
            continue
        report.record(prefix + ".universal", subject, ok, counterexample)


def _cones_from(group, n, cap):
    """All n-tuples from a list of homs sharing a base composite."""
    count = len(group) ** n
    if count > cap:
        raise BudgetExceeded(f"{count} cones exceed cap {cap}")
    return itertools.product(group, repeat=n)


def _check_equaliser_universality(report, a, z_objects, bound, cap):
    w = w_composite(a)
    tp, collapse = equaliser_pair(a)
    t2a = T_power_obj(2, a)
    t_2a = T_n_obj(2, a)
    for z in z_objects:
        subject = f"{z} over {a}"
        try:
            into_t2 = enumerate_homs(z, t2a, bound, cap=cap)
            candidates = enumerate_homs(z, t_2a, bound, cap=cap)
        except BudgetExceeded:
            report.skip("equaliser.universal", subject, f"enumeration exceeds cap {cap}")
            continue
        by_composite = {}
        for g in candidates:
            by_composite.setdefault(compose(w, g).canon_key(), []).append(g)
        ok = True
        counterexample = None
        for h in into_t2:
            if compose(tp, h) != compose(collapse, h):
                if by_composite.get(h.canon_key()):
                    ok = False
                    counterexample = {"hom": h.to_json(), "reason": "non-equalising factors"}
                    break
                continue
            g = equaliser_factor(a, h)
            matches = by_composite.get(h.canon_key(), [])
            if g is None or [g] != matches:
                ok = False
                counterexample = {"hom": h.to_json(), "matches": len(matches)}
                break
        report.record("equaliser.universal", subject, ok, counterexample)
