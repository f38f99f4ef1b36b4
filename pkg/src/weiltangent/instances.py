"""A uniform interface for finitely presented tangent categories.

An instance packages a bounded object universe, a bounded hom enumeration,
composition, the tangent functor with its chosen fibre products and
equalisers, and the generating structure components.  Two instances ship
here: the Weil-rig category itself (with the tensor action as a fast path)
and a trivial fixture built from a finite category presentation, where the
tangent functor is the identity and every structure map is an identity.

``verify_instance_axioms`` re-runs the tangent-axiom sweep generically
through the interface, and ``check_tangent_functor`` verifies the
compatibility squares for a (lax or strong) tangent functor between
instances, including universality of the transported tangent limits for
strong functors.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from . import tangent, weil
from .errors import BudgetExceeded, InvalidPresentation, NotACone
from .report import VerificationReport
from .weil import DEFAULT_ENUM_CAP, RigHom, WeilObject, objects_within


class TangentCategoryInstance:
    """Interface base; methods raise NotImplementedError unless overridden."""

    name = "instance"

    # category structure
    def objects(self):
        raise NotImplementedError

    def homs(self, x, y):
        raise NotImplementedError

    def identity(self, x):
        raise NotImplementedError

    def compose(self, g, f):
        raise NotImplementedError

    def dom(self, f):
        raise NotImplementedError

    def cod(self, f):
        raise NotImplementedError

    # tangent structure with chosen limits
    def T(self, x):
        raise NotImplementedError

    def T_hom(self, f):
        raise NotImplementedError

    def T_n(self, n, x):
        raise NotImplementedError

    def proj(self, n, i, x):
        raise NotImplementedError

    def component(self, name, x):
        raise NotImplementedError

    def pairing(self, legs, n, base=None, level=0):
        """Pair a cone into the chosen fibre product under `level` many T's."""
        raise NotImplementedError

    def w(self, x):
        raise NotImplementedError

    def equaliser_factor(self, x, h):
        raise NotImplementedError

    # the Weil action; instances may provide a fast path
    def star(self, a: WeilObject, x):
        out = x
        for width in reversed(a.widths):
            out = self.T_n(width, out)
        return out

    def star_hom(self, f: RigHom, x, depth: int = 6):
        from .coherence import eval_term, express

        return eval_term(express(f, depth).term, self, x)

    def obj_name(self, x) -> str:
        return str(x)


class WeilInstance(TangentCategoryInstance):
    """The category of Weil rigs with its declared verification bounds."""

    name = "weil"

    def __init__(
        self,
        max_factors: int = 2,
        max_width: int = 2,
        coeff_bound: int = 1,
        hom_cap: int = DEFAULT_ENUM_CAP,
    ):
        self.max_factors = max_factors
        self.max_width = max_width
        self.coeff_bound = coeff_bound
        self.hom_cap = hom_cap

    def bounds(self):
        return {
            "max_factors": self.max_factors,
            "max_width": self.max_width,
            "coeff_bound": self.coeff_bound,
            "hom_cap": self.hom_cap,
        }

    def objects(self):
        return objects_within(self.max_factors, self.max_width)

    def homs(self, x, y):
        return weil.enumerate_homs(x, y, self.coeff_bound, cap=self.hom_cap)

    def identity(self, x):
        return RigHom.identity(x)

    def compose(self, g, f):
        return weil.compose(g, f)

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def T(self, x):
        return tangent.T_obj(x)

    def T_hom(self, f):
        return tangent.T_hom(f)

    def T_n(self, n, x):
        return tangent.T_n_obj(n, x)

    def proj(self, n, i, x):
        return tangent.component("proj", x, n=n, i=i)

    def component(self, name, x):
        return tangent.component(name, x)

    def pairing(self, legs, n, base=None, level=0):
        if n == 0:
            return tangent.pairing_at(legs, 0, level, base=base)
        return tangent.pairing_at(legs, n, level)

    def w(self, x):
        return tangent.w_composite(x)

    def equaliser_factor(self, x, h):
        return tangent.equaliser_factor(x, h)

    def star(self, a: WeilObject, x):
        return a.tensor(x)

    def star_hom(self, f: RigHom, x, depth: int = 6):
        return weil.tensor_hom(f, RigHom.identity(x))


def instance_weil(**kwargs) -> WeilInstance:
    return WeilInstance(**kwargs)


# -- finite category presentations and the trivial tangent structure ----------


@dataclass(frozen=True)
class FiniteMorphism:
    src: str
    dst: str
    word: tuple  # canonical representative word of generator names

    def __str__(self):
        label = ".".join(self.word) if self.word else f"id_{self.src}"
        return f"{label}:{self.src}->{self.dst}"


@dataclass
class FiniteCategory:
    """A finite category saturated from a generators-and-relations presentation.

    Morphisms are congruence classes of composable generator words (words are
    typed by their source object, so identities of distinct objects never
    merge).  The congruence is computed on all words up to a length cap; a
    presentation that keeps producing irreducible extendable words at the cap
    does not denote a finite category at desk scale and is rejected.  The
    final table is re-validated exhaustively by :meth:`validate`.
    """

    objects: list
    arrows: dict  # name -> (src, dst)
    relations: list  # pairs of words
    max_word_length: int = 8
    max_morphisms: int = 128

    def __post_init__(self):
        self._saturate()

    def _word_type(self, word):
        if not word:
            return None
        src = self.arrows[word[0]][0]
        at = src
        for name in word:
            a_src, a_dst = self.arrows[name]
            if a_src != at:
                return None
            at = a_dst
        return (src, at)

    def _saturate(self):
        for name, (src, dst) in self.arrows.items():
            if src not in self.objects or dst not in self.objects:
                raise InvalidPresentation(f"arrow {name} touches unknown objects")
        for lhs, rhs in self.relations:
            lt = self._word_type(tuple(lhs))
            rt = self._word_type(tuple(rhs))
            if lhs and lt is None:
                raise InvalidPresentation(f"relation word {lhs} not composable")
            if rhs and rt is None:
                raise InvalidPresentation(f"relation word {rhs} not composable")
            if lhs and rhs and lt != rt:
                raise InvalidPresentation(
                    f"relation {lhs} = {rhs} equates different hom-sets"
                )
            if (not lhs and rt and rt[0] != rt[1]) or (
                not rhs and lt and lt[0] != lt[1]
            ):
                raise InvalidPresentation("a word equated with an identity must be an endomap")

        # nodes are (src, word); collect all composable words up to the cap
        nodes = {(obj, ()) for obj in self.objects}
        frontier = list(nodes)
        for _ in range(self.max_word_length):
            new = []
            for src, word in frontier:
                at = self.arrows[word[-1]][1] if word else src
                for name, (a_src, _) in self.arrows.items():
                    if a_src != at:
                        continue
                    node = (src, word + (name,))
                    if node not in nodes:
                        nodes.add(node)
                        new.append(node)
            frontier = new
            if not new:
                break

        parent = {}

        def find(node):
            parent.setdefault(node, node)
            while parent[node] != node:
                parent[node] = parent[parent[node]]
                node = parent[node]
            return node

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                keep = min(ra, rb, key=lambda n: (len(n[1]), n[1]))
                drop = ra if keep == rb else rb
                parent[drop] = keep

        node_list = sorted(nodes)
        changed = True
        while changed:
            changed = False
            for lhs, rhs in self.relations:
                lhs, rhs = tuple(lhs), tuple(rhs)
                for pattern, replacement in ((lhs, rhs), (rhs, lhs)):
                    for src, word in node_list:
                        for i in range(len(word) - len(pattern) + 1):
                            if word[i : i + len(pattern)] == pattern:
                                other = (
                                    src,
                                    word[:i] + replacement + word[i + len(pattern) :],
                                )
                                if other in nodes:
                                    a, b = (src, word), other
                                    if find(a) != find(b):
                                        union(a, b)
                                        changed = True

        morphisms = {}
        for node in node_list:
            rep = find(node)
            if rep in morphisms:
                continue
            src, word = rep
            typ = self._word_type(word) or (src, src)
            morphisms[rep] = FiniteMorphism(src, typ[1], word)
        if len(morphisms) > self.max_morphisms:
            raise InvalidPresentation(
                f"presentation does not close within {self.max_morphisms} morphisms"
            )

        # closure: an irreducible word at the cap that still extends means
        # the presentation may generate new morphisms forever
        for src, word in node_list:
            if len(word) == self.max_word_length and find((src, word)) == (src, word):
                at = self.arrows[word[-1]][1]
                if any(a_src == at for (a_src, _) in self.arrows.values()):
                    raise InvalidPresentation(
                        "presentation does not close within the word-length cap"
                    )

        self._find = find
        self._nodes = nodes
        self._morphisms = morphisms

    def all_morphisms(self):
        return sorted(self._morphisms.values(), key=lambda m: (m.src, m.dst, m.word))

    def _class_of(self, src, word):
        node = (src, tuple(word))
        if node not in self._nodes:
            raise InvalidPresentation(f"word {word} exceeds the saturation cap")
        return self._morphisms[self._find(node)]

    def compose(self, g: FiniteMorphism, f: FiniteMorphism) -> FiniteMorphism:
        if f.dst != g.src:
            raise InvalidPresentation(f"cannot compose {g} after {f}")
        out = self._class_of(f.src, f.word)
        for name in g.word:
            out = self._class_of(out.src, out.word + (name,))
        return out

    def identity(self, obj) -> FiniteMorphism:
        return self._morphisms[self._find((obj, ()))]

    def hom_set(self, x, y):
        return [m for m in self.all_morphisms() if m.src == x and m.dst == y]

    def validate(self):
        """Exhaustive closure and associativity check over the saturated table."""
        ms = self.all_morphisms()
        for f in ms:
            for g in ms:
                if f.dst != g.src:
                    continue
                gf = self.compose(g, f)
                if gf not in ms:
                    raise InvalidPresentation("composition leaves the table")
                for h in ms:
                    if g.dst != h.src:
                        continue
                    if self.compose(h, self.compose(g, f)) != self.compose(
                        self.compose(h, g), f
                    ):
                        raise InvalidPresentation("composition is not associative")
        for f in ms:
            if self.compose(f, self.identity(f.src)) != f:
                raise InvalidPresentation("left identity fails")
            if self.compose(self.identity(f.dst), f) != f:
                raise InvalidPresentation("right identity fails")
        return True

    @classmethod
    def from_json(cls, data) -> "FiniteCategory":
        return cls(
            objects=list(data["objects"]),
            arrows={a["name"]: (a["src"], a["dst"]) for a in data["arrows"]},
            relations=[
                (tuple(lhs), tuple(rhs)) for lhs, rhs in data.get("relations", [])
            ],
        )

    @classmethod
    def from_file(cls, path) -> "FiniteCategory":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


class TrivialInstance(TangentCategoryInstance):
    """Tangent structure on a finite category with T = Id and identity maps.

    Every tangent limit is degenerate: T_n X = X with identity projections,
    and the equaliser fork is an identity equalising a pair of identities.
    """

    name = "trivial"

    def __init__(self, category: FiniteCategory):
        category.validate()
        self.category = category

    def objects(self):
        return list(self.category.objects)

    def homs(self, x, y):
        return self.category.hom_set(x, y)

    def identity(self, x):
        return self.category.identity(x)

    def compose(self, g, f):
        return self.category.compose(g, f)

    def dom(self, f):
        return f.src

    def cod(self, f):
        return f.dst

    def T(self, x):
        return x

    def T_hom(self, f):
        return f

    def T_n(self, n, x):
        return x

    def proj(self, n, i, x):
        return self.identity(x)

    def component(self, name, x):
        if name == "proj":
            return self.identity(x)
        if name not in ("p", "e", "m", "l", "c"):
            from .errors import BadName

            raise BadName(f"unknown component name {name!r}")
        return self.identity(x)

    def pairing(self, legs, n, base=None, level=0):
        if n == 0:
            if base is None:
                raise NotACone("n = 0 pairing needs the base map")
            return base
        first = legs[0]
        for leg in legs[1:]:
            if leg != first:
                raise NotACone("legs over the identity projection must coincide")
        return first

    def w(self, x):
        return self.identity(x)

    def equaliser_factor(self, x, h):
        return h

    def star(self, a: WeilObject, x):
        return x

    def star_hom(self, f: RigHom, x, depth: int = 6):
        return self.identity(x)


def instance_trivial(presentation) -> TrivialInstance:
    """Build the trivial tangent instance from a presentation (dict or path)."""
    if isinstance(presentation, FiniteCategory):
        cat = presentation
    elif isinstance(presentation, dict):
        cat = FiniteCategory.from_json(presentation)
    else:
        cat = FiniteCategory.from_file(presentation)
    return TrivialInstance(cat)


ARROW_CATEGORY = {
    "objects": ["0", "1"],
    "arrows": [{"name": "f", "src": "0", "dst": "1"}],
    "relations": [],
}

ONE_OBJECT = {"objects": ["*"], "arrows": [], "relations": []}


# -- the generic axiom checker --------------------------------------------------


def _generic_diagram_checks(inst: TangentCategoryInstance, x):
    """The tangent axioms at one object, phrased through the interface."""
    tx = inst.T(x)
    p = inst.component("p", x)
    e = inst.component("e", x)
    m = inst.component("m", x)
    lift = inst.component("l", x)
    flip = inst.component("c", x)
    pi1 = inst.proj(2, 1, x)
    pi2 = inst.proj(2, 2, x)
    ident_tx = inst.identity(tx)
    comp = inst.compose

    def seq(*homs):
        out = homs[-1]
        for h in reversed(homs[:-1]):
            out = comp(h, out)
        return out

    zero_leg = comp(e, p)
    yield ("monoid.unit_left", comp(m, inst.pairing([zero_leg, ident_tx], 2)), ident_tx)
    yield ("monoid.unit_right", comp(m, inst.pairing([ident_tx, zero_leg], 2)), ident_tx)
    proj3 = [inst.proj(3, i, x) for i in (1, 2, 3)]
    add_left = inst.pairing(
        [comp(m, inst.pairing([proj3[0], proj3[1]], 2)), proj3[2]], 2
    )
    add_right = inst.pairing(
        [proj3[0], comp(m, inst.pairing([proj3[1], proj3[2]], 2))], 2
    )
    yield ("monoid.assoc", comp(m, add_left), comp(m, add_right))
    yield ("monoid.comm", comp(m, inst.pairing([pi2, pi1], 2)), m)
    yield ("monoid.bundle", comp(p, m), comp(p, pi1))

    yield ("lift_compat.proj", comp(inst.T_hom(p), lift), comp(e, p))
    yield ("lift_compat.zero", comp(inst.T_hom(e), e), comp(lift, e))
    lift_pair = inst.pairing([comp(lift, pi1), comp(lift, pi2)], 2, level=1)
    yield ("lift_compat.add", comp(inst.T_hom(m), lift_pair), comp(lift, m))

    yield ("flip_compat.proj", comp(inst.component("p", tx), flip), inst.T_hom(p))
    yield ("flip_compat.zero", comp(flip, inst.T_hom(e)), inst.component("e", tx))
    flip_pair = inst.pairing(
        [comp(flip, inst.T_hom(pi1)), comp(flip, inst.T_hom(pi2))], 2
    )
    yield (
        "flip_compat.add",
        comp(inst.component("m", tx), flip_pair),
        comp(flip, inst.T_hom(m)),
    )

    yield ("flip.involution", comp(flip, flip), inst.identity(inst.dom(flip)))
    yield ("flip.fixes_lift", comp(flip, lift), lift)
    lift_at_tx = inst.component("l", tx)
    flip_at_tx = inst.component("c", tx)
    t_flip = inst.T_hom(flip)
    yield ("lift.coassoc", comp(inst.T_hom(lift), lift), comp(lift_at_tx, lift))
    yield (
        "flip.braid",
        seq(t_flip, flip_at_tx, t_flip),
        seq(flip_at_tx, t_flip, flip_at_tx),
    )
    yield (
        "flip.lift_exchange",
        seq(flip_at_tx, t_flip, lift_at_tx),
        comp(inst.T_hom(lift), flip),
    )

    w = inst.w(x)
    tp = inst.T_hom(p)
    collapse = seq(e, p, inst.component("p", tx))
    yield ("lift.equalises", comp(tp, w), comp(collapse, w))


def verify_instance_axioms(inst: TangentCategoryInstance) -> VerificationReport:
    """Run the tangent-axiom sweep generically through an instance's interface.

    On the Weil instance this must reproduce exactly the verdicts of
    ``tangent.verify_axioms`` at the instance's declared bounds; the two
    paths share no hom-building code, which is the point of re-running.
    """
    bounds = inst.bounds() if hasattr(inst, "bounds") else {}
    report = VerificationReport(
        f"tangent axioms via instance {inst.name!r}", bounds=bounds
    )
    objects = inst.objects()
    for x in objects:
        try:
            for diagram_id, lhs, rhs in _generic_diagram_checks(inst, x):
                report.check(diagram_id, inst.obj_name(x), lhs, rhs)
        except NotACone as err:
            report.record(
                "diagram.construction",
                inst.obj_name(x),
                False,
                counterexample={"error": str(err)},
            )
    for x in objects:
        for y in objects:
            subject = f"{inst.obj_name(x)} -> {inst.obj_name(y)}"
            try:
                homs = inst.homs(x, y)
            except BudgetExceeded:
                report.skip("naturality", subject, "hom enumeration exceeds cap")
                continue
            failed = _generic_naturality_failures(inst, x, y, homs)
            if failed:
                for diagram_id, f in sorted(failed.items()):
                    report.record(
                        diagram_id, subject, False, counterexample={"hom": str(f)}
                    )
            else:
                report.record("naturality", subject, True)
    return report


def _generic_naturality_failures(inst, x, y, homs):
    comp = inst.compose
    comps = {
        name: (inst.component(name, x), inst.component(name, y))
        for name in ("p", "e", "m", "l", "c")
    }
    projs = {
        (n, i): (inst.proj(n, i, x), inst.proj(n, i, y))
        for n in (2, 3)
        for i in range(1, n + 1)
    }
    failed = {}

    def run(diagram_id, lhs, rhs, f):
        if diagram_id not in failed and lhs != rhs:
            failed[diagram_id] = f

    def t_n_hom(n, f):
        legs = [comp(inst.T_hom(f), inst.proj(n, i, x)) for i in range(1, n + 1)]
        return inst.pairing(legs, n)

    for f in homs:
        tf = inst.T_hom(f)
        t2f = inst.T_hom(tf)
        p_x, p_y = comps["p"]
        e_x, e_y = comps["e"]
        m_x, m_y = comps["m"]
        l_x, l_y = comps["l"]
        c_x, c_y = comps["c"]
        run("naturality.p", comp(p_y, tf), comp(f, p_x), f)
        run("naturality.e", comp(e_y, f), comp(tf, e_x), f)
        run("naturality.m", comp(m_y, t_n_hom(2, f)), comp(tf, m_x), f)
        run("naturality.l", comp(l_y, tf), comp(t2f, l_x), f)
        run("naturality.c", comp(c_y, t2f), comp(t2f, c_x), f)
        for (n, i), (pi_x, pi_y) in projs.items():
            run(
                f"naturality.proj_{n}_{i}",
                comp(pi_y, t_n_hom(n, f)),
                comp(tf, pi_x),
                f,
            )
    return failed


# -- tangent functors ------------------------------------------------------------


@dataclass
class TangentFunctorData:
    """A candidate (lax) tangent functor between instances.

    ``obj_map`` and ``hom_map`` are callables; ``phi`` maps an object X of
    the domain to the structural comparison H(T X) -> T(H X) in the
    codomain.  Strong functors additionally claim an invertible phi and
    preservation of the chosen tangent limits.
    """

    name: str
    obj_map: object
    hom_map: object
    phi: object
    strong: bool = True


def identity_functor(inst) -> TangentFunctorData:
    return TangentFunctorData(
        "identity",
        obj_map=lambda x: x,
        hom_map=lambda f: f,
        phi=lambda x: inst.identity(inst.T(x)),
        strong=True,
    )


def tangent_endofunctor(inst) -> TangentFunctorData:
    """H = T with the canonical flip as the comparison; a tangent functor."""
    return TangentFunctorData(
        "tangent",
        obj_map=inst.T,
        hom_map=inst.T_hom,
        phi=lambda x: inst.component("c", x),
        strong=True,
    )


def collapse_functor(inst: WeilInstance) -> TangentFunctorData:
    """The constant functor onto N; its only comparison is the zero section.

    The literal identity comparison would not even typecheck (its source is
    N but its target is T N = W), so the unique well-typed choice stands in;
    the functor still fails to transport the tangent limits universally,
    which is what the checker must detect.
    """
    nat = weil.NAT
    return TangentFunctorData(
        "collapse",
        obj_map=lambda x: nat,
        hom_map=lambda f: RigHom.identity(nat),
        phi=lambda x: tangent.component("e", nat),
        strong=True,
    )


def check_tangent_functor(
    functor: TangentFunctorData,
    dom_inst: TangentCategoryInstance,
    cod_inst: TangentCategoryInstance,
    objects=None,
    probe_objects=None,
    pullback_widths=(2,),
) -> VerificationReport:
    """Verify the tangent-functor compatibility squares, componentwise.

    For strong functors this additionally checks that phi has a two-sided
    inverse among the codomain's bounded homs, and that the transported
    fibre-product and equaliser cones remain universal against every bounded
    cone from the codomain's probe objects.  Failures are recorded as data.
    """
    report = VerificationReport(
        f"tangent functor {functor.name!r}",
        bounds={"strong": functor.strong},
    )
    if objects is None:
        objects = dom_inst.objects()
    if probe_objects is None:
        probe_objects = cod_inst.objects()
    H, Hf, phi = functor.obj_map, functor.hom_map, functor.phi
    comp = cod_inst.compose

    def seq(*homs):
        out = homs[-1]
        for h in reversed(homs[:-1]):
            out = comp(h, out)
        return out

    # functoriality on the bounded universe
    for x in objects:
        ok = Hf(dom_inst.identity(x)) == cod_inst.identity(H(x))
        report.record("functor.identity", dom_inst.obj_name(x), ok)
    pair_count = 0
    for x in objects:
        for y in objects:
            try:
                fs = dom_inst.homs(x, y)
            except BudgetExceeded:
                continue
            for z in objects:
                try:
                    gs = dom_inst.homs(y, z)
                except BudgetExceeded:
                    continue
                bad = None
                for f, g in itertools.product(fs, gs):
                    if Hf(dom_inst.compose(g, f)) != comp(Hf(g), Hf(f)):
                        bad = (f, g)
                        break
                pair_count += 1
                if bad:
                    report.record(
                        "functor.composition",
                        f"{dom_inst.obj_name(x)} -> {dom_inst.obj_name(z)}",
                        False,
                        counterexample={"f": str(bad[0]), "g": str(bad[1])},
                    )
    report.record("functor.composition", f"{pair_count} triples", True)

    # naturality of phi
    for x in objects:
        for y in objects:
            try:
                fs = dom_inst.homs(x, y)
            except BudgetExceeded:
                continue
            bad = None
            for f in fs:
                if comp(phi(y), Hf(dom_inst.T_hom(f))) != comp(
                    cod_inst.T_hom(Hf(f)), phi(x)
                ):
                    bad = f
                    break
            if bad is not None:
                report.record(
                    "functor.phi_natural",
                    f"{dom_inst.obj_name(x)} -> {dom_inst.obj_name(y)}",
                    False,
                    counterexample={"hom": str(bad)},
                )
    report.record("functor.phi_natural", "bounded homs", True)

    # the compatibility squares at each object
    for x in objects:
        subject = dom_inst.obj_name(x)
        hx = H(x)
        phi_x = phi(x)
        report.check(
            "functor.zero_section",
            subject,
            comp(phi_x, Hf(dom_inst.component("e", x))),
            cod_inst.component("e", hx),
        )
        report.check(
            "functor.projection",
            subject,
            comp(cod_inst.component("p", hx), phi_x),
            Hf(dom_inst.component("p", x)),
        )
        try:
            add_pair = cod_inst.pairing(
                [comp(phi_x, Hf(dom_inst.proj(2, i, x))) for i in (1, 2)], 2
            )
            report.check(
                "functor.addition",
                subject,
                comp(cod_inst.component("m", hx), add_pair),
                comp(phi_x, Hf(dom_inst.component("m", x))),
            )
        except NotACone as err:
            report.record(
                "functor.addition", subject, False, counterexample={"error": str(err)}
            )
        phi_tx = phi(dom_inst.T(x))
        report.check(
            "functor.lift",
            subject,
            comp(cod_inst.component("l", hx), phi_x),
            seq(cod_inst.T_hom(phi_x), phi_tx, Hf(dom_inst.component("l", x))),
        )
        report.check(
            "functor.flip",
            subject,
            seq(
                cod_inst.component("c", hx),
                cod_inst.T_hom(phi_x),
                phi_tx,
            ),
            seq(cod_inst.T_hom(phi_x), phi_tx, Hf(dom_inst.component("c", x))),
        )

    if not functor.strong:
        return report

    # phi invertibility, searched among bounded homs
    for x in objects:
        subject = dom_inst.obj_name(x)
        phi_x = phi(x)
        src, dst = cod_inst.dom(phi_x), cod_inst.cod(phi_x)
        inverse = None
        try:
            for candidate in cod_inst.homs(dst, src):
                if (
                    comp(candidate, phi_x) == cod_inst.identity(src)
                    and comp(phi_x, candidate) == cod_inst.identity(dst)
                ):
                    inverse = candidate
                    break
        except BudgetExceeded:
            report.skip("functor.phi_invertible", subject, "hom enumeration over cap")
            continue
        report.record(
            "functor.phi_invertible",
            subject,
            inverse is not None,
            None if inverse is not None else {"phi": str(phi_x)},
        )

    # universality of the transported tangent limits
    for x in objects:
        _check_transported_pullbacks(
            report, functor, dom_inst, cod_inst, x, probe_objects, pullback_widths
        )
        _check_transported_equaliser(
            report, functor, dom_inst, cod_inst, x, probe_objects
        )
    return report


def _check_transported_pullbacks(
    report, functor, dom_inst, cod_inst, x, probes, widths
):
    H, Hf, phi = functor.obj_map, functor.hom_map, functor.phi
    comp = cod_inst.compose
    hx = H(x)
    thx = cod_inst.T(hx)
    p_hx = cod_inst.component("p", hx)
    for n in widths:
        image_apex = H(dom_inst.T_n(n, x))
        image_projs = [comp(phi(x), Hf(dom_inst.proj(n, i, x))) for i in range(1, n + 1)]
        subject = f"{dom_inst.obj_name(x)}, n={n}"
        ok = True
        counterexample = None
        for z in probes:
            try:
                legs = cod_inst.homs(z, thx)
                candidates = cod_inst.homs(z, image_apex)
            except BudgetExceeded:
                report.skip(
                    "functor.pullback_universal",
                    f"{subject} probed by {cod_inst.obj_name(z)}",
                    "hom enumeration over cap",
                )
                continue
            by_proj = {}
            for u in candidates:
                key = tuple(
                    _hom_key(comp(pi, u)) for pi in image_projs
                )
                by_proj.setdefault(key, []).append(u)
            by_base = {}
            for f in legs:
                by_base.setdefault(_hom_key(comp(p_hx, f)), []).append(f)
            for group in by_base.values():
                if not ok:
                    break
                for cone in itertools.product(group, repeat=n):
                    key = tuple(_hom_key(leg) for leg in cone)
                    matches = by_proj.get(key, [])
                    if len(matches) != 1:
                        ok = False
                        counterexample = {
                            "probe": cod_inst.obj_name(z),
                            "cone": [str(leg) for leg in cone],
                            "matches": len(matches),
                        }
                        break
            if not ok:
                break
        report.record("functor.pullback_universal", subject, ok, counterexample)


def _check_transported_equaliser(report, functor, dom_inst, cod_inst, x, probes):
    H, Hf, phi = functor.obj_map, functor.hom_map, functor.phi
    comp = cod_inst.compose
    hx = H(x)
    thx = cod_inst.T(hx)
    subject = dom_inst.obj_name(x)

    # the transported fork H(T_2 X) -> T^2(H X)
    chi = comp(
        cod_inst.T_hom(phi(x)), comp(phi(dom_inst.T(x)), Hf(dom_inst.w(x)))
    )
    tp = cod_inst.T_hom(cod_inst.component("p", hx))
    collapse = comp(
        cod_inst.component("e", hx),
        comp(cod_inst.component("p", hx), cod_inst.component("p", thx)),
    )
    if comp(tp, chi) != comp(collapse, chi):
        report.record(
            "functor.equaliser_universal",
            subject,
            False,
            counterexample={"reason": "transported fork does not equalise"},
        )
        return
    apex = H(dom_inst.T_n(2, x))
    t2hx = cod_inst.T(thx)
    ok = True
    counterexample = None
    for z in probes:
        try:
            into_t2 = cod_inst.homs(z, t2hx)
            candidates = cod_inst.homs(z, apex)
        except BudgetExceeded:
            report.skip(
                "functor.equaliser_universal",
                f"{subject} probed by {cod_inst.obj_name(z)}",
                "hom enumeration over cap",
            )
            continue
        by_comp = {}
        for u in candidates:
            by_comp.setdefault(_hom_key(comp(chi, u)), []).append(u)
        for h in into_t2:
            if comp(tp, h) != comp(collapse, h):
                continue
            matches = by_comp.get(_hom_key(h), [])
            if len(matches) != 1:
                ok = False
                counterexample = {
                    "probe": cod_inst.obj_name(z),
                    "hom": str(h),
                    "matches": len(matches),
                }
                break
        if not ok:
            break
    report.record("functor.equaliser_universal", subject, ok, counterexample)


def _hom_key(h):
    canon = getattr(h, "canon_key", None)
    if callable(canon):
        return canon()
    return h
