"""Structural terms over the tangent structure, and the expression search.

A structural term denotes a natural transformation generated by the tangent
structure: the leaves are the identity, the five generating transformations,
and the fibre-product projections; the nodes are vertical composition,
whiskering (by one tangent layer on the left, by a functor shape on the
right) and fibre-product pairing.  Every term carries a source and target
*shape*, a word (a_1, ..., a_j) of widths standing for the composite functor
T_{a_1} . ... . T_{a_j}; the shape's component at an object X of an instance
is the iterated action, so at N in the Weil instance it is the Weil object
with exactly those widths.

``express`` searches for a term whose component at N equals a given rig hom,
by a breadth-first closure over well-typed terms, memoized on the evaluated
hom (semantic equality is the only equality that matters, and it collapses
the exponential term space).  Failure to find a term within the depth budget
raises ExpressBudgetExceeded: the budget is an engineering choice and such a
failure never refutes expressibility, which holds in principle for every
hom.

Depth accounting: leaves count 1, vertical composition counts
1 + max(depths), whiskering is free (it relabels where a component sits),
and pairing counts max(leg depths) (a pairing is uniquely determined by its
legs).  ``express`` returns a term of minimal depth under this accounting,
with a deterministic tie-break: leaves seed in the order
Id < P < E < M < L < C < Proj, and candidates are generated left to right.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .errors import ExpressBudgetExceeded, IllTyped, NotACone
from .tangent import component as weil_component
from .tangent import pairing_at, proj_hom
from .weil import NAT, RigHom, WeilObject, compose, tensor_hom

Shape = tuple  # tuple[int, ...]

#: Cap on distinct memoized homs during one closure computation.
DEFAULT_TABLE_CAP = 200_000


def shape_object(shape: Shape) -> WeilObject:
    """The component of the shape functor at N: the Weil object of its widths."""
    return WeilObject(shape)


# -- the term language ---------------------------------------------------------


@dataclass(frozen=True)
class Term:
    src: Shape
    tgt: Shape

    @property
    def depth(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class IdTerm(Term):
    @property
    def depth(self):
        return 1

    def __str__(self):
        return f"Id({list(self.src)})"


_LEAF_SHAPES = {
    "P": ((1,), ()),
    "E": ((), (1,)),
    "M": ((2,), (1,)),
    "L": ((1,), (1, 1)),
    "C": ((1, 1), (1, 1)),
}


@dataclass(frozen=True)
class Leaf(Term):
    kind: str

    @property
    def depth(self):
        return 1

    def __str__(self):
        return self.kind


@dataclass(frozen=True)
class ProjTerm(Term):
    width: int
    index: int

    @property
    def depth(self):
        return 1

    def __str__(self):
        return f"Proj({self.width},{self.index})"


@dataclass(frozen=True)
class PairTerm(Term):
    legs: tuple

    @property
    def depth(self):
        return max(leg.depth for leg in self.legs)

    def __str__(self):
        return "Pair(" + ", ".join(str(leg) for leg in self.legs) + ")"


@dataclass(frozen=True)
class VCompTerm(Term):
    after: Term
    before: Term

    @property
    def depth(self):
        return 1 + max(self.after.depth, self.before.depth)

    def __str__(self):
        return f"VComp({self.after}, {self.before})"


@dataclass(frozen=True)
class WhiskerLeft(Term):
    width: int
    inner: Term

    @property
    def depth(self):
        return self.inner.depth

    def __str__(self):
        return f"WhiskerLeft({self.width}, {self.inner})"


@dataclass(frozen=True)
class WhiskerRight(Term):
    inner: Term
    shape: Shape

    @property
    def depth(self):
        return self.inner.depth

    def __str__(self):
        return f"WhiskerRight({self.inner}, {list(self.shape)})"


def identity_term(shape) -> IdTerm:
    shape = tuple(shape)
    return IdTerm(shape, shape)


def leaf(kind: str) -> Leaf:
    if kind not in _LEAF_SHAPES:
        raise IllTyped(f"unknown leaf {kind!r}")
    src, tgt = _LEAF_SHAPES[kind]
    return Leaf(src, tgt, kind)


def proj_term(width: int, index: int) -> ProjTerm:
    if not (1 <= index <= width):
        raise IllTyped(f"no projection {index} of width {width}")
    return ProjTerm((width,), (1,), width, index)


def pair_term(legs) -> PairTerm:
    legs = tuple(legs)
    if not legs:
        raise IllTyped("pairing needs at least one leg")
    src = legs[0].src
    if any(leg.src != src for leg in legs):
        raise IllTyped("pairing legs must share their source shape")
    tails = {leg.tgt[1:] if leg.tgt[:1] == (1,) else None for leg in legs}
    if len(tails) != 1 or None in tails:
        raise IllTyped("pairing legs must target one tangent layer over a common shape")
    tail = tails.pop()
    return PairTerm(src, (len(legs),) + tail, legs)


def vcomp(after: Term, before: Term) -> VCompTerm:
    if before.tgt != after.src:
        raise IllTyped(f"cannot compose {after} after {before}")
    return VCompTerm(before.src, after.tgt, after, before)


def whisker_left(width: int, inner: Term) -> WhiskerLeft:
    if width < 1:
        raise IllTyped("whisker width must be >= 1")
    return WhiskerLeft((width,) + inner.src, (width,) + inner.tgt, width, inner)


def whisker_right(inner: Term, shape) -> WhiskerRight:
    shape = tuple(shape)
    return WhiskerRight(inner.src + shape, inner.tgt + shape, inner, shape)


# -- evaluation ----------------------------------------------------------------


def _instance_t_n_hom(inst, n, h, src_obj):
    """T_n applied to an instance hom, built from T and the chosen pairing."""
    if n == 1:
        return inst.T_hom(h)
    legs = [
        inst.compose(inst.T_hom(h), inst.proj(n, i, src_obj)) for i in range(1, n + 1)
    ]
    return inst.pairing(legs, n)


def eval_term(term: Term, inst, x):
    """The component of the term's transformation at the instance object x."""
    if isinstance(term, IdTerm):
        return inst.identity(inst.star(shape_object(term.src), x))
    if isinstance(term, Leaf):
        return inst.component(term.kind.lower(), x)
    if isinstance(term, ProjTerm):
        return inst.proj(term.width, term.index, x)
    if isinstance(term, PairTerm):
        legs = [eval_term(leg, inst, x) for leg in term.legs]
        return inst.pairing(legs, len(legs))
    if isinstance(term, VCompTerm):
        return inst.compose(
            eval_term(term.after, inst, x), eval_term(term.before, inst, x)
        )
    if isinstance(term, WhiskerLeft):
        inner = eval_term(term.inner, inst, x)
        return _instance_t_n_hom(
            inst, term.width, inner, inst.star(shape_object(term.inner.src), x)
        )
    if isinstance(term, WhiskerRight):
        return eval_term(term.inner, inst, inst.star(shape_object(term.shape), x))
    raise IllTyped(f"not a structural term: {term!r}")


# -- text serialization ---------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z]+|\d+|[(),\[\]])")


def parse_term(text: str) -> Term:
    tokens = _TOKEN.findall(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(tokens):
            raise IllTyped(f"unexpected end of term in {text!r}")
        tok = tokens[pos]
        if expected is not None and tok != expected:
            raise IllTyped(f"expected {expected!r}, got {tok!r} in {text!r}")
        pos += 1
        return tok

    def shape():
        take("[")
        widths = []
        while peek() != "]":
            widths.append(int(take()))
            if peek() == ",":
                take(",")
        take("]")
        return tuple(widths)

    def term():
        tok = take()
        if tok in _LEAF_SHAPES:
            return leaf(tok)
        if tok == "Id":
            take("(")
            s = shape()
            take(")")
            return identity_term(s)
        if tok == "Proj":
            take("(")
            width = int(take())
            take(",")
            index = int(take())
            take(")")
            return proj_term(width, index)
        if tok == "Pair":
            take("(")
            legs = [term()]
            while peek() == ",":
                take(",")
                legs.append(term())
            take(")")
            return pair_term(legs)
        if tok == "VComp":
            take("(")
            after = term()
            take(",")
            before = term()
            take(")")
            return vcomp(after, before)
        if tok == "WhiskerLeft":
            take("(")
            width = int(take())
            take(",")
            inner = term()
            take(")")
            return whisker_left(width, inner)
        if tok == "WhiskerRight":
            take("(")
            inner = term()
            take(",")
            s = shape()
            take(")")
            return whisker_right(inner, s)
        raise IllTyped(f"unknown token {tok!r} in {text!r}")

    out = term()
    if pos != len(tokens):
        raise IllTyped(f"trailing tokens in {text!r}")
    return out


# -- the closure search ----------------------------------------------------------


def weil_component_of(term: Term) -> RigHom:
    """The component at N, computed by direct structural recursion.

    In the Weil instance the component of a structural term at any object A
    is its N-component whiskered by A, so left whiskering tensors an
    identity layer in front and right whiskering tensors the shape's object
    behind.
    """
    if isinstance(term, IdTerm):
        return RigHom.identity(shape_object(term.src))
    if isinstance(term, Leaf):
        return weil_component(term.kind.lower(), NAT)
    if isinstance(term, ProjTerm):
        return proj_hom(term.width, term.index)
    if isinstance(term, PairTerm):
        return pairing_at([weil_component_of(leg) for leg in term.legs],
                          len(term.legs), 0)
    if isinstance(term, VCompTerm):
        return compose(weil_component_of(term.after), weil_component_of(term.before))
    if isinstance(term, WhiskerLeft):
        return tensor_hom(
            RigHom.identity(WeilObject((term.width,))),
            weil_component_of(term.inner),
        )
    if isinstance(term, WhiskerRight):
        return tensor_hom(
            weil_component_of(term.inner), RigHom.identity(shape_object(term.shape))
        )
    raise IllTyped(f"not a structural term: {term!r}")


def allowed_shapes(src: Shape, tgt: Shape):
    """The shape universe for a goal: suffixes of its source and target plus
    one extra tangent layer in front, with layer widths drawn from the goal
    plus the generator widths 1 and 2."""
    base = {(), tuple(src), tuple(tgt)}
    for word in (tuple(src), tuple(tgt)):
        for i in range(len(word)):
            base.add(word[i:])
    widths = sorted(set(src) | set(tgt) | {1, 2})
    extended = set(base)
    for w in widths:
        for s in base:
            extended.add((w,) + s)
    return sorted(extended), widths


class _Entry:
    __slots__ = ("term", "hom", "depth")

    def __init__(self, term, hom, depth):
        self.term = term
        self.hom = hom
        self.depth = depth


class _SrcTable:
    """Pipelines out of one source shape, memoized by their evaluated hom."""

    __slots__ = ("src", "table", "by_tgt", "by_depth", "depth_built")

    def __init__(self, src):
        self.src = src
        self.table = {}  # hom canon key -> _Entry
        self.by_tgt = {}  # tgt shape -> list of _Entry
        self.by_depth = {}  # depth -> list of _Entry
        self.depth_built = 0


class Closure:
    """Goal-anchored closure of structural terms, memoized semantically.

    The searched fragment consists of pipelines out of the goal's source
    shape.  A pipeline grows by appending a *segment*: a depth-one atom (a
    whiskered generator, identity, or whiskered pairing of depth-one legs)
    or a whiskering of a depth-two pipeline (built in auxiliary tables, one
    per source shape).  Pipelines sharing the source may also be paired
    into a front fibre-product slot; inner-slot pairings are still
    reachable because the canonical flip conjugates them to front
    pairings.  The table is bounded by the homs out of the source object
    rather than by all homs between all shapes, which keeps the search
    tractable.

    Intermediate homs are pruned to coefficients <= ``coeff_cap`` (minimal
    pipelines for a goal have no use for coefficients above the goal's own,
    and the cap rises with the goal's).
    """

    def __init__(self, src, shapes, widths, coeff_cap, table_cap=DEFAULT_TABLE_CAP):
        self.src = tuple(src)
        self.shapes = set(shapes)
        self.widths = widths
        self.coeff_cap = coeff_cap
        self.table_cap = table_cap
        self.max_shape_len = max(len(s) for s in self.shapes)
        self.tables = {s: _SrcTable(s) for s in sorted(self.shapes)}
        self.goal_table = self.tables.setdefault(self.src, _SrcTable(self.src))
        self._table_size = 0
        self._atoms_by_src = self._build_atoms()
        self._segments_by_src = None

    # -- atoms: every depth-one term, closed under whiskering and pairing

    def _whisker_wraps(self, seeds):
        out = []
        seen = set()
        stack = list(seeds)
        while stack:
            t = stack.pop(0)
            marker = str(t)
            if marker in seen:
                continue
            seen.add(marker)
            if t.src in self.shapes and t.tgt in self.shapes:
                out.append(t)
            if max(len(t.src), len(t.tgt)) >= self.max_shape_len:
                continue
            for w in self.widths:
                stack.append(whisker_left(w, t))
            for s in sorted(self.shapes):
                if s:
                    stack.append(whisker_right(t, s))
        return out

    def _build_atoms(self):
        seeds = [identity_term(s) for s in sorted(self.shapes)]
        seeds.extend(leaf(k) for k in ("P", "E", "M", "L", "C"))
        for n in self.widths:
            if n >= 2:
                seeds.extend(proj_term(n, i) for i in range(1, n + 1))
        atoms = []
        homs_seen = set()
        for term in self._whisker_wraps(seeds):
            hom = weil_component_of(term)
            key = hom.canon_key()
            if key not in homs_seen and self._coeffs_ok(hom):
                homs_seen.add(key)
                atoms.append((term, hom))
        # close under pairing of depth-one legs, then whisker the results
        fresh = atoms
        while fresh:
            paired = []
            for term, hom in self._pairings_among(atoms, fresh):
                key = hom.canon_key()
                if key not in homs_seen and self._coeffs_ok(hom):
                    homs_seen.add(key)
                    paired.append((term, hom))
            wrapped = []
            for term, hom in paired:
                for wt in self._whisker_wraps([term]):
                    if wt is term:
                        wrapped.append((wt, hom))
                        continue
                    wh = weil_component_of(wt)
                    key = wh.canon_key()
                    if key not in homs_seen and self._coeffs_ok(wh):
                        homs_seen.add(key)
                        wrapped.append((wt, wh))
            atoms.extend(wrapped)
            fresh = wrapped
        by_src = {}
        for term, hom in atoms:
            by_src.setdefault(term.src, []).append((term, hom))
        return by_src

    def _pairings_among(self, pool, fresh):
        fresh_ids = {id(t) for t, _ in fresh}
        buckets = {}
        for term, hom in pool:
            if term.tgt[:1] == (1,):
                buckets.setdefault((term.src, term.tgt[1:]), []).append((term, hom))
        for (src, tail), entries in sorted(buckets.items()):
            for n in self.widths:
                if n < 2 or ((n,) + tail) not in self.shapes:
                    continue
                groups = {}
                for term, hom in entries:
                    groups.setdefault(self._base_key(hom), []).append((term, hom))
                for _, group in sorted(groups.items()):
                    if len(group) ** n > 4096:
                        continue
                    for combo in itertools.product(group, repeat=n):
                        if not any(id(t) in fresh_ids for t, _ in combo):
                            continue
                        try:
                            hom = pairing_at([h for _, h in combo], n, 0)
                        except NotACone:
                            continue
                        yield pair_term([t for t, _ in combo]), hom

    def _base_key(self, hom):
        tail = WeilObject(hom.cod.widths[1:])
        return compose(weil_component("p", tail), hom).canon_key()

    def _coeffs_ok(self, hom):
        return all(
            c <= self.coeff_cap
            for row in hom.images
            for u in row
            for c in u.coeffs.values()
        )

    # -- the pipeline tables

    def _admit(self, tab, term, hom, depth):
        key = hom.canon_key()
        if key in tab.table:
            return None
        if not self._coeffs_ok(hom):
            return None
        if self._table_size >= self.table_cap:
            raise ExpressBudgetExceeded(
                f"term table exceeded {self.table_cap} distinct homs"
            )
        entry = _Entry(term, hom, depth)
        tab.table[key] = entry
        tab.by_tgt.setdefault(term.tgt, []).append(entry)
        tab.by_depth.setdefault(depth, []).append(entry)
        self._table_size += 1
        return entry

    def ensure_depth(self, depth: int):
        # auxiliary tables stop at depth 2: they exist to donate whiskered
        # short pipelines as segments for the goal table
        for tab in self.tables.values():
            while tab.depth_built < min(depth, 2):
                self._extend(tab)
        if depth >= 2 and self._segments_by_src is None:
            self._segments_by_src = self._build_segments()
        while self.goal_table.depth_built < depth:
            self._extend(self.goal_table)

    def _segments(self, src_shape, depth):
        if depth >= 3 and self._segments_by_src is not None:
            return self._segments_by_src.get(src_shape, [])
        return [
            (t, h, 1) for t, h in self._atoms_by_src.get(src_shape, [])
        ]

    def _build_segments(self):
        """Atoms plus whiskerings of depth-two pipelines from every table."""
        pool = {
            s: [(t, h, 1) for t, h in entries]
            for s, entries in self._atoms_by_src.items()
        }
        seen = {
            (t.src, h.canon_key())
            for entries in pool.values()
            for t, h, _ in entries
        }

        def add(term, hom):
            marker = (term.src, hom.canon_key())
            if marker in seen:
                return
            seen.add(marker)
            pool.setdefault(term.src, []).append((term, hom, 2))

        for s in sorted(self.tables):
            for entry in self.tables[s].by_depth.get(2, []):
                add(entry.term, entry.hom)
                for wrapped in self._whisker_wraps([entry.term]):
                    if wrapped is not entry.term:
                        add(wrapped, weil_component_of(wrapped))
        return pool

    def _extend(self, tab):
        depth = tab.depth_built + 1
        fresh = []
        if depth == 1:
            for term, hom in self._atoms_by_src.get(tab.src, []):
                entry = self._admit(tab, term, hom, 1)
                if entry:
                    fresh.append(entry)
        else:
            for entry in list(tab.by_depth.get(depth - 1, [])):
                for seg_term, seg_hom, _ in self._segments(entry.term.tgt, depth):
                    if isinstance(seg_term, IdTerm):
                        continue
                    term = vcomp(seg_term, entry.term)
                    hom = compose(seg_hom, entry.hom)
                    new = self._admit(tab, term, hom, depth)
                    if new:
                        fresh.append(new)
            if depth == 3:
                # depth-two segments on depth-one pipelines also land here
                for entry in list(tab.by_depth.get(1, [])):
                    for seg_term, seg_hom, seg_depth in self._segments(
                        entry.term.tgt, depth
                    ):
                        if seg_depth != 2:
                            continue
                        term = vcomp(seg_term, entry.term)
                        hom = compose(seg_hom, entry.hom)
                        new = self._admit(tab, term, hom, depth)
                        if new:
                            fresh.append(new)
        self._pair_level(tab, depth, fresh)
        tab.depth_built = depth

    def _pair_level(self, tab, depth, fresh):
        """Front pairings of pipelines, at least one at the current depth."""
        while fresh:
            fresh_keys = {e.hom.canon_key() for e in fresh}
            next_fresh = []
            buckets = {}
            for tgt, entries in tab.by_tgt.items():
                if tgt[:1] == (1,):
                    buckets.setdefault(tgt[1:], []).extend(entries)
            for tail, entries in sorted(buckets.items()):
                for n in self.widths:
                    if n < 2 or ((n,) + tail) not in self.shapes:
                        continue
                    groups = {}
                    for e in entries:
                        groups.setdefault(self._base_key(e.hom), []).append(e)
                    for _, group in sorted(groups.items()):
                        if len(group) ** n > 4096:
                            continue
                        for combo in itertools.product(group, repeat=n):
                            if not any(
                                e.hom.canon_key() in fresh_keys for e in combo
                            ):
                                continue
                            try:
                                hom = pairing_at([e.hom for e in combo], n, 0)
                            except NotACone:
                                continue
                            term = pair_term([e.term for e in combo])
                            new = self._admit(tab, term, hom, depth)
                            if new:
                                next_fresh.append(new)
            fresh = next_fresh

    def lookup(self, hom: RigHom):
        return self.goal_table.table.get(hom.canon_key())


_closure_cache = {}


def closure_for(src: Shape, tgt: Shape, max_depth: int, coeff_cap: int) -> Closure:
    shapes, widths = allowed_shapes(src, tgt)
    key = (tuple(src), tuple(shapes), coeff_cap)
    hit = _closure_cache.get(key)
    if hit is None:
        hit = Closure(src, shapes, widths, coeff_cap)
        _closure_cache[key] = hit
    hit.ensure_depth(max_depth)
    return hit


@dataclass
class ExpressResult:
    term: Term
    depth: int
    target: RigHom

    def to_json(self):
        return {
            "term": str(self.term),
            "depth": self.depth,
            "target": self.target.to_json(),
        }


def goal_coeff_cap(f: RigHom) -> int:
    coeffs = [c for row in f.images for u in row for c in u.coeffs.values()]
    return max(coeffs, default=1)


def express(f: RigHom, max_depth: int = 6) -> ExpressResult:
    """A minimal-depth structural term whose component at N equals f.

    Searches by iterative deepening with semantic memoization; raises
    ExpressBudgetExceeded when no term of depth <= max_depth exists in the
    searched fragment.  That outcome signals a search budget limitation,
    never a refutation: every hom is expressible in principle.
    """
    if max_depth < 1:
        raise ValueError("depth budget must be >= 1")
    cap = goal_coeff_cap(f)
    for depth in range(1, max_depth + 1):
        closure = closure_for(f.dom.widths, f.cod.widths, depth, cap)
        entry = closure.lookup(f)
        if entry is not None:
            return ExpressResult(entry.term, entry.depth, f)
    raise ExpressBudgetExceeded(
        f"no structural term of depth <= {max_depth} found for {f}; "
        f"this bounds the search, not the hom"
    )


# -- the monoidal functor induced by evaluation ----------------------------------


def phi_object(v: WeilObject, inst) -> Shape:
    """The functor shape assigned to a Weil object: its widths, outermost
    tangent layer first."""
    return tuple(v.widths)


def phi_hom(f: RigHom, inst, max_depth: int = 6):
    """The natural transformation expressed by f, tabulated per object."""
    result = express(f, max_depth)
    return {
        inst.obj_name(x): eval_term(result.term, inst, x) for x in inst.objects()
    }


def check_strong_monoidality(max_factors, max_width, coeff_bound, inst=None):
    """Shape concatenation and evaluation agreement for the induced functor.

    Checks that the shape assigned to a tensor product is the concatenation
    of the factors' shapes, that the iterated action realizes it on every
    bounded object, and that on bounded homs acting by a tensor product
    agrees with acting by its factors in sequence.
    """
    from .instances import instance_weil
    from .report import VerificationReport
    from .weil import enumerate_homs, objects_within

    if inst is None:
        inst = instance_weil(max_factors, max_width, coeff_bound)
    report = VerificationReport(
        "strong monoidality",
        bounds={
            "max_factors": max_factors,
            "max_width": max_width,
            "coeff_bound": coeff_bound,
        },
    )
    objs = objects_within(max_factors, max_width)
    sample_homs = []
    for x, y in [(WeilObject((1,)), WeilObject((1, 1))), (WeilObject((2,)), WeilObject((1,)))]:
        sample_homs.extend(enumerate_homs(x, y, min(coeff_bound, 1), cap=64))
    for a in objs:
        for b in objs:
            subject = f"{a} , {b}"
            ok = phi_object(a.tensor(b), inst) == phi_object(a, inst) + phi_object(
                b, inst
            )
            report.record("monoidal.shape_concat", subject, ok)
            bad = None
            for x in objs:
                if inst.star(a.tensor(b), x) != inst.star(a, inst.star(b, x)):
                    bad = x
                    break
            report.record(
                "monoidal.object_action",
                subject,
                bad is None,
                None if bad is None else {"object": str(bad)},
            )
            bad = None
            for g in sample_homs:
                whole = tensor_hom(RigHom.identity(a.tensor(b)), g)
                nested = tensor_hom(
                    RigHom.identity(a), tensor_hom(RigHom.identity(b), g)
                )
                if whole != nested:
                    bad = g
                    break
            report.record(
                "monoidal.hom_action",
                subject,
                bad is None,
                None if bad is None else {"hom": bad.to_json()},
            )
    return report
