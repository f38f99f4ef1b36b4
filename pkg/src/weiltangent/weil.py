"""Exact arithmetic in Weil rigs: objects, elements, homomorphisms, enumeration.

Objects are finite tensor products W_{n_1} (x) ... (x) W_{n_k} of the basic
rigs W_n = N[x_1, ..., x_n] / (x_i x_j : 1 <= i <= j <= n), the empty product
standing for N itself.  A monomial survives the relations exactly when it
picks at most one generator from each tensor factor, so an object with widths
(n_1, ..., n_k) has prod(n_i + 1) monomials.  Elements are finitely supported
natural-number combinations of monomials; coefficients are exact Python ints
and are never truncated or reduced.

A monomial is stored as a tuple of picks, one per factor: pick 0 means the
factor contributes its unit, pick j >= 1 means it contributes generator x_j.
The product of two monomials is zero whenever some factor position is
occupied in both, since any two generators of one factor multiply to zero.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator

from .errors import (
    BudgetExceeded,
    ConstantPartNonzero,
    ObjectMismatch,
    RelationViolation,
)

Monomial = tuple  # tuple[int, ...], one pick per factor

#: Default cap on the number of homs (or square-zero elements) an
#: enumeration may produce before raising BudgetExceeded.
DEFAULT_ENUM_CAP = 2048


@dataclass(frozen=True)
class WeilObject:
    """A finite tensor product of basic Weil rigs, stored as factor widths."""

    widths: tuple

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(self.widths))
        for n in self.widths:
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"factor widths must be positive ints, got {n!r}")

    @property
    def factor_count(self) -> int:
        return len(self.widths)

    @property
    def basis_size(self) -> int:
        size = 1
        for n in self.widths:
            size *= n + 1
        return size

    @property
    def unit_monomial(self) -> Monomial:
        return (0,) * len(self.widths)

    def monomials(self) -> Iterator[Monomial]:
        """All monomials in lexicographic order, the unit first."""
        return itertools.product(*(range(n + 1) for n in self.widths))

    def nonunit_monomials(self) -> list:
        return [m for m in self.monomials() if any(m)]

    def is_monomial(self, m) -> bool:
        return (
            isinstance(m, tuple)
            and len(m) == len(self.widths)
            and all(isinstance(p, int) and 0 <= p <= n for p, n in zip(m, self.widths))
        )

    def generator_positions(self) -> Iterator[tuple]:
        """All (factor, generator) index pairs, 1-based."""
        for i, n in enumerate(self.widths, start=1):
            for j in range(1, n + 1):
                yield (i, j)

    def tensor(self, other: "WeilObject") -> "WeilObject":
        return WeilObject(self.widths + other.widths)

    def __str__(self):
        if not self.widths:
            return "N"
        return "(x)".join(f"W{n}" for n in self.widths)

    def to_json(self):
        return list(self.widths)

    @classmethod
    def from_json(cls, data) -> "WeilObject":
        return cls(tuple(data))


#: The unit object N (empty tensor product) and the basic line objects.
NAT = WeilObject(())
W = WeilObject((1,))
W2 = WeilObject((2,))


def mono_mul(a: Monomial, b: Monomial):
    """Product of two monomials; None when it dies under the relations."""
    out = []
    for p, q in zip(a, b):
        if p and q:
            return None
        out.append(p or q)
    return tuple(out)


class WeilElement:
    """An element of a Weil rig: a finitely supported map monomial -> N.

    Stored sparsely with zero coefficients stripped, so equality of the
    coefficient dicts is equality of elements.
    """

    __slots__ = ("obj", "coeffs", "_key")

    def __init__(self, obj: WeilObject, coeffs=None, _validated=False):
        self.obj = obj
        if coeffs is None:
            coeffs = {}
        if _validated:
            self.coeffs = coeffs
        else:
            clean = {}
            for m, c in coeffs.items():
                m = tuple(m)
                if not obj.is_monomial(m):
                    raise ValueError(f"{m!r} is not a monomial of {obj}")
                if not isinstance(c, int) or c < 0:
                    raise ValueError(f"coefficients must be naturals, got {c!r}")
                if c:
                    clean[m] = clean.get(m, 0) + c
            self.coeffs = clean
        self._key = None

    @classmethod
    def zero(cls, obj: WeilObject) -> "WeilElement":
        return cls(obj, {}, _validated=True)

    @classmethod
    def one(cls, obj: WeilObject) -> "WeilElement":
        return cls(obj, {obj.unit_monomial: 1}, _validated=True)

    @classmethod
    def from_nat(cls, obj: WeilObject, n: int) -> "WeilElement":
        if n < 0:
            raise ValueError("coefficients must be naturals")
        return cls(obj, {obj.unit_monomial: n} if n else {}, _validated=True)

    @classmethod
    def generator(cls, obj: WeilObject, factor: int, gen: int) -> "WeilElement":
        """The generator x_gen of the given factor, both indices 1-based."""
        if not (1 <= factor <= obj.factor_count):
            raise ValueError(f"no factor {factor} in {obj}")
        if not (1 <= gen <= obj.widths[factor - 1]):
            raise ValueError(f"no generator {gen} in factor {factor} of {obj}")
        picks = [0] * obj.factor_count
        picks[factor - 1] = gen
        return cls(obj, {tuple(picks): 1}, _validated=True)

    @classmethod
    def monomial(cls, obj: WeilObject, picks, coeff: int = 1) -> "WeilElement":
        return cls(obj, {tuple(picks): coeff})

    def coefficient(self, m) -> int:
        return self.coeffs.get(tuple(m), 0)

    @property
    def unit_coefficient(self) -> int:
        return self.coeffs.get(self.obj.unit_monomial, 0)

    @property
    def support(self):
        return set(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "WeilElement") -> "WeilElement":
        if not isinstance(other, WeilElement):
            return NotImplemented
        if self.obj != other.obj:
            raise ObjectMismatch(f"cannot add over {self.obj} and {other.obj}")
        acc = dict(self.coeffs)
        for m, c in other.coeffs.items():
            acc[m] = acc.get(m, 0) + c
        return WeilElement(self.obj, acc, _validated=True)

    def __mul__(self, other: "WeilElement") -> "WeilElement":
        if not isinstance(other, WeilElement):
            return NotImplemented
        if self.obj != other.obj:
            raise ObjectMismatch(f"cannot multiply over {self.obj} and {other.obj}")
        acc = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = mono_mul(m1, m2)
                if m is not None:
                    acc[m] = acc.get(m, 0) + c1 * c2
        return WeilElement(self.obj, acc, _validated=True)

    def scale(self, n: int) -> "WeilElement":
        if n < 0:
            raise ValueError("coefficients must be naturals")
        if n == 0:
            return WeilElement.zero(self.obj)
        return WeilElement(
            self.obj, {m: n * c for m, c in self.coeffs.items()}, _validated=True
        )

    def canon_key(self):
        if self._key is None:
            self._key = tuple(sorted(self.coeffs.items()))
        return self._key

    def __eq__(self, other):
        if not isinstance(other, WeilElement):
            return NotImplemented
        return self.obj == other.obj and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.obj.widths, self.canon_key()))

    def __str__(self):
        return render_element(self)

    def __repr__(self):
        return f"WeilElement({self.obj}, {dict(sorted(self.coeffs.items()))})"

    def to_json(self):
        return [[list(m), str(c)] for m, c in sorted(self.coeffs.items())]

    @classmethod
    def from_json(cls, obj: WeilObject, data) -> "WeilElement":
        return cls(obj, {tuple(m): int(c) for m, c in data})


def generator_name(obj: WeilObject, factor: int, gen: int) -> str:
    """Display name of a generator; short aliases on the paper-sized objects."""
    k, widths = obj.factor_count, obj.widths
    if k == 1 and widths[0] == 1:
        return "x"
    if k == 1 and widths[0] == 2:
        return ("x_1", "x_2")[gen - 1]
    if k == 2 and widths == (1, 1):
        return ("x", "y")[factor - 1]
    return f"x({factor},{gen})"


def _display_order(m: Monomial):
    # unit first, then by degree, then by leftmost occupied factor
    return (sum(1 for p in m if p), tuple((i, p) for i, p in enumerate(m) if p))


def render_element(u: WeilElement) -> str:
    if u.is_zero():
        return "0"
    parts = []
    for m, c in sorted(u.coeffs.items(), key=lambda item: _display_order(item[0])):
        if not any(m):
            parts.append(str(c))
            continue
        name = "".join(
            generator_name(u.obj, i, p) for i, p in enumerate(m, start=1) if p
        )
        parts.append(name if c == 1 else f"{c}{name}")
    return " + ".join(parts)


_TERM_RE = re.compile(r"^(\d*)\s*((?:x(?:_\d+|\(\d+,\d+\))?|y)*)$")
_SYM_RE = re.compile(r"x_(\d+)|x\((\d+),(\d+)\)|x|y")


def parse_element(obj: WeilObject, text: str) -> WeilElement:
    """Parse sums like ``4 + 9x``, ``3 + 2x_1 + 5x_2`` or ``a x(1,2)x(2,1)``.

    Accepts the display aliases produced by :func:`render_element`.
    """
    coeffs = {}
    for raw in text.replace("-", "").split("+"):
        term = raw.strip().replace(" ", "").replace("*", "")
        if not term:
            continue
        match = _TERM_RE.match(term)
        if not match:
            raise ValueError(f"cannot parse term {raw!r}")
        coeff = int(match.group(1)) if match.group(1) else 1
        picks = [0] * obj.factor_count
        for sym in _SYM_RE.finditer(match.group(2)):
            if sym.group(1) is not None:  # x_j on a single factor
                factor, gen = 1, int(sym.group(1))
            elif sym.group(2) is not None:  # x(i,j)
                factor, gen = int(sym.group(2)), int(sym.group(3))
            elif sym.group(0) == "x":
                factor, gen = 1, 1
            else:  # y
                factor, gen = 2, 1
            if picks[factor - 1]:
                raise ValueError(f"factor {factor} picked twice in {raw!r}")
            picks[factor - 1] = gen
        key = tuple(picks)
        coeffs[key] = coeffs.get(key, 0) + coeff
    return WeilElement(obj, coeffs)


class RigHom:
    """A homomorphism of Weil rigs, presented by its generator images.

    A hom out of a tensor product is a tuple of homs out of the factors, so
    ``images[i][j]`` holds the image of generator x_{j+1} of factor i+1.
    Use :func:`mk_hom` to build a validated hom.
    """

    __slots__ = ("dom", "cod", "images", "_key")

    def __init__(self, dom: WeilObject, cod: WeilObject, images, _validated=False):
        self.dom = dom
        self.cod = cod
        self.images = tuple(tuple(row) for row in images)
        self._key = None
        if not _validated:
            self._validate()

    def _validate(self):
        if len(self.images) != self.dom.factor_count:
            raise ValueError("one image row per factor required")
        for i, (n, row) in enumerate(zip(self.dom.widths, self.images), start=1):
            if len(row) != n:
                raise ValueError(f"factor {i} needs {n} generator images")
            for j, u in enumerate(row, start=1):
                if not isinstance(u, WeilElement) or u.obj != self.cod:
                    raise ObjectMismatch(
                        f"image of generator ({i},{j}) must live in {self.cod}"
                    )
                if u.unit_coefficient:
                    raise ConstantPartNonzero(i, j)
            for j in range(n):
                for jp in range(j, n):
                    if not (row[j] * row[jp]).is_zero():
                        raise RelationViolation(i, (j + 1, jp + 1))

    @classmethod
    def identity(cls, obj: WeilObject) -> "RigHom":
        images = [
            [WeilElement.generator(obj, i, j) for j in range(1, n + 1)]
            for i, n in enumerate(obj.widths, start=1)
        ]
        return cls(obj, obj, images, _validated=True)

    @classmethod
    def unit_hom(cls, cod: WeilObject) -> "RigHom":
        """The unique hom out of N."""
        return cls(NAT, cod, (), _validated=True)

    def image(self, factor: int, gen: int) -> WeilElement:
        return self.images[factor - 1][gen - 1]

    def apply(self, u: WeilElement) -> WeilElement:
        if u.obj != self.dom:
            raise ObjectMismatch(f"element of {u.obj} fed to hom on {self.dom}")
        acc = WeilElement.zero(self.cod)
        for m, c in u.coeffs.items():
            term = WeilElement.one(self.cod)
            for i, pick in enumerate(m):
                if pick:
                    term = term * self.images[i][pick - 1]
                    if term.is_zero():
                        break
            acc = acc + term.scale(c)
        return acc

    def then(self, other: "RigHom") -> "RigHom":
        """Diagrammatic composition: self first, then other."""
        return compose(other, self)

    def tensor(self, other: "RigHom") -> "RigHom":
        return tensor_hom(self, other)

    def is_identity(self) -> bool:
        return self == RigHom.identity(self.dom) if self.dom == self.cod else False

    def canon_key(self):
        if self._key is None:
            self._key = (
                self.dom.widths,
                self.cod.widths,
                tuple(tuple(u.canon_key() for u in row) for row in self.images),
            )
        return self._key

    def __eq__(self, other):
        if not isinstance(other, RigHom):
            return NotImplemented
        return (
            self.dom == other.dom
            and self.cod == other.cod
            and self.images == other.images
        )

    def __hash__(self):
        return hash(self.canon_key())

    def __str__(self):
        if not self.images:
            return f"{self.dom} -> {self.cod}: unit hom"
        rows = ", ".join(
            f"{generator_name(self.dom, i, j)} -> {self.image(i, j)}"
            for (i, j) in self.dom.generator_positions()
        )
        return f"{self.dom} -> {self.cod}: {rows}"

    __repr__ = __str__

    def to_json(self):
        return {
            "dom": self.dom.to_json(),
            "cod": self.cod.to_json(),
            "images": [[u.to_json() for u in row] for row in self.images],
        }

    @classmethod
    def from_json(cls, data) -> "RigHom":
        dom = WeilObject.from_json(data["dom"])
        cod = WeilObject.from_json(data["cod"])
        images = [
            [WeilElement.from_json(cod, u) for u in row] for row in data["images"]
        ]
        return mk_hom(dom, cod, images)


# -- operation-style entry points -------------------------------------------


def mul(obj: WeilObject, u: WeilElement, v: WeilElement) -> WeilElement:
    if u.obj != obj or v.obj != obj:
        raise ObjectMismatch(f"operands must both live in {obj}")
    return u * v


def add(obj: WeilObject, u: WeilElement, v: WeilElement) -> WeilElement:
    if u.obj != obj or v.obj != obj:
        raise ObjectMismatch(f"operands must both live in {obj}")
    return u + v


def tensor_obj(a: WeilObject, b: WeilObject) -> WeilObject:
    return a.tensor(b)


def _embed_monomial(m, offset: int, total: int):
    out = [0] * total
    out[offset : offset + len(m)] = m
    return tuple(out)


def embed_element(u: WeilElement, cod: WeilObject, offset: int) -> WeilElement:
    """Reinterpret u inside a larger tensor product, its factors at `offset`."""
    total = cod.factor_count
    return WeilElement(
        cod,
        {_embed_monomial(m, offset, total): c for m, c in u.coeffs.items()},
        _validated=True,
    )


def tensor_hom(f: RigHom, g: RigHom) -> RigHom:
    """The hom f (x) g, acting factorwise on the concatenated widths."""
    dom = f.dom.tensor(g.dom)
    cod = f.cod.tensor(g.cod)
    k_f = f.cod.factor_count
    images = [
        [embed_element(u, cod, 0) for u in row] for row in f.images
    ] + [
        [embed_element(u, cod, k_f) for u in row] for row in g.images
    ]
    return RigHom(dom, cod, images, _validated=True)


def swap_blocks(a: WeilObject, b: WeilObject) -> RigHom:
    """The symmetry isomorphism a (x) b -> b (x) a."""
    dom = a.tensor(b)
    cod = b.tensor(a)
    k_a, k_b = a.factor_count, b.factor_count
    images = []
    for i, n in enumerate(a.widths, start=1):
        images.append(
            [WeilElement.generator(cod, k_b + i, j) for j in range(1, n + 1)]
        )
    for i, n in enumerate(b.widths, start=1):
        images.append([WeilElement.generator(cod, i, j) for j in range(1, n + 1)])
    return RigHom(dom, cod, images, _validated=True)


def mk_hom(dom: WeilObject, cod: WeilObject, images) -> RigHom:
    """Build a hom from a generator-image table, validating the relations."""
    return RigHom(dom, cod, images)


def apply_hom(f: RigHom, u: WeilElement) -> WeilElement:
    return f.apply(u)


def compose(g: RigHom, f: RigHom) -> RigHom:
    """The composite g after f."""
    if f.cod != g.dom:
        raise ObjectMismatch(f"cannot compose {g.dom}<-... after ...->{f.cod}")
    images = [[g.apply(u) for u in row] for row in f.images]
    return RigHom(f.dom, g.cod, images, _validated=True)


def compose_many(*homs: RigHom) -> RigHom:
    """compose_many(h_n, ..., h_1) = h_n o ... o h_1 (rightmost applied first)."""
    out = homs[-1]
    for h in reversed(homs[:-1]):
        out = compose(h, out)
    return out


# -- bounded enumeration -----------------------------------------------------


def _conflicts(a: Monomial, b: Monomial) -> bool:
    """True when the monomial product a*b dies (some factor occupied twice)."""
    return any(p and q for p, q in zip(a, b))


def _clique_supports(monos, cap: int):
    """All subsets of `monos` whose members pairwise conflict.

    These are exactly the supports of square-zero elements: a sum of
    monomials with natural coefficients squares to zero iff every pairwise
    product of support monomials (squares included) vanishes, and any
    non-unit monomial already squares to zero.
    """
    supports = []

    def extend(support, start):
        if len(supports) > cap:
            raise BudgetExceeded(
                f"more than {cap} square-zero supports; raise the cap to continue"
            )
        supports.append(tuple(support))
        for idx in range(start, len(monos)):
            m = monos[idx]
            if all(_conflicts(m, s) for s in support):
                support.append(m)
                extend(support, idx + 1)
                support.pop()

    extend([], 0)
    return supports


def square_zero_elements(
    obj: WeilObject, coeff_bound: int, cap: int = DEFAULT_ENUM_CAP
) -> list:
    """All u with u*u = 0 and coefficients <= coeff_bound, canonically ordered."""
    if coeff_bound < 0:
        raise ValueError("coeff_bound must be >= 0")
    monos = obj.nonunit_monomials()
    out = []
    for support in _clique_supports(monos, cap):
        if not support:
            out.append(WeilElement.zero(obj))
            continue
        if coeff_bound == 0:
            continue
        for coeffs in itertools.product(range(1, coeff_bound + 1), repeat=len(support)):
            if len(out) >= cap:
                raise BudgetExceeded(
                    f"more than {cap} square-zero elements; raise the cap to continue"
                )
            out.append(
                WeilElement(obj, dict(zip(support, coeffs)), _validated=True)
            )
    out.sort(key=WeilElement.canon_key)
    return out


def _compatible_tuples(candidates, n: int, cap: int):
    """All n-tuples of candidates whose pairwise products (squares included)
    vanish; candidates are square-zero already, so only cross products are
    checked.  Results come in lexicographic candidate-index order."""
    compat = {}

    def ok(i, j):
        key = (i, j) if i <= j else (j, i)
        hit = compat.get(key)
        if hit is None:
            u, v = candidates[key[0]], candidates[key[1]]
            hit = all(
                _conflicts(m1, m2) for m1 in u.coeffs for m2 in v.coeffs
            )
            compat[key] = hit
        return hit

    tuples = []

    def extend(chosen):
        if len(chosen) == n:
            if len(tuples) >= cap:
                raise BudgetExceeded(
                    f"more than {cap} generator-image tuples; raise the cap"
                )
            tuples.append(tuple(candidates[i] for i in chosen))
            return
        for i in range(len(candidates)):
            if all(ok(i, j) for j in chosen):
                chosen.append(i)
                extend(chosen)
                chosen.pop()

    extend([])
    return tuples


_factor_tuple_cache = {}


def _factor_tuples(cod: WeilObject, n: int, coeff_bound: int, cap: int):
    """Cached per-factor generator-image tuples; sweeps reuse these heavily."""
    key = (cod.widths, n, coeff_bound, cap)
    hit = _factor_tuple_cache.get(key)
    if hit is None:
        candidates = square_zero_elements(cod, coeff_bound, cap=cap)
        hit = _compatible_tuples(candidates, n, cap)
        _factor_tuple_cache[key] = hit
    return hit


def enumerate_homs(
    dom: WeilObject,
    cod: WeilObject,
    coeff_bound: int,
    cap: int = DEFAULT_ENUM_CAP,
) -> list:
    """All homs dom -> cod with image coefficients <= coeff_bound.

    Complete within the bound (hom-sets themselves are infinite), listed in
    a deterministic canonical order.  Raises BudgetExceeded when more than
    `cap` homs (or intermediate candidates) would be produced.
    """
    if coeff_bound < 0:
        raise ValueError("coeff_bound must be >= 0")
    if dom.factor_count == 0:
        return [RigHom.unit_hom(cod)]
    per_factor = []
    total = 1
    for n in dom.widths:
        tuples = _factor_tuples(cod, n, coeff_bound, cap)
        per_factor.append(tuples)
        total *= len(tuples)
        if total > cap:
            raise BudgetExceeded(
                f"{dom} -> {cod} has more than {cap} homs at bound {coeff_bound}"
            )
    homs = [
        RigHom(dom, cod, rows, _validated=True)
        for rows in itertools.product(*per_factor)
    ]
    homs.sort(key=RigHom.canon_key)
    return homs


def count_homs_within(
    dom: WeilObject, cod: WeilObject, coeff_bound: int, cap: int = DEFAULT_ENUM_CAP
):
    """Number of homs at the bound, or None when it exceeds the cap."""
    try:
        return len(enumerate_homs(dom, cod, coeff_bound, cap=cap))
    except BudgetExceeded:
        return None


def objects_within(max_factors: int, max_width: int) -> list:
    """All Weil objects with at most max_factors factors of width <= max_width,
    ordered by factor count then lexicographically."""
    out = []
    for k in range(max_factors + 1):
        for widths in itertools.product(range(1, max_width + 1), repeat=k):
            out.append(WeilObject(widths))
    return out
