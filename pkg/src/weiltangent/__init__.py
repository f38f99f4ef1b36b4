"""Exact symbolic kernel for the tangent structure carried by Weil rigs.

The library provides exact arithmetic in Weil rigs (`weil`), the tangent
structure they carry together with a bounded axiom verifier (`tangent`), a
uniform instance interface with a trivial fixture and a tangent-functor
checker (`instances`), a structural-term language with a bounded search
expressing rig homs as components of structural transformations
(`coherence`), tangent modules with embedding and representability checks
(`tmod`), and a command-line front end (`cli`).
"""

from .errors import (
    BadName,
    BudgetExceeded,
    ConstantPartNonzero,
    ExpressBudgetExceeded,
    IllTyped,
    InvalidPresentation,
    NotACone,
    ObjectMismatch,
    RelationViolation,
    TruncationTooLarge,
    WeilError,
)
from .weil import (
    NAT,
    W,
    W2,
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

__version__ = "0.1.0"
