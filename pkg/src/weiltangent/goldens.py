"""Golden-file generation for the oracles/ directory.

Each golden file records the command that produced it.  Values are derived
by running the library's own independent oracles (composition for the
equaliser map, exhaustive backtracking for module-map counts) and frozen so
the test suite can detect regressions.

Run ``python3 -m weiltangent.goldens [OUTDIR]`` to regenerate.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .report import dump_canonical
from .tangent import w_composite
from .weil import NAT

COMMAND = "python3 -m weiltangent.goldens"


def w_component_document():
    """The equaliser composite at N, derived by composition alone."""
    return {
        "command": COMMAND,
        "description": "component at N of the equaliser composite, "
        "derived by assembling the lift/zero-section pairing and composing",
        "hom": w_composite(NAT).to_json(),
    }


def fullness_document():
    """Counts of truncation-valid module-map families, by backtracking."""
    from .tmod import fullness_counts, standard_embedding_truncation

    trunc = standard_embedding_truncation()
    counts = fullness_counts(trunc)
    return {
        "command": COMMAND,
        "description": "number of families satisfying the module-map "
        "constraints on the declared truncation, per hom-object pair; "
        "derived by exhaustive backtracking the first time this ran",
        "truncation": trunc.to_json(),
        "counts": counts,
    }


def generate_all(outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "w_component.json").write_text(dump_canonical(w_component_document()))
    (outdir / "embedding_fullness.json").write_text(
        dump_canonical(fullness_document())
    )
    return sorted(p.name for p in outdir.glob("*.json"))


def load(path: Path):
    return json.loads(Path(path).read_text())


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("oracles")
    for name in generate_all(target):
        print(f"wrote {target / name}")
