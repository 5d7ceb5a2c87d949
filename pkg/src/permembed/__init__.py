"""Subgroup embedding properties and structural verdicts for small
permutation groups.

The package computes permutation groups from generators (stabilizer
chains), enumerates subgroup-lattice families (normal, subnormal, maximal,
Sylow, Hall), evaluates formation residuals and hypercenters, decides
eleven subgroup-embedding properties with witnesses, and machine-checks a
catalog of structural facts (E*, L*, T* identifiers) over corpora of small
groups.
"""

from .perm import ParseError, Permutation, compose, format_cycles, inverse, parse_cycles
from .group import (
    CapExceeded,
    Caps,
    PermGroup,
    Subgroup,
    core,
    generate,
    is_subnormal,
    join,
    meet,
    normal_closure,
    normalizer,
    centralizer,
    product_is_permutable,
    subgroup_of,
)
from .catalog import build, default_corpus, parse_expr

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "Caps",
    "ParseError",
    "PermGroup",
    "Permutation",
    "Subgroup",
    "build",
    "centralizer",
    "compose",
    "core",
    "default_corpus",
    "format_cycles",
    "generate",
    "inverse",
    "is_subnormal",
    "join",
    "meet",
    "normal_closure",
    "normalizer",
    "parse_cycles",
    "parse_expr",
    "product_is_permutable",
    "subgroup_of",
    "__version__",
]
