"""Built-in group constructions, group-expression parsing, the text file
format for groups, and corpus management.

Expression grammar: Sym(n), Alt(n), Cyc(n), Dihedral(2n), Quaternion8,
SL23, DirectProduct(expr, expr), InnerHolomorph(expr), FromFile(path).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ._kernels import DTYPE, conjugate_rows, inverse_row, mult_rows, row_bytes
from .group import Caps, PermGroup, Subgroup, generate, subgroup_of
from .perm import ParseError, Permutation, format_cycles, parse_cycles


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class GroupExpr:
    """Constructor AST node."""

    head: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.head
        return f"{self.head}({','.join(str(a) for a in self.args)})"


_ATOMS = {"Quaternion8", "SL23"}
_UNARY_INT = {"Sym", "Alt", "Cyc", "Dihedral"}


def parse_expr(text: str) -> GroupExpr:
    expr, pos = _parse_expr(text, 0)
    if text[pos:].strip():
        raise ParseError(f"trailing text in group expression: {text[pos:]!r}")
    return expr


def _parse_expr(text: str, pos: int) -> tuple[GroupExpr, int]:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    m = re.match(r"[A-Za-z][A-Za-z0-9]*", text[pos:])
    if not m:
        raise ParseError(f"expected a constructor name at {text[pos:]!r}")
    head = m.group(0)
    pos += m.end()
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if head in _ATOMS:
        return GroupExpr(head), pos
    if pos >= len(text) or text[pos] != "(":
        raise ParseError(f"constructor {head} needs parenthesized arguments")
    pos += 1
    if head in _UNARY_INT:
        m = re.match(r"\s*(\d+)\s*\)", text[pos:])
        if not m:
            raise ParseError(f"{head} takes one integer argument")
        return GroupExpr(head, (int(m.group(1)),)), pos + m.end()
    if head == "FromFile":
        depth = 1
        end = pos
        while end < len(text) and depth:
            if text[end] == "(":
                depth += 1
            elif text[end] == ")":
                depth -= 1
            end += 1
        if depth:
            raise ParseError("unterminated FromFile(...)")
        return GroupExpr("FromFile", (text[pos : end - 1].strip(),)), end
    if head == "DirectProduct":
        a, pos = _parse_expr(text, pos)
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text) or text[pos] != ",":
            raise ParseError("DirectProduct needs two arguments")
        b, pos = _parse_expr(text, pos + 1)
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text) or text[pos] != ")":
            raise ParseError("missing ) in DirectProduct")
        return GroupExpr("DirectProduct", (a, b)), pos + 1
    if head == "InnerHolomorph":
        a, pos = _parse_expr(text, pos)
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text) or text[pos] != ")":
            raise ParseError("missing ) in InnerHolomorph")
        return GroupExpr("InnerHolomorph", (a,)), pos + 1
    raise ParseError(f"unknown constructor {head!r}")


# ---------------------------------------------------------------------------
# constructions


def _sym_gens(n: int) -> tuple[int, list[Permutation]]:
    if n < 1:
        raise ValueError("Sym(n) needs n >= 1")
    if n == 1:
        return 1, []
    gens = [parse_cycles("(1 2)", n)]
    if n > 2:
        gens.append(parse_cycles("(" + " ".join(str(i) for i in range(1, n + 1)) + ")", n))
    return n, gens


def _alt_gens(n: int) -> tuple[int, list[Permutation]]:
    if n < 1:
        raise ValueError("Alt(n) needs n >= 1")
    if n <= 2:
        return max(n, 1), []
    gens = [parse_cycles("(1 2 3)", n)]
    if n > 3:
        if n % 2 == 1:
            gens.append(
                parse_cycles("(" + " ".join(str(i) for i in range(1, n + 1)) + ")", n)
            )
        else:
            gens.append(
                parse_cycles("(" + " ".join(str(i) for i in range(2, n + 1)) + ")", n)
            )
    return n, gens


def _cyc_gens(n: int) -> tuple[int, list[Permutation]]:
    if n < 1:
        raise ValueError("Cyc(n) needs n >= 1")
    if n == 1:
        return 1, []
    return n, [parse_cycles("(" + " ".join(str(i) for i in range(1, n + 1)) + ")", n)]


def _dihedral_gens(order: int) -> tuple[int, list[Permutation]]:
    if order < 2 or order % 2 != 0:
        raise ValueError("Dihedral takes the (even) group order 2n")
    n = order // 2
    if n == 1:
        return 2, [parse_cycles("(1 2)", 2)]
    if n == 2:
        return 4, [parse_cycles("(1 2)", 4), parse_cycles("(3 4)", 4)]
    rot = parse_cycles("(" + " ".join(str(i) for i in range(1, n + 1)) + ")", n)
    images = np.array([(n - x) % n for x in range(n)], dtype=DTYPE)
    return n, [rot, Permutation(images)]


def _quaternion8() -> tuple[int, list[Permutation]]:
    # right regular action on [1, -1, i, -i, j, -j, k, -k]
    units = ["1", "i", "j", "k"]
    table = {
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "i"): (-1, "k"),
        ("j", "k"): (1, "i"), ("k", "j"): (-1, "i"),
        ("k", "i"): (1, "j"), ("i", "k"): (-1, "j"),
    }

    def mul(a, b):
        sa, ua = a
        sb, ub = b
        if ua == "1":
            return (sa * sb, ub)
        if ub == "1":
            return (sa * sb, ua)
        s, u = table[(ua, ub)]
        return (sa * sb * s, u)

    elems = [(s, u) for u in units for s in (1, -1)]
    index = {e: i for i, e in enumerate(elems)}

    def right_mult(by):
        return Permutation(
            np.array([index[mul(e, by)] for e in elems], dtype=DTYPE)
        )

    return 8, [right_mult((1, "i")), right_mult((1, "j"))]


def _sl23() -> tuple[int, list[Permutation]]:
    # action of SL(2,3) on the 8 nonzero row vectors of F_3^2
    vecs = [(x, y) for x in range(3) for y in range(3) if (x, y) != (0, 0)]
    index = {v: i for i, v in enumerate(vecs)}

    def mat_perm(m):
        images = []
        for x, y in vecs:
            nx = (x * m[0][0] + y * m[1][0]) % 3
            ny = (x * m[0][1] + y * m[1][1]) % 3
            images.append(index[(nx, ny)])
        return Permutation(np.array(images, dtype=DTYPE))

    return 8, [mat_perm([[1, 1], [0, 1]]), mat_perm([[1, 0], [1, 1]])]


def _direct_product(a: PermGroup, b: PermGroup, caps: Caps | None) -> PermGroup:
    degree = a.degree + b.degree
    gens = []
    for g in a.generators:
        images = np.concatenate(
            [g.images, np.arange(a.degree, degree, dtype=DTYPE)]
        )
        gens.append(Permutation._trusted(images))
    for g in b.generators:
        images = np.concatenate(
            [np.arange(a.degree, dtype=DTYPE), g.images + a.degree]
        )
        gens.append(Permutation._trusted(images))
    return generate(degree, gens, caps=caps)


class HolomorphEmbedding:
    """Point bookkeeping for a group acting on its own elements by right
    translations and inner automorphisms."""

    def __init__(self, base: PermGroup) -> None:
        self.base = base
        self.rows = base.element_rows()
        self.index = {k: i for i, k in enumerate(row_bytes(self.rows))}
        self.degree = self.rows.shape[0]

    def _images(self, moved: np.ndarray) -> Permutation:
        images = np.fromiter(
            (self.index[k] for k in row_bytes(moved)),
            dtype=DTYPE,
            count=self.degree,
        )
        return Permutation._trusted(images)

    def translation(self, p: Permutation) -> Permutation:
        return self._images(mult_rows(self.rows, p.images))

    def inner(self, p: Permutation) -> Permutation:
        return self._images(
            conjugate_rows(self.rows, p.images, inverse_row(p.images))
        )


def inner_holomorph(base: PermGroup, caps: Caps | None = None) -> tuple[PermGroup, HolomorphEmbedding]:
    """The group generated by all right translations and all inner
    automorphisms of `base`, acting faithfully on the elements of `base`.
    Its order is |base| * |base / Z(base)|."""
    emb = HolomorphEmbedding(base)
    gens = [emb.translation(g) for g in base.generators]
    gens += [emb.inner(g) for g in base.generators]
    return generate(emb.degree, gens, caps=caps), emb


def build(expr: GroupExpr | str, caps: Caps | None = None) -> PermGroup:
    """Evaluate a group expression into a handle with an exact order."""
    if isinstance(expr, str):
        expr = parse_expr(expr)
    head = expr.head
    if head == "Sym":
        degree, gens = _sym_gens(expr.args[0])
    elif head == "Alt":
        degree, gens = _alt_gens(expr.args[0])
    elif head == "Cyc":
        degree, gens = _cyc_gens(expr.args[0])
    elif head == "Dihedral":
        degree, gens = _dihedral_gens(expr.args[0])
    elif head == "Quaternion8":
        degree, gens = _quaternion8()
    elif head == "SL23":
        degree, gens = _sl23()
    elif head == "DirectProduct":
        return _direct_product(
            build(expr.args[0], caps), build(expr.args[1], caps), caps
        )
    elif head == "InnerHolomorph":
        return inner_holomorph(build(expr.args[0], caps), caps)[0]
    elif head == "FromFile":
        return parse_group_file(expr.args[0], caps=caps)
    else:
        raise ParseError(f"unknown constructor {head!r}")
    return generate(degree, gens, caps=caps)


# ---------------------------------------------------------------------------
# group file format


def parse_group_file(path: str, caps: Caps | None = None) -> PermGroup:
    """Text format: a `degree N` line, then one `gen <cycles>` line per
    generator; `#` starts a comment."""
    degree = None
    gens: list[Permutation] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("degree"):
                if degree is not None:
                    raise ParseError(f"{path}:{lineno}: duplicate degree line")
                try:
                    degree = int(line.split()[1])
                except (IndexError, ValueError):
                    raise ParseError(f"{path}:{lineno}: bad degree line") from None
            elif line.startswith("gen"):
                if degree is None:
                    raise ParseError(f"{path}:{lineno}: gen before degree")
                text = line[3:].strip()
                try:
                    gens.append(parse_cycles(text, degree))
                except ParseError as exc:
                    raise ParseError(f"{path}:{lineno}: {exc}") from None
            else:
                raise ParseError(f"{path}:{lineno}: unrecognized line {line!r}")
    if degree is None:
        raise ParseError(f"{path}: missing degree line")
    return generate(degree, gens, caps=caps)


def emit_group_file(g: PermGroup) -> str:
    lines = [f"degree {g.degree}"]
    lines += [f"gen {format_cycles(p)}" for p in g.generators]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# corpus


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    expr: GroupExpr


@dataclass
class Corpus:
    entries: list[CorpusEntry]
    max_order: int
    provenance: str = ""
    _groups: dict = field(default_factory=dict, repr=False)

    def group(self, entry: CorpusEntry, caps: Caps | None = None) -> PermGroup:
        if entry.id not in self._groups:
            self._groups[entry.id] = build(entry.expr, caps=caps)
        return self._groups[entry.id]


def _expr_order(expr: GroupExpr) -> int:
    import math

    if expr.head == "Sym":
        return math.factorial(expr.args[0])
    if expr.head == "Alt":
        n = expr.args[0]
        return max(math.factorial(n) // 2, 1)
    if expr.head == "Cyc":
        return expr.args[0]
    if expr.head == "Dihedral":
        return expr.args[0]
    if expr.head == "Quaternion8":
        return 8
    if expr.head == "SL23":
        return 24
    if expr.head == "DirectProduct":
        return _expr_order(expr.args[0]) * _expr_order(expr.args[1])
    raise ValueError(f"no closed-form order for {expr.head}")


FIXTURE_EXPRS = (
    GroupExpr("Sym", (4,)),
    GroupExpr("Alt", (5,)),
    GroupExpr("InnerHolomorph", (GroupExpr("Alt", (5,)),)),
)


def default_corpus(max_order: int) -> Corpus:
    """All Sym/Alt/Cyc/Dihedral up to max_order, Quaternion8, SL23, their
    pairwise direct products up to max_order, plus the example-fixture
    groups regardless of max_order."""
    atoms: list[GroupExpr] = []
    n = 2
    import math

    while math.factorial(n) <= max_order:
        atoms.append(GroupExpr("Sym", (n,)))
        n += 1
    n = 3
    while math.factorial(n) // 2 <= max_order:
        atoms.append(GroupExpr("Alt", (n,)))
        n += 1
    atoms += [GroupExpr("Cyc", (k,)) for k in range(1, max_order + 1)]
    atoms += [
        GroupExpr("Dihedral", (2 * k,)) for k in range(2, max_order // 2 + 1)
    ]
    if 8 <= max_order:
        atoms.append(GroupExpr("Quaternion8"))
    if 24 <= max_order:
        atoms.append(GroupExpr("SL23"))

    exprs: dict[str, GroupExpr] = {}
    for a in atoms:
        exprs.setdefault(str(a), a)
    pool = [a for a in atoms if 2 <= _expr_order(a) <= max_order // 2]
    for i, a in enumerate(pool):
        for b in pool[i:]:
            if _expr_order(a) * _expr_order(b) <= max_order:
                e = GroupExpr("DirectProduct", (a, b))
                exprs.setdefault(str(e), e)
    for e in FIXTURE_EXPRS:
        exprs.setdefault(str(e), e)
    entries = [CorpusEntry(i, e) for i, e in sorted(exprs.items())]
    return Corpus(entries, max_order, provenance=f"default_corpus({max_order})")


# ---------------------------------------------------------------------------
# example fixtures


@dataclass(frozen=True)
class ExampleFixture:
    id: str
    group_expr: GroupExpr
    claims: dict  # EmbeddingKind name -> expected bool
    notes: dict

    def build(self, caps: Caps | None = None) -> tuple[PermGroup, Subgroup]:
        g = build(self.group_expr, caps=caps)
        if self.id == "E1_6":
            base = build(GroupExpr("Alt", (5,)), caps=caps)
            g, emb = inner_holomorph(base, caps=caps)
            gens = [emb.translation(p) for p in base.generators]
            gens.append(emb.inner(parse_cycles("(1 2)(3 4)", 5)))
            return g, subgroup_of(g, gens)
        gens = [parse_cycles(t, g.degree) for t in self.notes["subgroup_gens"]]
        return g, subgroup_of(g, gens)


EXAMPLE_FIXTURES = {
    "E1_3": ExampleFixture(
        "E1_3",
        GroupExpr("Sym", (4,)),
        {"TAU_QUASINORMAL": False, "WEAKLY_TAU_EMBEDDED": True},
        {"subgroup_gens": ["(1 4)"]},
    ),
    "E1_4": ExampleFixture(
        "E1_4",
        GroupExpr("Alt", (5,)),
        {
            "S_QUASINORMAL": False,
            "S_EMBEDDED": False,
            "TAU_QUASINORMAL": True,
        },
        {"subgroup_gens": ["(1 2 3)", "(1 2)(3 4)"]},
    ),
    "E1_5": ExampleFixture(
        "E1_5",
        GroupExpr("Alt", (5,)),
        {"WEAKLY_S_EMBEDDED": True, "WEAKLY_TAU_EMBEDDED": False},
        {"subgroup_gens": ["(1 2 3)"]},
    ),
    "E1_6": ExampleFixture(
        "E1_6",
        GroupExpr("InnerHolomorph", (GroupExpr("Alt", (5,)),)),
        {"WEAKLY_TAU_EMBEDDED": True, "WEAKLY_S_EMBEDDED": False},
        {"fixture_subnormal_count": 3},
    ),
}
