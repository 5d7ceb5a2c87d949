"""Group-class predicates (nilpotent, p-nilpotent, supersolvable, solvable,
p-group, A4-free), prime utilities, formation residuals, and hypercenters.

The three concrete formations are nilpotent (N), p-nilpotent (N_p) and
supersolvable (U); residuals and hypercenters are defined against these.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import (
    DTYPE,
    conjugate_rows,
    inverse_row,
    mult_rows,
    row_bytes,
    sort_rows,
)
from .group import (
    CapExceeded,
    PermGroup,
    Subgroup,
    join,
    meet,
    subgroup_from_rows,
    trivial_subgroup,
    whole_subgroup,
)
from .lattice import (
    _p_part,
    _primes,
    all_subgroups,
    chief_series,
    normal_subgroups,
    quotient,
    quotient_group,
    sylow_all,
)
from .perm import Permutation


@dataclass(frozen=True)
class GroupClass:
    """Selector for a class of groups; p carries the prime where needed."""

    tag: str  # nilpotent | p_nilpotent | supersolvable | solvable | p_group | A4_free
    p: int | None = None

    def __post_init__(self):
        needs_p = self.tag in ("p_nilpotent", "p_group")
        if needs_p and self.p is None:
            raise ValueError(f"{self.tag} requires a prime parameter")
        if not needs_p and self.p is not None:
            raise ValueError(f"{self.tag} takes no prime parameter")

    def label(self) -> str:
        return f"{self.tag}({self.p})" if self.p is not None else self.tag


@dataclass(frozen=True)
class FormationSelector:
    """One of the three concrete formations: N, N_p(p), U."""

    tag: str  # "N" | "N_p" | "U"
    p: int | None = None

    def __post_init__(self):
        if self.tag == "N_p" and self.p is None:
            raise ValueError("N_p requires a prime")
        if self.tag in ("N", "U") and self.p is not None:
            raise ValueError(f"{self.tag} takes no prime")

    def label(self) -> str:
        return f"N_{self.p}" if self.tag == "N_p" else self.tag


FORMATION_N = FormationSelector("N")
FORMATION_U = FormationSelector("U")


def primes_of(g: PermGroup) -> set[int]:
    return set(_primes(g.order))


def p_part(g: PermGroup, p: int) -> int:
    return _p_part(g.order, p)


# ---------------------------------------------------------------------------
# class membership


def _alt4_profile(q: PermGroup) -> bool:
    # among the five order-12 isomorphism types only Alt(4) has exactly
    # 3 involutions and 8 elements of order 3
    orders = q.orders()
    return int((orders == 2).sum()) == 3 and int((orders == 3).sum()) == 8


def _is_a4_free(g: PermGroup) -> bool:
    if g.order % 12 != 0 or g.order == 1:
        return True
    for h in all_subgroups(g):
        if h.order % 12 != 0:
            continue
        for n in normal_subgroups(h):
            if h.order // n.order != 12:
                continue
            if _alt4_profile(quotient_group(h, n)):
                return False
    return True


def is_class(g: PermGroup, c: GroupClass) -> bool:
    memo_key = ("class", c)
    if memo_key in g._cache:
        return g._cache[memo_key]
    if c.tag == "nilpotent":
        result = all(len(sylow_all(g, p)) == 1 for p in primes_of(g))
    elif c.tag == "p_nilpotent":
        complement = g.order // p_part(g, c.p)
        result = any(n.order == complement for n in normal_subgroups(g))
    elif c.tag == "supersolvable":
        result = all(
            f.kind == "elementary_abelian" and f.exponent == 1
            for f in chief_series(g).factors
        )
    elif c.tag == "solvable":
        result = all(
            f.kind == "elementary_abelian" for f in chief_series(g).factors
        )
    elif c.tag == "p_group":
        result = g.order == p_part(g, c.p)
    elif c.tag == "A4_free":
        result = _is_a4_free(g)
    else:
        raise ValueError(f"unknown class tag {c.tag!r}")
    g._cache[memo_key] = result
    return result


def _in_formation(g: PermGroup, f: FormationSelector) -> bool:
    if f.tag == "N":
        return is_class(g, GroupClass("nilpotent"))
    if f.tag == "N_p":
        return is_class(g, GroupClass("p_nilpotent", f.p))
    if f.tag == "U":
        return is_class(g, GroupClass("supersolvable"))
    raise ValueError(f"unknown formation {f.tag!r}")


# ---------------------------------------------------------------------------
# residuals


def residual(g: PermGroup, f: FormationSelector) -> Subgroup:
    """Intersection of all normal N with G/N in the formation. The result
    itself must have its quotient in the formation (intersection closure);
    that is asserted rather than assumed."""
    memo_key = ("residual", f)
    if memo_key in g._cache:
        return g._cache[memo_key]
    result = None
    for n in normal_subgroups(g):
        if _in_formation(quotient_group(g, n), f):
            result = n if result is None else meet(result, n)
    assert result is not None  # N = G always qualifies (trivial quotient)
    if not _in_formation(quotient_group(g, result), f):
        raise AssertionError(
            f"formation {f.label()} failed intersection closure on this group"
        )
    g._cache[memo_key] = result
    return result


# ---------------------------------------------------------------------------
# hypercenters


def _elementary_abelian_prime(v: PermGroup) -> int | None:
    ps = _primes(v.order)
    if len(ps) != 1:
        return None
    p = ps[0]
    rows = v.element_rows()
    gens = v.gen_rows
    # abelian with exponent p
    for i in range(gens.shape[0]):
        for j in range(i + 1, gens.shape[0]):
            a, b = gens[i], gens[j]
            if not (b[a] == a[b]).all():
                return None
    if rows.shape[0] > 1 and not (v.orders()[1:] == p).all():
        return None
    return p


def _affine_extension(q: PermGroup, v: Subgroup) -> PermGroup:
    """The permutation group on the points of v generated by translations
    of v and the conjugation action of q; isomorphic to V x| (Q/C_Q(V))."""
    pts = v.element_rows()
    index = {k: i for i, k in enumerate(row_bytes(pts))}
    gens: list[Permutation] = []
    for vg in v.gen_rows:
        moved = mult_rows(pts, vg)
        images = np.fromiter(
            (index[k] for k in row_bytes(moved)), dtype=DTYPE, count=pts.shape[0]
        )
        gens.append(Permutation._trusted(images))
    for qg in q.gen_rows:
        moved = conjugate_rows(pts, qg, inverse_row(qg))
        images = np.fromiter(
            (index[k] for k in row_bytes(moved)), dtype=DTYPE, count=pts.shape[0]
        )
        gens.append(Permutation._trusted(images))
    return PermGroup(max(pts.shape[0], 1), gens, caps=q.caps)


def _centralizes(q: PermGroup, v: Subgroup) -> bool:
    for qg in q.gen_rows:
        for vg in v.gen_rows:
            if not (vg[qg] == qg[vg]).all():
                return False
    return True


def _minimal_normals(q: PermGroup) -> list[Subgroup]:
    normals = [n for n in normal_subgroups(q) if n.order > 1]
    out = []
    for n in normals:
        if any(
            m.order < n.order and m.byteset <= n.byteset for m in normals
        ):
            continue
        out.append(n)
    return out


def _factor_is_central(q: PermGroup, v: Subgroup, f: FormationSelector) -> bool:
    """Whether the minimal normal subgroup v of q is an F-central factor:
    V x| (Q/C_Q(V)) lies in F. Nonabelian factors never qualify for N or U."""
    if _elementary_abelian_prime(v) is None:
        return False
    if f.tag == "N":
        return _centralizes(q, v)
    return _in_formation(_affine_extension(q, v), f)


def hypercenter(g: PermGroup, f: FormationSelector) -> Subgroup:
    """Largest normal subgroup whose chief factors (as factors of g) are all
    F-central; computed by iteratively joining the F-central minimal normal
    subgroups of the successive quotients."""
    if f.tag not in ("N", "U"):
        raise ValueError("hypercenter is defined here for the N and U formations")
    memo_key = ("hypercenter", f)
    if memo_key in g._cache:
        return g._cache[memo_key]
    z = trivial_subgroup(g)
    while z.order < g.order:
        if z.order == 1:
            q, qmap = g, None
        else:
            qmap = quotient(g, z)
            q = qmap.quotient
        grew = False
        lifted = z
        for v in _minimal_normals(q):
            if _factor_is_central(q, v, f):
                rows = v.element_rows() if qmap is None else qmap.lift_rows(v)
                lifted = join(lifted, subgroup_from_rows(g, rows))
                grew = True
        if not grew:
            break
        z = lifted
    g._cache[memo_key] = z
    return z


def f_central(
    g: PermGroup, below: Subgroup, above: Subgroup, f: FormationSelector
) -> bool:
    """F-centrality of the chief factor above/below of g."""
    if not (below.byteset < above.byteset):
        raise ValueError("below must be properly contained in above")
    norm_keys = {n.key for n in normal_subgroups(g)}
    if below.key not in norm_keys or above.key not in norm_keys:
        raise ValueError("chief factor bounds must be normal subgroups")
    for n in normal_subgroups(g):
        if (
            below.order < n.order < above.order
            and below.byteset <= n.byteset
            and n.byteset <= above.byteset
        ):
            raise ValueError("not a chief factor: a normal subgroup lies between")
    if below.order == 1:
        return _factor_is_central(g, above, f)
    qmap = quotient(g, below)
    v = qmap.forward_subgroup(above)
    return _factor_is_central(qmap.quotient, v, f)


def upper_central_series(g: PermGroup) -> list[Subgroup]:
    """Iterated center-of-quotient series (the oracle for hypercenter(N))."""
    from .group import centralizer

    series = [trivial_subgroup(g)]
    while True:
        if series[-1].order == 1:
            z1 = centralizer(g, whole_subgroup(g))
            nxt = subgroup_from_rows(g, z1.element_rows(), presorted=True)
        else:
            qmap = quotient(g, series[-1])
            zq = centralizer(qmap.quotient, whole_subgroup(qmap.quotient))
            nxt = subgroup_from_rows(g, qmap.lift_rows(zq))
        if nxt.order == series[-1].order:
            return series
        series.append(nxt)
