"""The eleven subgroup-embedding predicates, the generated subgroups
H_sG / H_seG / H_tauG, the triangle disjunction, and supplement search.

Every predicate takes the ambient group first and a subgroup handle second;
results and witnesses are memoized on the ambient handle, keyed by the
subgroup's canonical key, so repeated queries over a lattice are cheap.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .group import (
    CapExceeded,
    PermGroup,
    Subgroup,
    _permutable,
    intersection_size,
    join,
    meet,
    normal_closure,
    core,
    reroot,
    subgroup_from_rows,
    trivial_subgroup,
    whole_subgroup,
)
from .classes import GroupClass, is_class, p_part, primes_of
from .lattice import all_subgroups, is_normal, normal_subgroups, subnormal_subgroups, sylow, sylow_all


class EmbeddingKind(enum.Enum):
    S_QUASINORMAL = "S_QUASINORMAL"
    TAU_QUASINORMAL = "TAU_QUASINORMAL"
    S_SEMIPERMUTABLE = "S_SEMIPERMUTABLE"
    SS_QUASINORMAL = "SS_QUASINORMAL"
    SQ_EMBEDDED = "SQ_EMBEDDED"
    S_EMBEDDED = "S_EMBEDDED"
    WEAKLY_S_EMBEDDED = "WEAKLY_S_EMBEDDED"
    WEAKLY_TAU_EMBEDDED = "WEAKLY_TAU_EMBEDDED"
    C_NORMAL = "C_NORMAL"
    C_STAR_NORMAL = "C_STAR_NORMAL"
    N_EMBEDDED = "N_EMBEDDED"


CLI_PROPERTY_NAMES = {
    kind: kind.value.lower().replace("_", "-") for kind in EmbeddingKind
}
PROPERTY_BY_CLI_NAME = {v: k for k, v in CLI_PROPERTY_NAMES.items()}


class GeneratedPartKind(enum.Enum):
    sG = "sG"
    seG = "seG"
    tauG = "tauG"


def _sub_brief(s: PermGroup) -> dict:
    from .perm import format_cycles

    return {
        "order": s.order,
        "generators": [format_cycles(p) for p in s.generators],
    }


@dataclass
class PropertyVector:
    """All embedding flags of one (G, H) pair, with witnesses. A flag is
    None when its computation exceeded a cap (recorded in the witness)."""

    group_order: int
    subgroup: dict
    flags: dict[str, bool | None] = field(default_factory=dict)
    witnesses: dict[str, dict] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# quantifier helpers


def _sylow_sweep(g: PermGroup, h: Subgroup, primes) -> tuple[bool, dict]:
    """Permutability of h against the full Sylow orbit of every listed
    prime. Returns (ok, witness)."""
    checked = 0
    for p in sorted(primes):
        for q in sylow_all(g, p):
            checked += 1
            if not _permutable(g, h, q):
                return False, {
                    "failing_prime": p,
                    "failing_sylow": _sub_brief(q),
                }
    return True, {"checked_products": checked}


def is_s_quasinormal(g: PermGroup, h: Subgroup) -> bool:
    ok, _ = s_quasinormal_with_witness(g, h)
    return ok


def s_quasinormal_with_witness(g: PermGroup, h: Subgroup):
    memo_key = ("e.sqn", h.key)
    if memo_key not in g._cache:
        g._cache[memo_key] = _sylow_sweep(g, h, primes_of(g))
    return g._cache[memo_key]


def s_quasinormal_subgroups(g: PermGroup):
    """All S-quasinormal subgroups, drawn from the subnormal family (which
    contains them all) and filtered by the Sylow sweep."""
    from .lattice import SubgroupList

    if "e.sqn_list" in g._cache:
        return g._cache["e.sqn_list"]
    members = tuple(
        s for s in subnormal_subgroups(g) if is_s_quasinormal(g, s)
    )
    result = SubgroupList(g, members, "s-quasinormal")
    g._cache["e.sqn_list"] = result
    return result


def tau_relevant_primes(g: PermGroup, h: Subgroup) -> list[int]:
    """Primes q with q coprime to |H| and gcd(|H|, |Q^G|) != 1, where Q^G is
    the normal closure of a Sylow q-subgroup (conjugation-invariant, so one
    closure per prime suffices)."""
    import math

    out = []
    for q in sorted(primes_of(g)):
        if h.order % q == 0:
            continue
        ck = ("e.sylow_closure_order", q)
        if ck not in g._cache:
            g._cache[ck] = normal_closure(g, sylow(g, q)).order
        if math.gcd(h.order, g._cache[ck]) != 1:
            out.append(q)
    return out


def tau_quasinormal_with_witness(g: PermGroup, h: Subgroup):
    memo_key = ("e.tau", h.key)
    if memo_key not in g._cache:
        g._cache[memo_key] = _sylow_sweep(g, h, tau_relevant_primes(g, h))
    return g._cache[memo_key]


def is_tau_quasinormal(g: PermGroup, h: Subgroup) -> bool:
    return tau_quasinormal_with_witness(g, h)[0]


def s_semipermutable_with_witness(g: PermGroup, h: Subgroup):
    memo_key = ("e.semi", h.key)
    if memo_key not in g._cache:
        primes = [q for q in primes_of(g) if h.order % q != 0]
        g._cache[memo_key] = _sylow_sweep(g, h, primes)
    return g._cache[memo_key]


def is_s_semipermutable(g: PermGroup, h: Subgroup) -> bool:
    return s_semipermutable_with_witness(g, h)[0]


def ss_quasinormal_with_witness(g: PermGroup, h: Subgroup):
    """Supplement B with HB = G such that h permutes with every Sylow
    subgroup of B. B ranges over the full lattice with a size prefilter."""
    memo_key = ("e.ss", h.key)
    if memo_key in g._cache:
        return g._cache[memo_key]
    scanned = 0
    result = (False, {"supplements_scanned": 0})
    for b in all_subgroups(g):
        if h.order * b.order % g.order != 0:
            continue
        if b.order < g.order // h.order:
            continue
        if h.order * b.order // intersection_size(h, b) != g.order:
            continue
        scanned += 1
        ok, _ = _sylow_sweep_in(g, h, b)
        if ok:
            result = (True, {"supplement": _sub_brief(b)})
            break
    else:
        result = (False, {"supplements_scanned": scanned})
    g._cache[memo_key] = result
    return result


def _sylow_sweep_in(g: PermGroup, h: Subgroup, b: Subgroup):
    """h permutes with every Sylow subgroup of b (orbit inside b)."""
    for p in sorted(primes_of(b)):
        for q in sylow_all(b, p):
            if not _permutable(g, h, reroot(g, q)):
                return False, {"failing_prime": p}
    return True, {}


def is_ss_quasinormal(g: PermGroup, h: Subgroup) -> bool:
    return ss_quasinormal_with_witness(g, h)[0]


def sq_embedded_with_witness(g: PermGroup, h: Subgroup):
    """Every Sylow subgroup of h is a Sylow subgroup of some S-quasinormal
    subgroup of g. One Sylow representative per prime suffices because the
    S-quasinormal family is closed under conjugation."""
    memo_key = ("e.sqe", h.key)
    if memo_key in g._cache:
        return g._cache[memo_key]
    family = s_quasinormal_subgroups(g)
    witnesses = {}
    result = None
    for p in sorted(primes_of(h)):
        d = sylow(h, p)
        dsize = d.order
        dset = d.byteset
        found = None
        for u in family:
            if p_part(u, p) == dsize and dset <= u.byteset:
                found = u
                break
        if found is None:
            result = (False, {"failing_prime": p, "sylow_order": dsize})
            break
        witnesses[str(p)] = _sub_brief(found)
    if result is None:
        result = (True, {"per_prime": witnesses})
    g._cache[memo_key] = result
    return result


def is_sq_embedded(g: PermGroup, h: Subgroup) -> bool:
    return sq_embedded_with_witness(g, h)[0]


# ---------------------------------------------------------------------------
# generated parts


_GENERATED_PRED = {
    GeneratedPartKind.sG: is_s_quasinormal,
    GeneratedPartKind.seG: is_sq_embedded,
    GeneratedPartKind.tauG: is_tau_quasinormal,
}


def generated_part(g: PermGroup, h: Subgroup, kind: GeneratedPartKind) -> Subgroup:
    """Join of all subgroups of h satisfying the kind's predicate in g.
    The trivial subgroup always qualifies, so this is always defined."""
    memo_key = ("e.genpart", kind, h.key)
    if memo_key in g._cache:
        return g._cache[memo_key]
    pred = _GENERATED_PRED[kind]
    result = trivial_subgroup(g)
    for l_sub in all_subgroups(h):
        l_in_g = reroot(g, l_sub)
        if l_in_g.order == 1:
            continue
        if result.byteset >= l_in_g.byteset:
            continue  # already inside the join
        if pred(g, l_in_g):
            result = join(result, l_in_g)
    g._cache[memo_key] = result
    return result


# ---------------------------------------------------------------------------
# existential K-scan variants


_KSCAN_KINDS = (
    EmbeddingKind.S_EMBEDDED,
    EmbeddingKind.WEAKLY_S_EMBEDDED,
    EmbeddingKind.WEAKLY_TAU_EMBEDDED,
    EmbeddingKind.C_NORMAL,
    EmbeddingKind.C_STAR_NORMAL,
    EmbeddingKind.N_EMBEDDED,
)


def _join_with_normal(g: PermGroup, h: Subgroup, k: Subgroup) -> Subgroup:
    ck = ("e.join", h.key, k.key)
    if ck not in g._cache:
        g._cache[ck] = join(h, k)
    return g._cache[ck]


def embedded_variant_with_witness(g: PermGroup, h: Subgroup, kind: EmbeddingKind):
    """Scan K over the normal subgroups in ascending (order, key) order and
    return the first witness, or False with the exhausted count."""
    if kind not in _KSCAN_KINDS:
        raise ValueError(f"{kind} is not an existential-K variant")
    memo_key = ("e.var", kind, h.key)
    if memo_key in g._cache:
        return g._cache[memo_key]

    need_genpart = {
        EmbeddingKind.S_EMBEDDED: GeneratedPartKind.sG,
        EmbeddingKind.WEAKLY_S_EMBEDDED: GeneratedPartKind.seG,
        EmbeddingKind.WEAKLY_TAU_EMBEDDED: GeneratedPartKind.tauG,
        EmbeddingKind.N_EMBEDDED: GeneratedPartKind.sG,
    }
    part = None
    if kind in need_genpart:
        part = generated_part(g, h, need_genpart[kind])
    target_closure = None
    if kind is EmbeddingKind.N_EMBEDDED:
        ck = ("e.nclo", h.key)
        if ck not in g._cache:
            g._cache[ck] = normal_closure(g, h)
        target_closure = g._cache[ck]
    core_h = core(g, h) if kind is EmbeddingKind.C_NORMAL else None

    scanned = 0
    result = None
    for k in normal_subgroups(g):
        scanned += 1
        hk = _join_with_normal(g, h, k)
        if kind in (EmbeddingKind.C_NORMAL, EmbeddingKind.C_STAR_NORMAL):
            if hk.order != g.order:
                continue
        elif kind is EmbeddingKind.N_EMBEDDED:
            if hk.key != target_closure.key:
                continue
        else:
            if not is_s_quasinormal(g, hk):
                continue
        inter_rows = _meet_rows(h, k)
        if kind is EmbeddingKind.C_STAR_NORMAL:
            inter = subgroup_from_rows(g, inter_rows, presorted=True)
            if not is_sq_embedded(g, inter):
                continue
        elif kind is EmbeddingKind.C_NORMAL:
            if not _rows_inside(inter_rows, core_h):
                continue
        else:
            if not _rows_inside(inter_rows, part):
                continue
        result = (True, {"witness_k": _sub_brief(k)})
        break
    if result is None:
        result = (False, {"normal_subgroups_scanned": scanned})
    g._cache[memo_key] = result
    return result


def _meet_rows(a: PermGroup, b: PermGroup) -> np.ndarray:
    from ._kernels import row_bytes

    small, big = (a, b) if a.order <= b.order else (b, a)
    bs = big.byteset
    keep = [i for i, k in enumerate(row_bytes(small.element_rows())) if k in bs]
    return np.ascontiguousarray(small.element_rows()[np.array(keep)])


def _rows_inside(rows: np.ndarray, target: PermGroup) -> bool:
    from ._kernels import row_bytes

    if rows.shape[0] > target.order:
        return False
    ts = target.byteset
    return all(k in ts for k in row_bytes(rows))


def is_embedded_variant(g: PermGroup, h: Subgroup, kind: EmbeddingKind) -> bool:
    return embedded_variant_with_witness(g, h, kind)[0]


def satisfies_triangle(g: PermGroup, h: Subgroup) -> bool:
    """Weakly S-embedded or weakly tau-embedded."""
    return (
        is_embedded_variant(g, h, EmbeddingKind.WEAKLY_S_EMBEDDED)
        or is_embedded_variant(g, h, EmbeddingKind.WEAKLY_TAU_EMBEDDED)
    )


# ---------------------------------------------------------------------------
# supplements


def has_supplement(g: PermGroup, h: Subgroup, c: GroupClass):
    """Some T <= G with HT = G and T in the class. The product-size identity
    |HT| = |H||T|/|H n T| makes the size test alone decide HT = G."""
    memo_key = ("e.supp", c, h.key)
    if memo_key in g._cache:
        return g._cache[memo_key]
    scanned = 0
    result = None
    for t in all_subgroups(g):
        if h.order * t.order % g.order != 0:
            continue
        if t.order < g.order // h.order:
            continue
        if h.order * t.order // intersection_size(h, t) != g.order:
            continue
        scanned += 1
        if is_class(t, c):
            result = (True, {"supplement": _sub_brief(t)})
            break
    if result is None:
        result = (False, {"supplements_scanned": scanned})
    g._cache[memo_key] = result
    return result


# ---------------------------------------------------------------------------
# vectors


_UNIVERSAL = {
    EmbeddingKind.S_QUASINORMAL: s_quasinormal_with_witness,
    EmbeddingKind.TAU_QUASINORMAL: tau_quasinormal_with_witness,
    EmbeddingKind.S_SEMIPERMUTABLE: s_semipermutable_with_witness,
    EmbeddingKind.SS_QUASINORMAL: ss_quasinormal_with_witness,
    EmbeddingKind.SQ_EMBEDDED: sq_embedded_with_witness,
}


def evaluate_property(g: PermGroup, h: Subgroup, kind: EmbeddingKind):
    """(flag, witness) for one property; raises CapExceeded when undecidable
    under the configured caps."""
    if kind in _UNIVERSAL:
        return _UNIVERSAL[kind](g, h)
    return embedded_variant_with_witness(g, h, kind)


def property_vector(g: PermGroup, h: Subgroup) -> PropertyVector:
    vec = PropertyVector(group_order=g.order, subgroup=_sub_brief(h))
    for kind in EmbeddingKind:
        try:
            flag, witness = evaluate_property(g, h, kind)
        except CapExceeded as exc:
            flag, witness = None, {"indeterminate": str(exc)}
        vec.flags[kind.value] = flag
        vec.witnesses[kind.value] = witness
    return vec
