"""Executable example fixtures, lemma property suites, and the theorem
hypothesis/conclusion/consistency harness with corpus scanning.

Fixture, lemma, and theorem identifiers (E1_3..E1_6, L2_*, T3_*) are the
stable names of the bundled fact catalog; reports reference them verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .group import (
    CapExceeded,
    Caps,
    PermGroup,
    Subgroup,
    core,
    is_subnormal,
    join,
    meet,
    normal_closure,
    reroot,
    subgroup_from_rows,
    trivial_subgroup,
    whole_subgroup,
)
from .classes import (
    FORMATION_N,
    FORMATION_U,
    FormationSelector,
    GroupClass,
    hypercenter,
    is_class,
    p_part,
    primes_of,
    residual,
)
from .lattice import (
    all_subgroups,
    characteristic,
    is_normal,
    maximal_subgroups,
    n_maximal_subgroups,
    normal_subgroups,
    quotient,
    quotient_group,
    subnormal_subgroups,
    sylow,
    sylow_all,
)
from .embeddings import (
    EmbeddingKind,
    GeneratedPartKind,
    _sub_brief,
    embedded_variant_with_witness,
    generated_part,
    has_supplement,
    is_embedded_variant,
    is_s_quasinormal,
    is_sq_embedded,
    is_tau_quasinormal,
    property_vector,
    s_quasinormal_subgroups,
    satisfies_triangle,
)
from .catalog import EXAMPLE_FIXTURES, Corpus, build


# ---------------------------------------------------------------------------
# example fixtures


def example_check(example_id: str, caps: Caps | None = None) -> dict:
    """Build one bundled fixture, compute its full property vector, and
    compare against the fixture's expected claims."""
    fx = EXAMPLE_FIXTURES[example_id]
    g, h = fx.build(caps=caps)
    vec = property_vector(g, h)
    claims = []
    agree = True
    for prop in sorted(fx.claims):
        expected = fx.claims[prop]
        computed = vec.flags[prop]
        ok = computed is expected
        agree &= ok
        claims.append(
            {
                "property": prop,
                "expected": expected,
                "computed": computed,
                "agree": ok,
                "witness": vec.witnesses[prop],
            }
        )
    out = {
        "id": example_id,
        "group": str(fx.group_expr),
        "group_order": g.order,
        "subgroup_order": h.order,
        "claims": claims,
        "agree": agree,
    }
    if example_id == "E1_6":
        sub_orders = [s.order for s in subnormal_subgroups(g)]
        out["notes"] = {
            "computed_subnormal_orders": sub_orders,
            "computed_subnormal_count": len(sub_orders),
            "fixture_subnormal_count": fx.notes["fixture_subnormal_count"],
            "scored": False,
        }
    return out


# ---------------------------------------------------------------------------
# lemma suites


@dataclass
class Tally:
    checked: int = 0
    failed: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    def check(self, cond: bool, detail) -> None:
        self.checked += 1
        if not cond:
            self.failed += 1
            if len(self.failures) < 10:
                self.failures.append(detail() if callable(detail) else detail)

    def skip(self, reason: str) -> None:
        self.skipped += 1
        if len(self.failures) < 10 and self.failed == 0:
            pass  # skips are counted, not detailed


def _guard(tally: Tally, fn) -> None:
    try:
        fn()
    except CapExceeded:
        tally.skip("cap")


def _sqe_subgroups(g: PermGroup) -> list[Subgroup]:
    return [s for s in all_subgroups(g) if is_sq_embedded(g, s)]


def _tau_subgroups(g: PermGroup) -> list[Subgroup]:
    return [s for s in all_subgroups(g) if is_tau_quasinormal(g, s)]


def _is_p_subgroup(s: PermGroup) -> tuple[bool, int | None]:
    ps = sorted(primes_of(s))
    if len(ps) == 1:
        return True, ps[0]
    return False, None


def _image(qmap, s: PermGroup) -> Subgroup:
    return qmap.forward_subgroup(s)


def _lemma_2_1(g: PermGroup, t: Tally, gid: str) -> None:
    fam = s_quasinormal_subgroups(g)
    for h in fam:
        t.check(is_subnormal(g, h), lambda: {"group": gid, "part": 1, "h": h.order})
        hg = core(g, h)
        hq = quotient_group(h, reroot(h, hg))
        t.check(
            is_class(hq, GroupClass("nilpotent")),
            lambda: {"group": gid, "part": 2, "h": h.order},
        )

        def part3(h=h):
            for u in all_subgroups(g):
                hu = meet(h, u)
                t.check(
                    is_s_quasinormal(u, reroot(u, hu)),
                    lambda: {"group": gid, "part": 3, "h": h.order, "u": u.order},
                )

        _guard(t, part3)
        for n in normal_subgroups(g):
            if n.order == 1:
                continue
            qmap = quotient(g, n)
            img = _image(qmap, join(h, n))
            t.check(
                is_s_quasinormal(qmap.quotient, img),
                lambda: {"group": gid, "part": 4, "h": h.order, "n": n.order},
            )
        isp, p = _is_p_subgroup(h)
        if isp and h.order > 1:
            from .group import normalizer
            from .lattice import o_subgroups

            op = o_subgroups(g, "O^p", p)
            norm = normalizer(g, h)
            t.check(
                op.byteset <= norm.byteset,
                lambda: {"group": gid, "part": 5, "h": h.order},
            )


def _lemma_2_2(g: PermGroup, t: Tally, gid: str) -> None:
    fam = s_quasinormal_subgroups(g)
    keys = fam.keys()
    for a in fam:
        for b in fam:
            if a.key >= b.key:
                continue
            t.check(
                join(a, b).key in keys,
                lambda: {"group": gid, "op": "join", "a": a.order, "b": b.order},
            )
            t.check(
                meet(a, b).key in keys,
                lambda: {"group": gid, "op": "meet", "a": a.order, "b": b.order},
            )


def _lemma_2_3(g: PermGroup, t: Tally, gid: str) -> None:
    for h in s_quasinormal_subgroups(g):
        if core(g, h).order != 1 or h.order == 1:
            continue
        for p in sorted(primes_of(h)):
            for ps in sylow_all(h, p):
                t.check(
                    is_s_quasinormal(g, reroot(g, ps)),
                    lambda: {"group": gid, "h": h.order, "p": p},
                )


def _lemma_2_4(g: PermGroup, t: Tally, gid: str) -> None:
    sqe = _sqe_subgroups(g)
    subs = list(all_subgroups(g))
    for h in sqe:
        hset = h.byteset
        for u in subs:
            if u.order <= h.order or not (hset <= u.byteset):
                continue
            t.check(
                is_sq_embedded(u, reroot(u, h)),
                lambda: {"group": gid, "part": 1, "h": h.order, "u": u.order},
            )
        for n in normal_subgroups(g):
            if n.order == 1:
                continue
            hn = join(h, n)
            t.check(
                is_sq_embedded(g, hn),
                lambda: {"group": gid, "part": "2a", "h": h.order, "n": n.order},
            )
            qmap = quotient(g, n)
            t.check(
                is_sq_embedded(qmap.quotient, _image(qmap, hn)),
                lambda: {"group": gid, "part": "2b", "h": h.order, "n": n.order},
            )


def _lemma_2_5(g: PermGroup, t: Tally, gid: str) -> None:
    subs = list(all_subgroups(g))
    for h in subs:
        part_g = generated_part(g, h, GeneratedPartKind.seG)
        for u in subs:
            if u.order <= h.order or not (h.byteset <= u.byteset):
                continue
            part_u = generated_part(u, reroot(u, h), GeneratedPartKind.seG)
            t.check(
                part_g.byteset <= part_u.byteset,
                lambda: {"group": gid, "part": 1, "h": h.order, "u": u.order},
            )
        for n in normal_subgroups(g):
            if n.order == 1:
                continue
            qmap = quotient(g, n)
            img_part = _image(qmap, join(part_g, n))
            hn_img = _image(qmap, join(h, n))
            rhs = generated_part(qmap.quotient, hn_img, GeneratedPartKind.seG)
            t.check(
                img_part.byteset <= rhs.byteset,
                lambda: {"group": gid, "part": 2, "h": h.order, "n": n.order},
            )


def _lemma_2_6(g: PermGroup, t: Tally, gid: str) -> None:
    taus = _tau_subgroups(g)
    subs = list(all_subgroups(g))
    for h in taus:
        for u in subs:
            if u.order <= h.order or not (h.byteset <= u.byteset):
                continue
            t.check(
                is_tau_quasinormal(u, reroot(u, h)),
                lambda: {"group": gid, "part": 1, "h": h.order, "u": u.order},
            )
        for n in normal_subgroups(g):
            if n.order == 1:
                continue
            qmap = quotient(g, n)
            img = _image(qmap, join(h, n))
            if primes_of(img) == primes_of(h):
                t.check(
                    is_tau_quasinormal(qmap.quotient, img),
                    lambda: {"group": gid, "part": 2, "h": h.order, "n": n.order},
                )
            if math.gcd(h.order, n.order) == 1:
                t.check(
                    is_tau_quasinormal(qmap.quotient, img),
                    lambda: {"group": gid, "part": 3, "h": h.order, "n": n.order},
                )


def _lemma_2_7(g: PermGroup, t: Tally, gid: str) -> None:
    subs = list(all_subgroups(g))
    for h in subs:
        htau = generated_part(g, h, GeneratedPartKind.tauG)
        isp, _ = _is_p_subgroup(h)
        if isp and h.order > 1:
            t.check(
                is_tau_quasinormal(g, htau),
                lambda: {"group": gid, "part": "1a", "h": h.order},
            )
            t.check(
                core(g, h).byteset <= htau.byteset,
                lambda: {"group": gid, "part": "1b", "h": h.order},
            )
        for u in subs:
            if u.order <= h.order or not (h.byteset <= u.byteset):
                continue
            htau_u = generated_part(u, reroot(u, h), GeneratedPartKind.tauG)
            t.check(
                htau.byteset <= htau_u.byteset,
                lambda: {"group": gid, "part": 2, "h": h.order, "u": u.order},
            )
        for n in normal_subgroups(g):
            if n.order == 1:
                continue
            coprime = math.gcd(h.order, n.order) == 1
            if not (isp and h.order > 1) and not coprime:
                continue
            qmap = quotient(g, n)
            lhs = _image(qmap, join(htau, n))
            rhs = generated_part(
                qmap.quotient, _image(qmap, join(h, n)), GeneratedPartKind.tauG
            )
            t.check(
                lhs.byteset <= rhs.byteset,
                lambda: {"group": gid, "part": "3/4", "h": h.order, "n": n.order},
            )


def _lemma_2_8(g: PermGroup, t: Tally, gid: str) -> None:
    from .lattice import o_subgroups

    for h in all_subgroups(g):
        isp, p = _is_p_subgroup(h)
        if not isp or h.order == 1:
            continue
        inside = h.byteset <= o_subgroups(g, "O_p", p).byteset
        c1 = is_s_quasinormal(g, h)
        c2 = inside and is_sq_embedded(g, h)
        c3 = inside and is_tau_quasinormal(g, h)
        t.check(
            c1 == c2 == c3,
            lambda: {"group": gid, "h": h.order, "c": [c1, c2, c3]},
        )


def _lemma_2_9(g: PermGroup, t: Tally, gid: str) -> None:
    subs = list(all_subgroups(g))
    weak = [
        h for h in subs if is_embedded_variant(g, h, EmbeddingKind.WEAKLY_S_EMBEDDED)
    ]
    for h in weak:
        for u in subs:
            if u.order <= h.order or not (h.byteset <= u.byteset):
                continue
            t.check(
                is_embedded_variant(u, reroot(u, h), EmbeddingKind.WEAKLY_S_EMBEDDED),
                lambda: {"group": gid, "part": 1, "h": h.order, "u": u.order},
            )
        for n in normal_subgroups(g):
            if n.order == 1:
                continue
            qmap = quotient(g, n)
            if n.byteset <= h.byteset:
                t.check(
                    is_embedded_variant(
                        qmap.quotient, _image(qmap, h), EmbeddingKind.WEAKLY_S_EMBEDDED
                    ),
                    lambda: {"group": gid, "part": 2, "h": h.order, "n": n.order},
                )
            if math.gcd(h.order, n.order) == 1:
                t.check(
                    is_embedded_variant(
                        qmap.quotient,
                        _image(qmap, join(h, n)),
                        EmbeddingKind.WEAKLY_S_EMBEDDED,
                    ),
                    lambda: {"group": gid, "part": 3, "h": h.order, "n": n.order},
                )


def _lemma_2_10(g: PermGroup, t: Tally, gid: str) -> None:
    subs = list(all_subgroups(g))
    weak = [
        h
        for h in subs
        if is_embedded_variant(g, h, EmbeddingKind.WEAKLY_TAU_EMBEDDED)
    ]
    for h in weak:
        isp, _ = _is_p_subgroup(h)
        for u in subs:
            if u.order <= h.order or not (h.byteset <= u.byteset):
                continue
            t.check(
                is_embedded_variant(
                    u, reroot(u, h), EmbeddingKind.WEAKLY_TAU_EMBEDDED
                ),
                lambda: {"group": gid, "part": 1, "h": h.order, "u": u.order},
            )
        for n in normal_subgroups(g):
            if n.order == 1:
                continue
            qmap = quotient(g, n)
            if isp and h.order > 1 and n.byteset <= h.byteset:
                t.check(
                    is_embedded_variant(
                        qmap.quotient,
                        _image(qmap, h),
                        EmbeddingKind.WEAKLY_TAU_EMBEDDED,
                    ),
                    lambda: {"group": gid, "part": 2, "h": h.order, "n": n.order},
                )
            if math.gcd(h.order, n.order) == 1:
                t.check(
                    is_embedded_variant(
                        qmap.quotient,
                        _image(qmap, join(h, n)),
                        EmbeddingKind.WEAKLY_TAU_EMBEDDED,
                    ),
                    lambda: {"group": gid, "part": 3, "h": h.order, "n": n.order},
                )


def _gcd_tower(gorder: int, p: int, n: int) -> bool:
    prod = 1
    for i in range(1, n + 1):
        prod *= p**i - 1
    return math.gcd(gorder, prod) == 1


def _lemma_2_12(g: PermGroup, t: Tally, gid: str) -> None:
    for p in sorted(primes_of(g)):
        for n in (1, 2):
            if not _gcd_tower(g.order, p, n):
                continue
            concl = is_class(g, GroupClass("p_nilpotent", p))
            for h in normal_subgroups(g):
                if p_part(h, p) > p**n:
                    continue
                if not is_class(quotient_group(g, h), GroupClass("p_nilpotent", p)):
                    continue
                t.check(
                    concl,
                    lambda: {"group": gid, "p": p, "n": n, "h": h.order},
                )


def _lemma_2_14(g: PermGroup, t: Tally, gid: str) -> None:
    from ._kernels import canonical_bytes, inverse_row, sort_rows, conjugate_rows
    from .lattice import hall

    for p in sorted(primes_of(g)):
        if math.gcd(g.order, p - 1) != 1:
            continue
        halls = hall(g, primes_of(g) - {p})
        if not len(halls):
            continue
        start = halls.members[0]
        orbit = {start.key}
        queue = [start.element_rows()]
        pairs = [(grow, inverse_row(grow)) for grow in g.gen_rows]
        qi = 0
        while qi < len(queue):
            rows = queue[qi]
            qi += 1
            for grow, ginv in pairs:
                crows = sort_rows(conjugate_rows(rows, grow, ginv))
                ck = canonical_bytes(crows)
                if ck not in orbit:
                    orbit.add(ck)
                    queue.append(crows)
        t.check(
            orbit == halls.keys(),
            lambda: {"group": gid, "p": p, "halls": len(halls), "orbit": len(orbit)},
        )


def _lemma_2_17(g: PermGroup, t: Tally, gid: str) -> None:
    for p in sorted(primes_of(g)):
        for ps in sylow_all(g, p):
            phi = characteristic(ps, "frattini")
            for n in normal_subgroups(g):
                inter = meet(n, reroot(g, ps))
                if not (inter.byteset <= phi.byteset):
                    continue
                t.check(
                    is_class(n, GroupClass("p_nilpotent", p)),
                    lambda: {"group": gid, "p": p, "n": n.order},
                )


def _lemma_2_19(g: PermGroup, t: Tally, gid: str) -> None:
    for f in (FORMATION_N, FORMATION_U):
        zf = hypercenter(g, f)
        for a in normal_subgroups(g):
            if a.order == 1:
                continue
            qmap = quotient(g, a)
            lhs = _image(qmap, join(a, zf))
            rhs = hypercenter(qmap.quotient, f)
            t.check(
                lhs.byteset <= rhs.byteset,
                lambda: {"group": gid, "f": f.label(), "part": 1, "a": a.order},
            )

        def part2(f=f, zf=zf):
            for a in all_subgroups(g):
                inter = meet(zf, a)
                za = hypercenter(a, f)
                t.check(
                    inter.byteset <= za.byteset,
                    lambda: {"group": gid, "f": f.label(), "part": 2, "a": a.order},
                )

        _guard(t, part2)
        if (f.tag == "N" and is_class(g, GroupClass("nilpotent"))) or (
            f.tag == "U" and is_class(g, GroupClass("supersolvable"))
        ):
            t.check(
                zf.order == g.order,
                lambda: {"group": gid, "f": f.label(), "part": 3},
            )


def _lemma_2_21(g: PermGroup, t: Tally, gid: str) -> None:
    for p in sorted(primes_of(g)):
        if math.gcd(g.order, p - 1) != 1:
            continue
        if not is_class(g, GroupClass("A4_free")):
            continue
        concl = is_class(g, GroupClass("p_nilpotent", p))
        for n in normal_subgroups(g):
            if n.order % (p**3) == 0:
                continue
            if not is_class(quotient_group(g, n), GroupClass("p_nilpotent", p)):
                continue
            t.check(concl, lambda: {"group": gid, "p": p, "n": n.order})


def _is_cyclic(s: PermGroup) -> bool:
    return s.order == 1 or bool((s.orders() == s.order).any())


def _lemma_2_22(g: PermGroup, t: Tally, gid: str) -> None:
    for p in sorted(primes_of(g)):
        if math.gcd(g.order, p - 1) != 1:
            continue
        if not _is_cyclic(sylow(g, p)):
            continue
        t.check(
            is_class(g, GroupClass("p_nilpotent", p)),
            lambda: {"group": gid, "p": p},
        )


def _lemma_2_18(t: Tally, caps: Caps | None = None) -> dict:
    """Subnormal subgroups of the direct square of Alt(5) are exactly the
    four products of subsets of the factors."""
    g = build("DirectProduct(Alt(5),Alt(5))", caps=caps)
    from .group import subgroup_of

    left = subgroup_of(g, list(g.generators[:2]))
    right = subgroup_of(g, list(g.generators[2:]))
    expected = {
        trivial_subgroup(g).key,
        left.key,
        right.key,
        whole_subgroup(g).key,
    }
    got = subnormal_subgroups(g)
    t.check(
        got.keys() == expected and len(got) == 4,
        lambda: {"group": "DirectProduct(Alt(5),Alt(5))", "count": len(got)},
    )
    return {"subnormal_count": len(got)}


_PER_GROUP_LEMMAS = {
    "L2_1": _lemma_2_1,
    "L2_2": _lemma_2_2,
    "L2_3": _lemma_2_3,
    "L2_4": _lemma_2_4,
    "L2_5": _lemma_2_5,
    "L2_6": _lemma_2_6,
    "L2_7": _lemma_2_7,
    "L2_8": _lemma_2_8,
    "L2_9": _lemma_2_9,
    "L2_10": _lemma_2_10,
    "L2_12": _lemma_2_12,
    "L2_14": _lemma_2_14,
    "L2_17": _lemma_2_17,
    "L2_19": _lemma_2_19,
    "L2_21": _lemma_2_21,
    "L2_22": _lemma_2_22,
}

LEMMA_IDS = tuple(sorted(_PER_GROUP_LEMMAS) + ["L2_18"])


def lemma_check(lemma_id: str, groups: list[tuple[str, PermGroup]], caps=None) -> dict:
    """Run one lemma's universal property over all admissible corpus
    instances; capped instances are counted as skipped, never dropped."""
    t = Tally()
    if lemma_id == "L2_18":
        extra = _lemma_2_18(t, caps=caps)
    else:
        fn = _PER_GROUP_LEMMAS.get(lemma_id)
        if fn is None:
            raise ValueError(f"unknown lemma id {lemma_id!r}")
        extra = {}
        for gid, g in groups:
            try:
                fn(g, t, gid)
            except CapExceeded:
                t.skip("cap")
    out = {
        "lemma": lemma_id,
        "instances": t.checked,
        "passed": t.checked - t.failed,
        "failed": t.failed,
        "skipped": t.skipped,
        "failures": t.failures,
    }
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# theorems


@dataclass(frozen=True)
class TheoremId:
    tag: str  # T3_1 .. T3_6
    p: int | None = None
    n: int | None = None

    def __post_init__(self):
        if self.tag in ("T3_1", "T3_2"):
            if self.p is None or self.n is None:
                raise ValueError(f"{self.tag} takes a prime p and an integer n")
        elif self.tag == "T3_3":
            if self.p is None or self.n is not None:
                raise ValueError("T3_3 takes a prime p only")
        elif self.tag in ("T3_4", "T3_5", "T3_6"):
            if self.p is not None or self.n is not None:
                raise ValueError(f"{self.tag} takes no parameters")
        else:
            raise ValueError(f"unknown theorem tag {self.tag!r}")

    def label(self) -> str:
        if self.tag in ("T3_1", "T3_2"):
            return f"{self.tag}(p={self.p},n={self.n})"
        if self.tag == "T3_3":
            return f"{self.tag}(p={self.p})"
        return self.tag


def default_theorem_grid() -> list[TheoremId]:
    grid = [TheoremId("T3_1", p, n) for p in (2, 3) for n in (1, 2)]
    grid += [TheoremId("T3_2", p, n) for p in (2, 3) for n in (1, 2)]
    grid += [TheoremId("T3_3", p) for p in (2, 3)]
    grid += [TheoremId("T3_4"), TheoremId("T3_5"), TheoremId("T3_6")]
    return grid


def side_condition(thm: TheoremId, g: PermGroup) -> bool:
    if thm.tag in ("T3_1", "T3_2"):
        return g.order % thm.p == 0 and _gcd_tower(g.order, thm.p, thm.n)
    if thm.tag == "T3_3":
        return (
            g.order % thm.p == 0
            and math.gcd(g.order, thm.p - 1) == 1
            and is_class(g, GroupClass("A4_free"))
        )
    return True


def conclusion(thm: TheoremId, g: PermGroup) -> bool:
    if thm.tag in ("T3_1", "T3_2", "T3_3"):
        return is_class(g, GroupClass("p_nilpotent", thm.p))
    return is_class(g, GroupClass("supersolvable"))


def _is_abelian(s: PermGroup) -> bool:
    gens = s.gen_rows
    for i in range(gens.shape[0]):
        for j in range(i + 1, gens.shape[0]):
            a, b = gens[i], gens[j]
            if not (b[a] == a[b]).all():
                return False
    return True


def _subject_passes(g: PermGroup, subject: Subgroup, cls: GroupClass) -> bool:
    """Supplement-in-class or triangle; triangle first since it never needs
    the ambient lattice."""
    if satisfies_triangle(g, subject):
        return True
    ok, _ = has_supplement(g, subject, cls)
    return ok


def _sylow_reps(h: PermGroup, p: int, fast: bool) -> list[Subgroup]:
    if fast:
        return [sylow(h, p)]
    return list(sylow_all(h, p))


def _contains_rows(container: Subgroup, rows: np.ndarray) -> bool:
    from ._kernels import row_bytes

    cs = container.byteset
    return all(k in cs for k in row_bytes(rows))


def _meet_rows_of(a: PermGroup, b: PermGroup) -> np.ndarray:
    from ._kernels import row_bytes

    small, big = (a, b) if a.order <= b.order else (b, a)
    bs = big.byteset
    keep = [i for i, k in enumerate(row_bytes(small.element_rows())) if k in bs]
    return np.ascontiguousarray(small.element_rows()[np.array(keep)])


def _check_h_t31(g, h, thm, fast) -> tuple[bool, dict]:
    p, n = thm.p, thm.n
    cls = GroupClass("p_nilpotent", p)
    res = residual(g, FormationSelector("N_p", p))
    for ps in _sylow_reps(h, p, fast):
        pg = reroot(g, ps)
        inter = _meet_rows_of(pg, res)
        for m in n_maximal_subgroups(ps, n):
            if _contains_rows(m, inter):
                continue
            subj = reroot(g, m)
            if not _subject_passes(g, subj, cls):
                return False, {"reason": "subject", "subject": _sub_brief(subj)}
    return True, {}


def _subjects_order_pn_or_4(g, pg_int, p, n, p_nonabelian) -> list[Subgroup]:
    """Subgroups of order p^n, plus cyclic order-4 subgroups when p=2, n=1
    and the Sylow subgroup is non-abelian; minus those inside Z_inf(G)."""
    zinf = hypercenter(g, FORMATION_N)
    out = []
    for l_sub in all_subgroups(pg_int):
        want = l_sub.order == p**n
        if not want and p == 2 and n == 1 and p_nonabelian:
            want = l_sub.order == 4 and _is_cyclic(l_sub)
        if not want:
            continue
        if l_sub.byteset <= zinf.byteset:
            continue
        out.append(reroot(g, l_sub))
    return out


def _check_h_t32(g, h, thm, fast) -> tuple[bool, dict]:
    p, n = thm.p, thm.n
    cls = GroupClass("p_nilpotent", p)
    res = residual(g, FormationSelector("N_p", p))
    for ps in _sylow_reps(h, p, fast):
        pg = reroot(g, ps)
        inter = subgroup_from_rows(g, _meet_rows_of(pg, res))
        for subj in _subjects_order_pn_or_4(g, inter, p, n, not _is_abelian(ps)):
            if not _subject_passes(g, subj, cls):
                return False, {"reason": "subject", "subject": _sub_brief(subj)}
    return True, {}


def _check_h_t33(g, h, thm, fast) -> tuple[bool, dict]:
    p = thm.p
    cls = GroupClass("p_nilpotent", p)
    res = residual(g, FormationSelector("N_p", p))
    zinf = hypercenter(g, FORMATION_N)
    for ps in _sylow_reps(h, p, fast):
        pg = reroot(g, ps)
        inter_rows = _meet_rows_of(pg, res)
        clause1 = True
        for m in n_maximal_subgroups(ps, 2):
            if _contains_rows(m, inter_rows):
                continue
            if not _subject_passes(g, reroot(g, m), cls):
                clause1 = False
                break
        if clause1:
            continue
        inter = subgroup_from_rows(g, inter_rows)
        clause2 = True
        for l_sub in all_subgroups(inter):
            if l_sub.order != p**2 or l_sub.byteset <= zinf.byteset:
                continue
            if not _subject_passes(g, reroot(g, l_sub), cls):
                clause2 = False
                break
        if not clause2:
            return False, {"reason": "both clauses fail", "sylow_order": ps.order}
    return True, {}


def _check_h_t34(g, h, thm, fast) -> tuple[bool, dict]:
    cls = GroupClass("supersolvable")
    for q in sorted(primes_of(h)):
        for ps in _sylow_reps(h, q, fast):
            if _is_cyclic(ps):
                continue
            for m in maximal_subgroups(ps):
                subj = reroot(g, m)
                if not _subject_passes(g, subj, cls):
                    return False, {"reason": "subject", "subject": _sub_brief(subj)}
    return True, {}


def _cyclic_prime_or_4_subjects(g, ps, include_zinf_gate_on_prime: bool):
    """Cyclic subgroups of prime order, plus cyclic order-4 ones when the
    Sylow 2-subgroup is non-abelian. The Z_inf(G) exemption always gates
    order-4 subjects; it gates prime-order subjects only when asked
    (the two stated placements differ and are both implemented)."""
    zinf = hypercenter(g, FORMATION_N)
    q = sorted(primes_of(ps))[0]
    nonab = not _is_abelian(ps)
    subjects = []
    for l_sub in all_subgroups(ps):
        if l_sub.order == q and _is_cyclic(l_sub):
            in_z = l_sub.byteset <= zinf.byteset
            if include_zinf_gate_on_prime and in_z:
                continue
            subjects.append((reroot(g, l_sub), in_z))
        elif l_sub.order == 4 and q == 2 and nonab and _is_cyclic(l_sub):
            if l_sub.byteset <= zinf.byteset:
                continue
            subjects.append((reroot(g, l_sub), False))
    return subjects


def _check_h_t35(g, h, thm, fast) -> tuple[bool, dict]:
    cls = GroupClass("supersolvable")
    for q in sorted(primes_of(h)):
        for ps in _sylow_reps(h, q, fast):
            if _is_cyclic(ps):
                continue
            for subj, _ in _cyclic_prime_or_4_subjects(g, ps, True):
                if not _subject_passes(g, subj, cls):
                    return False, {"reason": "subject", "subject": _sub_brief(subj)}
    return True, {}


def _check_h_t36(g, h, thm, fast) -> tuple[bool, dict]:
    cls = GroupClass("supersolvable")
    fstar = characteristic(h, "f_star")
    divergent = 0
    for q in sorted(primes_of(fstar)):
        for ps in _sylow_reps(fstar, q, fast):
            if _is_cyclic(ps):
                continue
            clause_i = all(
                _subject_passes(g, reroot(g, m), cls)
                for m in maximal_subgroups(ps)
            )
            if clause_i:
                continue
            clause_ii = True
            for subj, in_zinf in _cyclic_prime_or_4_subjects(g, ps, False):
                if not _subject_passes(g, subj, cls):
                    if in_zinf:
                        divergent += 1  # exempt under the other stated reading
                    clause_ii = False
            if not clause_ii:
                return False, {
                    "reason": "both clauses fail",
                    "sylow_order": ps.order,
                    "zinf_reading_divergences": divergent,
                }
    return True, {"zinf_reading_divergences": divergent}


_CHECKERS = {
    "T3_1": _check_h_t31,
    "T3_2": _check_h_t32,
    "T3_3": _check_h_t33,
    "T3_4": _check_h_t34,
    "T3_5": _check_h_t35,
    "T3_6": _check_h_t36,
}


def hypothesis(thm: TheoremId, g: PermGroup, fast: bool = False):
    """Scan H over the normal subgroups; returns (True, witness),
    (False, dispositions) or (None, note) when a cap blocked evaluation."""
    formation_u = thm.tag in ("T3_4", "T3_5", "T3_6")
    checker = _CHECKERS[thm.tag]
    dispositions = []
    indeterminate = False
    for h in normal_subgroups(g):
        q = quotient_group(g, h)
        if formation_u:
            qok = is_class(q, GroupClass("supersolvable"))
        else:
            qok = is_class(q, GroupClass("p_nilpotent", thm.p))
        if not qok:
            dispositions.append({"h_order": h.order, "reason": "quotient"})
            continue
        try:
            ok, info = checker(g, h, thm, fast)
        except CapExceeded as exc:
            indeterminate = True
            dispositions.append({"h_order": h.order, "reason": f"cap: {exc}"})
            continue
        if ok:
            witness = {"witness_h": _sub_brief(h)}
            witness.update(info)
            return True, witness
        info = dict(info)
        info["h_order"] = h.order
        dispositions.append(info)
    if indeterminate:
        return None, {"dispositions": dispositions}
    return False, {"dispositions": dispositions}


@dataclass
class Verdict:
    group_id: str
    theorem: str
    formation: str | None
    side_condition: bool | None
    hypothesis: bool | None
    hypothesis_witness: dict
    conclusion: bool | None
    consistent: bool | None

    def to_json(self) -> dict:
        tri = lambda v: "indeterminate" if v is None else v
        out = {
            "group": self.group_id,
            "theorem": self.theorem,
            "side_condition": tri(self.side_condition),
            "hypothesis": tri(self.hypothesis),
            "hypothesis_witness": self.hypothesis_witness,
            "conclusion": tri(self.conclusion),
            "consistent": tri(self.consistent),
        }
        if self.formation is not None:
            out["formation"] = self.formation
        return out


def theorem_check(thm: TheoremId, g: PermGroup, group_id: str = "", fast: bool = False) -> Verdict:
    """Evaluate side condition, hypothesis, conclusion, and the two-sided
    consistency verdict. A cap overflow yields an indeterminate hypothesis
    or verdict, never a coerced boolean."""
    try:
        side = side_condition(thm, g)
        concl = conclusion(thm, g)
    except CapExceeded as exc:
        return Verdict(
            group_id=group_id,
            theorem=thm.label(),
            formation="U" if thm.tag in ("T3_4", "T3_5", "T3_6") else None,
            side_condition=None,
            hypothesis=None,
            hypothesis_witness={"note": f"cap: {exc}"},
            conclusion=None,
            consistent=None,
        )
    if side:
        hyp, witness = hypothesis(thm, g, fast=fast)
    else:
        hyp, witness = None, {"note": "not evaluated: side condition is false"}
    if not side:
        consistent: bool | None = True
    else:
        sufficiency = True if hyp is not True else concl
        necessity = True if concl is not True else (None if hyp is None else hyp)
        if hyp is None and concl is not True:
            sufficiency = None
        if sufficiency is None or necessity is None:
            consistent = (
                False
                if (sufficiency is False or necessity is False)
                else None
            )
        else:
            consistent = sufficiency and necessity
    formation = "U" if thm.tag in ("T3_4", "T3_5", "T3_6") else None
    return Verdict(
        group_id=group_id,
        theorem=thm.label(),
        formation=formation,
        side_condition=side,
        hypothesis=hyp,
        hypothesis_witness=witness,
        conclusion=concl,
        consistent=consistent,
    )


def _scan_one(args):
    entry_id, expr_str, thm_tuples, fast, caps = args
    g = build(expr_str, caps=caps)
    out = []
    for tag, p, n in thm_tuples:
        thm = TheoremId(tag, p, n)
        v = theorem_check(thm, g, group_id=entry_id, fast=fast)
        out.append(v.to_json())
    return out


def corpus_scan(
    corpus: Corpus,
    thms: list[TheoremId],
    caps: Caps | None = None,
    fast: bool = False,
    jobs: int = 1,
) -> dict:
    """theorem_check over corpus x theorems; aggregates counts and lists
    every inconsistent verdict in full detail."""
    thm_tuples = [(t.tag, t.p, t.n) for t in thms]
    verdicts: list[dict] = []
    skipped_entries: list[dict] = []
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        tasks = [
            (e.id, str(e.expr), thm_tuples, fast, caps) for e in corpus.entries
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_scan_one, tasks):
                verdicts.extend(chunk)
    else:
        for e in corpus.entries:
            try:
                g = corpus.group(e, caps=caps)
            except CapExceeded as exc:
                skipped_entries.append({"group": e.id, "reason": str(exc)})
                continue
            for thm in thms:
                verdicts.append(
                    theorem_check(thm, g, group_id=e.id, fast=fast).to_json()
                )
    verdicts.sort(key=lambda v: (v["group"], v["theorem"]))
    counts = {"consistent": 0, "inconsistent": 0, "indeterminate": 0}
    inconsistent = []
    for v in verdicts:
        if v["consistent"] is True:
            counts["consistent"] += 1
        elif v["consistent"] is False:
            counts["inconsistent"] += 1
            inconsistent.append(v)
        else:
            counts["indeterminate"] += 1
    return {
        "max_order": corpus.max_order,
        "theorems": [t.label() for t in thms],
        "fast_sylow_mode": fast,
        "aggregate": counts,
        "inconsistent_verdicts": inconsistent,
        "skipped_entries": skipped_entries,
        "verdicts": verdicts,
    }
