"""Subgroup-lattice enumeration, Sylow and Hall subgroups, quotients,
chief series, and the characteristic subgroups (center, Frattini, Fitting,
layer, generalized Fitting, derived, O_p, O_p', O^p).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import (
    DTYPE,
    canonical_bytes,
    conjugate_row,
    identity_row,
    inverse_row,
    mult_row,
    mult_rows,
    row_bytes,
    sort_rows,
)
from .group import (
    CapExceeded,
    PermGroup,
    Subgroup,
    conjugacy_classes,
    join,
    meet,
    normal_closure,
    subgroup_from_rows,
    trivial_subgroup,
    whole_subgroup,
)
from .perm import Permutation


@dataclass(frozen=True)
class SubgroupList:
    """Deduplicated subgroups in canonical (order, key) order."""

    ambient: PermGroup
    members: tuple[Subgroup, ...]
    closure_tag: str

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def keys(self) -> set[bytes]:
        return {s.key for s in self.members}


def _sorted_members(subs: dict[bytes, Subgroup]) -> tuple[Subgroup, ...]:
    return tuple(sorted(subs.values(), key=lambda s: (s.order, s.key)))


def _primes(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _p_part(n: int, p: int) -> int:
    part = 1
    while n % p == 0:
        part *= p
        n //= p
    return part


# ---------------------------------------------------------------------------
# full lattice, normal and subnormal families


def all_subgroups(g: PermGroup) -> SubgroupList:
    """Every subgroup, by cyclic extension: seed with the cyclic subgroups
    of all elements, then close under joins with those cyclic subgroups."""
    if "all_subgroups" in g._cache:
        return g._cache["all_subgroups"]
    if g.order > g.caps.lattice:
        raise CapExceeded("lattice", g.caps.lattice, f"group order {g.order}")
    rows = g.element_rows()
    degree = g.degree

    cyclics: dict[bytes, tuple[Subgroup, np.ndarray]] = {}
    for r in rows[1:]:
        powers = [identity_row(degree), np.ascontiguousarray(r)]
        cur = mult_row(r, r)
        while not (cur == powers[0]).all():
            powers.append(cur)
            cur = mult_row(cur, r)
        crows = sort_rows(np.stack(powers))
        ckey = canonical_bytes(crows)
        if ckey not in cyclics:
            sub = subgroup_from_rows(
                g, crows, gens=[Permutation._trusted(r)], presorted=True
            )
            cyclics[ckey] = (sub, np.ascontiguousarray(r))

    found: dict[bytes, Subgroup] = {}
    triv = trivial_subgroup(g)
    found[triv.key] = triv
    queue: list[Subgroup] = [triv]
    for sub, _ in cyclics.values():
        if sub.key not in found:
            found[sub.key] = sub
            queue.append(sub)
    qi = 0
    while qi < len(queue):
        a = queue[qi]
        qi += 1
        if a.order == g.order:
            continue
        abytes = a.byteset
        for c, crep in cyclics.values():
            if row_bytes(crep[None, :])[0] in abytes:
                continue
            seeds = np.concatenate([a.element_rows(), c.element_rows()])
            gens = np.concatenate([a.gen_rows, c.gen_rows])
            jrows = _kernels.closure(seeds, gens, g.order)
            assert jrows is not None
            jkey = canonical_bytes(jrows)
            if jkey not in found:
                sub = subgroup_from_rows(g, jrows, presorted=True)
                found[jkey] = sub
                queue.append(sub)
    result = SubgroupList(g, _sorted_members(found), "all")
    g._cache["all_subgroups"] = result
    return result


def normal_subgroups(g: PermGroup) -> SubgroupList:
    """All normal subgroups: join-closure of the subgroups generated by
    single conjugacy classes. Never needs the full lattice."""
    if "normal_subgroups" in g._cache:
        return g._cache["normal_subgroups"]
    if g.order > g.caps.element:
        raise CapExceeded("element", g.caps.element, f"group order {g.order}")
    atoms: dict[bytes, Subgroup] = {}
    for cls in conjugacy_classes(g):
        if cls.shape[0] == 1 and (cls[0] == identity_row(g.degree)).all():
            continue
        seeds = np.concatenate([identity_row(g.degree)[None, :], cls])
        rows = _kernels.closure(seeds, cls, g.order)
        assert rows is not None
        key = canonical_bytes(rows)
        if key not in atoms:
            atoms[key] = subgroup_from_rows(g, rows, presorted=True)
    found: dict[bytes, Subgroup] = {}
    triv = trivial_subgroup(g)
    found[triv.key] = triv
    queue: list[Subgroup] = [triv]
    for sub in atoms.values():
        if sub.key not in found:
            found[sub.key] = sub
            queue.append(sub)
    qi = 0
    while qi < len(queue):
        n = queue[qi]
        qi += 1
        for a in atoms.values():
            if a.byteset <= n.byteset:
                continue
            j = join(n, a)
            if j.key not in found:
                found[j.key] = j
                queue.append(j)
    result = SubgroupList(g, _sorted_members(found), "normal")
    g._cache["normal_subgroups"] = result
    return result


def is_normal(g: PermGroup, h: Subgroup) -> bool:
    norm = g._cache.get("normal_keyset")
    if norm is None:
        norm = normal_subgroups(g).keys()
        g._cache["normal_keyset"] = norm
    return h.key in norm


def subnormal_subgroups(g: PermGroup) -> SubgroupList:
    """All subnormal subgroups, recursively: {G} union the subnormal
    subgroups of every proper normal subgroup."""
    if "subnormal_subgroups" in g._cache:
        return g._cache["subnormal_subgroups"]

    memo: dict[bytes, tuple[Subgroup, ...]] = {}

    def rec(h: PermGroup) -> tuple[Subgroup, ...]:
        hkey = h.key
        if hkey in memo:
            return memo[hkey]
        found: dict[bytes, Subgroup] = {whole_subgroup(h).key: whole_subgroup(h)}
        for n in normal_subgroups(h):
            if n.order == h.order:
                continue
            for s in rec(n):
                found.setdefault(s.key, s)
        out = _sorted_members(found)
        memo[hkey] = out
        return out

    members = tuple(
        subgroup_from_rows(g, s.element_rows(), gens=list(s.generators),
                           presorted=True)
        for s in rec(g)
    )
    result = SubgroupList(g, members, "subnormal")
    g._cache["subnormal_subgroups"] = result
    return result


# ---------------------------------------------------------------------------
# maximal and n-maximal subgroups


def _subgroups_within(g: PermGroup, m: Subgroup) -> list[Subgroup]:
    mset = m.byteset
    return [
        s
        for s in all_subgroups(g)
        if s.order < m.order and s.order > 0 and s.byteset <= mset
    ]


def _maximal_within(g: PermGroup, m: Subgroup) -> tuple[Subgroup, ...]:
    """Maximal proper subgroups of m, drawn from the lattice of g."""
    memo_key = ("maximal_within", m.key)
    if memo_key in g._cache:
        return g._cache[memo_key]
    inside = _subgroups_within(g, m)
    out = []
    for s in inside:
        if any(
            s.order < t.order and s.byteset <= t.byteset for t in inside
        ):
            continue
        out.append(s)
    result = tuple(sorted(out, key=lambda s: (s.order, s.key)))
    g._cache[memo_key] = result
    return result


def maximal_subgroups(g: PermGroup) -> SubgroupList:
    members = _maximal_within(g, whole_subgroup(g))
    return SubgroupList(g, members, "maximal-of-G")


def n_maximal_subgroups(g: PermGroup, n: int) -> SubgroupList:
    """Subgroups at the end of a chain of n successive maximal steps.

    For p-groups this is exactly the set of subgroups of index p^n, which
    avoids chain search.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    primes = _primes(g.order)
    if len(primes) <= 1:
        p = primes[0] if primes else 2
        target, idx = g.order, 0
        while idx < n and target % p == 0:
            target //= p
            idx += 1
        if idx < n:
            members: tuple[Subgroup, ...] = ()
        else:
            members = tuple(
                s for s in all_subgroups(g) if s.order == target
            )
        return SubgroupList(g, members, f"{n}-maximal")
    level: dict[bytes, Subgroup] = {whole_subgroup(g).key: whole_subgroup(g)}
    for _ in range(n):
        nxt: dict[bytes, Subgroup] = {}
        for m in level.values():
            for s in _maximal_within(g, m):
                nxt.setdefault(s.key, s)
        level = nxt
        if not level:
            break
    return SubgroupList(g, _sorted_members(level), f"{n}-maximal")


# ---------------------------------------------------------------------------
# Sylow and Hall subgroups


def sylow(g: PermGroup, p: int) -> Subgroup:
    """One Sylow p-subgroup, grown by greedy closure with normalizing
    p-elements, taking the smallest canonical key at every step."""
    memo_key = ("sylow", p)
    if memo_key in g._cache:
        return g._cache[memo_key]
    target = _p_part(g.order, p)
    current = trivial_subgroup(g)
    rows = g.element_rows()
    orders = g.orders()
    inv = g.inv_rows()
    p_power = np.zeros(rows.shape[0], dtype=bool)
    for i, o in enumerate(orders):
        o = int(o)
        while o % p == 0:
            o //= p
        p_power[i] = o == 1
    while current.order < target:
        mask = p_power.copy()
        cset = current.byteset
        for s in current.gen_rows:
            conj = np.take_along_axis(rows, s[inv], axis=1)
            ok = np.fromiter(
                (k in cset for k in row_bytes(conj)),
                dtype=bool,
                count=rows.shape[0],
            )
            mask &= ok
        in_current = np.fromiter(
            (k in cset for k in row_bytes(rows)), dtype=bool, count=rows.shape[0]
        )
        mask &= ~in_current
        best = None
        for r in rows[mask]:
            seeds = np.concatenate([current.element_rows(), r[None, :]])
            gens = np.concatenate([current.gen_rows, r[None, :]])
            crows = _kernels.closure(seeds, gens, target)
            if crows is None:
                continue  # not a p-group extension within the Sylow bound
            key = canonical_bytes(crows)
            if best is None or key < best[0]:
                best = (key, crows)
        assert best is not None, "Sylow ascent must find an extension"
        current = subgroup_from_rows(g, best[1], presorted=True)
    g._cache[memo_key] = current
    return current


def sylow_all(g: PermGroup, p: int) -> SubgroupList:
    """The full conjugation orbit of sylow(g, p)."""
    memo_key = ("sylow_all", p)
    if memo_key in g._cache:
        return g._cache[memo_key]
    start = sylow(g, p)
    pairs = [(grow, inverse_row(grow)) for grow in g.gen_rows]
    orbit: dict[bytes, Subgroup] = {start.key: start}
    queue = [start]
    qi = 0
    while qi < len(queue):
        s = queue[qi]
        qi += 1
        for grow, ginv in pairs:
            crows = sort_rows(_kernels.conjugate_rows(s.element_rows(), grow, ginv))
            ckey = canonical_bytes(crows)
            if ckey not in orbit:
                sub = subgroup_from_rows(g, crows, presorted=True)
                orbit[ckey] = sub
                queue.append(sub)
    result = SubgroupList(g, _sorted_members(orbit), f"sylow-{p}")
    g._cache[memo_key] = result
    return result


def hall(g: PermGroup, primes: set[int]) -> SubgroupList:
    """All subgroups whose order is the full pi-part of |G| (possibly none)."""
    part = 1
    for p in _primes(g.order):
        if p in primes:
            part *= _p_part(g.order, p)
    members = tuple(s for s in all_subgroups(g) if s.order == part)
    return SubgroupList(g, members, f"hall-{sorted(primes)}")


# ---------------------------------------------------------------------------
# quotients


@dataclass
class QuotientMap:
    """Faithful action of source/kernel on the right cosets of kernel."""

    source: PermGroup
    kernel: Subgroup
    quotient: PermGroup
    reps: np.ndarray  # coset index -> representative row
    coset_of: np.ndarray  # index into source rows -> coset index
    section: dict[bytes, Permutation] = field(default_factory=dict)

    def _coset_index(self, rows: np.ndarray) -> np.ndarray:
        idx = self.source._cache["row_index"]
        return np.fromiter(
            (self.coset_of[idx[k]] for k in row_bytes(rows)),
            dtype=np.int64,
            count=rows.shape[0],
        )

    def forward(self, x: Permutation) -> Permutation:
        """Image of a source element in the quotient."""
        moved = mult_rows(self.reps, x.images)
        return Permutation._trusted(
            self._coset_index(moved).astype(DTYPE)
        )

    def forward_rows(self, rows: np.ndarray) -> np.ndarray:
        out = np.empty((rows.shape[0], self.reps.shape[0]), dtype=DTYPE)
        for i, r in enumerate(rows):
            out[i] = self._coset_index(mult_rows(self.reps, r)).astype(DTYPE)
        return out

    def forward_subgroup(self, s: PermGroup) -> Subgroup:
        rows = sort_rows(np.unique(self.forward_rows(s.element_rows()), axis=0))
        return subgroup_from_rows(self.quotient, rows, presorted=True)

    def lift_rows(self, quotient_sub: PermGroup) -> np.ndarray:
        """Rows of the full preimage of a subgroup of the quotient."""
        qset = quotient_sub.byteset
        src_rows = self.source.element_rows()
        keep = []
        for c in range(self.reps.shape[0]):
            img = self._coset_index(mult_rows(self.reps, self.reps[c])).astype(DTYPE)
            if row_bytes(img[None, :])[0] in qset:
                keep.append(c)
        keepset = set(keep)
        mask = np.fromiter(
            (int(c) in keepset for c in self.coset_of),
            dtype=bool,
            count=src_rows.shape[0],
        )
        return np.ascontiguousarray(src_rows[mask])


def quotient_group(g: PermGroup, n: Subgroup) -> PermGroup:
    """The quotient as a plain group handle for isomorphism-invariant
    queries (class membership, orders). The trivial kernel maps to g
    itself, avoiding a needless regular representation."""
    if n.order == 1:
        return g
    return quotient(g, n).quotient


def quotient(g: PermGroup, n: Subgroup) -> QuotientMap:
    """Quotient by a normal subgroup, acting on right cosets."""
    memo_key = ("quotient", n.key)
    if memo_key in g._cache:
        return g._cache[memo_key]
    if not is_normal(g, n):
        raise ValueError("kernel is not normal in the group")
    index = g.order // n.order
    if index > g.caps.element:
        raise CapExceeded("element", g.caps.element, f"quotient index {index}")
    rows = g.element_rows()
    if "row_index" not in g._cache:
        g._cache["row_index"] = {k: i for i, k in enumerate(row_bytes(rows))}
    row_index = g._cache["row_index"]
    coset_of = np.full(rows.shape[0], -1, dtype=np.int64)
    reps = []
    nrows = n.element_rows()
    for i in range(rows.shape[0]):
        if coset_of[i] >= 0:
            continue
        c = len(reps)
        reps.append(rows[i])
        coset_rows = mult_rows(nrows, rows[i])
        for k in row_bytes(coset_rows):
            coset_of[row_index[k]] = c
    reps_arr = np.ascontiguousarray(np.stack(reps))
    qmap = QuotientMap(
        source=g,
        kernel=n,
        quotient=PermGroup(max(index, 1), [], caps=g.caps),
        reps=reps_arr,
        coset_of=coset_of,
    )
    qgens = []
    section: dict[bytes, Permutation] = {}
    for gperm in g.generators:
        img = qmap.forward(gperm)
        if not img.is_identity():
            qgens.append(img)
            section.setdefault(img.key, gperm)
    qgroup = PermGroup(max(index, 1), qgens, caps=g.caps)
    qmap.quotient = qgroup
    qmap.section = section
    g._cache[memo_key] = qmap
    return qmap


# ---------------------------------------------------------------------------
# chief series


@dataclass(frozen=True)
class ChiefFactor:
    order: int
    kind: str  # "elementary_abelian" or "nonabelian"
    p: int | None = None
    exponent: int | None = None  # k with factor order p^k, when abelian


@dataclass(frozen=True)
class ChiefSeries:
    terms: tuple[Subgroup, ...]
    factors: tuple[ChiefFactor, ...]


def _factor_structure(g: PermGroup, lower: Subgroup, upper: Subgroup) -> ChiefFactor:
    forder = upper.order // lower.order
    ps = _primes(forder)
    lset = lower.byteset
    if len(ps) == 1:
        p = ps[0]
        gens = upper.gen_rows
        abelian = True
        for i in range(gens.shape[0]):
            for j in range(i + 1, gens.shape[0]):
                a, b = gens[i], gens[j]
                comm = mult_row(
                    mult_row(mult_row(inverse_row(a), inverse_row(b)), a), b
                )
                if row_bytes(comm[None, :])[0] not in lset:
                    abelian = False
                    break
            if not abelian:
                break
        if abelian:
            exp_ok = True
            for i in range(gens.shape[0]):
                powed = identity_row(g.degree)
                for _ in range(p):
                    powed = mult_row(powed, gens[i])
                if row_bytes(powed[None, :])[0] not in lset:
                    exp_ok = False
                    break
            if exp_ok:
                k = 0
                m = forder
                while m > 1:
                    m //= p
                    k += 1
                return ChiefFactor(forder, "elementary_abelian", p, k)
    return ChiefFactor(forder, "nonabelian")


def chief_series(g: PermGroup) -> ChiefSeries:
    """Ascending chief series, choosing at each step the minimal normal
    subgroup over the current term with the smallest canonical key."""
    if "chief_series" in g._cache:
        return g._cache["chief_series"]
    normals = list(normal_subgroups(g))
    terms = [trivial_subgroup(g)]
    while terms[-1].order < g.order:
        cur = terms[-1]
        cset = cur.byteset
        above = [
            n for n in normals if n.order > cur.order and cset <= n.byteset
        ]
        minimal = []
        for n in above:
            if any(
                m.order < n.order and m.byteset <= n.byteset for m in above
            ):
                continue
            minimal.append(n)
        chosen = min(minimal, key=lambda s: s.key)
        terms.append(chosen)
    factors = tuple(
        _factor_structure(g, lo, hi) for lo, hi in zip(terms, terms[1:])
    )
    result = ChiefSeries(tuple(terms), factors)
    g._cache["chief_series"] = result
    return result


# ---------------------------------------------------------------------------
# characteristic subgroups


def _derived(g: PermGroup) -> Subgroup:
    gens = g.gen_rows
    comms = []
    for i in range(gens.shape[0]):
        for j in range(gens.shape[0]):
            if i == j:
                continue
            a, b = gens[i], gens[j]
            comms.append(
                mult_row(mult_row(mult_row(inverse_row(a), inverse_row(b)), a), b)
            )
    if not comms:
        return trivial_subgroup(g)
    rows = _kernels.closure(
        np.concatenate([identity_row(g.degree)[None, :], np.stack(comms)]),
        np.stack(comms),
        g.caps.element,
    )
    if rows is None:
        raise CapExceeded("element", g.caps.element, "derived subgroup")
    return normal_closure(g, subgroup_from_rows(g, rows, presorted=True))


def _is_simple(g: PermGroup) -> bool:
    return g.order > 1 and len(normal_subgroups(g)) == 2


def _components(g: PermGroup) -> list[Subgroup]:
    """Subnormal quasisimple subgroups: Q perfect with Q/Z(Q) simple."""
    from .group import centralizer  # local to avoid cycle at import time

    out = []
    for q in subnormal_subgroups(g):
        if q.order == 1:
            continue
        dq = _derived(q)
        if dq.order != q.order:
            continue
        z = centralizer(q, whole_subgroup(q))
        if _is_simple(quotient_group(q, z)):
            out.append(q)
    return out


def o_subgroups(g: PermGroup, which: str, p: int) -> Subgroup:
    """O_p (largest normal p-subgroup), O_p' (largest normal p'-subgroup),
    O^p (smallest normal subgroup with p-group quotient)."""
    memo_key = ("o", which, p)
    if memo_key in g._cache:
        return g._cache[memo_key]
    if which == "O_p":
        result = None
        for s in sylow_all(g, p):
            result = s if result is None else meet(result, s)
        assert result is not None
    elif which == "O_p'":
        result = trivial_subgroup(g)
        for n in normal_subgroups(g):
            if n.order % p != 0:
                result = join(result, n)
    elif which == "O^p":
        rows = g.element_rows()
        orders = g.orders()
        parts = []
        for i in range(rows.shape[0]):
            o = int(orders[i])
            pe = 1
            while o % p == 0:
                o //= p
                pe *= p
            # the p'-part of the element: x ** (p-part of its order)
            cur = identity_row(g.degree)
            base = rows[i]
            e = pe
            while e:
                if e & 1:
                    cur = mult_row(cur, base)
                base = mult_row(base, base)
                e >>= 1
            parts.append(cur)
        seeds = np.unique(np.stack(parts), axis=0)
        rows_out = _kernels.closure(seeds, seeds, g.caps.element)
        if rows_out is None:
            raise CapExceeded("element", g.caps.element, "O^p closure")
        result = subgroup_from_rows(g, rows_out, presorted=True)
    else:
        raise ValueError(f"unknown selector {which!r}")
    g._cache[memo_key] = result
    return result


def characteristic(g: PermGroup, which: str) -> Subgroup:
    """Selector in {center, frattini, fitting, layer, f_star, derived}."""
    from .group import centralizer

    memo_key = ("characteristic", which)
    if memo_key in g._cache:
        return g._cache[memo_key]
    if which == "center":
        result = centralizer(g, whole_subgroup(g))
    elif which == "derived":
        result = _derived(g)
    elif which == "frattini":
        result = whole_subgroup(g)
        for m in maximal_subgroups(g):
            result = meet(result, m)
    elif which == "fitting":
        result = trivial_subgroup(g)
        for p in _primes(g.order):
            result = join(result, o_subgroups(g, "O_p", p))
    elif which == "layer":
        result = trivial_subgroup(g)
        for q in _components(g):
            result = join(result, q)
    elif which == "f_star":
        result = join(characteristic(g, "fitting"), characteristic(g, "layer"))
    else:
        raise ValueError(f"unknown selector {which!r}")
    g._cache[memo_key] = result
    return result
