"""Permutation groups with stabilizer chains, subgroup handles, and the
primitive queries everything else builds on: membership, element
enumeration, permutability, normal closure, core, normalizer, centralizer,
subnormality, join and meet.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import (
    DTYPE,
    canonical_bytes,
    conjugate_row,
    conjugate_rows,
    element_orders,
    identity_row,
    inverse_row,
    inverse_rows,
    mult_row,
    row_bytes,
    sort_rows,
)
from .perm import Permutation


@dataclass(frozen=True)
class Caps:
    """Size limits: element enumeration and full-lattice enumeration."""

    element: int = 20000
    lattice: int = 400


def _caps_from_env() -> Caps:
    raw = os.environ.get("PERMEMBED_CAPS", "")
    elem, lat = 20000, 400
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, value = part.partition("=")
        if name.strip() in ("elem", "element"):
            elem = int(value)
        elif name.strip() in ("lat", "lattice"):
            lat = int(value)
    return Caps(element=elem, lattice=lat)


DEFAULT_CAPS = _caps_from_env()


class CapExceeded(RuntimeError):
    """A computation would exceed the configured element or lattice cap."""

    def __init__(self, kind: str, cap: int, detail: str = "") -> None:
        self.kind = kind
        self.cap = cap
        msg = f"{kind} cap {cap} exceeded"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


# ---------------------------------------------------------------------------
# stabilizer chain


class _StabChain:
    """Deterministic Schreier-Sims chain.

    The first base point is the smallest point moved by any generator;
    later base points are the smallest point moved by the residue that
    created the level. Orbits are grown breadth-first over sorted
    frontiers, so the whole structure is reproducible byte for byte.
    """

    def __init__(self, degree: int, gen_rows: np.ndarray) -> None:
        self.degree = degree
        self.base: list[int] = []
        self.level_gens: list[list[np.ndarray]] = []
        self.transversal: list[dict[int, np.ndarray]] = []
        self._tr_inv: list[dict[int, np.ndarray]] = []
        strong = [np.ascontiguousarray(g, dtype=DTYPE) for g in gen_rows]
        ident = identity_row(degree)
        strong = [g for g in strong if not (g == ident).all()]
        for g in strong:
            if all(g[b] == b for b in self.base):
                self._new_level(int(np.nonzero(g != ident)[0][0]))
        for i in range(len(self.base)):
            self.level_gens[i] = [
                g for g in strong if all(g[b] == b for b in self.base[:i])
            ]
            self._update_orbit(i)
        self._schreier_sims()

    def _new_level(self, point: int) -> None:
        self.base.append(point)
        self.level_gens.append([])
        ident = identity_row(self.degree)
        self.transversal.append({point: ident})
        self._tr_inv.append({point: ident})

    def _update_orbit(self, i: int) -> None:
        b = self.base[i]
        ident = identity_row(self.degree)
        tr = {b: ident}
        frontier = [b]
        gens = self.level_gens[i]
        while frontier:
            nxt = []
            for beta in frontier:
                u = tr[beta]
                for s in gens:
                    gamma = int(s[beta])
                    if gamma not in tr:
                        tr[gamma] = mult_row(u, s)
                        nxt.append(gamma)
            frontier = sorted(nxt)
        self.transversal[i] = tr
        self._tr_inv[i] = {pt: inverse_row(u) for pt, u in tr.items()}

    def _sift(self, row: np.ndarray, start: int = 0):
        """Returns (level, residue); residue fixes base[:level]."""
        h = row
        for i in range(start, len(self.base)):
            beta = int(h[self.base[i]])
            if beta not in self.transversal[i]:
                return i, h
            h = mult_row(h, self._tr_inv[i][beta])
        return len(self.base), h

    def _schreier_sims(self) -> None:
        ident = identity_row(self.degree)
        i = len(self.base) - 1
        while i >= 0:
            restart = False
            for beta in sorted(self.transversal[i]):
                u = self.transversal[i][beta]
                for s in self.level_gens[i]:
                    gamma = int(s[beta])
                    sg = mult_row(
                        mult_row(u, s), self._tr_inv[i][gamma]
                    )
                    if (sg == ident).all():
                        continue
                    j, h = self._sift(sg, i + 1)
                    if (h == ident).all():
                        continue
                    if j == len(self.base):
                        self._new_level(int(np.nonzero(h != ident)[0][0]))
                    for k in range(i + 1, j + 1):
                        self.level_gens[k].append(h)
                        self._update_orbit(k)
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1

    @property
    def order(self) -> int:
        n = 1
        for tr in self.transversal:
            n *= len(tr)
        return n

    def contains(self, row: np.ndarray) -> bool:
        level, h = self._sift(row)
        return level == len(self.base) and bool(
            (h == identity_row(self.degree)).all()
        )


# ---------------------------------------------------------------------------
# group handles


class PermGroup:
    """A permutation group given by generators.

    Handles are immutable after construction; caches (chain, element
    matrix, memo tables) are filled once and only read afterwards.
    """

    def __init__(
        self,
        degree: int,
        generators,
        caps: Caps | None = None,
        _rows: np.ndarray | None = None,
    ) -> None:
        if degree < 1:
            raise ValueError("degree must be positive")
        if degree > 65535:
            raise ValueError("degree above 65535 is not supported")
        gens: list[Permutation] = []
        seen: set[bytes] = set()
        for g in generators:
            if not isinstance(g, Permutation):
                raise TypeError("generators must be Permutation objects")
            if g.degree != degree:
                raise ValueError(
                    f"generator degree {g.degree} does not match group degree {degree}"
                )
            if g.is_identity() or g.key in seen:
                continue
            seen.add(g.key)
            gens.append(g)
        self.degree = degree
        self.generators: tuple[Permutation, ...] = tuple(gens)
        self.caps = caps if caps is not None else DEFAULT_CAPS
        if gens:
            self._gen_rows = np.ascontiguousarray(
                np.stack([g.images for g in gens]), dtype=DTYPE
            )
        else:
            self._gen_rows = np.empty((0, degree), dtype=DTYPE)
        self._chain: _StabChain | None = None
        self._rows = None if _rows is None else np.ascontiguousarray(_rows, DTYPE)
        self._byteset: frozenset[bytes] | None = None
        self._key: bytes | None = None
        self._elements: tuple[Permutation, ...] | None = None
        self._inv_rows: np.ndarray | None = None
        self._orders: np.ndarray | None = None
        self._cache: dict = {}

    # -- structure ---------------------------------------------------------

    @property
    def gen_rows(self) -> np.ndarray:
        return self._gen_rows

    @property
    def chain(self) -> _StabChain:
        if self._chain is None:
            self._chain = _StabChain(self.degree, self._gen_rows)
        return self._chain

    @property
    def order(self) -> int:
        if self._rows is not None:
            return self._rows.shape[0]
        return self.chain.order

    def member(self, x: Permutation) -> bool:
        """Membership via sifting through the stabilizer chain."""
        if x.degree != self.degree:
            raise ValueError(f"degree mismatch: {x.degree} vs {self.degree}")
        return self.chain.contains(x.images)

    def element_rows(self) -> np.ndarray:
        if self._rows is None:
            if self._chain is not None and self._chain.order > self.caps.element:
                raise CapExceeded(
                    "element", self.caps.element, f"group order {self._chain.order}"
                )
            seeds = identity_row(self.degree)[None, :]
            rows = _kernels.closure(seeds, self._gen_rows, self.caps.element)
            if rows is None:
                raise CapExceeded("element", self.caps.element, "element enumeration")
            self._rows = rows
        return self._rows

    def elements(self) -> tuple[Permutation, ...]:
        """All elements in canonical (lexicographic) order."""
        if self._elements is None:
            self._elements = tuple(
                Permutation._trusted(r) for r in self.element_rows()
            )
        return self._elements

    @property
    def byteset(self) -> frozenset[bytes]:
        if self._byteset is None:
            self._byteset = frozenset(row_bytes(self.element_rows()))
        return self._byteset

    @property
    def key(self) -> bytes:
        """Canonical key: the sorted element matrix when enumerable, else a
        normalized generator form."""
        if self._key is None:
            try:
                self._key = canonical_bytes(self.element_rows())
            except CapExceeded:
                self._key = b"gens|" + b"|".join(
                    sorted(g.key for g in self.generators)
                )
        return self._key

    def inv_rows(self) -> np.ndarray:
        if self._inv_rows is None:
            self._inv_rows = inverse_rows(self.element_rows())
        return self._inv_rows

    def orders(self) -> np.ndarray:
        """Element orders aligned with element_rows()."""
        if self._orders is None:
            self._orders = element_orders(self.element_rows())
        return self._orders

    def __repr__(self) -> str:
        known = self._rows is not None or self._chain is not None
        size = f"order {self.order}" if known else f"{len(self.generators)} generators"
        return f"<{type(self).__name__} {size} on {self.degree} points>"


class Subgroup(PermGroup):
    """A subgroup of a fixed ambient group."""

    def __init__(
        self,
        ambient: PermGroup,
        generators,
        _rows: np.ndarray | None = None,
        _validate: bool = True,
    ) -> None:
        super().__init__(ambient.degree, generators, caps=ambient.caps, _rows=_rows)
        self.ambient = ambient
        if _validate:
            for g in self.generators:
                if not ambient.member(g):
                    raise ValueError(
                        f"generator {g} is not a member of the ambient group"
                    )

    @property
    def canonical_key(self) -> bytes:
        return self.key

    def __repr__(self) -> str:
        return f"<Subgroup order {self.order} of degree-{self.degree} group>"


def generate(degree: int, gens, caps: Caps | None = None) -> PermGroup:
    """Build a group handle with an eagerly constructed stabilizer chain."""
    g = PermGroup(degree, gens, caps=caps)
    g.chain  # noqa: B018 - force construction so order is exact up front
    return g


def subgroup_of(ambient: PermGroup, gens) -> Subgroup:
    """Public, validated subgroup constructor."""
    return Subgroup(ambient, gens)


def _reduce_generators(rows: np.ndarray) -> list[Permutation]:
    """A short generating list for the subgroup whose sorted element matrix
    is `rows`, chosen greedily in canonical order."""
    total = rows.shape[0]
    if total == 1:
        return []
    degree = rows.shape[1]
    known = {row_bytes(identity_row(degree)[None, :])[0]}
    cur = identity_row(degree)[None, :]
    picked: list[np.ndarray] = []
    for r, rb in zip(rows, row_bytes(rows)):
        if rb in known:
            continue
        picked.append(np.ascontiguousarray(r))
        cur = _kernels.closure(cur, np.stack(picked), total)
        assert cur is not None
        known = set(row_bytes(cur))
        if cur.shape[0] == total:
            break
    return [Permutation._trusted(g) for g in picked]


def subgroup_from_rows(
    ambient: PermGroup, rows: np.ndarray, gens=None, presorted: bool = False
) -> Subgroup:
    """Trusted constructor from a full element matrix."""
    rows = rows if presorted else sort_rows(rows)
    if gens is None:
        gens = _reduce_generators(rows)
    sub = Subgroup(ambient, gens, _rows=rows, _validate=False)
    return sub


def trivial_subgroup(ambient: PermGroup) -> Subgroup:
    return subgroup_from_rows(
        ambient, identity_row(ambient.degree)[None, :], gens=[], presorted=True
    )


def whole_subgroup(ambient: PermGroup) -> Subgroup:
    """The ambient group as a subgroup of itself."""
    key = ("whole",)
    if key not in ambient._cache:
        ambient._cache[key] = subgroup_from_rows(
            ambient, ambient.element_rows(), gens=list(ambient.generators),
            presorted=True,
        )
    return ambient._cache[key]


def reroot(ambient: PermGroup, s: PermGroup) -> Subgroup:
    """View an arbitrary handle (with elements inside `ambient`) as a
    subgroup of `ambient`, sharing its element matrix."""
    if isinstance(s, Subgroup) and s.ambient is ambient:
        return s
    return Subgroup(
        ambient, list(s.generators), _rows=s.element_rows(), _validate=False
    )


def conjugate_subgroup(s: Subgroup, g: np.ndarray, ginv: np.ndarray) -> Subgroup:
    rows = sort_rows(conjugate_rows(s.element_rows(), g, ginv))
    gens = [
        Permutation._trusted(conjugate_row(p.images, g, ginv)) for p in s.generators
    ]
    return Subgroup(s.ambient, gens, _rows=rows, _validate=False)


# ---------------------------------------------------------------------------
# primitive subgroup queries


def _check_same_ambient(a: Subgroup, b: Subgroup) -> PermGroup:
    if not isinstance(a, Subgroup) or not isinstance(b, Subgroup):
        raise TypeError("expected Subgroup handles")
    if a.ambient is not b.ambient:
        raise ValueError("subgroups have different ambient groups")
    return a.ambient


def intersection_size(a: PermGroup, b: PermGroup) -> int:
    small, big = (a, b) if a.order <= b.order else (b, a)
    bs = big.byteset
    return sum(1 for k in row_bytes(small.element_rows()) if k in bs)


def _permutable(g: PermGroup, a: PermGroup, b: PermGroup) -> bool:
    """AB == BA as sets, decided as |<A,B>| == |A||B|/|A n B|."""
    if a.key == b.key:
        return True
    inter = intersection_size(a, b)
    size = a.order * b.order // inter
    if size > g.caps.element:
        raise CapExceeded("product", g.caps.element, f"product size {size}")
    if size == a.order or size == b.order:
        return True  # one factor contains the other
    seeds = np.concatenate([a.element_rows(), b.element_rows()])
    gens = np.concatenate([a.gen_rows, b.gen_rows])
    joined = _kernels.closure(seeds, gens, size)
    return joined is not None and joined.shape[0] == size


def product_is_permutable(a: Subgroup, b: Subgroup) -> bool:
    """True iff the set product AB equals BA, i.e. AB is a subgroup."""
    g = _check_same_ambient(a, b)
    return _permutable(g, a, b)


def product_rows(a: PermGroup, b: PermGroup, cap: int) -> np.ndarray:
    """The set product AB as sorted rows (used by oracles and reports)."""
    inter = intersection_size(a, b)
    size = a.order * b.order // inter
    if size > cap:
        raise CapExceeded("product", cap, f"product size {size}")
    rows = _kernels.product_set(a.element_rows(), b.element_rows(), size)
    assert rows is not None
    return rows


def join(a: Subgroup, b: Subgroup) -> Subgroup:
    """Subgroup generated by A and B."""
    g = _check_same_ambient(a, b)
    if a.order <= b.order:
        if a.byteset <= b.byteset:
            return b
    elif b.byteset <= a.byteset:
        return a
    cap = g.caps.element
    try:
        cap = min(cap, g.order)
    except CapExceeded:
        pass
    seeds = np.concatenate([a.element_rows(), b.element_rows()])
    gens = np.concatenate([a.gen_rows, b.gen_rows])
    rows = _kernels.closure(seeds, gens, cap)
    if rows is None:
        raise CapExceeded("element", cap, "join")
    return subgroup_from_rows(g, rows, presorted=True)


def meet(a: Subgroup, b: Subgroup) -> Subgroup:
    """Intersection of A and B."""
    g = _check_same_ambient(a, b)
    small, big = (a, b) if a.order <= b.order else (b, a)
    bs = big.byteset
    keep = [i for i, k in enumerate(row_bytes(small.element_rows())) if k in bs]
    rows = np.ascontiguousarray(small.element_rows()[np.array(keep)])
    return subgroup_from_rows(g, rows, presorted=True)


def normal_closure(g: PermGroup, h: PermGroup) -> Subgroup:
    """Smallest normal subgroup of g containing h."""
    ambient = h.ambient if isinstance(h, Subgroup) else g
    conj_pairs = []
    for grow in g.gen_rows:
        conj_pairs.append((grow, inverse_row(grow)))
        conj_pairs.append((inverse_row(grow), grow))
    gen_list = [np.ascontiguousarray(r) for r in h.gen_rows]
    rows = h.element_rows()
    known = set(row_bytes(rows))
    queue = list(gen_list)
    qi = 0
    while qi < len(queue):
        s = queue[qi]
        qi += 1
        for grow, ginv in conj_pairs:
            c = conjugate_row(s, grow, ginv)
            cb = row_bytes(c[None, :])[0]
            if cb not in known:
                gen_list.append(c)
                queue.append(c)
                seeds = np.concatenate([rows, c[None, :]])
                rows = _kernels.closure(seeds, np.stack(gen_list), g.caps.element)
                if rows is None:
                    raise CapExceeded("element", g.caps.element, "normal closure")
                known = set(row_bytes(rows))
    return subgroup_from_rows(ambient, rows, presorted=True)


def conjugacy_classes(g: PermGroup) -> list[np.ndarray]:
    """Conjugacy classes as row matrices, in canonical order of their
    minimal element; cached on the handle."""
    if "classes" in g._cache:
        return g._cache["classes"]
    rows = g.element_rows()
    index = {k: i for i, k in enumerate(row_bytes(rows))}
    assigned = np.zeros(rows.shape[0], dtype=bool)
    pairs = [(grow, inverse_row(grow)) for grow in g.gen_rows]
    classes = []
    for i in range(rows.shape[0]):
        if assigned[i]:
            continue
        members = [i]
        assigned[i] = True
        qi = 0
        while qi < len(members):
            r = rows[members[qi]]
            qi += 1
            for grow, ginv in pairs:
                j = index[row_bytes(conjugate_row(r, grow, ginv)[None, :])[0]]
                if not assigned[j]:
                    assigned[j] = True
                    members.append(j)
        classes.append(np.ascontiguousarray(rows[np.array(sorted(members))]))
    g._cache["classes"] = classes
    return classes


def core(g: PermGroup, h: Subgroup) -> Subgroup:
    """Largest normal subgroup of g contained in h: the union of the
    conjugacy classes of g lying wholly inside h."""
    memo_key = ("core", h.key)
    if memo_key in g._cache:
        return g._cache[memo_key]
    hset = h.byteset
    keep = []
    for cls in conjugacy_classes(g):
        ks = row_bytes(cls)
        if ks[0] in hset and all(k in hset for k in ks):
            keep.append(cls)
    rows = sort_rows(np.concatenate(keep))
    result = subgroup_from_rows(g, rows, presorted=True)
    g._cache[memo_key] = result
    return result


def normalizer(g: PermGroup, h: Subgroup) -> Subgroup:
    """Exact normalizer by scanning the elements of g."""
    memo_key = ("normalizer", h.key)
    if memo_key in g._cache:
        return g._cache[memo_key]
    rows = g.element_rows()
    inv = g.inv_rows()
    mask = np.ones(rows.shape[0], dtype=bool)
    hset = h.byteset
    for s in h.gen_rows:
        conj = np.take_along_axis(rows, s[inv], axis=1)
        ok = np.fromiter(
            (k in hset for k in row_bytes(conj)), dtype=bool, count=rows.shape[0]
        )
        mask &= ok
        if not mask.any():
            break
    result = subgroup_from_rows(g, np.ascontiguousarray(rows[mask]), presorted=True)
    g._cache[memo_key] = result
    return result


def centralizer(g: PermGroup, h: Subgroup) -> Subgroup:
    memo_key = ("centralizer", h.key)
    if memo_key in g._cache:
        return g._cache[memo_key]
    rows = g.element_rows()
    mask = np.ones(rows.shape[0], dtype=bool)
    for s in h.gen_rows:
        mask &= (s[rows] == rows[:, s]).all(axis=1)
    result = subgroup_from_rows(g, np.ascontiguousarray(rows[mask]), presorted=True)
    g._cache[memo_key] = result
    return result


def is_subnormal(g: PermGroup, h: Subgroup) -> bool:
    """True iff the chain K0 = g, K_{i+1} = <h^{K_i}> descends to h."""
    target = h.key
    if target == whole_subgroup(g).key:
        return True
    current: PermGroup = g
    while True:
        nxt = normal_closure(current, h)
        if nxt.key == target:
            return True
        if nxt.order == current.order:
            return False
        current = nxt
