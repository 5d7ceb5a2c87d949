"""Permutation algebra and cycle-notation parsing.

Points are 0-indexed in memory and 1-indexed in all text I/O. Products
compose left to right: (a * b)(x) = b(a(x)). This convention is fixed
project-wide and asserted in the test suite.
"""

from __future__ import annotations

import math
import re

import numpy as np

from ._kernels import DTYPE, inverse_row, mult_row


class ParseError(ValueError):
    """Raised for malformed cycle text or group files."""


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


class Permutation:
    """A bijection of {0..degree-1} stored as an image array."""

    __slots__ = ("images",)

    def __init__(self, images) -> None:
        arr = np.array(images, dtype=DTYPE)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("permutation needs a non-empty image sequence")
        n = arr.size
        if n > 65535:
            raise ValueError("degree above 65535 is not supported")
        if ((arr < 0) | (arr >= n)).any():
            raise ValueError("image point out of range")
        seen = np.zeros(n, dtype=bool)
        seen[arr] = True
        if not seen.all():
            raise ValueError("images do not form a bijection")
        arr.setflags(write=False)
        self.images = arr

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        if degree < 1:
            raise ValueError("degree must be positive")
        return cls._trusted(np.arange(degree, dtype=DTYPE))

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "Permutation":
        # internal fast path for rows already known to be bijections
        p = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=DTYPE)
        arr.setflags(write=False)
        p.images = arr
        return p

    @property
    def degree(self) -> int:
        return self.images.size

    @property
    def key(self) -> bytes:
        return self.images.astype(">u2").tobytes()

    def is_identity(self) -> bool:
        return bool((self.images == np.arange(self.degree, dtype=DTYPE)).all())

    def __call__(self, point: int) -> int:
        return int(self.images[point])

    def __mul__(self, other: "Permutation") -> "Permutation":
        if not isinstance(other, Permutation):
            return NotImplemented
        return compose(self, other)

    def inverse(self) -> "Permutation":
        return Permutation._trusted(inverse_row(self.images))

    def __pow__(self, exponent: int) -> "Permutation":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = np.arange(self.degree, dtype=DTYPE)
        base = self.images
        e = exponent
        while e:
            if e & 1:
                result = mult_row(result, base)
            base = mult_row(base, base)
            e >>= 1
        return Permutation._trusted(result)

    def cycles(self) -> list[list[int]]:
        """Disjoint cycles (0-indexed), fixed points omitted, each cycle
        starting at its minimal point, cycles sorted by that point."""
        images = self.images
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        for start in range(self.degree):
            if seen[start] or images[start] == start:
                seen[start] = True
                continue
            cyc = [start]
            seen[start] = True
            cur = int(images[start])
            while cur != start:
                cyc.append(cur)
                seen[cur] = True
                cur = int(images[cur])
            out.append(cyc)
        return out

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.degree == other.degree and bool(
            (self.images == other.images).all()
        )

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "Permutation") -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.key < other.key

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r}, degree={self.degree})"

    def __str__(self) -> str:
        return format_cycles(self)


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Apply a, then b."""
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")
    return Permutation._trusted(mult_row(a.images, b.images))


def inverse(a: Permutation) -> Permutation:
    return a.inverse()


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse a product of disjoint 1-indexed cycles, e.g. "(1 4)" or
    "(1 2)(3 4)"; "()" denotes the identity. Points absent from every
    cycle stay fixed."""
    if degree < 1:
        raise ParseError("degree must be positive")
    s = text.strip()
    if not s:
        raise ParseError("empty cycle text")
    images = np.arange(degree, dtype=DTYPE)
    used: set[int] = set()
    pos = 0
    matched = False
    for m in _CYCLE_RE.finditer(s):
        between = s[pos : m.start()]
        if between.strip():
            raise ParseError(f"unexpected text {between.strip()!r} in {text!r}")
        pos = m.end()
        matched = True
        body = m.group(1).strip()
        if not body:
            continue
        try:
            pts = [int(t) for t in body.split()]
        except ValueError:
            raise ParseError(f"bad cycle entry in {m.group(0)!r}") from None
        for q in pts:
            if q < 1:
                raise ParseError(f"point {q} is not positive")
            if q > degree:
                raise ParseError(f"point {q} exceeds degree {degree}")
            if q - 1 in used:
                raise ParseError(f"point {q} repeated in cycle product")
            used.add(q - 1)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            images[a - 1] = b - 1
    if not matched or s[pos:].strip():
        raise ParseError(f"malformed cycle text {text!r}")
    return Permutation._trusted(images)


def format_cycles(p: Permutation) -> str:
    """Inverse of parse_cycles: 1-indexed disjoint cycles, "()" for identity."""
    cycles = p.cycles()
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cycles)
