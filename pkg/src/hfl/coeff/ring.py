"""Truncated multivariate U-coefficient rings over F2.

The ring is R^delta = F2[U_1..U_p] / (U_i^delta).  Elements are stored as
sets of exponent tuples (F2 coefficients, so addition is symmetric
difference); any monomial with an exponent >= delta is identified with 0.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable


class RingError(ValueError):
    pass


class TruncatedRing:
    """F2[U_1..U_p] / (U_1^delta, ..., U_p^delta)."""

    __slots__ = ("num_vars", "delta", "_monomials", "_mono_index", "_mult")

    def __init__(self, num_vars: int, delta: int):
        if num_vars < 0:
            raise RingError("num_vars must be >= 0")
        if delta < 1:
            raise RingError("delta must be >= 1")
        self.num_vars = num_vars
        self.delta = delta
        self._monomials = None
        self._mono_index = None
        self._mult = None

    def __eq__(self, other):
        return (isinstance(other, TruncatedRing)
                and self.num_vars == other.num_vars
                and self.delta == other.delta)

    def __hash__(self):
        return hash(("TruncatedRing", self.num_vars, self.delta))

    def __repr__(self):
        return f"TruncatedRing(p={self.num_vars}, delta={self.delta})"

    # -- constructors -----------------------------------------------------

    def zero(self) -> "RingElement":
        return RingElement(self, ())

    def one(self) -> "RingElement":
        return RingElement(self, ((0,) * self.num_vars,))

    def U(self, i: int, k: int = 1) -> "RingElement":
        """The monomial U_i^k."""
        if not 0 <= i < self.num_vars:
            raise RingError(f"variable index {i} out of range")
        exps = [0] * self.num_vars
        exps[i] = k
        return self.monomial(tuple(exps))

    def monomial(self, exps: Iterable[int]) -> "RingElement":
        exps = tuple(exps)
        if len(exps) != self.num_vars:
            raise RingError("wrong exponent length")
        if any(e < 0 for e in exps):
            raise RingError(f"negative exponent in {exps}")
        if any(e >= self.delta for e in exps):
            return self.zero()
        return RingElement(self, (exps,))

    def element(self, monomials: Iterable[Iterable[int]]) -> "RingElement":
        acc = self.zero()
        for m in monomials:
            acc = acc + self.monomial(m)
        return acc

    def all_monomials(self):
        """All delta^p exponent tuples, in lexicographic order."""
        if self._monomials is None:
            self._monomials = tuple(
                product(range(self.delta), repeat=self.num_vars))
        return self._monomials

    def monomial_index(self):
        if self._mono_index is None:
            self._mono_index = {m: i for i, m in enumerate(self.all_monomials())}
        return self._mono_index

    def mult_table(self):
        """mt[i][j] = index of monomial_i * monomial_j, or -1 if truncated."""
        if self._mult is None:
            monos = self.all_monomials()
            index = self.monomial_index()
            delta = self.delta
            table = []
            for m1 in monos:
                row = []
                for m2 in monos:
                    prod = tuple(a + b for a, b in zip(m1, m2))
                    row.append(-1 if any(e >= delta for e in prod)
                               else index[prod])
                table.append(row)
            self._mult = table
        return self._mult

    def retruncate(self, delta: int) -> "TruncatedRing":
        return TruncatedRing(self.num_vars, delta)


class RingElement:
    """An element of a TruncatedRing (a set of monomials, coefficients in F2)."""

    __slots__ = ("ring", "monomials")

    def __init__(self, ring: TruncatedRing, monomials=()):
        self.ring = ring
        self.monomials = frozenset(monomials)

    def is_zero(self) -> bool:
        return not self.monomials

    def __bool__(self):
        return bool(self.monomials)

    def __eq__(self, other):
        return (isinstance(other, RingElement) and self.ring == other.ring
                and self.monomials == other.monomials)

    def __hash__(self):
        return hash((self.ring, self.monomials))

    def __add__(self, other: "RingElement") -> "RingElement":
        if self.ring != other.ring:
            raise RingError("ring mismatch in addition")
        return RingElement(self.ring, self.monomials ^ other.monomials)

    def __mul__(self, other: "RingElement") -> "RingElement":
        if self.ring != other.ring:
            raise RingError("ring mismatch in multiplication")
        delta = self.ring.delta
        acc = set()
        for m1 in self.monomials:
            for m2 in other.monomials:
                m = tuple(a + b for a, b in zip(m1, m2))
                if any(e >= delta for e in m):
                    continue
                if m in acc:
                    acc.discard(m)
                else:
                    acc.add(m)
        return RingElement(self.ring, acc)

    def degree_drops(self):
        """Set of total U-degrees 2*sum(e) over the monomials (U_i has degree -2)."""
        return {2 * sum(m) for m in self.monomials}

    def sorted_monomials(self):
        return sorted(self.monomials)

    def map_to(self, other_ring: TruncatedRing) -> "RingElement":
        """Image under the natural projection/inclusion to another truncation
        of the same polynomial ring (monomials violating the new bound drop)."""
        if other_ring.num_vars != self.ring.num_vars:
            raise RingError("variable count mismatch")
        keep = {m for m in self.monomials
                if all(e < other_ring.delta for e in m)}
        return RingElement(other_ring, keep)

    def kill_variable(self, i: int) -> "RingElement":
        """Set U_i = 0 (keep monomials with zero exponent at i)."""
        keep = {m for m in self.monomials if m[i] == 0}
        return RingElement(self.ring, keep)

    def __repr__(self):
        if not self.monomials:
            return "0"
        parts = []
        for m in self.sorted_monomials():
            if all(e == 0 for e in m):
                parts.append("1")
            else:
                parts.append("*".join(f"U{i + 1}^{e}" if e > 1 else f"U{i + 1}"
                                      for i, e in enumerate(m) if e))
        return " + ".join(parts)


def elem_mul(a: RingElement, b: RingElement) -> RingElement:
    """Product in the truncated ring (monomials with any exponent >= delta drop)."""
    return a * b


class RingMatrix:
    """Sparse matrix of RingElements, stored by column: cols[src][tgt] = entry.

    Rows and columns are indexed by arbitrary hashable keys.
    """

    __slots__ = ("ring", "cols")

    def __init__(self, ring: TruncatedRing, cols=None):
        self.ring = ring
        self.cols = {}
        if cols:
            for s, col in cols.items():
                for t, val in col.items():
                    self.add_entry(t, s, val)

    def add_entry(self, tgt, src, val: RingElement):
        if val.is_zero():
            return
        col = self.cols.setdefault(src, {})
        new = col.get(tgt, self.ring.zero()) + val
        if new.is_zero():
            col.pop(tgt, None)
            if not col:
                self.cols.pop(src, None)
        else:
            col[tgt] = new

    def entry(self, tgt, src) -> RingElement:
        return self.cols.get(src, {}).get(tgt, self.ring.zero())

    def column(self, src):
        return self.cols.get(src, {})

    def entries(self):
        for s, col in self.cols.items():
            for t, val in col.items():
                yield t, s, val

    def is_zero(self) -> bool:
        return not self.cols

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        out = RingMatrix(self.ring)
        for t, s, v in self.entries():
            out.add_entry(t, s, v)
        for t, s, v in other.entries():
            out.add_entry(t, s, v)
        return out

    def compose(self, other: "RingMatrix") -> "RingMatrix":
        """self o other (apply `other` first)."""
        out = RingMatrix(self.ring)
        for s, col in other.cols.items():
            for mid, v1 in col.items():
                col2 = self.cols.get(mid)
                if not col2:
                    continue
                for t, v2 in col2.items():
                    out.add_entry(t, s, v2 * v1)
        return out

    def scaled(self, r: RingElement) -> "RingMatrix":
        out = RingMatrix(self.ring)
        for t, s, v in self.entries():
            out.add_entry(t, s, r * v)
        return out

    @staticmethod
    def identity(ring: TruncatedRing, keys) -> "RingMatrix":
        out = RingMatrix(ring)
        one = ring.one()
        for k in keys:
            out.add_entry(k, k, one)
        return out

    def power(self, n: int, keys) -> "RingMatrix":
        """n-fold composition self^(o n); keys define the identity for n=0."""
        result = RingMatrix.identity(self.ring, keys)
        for _ in range(n):
            result = self.compose(result)
        return result
