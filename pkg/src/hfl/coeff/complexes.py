"""Finite free chain complexes over truncated U-rings, flattening to F2,
homology ranks, and induced maps on homology."""

from __future__ import annotations

from . import gf2
from .ring import RingMatrix, TruncatedRing


class ComplexError(ValueError):
    pass


class GradedComplex:
    """A finite free complex over a TruncatedRing.

    gens: ordered list of hashable generator keys.
    grading: dict key -> int (Maslov; U_i has degree -2), or None for ungraded.
    diff: RingMatrix with diff.column(src)[tgt] the coefficient of tgt in d(src).
    """

    def __init__(self, ring: TruncatedRing, gens, diff: RingMatrix,
                 grading=None, check=False, grading_modulus=0):
        self.ring = ring
        self.gens = list(gens)
        self.diff = diff
        self.grading = dict(grading) if grading is not None else None
        self.grading_modulus = grading_modulus
        if check:
            self.check_d_squared()
            if self.grading is not None:
                self.check_graded()

    def check_d_squared(self):
        sq = self.diff.compose(self.diff)
        for t, s, v in sq.entries():
            if not v.is_zero():
                raise ComplexError(
                    f"d^2 != 0: generator pair ({s!r} -> {t!r}) has d^2 entry {v}")

    def check_graded(self):
        # each U_i has degree -2, so an entry U^m: s -> t satisfies
        # grading(t) - 2|m| = grading(s) - 1  (mod grading_modulus)
        m = self.grading_modulus
        for t, s, v in self.diff.entries():
            drops = {self.grading[s] - self.grading[t] + d
                     for d in v.degree_drops()}
            if m:
                drops = {d % m for d in drops}
            if drops != ({1 % m} if m else {1}):
                raise ComplexError(
                    f"differential entry {s!r} -> {t!r} does not drop grading "
                    f"by 1 (drops {sorted(drops)})")

    def flatten(self) -> "FlatComplex":
        return flatten(self)

    def retruncate(self, delta: int) -> "GradedComplex":
        """The same complex over the ring with truncation order delta."""
        ring2 = self.ring.retruncate(delta)
        diff2 = RingMatrix(ring2)
        for t, s, v in self.diff.entries():
            diff2.add_entry(t, s, v.map_to(ring2))
        return GradedComplex(ring2, self.gens, diff2, self.grading,
                             grading_modulus=self.grading_modulus)


class FlatComplex:
    """F2 flattening of a GradedComplex: basis = generator x monomial."""

    def __init__(self, basis, index, columns, grading=None, grading_modulus=0):
        self.basis = basis          # list of (gen, monomial)
        self.index = index          # (gen, monomial) -> int
        self.columns = columns      # list of sorted row-index lists
        self.grading = grading      # list of ints, or None
        self.grading_modulus = grading_modulus

    @property
    def dim(self):
        return len(self.basis)

    def boundary_rank(self) -> int:
        return gf2.rank(self.columns, self.dim)

    def total_homology_rank(self) -> int:
        return self.dim - 2 * self.boundary_rank()

    def homology_ranks(self):
        """Map grading -> F2 rank of homology (key None if ungraded).

        With a cyclic grading (grading_modulus > 0) indices live in Z/m and
        the boundary drops the class by 1 mod m.
        """
        if self.grading is None:
            return {None: self.total_homology_rank()}
        m = self.grading_modulus
        grading = [g % m for g in self.grading] if m else self.grading
        levels = sorted(set(grading))
        rank_at = {}
        for k in levels:
            srcs = [i for i in range(self.dim) if grading[i] == k]
            cols = [self.columns[i] for i in srcs]
            rank_at[k] = gf2.rank(cols, self.dim)
        out = {}
        for k in levels:
            dim_k = sum(1 for g in grading if g == k)
            up = (k + 1) % m if m else k + 1
            hk = dim_k - rank_at.get(k, 0) - rank_at.get(up, 0)
            if hk:
                out[k] = hk
        return out


def flatten(c: GradedComplex) -> FlatComplex:
    ring = c.ring
    monos = ring.all_monomials()
    nm = len(monos)
    mono_index = ring.monomial_index()
    mt = ring.mult_table()
    gen_pos = {g: i for i, g in enumerate(c.gens)}
    basis = [(g, m) for g in c.gens for m in monos]
    index = {bm: i for i, bm in enumerate(basis)}
    columns = [set() for _ in range(len(basis))]
    grading = None
    if c.grading is not None:
        grading = [c.grading[g] - 2 * sum(m) for g in c.gens for m in monos]
    for tgt, src, val in c.diff.entries():
        sbase = gen_pos[src] * nm
        tbase = gen_pos[tgt] * nm
        for vm in val.monomials:
            vrow = mt[mono_index[vm]]
            for j in range(nm):
                k = vrow[j]
                if k >= 0:
                    columns[sbase + j].symmetric_difference_update(
                        (tbase + k,))
    columns = [sorted(col) for col in columns]
    return FlatComplex(basis, index, columns, grading, c.grading_modulus)


def homology_ranks(c: GradedComplex):
    """F2 homology ranks of the flattened complex, keyed by grading."""
    c.check_d_squared()
    return flatten(c).homology_ranks()


def total_homology_rank(c: GradedComplex) -> int:
    c.check_d_squared()
    return flatten(c).total_homology_rank()


def morse_reduce(c: GradedComplex) -> GradedComplex:
    """Cancel differential entries whose coefficient is exactly 1.

    Each cancellation of a pair (s -> t) removes both generators and adds
    the composite correction d'(s') += d(s')_t * d(s)_{t'}; the result is
    chain homotopy equivalent over the ring (1 is a unit), so homology and
    any truncation of it are unchanged.
    """
    one = c.ring.one()
    cols = {}
    rows = {}
    for t, s, v in c.diff.entries():
        cols.setdefault(s, {})[t] = v
        rows.setdefault(t, {})[s] = v

    def drop(t, s):
        col = cols.get(s)
        if col is not None:
            col.pop(t, None)
            if not col:
                cols.pop(s, None)
        row = rows.get(t)
        if row is not None:
            row.pop(s, None)
            if not row:
                rows.pop(t, None)

    def put(t, s, v):
        col = cols.setdefault(s, {})
        new = col.get(t, c.ring.zero()) + v
        if new.is_zero():
            drop(t, s)
        else:
            col[t] = new
            rows.setdefault(t, {})[s] = new

    alive = set(c.gens)
    queue = [(s, t) for s, col in cols.items() for t, v in col.items()
             if v == one]
    while queue:
        s, t = queue.pop()
        if s not in alive or t not in alive:
            continue
        v = cols.get(s, {}).get(t)
        if v != one:
            continue
        alive.discard(s)
        alive.discard(t)
        col_s = [(t2, v2) for t2, v2 in cols.get(s, {}).items()
                 if t2 != t and t2 in alive]
        row_t = [(s2, v2) for s2, v2 in rows.get(t, {}).items()
                 if s2 != s and s2 in alive]
        for t2, _ in list(cols.get(s, {}).items()):
            drop(t2, s)
        for s2, _ in list(rows.get(t, {}).items()):
            drop(t, s2)
        for t2, _ in list(cols.get(t, {}).items()):
            drop(t2, t)
        for s2, _ in list(rows.get(s, {}).items()):
            drop(s, s2)
        for s2, c2 in row_t:
            for t2, d2 in col_s:
                put(t2, s2, c2 * d2)
                if cols.get(s2, {}).get(t2) == one:
                    queue.append((s2, t2))

    gens = [g for g in c.gens if g in alive]
    diff = RingMatrix(c.ring)
    for s, col in cols.items():
        if s not in alive:
            continue
        for t, v in col.items():
            if t in alive:
                diff.add_entry(t, s, v)
    grading = None
    if c.grading is not None:
        grading = {g: c.grading[g] for g in gens}
    return GradedComplex(c.ring, gens, diff, grading,
                         grading_modulus=c.grading_modulus)


def flatten_map(f: RingMatrix, src: FlatComplex, dst: FlatComplex, delta: int):
    """Columns (over src.basis) of the F2 flattening of a ring-linear map.

    Source/target monomials are truncated at the target's delta (a map into
    a lower truncation simply drops overweight monomials).
    """
    cols = [set() for _ in range(len(src.basis))]
    if not src.basis:
        return []
    sample_gen, _ = src.basis[0]
    p = len(src.basis[0][1])
    nm_src = len({m for g, m in src.basis if g == sample_gen})
    src_pos = {}
    for i, (g, m) in enumerate(src.basis):
        src_pos.setdefault(g, i)
    src_monos = [m for g, m in src.basis[:nm_src]]
    dst_index = dst.index
    for s, col in f.cols.items():
        if s not in src_pos:
            continue
        sbase = src_pos[s]
        for tgt, val in col.items():
            for vm in val.monomials:
                for j, m in enumerate(src_monos):
                    prod = tuple(a + b for a, b in zip(m, vm))
                    key = (tgt, prod)
                    if key in dst_index:
                        cols[sbase + j].symmetric_difference_update(
                            (dst_index[key],))
    return [sorted(c) for c in cols]


def homology_map_rank(f: RingMatrix, a: GradedComplex, b: GradedComplex) -> int:
    """Rank of the map induced by the chain map f on F2 homology."""
    fa = flatten(a)
    fb = flatten(b)
    f_cols = flatten_map(f, fa, fb, b.ring.delta)
    return gf2.rank_of_induced_map(f_cols, fa.columns, fb.columns,
                                   fa.dim, fb.dim)


def is_quasi_iso(f: RingMatrix, a: GradedComplex, b: GradedComplex) -> bool:
    """Chain map inducing an isomorphism on (finite, flattened) F2 homology."""
    ha = flatten(a)
    hb = flatten(b)
    ra = ha.dim - 2 * gf2.rank(ha.columns, ha.dim)
    rb = hb.dim - 2 * gf2.rank(hb.columns, hb.dim)
    if ra != rb:
        return False
    return homology_map_rank(f, a, b) == ra
