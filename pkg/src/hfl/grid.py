"""Toroidal grid diagrams with free markings and their generalized Floer
complexes via empty rectangles.

Coordinates: columns 0..n-1 left to right, rows 0..n-1 bottom to top.
Markings live in cells (col, row); generators are bijections column -> row
(points on the lattice).  A rectangle is determined by its lower-left and
upper-right corners on the torus; "empty" means no generator component
strictly inside.  Alexander values are stored as doubled integers so that
half-integer lattices stay exact; +/-infinity coordinates are the strings
handled by ExtendedValue.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .coeff.ring import TruncatedRing, RingMatrix
from .coeff.complexes import GradedComplex

INF = "inf"
NEG_INF = "-inf"


class GridError(ValueError):
    pass


def _cyc_range(a, b, n):
    """Cells from a (inclusive) to b (exclusive), cyclically; full range if a==b -> empty."""
    out = []
    i = a % n
    b = b % n
    while i != b:
        out.append(i)
        i = (i + 1) % n
    return out


def _strictly_inside(v, a, b, n):
    """v strictly inside the cyclic open interval (a, b)."""
    length = (b - a) % n
    off = (v - a) % n
    return 0 < off < length


class GridDiagram:
    """n x n toroidal grid: O a permutation col->row, X a partial injection."""

    def __init__(self, n: int, O, X):
        self.n = n
        self.O = tuple(O)
        self.X = tuple(X)
        self._validate_markings()
        self._trace()
        self._grade()

    # -- validation ----------------------------------------------------------

    def _validate_markings(self):
        n = self.n
        if len(self.O) != n or len(self.X) != n:
            raise GridError("marking lists must have length n")
        if sorted(self.O) != list(range(n)):
            raise GridError("each row and each column must contain exactly one O")
        xs = [x for x in self.X if x is not None]
        if any(not (0 <= x < n) for x in xs):
            raise GridError("X row index out of range")
        if len(set(xs)) != len(xs):
            raise GridError("two X markings share a row")
        x_rows = set(xs)
        # free-marking condition: if the row of an O has no X, neither has its column
        for c in range(n):
            row = self.O[c]
            row_has_x = row in x_rows
            col_has_x = self.X[c] is not None
            if not row_has_x and col_has_x:
                raise GridError(
                    f"column {c}: O in X-free row {row} but column has an X "
                    "(free-marking condition)")

    # -- link tracing ----------------------------------------------------------

    def _trace(self):
        n = self.n
        row_of_x = {}
        for c in range(n):
            if self.X[c] is not None:
                row_of_x[self.X[c]] = c  # row -> column of its X
        self.free_cols = tuple(c for c in range(n)
                               if self.O[c] not in row_of_x and self.X[c] is None)
        self.q = len(self.free_cols)
        linked = [c for c in range(n) if c not in self.free_cols]
        comp_of_col = {}
        components = []
        for start in linked:
            if start in comp_of_col:
                continue
            comp = []
            c = start
            while True:
                comp_of_col[c] = len(components)
                comp.append(c)
                row = self.O[c]           # horizontal arc O -> X in this row
                c_next = row_of_x.get(row)
                if c_next is None:
                    raise GridError("linked O in a row without X")
                # vertical arc X -> O in column c_next
                c = c_next
                if c == start:
                    break
            components.append(tuple(comp))
        self.components = tuple(components)
        self.ell = len(components)
        self.comp_of_col = comp_of_col
        self._linking_matrix()

    def _arcs(self):
        """(horizontal, vertical) arcs with component and direction data."""
        horiz = []  # (row, c_from(O), c_to(X), comp)
        vert = []   # (col, r_from(X), r_to(O), comp)
        col_of_x_row = {self.X[c]: c for c in range(self.n) if self.X[c] is not None}
        for c in range(self.n):
            row = self.O[c]
            cx = col_of_x_row.get(row)
            if cx is None:
                continue
            horiz.append((row, c, cx, self.comp_of_col[c]))
        for c in range(self.n):
            if self.X[c] is None:
                continue
            vert.append((c, self.X[c], self.O[c], self.comp_of_col[c]))
        return horiz, vert

    def _linking_matrix(self):
        ell = self.ell
        lk = [[0] * ell for _ in range(ell)]
        horiz, vert = self._arcs()
        for (row, c0, c1, comp_h) in horiz:
            lo, hi = min(c0, c1), max(c0, c1)
            dx = 1 if c1 > c0 else -1
            for (col, r0, r1, comp_v) in vert:
                if comp_v == comp_h:
                    continue
                if not (lo < col < hi):
                    continue
                rlo, rhi = min(r0, r1), max(r0, r1)
                if not (rlo < row < rhi):
                    continue
                dy = 1 if r1 > r0 else -1
                # vertical strand passes over; positive crossing when the
                # frame (over, under) is positively oriented
                sign = dx * dy
                lk[comp_h][comp_v] += sign
                lk[comp_v][comp_h] += sign
        self.linking = tuple(tuple(lk[i][j] // 2 for j in range(ell))
                             for i in range(ell))

    def linking_offsets2(self):
        """Doubled offsets lk(L_i, L - L_i) defining H(L)_i = offset/2 + Z."""
        return tuple(sum(self.linking[i][j] for j in range(self.ell) if j != i)
                     for i in range(self.ell))

    # -- gradings -----------------------------------------------------------

    def generators(self):
        return list(permutations(range(self.n)))

    def rectangles(self, x, y):
        """Rectangles in Rect(x, y): pairs of (col-interval, row-interval)."""
        diff = [c for c in range(self.n) if x[c] != y[c]]
        if len(diff) != 2:
            return []
        c1, c2 = diff
        if x[c1] != y[c2] or x[c2] != y[c1]:
            return []
        r1, r2 = x[c1], x[c2]
        return [((c1, c2), (r1, r2)), ((c2, c1), (r2, r1))]

    def rect_empty(self, x, rect):
        (c1, c2), (r1, r2) = rect
        for c in range(self.n):
            if _strictly_inside(c, c1, c2, self.n):
                if _strictly_inside(x[c], r1, r2, self.n):
                    return False
        return True

    def rect_cells(self, rect):
        (c1, c2), (r1, r2) = rect
        cols = _cyc_range(c1, c2, self.n)
        rows = _cyc_range(r1, r2, self.n)
        return cols, rows

    def rect_marking_counts(self, rect):
        """(O-count per component, X-count per component, free counts, total O)."""
        cols, rows = self.rect_cells(rect)
        rowset = set(rows)
        o_comp = [0] * self.ell
        x_comp = [0] * self.ell
        free = [0] * self.q
        free_index = {c: i for i, c in enumerate(self.free_cols)}
        total_o = 0
        for c in cols:
            if self.O[c] in rowset:
                total_o += 1
                if c in free_index:
                    free[free_index[c]] += 1
                else:
                    o_comp[self.comp_of_col[c]] += 1
            if self.X[c] is not None and self.X[c] in rowset:
                x_comp[self.comp_of_col[c]] += 1
        return o_comp, x_comp, free, total_o

    def empty_rectangles(self):
        """All (x, y, o_comp, x_comp, free, total_o) over empty rectangles."""
        out = []
        gens = self.generators()
        for x in gens:
            for c1 in range(self.n):
                for c2 in range(c1 + 1, self.n):
                    y = list(x)
                    y[c1], y[c2] = x[c2], x[c1]
                    y = tuple(y)
                    for rect in self.rectangles(x, y):
                        if self.rect_empty(x, rect):
                            o, xx, fr, tot = self.rect_marking_counts(rect)
                            out.append((x, y, o, xx, fr, tot))
        return out

    def _grade(self):
        """Relative Maslov/Alexander by BFS over empty-rectangle relations,
        normalized so A lands in lk(L_i, L-L_i)/2 + Z and base has M = 0."""
        gens = self.generators()
        base = gens[0]
        offsets2 = self.linking_offsets2()
        maslov = {base: 0}
        alex2 = {base: tuple(o % 2 for o in offsets2)}
        adj = {}
        # relations M(x) - M(y) = 1 - 2*sum O(r), A_i(x) - A_i(y) = X_i - O_i
        for (x, y, o, xx, fr, tot) in self.empty_rectangles():
            dm = 1 - 2 * tot
            da = tuple(2 * (xx[i] - o[i]) for i in range(self.ell))
            adj.setdefault(x, []).append((y, dm, da))
            adj.setdefault(y, []).append((x, -dm, tuple(-v for v in da)))
        frontier = [base]
        while frontier:
            nxt = []
            for x in frontier:
                for (y, dm, da) in adj.get(x, ()):
                    m_val = maslov[x] - dm
                    a_val = tuple(alex2[x][i] - da[i] for i in range(self.ell))
                    if y in maslov:
                        if maslov[y] != m_val or alex2[y] != a_val:
                            raise GridError("inconsistent grading relations")
                    else:
                        maslov[y] = m_val
                        alex2[y] = a_val
                        nxt.append(y)
            frontier = nxt
        if len(maslov) != len(gens):
            raise GridError("empty-rectangle relation graph is disconnected")
        self.maslov = maslov
        self.alexander2 = alex2

    # -- complexes -------------------------------------------------------------

    def num_vars(self):
        return self.ell + self.q

    def exponent(self, s2, a2x, a2y, x_count, o_count):
        """E^i_s for one component across one rectangle (doubled s and A)."""
        if s2 == INF:
            return o_count
        if s2 == NEG_INF:
            return x_count
        e2 = max(s2 - a2x, 0) - max(s2 - a2y, 0) + 2 * x_count
        if e2 % 2:
            raise GridError("odd doubled exponent: s outside the H(L) lattice")
        e = e2 // 2
        if e < 0:
            raise GridError("internal invariant: negative exponent")
        return e

    def build_complex(self, s2, delta: int, hat_variable=None) -> GradedComplex:
        """The generalized Floer complex A^-(G, s) over F2[U]/U^delta.

        s2: per-component doubled values, or 'inf'/'-inf' strings.
        hat_variable: optional variable index set to zero (hat flavor toggle).
        """
        if len(s2) != self.ell:
            raise GridError("s must have one coordinate per link component")
        ring = TruncatedRing(self.num_vars(), delta)
        gens = self.generators()
        diff = RingMatrix(ring)
        for (x, y, o, xx, fr, _tot) in self.empty_rectangles():
            exps = [self.exponent(s2[i], self.alexander2[x][i],
                                  self.alexander2[y][i], xx[i], o[i])
                    for i in range(self.ell)]
            exps += list(fr)
            mono = ring.monomial(tuple(exps))
            if hat_variable is not None:
                mono = mono.kill_variable(hat_variable)
            diff.add_entry(y, x, mono)
        grading = {}
        for x in gens:
            drop = 0
            for i in range(self.ell):
                if s2[i] == INF:
                    continue
                if s2[i] == NEG_INF:
                    drop += self.alexander2[x][i]
                else:
                    drop += max(self.alexander2[x][i] - s2[i], 0)
            grading[x] = self.maslov[x] - drop
        return GradedComplex(ring, gens, diff, grading)

    def inclusion_map(self, s2, oriented, delta: int) -> RingMatrix:
        """I^M_s: multiplication by U-powers (eq:Proj).

        oriented: dict component index -> +1/-1 for the components of M.
        """
        ring = TruncatedRing(self.num_vars(), delta)
        out = RingMatrix(ring)
        for x in self.generators():
            exps = [0] * self.num_vars()
            for i, sign in oriented.items():
                a2 = self.alexander2[x][i]
                if sign > 0:
                    if s2[i] == NEG_INF:
                        raise GridError("infinite exponent in inclusion map")
                    e2 = 0 if s2[i] == INF else max(a2 - s2[i], 0)
                else:
                    if s2[i] == INF:
                        raise GridError("infinite exponent in inclusion map")
                    e2 = 0 if s2[i] == NEG_INF else max(s2[i] - a2, 0)
                exps[i] = e2 // 2
            out.add_entry(x, x, ring.monomial(tuple(exps)))
        return out

    def projected_s2(self, s2, oriented):
        """p^M(s): replace coordinates by +/-infinity per orientation."""
        out = list(s2)
        for i, sign in oriented.items():
            out[i] = INF if sign > 0 else NEG_INF
        return tuple(out)

    # -- diagram operations ---------------------------------------------------

    def reduce(self, oriented) -> "MarkedGrid":
        """Reduction at an oriented sublink: delete X on positive components;
        delete O and relabel X -> O on negative ones."""
        O = {}
        X = {}
        for c in range(self.n):
            comp = self.comp_of_col.get(c)
            sign = oriented.get(comp) if comp is not None else None
            o_cell = (c, self.O[c])
            x_cell = (c, self.X[c]) if self.X[c] is not None else None
            if sign is None:
                O[c] = self.O[c]
                if x_cell is not None:
                    X[c] = self.X[c]
            elif sign > 0:
                O[c] = self.O[c]
            else:
                if x_cell is not None:
                    O[c] = self.X[c]
        return MarkedGrid(self.n, O, X)

    def quasi_destabilize(self, comps) -> "GridDiagram":
        """G^{L-M}: remove all rows and columns supporting the components."""
        comps = set(comps)
        dead_cols = set()
        dead_rows = set()
        for c in range(self.n):
            comp = self.comp_of_col.get(c)
            if comp in comps:
                dead_cols.add(c)
                dead_rows.add(self.O[c])
                if self.X[c] is not None:
                    dead_rows.add(self.X[c])
        keep_cols = [c for c in range(self.n) if c not in dead_cols]
        keep_rows = sorted(r for r in range(self.n) if r not in dead_rows)
        row_map = {r: i for i, r in enumerate(keep_rows)}
        O = []
        X = []
        for c in keep_cols:
            if self.O[c] in dead_rows or (self.X[c] is not None
                                          and self.X[c] in dead_rows):
                raise GridError("marking of a surviving component in a dead row")
            O.append(row_map[self.O[c]])
            X.append(row_map[self.X[c]] if self.X[c] is not None else None)
        return GridDiagram(len(keep_cols), O, X)

    def translate(self, dc: int, dr: int) -> "GridDiagram":
        """Cyclic rotation of the torus by (dc, dr)."""
        n = self.n
        O = [None] * n
        X = [None] * n
        for c in range(n):
            O[(c + dc) % n] = (self.O[c] + dr) % n
            if self.X[c] is not None:
                X[(c + dc) % n] = (self.X[c] + dr) % n
        return GridDiagram(n, O, X)

    def variable_of_row(self, row: int) -> int:
        """The U-variable of the O marking in the given row."""
        col = self.O.index(row)
        if col in self.free_cols:
            return self.ell + self.free_cols.index(col)
        return self.comp_of_col[col]

    def koszul(self, comps, delta: int) -> GradedComplex:
        """K(M) = tensor over O markings of M of (R --U_j - U_j'--> R),
        U_j' the variable of the row exactly under O_j's row."""
        ring = TruncatedRing(self.num_vars(), delta)
        factors = []
        for c in sorted(range(self.n), key=lambda c: (self.comp_of_col.get(c, -1), c)):
            comp = self.comp_of_col.get(c)
            if comp in comps:
                uj = self.variable_of_row(self.O[c])
                ujp = self.variable_of_row((self.O[c] - 1) % self.n)
                factors.append((uj, ujp))
        gens = [tuple(bits) for bits in
                _binary_tuples(len(factors))]
        diff = RingMatrix(ring)
        grading = {g: -sum(g) for g in gens}
        for g in gens:
            for i in range(len(factors)):
                if g[i] != 1:
                    continue
                tgt = g[:i] + (0,) + g[i + 1:]
                uj, ujp = factors[i]
                val = ring.U(uj) + ring.U(ujp)
                diff.add_entry(tgt, g, val)
        return GradedComplex(ring, gens, diff, grading)

    def format(self) -> str:
        lines = [f"n={self.n}", "O: " + " ".join(str(r) for r in self.O),
                 "X: " + " ".join("-" if r is None else str(r) for r in self.X)]
        return "\n".join(lines) + "\n"


def _binary_tuples(k):
    for mask in range(1 << k):
        yield tuple((mask >> i) & 1 for i in range(k))


@dataclass(frozen=True)
class MarkedGrid:
    """A torus grid with O/X cell markings but no grid-diagram invariants
    (the output of reduction; represents a diagram after basepoint deletion)."""
    n: int
    O: dict
    X: dict

    def format(self) -> str:
        rows = []
        for r in range(self.n - 1, -1, -1):
            cells = []
            for c in range(self.n):
                if self.O.get(c) == r:
                    cells.append("O")
                elif self.X.get(c) == r:
                    cells.append("X")
                else:
                    cells.append(".")
            rows.append(" ".join(cells))
        return "\n".join(rows) + "\n"


def parse_grid(text: str) -> GridDiagram:
    """Grid file format: line 1 `n=<int>`, line 2 `O: r0 ... r_{n-1}`,
    line 3 `X: r0|- ...`; comments start with #."""
    lines = [ln.strip() for ln in text.splitlines()
             if ln.strip() and not ln.strip().startswith("#")]
    if len(lines) != 3:
        raise GridError("expected three non-comment lines (n=, O:, X:)")
    if not lines[0].startswith("n="):
        raise GridError("first line must be n=<int>")
    try:
        n = int(lines[0][2:])
    except ValueError as exc:
        raise GridError("malformed n= line") from exc
    if not lines[1].startswith("O:") or not lines[2].startswith("X:"):
        raise GridError("expected O: and X: lines")
    try:
        O = [int(t) for t in lines[1][2:].split()]
        X = [None if t == "-" else int(t) for t in lines[2][2:].split()]
    except ValueError as exc:
        raise GridError("malformed marking entry") from exc
    return GridDiagram(n, O, X)


def parse_s2(text: str, ell: int):
    """Parse an s-vector 'a,b,...' with half-integers as k/2 and inf/-inf."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != ell:
        raise GridError(f"s must have {ell} coordinates")
    out = []
    for p in parts:
        if p in ("inf", "+inf"):
            out.append(INF)
        elif p == "-inf":
            out.append(NEG_INF)
        elif "/" in p:
            num, den = p.split("/")
            if int(den) != 2:
                raise GridError("half-integers must use denominator 2")
            out.append(int(num))
        else:
            out.append(2 * int(p))
    return tuple(out)


def format_s2_coord(v) -> str:
    if v in (INF, NEG_INF):
        return v
    if v % 2 == 0:
        return str(v // 2)
    return f"{v}/2"
