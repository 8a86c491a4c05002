"""Framings, the affine lattice H(L), Spin^c classes, d(u), and nu.

All lattice coordinates are doubled integers (s2 = 2s), so half-integer
values stay exact.  H(L, Lambda) is the integer row span of the framing
matrix; in doubled coordinates its shifts are 2*Lambda_i.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

INF = "inf"
NEG_INF = "-inf"


class LatticeError(ValueError):
    pass


class Framing:
    """Symmetric integer framing matrix: diagonal = surgery coefficients,
    off-diagonal = linking numbers."""

    def __init__(self, matrix):
        self.matrix = tuple(tuple(int(v) for v in row) for row in matrix)
        n = len(self.matrix)
        if any(len(r) != n for r in self.matrix):
            raise LatticeError("framing matrix must be square")
        for i in range(n):
            for j in range(n):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise LatticeError("framing matrix must be symmetric")
        self.ell = n

    def row(self, i):
        return self.matrix[i]

    def check_linking(self, linking):
        for i in range(self.ell):
            for j in range(self.ell):
                if i != j and self.matrix[i][j] != linking[i][j]:
                    raise LatticeError(
                        f"framing off-diagonal ({i},{j}) != linking number")

    def is_nondegenerate(self) -> bool:
        return abs(_det(self.matrix)) > 0

    def det(self) -> int:
        return _det(self.matrix)


def _det(m):
    n = len(m)
    rows = [[Fraction(v) for v in r] for r in m]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        det *= rows[c][c]
        for r in range(c + 1, n):
            f = rows[r][c] / rows[c][c]
            for k in range(c, n):
                rows[r][k] -= f * rows[c][k]
    return int(det)


def integer_kernel(matrix):
    """Basis of {v in Z^n : matrix . v = 0} (matrix rows dot v)."""
    n = len(matrix[0]) if matrix else 0
    rows = [[Fraction(x) for x in r] for r in matrix]
    # row reduce, track pivot columns
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][fc]
        den = 1
        for v in vec:
            den = den * v.denominator // gcd(den, v.denominator)
        basis.append(tuple(int(v * den) for v in vec))
    return basis


def solve_integer(matrix_cols, target):
    """Integer x with sum_j x_j * matrix_cols[j] = target, or None."""
    n = len(target)
    k = len(matrix_cols)
    aug = [[Fraction(matrix_cols[j][i]) for j in range(k)] + [Fraction(target[i])]
           for i in range(n)]
    pivots = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        lead = aug[r][c]
        aug[r] = [v / lead for v in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, n):
        if aug[i][k] != 0:
            return None
    x = [Fraction(0)] * k
    for i, c in enumerate(pivots):
        x[c] = aug[i][k]
    if any(v.denominator != 1 for v in x):
        # a rational solution exists; search the kernel lattice for integrality
        kern = integer_kernel([[matrix_cols[j][i] for j in range(k)]
                               for i in range(n)])
        if not kern:
            return None
        # brute-force small combinations
        from itertools import product as iproduct
        for coeffs in iproduct(range(-6, 7), repeat=len(kern)):
            cand = [x[j] + sum(c * kv[j] for c, kv in zip(coeffs, kern))
                    for j in range(k)]
            if all(v.denominator == 1 for v in cand):
                return tuple(int(v) for v in cand)
        return None
    return tuple(int(v) for v in x)


def lambda_sum(framing: Framing, oriented) -> tuple:
    """Lambda_{L,N} = sum of framing rows over components oriented against L."""
    out = [0] * framing.ell
    for i, sign in oriented.items():
        if sign < 0:
            for j in range(framing.ell):
                out[j] += framing.matrix[i][j]
    return tuple(out)


def psi_shift2(linking, oriented, i) -> int:
    """Doubled shift of coordinate i under psi^{M}: -lk(L_i, M-oriented)."""
    return -sum(sign * linking[i][j] for j, sign in oriented.items() if j != i)


def d_of_u(framing: Framing, s2) -> int:
    """d(u) = gcd over the perp lattice of 2 s.v (doubled s makes this exact)."""
    kern = integer_kernel(framing.matrix)
    g = 0
    for v in kern:
        val = sum(a * b for a, b in zip(s2, v))
        g = gcd(g, abs(val))
    return g


def nu(s2, base2, framing: Framing, modulus=None) -> int:
    """nu(s) with nu(base) = 0 and nu(s + Lambda_i) = nu(s) + 2 s_i.

    Defined modulo d(u); raises if s2 is not in base2's class.
    """
    diff = [(a - b) for a, b in zip(s2, base2)]
    if any(d % 2 for d in diff):
        raise LatticeError("s not in the H(L) lattice of the base point")
    cols = [tuple(2 * framing.matrix[i][j] for j in range(framing.ell))
            for i in range(framing.ell)]
    a = solve_integer(cols, diff)
    if a is None:
        raise LatticeError("s not in the Spin^c class of the base point")
    val = 0
    for i in range(framing.ell):
        val += a[i] * base2[i]  # = 2 a_i s0_i in undoubled terms
        val += a[i] * (a[i] - 1) * framing.matrix[i][i]
        for j in range(framing.ell):
            if j != i:
                val += a[i] * a[j] * framing.matrix[i][j]
    if modulus is None:
        modulus = d_of_u(framing, s2)
    return val % modulus if modulus else val


def spinc_representative(s2, framing: Framing):
    """Canonical representative of [s2] modulo 2*H(L, Lambda) (HNF reduction)."""
    rows = [tuple(2 * v for v in framing.matrix[i]) for i in range(framing.ell)]
    rows = [r for r in rows if any(r)]
    if not rows:
        return tuple(s2)
    hnf = _hnf(rows)
    s = list(s2)
    for row in hnf:
        piv = next((j for j, v in enumerate(row) if v), None)
        if piv is None:
            continue
        q = s[piv] // row[piv]
        for j in range(len(s)):
            s[j] -= q * row[j]
    return tuple(s)


def _hnf(rows):
    """Row Hermite normal form (integer row operations)."""
    pool = [list(r) for r in rows if any(r)]
    if not pool:
        return []
    n = len(pool[0])
    out = []
    for col in range(n):
        nz = [r for r in pool if r[col] != 0]
        rest = [r for r in pool if r[col] == 0]
        if not nz:
            pool = rest
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            new_nz = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for j in range(n):
                    r[j] -= q * piv[j]
                if r[col] != 0:
                    new_nz.append(r)
                elif any(r):
                    rest.append(r)
            nz = new_nz
        piv = nz[0]
        if piv[col] < 0:
            piv[:] = [-v for v in piv]
        for r in out:
            q = r[col] // piv[col]
            for j in range(n):
                r[j] -= q * piv[j]
        out.append(piv)
        pool = [r for r in rest if any(r)]
    return out


def tau_order(framing: Framing, i: int, limit=10000) -> int:
    """Order of the i-th unit vector in Z^l / H(L, Lambda)."""
    cols = [tuple(framing.matrix[k][j] for j in range(framing.ell))
            for k in range(framing.ell)]
    target_base = [0] * framing.ell
    for t in range(1, limit + 1):
        target = list(target_base)
        target[i] = t
        if solve_integer(cols, target) is not None:
            return t
    raise LatticeError("tau order not found (degenerate framing?)")
