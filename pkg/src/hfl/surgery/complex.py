"""Assembly of the truncated surgery complex C^-(H, Lambda, u) from a
SystemModel, Spin^c decomposition, gradings, homology, and truncation modes
(knot_b, combined, folded, vertical_only)."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from ..coeff.ring import TruncatedRing, RingMatrix
from ..coeff.complexes import GradedComplex, flatten, flatten_map, morse_reduce
from ..coeff import gf2
from . import lattice
from .lattice import Framing
from .model import (SystemModel, ModelError, all_orientations,
                    nonempty_subsets, _orient_key)


class SurgeryError(ValueError):
    pass


MODES = ("knot_b", "combined", "folded", "vertical_only")


def default_b(model: SystemModel, framing: Framing) -> int:
    lam = max(abs(framing.matrix[i][i]) for i in range(model.ell))
    return model.max_alexander() + lam + 2


def default_mtilde(model: SystemModel, framing: Framing):
    """m_i = 4(b + sum |c_ij|), rounded up to a multiple of ord(tau_i)."""
    b = default_b(model, framing)
    out = []
    for i in range(model.ell):
        m = 4 * (b + sum(abs(framing.matrix[i][j]) for j in range(model.ell)
                         if j != i))
        order = lattice.tau_order(framing, i)
        if m % order:
            m += order - (m % order)
        out.append(m)
    return tuple(out)


class _Region:
    """The folded/combined index region P(Lambda~, Lambda, eps) per eps."""

    def __init__(self, framing: Framing, mtilde, eps):
        ell = framing.ell
        self.eps = tuple(eps)
        lam = framing.matrix
        lamt = [list(lam[i]) for i in range(ell)]
        for i in range(ell):
            lamt[i][i] += mtilde[i]
        # doubled edge vectors B_i = 2(Lambda~_i - eps_i Lambda_i)
        self.bcols = []
        for i in range(ell):
            col = [2 * (lamt[i][j] - (lam[i][j] if eps[i] else 0))
                   for j in range(ell)]
            self.bcols.append(tuple(col))
        zeta2 = [Fraction(1, 3 ** (i + 2)) for i in range(ell)]
        self.center2 = [zeta2[j] + sum(lam[i][j] for i in range(ell) if eps[i])
                        for j in range(ell)]
        self.binv = _invert_fractions(
            [[Fraction(self.bcols[j][i]) for j in range(ell)]
             for i in range(ell)])

    def coords(self, s2):
        diff = [Fraction(s2[j]) - self.center2[j] for j in range(len(s2))]
        return [sum(self.binv[i][j] * diff[j] for j in range(len(s2)))
                for i in range(len(s2))]

    def contains(self, s2) -> bool:
        u = self.coords(s2)
        half = Fraction(1, 2)
        for v in u:
            if abs(v) == half:
                raise SurgeryError("lattice point on a region boundary "
                                   "(zeta not generic)")
            if abs(v) > half:
                return False
        return True

    def fold(self, s2):
        """Translate into the region; returns (representative, fold counts)."""
        u = self.coords(s2)
        ks = []
        for v in u:
            k = int((v + Fraction(1, 2)).__floor__())
            ks.append(k)
        rep = list(s2)
        for i, k in enumerate(ks):
            if k:
                for j in range(len(s2)):
                    rep[j] -= k * self.bcols[i][j]
        rep = tuple(rep)
        if not self.contains(rep):
            raise SurgeryError("folding failed to land in the region")
        return rep, tuple(ks)

    def lattice_points(self, offsets2, class_rep, framing):
        """All doubled lattice points of H(L) in this region and Spin^c class."""
        ell = len(offsets2)
        lo = []
        hi = []
        for j in range(ell):
            rad = sum(abs(self.bcols[i][j]) for i in range(ell)) // 2 + 2
            c = self.center2[j]
            lo.append(int(c) - rad)
            hi.append(int(c) + rad)
        pts = []
        ranges = []
        for j in range(ell):
            start = lo[j]
            if (start - offsets2[j]) % 2:
                start += 1
            ranges.append(range(start, hi[j] + 1, 2))
        for s2 in product(*ranges):
            if not self.contains(s2):
                continue
            if lattice.spinc_representative(s2, framing) != class_rep:
                continue
            pts.append(tuple(s2))
        pts.sort()
        return pts


def _invert_fractions(rows):
    n = len(rows)
    aug = [list(rows[i]) + [Fraction(1 if j == i else 0) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise SurgeryError("degenerate region matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        lead = aug[c][c]
        aug[c] = [v / lead for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def spinc_classes(model: SystemModel, framing: Framing):
    """Representatives of H(L)/H(L,Lambda) (nondegenerate framing)."""
    if not framing.is_nondegenerate():
        raise SurgeryError("Spin^c enumeration requires nondegenerate framing")
    count = abs(framing.det())
    offsets2 = model.offsets2()
    reps = set()
    rad = 2 * sum(sum(abs(v) for v in row) for row in framing.matrix) + 2
    ranges = []
    for j in range(model.ell):
        start = -rad + ((-rad - offsets2[j]) % 2)
        ranges.append(range(start, rad + 1, 2))
    for s2 in product(*ranges):
        reps.add(lattice.spinc_representative(s2, framing))
        if len(reps) == count:
            break
    if len(reps) != count:
        raise SurgeryError("failed to enumerate all Spin^c classes")
    return sorted(reps)


class SurgeryComplex:
    """The assembled, truncated complex for one Spin^c class."""

    def __init__(self, model, framing, class_rep, delta, mode, factors,
                 diff, ring, params, hat=None):
        self.model = model
        self.framing = framing
        self.class_rep = class_rep
        self.delta = delta
        self.mode = mode
        self.factors = factors      # ordered list of (dead frozenset, s2)
        self.diff = diff            # RingMatrix over (dead_tuple, s2, gen)
        self.ring = ring
        self.params = params
        self.hat = hat
        self._grading = False       # computed lazily; None if unavailable

    def gen_keys(self):
        out = []
        for dead, s2 in self.factors:
            cx = self.model.complex_for(self.model.full() - dead)
            dt = tuple(sorted(dead))
            out.extend((dt, s2, g) for g in cx.gens)
        return out

    def check_d_squared(self):
        sq = self.diff.compose(self.diff)
        for t, s, v in sq.entries():
            if not v.is_zero():
                raise SurgeryError(
                    f"D^2 != 0 (invalid system): {s} -> {t} gives {v}")

    def d_of_u(self) -> int:
        return lattice.d_of_u(self.framing, self.class_rep)

    def mu_formula(self, key) -> int:
        """mu(s, x) = mu^M_s(x) + nu(s) - |M| (well defined mod d(u))."""
        dead_t, s2, g = key
        dead = frozenset(dead_t)
        cx = self.model.complex_for(self.model.full() - dead)
        drop = 0
        for i in range(self.model.ell):
            if i not in dead:
                drop += max(cx.alexander2[g][i] - s2[i], 0)
        if drop % 2:
            raise SurgeryError("mu formula hit a half integer")
        nu = lattice.nu(s2, self.class_rep, self.framing, modulus=0)
        return cx.maslov[g] - drop // 2 + nu - len(dead)

    def grading(self):
        """Relative grading by propagation (each entry drops 1 mod d(u));
        None when the entries admit no consistent assignment (folded mode)."""
        if self._grading is not False:
            return self._grading
        d_u = self.d_of_u()
        keys = self.gen_keys()
        adj = {}
        for t, s, v in self.diff.entries():
            drops = v.degree_drops()
            if d_u:
                drops = {x % d_u for x in drops}
            if len(drops) > 1:
                self._grading = None
                return None
            d = next(iter(drops))
            adj.setdefault(s, []).append((t, 1 - d))   # mu(t) = mu(s) - 1 + d
            adj.setdefault(t, []).append((s, -(1 - d)))
        mu = {}
        for seed in keys:
            if seed in mu:
                continue
            mu[seed] = self.mu_formula(seed) % d_u if d_u else self.mu_formula(seed)
            frontier = [seed]
            while frontier:
                nxt = []
                for k in frontier:
                    for (k2, drop) in adj.get(k, ()):
                        val = mu[k] - drop
                        if d_u:
                            val %= d_u
                        if k2 in mu:
                            if mu[k2] != val:
                                self._grading = None
                                return None
                        else:
                            mu[k2] = val
                            nxt.append(k2)
                frontier = nxt
        self._grading = mu
        return mu

    def complex(self) -> GradedComplex:
        return GradedComplex(self.ring, self.gen_keys(), self.diff,
                             self.grading(), grading_modulus=self.d_of_u())

    def homology(self):
        """Plain flattened homology ranks per grading ({None: r} if ungraded)."""
        return flatten(morse_reduce(self.complex())).homology_ranks()

    def total_rank(self) -> int:
        return sum(self.homology().values())


def assemble(model: SystemModel, framing: Framing, class_rep=None,
             delta: int = 1, mode: str = "folded", b=None, mtilde=None,
             hat=None, check=True) -> SurgeryComplex:
    """Build the truncated surgery complex for one Spin^c class.

    class_rep: canonical doubled representative (see spinc_classes); defaults
    to the class of the all-offsets base point.
    """
    if mode not in MODES:
        raise SurgeryError(f"unknown mode {mode!r}")
    framing.check_linking(model.linking)
    offsets2 = model.offsets2()
    if class_rep is None:
        class_rep = lattice.spinc_representative(offsets2, framing)
    ring = TruncatedRing(model.num_vars, delta)
    params = {}

    if mode == "knot_b":
        factors = _knot_b_factors(model, framing, class_rep, b, params)
        folder = None
    elif mode in ("combined", "folded"):
        if not framing.is_nondegenerate():
            raise SurgeryError(f"{mode} truncation requires nondegenerate framing")
        if mtilde is None:
            mtilde = default_mtilde(model, framing)
        params["mtilde"] = tuple(mtilde)
        regions = {}
        factors = []
        for dead in _all_subsets(model.ell):
            eps = tuple(1 if i in dead else 0 for i in range(model.ell))
            region = _Region(framing, mtilde, eps)
            regions[frozenset(dead)] = region
            for s2 in region.lattice_points(offsets2, class_rep, framing):
                factors.append((frozenset(dead), s2))
        folder = regions if mode == "folded" else None
    elif mode == "vertical_only":
        if any(any(v for v in row) for row in framing.matrix):
            raise SurgeryError("vertical_only mode requires the zero framing")
        factors = [(frozenset(dead), class_rep)
                   for dead in _all_subsets(model.ell)]
        folder = None

    factor_set = {(dead, s2) for dead, s2 in factors}
    diff = RingMatrix(ring)
    for dead, s2 in factors:
        dt = tuple(sorted(dead))
        sub = model.full() - dead
        internal = model.internal_matrix(dead, s2, ring)
        for t, s, v in internal.entries():
            diff.add_entry((dt, s2, t), (dt, s2, s), v)
        for n_set in nonempty_subsets(sub):
            for oriented in all_orientations(n_set):
                t2 = tuple(a + 2 * b for a, b in zip(
                    s2, lattice.lambda_sum(framing, oriented)))
                tgt_dead = dead | n_set
                tdt = tuple(sorted(tgt_dead))
                iso = None
                if folder is not None:
                    t2_key, ks = folder[frozenset(tgt_dead)].fold(t2)
                    for i, k in enumerate(ks):
                        if k == 0 or i in tgt_dead:
                            # dead-direction folds leave the complex alone
                            continue
                        if abs(k) > 1:
                            raise SurgeryError("fold by more than one region")
                        step = model.fold_iso_matrix(tgt_dead, i, ring)
                        iso = step if iso is None else step.compose(iso)
                else:
                    t2_key = t2
                if (frozenset(tgt_dead), t2_key) not in factor_set:
                    continue
                phi = model.phi_matrix(dead, s2, oriented, ring)
                if iso is not None:
                    phi = iso.compose(phi)
                for t, s, v in phi.entries():
                    diff.add_entry((tdt, t2_key, t), (dt, s2, s), v)
    if hat is not None:
        killed = RingMatrix(ring)
        for t, s, v in diff.entries():
            killed.add_entry(t, s, v.kill_variable(hat))
        diff = killed
    sc = SurgeryComplex(model, framing, class_rep, delta, mode, factors, diff,
                        ring, params, hat=hat)
    if check:
        sc.check_d_squared()
    return sc


def _all_subsets(ell):
    out = []
    for mask in range(1 << ell):
        out.append(frozenset(i for i in range(ell) if (mask >> i) & 1))
    return out


def _knot_b_factors(model, framing, class_rep, b, params):
    if model.ell != 1:
        raise SurgeryError("knot_b truncation applies to knots only")
    lam = framing.matrix[0][0]
    if lam == 0:
        raise SurgeryError("knot_b truncation requires nonzero framing")
    if b is None:
        b = default_b(model, framing)
    params["b"] = b
    s0 = class_rep[0]
    step = 2 * abs(lam)

    def class_range(lo, hi):
        first = lo + ((s0 - lo) % step)
        return range(first, hi + 1, 2 * abs(lam))

    factors = [(frozenset(), (s,)) for s in class_range(-2 * b, 2 * b)]
    factors += [(frozenset({0}), (s,))
                for s in class_range(2 * (-b + lam), 2 * b)]
    params["orientation"] = "quotient" if lam > 0 else "subcomplex"
    return factors


# -- homology drivers ----------------------------------------------------------

def window_rank(model, framing, class_rep, delta, mode, **kw) -> int:
    """rank Im(H(C^{2 delta}) -> H(C^{delta})) (Eq. (eq:dd) with delta' = 2 delta).

    The complex at truncation delta is the monomial truncation of the one at
    2*delta, so one ring-level Morse reduction over R^{2 delta} computes
    both sides and the induced map.
    """
    sc_hi = assemble(model, framing, class_rep, 2 * delta, mode, check=False,
                     **kw)
    hi = morse_reduce(sc_hi.complex())
    lo = hi.retruncate(delta)
    proj = RingMatrix(lo.ring)
    for key in hi.gens:
        proj.add_entry(key, key, lo.ring.one())
    fhi = flatten(hi)
    flo = flatten(lo)
    cols = flatten_map(proj, fhi, flo, lo.ring.delta)
    return gf2.rank_of_induced_map(cols, fhi.columns, flo.columns,
                                   fhi.dim, flo.dim)


def homology_profile(model, framing, class_rep, deltas, mode, **kw):
    """Per delta: plain per-grading ranks and the window rank."""
    out = {}
    for d in sorted(deltas):
        sc = assemble(model, framing, class_rep, d, mode, **kw)
        out[d] = {
            "ranks": sc.homology(),
            "window": window_rank(model, framing, class_rep, d, mode, **kw),
        }
    return out


def check_truncation_witnesses(model, framing, class_rep, delta, mode,
                               mtilde=None, samples=2):
    """Witness the edge quasi-isomorphism hypothesis at the region boundary:
    for each component and sign, the cancelled edge map at an extreme
    lattice point must be a quasi-isomorphism.  Returns a list of failures."""
    from ..coeff.complexes import is_quasi_iso
    if mtilde is None:
        mtilde = default_mtilde(model, framing)
    offsets2 = model.offsets2()
    ring = TruncatedRing(model.num_vars, delta)
    region = _Region(framing, mtilde, (0,) * model.ell)
    pts = region.lattice_points(offsets2, class_rep, framing)
    failures = []
    for i in range(model.ell):
        for sign in (1, -1):
            extreme = sorted(pts, key=lambda s2: sign * s2[i])[-samples:]
            for s2 in extreme:
                phi = model.phi_matrix(frozenset(), s2, {i: sign}, ring)
                src = GradedComplex(ring, model.complex_for(model.full()).gens,
                                    model.internal_matrix(frozenset(), s2, ring))
                t2 = tuple(a + 2 * b for a, b in zip(
                    s2, lattice.lambda_sum(framing, {i: sign})))
                tgt = GradedComplex(
                    ring, model.complex_for(model.full() - {i}).gens,
                    model.internal_matrix(frozenset({i}), t2, ring))
                if not is_quasi_iso(phi, src, tgt):
                    failures.append((i, sign, s2))
    return failures
