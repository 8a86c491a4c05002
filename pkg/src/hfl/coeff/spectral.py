"""Spectral sequence of a bounded filtered complex over F2.

Pages are computed from the subspace formula
    E_r^p = Z_r^p / (Z_{r-1}^{p-1} + d Z_{r-1}^{p+r-1}),
    Z_r^p = {x in F_p C : d x in F_{p-r} C},
working with the flattened F2 complex; vectors are Python-int bitsets.
"""

from __future__ import annotations

from .complexes import GradedComplex, flatten


class FilteredComplexError(ValueError):
    pass


class FilteredComplex:
    """A GradedComplex with an integer filtration level per generator.

    Every differential entry must be non-increasing in level.
    """

    def __init__(self, base: GradedComplex, level, check=True):
        self.base = base
        self.level = dict(level)
        missing = [g for g in base.gens if g not in self.level]
        if missing:
            raise FilteredComplexError(f"missing filtration level for {missing[0]!r}")
        if check:
            base.check_d_squared()
            for t, s, _v in base.diff.entries():
                if self.level[t] > self.level[s]:
                    raise FilteredComplexError(
                        f"differential raises filtration: {s!r} -> {t!r}")


def _span_rank(vectors):
    basis = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis), basis


def _kernel_vectors(domain_indices, images):
    """Kernel of the map e_i -> images[i] (ints); returns kernel vectors as
    ints over the global basis (using the global index of each domain elt)."""
    rows = []  # (image, combo) pairs, eliminated
    kernel = []
    for i, img in zip(domain_indices, images):
        combo = 1 << i
        for rimg, rcombo in rows:
            if img and (img.bit_length() == rimg.bit_length()) and (img >> (rimg.bit_length() - 1)) & 1:
                img ^= rimg
                combo ^= rcombo
        # full reduction (bit_length trick above only handles leading bits)
        for rimg, rcombo in rows:
            top = rimg.bit_length() - 1
            if img >> top & 1:
                img ^= rimg
                combo ^= rcombo
        if img == 0:
            kernel.append(combo)
        else:
            rows.append((img, combo))
            rows.sort(key=lambda t: -t[0].bit_length())
    return kernel


class SpectralSequence:
    def __init__(self, pages, infinity, total_homology):
        self.pages = pages              # r -> {key: rank}
        self.infinity = infinity        # {key: rank}
        self.total_homology = total_homology

    def total(self, r) -> int:
        return sum(self.pages[r].values())

    def infinity_total(self) -> int:
        return sum(self.infinity.values())


def spectral_sequence(fc: FilteredComplex, max_page=None) -> SpectralSequence:
    base = fc.base
    flat = flatten(base)
    n = flat.dim
    if n == 0:
        return SpectralSequence({1: {}}, {}, 0)
    levels = [fc.level[g] for g, _m in flat.basis]
    lo, hi = min(levels), max(levels)
    span = hi - lo
    r_last = span + 1 if max_page is None else max_page
    grading = flat.grading

    d_int = []
    for col in flat.columns:
        v = 0
        for r in col:
            v |= 1 << r
        d_int.append(v)

    def mask_levels(pred):
        m = 0
        for i, lv in enumerate(levels):
            if pred(lv):
                m |= 1 << i
        return m

    def z_vectors(r, p, degree):
        """Spanning vectors of Z_r^p (restricted to total degree, if graded)."""
        dom = [i for i in range(n) if levels[i] <= p
               and (degree is None or grading[i] == degree)]
        bad = mask_levels(lambda lv: lv > p - r)
        images = [d_int[i] & bad for i in dom]
        kern = _kernel_vectors(dom, images)
        # also need a basis completion: kernel vectors only span ker; Z_r^p IS the kernel
        return kern

    def d_of(vec):
        out = 0
        i = 0
        v = vec
        while v:
            if v & 1:
                out ^= d_int[i]
            v >>= 1
            i += 1
        return out

    degrees = sorted(set(grading)) if grading is not None else [None]
    pages = {}
    for r in range(1, r_last + 1):
        page = {}
        for deg in degrees:
            for p in range(lo, hi + 1):
                z = z_vectors(r, p, deg)
                if not z:
                    continue
                dim_z, _ = _span_rank(z)
                denom = z_vectors(r - 1, p - 1, deg)
                up_deg = deg + 1 if deg is not None else None
                denom += [d_of(v) for v in z_vectors(r - 1, p + r - 1, up_deg)]
                dim_den, _ = _span_rank(denom)
                rank = dim_z - dim_den
                if rank:
                    key = p if deg is None else (p, deg)
                    page[key] = page.get(key, 0) + rank
        pages[r] = page
    infinity = pages[r_last]
    total_h = flat.total_homology_rank()
    return SpectralSequence(pages, infinity, total_h)
