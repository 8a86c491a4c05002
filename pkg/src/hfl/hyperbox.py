"""Hyperboxes of chain complexes: validation, compression into hypercubes,
elementary enlargements, chain maps, canonical inclusions, total complexes,
and JSON serialization.

A hyperbox of size d has a complex C^{e0} at every integer point e0 of the
box and maps D^e_{e0}: C^{e0} -> C^{e0+e} (e a 0/1 vector) of degree
||e||-1, satisfying sum_{e' <= e} D^{e-e'}_{e0+e'} D^{e'}_{e0} = 0.
Generators are addressed globally as (vertex, name).
"""

from __future__ import annotations

import json
from itertools import product

from .coeff.ring import RingMatrix, TruncatedRing
from .coeff.complexes import GradedComplex
from . import songs


class HyperboxError(ValueError):
    pass


def box_points(size):
    return [tuple(p) for p in product(*(range(d + 1) for d in size))]


def unit_eps(n):
    return [tuple(e) for e in product((0, 1), repeat=n)]


def eps_leq(a, b):
    return all(x <= y for x, y in zip(a, b))


def eps_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def eps_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def norm(e):
    return sum(e)


class Hyperbox:
    """n-dimensional hyperbox of chain complexes over a truncated ring."""

    def __init__(self, ring: TruncatedRing, size, gens, maps, grading=None):
        self.ring = ring
        self.size = tuple(size)
        self.n = len(self.size)
        self.gens = {tuple(v): list(g) for v, g in gens.items()}
        for v in box_points(self.size):
            self.gens.setdefault(v, [])
        self.grading = dict(grading) if grading is not None else None
        # maps: {eps: RingMatrix over global keys}, absent means zero
        self.maps = {}
        for e, mat in maps.items():
            e = tuple(e)
            if any(x not in (0, 1) for x in e):
                raise HyperboxError(f"direction {e} is not a 0/1 vector")
            self.maps[e] = mat

    def direction(self, e) -> RingMatrix:
        return self.maps.get(tuple(e), RingMatrix(self.ring))

    def vertices(self):
        return box_points(self.size)

    def global_keys(self):
        return [(v, g) for v in self.vertices() for g in self.gens[v]]

    def block(self, e, src_vertex) -> RingMatrix:
        """The single map D^e_{src_vertex} as a RingMatrix on global keys."""
        out = RingMatrix(self.ring)
        mat = self.direction(e)
        for g in self.gens[tuple(src_vertex)]:
            col = mat.column((tuple(src_vertex), g))
            for tgt, val in col.items():
                out.add_entry(tgt, (tuple(src_vertex), g), val)
        return out

    def is_hypercube(self) -> bool:
        return all(d == 1 for d in self.size)

    # -- validation -------------------------------------------------------

    def validate(self):
        """Check (eq:d2); returns None or the first violating (e0, e)."""
        n = self.n
        for e in unit_eps(n):
            acc = RingMatrix(self.ring)
            for e1 in unit_eps(n):
                if not eps_leq(e1, e):
                    continue
                e2 = eps_sub(e, e1)
                acc = acc + self.direction(e2).compose(self.direction(e1))
            for tgt, src, val in acc.entries():
                if val.is_zero():
                    continue
                e0 = src[0]
                if eps_add(e0, e) == tgt[0]:
                    return (e0, e)
        if self.grading is not None:
            self._check_degrees()
        return None

    def _check_degrees(self):
        for e, mat in self.maps.items():
            want = 1 - norm(e)
            for tgt, src, val in mat.entries():
                for d in val.degree_drops():
                    if self.grading[src] - self.grading[tgt] + d != want:
                        raise HyperboxError(
                            f"map D^{e} entry {src} -> {tgt} has wrong degree")

    def require_valid(self):
        bad = self.validate()
        if bad is not None:
            raise HyperboxError(f"hyperbox relations fail at (e0, e) = {bad}")

    # -- songs interface ---------------------------------------------------

    def collection(self) -> songs.HypercubicalCollection:
        """The hypercubical collection A_Z = D^{zeta(Z)} in End(total module),
        modeled on letters {1..n}."""
        letters = range(1, self.n + 1)
        elements = {}
        for z in songs._subsets(letters):
            e = tuple(1 if i + 1 in z else 0 for i in range(self.n))
            elements[z] = self.direction(e)
        return songs.HypercubicalCollection(
            letters, elements, self.global_keys(), self.ring, check=False)

    def compress(self) -> "Hyperbox":
        """Compression into a hypercube (Prop. 3.23): vertex complexes are the
        corner complexes and D-hat^{zeta(Z)} = play(alpha(Z)) in register d|Z."""
        self.require_valid()
        coll = self.collection()
        n = self.n
        corner = {e: tuple(e[i] * self.size[i] for i in range(n))
                  for e in unit_eps(n)}
        gens = {e: [(corner[e], g) for g in self.gens[corner[e]]]
                for e in unit_eps(n)}
        grading = None
        if self.grading is not None:
            grading = {(e, (corner[e], g)): self.grading[(corner[e], g)]
                       for e in unit_eps(n) for g in self.gens[corner[e]]}
        maps = {}
        for z in songs._subsets(range(1, n + 1)):
            e = tuple(1 if i + 1 in z else 0 for i in range(n))
            register = {x: self.size[x - 1] for x in z}
            played = songs.play(songs.symphony(z), coll.restricted(z), register)
            mat = RingMatrix(self.ring)
            for e0 in unit_eps(n):
                if any(a + b > 1 for a, b in zip(e0, e)):
                    continue
                src_v = corner[e0]
                tgt_v = corner[eps_add(e0, e)]
                for g in self.gens[src_v]:
                    col = played.column((src_v, g))
                    for (tv, tg), val in col.items():
                        if tv == tgt_v:
                            mat.add_entry((eps_add(e0, e), (tv, tg)),
                                          (e0, (src_v, g)), val)
            if not mat.is_zero():
                maps[e] = mat
        out = Hyperbox(self.ring, (1,) * n, gens, maps, grading)
        out.require_valid()
        return out

    # -- enlargement --------------------------------------------------------

    def enlarge(self, axis: int, slot: int) -> "Hyperbox":
        """Elementary enlargement at (axis, slot): duplicates the slice
        eps_axis = slot, joins the copies by identity edges."""
        k = axis
        if not 0 <= k < self.n:
            raise HyperboxError(f"axis {k} out of range")
        if not 0 <= slot <= self.size[k]:
            raise HyperboxError(f"slot {slot} out of range for axis {k}")
        new_size = list(self.size)
        new_size[k] += 1

        def old_vertex(v):
            if v[k] <= slot:
                return v
            return v[:k] + (v[k] - 1,) + v[k + 1:]

        gens = {}
        grading = {} if self.grading is not None else None
        for v in box_points(new_size):
            ov = old_vertex(v)
            gens[v] = list(self.gens[ov])
            if grading is not None:
                for g in gens[v]:
                    grading[(v, g)] = self.grading[(ov, g)]
        tau = tuple(1 if i == k else 0 for i in range(self.n))
        maps = {}
        for e in unit_eps(self.n):
            mat = RingMatrix(self.ring)
            old = self.direction(e)
            for v in box_points(new_size):
                tgt_box = eps_add(v, e)
                if any(tgt_box[i] > new_size[i] for i in range(self.n)):
                    continue
                if v[k] + e[k] <= slot or v[k] > slot:
                    ov, otv = old_vertex(v), old_vertex(tgt_box)
                    for g in self.gens[ov]:
                        for (tv, tg), val in old.column((ov, g)).items():
                            if tv == otv:
                                mat.add_entry((tgt_box, tg), (v, g), val)
                elif v[k] == slot and e == tau:
                    for g in gens[v]:
                        mat.add_entry((tgt_box, g), (v, g), self.ring.one())
                # v[k] == slot, e_k = 1, ||e|| >= 2: zero
                elif v[k] == slot and e[k] == 1:
                    pass
            if not mat.is_zero():
                maps[e] = mat
        out = Hyperbox(self.ring, new_size, gens, maps, grading)
        return out

    # -- total complex -------------------------------------------------------

    def total_complex(self) -> GradedComplex:
        """Total complex of a hypercube: D = sum D^e, grading shifted by -||e||."""
        if not self.is_hypercube():
            raise HyperboxError("total complex requires a hypercube (size 1..1)")
        self.require_valid()
        gens = self.global_keys()
        diff = RingMatrix(self.ring)
        for e in unit_eps(self.n):
            for tgt, src, val in self.direction(e).entries():
                diff.add_entry(tgt, src, val)
        grading = None
        if self.grading is not None:
            grading = {(v, g): self.grading[(v, g)] - norm(v)
                       for (v, g) in gens}
        return GradedComplex(self.ring, gens, diff, grading)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> str:
        data = {
            "ring": {"num_vars": self.ring.num_vars, "delta": self.ring.delta},
            "size": list(self.size),
            "vertices": {
                ",".join(map(str, v)): {
                    "generators": [str(g) for g in self.gens[v]],
                    "gradings": ([self.grading[(v, g)] for g in self.gens[v]]
                                 if self.grading is not None else None),
                }
                for v in self.vertices()
            },
            "maps": [],
        }
        for e in sorted(self.maps):
            mat = self.maps[e]
            entries = []
            for tgt, src, val in sorted(mat.entries(),
                                        key=lambda t: (str(t[1]), str(t[0]))):
                entries.append({
                    "from": list(src[0]), "source": str(src[1]),
                    "to": list(tgt[0]), "target": str(tgt[1]),
                    "monomials": [list(m) for m in val.sorted_monomials()],
                })
            data["maps"].append({"eps": list(e), "entries": entries})
        return json.dumps(data, indent=1, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "Hyperbox":
        data = json.loads(text)
        ring = TruncatedRing(data["ring"]["num_vars"], data["ring"]["delta"])
        size = tuple(data["size"])
        gens = {}
        grading = {}
        any_graded = False
        for key, vd in data["vertices"].items():
            v = tuple(int(x) for x in key.split(",")) if key else ()
            gens[v] = list(vd["generators"])
            if vd.get("gradings") is not None:
                any_graded = True
                for g, mu in zip(vd["generators"], vd["gradings"]):
                    grading[(v, g)] = mu
        maps = {}
        for md in data["maps"]:
            e = tuple(md["eps"])
            mat = RingMatrix(ring)
            for ent in md["entries"]:
                src = (tuple(ent["from"]), ent["source"])
                tgt = (tuple(ent["to"]), ent["target"])
                val = ring.element([tuple(m) for m in ent["monomials"]])
                mat.add_entry(tgt, src, val)
            maps[e] = mat
        return Hyperbox(ring, size, gens, maps, grading if any_graded else None)


class HyperboxChainMap:
    """A chain map between hyperboxes of equal size: maps F^e_{e0} of degree
    ||e||, equivalently an (n+1)-dimensional hyperbox of size (d, 1)."""

    def __init__(self, source: Hyperbox, target: Hyperbox, components):
        if source.size != target.size:
            raise HyperboxError("chain map requires equal sizes")
        self.source = source
        self.target = target
        # components: {eps: RingMatrix} from source global keys to target's
        self.components = {tuple(e): m for e, m in components.items()}

    def direction(self, e) -> RingMatrix:
        return self.components.get(tuple(e),
                                   RingMatrix(self.source.ring))

    def as_hyperbox(self) -> Hyperbox:
        """The (d,1)-hyperbox assembled from source, target and F."""
        src, tgt = self.source, self.target
        n = src.n
        ring = src.ring
        size = src.size + (1,)
        gens = {}
        grading = {} if (src.grading is not None and tgt.grading is not None) else None
        for v in box_points(src.size):
            gens[v + (0,)] = [("s", g) for g in src.gens[v]]
            gens[v + (1,)] = [("t", g) for g in tgt.gens[v]]
            if grading is not None:
                for g in src.gens[v]:
                    grading[(v + (0,), ("s", g))] = src.grading[(v, g)]
                for g in tgt.gens[v]:
                    grading[(v + (1,), ("t", g))] = tgt.grading[(v, g)]
        maps = {}
        for e in unit_eps(n):
            mat = RingMatrix(ring)
            for tg, sg, val in src.direction(e).entries():
                mat.add_entry((tg[0] + (0,), ("s", tg[1])),
                              (sg[0] + (0,), ("s", sg[1])), val)
            for tg, sg, val in tgt.direction(e).entries():
                mat.add_entry((tg[0] + (1,), ("t", tg[1])),
                              (sg[0] + (1,), ("t", sg[1])), val)
            if not mat.is_zero():
                maps[e + (0,)] = mat
        for e in unit_eps(n):
            mat = RingMatrix(ring)
            for tg, sg, val in self.direction(e).entries():
                mat.add_entry((tg[0] + (1,), ("t", tg[1])),
                              (sg[0] + (0,), ("s", sg[1])), val)
            if not mat.is_zero():
                maps[e + (1,)] = mat
        return Hyperbox(ring, size, gens, maps, grading)

    def validate(self):
        return self.as_hyperbox().validate()

    def require_valid(self):
        bad = self.validate()
        if bad is not None:
            raise HyperboxError(f"chain map relation fails at {bad}")

    def compose(self, first: "HyperboxChainMap") -> "HyperboxChainMap":
        """self o first (apply `first`, then self)."""
        if first.target is not self.source and first.target.size != self.source.size:
            raise HyperboxError("composition size mismatch")
        n = self.source.n
        comps = {}
        for e in unit_eps(n):
            mat = RingMatrix(self.source.ring)
            for e1 in unit_eps(n):
                if not eps_leq(e1, e):
                    continue
                e2 = eps_sub(e, e1)
                mat = mat + self.direction(e2).compose(first.direction(e1))
            if not mat.is_zero():
                comps[e] = mat
        return HyperboxChainMap(first.source, self.target, comps)


def identity_chain_map(h: Hyperbox) -> HyperboxChainMap:
    mat = RingMatrix.identity(h.ring, h.global_keys())
    return HyperboxChainMap(h, h, {(0,) * h.n: mat})


def canonical_hypercube(ring, gens, diff: RingMatrix, n: int,
                        grading=None) -> Hyperbox:
    """H(K, n): the complex K at every vertex, identity edges, zero diagonals."""
    box_gens = {}
    box_grading = {} if grading is not None else None
    for v in unit_eps(n):
        box_gens[v] = list(gens)
        if box_grading is not None:
            for g in gens:
                box_grading[(v, g)] = grading[g]
    maps = {}
    zero = (0,) * n
    internal = RingMatrix(ring)
    for v in unit_eps(n):
        for tgt, src, val in diff.entries():
            internal.add_entry((v, tgt), (v, src), val)
    if not internal.is_zero():
        maps[zero] = internal
    for i in range(n):
        tau = tuple(1 if j == i else 0 for j in range(n))
        mat = RingMatrix(ring)
        for v in unit_eps(n):
            if v[i] == 1:
                continue
            for g in gens:
                mat.add_entry((eps_add(v, tau), g), (v, g), ring.one())
        maps[tau] = mat
    return Hyperbox(ring, (1,) * n, box_gens, maps, box_grading)


def canonical_inclusion(h: Hyperbox) -> HyperboxChainMap:
    """The canonical inclusion F^can: H(C^{0..0}, n) -> h, built as the
    composition F[n] o ... o F[1]."""
    if not h.is_hypercube():
        raise HyperboxError("canonical inclusion requires a hypercube")
    n = h.n
    ring = h.ring
    zero = (0,) * n

    def eps_le(v, i):
        return tuple(v[j] if j < i else 0 for j in range(n))

    def eps_gt(v, i):
        return tuple(v[j] if j >= i else 0 for j in range(n))

    def h_i(i) -> Hyperbox:
        gens = {}
        grading = {} if h.grading is not None else None
        for v in unit_eps(n):
            base = eps_le(v, i)
            gens[v] = [(base, g) for g in h.gens[base]]
            if grading is not None:
                for g in h.gens[base]:
                    grading[(v, (base, g))] = h.grading[(base, g)]
        maps = {}
        for e in unit_eps(n):
            mat = RingMatrix(ring)
            for v in unit_eps(n):
                w = eps_add(v, e)
                if any(x > 1 for x in w):
                    continue
                if eps_gt(v, i) == eps_gt(w, i):
                    de = eps_sub(eps_le(w, i), eps_le(v, i))
                    sub = h.direction(de)
                    base_v, base_w = eps_le(v, i), eps_le(w, i)
                    for g in h.gens[base_v]:
                        for (tv, tg), val in sub.column((base_v, g)).items():
                            if tv == base_w:
                                mat.add_entry((w, (base_w, tg)),
                                              (v, (base_v, g)), val)
                elif (eps_le(v, i) == eps_le(w, i)
                      and norm(eps_sub(eps_gt(w, i), eps_gt(v, i))) == 1):
                    base = eps_le(v, i)
                    for g in h.gens[base]:
                        mat.add_entry((w, (base, g)), (v, (base, g)), ring.one())
            if not mat.is_zero():
                maps[e] = mat
        return Hyperbox(ring, (1,) * n, gens, maps, grading)

    def f_i(i, src_box: Hyperbox, tgt_box: Hyperbox) -> HyperboxChainMap:
        comps = {}
        for e in unit_eps(n):
            mat = RingMatrix(ring)
            for v in unit_eps(n):
                w = eps_add(v, e)
                if any(x > 1 for x in w):
                    continue
                if v[i - 1] == 1 and eps_gt(v, i) == eps_gt(w, i):
                    de = eps_sub(eps_le(w, i), eps_le(v, i - 1))
                    if any(x < 0 for x in de):
                        continue
                    sub = h.direction(de)
                    bv, bw = eps_le(v, i - 1), eps_le(w, i)
                    for g in h.gens[bv]:
                        for (tv, tg), val in sub.column((bv, g)).items():
                            if tv == bw:
                                mat.add_entry((w, (bw, tg)), (v, (bv, g)), val)
                elif v == w and v[i - 1] == 0:
                    base = eps_le(v, i - 1)  # = eps_le(v, i) since v_i = 0
                    for g in h.gens[base]:
                        mat.add_entry((v, (base, g)), (v, (base, g)), ring.one())
            if not mat.is_zero():
                comps[e] = mat
        return HyperboxChainMap(src_box, tgt_box, comps)

    boxes = [h_i(i) for i in range(n + 1)]
    if n == 0:
        return identity_chain_map(h)
    total = f_i(1, boxes[0], boxes[1])
    for i in range(2, n + 1):
        total = f_i(i, boxes[i - 1], boxes[i]).compose(total)
    # reattach to h itself: H[n] has keys (v, (v, g)) matching h's (v, g)
    comps = {}
    for e, mat in total.components.items():
        out = RingMatrix(ring)
        for (tv, (tb, tg)), (sv, sg), val in ((t, s, v) for t, s, v in mat.entries()):
            out.add_entry((tv, tg), (sv, sg), val)
        comps[e] = out
    return HyperboxChainMap(boxes[0], h, comps)


def tensor_string_hyperbox(ring, strings):
    """Tensor product of 1-dimensional strings of chain maps.

    strings: list over axes; each axis is (complex_list, map_list) where
    complex_list[i] = (gens, diff RingMatrix, grading|None) and map_list[i]
    is a RingMatrix complex_list[i] -> complex_list[i+1].  Higher diagonals
    are zero because products of chain maps commute strictly.
    """
    n = len(strings)
    size = tuple(len(cxs) - 1 for cxs, _m in strings)
    gens = {}
    grading = {}
    any_graded = all(all(c[2] is not None for c in cxs) for cxs, _ in strings)
    for v in box_points(size):
        names = [()]
        for i in range(n):
            cg = strings[i][0][v[i]][0]
            names = [t + (g,) for t in names for g in cg]
        gens[v] = names
        if any_graded:
            for t in names:
                grading[(v, t)] = sum(strings[i][0][v[i]][2][t[i]]
                                      for i in range(n))
    maps = {}
    zero_e = (0,) * n
    internal = RingMatrix(ring)
    for v in box_points(size):
        for i in range(n):
            diff = strings[i][0][v[i]][1]
            for t in gens[v]:
                for tgt, val in diff.column(t[i]).items():
                    tt = t[:i] + (tgt,) + t[i + 1:]
                    internal.add_entry((v, tt), (v, t), val)
    if not internal.is_zero():
        maps[zero_e] = internal
    for i in range(n):
        tau = tuple(1 if j == i else 0 for j in range(n))
        mat = RingMatrix(ring)
        for v in box_points(size):
            if v[i] == size[i]:
                continue
            w = eps_add(v, tau)
            fmap = strings[i][1][v[i]]
            for t in gens[v]:
                for tgt, val in fmap.column(t[i]).items():
                    tt = t[:i] + (tgt,) + t[i + 1:]
                    mat.add_entry((w, tt), (v, t), val)
        if not mat.is_zero():
            maps[tau] = mat
    return Hyperbox(ring, size, gens, maps, grading if any_graded else None)


def perturb_hyperbox(h: Hyperbox, perturbations) -> Hyperbox:
    """Conjugate the total differential by (I + H) for H strictly increasing
    eps -- the result satisfies (eq:d2) automatically.

    perturbations: {eps (nonzero 0/1 vector): RingMatrix on global keys}.
    """
    ring = h.ring
    keys = h.global_keys()
    ident = RingMatrix.identity(ring, keys)
    hmat = RingMatrix(ring)
    for e, mat in perturbations.items():
        if norm(e) == 0:
            raise HyperboxError("perturbation must strictly increase eps")
        for tgt, src, val in mat.entries():
            if eps_add(src[0], tuple(e)) != tgt[0]:
                raise HyperboxError("perturbation entry direction mismatch")
            hmat.add_entry(tgt, src, val)
    # (I+H)^-1 = I + H + H^2 + ... (H nilpotent: strictly raises ||eps||)
    inv = ident
    powh = hmat
    for _ in range(sum(h.size) + 1):
        if powh.is_zero():
            break
        inv = inv + powh
        powh = powh.compose(hmat)
    big = RingMatrix(ring)
    for e in unit_eps(h.n):
        for tgt, src, val in h.direction(e).entries():
            big.add_entry(tgt, src, val)
    conj = (ident + hmat).compose(big).compose(inv)
    maps = {}
    for tgt, src, val in conj.entries():
        e = eps_sub(tgt[0], src[0])
        if any(x < 0 or x > 1 for x in e):
            raise HyperboxError("conjugated differential left the 0/1 window")
        maps.setdefault(e, RingMatrix(ring)).add_entry(tgt, src, val)
    return Hyperbox(ring, h.size, h.gens, maps, h.grading)
