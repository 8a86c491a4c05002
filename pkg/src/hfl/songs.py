"""The algebra of songs, the psi derivation, standard symphonies, and
playing songs to hypercubical collections.

A song is an ordered list of items; an item is a note (a letter) or a
harmony (a subset of letters, possibly empty).  Sums of songs live in the
free F2-algebra on songs; no quotient normal form is taken (all downstream
uses factor through playing, which is well defined on the quotient).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from .coeff.ring import RingMatrix


class SongError(ValueError):
    pass


class Note(tuple):
    """A note, tagged tuple ('n', letter)."""
    __slots__ = ()

    def __new__(cls, letter):
        return super().__new__(cls, ("n", letter))

    @property
    def letter(self):
        return self[1]


class Harmony(tuple):
    """A harmony, tagged tuple ('h', sorted letters)."""
    __slots__ = ()

    def __new__(cls, letters):
        return super().__new__(cls, ("h", tuple(sorted(set(letters)))))

    @property
    def letters(self):
        return self[1]


def note(x) -> Note:
    return Note(x)


def harmony(letters) -> Harmony:
    return Harmony(letters)


def song(*items) -> tuple:
    """A song from items: letters become notes, iterables become harmonies."""
    out = []
    for it in items:
        if isinstance(it, (Note, Harmony)):
            out.append(it)
        elif isinstance(it, (set, frozenset, list, tuple)):
            out.append(Harmony(it))
        else:
            out.append(Note(it))
    return tuple(out)


def song_letters(s) -> frozenset:
    """All letters appearing in a song (as notes or inside harmonies)."""
    out = set()
    for it in s:
        if it[0] == "n":
            out.add(it[1])
        else:
            out.update(it[1])
    return frozenset(out)


def format_song(s) -> str:
    """Paper notation, e.g. (12{1,2}21)."""
    parts = []
    for it in s:
        if it[0] == "n":
            parts.append(str(it[1]))
        else:
            parts.append("{" + ",".join(str(x) for x in it[1]) + "}")
    return "(" + "".join(parts) + ")"


class SongSum:
    """F2-linear combination of songs over a declared alphabet."""

    __slots__ = ("alphabet", "songs")

    def __init__(self, alphabet, songs=()):
        self.alphabet = frozenset(alphabet)
        songs = frozenset(songs)
        for s in songs:
            bad = song_letters(s) - self.alphabet
            if bad:
                raise SongError(f"letters {sorted(bad)} outside alphabet")
        self.songs = songs

    def __add__(self, other: "SongSum") -> "SongSum":
        return SongSum(self.alphabet | other.alphabet,
                       self.songs ^ other.songs)

    def __mul__(self, other: "SongSum") -> "SongSum":
        acc = set()
        for s1 in self.songs:
            for s2 in other.songs:
                cat = s1 + s2
                if cat in acc:
                    acc.discard(cat)
                else:
                    acc.add(cat)
        return SongSum(self.alphabet | other.alphabet, acc)

    def __eq__(self, other):
        return (isinstance(other, SongSum) and self.songs == other.songs)

    def __hash__(self):
        return hash(self.songs)

    def __len__(self):
        return len(self.songs)

    def __iter__(self):
        return iter(self.songs)

    def __repr__(self):
        if not self.songs:
            return "0"
        return " + ".join(format_song(s) for s in sorted(self.songs))


def _ordered_decompositions(letters):
    """All ordered decompositions of a nonempty set into nonempty parts."""
    letters = tuple(letters)
    if not letters:
        yield ()
        return
    first, rest = letters[0], letters[1:]
    # distribute: first goes into part k of a decomposition of a subset
    for mask in range(1 << len(rest)):
        with_first = [first] + [rest[i] for i in range(len(rest)) if mask >> i & 1]
        remaining = [rest[i] for i in range(len(rest)) if not mask >> i & 1]
        for tail in _ordered_decompositions(remaining):
            # insert the part containing `first` at every position
            for pos in range(len(tail) + 1):
                yield tail[:pos] + (frozenset(with_first),) + tail[pos:]


def _psi_item(item, y):
    """psi_y of a single item, as a set of songs."""
    if item[0] == "n":
        x = item[1]
        return {song(x, y, {x, y}, y, x)}
    letters = item[1]
    if not letters:
        return {song(y)}
    out = set()
    for parts in _ordered_decompositions(letters):
        items = []
        for part in parts:
            items.append(Note(y))
            items.append(Harmony(set(part) | {y}))
        items.append(Note(y))
        out.add(tuple(items))
    return out


def psi_y(s: SongSum, y) -> SongSum:
    """The derivation psi_y, extended linearly; y must be a new letter."""
    if y in s.alphabet:
        raise SongError(f"letter {y!r} already in alphabet")
    acc = set()
    for sng in s.songs:
        for i, item in enumerate(sng):
            prefix, suffix = sng[:i], sng[i + 1:]
            for mid in _psi_item(item, y):
                new = prefix + mid + suffix
                if new in acc:
                    acc.discard(new)
                else:
                    acc.add(new)
    return SongSum(s.alphabet | {y}, acc)


def symphony(letters) -> SongSum:
    """The symphony alpha(X) on a finite totally ordered alphabet."""
    return _symphony(tuple(sorted(set(letters))))


@lru_cache(maxsize=None)
def _symphony(letters: tuple) -> SongSum:
    if not letters:
        return SongSum((), {song(frozenset())})
    rest, top = letters[:-1], letters[-1]
    return psi_y(_symphony(rest), top)


def standard_symphony(n: int) -> SongSum:
    """alpha_n on {1, ..., n}."""
    return symphony(range(1, n + 1))


def song_shape(s):
    """(number of notes, harmony sizes) of a song."""
    k = sum(1 for it in s if it[0] == "n")
    hs = tuple(len(it[1]) for it in s if it[0] == "h")
    return k, hs


class HypercubicalCollection:
    """Elements A_Z of End(free module), one per Z subset of the alphabet,
    satisfying sum_{Z' <= Z} A_{Z'} A_{Z \\ Z'} = 0."""

    def __init__(self, alphabet, elements, basis, ring, check=True):
        self.alphabet = tuple(sorted(set(alphabet)))
        self.elements = {frozenset(z): m for z, m in elements.items()}
        self.basis = list(basis)
        self.ring = ring
        for z in _subsets(self.alphabet):
            if z not in self.elements:
                self.elements[z] = RingMatrix(ring)
        if check:
            bad = self.check_relations()
            if bad is not None:
                raise SongError(
                    f"not a hypercubical collection: relation fails at Z={sorted(bad)}")

    def element(self, z) -> RingMatrix:
        return self.elements[frozenset(z)]

    def check_relations(self):
        """First Z where sum_{Z' <= Z} A_{Z'} A_{Z-Z'} != 0, else None."""
        for z in _subsets(self.alphabet):
            acc = RingMatrix(self.ring)
            for z1 in _subsets(sorted(z)):
                acc = acc + self.element(z1).compose(self.element(z - z1))
            if not acc.is_zero():
                return z
        return None

    def restricted(self, sub) -> "HypercubicalCollection":
        sub = frozenset(sub)
        els = {z: m for z, m in self.elements.items() if z <= sub}
        return HypercubicalCollection(sub, els, self.basis, self.ring,
                                      check=False)


def _subsets(letters):
    letters = tuple(letters)
    for mask in range(1 << len(letters)):
        yield frozenset(letters[i] for i in range(len(letters)) if mask >> i & 1)


def _compositions(total, parts):
    """All tuples of `parts` nonnegative ints summing to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def play_song(sng, coll: HypercubicalCollection, register) -> RingMatrix:
    """Play one song to the collection in the given register (Eq. (eq:big))."""
    register = dict(register)
    letters = song_letters(sng)
    if not letters <= set(coll.alphabet):
        raise SongError("song letters outside the collection's alphabet")
    out = RingMatrix(coll.ring)
    # budget per letter: register minus harmony occurrences
    budget = {}
    for x in register:
        used = sum(1 for it in sng if it[0] == "h" and x in it[1])
        b = register[x] - used
        if b < 0:
            return out
        budget[x] = b
    note_slots = {}
    for i, it in enumerate(sng):
        if it[0] == "n":
            note_slots.setdefault(it[1], []).append(i)
    # notes of letters outside the register play with exponent... every song
    # letter must be in the register
    if not letters <= set(register):
        raise SongError("song uses letters missing from the register")
    per_letter = []
    for x, slots in note_slots.items():
        per_letter.append((x, slots, list(_compositions(budget[x], len(slots)))))
    for x in budget:
        if x not in note_slots and budget[x] != 0:
            return out
    id_mat = RingMatrix.identity(coll.ring, coll.basis)
    power_cache = {}

    def power(x, j):
        key = (x, j)
        if key not in power_cache:
            if j == 0:
                power_cache[key] = id_mat
            else:
                power_cache[key] = coll.element({x}).compose(power(x, j - 1))
        return power_cache[key]

    for choice in product(*(c for _x, _s, c in per_letter)):
        exp = {}
        for (x, slots, _), comp in zip(per_letter, choice):
            for pos, j in zip(slots, comp):
                exp[pos] = (x, j)
        term = None
        for i, it in enumerate(sng):
            if it[0] == "n":
                x, j = exp[i]
                factor = power(x, j)
            else:
                factor = coll.element(it[1])
            term = factor if term is None else term.compose(factor)
        if term is None:
            term = id_mat
        out = out + term
    return out


def play(s: SongSum, coll: HypercubicalCollection, register) -> RingMatrix:
    """Play a sum of songs (linear in the songs)."""
    out = RingMatrix(coll.ring)
    for sng in s.songs:
        out = out + play_song(sng, coll, register)
    return out


def compressed_collection(coll: HypercubicalCollection, register):
    """A^d_Z = play(alpha(Z)) on the restricted collection, for all Z.

    The output satisfies the hypercubical relations (Lemma 3.20); verified.
    """
    register = dict(register)
    out = {}
    for z in _subsets(coll.alphabet):
        sub = coll.restricted(z)
        reg = {x: register[x] for x in z}
        out[z] = play(symphony(z), sub, reg)
    result = HypercubicalCollection(coll.alphabet, out, coll.basis, coll.ring,
                                    check=False)
    bad = result.check_relations()
    if bad is not None:
        raise SongError(
            f"compressed collection violates relations at Z={sorted(bad)}")
    return result
