"""U-tower inference from rank profiles across truncation orders.

A complex whose homology is a sum of towers F[U]/U^k (k in {1,2,...} or
infinity) has flattened rank(delta) = factor * sum_j min(k_j, delta) for a
caller-declared ambient factor.  Towers still growing at the largest
provided delta are reported as "length >= D".
"""

from __future__ import annotations

from dataclasses import dataclass, field


class TowerError(ValueError):
    pass


@dataclass(frozen=True)
class TowerProfile:
    """Multiset of tower lengths: finite ones plus a count of '>= depth'."""

    finite: tuple = ()          # sorted tuple of finite lengths
    at_least: int = 0           # number of towers of length >= depth
    depth: int = 0              # the D up to which ranks were observed
    factor: int = 1

    def num_towers(self) -> int:
        return len(self.finite) + self.at_least

    def predicted_rank(self, delta: int) -> int:
        if delta > self.depth and self.at_least:
            raise TowerError("prediction beyond observed depth with open towers")
        s = sum(min(k, delta) for k in self.finite)
        s += self.at_least * min(delta, self.depth)
        return self.factor * s

    def all_finite(self) -> bool:
        return self.at_least == 0

    def describe(self) -> str:
        parts = [str(k) for k in self.finite]
        parts += [f">={self.depth}"] * self.at_least
        return "[" + ", ".join(parts) + "]"


def infer_towers(ranks, factor: int = 1) -> TowerProfile:
    """Fit rank(delta) = factor * sum min(k_j, delta) for delta = 1..D.

    ranks: sequence of ranks for consecutive delta = 1..D, or a dict
    {delta: rank} covering that range.
    """
    if isinstance(ranks, dict):
        depth = max(ranks)
        if sorted(ranks) != list(range(1, depth + 1)):
            raise TowerError("ranks must cover consecutive delta = 1..D")
        seq = [ranks[d] for d in range(1, depth + 1)]
    else:
        seq = list(ranks)
        depth = len(seq)
    if depth == 0:
        raise TowerError("empty rank profile")
    if factor < 1:
        raise TowerError("factor must be >= 1")
    m = []
    for d, r in enumerate(seq, start=1):
        if r % factor:
            raise TowerError(f"rank {r} at delta={d} not divisible by factor {factor}")
        m.append(r // factor)
    growth = [m[0]] + [m[i] - m[i - 1] for i in range(1, depth)]
    # growth[d-1] = #towers of length >= d; must be nonincreasing and >= 0
    for i in range(depth):
        if growth[i] < 0 or (i and growth[i] > growth[i - 1]):
            raise TowerError(
                f"no tower multiset fits rank profile {seq} at factor {factor}")
    finite = []
    for d in range(1, depth):
        finite += [d] * (growth[d - 1] - growth[d])
    return TowerProfile(finite=tuple(finite), at_least=growth[depth - 1],
                        depth=depth, factor=factor)


def ranks_stabilized(ranks) -> bool:
    """rank(delta+1) = rank(delta) certifies all towers finite (Lemma ntors)."""
    seq = list(ranks)
    return len(seq) >= 2 and seq[-1] == seq[-2]
