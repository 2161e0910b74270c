"""
Index-exact eigenvalue enclosure lists and the interlacing merge.

Entry i of an EnclosureList contains the i-th eigenvalue (ascending, with
multiplicity) of its operator, and every eigenvalue with index >= len(entries)
is at least `ceiling`. Upper ends may be infinite on rough lists.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

from src.core.errors import DomainError
from src.ival.interval import Interval


@dataclass(frozen=True)
class EnclosureList:
    entries: Tuple[Interval, ...] = ()
    ceiling: float = math.inf
    anchors: Tuple[Interval, ...] = ()

    @classmethod
    def build(cls, entries: Sequence[Interval], ceiling: float, anchors: Sequence[Interval] = ()) -> "EnclosureList":
        return cls(tuple(entries), float(ceiling), tuple(anchors)).normalized()

    @classmethod
    def empty(cls, ceiling: float = math.inf) -> "EnclosureList":
        return cls((), float(ceiling))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> Interval:
        return self.entries[i]

    @property
    def disjoint(self) -> bool:
        return all(a.hi < b.lo for a, b in zip(self.entries, self.entries[1:]))

    @property
    def bounded(self) -> bool:
        return all(e.is_bounded for e in self.entries)

    @property
    def max_width(self) -> float:
        return max((e.width for e in self.entries), default=0.0)

    def normalized(self) -> "EnclosureList":
        """Sortedness of the eigenvalues lifts lower ends and lowers upper ends"""
        if not self.entries:
            return self
        lows = [e.lo for e in self.entries]
        highs = [e.hi for e in self.entries]
        for j in range(1, len(lows)):
            lows[j] = max(lows[j], lows[j - 1])
        for j in range(len(highs) - 2, -1, -1):
            highs[j] = min(highs[j], highs[j + 1])
        if any(lo > hi for lo, hi in zip(lows, highs)):
            raise DomainError("inconsistent enclosures: lower end above upper end")
        entries = tuple(Interval(lo, hi) for lo, hi in zip(lows, highs))
        return EnclosureList(entries, self.ceiling, self.anchors)

    def refine(self, lower: Sequence[float], upper: Sequence[float]) -> "EnclosureList":
        """Intersect entrywise with new bounds (None keeps the old bound)"""
        entries = []
        for i, e in enumerate(self.entries):
            lo = e.lo if i >= len(lower) or lower[i] is None else max(e.lo, lower[i])
            hi = e.hi if i >= len(upper) or upper[i] is None else min(e.hi, upper[i])
            if lo > hi:
                raise DomainError("refined bounds do not overlap the previous enclosure", index=i, lo=lo, hi=hi)
            entries.append(Interval(lo, hi))
        return EnclosureList(tuple(entries), self.ceiling, self.anchors).normalized()

    def below(self, threshold: float) -> "EnclosureList":
        """Keep entries whose lower end lies below threshold"""
        keep = 0
        while keep < len(self.entries) and self.entries[keep].lo < threshold:
            keep += 1
        if keep == len(self.entries):
            return self
        ceiling = min(self.ceiling, self.entries[keep].lo)
        return EnclosureList(self.entries[:keep], ceiling, self.anchors)

    def certified_below(self, threshold: float) -> "EnclosureList":
        """Entries known to lie entirely below threshold; ceiling stays a valid bound"""
        keep = 0
        while keep < len(self.entries) and self.entries[keep].hi < threshold:
            keep += 1
        ceiling = self.ceiling if keep == len(self.entries) else min(self.ceiling, self.entries[keep].lo)
        return EnclosureList(self.entries[:keep], ceiling, self.anchors)

    def narrow_prefix(self, tol: float) -> "EnclosureList":
        """Longest leading run of bounded entries no wider than tol"""
        keep = 0
        while keep < len(self.entries) and self.entries[keep].is_bounded and self.entries[keep].width <= tol:
            keep += 1
        if keep == len(self.entries):
            return self
        return EnclosureList(self.entries[:keep], min(self.ceiling, self.entries[keep].lo), self.anchors)

    def truncated(self, count: int) -> "EnclosureList":
        if count >= len(self.entries):
            return self
        return EnclosureList(self.entries[:count], min(self.ceiling, self.entries[count].lo), self.anchors)

    def overlapping_pair(self):
        for i, (a, b) in enumerate(zip(self.entries, self.entries[1:])):
            if not a.hi < b.lo:
                return i, i + 1
        return None

    def contains_all(self, values: Sequence[float]) -> bool:
        return len(values) <= len(self.entries) and all(self.entries[i].contains(v) for i, v in enumerate(values))


def merge(left: EnclosureList, right: EnclosureList) -> EnclosureList:
    """Enclosures of the spectrum of a direct sum"""
    ceiling = min(left.ceiling, right.ceiling)
    lows = sorted([e.lo for e in left.entries] + [e.lo for e in right.entries])
    highs = sorted([e.hi for e in left.entries] + [e.hi for e in right.entries])
    count = 0
    while count < len(highs) and highs[count] < ceiling:
        count += 1
    merged_ceiling = ceiling if count == len(lows) else min(ceiling, lows[count])
    entries = tuple(Interval(lows[k], highs[k]) for k in range(count))
    return EnclosureList(entries, merged_ceiling)


def merge_interlace(left: EnclosureList, right: EnclosureList) -> EnclosureList:
    """
    Rough enclosures of the joined operator from its decoupled pieces:
    sigma_i <= nu_i <= sigma_{i+1}. The last entry has no upper bound; the
    merged sigma list is kept as `anchors`.
    """
    sigma = merge(left, right)
    n = len(sigma)
    entries = []
    for i in range(n):
        upper = sigma.entries[i + 1].hi if i + 1 < n else math.inf
        entries.append(Interval(sigma.entries[i].lo, upper))
    return EnclosureList(tuple(entries), sigma.ceiling, sigma.entries)


@dataclass(frozen=True)
class Schedule:
    """Ceilings E_n = E + n (E' - E) / N for the levels of the decoupling tree"""

    E: float
    E_prime: float
    N: int
    levels: Tuple[float, ...] = field(default=())

    @classmethod
    def build(cls, E: float, N: int, E_prime: float = None) -> "Schedule":
        E_prime = 9.0 * E / 8.0 if E_prime is None else E_prime
        if not E < E_prime:
            raise DomainError("schedule needs E < E'", E=E, E_prime=E_prime)
        e, ep = Fraction(E), Fraction(E_prime)
        if N == 0:
            levels = (float(e), float(ep))
        else:
            levels = tuple(float(e + n * (ep - e) / N) for n in range(N + 2))
        return cls(float(E), float(E_prime), N, levels)

    def at(self, depth: int) -> float:
        return self.levels[depth]

    @property
    def crude_ceiling(self) -> float:
        """E_{N+1}, the ceiling the leaf crude enclosures are computed at"""
        return self.levels[-1]


def interlaces(outer: EnclosureList, inner: EnclosureList) -> bool:
    """
    Endpoint check of outer_i <= inner_i <= outer_{i+1} where outer belongs to
    the larger form domain; entries without a partner are not checked.
    """
    for i, mu in enumerate(inner):
        if i >= len(outer):
            break
        if outer[i].lo > mu.hi:
            return False
        if i + 1 < len(outer) and mu.lo > outer[i + 1].hi:
            return False
    return True
