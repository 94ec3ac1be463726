"""Deterministic Misra-Gries summary and the L_p normalizer bound Z.

The summary keeps at most k counters.  Instead of decrementing every counter
when a new item arrives at a full table, a global offset is incremented;
entries whose stored count falls to the offset are dead and are evicted
lazily via a min-heap, keeping updates O(log k) amortized even for weighted
updates.  Estimates satisfy f_i - m/k <= estimate(i) <= f_i with
probability 1.
"""

import heapq
import math
from fractions import Fraction


class MGSummary:
    __slots__ = ("k", "counts", "offset", "m_seen", "_heap")

    def __init__(self, k):
        if k < 1:
            raise ValueError("counter budget must be >= 1")
        self.k = k
        self.counts = {}  # coord -> offset-shifted count
        self.offset = 0
        self.m_seen = 0
        self._heap = []  # (stored value, coord); may contain stale entries

    def _evict_dead(self):
        counts, heap, off = self.counts, self._heap, self.offset
        while heap:
            v, c = heap[0]
            cur = counts.get(c)
            if cur is None or cur != v:
                heapq.heappop(heap)  # stale
            elif v <= off:
                heapq.heappop(heap)
                del counts[c]
            else:
                break

    def _min_effective(self):
        counts, heap = self.counts, self._heap
        while heap:
            v, c = heap[0]
            if counts.get(c) != v:
                heapq.heappop(heap)
            else:
                return v - self.offset
        return 0

    def update(self, coord, weight=1):
        if weight < 1:
            raise ValueError("weights must be positive integers")
        self.m_seen += weight
        counts = self.counts
        if coord in counts:
            v = counts[coord] + weight
            counts[coord] = v
            heapq.heappush(self._heap, (v, coord))
            return
        if len(counts) < self.k:
            v = self.offset + weight
            counts[coord] = v
            heapq.heappush(self._heap, (v, coord))
            return
        # Table full: play the new weight against the global decrement.
        low = self._min_effective()
        if weight <= low:
            self.offset += weight
        else:
            self.offset += low
            v = self.offset + (weight - low)
            counts[coord] = v
            heapq.heappush(self._heap, (v, coord))
        self._evict_dead()

    def estimate(self, coord):
        v = self.counts.get(coord)
        if v is None:
            return 0
        return max(v - self.offset, 0)

    def items(self):
        off = self.offset
        return {c: v - off for c, v in self.counts.items() if v > off}


def z_bound(summary, p, n):
    """Z with max_i f_i <= Z <= max_i f_i + m/n^{1-1/p}, from a summary built
    with k = ceil(n^{1-1/p}) counters."""
    best = 0
    off = summary.offset
    for v in summary.counts.values():
        if v - off > best:
            best = v - off
    return best + Fraction(summary.m_seen, summary.k)


def mg_budget(p, n):
    """Counter budget k = ceil(n^{1-1/p}) for the Z bound."""
    p = float(p)
    if p < 1:
        raise ValueError("Z bound applies for p >= 1")
    k = math.ceil(n ** (1.0 - 1.0 / p) - 1e-9)
    return max(k, 1)
