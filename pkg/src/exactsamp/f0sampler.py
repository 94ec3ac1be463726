"""Truly perfect support (F0) sampling, plus the Tukey sampler built on it.

One instance fixes a random subset S of [n] of size 2*ceil(sqrt(n)) before
the stream, tracks T = the first ceil(sqrt(n)) distinct coordinates (most
recent distinct ones in sliding-window mode) and U = the S-members that
actually appear.  If fewer than ceil(sqrt(n)) distinct coordinates showed up,
T is the whole support and the draw is uniform over it; otherwise the draw is
uniform over U, failing when U is empty.  Either branch is exactly uniform
over the support, and the sampled frequency f_i is reported with the index.

The Tukey sampler accepts an F0 draw (i, f_i) with probability G(f_i)/G(tau),
turning uniform-over-support into G(f_i)/F_G exactly.
"""

import math
from collections import OrderedDict
from fractions import Fraction

from .core import SampleResult
from .exactrand import bernoulli_fraction, substream


class F0State:
    def __init__(self, n, seed, window=None):
        self.n = n
        self.seed = seed
        self.window = window
        self.cap = math.isqrt(n) + (0 if math.isqrt(n) ** 2 == n else 1)
        rng = substream(seed, "subset")
        self.S = frozenset(rng.sample(range(1, n + 1), min(2 * self.cap, n)))
        self.T = OrderedDict()  # coord -> last-seen time (insertion/LRU order)
        self.t = 0
        # Window bookkeeping: ring of recent updates + active frequency map.
        self._ring = [] if window is not None else None
        self._freq = {}

    def update(self, coord, time=None):
        self.t += 1
        t = self.t
        self._freq[coord] = self._freq.get(coord, 0) + 1
        if self.window is not None:
            self._ring.append(coord)
            if len(self._ring) > self.window:
                old = self._ring.pop(0)
                left = self._freq[old] - 1
                if left:
                    self._freq[old] = left
                else:
                    del self._freq[old]
                    self.T.pop(old, None)
            if coord in self.T:
                self.T.move_to_end(coord)
                self.T[coord] = t
            else:
                self.T[coord] = t
                if len(self.T) > self.cap:
                    self.T.popitem(last=False)
        else:
            if coord not in self.T and len(self.T) < self.cap:
                self.T[coord] = t

    def active_frequencies(self):
        return dict(self._freq)

    def draw(self, rng):
        freq = self._freq
        if not freq:
            return SampleResult.bottom()
        if self.window is not None:
            small = len(freq) < self.cap
        else:
            small = len(self.T) < self.cap  # then T is the whole support
        if small:
            # Small support: uniform over the (active) support.
            support = sorted(freq)
            i = support[rng.randrange(len(support))]
            return SampleResult.of(i, frequency=freq[i])
        members = sorted(c for c in freq if c in self.S)
        if not members:
            return SampleResult.fail()
        i = members[rng.randrange(len(members))]
        return SampleResult.of(i, frequency=freq[i])


class F0Sampler:
    """delta-boosted F0 sampler: R independent instances, first success wins
    a uniform pick among successes."""

    def __init__(self, n, delta=0.1, seed=0, window=None, repetitions=None):
        if repetitions is None:
            repetitions = max(1, math.ceil(2 * math.log(1.0 / delta)))
        self.R = repetitions
        self.seed = seed
        self.states = [F0State(n, substream(seed, "rep", i).getrandbits(64), window)
                       for i in range(self.R)]

    def update(self, coord):
        for st in self.states:
            st.update(coord)

    def process(self, updates):
        for u in updates:
            self.update(u.coord if hasattr(u, "coord") else u)

    def draw(self):
        rng = substream(self.seed, "draw")
        results = [st.draw(rng) for st in self.states]
        hits = [r for r in results if r.outcome == "index"]
        if hits:
            return hits[rng.randrange(len(hits))]
        if all(r.outcome == "bottom" for r in results):
            return SampleResult.bottom()
        return SampleResult.fail()


class TukeySampler:
    """F0 draws filtered through the Tukey acceptance G(f_i)/G(tau)."""

    def __init__(self, measure, n, delta=0.1, seed=0, window=None, repetitions=None):
        self.measure = measure
        self.seed = seed
        if repetitions is None:
            g1 = measure.g_exact(1)
            gtau = measure.tau * measure.tau / 6  # the saturation value G(tau)
            boost = float(gtau / g1)
            repetitions = max(1, math.ceil(4 * boost * math.log(1.0 / delta)))
        self.R = repetitions
        self.states = [F0State(n, substream(seed, "rep", i).getrandbits(64), window)
                       for i in range(self.R)]

    def update(self, coord):
        for st in self.states:
            st.update(coord)

    def process(self, updates):
        for u in updates:
            self.update(u.coord if hasattr(u, "coord") else u)

    def draw(self):
        rng = substream(self.seed, "draw")
        g_cap = self.measure.tau * self.measure.tau / 6
        accepted = []
        saw_nonempty = False
        for st in self.states:
            res = st.draw(rng)
            if res.outcome == "bottom":
                continue
            saw_nonempty = True
            if res.outcome != "index":
                continue
            q = Fraction(self.measure.g_exact(res.frequency)) / g_cap
            if bernoulli_fraction(q, rng):
                accepted.append(res)
        if accepted:
            return accepted[rng.randrange(len(accepted))]
        return SampleResult.fail() if saw_nonempty else SampleResult.bottom()
