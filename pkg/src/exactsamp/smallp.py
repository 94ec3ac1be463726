"""Perfect (not truly perfect) L_p sampler for p < 1 on insertion-only
streams, via exponential scaling plus Misra-Gries.

Every coordinate i is split into D duplicates; duplicate (i, j) owns a rate-1
exponential e_{i,j} fixed for the run.  Each update of i inserts
round(P / e_{i,j}^{1/p}) unit items of key (i, j) into a derived stream
(P = 2^20 scales the fractional multiplicities to integers), so key (i, j)
carries total weight ~ P * (f_i / e_{i,j})^{... } -- precisely, f_i scaled by
e_{i,j}^{-1/p}.  By min-stability of exponentials the largest scaled key
belongs to coordinate i with probability f_i^p / F_p, and with constant
probability it dominates the rest of the derived stream, in which case an
eps = 1/100 Misra-Gries summary sees a majority key and reports it.  The
duplication cuts the additive error to O(D^-beta); D is an explicit
parameter here (a polynomial-in-n default would be far too slow to test).
"""

import math

import numpy as np

from .core import SampleResult
from .exactrand import np_substream
from .heavyhitters import MGSummary

PRECISION = 1 << 20
MG_EPSILON = 0.01  # k = 1/(2 eps) = 50 counters


class DuplicatedExpState:
    def __init__(self, p, D=256, seed=0):
        if not (0 < p < 1):
            raise ValueError("this sampler is for p in (0, 1)")
        if D < 16:
            raise ValueError("duplication factor D must be >= 16")
        self.p = float(p)
        self.D = D
        self.seed = seed
        self.mg = MGSummary(int(1 / (2 * MG_EPSILON)))
        self._weights = {}  # coord -> integer weight per duplicate (array)

    def _dup_weights(self, coord):
        w = self._weights.get(coord)
        if w is None:
            rng = np_substream(self.seed, "exp", coord)
            e = rng.exponential(1.0, size=self.D)
            scaled = PRECISION / e ** (1.0 / self.p)
            # Tiny exponentials can push the scaled weight past float range;
            # cap instead of overflowing (the capped key dominates anyway).
            scaled = np.minimum(scaled, 1e300)
            w = [int(round(x)) for x in scaled]
            self._weights[coord] = w
        return w

    def update(self, coord):
        w = self._dup_weights(coord)
        mg = self.mg
        for j in range(self.D):
            wj = w[j]
            if wj > 0:
                mg.update((coord, j), wj)

    def process(self, updates):
        for u in updates:
            self.update(u.coord if hasattr(u, "coord") else u)

    def draw(self):
        if self.mg.m_seen == 0:
            return SampleResult.bottom()
        half = self.mg.m_seen / 2
        for (coord, _j), est in self.mg.items().items():
            if est >= half:
                return SampleResult.of(coord)
        return SampleResult.fail()


def smallp_draw(state):
    return state.draw()
