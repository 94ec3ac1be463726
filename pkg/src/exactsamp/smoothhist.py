"""Smooth histogram of suffix F_p estimators for sliding windows.

Rows are timestamped suffix estimators; row j has ingested exactly the
updates from time t_j to now.  Middle rows are pruned once the next-but-one
row's value reaches (1 - beta) of the previous one, with beta = (1/2)^p / p^p
(the smoothness parameter for F_p at epsilon = 1/2); the front row is dropped
when the second row already covers the window.  The invariant that survives
is t_1 <= window start < t_2, with F_p(suffix 1) <= 2^p * F_p(window), i.e.
L_p(window) <= L_p(suffix 1) <= 2 L_p(window).

The suffix estimator is exact by default (frequency counts; deterministic and
strictly inside the factor-2 contract).  A randomized AMS backend for p = 2
exists behind the same interface to exercise the degraded-estimate path.
"""

import math
from fractions import Fraction

from .exactrand import pow_bounds, pow_exact, substream


class DegradedEstimate(Exception):
    """The internal estimator cannot certify its output; callers turn this
    into a Fail outcome."""


class ExactSuffixFp:
    """Exact F_p = sum_i f_i^p of everything ingested."""

    randomized = False

    def __init__(self, p, seed=0):
        self.p = Fraction(p)
        self.int_p = self.p.denominator == 1
        self.counts = {}
        self._fp_int = 0  # exact, integer p only
        self._fp_float = 0.0

    def update(self, coord):
        f = self.counts.get(coord, 0)
        self.counts[coord] = f + 1
        pf = float(self.p)
        self._fp_float += (f + 1) ** pf - f ** pf
        if self.int_p:
            k = int(self.p)
            self._fp_int += (f + 1) ** k - f ** k

    def fp_float(self):
        return self._fp_float

    def fp_exact(self):
        return Fraction(self._fp_int) if self.int_p else None

    def fp_bounds(self, prec):
        if self.int_p:
            v = Fraction(self._fp_int)
            return v, v
        # Sum certified bounds per distinct frequency value.
        by_f = {}
        for f in self.counts.values():
            by_f[f] = by_f.get(f, 0) + 1
        lo = hi = Fraction(0)
        for f, mult in by_f.items():
            blo, bhi = pow_bounds(Fraction(f), self.p, prec)
            lo += mult * blo
            hi += mult * bhi
        return lo, hi

    def max_frequency(self):
        return max(self.counts.values(), default=0)


class AmsSuffixF2:
    """Random-sign F2 sketch, median of means, p = 2 only."""

    randomized = True

    def __init__(self, p, seed=0, groups=5, per_group=8):
        if Fraction(p) != 2:
            raise ValueError("AMS backend handles p = 2 only")
        self.p = Fraction(2)
        self.seed = seed
        self.groups = groups
        self.per_group = per_group
        self.acc = [[0] * per_group for _ in range(groups)]
        self._signs = {}

    def _sign_row(self, coord):
        row = self._signs.get(coord)
        if row is None:
            rng = substream(self.seed, "sign", coord)
            row = [[1 if rng.getrandbits(1) else -1 for _ in range(self.per_group)]
                   for _ in range(self.groups)]
            self._signs[coord] = row
        return row

    def update(self, coord):
        signs = self._sign_row(coord)
        for g in range(self.groups):
            acc = self.acc[g]
            srow = signs[g]
            for j in range(self.per_group):
                acc[j] += srow[j]

    def fp_float(self):
        means = [sum(x * x for x in row) / self.per_group for row in self.acc]
        means.sort()
        est = means[len(means) // 2]
        if est <= 0:
            raise DegradedEstimate("AMS estimate collapsed to zero")
        return est

    def fp_exact(self):
        return None

    def fp_bounds(self, prec):
        # Randomized: no certified bounds; report the point estimate and let
        # the caller treat it as exact (degraded-path semantics).
        v = Fraction(self.fp_float()).limit_denominator(1 << 30)
        return v, v

    def max_frequency(self):
        raise DegradedEstimate("AMS backend cannot certify a max frequency")


class _Row:
    __slots__ = ("t_start", "est", "payload")

    def __init__(self, t_start, est, payload):
        self.t_start = t_start
        self.est = est
        self.payload = payload


class SmoothHistogram:
    def __init__(self, p, W, seed=0, beta=None, payload_factory=None,
                 estimator_factory=None):
        self.p = Fraction(p)
        self.W = W
        self.seed = seed
        pf = float(self.p)
        self.beta = beta if beta is not None else (0.5 ** pf) / (pf ** pf)
        self.payload_factory = payload_factory
        self.estimator_factory = estimator_factory or ExactSuffixFp
        self.rows = []
        self.t = 0

    def update(self, coord):
        self.t += 1
        t = self.t
        est = self.estimator_factory(self.p, substream(self.seed, "est", t).getrandbits(64))
        payload = self.payload_factory(t) if self.payload_factory else None
        self.rows.append(_Row(t, est, payload))
        for row in self.rows:
            row.est.update(coord)
            if row.payload is not None:
                row.payload.update(coord, t)
        self._prune()

    def _prune(self):
        rows = self.rows
        changed = True
        while changed:
            changed = False
            i = 1
            while i < len(rows) - 1:
                if rows[i + 1].est.fp_float() >= (1.0 - self.beta) * rows[i - 1].est.fp_float():
                    del rows[i]
                    changed = True
                else:
                    i += 1
        ws = self.t - self.W + 1
        while len(rows) >= 2 and rows[1].t_start <= ws:
            del rows[0]

    def bracket(self):
        """The row whose suffix contains the active window."""
        if not self.rows:
            raise ValueError("empty histogram")
        return self.rows[0]


def estimate_lp(hist, p=None):
    """Window L_p estimate F with F <= L_p(window) <= 2F (float convenience)."""
    p = float(p if p is not None else hist.p)
    fp = hist.bracket().est.fp_float()
    return 0.5 * fp ** (1.0 / p)
