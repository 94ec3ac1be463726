"""Sliding-window truly perfect samplers.

CheckpointedSampler: a fresh SamplerBank starts every W updates and the two
most recent banks are kept, so at any time the older live bank started at or
before the window start and within 2W of it.  A repetition succeeds only if
its reservoir sample is still active (t_s > t - W); conditioned on success
the law telescopes to G(f_i)/F_G over the active window.

SlidingLpSampler: the augmented histogram pairs each suffix F_p estimator
row with a SamplerBank over the same suffix.  A draw uses the bracketing
row's bank with acceptance ((c+1)^p - c^p)/(p F^{p-1}), F = L_p of that
suffix, which the histogram invariant places in [L_p(window), 2 L_p(window)].
"""

import math
from fractions import Fraction

from .core import SampleResult
from .exactrand import bernoulli_bounds, bernoulli_fraction, pow_bounds, pow_exact, substream
from .gsampler import accept_increment, repetitions_for
from .reservoir import SamplerBank
from .smoothhist import DegradedEstimate, SmoothHistogram


def active_bank_start(t, W):
    """Start time of the checkpoint bank a draw at time t must use."""
    starts = range(1, t + 1, W)
    ws = t - W + 1
    best = 1
    for s in starts:
        if s <= ws:
            best = s
    return best


class CheckpointedSampler:
    def __init__(self, measure, W, n=None, delta=0.1, seed=0, zeta=None,
                 repetitions=None):
        self.measure = measure
        self.W = W
        self.seed = seed
        self.zeta = Fraction(zeta) if zeta is not None else measure.zeta
        if self.zeta is None:
            raise ValueError("checkpointed sampler needs a static zeta")
        if repetitions is None:
            fg = measure.fg_lower_bound(W)
            if fg <= 0:
                raise ValueError("zero F_G lower bound")
            # Doubled: the bank's substream is < 2W long, so the sample is
            # active with probability >= 1/2.
            repetitions = repetitions_for(2 * self.zeta * W / fg, delta)
        self.R = repetitions
        self.t = 0
        self.banks = []  # (start_time, SamplerBank), two most recent

    def update(self, coord):
        self.t += 1
        t = self.t
        if (t - 1) % self.W == 0:
            seed = substream(self.seed, "bank", t).getrandbits(64)
            self.banks.append((t, SamplerBank(self.R, seed, start_time=t)))
            if len(self.banks) > 2:
                self.banks.pop(0)
        for _, bank in self.banks:
            bank.update(coord, t)

    def process(self, updates):
        for u in updates:
            self.update(u.coord if hasattr(u, "coord") else u)

    def _draw_bank(self):
        want = active_bank_start(self.t, self.W)
        for start, bank in self.banks:
            if start == want:
                return bank
        return self.banks[0][1]

    def draw(self):
        if self.t == 0:
            return SampleResult.bottom()
        bank = self._draw_bank()
        rng = substream(self.seed, "draw")
        cutoff = self.t - self.W
        accepted = []
        for i in range(self.R):
            s, t_s, c = bank.effective(i)
            if s is None or t_s <= cutoff:
                continue
            if accept_increment(self.measure, c, self.zeta, None, rng):
                accepted.append((i, s))
        if not accepted:
            return SampleResult.fail()
        rep, s = accepted[rng.randrange(len(accepted))]
        return SampleResult.of(s, repetition=rep)


class SlidingLpSampler:
    def __init__(self, p, W, n=None, delta=0.1, seed=0, repetitions=None,
                 estimator_factory=None):
        self.p = Fraction(p)
        if self.p < 1:
            raise ValueError("sliding L_p sampling needs p >= 1")
        self.W = W
        self.seed = seed
        if repetitions is None:
            pf = float(self.p)
            bound = pf * 2.0 ** (pf - 1.0) * W ** (1.0 - 1.0 / pf)
            repetitions = repetitions_for(2 * bound, delta)
        self.R = repetitions

        def make_bank(t_start):
            seed = substream(self.seed, "bank", t_start).getrandbits(64)
            return SamplerBank(self.R, seed, start_time=t_start)

        self.hist = SmoothHistogram(self.p, W, seed=seed,
                                    payload_factory=make_bank,
                                    estimator_factory=estimator_factory)

    def update(self, coord):
        self.hist.update(coord)

    def process(self, updates):
        for u in updates:
            self.update(u.coord if hasattr(u, "coord") else u)

    def _acceptance(self, c, est, rng):
        """Accept with probability ((c+1)^p - c^p) / (p * F^{p-1}),
        F = L_p of the bracketing suffix = (F_p)^{1/p}."""
        p = self.p
        num = pow_exact(Fraction(c + 1), p)
        fp = est.fp_exact()
        if num is not None and fp is not None:
            den_pow = pow_exact(fp, (p - 1) / p)
            if den_pow is not None:
                prob = (num - pow_exact(Fraction(c), p)) / (p * den_pow)
                if prob > 1:
                    raise DegradedEstimate("acceptance above 1: F below L_p")
                return bernoulli_fraction(prob, rng)

        def refine(prec):
            nlo, nhi = pow_bounds(Fraction(c + 1), p, prec)
            clo, chi = pow_bounds(Fraction(c), p, prec)
            flo, fhi = est.fp_bounds(prec)
            dlo = p * pow_bounds(flo, (p - 1) / p, prec)[0]
            dhi = p * pow_bounds(fhi, (p - 1) / p, prec)[1]
            lo = nlo - chi
            if lo < 0:
                lo = Fraction(0)
            if dlo <= 0:
                raise DegradedEstimate("nonpositive F estimate")
            return lo / dhi, (nhi - clo) / dlo

        lo, hi = refine(16)
        if lo > 1:
            raise DegradedEstimate("acceptance above 1: F below L_p")
        return bernoulli_bounds(refine, rng)

    def draw(self):
        t = self.hist.t
        if t == 0:
            return SampleResult.bottom()
        row = self.hist.bracket()
        bank = row.payload
        est = row.est
        rng = substream(self.seed, "draw")
        cutoff = t - self.W
        accepted = []
        try:
            for i in range(self.R):
                s, t_s, c = bank.effective(i)
                if s is None or t_s <= cutoff:
                    continue
                if self._acceptance(c, est, rng):
                    accepted.append((i, s))
        except DegradedEstimate:
            return SampleResult.fail()
        if not accepted:
            return SampleResult.fail()
        rep, s = accepted[rng.randrange(len(accepted))]
        return SampleResult.of(s, repetition=rep)
