"""Truly perfect G-sampler for insertion-only streams.

Each of R repetitions keeps a reservoir sample s with its strictly-after
counter c; at draw time repetition accepts with probability
(G(c+1) - G(c)) / zeta, which telescopes so that index i is output with
probability G(f_i)/(zeta m) per repetition, i.e. exactly G(f_i)/F_G
conditioned on success.  Acceptance draws are exact (rational or
interval-refined), never float comparisons.

For L_p with p in (1,2] the increment bound is zeta = 2 Z^{p-1} with Z the
deterministic Misra-Gries bound on the max frequency; a summary with
k = ceil(n^{1-1/p}) counters rides along with the bank.
"""

import math
from fractions import Fraction

from .core import SampleResult
from .exactrand import bernoulli_bounds, bernoulli_fraction, pow_bounds, pow_exact, substream
from .heavyhitters import MGSummary, mg_budget, z_bound
from .reservoir import SamplerBank

R_SIZING_CONSTANT = 4


def repetitions_for(ratio, delta):
    """ceil(C * ratio * ln(1/delta)) with ratio >= zeta*m/F_G."""
    return max(1, math.ceil(R_SIZING_CONSTANT * float(ratio) * math.log(1.0 / delta)))


def accept_increment(measure, c, zeta_exact, zeta_bounds, rng):
    """Accept with probability exactly (G(c+1) - G(c)) / zeta.

    zeta_exact is a Fraction or None; zeta_bounds(prec) supplies rational
    bounds when zeta is irrational.
    """
    inc = measure.increment_exact(c)
    if inc is not None and zeta_exact is not None:
        return bernoulli_fraction(inc / zeta_exact, rng)

    def refine(prec):
        ilo, ihi = measure.increment_bounds(c, prec)
        if ilo < 0:
            ilo = Fraction(0)
        if zeta_exact is not None:
            zlo = zhi = zeta_exact
        else:
            zlo, zhi = zeta_bounds(prec)
        return ilo / zhi, ihi / zlo

    return bernoulli_bounds(refine, rng)


class GSampler:
    """measure + SamplerBank; zeta static, or Z-derived when p in (1,2]."""

    def __init__(self, measure, n, m, delta=0.1, seed=0, zeta=None,
                 repetitions=None, p=None):
        self.measure = measure
        self.n = n
        self.m_planned = m
        self.delta = delta
        self.seed = seed
        self.p = Fraction(p) if p is not None else None
        self.mg = None

        if zeta is not None:
            zeta = Fraction(zeta)
        elif measure.zeta is not None:
            zeta = measure.zeta
        self.zeta = zeta  # None means Z-derived at draw time

        if repetitions is None:
            repetitions = self._default_repetitions()
        self.bank = SamplerBank(repetitions, substream(seed, "bank").getrandbits(64))

    def _default_repetitions(self):
        m, delta = self.m_planned, self.delta
        if self.zeta is None:
            # L_p, p in (1,2]: per-repetition success >= 1/(4 n^{1-1/p}).
            p = float(self.p)
            return repetitions_for(self.n ** (1.0 - 1.0 / p), delta)
        if m == 0:
            return 1
        fg = self.measure.fg_lower_bound(m)
        if fg <= 0:
            raise ValueError("measure gives a zero F_G lower bound")
        return repetitions_for(self.zeta * m / fg, delta)

    @property
    def R(self):
        return self.bank.R

    def update(self, coord):
        self.bank.update(coord)
        if self.mg is not None:
            self.mg.update(coord)

    def process(self, updates):
        for u in updates:
            self.update(u.coord if hasattr(u, "coord") else u)

    def _zeta_at_draw(self):
        """(zeta_exact or None, zeta_bounds or None)."""
        if self.zeta is not None:
            return self.zeta, None
        Z = z_bound(self.mg, self.p, self.n)
        exact = pow_exact(Z, self.p - 1)
        if exact is not None:
            return 2 * exact, None

        def bounds(prec):
            lo, hi = pow_bounds(Z, self.p - 1, prec)
            return 2 * lo, 2 * hi

        return None, bounds

    def draw(self):
        if self.bank.r_seen == 0:
            return SampleResult.bottom()
        rng = substream(self.seed, "draw")
        zeta_exact, zeta_bounds = self._zeta_at_draw()
        accepted = []
        for i in range(self.R):
            s, _, c = self.bank.effective(i)
            if s is None:
                continue
            if accept_increment(self.measure, c, zeta_exact, zeta_bounds, rng):
                accepted.append((i, s))
        if not accepted:
            return SampleResult.fail()
        rep, s = accepted[rng.randrange(len(accepted))]
        return SampleResult.of(s, repetition=rep)


def lp_sampler(p, n, m, delta=0.1, seed=0, repetitions=None):
    """Configured L_p sampler for p in (0, 2]."""
    p = Fraction(p)
    if not (0 < p <= 2):
        raise ValueError("insertion-only L_p sampling needs p in (0, 2]")
    from .core import lp_measure

    measure = lp_measure(p)
    if p == 1:
        # Plain reservoir sampling: acceptance is identically 1.
        return GSampler(measure, n, m, delta, seed, zeta=Fraction(1),
                        repetitions=repetitions or 1, p=p)
    if p < 1:
        return GSampler(measure, n, m, delta, seed, repetitions=repetitions, p=p)
    sampler = GSampler(measure, n, m, delta, seed, repetitions=repetitions, p=p)
    sampler.mg = MGSummary(mg_budget(p, n))
    return sampler
