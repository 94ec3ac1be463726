"""Verification battery: exact-law and statistical checks with JSON reports.

Each check compares a sampler law against its target.  Exact checks use the
rational branch enumeration and demand equality; statistical checks run a
histogram of real draws (or a Monte-Carlo twin) through the chi-square /
total-variation test.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import montecarlo, oracle
from .core import Update, huber_measure, lp_measure


@dataclass
class VerifyReport:
    sampler: str
    stream_id: str
    conditional_law: dict
    target_law: dict
    exact_match: bool = None
    pvalue: float = None
    tv: float = None
    ok: bool = False
    notes: str = ""

    def to_json(self):
        def fmt(d):
            return {str(k): (str(v) if isinstance(v, Fraction) else float(v))
                    for k, v in d.items()}
        return {
            "sampler": self.sampler,
            "stream_id": self.stream_id,
            "conditional_law": fmt(self.conditional_law),
            "target_law": fmt(self.target_law),
            "exact_match": self.exact_match,
            "pvalue": self.pvalue,
            "tv": self.tv,
            "ok": self.ok,
            "notes": self.notes,
        }


def verify_exact(sampler, stream_id, law, target):
    """Compare an enumerated ExactDistribution against the target law."""
    cond = law.conditional()
    tcond = target.conditional()
    match = cond == tcond
    return VerifyReport(sampler, stream_id, cond, tcond, exact_match=match,
                        ok=match)


def verify_statistical(sampler, stream_id, histogram, target, alpha=1e-4,
                       tv_bound=None):
    rep = oracle.gof_test(histogram, target)
    n = rep.n_samples
    cond = {k: v / n for k, v in histogram.items()}
    ok = rep.pvalue >= alpha and (tv_bound is None or rep.tv <= tv_bound)
    return VerifyReport(sampler, stream_id, cond, dict(target),
                        pvalue=rep.pvalue, tv=rep.tv, ok=ok,
                        notes="n=%d dof=%d" % (n, rep.dof))


def _ups(coords):
    return [Update(c) for c in coords]


def default_battery(seed=0, trials=200000):
    """A small standing battery covering every sampler family."""
    reports = []
    l1 = lp_measure(1)
    l2 = lp_measure(2)
    streams = {
        "s1": [1, 1, 2],
        "s2": [1, 2, 2, 3, 3, 3],
        "s3": [2, 2, 2, 2, 1],
    }

    # Exact targets need rational G, so the numeric battery sticks to L1,
    # L2 (zeta = 2 * max f), and Huber; irrational measures are covered by
    # the symbolic coefficient checks in the test suite.
    for sid, coords in streams.items():
        freqs = frequencies_of(coords)
        zmax = max(freqs.values())
        for name, meas, zeta in (("l1", l1, l1.zeta),
                                 ("l2", l2, 2 * zmax),
                                 ("huber", huber_measure(2), Fraction(1))):
            law = oracle.gsampler_law(_ups(coords), meas, zeta)
            target = oracle.target_distribution(freqs, meas)
            reports.append(verify_exact("gsampler/%s" % name, sid, law, target))

    for sid, coords in streams.items():
        for W in (2, 4):
            law = oracle.sw_gsampler_law(_ups(coords), W, l1, l1.zeta)
            freqs = frequencies_of(coords[max(0, len(coords) - W):])
            target = oracle.target_distribution(freqs, l1)
            reports.append(verify_exact("sw-gsampler/l1", "%s/W=%d" % (sid, W),
                                        law, target))

    # Random order: exact expected-harvest laws plus Monte-Carlo twins.
    win = {1: 2, 2: 1, 3: 1}
    W = sum(win.values())
    law = oracle.pair_l2_law(win, W)
    target = oracle.ExactDistribution(
        probs={i: Fraction(f * f, 16) for i, f in win.items()})
    target.mass_fail = 1 - sum(target.probs.values(), Fraction(0))
    reports.append(verify_exact("pair-l2", "win4", law, target))
    hist, _ = montecarlo.mc_pair_l2(win, W, trials, seed=seed)
    reports.append(verify_statistical("pair-l2/mc", "win4", hist,
                                      law.conditional(), tv_bound=0.02))

    # Multipass exact laws.
    freqs = {1: 3, 3: 1, 4: 2}
    for gamma in (Fraction(1, 2), 1):
        law = oracle.multipass_law(freqs, 4, gamma, p=1)
        target = oracle.target_distribution(freqs, l1)
        reports.append(verify_exact("multipass-l1", "g=%s" % gamma, law, target))

    return reports


def frequencies_of(coords):
    out = {}
    for c in coords:
        out[c] = out.get(c, 0) + 1
    return out


def run_battery(reports=None, seed=0, trials=200000):
    reports = default_battery(seed, trials) if reports is None else reports
    return reports, all(r.ok for r in reports)


def dump_reports(reports, fh):
    json.dump([r.to_json() for r in reports], fh, indent=2)
    fh.write("\n")
