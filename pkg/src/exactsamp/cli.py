"""Command-line front end: stream generation, sampling, verification, bench.

Exit codes: 0 success, 1 verification/sampling failure, 2 usage or stream
format errors.
"""

import argparse
import json
import sys
import time
from fractions import Fraction

from .core import (
    StreamConfig,
    Update,
    fair_measure,
    frequencies,
    huber_measure,
    l1l2_measure,
    lp_measure,
    parse_stream,
    tukey_measure,
    validate_stream,
    write_stream,
)
from .exactrand import substream
from .f0sampler import F0Sampler, TukeySampler
from .gsampler import GSampler, lp_sampler
from .matrixsampler import ROW_MEASURES, MatrixSampler
from .multipass import ReplayableStream, multipass_l1_draw, multipass_lp_draw
from .randomorder import BlockLpSampler, PairL2Sampler
from .sliding import CheckpointedSampler, SlidingLpSampler
from .smallp import DuplicatedExpState
from . import verify as verify_mod


def make_measure(args):
    name = args.measure
    if name == "lp":
        return lp_measure(Fraction(args.p))
    if name == "l1l2":
        return l1l2_measure()
    if name == "fair":
        return fair_measure(Fraction(args.tau))
    if name == "huber":
        return huber_measure(Fraction(args.tau))
    if name == "tukey":
        return tukey_measure(Fraction(args.tau))
    raise SystemExit(2)


def _gen_updates(kind, n, m, rng, alpha=1.1):
    if kind == "uniform":
        return [Update(rng.randrange(n) + 1, time=t + 1) for t in range(m)]
    if kind == "zipf":
        weights = [1.0 / (i + 1) ** alpha for i in range(n)]
        return [Update(rng.choices(range(1, n + 1), weights)[0], time=t + 1)
                for t in range(m)]
    if kind == "single-heavy":
        ups = []
        for t in range(m):
            c = 1 if rng.random() < 0.5 else rng.randrange(n) + 1
            ups.append(Update(c, time=t + 1))
        return ups
    if kind == "shuffled":
        # Balanced multiset in uniformly random order (random-order model).
        pool = [(i % n) + 1 for i in range(m)]
        rng.shuffle(pool)
        return [Update(c, time=t + 1) for t, c in enumerate(pool)]
    raise SystemExit(2)


def cmd_generate(args):
    rng = substream(args.seed, "gen", args.kind)
    if args.kind == "matrix":
        config = StreamConfig(n=args.n, model="matrix", d=args.d)
        ups = [Update(rng.randrange(args.n) + 1, col=rng.randrange(args.d) + 1,
                      time=t + 1) for t in range(args.m)]
    else:
        kind = args.kind
        model = "insertion_only"
        W = None
        if kind == "sliding-trace":
            W = args.window or max(1, args.m // 4)
            model = "sliding_window"
            kind = "uniform"
        elif args.window:
            model, W = "sliding_window", args.window
        elif kind == "shuffled":
            model = "random_order"
        config = StreamConfig(n=args.n, model=model, W=W)
        ups = _gen_updates(kind, args.n, args.m, rng, args.alpha)
    write_stream(args.out, config, ups)
    print("wrote %d updates to %s" % (len(ups), args.out))
    return 0


def _build_and_draw(args, config, updates, seed):
    name = args.sampler
    n, m = config.n, len(updates)
    if name == "gsampler":
        measure = make_measure(args)
        s = GSampler(measure, n, m, args.delta, seed, p=args.p if args.measure == "lp" else None)
        if measure.zeta is None:
            from .heavyhitters import MGSummary, mg_budget
            s.mg = MGSummary(mg_budget(args.p, n))
        s.process(updates)
        return s.draw()
    if name == "lp":
        s = lp_sampler(Fraction(args.p), n, m, args.delta, seed)
        s.process(updates)
        return s.draw()
    if name == "f0":
        s = F0Sampler(n, args.delta, seed, window=config.W)
        s.process(updates)
        return s.draw()
    if name == "tukey":
        s = TukeySampler(tukey_measure(Fraction(args.tau)), n, args.delta, seed,
                         window=config.W)
        s.process(updates)
        return s.draw()
    if name == "matrix":
        measure = ROW_MEASURES[args.row_measure]()
        s = MatrixSampler(measure, n, config.d, m, args.delta, seed)
        s.process(updates)
        return s.draw()
    if name == "sliding":
        measure = make_measure(args)
        s = CheckpointedSampler(measure, config.W, n, args.delta, seed)
        s.process(updates)
        return s.draw()
    if name == "sliding-lp":
        s = SlidingLpSampler(Fraction(args.p), config.W, n, args.delta, seed)
        s.process(updates)
        return s.draw()
    if name == "pair":
        s = PairL2Sampler(n, config.W or m, seed)
        s.process(updates)
        return s.draw()
    if name == "block":
        s = BlockLpSampler(n, config.W or m, int(args.p), seed)
        s.process(updates)
        return s.draw()
    if name == "multipass":
        stream = ReplayableStream(updates)
        p = Fraction(args.p)
        if p == 1:
            res, _ = multipass_l1_draw(stream, Fraction(args.gamma), n, seed)
            return res
        return multipass_lp_draw(stream, Fraction(args.gamma), p, n, args.delta, seed)
    if name == "smallp":
        st = DuplicatedExpState(float(args.p), args.duplication, seed)
        st.process(updates)
        return st.draw()
    raise SystemExit(2)


def cmd_sample(args):
    try:
        config, updates = parse_stream(args.stream)
    except (OSError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    if args.window:
        config = StreamConfig(n=config.n, model="sliding_window",
                              W=args.window, d=config.d)
    err = validate_stream(config, updates)
    if err is not None:
        print("invalid stream (position %d): %s" % (err.position, err.message),
              file=sys.stderr)
        return 2
    outcomes = {"index": 0, "bottom": 0, "fail": 0}
    hist = {}
    t0 = time.perf_counter()
    for k in range(args.trials):
        res = _build_and_draw(args, config, updates, args.seed + k)
        outcomes[res.outcome] += 1
        if res.outcome == "index":
            hist[res.index] = hist.get(res.index, 0) + 1
    dt = time.perf_counter() - t0
    n_trials = max(args.trials, 1)
    report = {
        "outcome_counts": outcomes,
        "histogram": {str(k): v for k, v in sorted(hist.items())},
        "fail_rate": outcomes["fail"] / n_trials,
        "wall_time_s": dt,
        "updates_per_s": len(updates) * args.trials / dt if dt > 0 else None,
    }
    if args.format == "json":
        json.dump(report, sys.stdout, indent=2)
        print()
    else:
        print("outcomes: %s  fail_rate=%.4f  %.3fs"
              % (outcomes, report["fail_rate"], dt))
        for k, v in sorted(hist.items()):
            print("%8d  %d" % (k, v))
    if args.strict and outcomes["fail"]:
        return 1
    return 0


def cmd_verify(args):
    reports, ok = verify_mod.run_battery(seed=args.seed, trials=args.trials)
    if args.format == "json":
        verify_mod.dump_reports(reports, sys.stdout)
    else:
        for r in reports:
            status = "ok" if r.ok else "FAIL"
            extra = "exact" if r.exact_match is not None else \
                "p=%.4f tv=%.4f" % (r.pvalue, r.tv)
            print("%-4s %-20s %-12s %s" % (status, r.sampler, r.stream_id, extra))
    if args.out:
        with open(args.out, "w") as fh:
            verify_mod.dump_reports(reports, fh)
    return 0 if ok else 1


def cmd_bench(args):
    rng = substream(args.seed, "bench")
    ups = _gen_updates("uniform", args.n, args.m, rng)
    sampler = lp_sampler(Fraction(args.p), args.n, args.m, seed=args.seed)
    t0 = time.perf_counter()
    sampler.process(ups)
    res = sampler.draw()
    dt = time.perf_counter() - t0
    print("R=%d  %d updates in %.3fs (%.0f/s)  draw=%s"
          % (sampler.R, args.m, dt, args.m / dt, res.outcome))
    return 0


def _add_measure_args(sp):
    sp.add_argument("--measure", default="lp",
                    choices=["lp", "l1l2", "fair", "huber", "tukey"])
    sp.add_argument("--p", default="1", help="L_p exponent (rational, e.g. 3/2)")
    sp.add_argument("--tau", default="2", help="M-estimator scale")


def main(argv=None):
    ap = argparse.ArgumentParser(prog="exactsamp")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="write a stream file")
    g.add_argument("--kind", required=True,
                   choices=["uniform", "zipf", "single-heavy", "shuffled",
                            "sliding-trace", "matrix"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--d", type=int, default=4, help="matrix column count")
    g.add_argument("--window", type=int, default=None, help="sliding window W")
    g.add_argument("--alpha", type=float, default=1.1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sample", help="run a sampler over a stream file")
    s.add_argument("--stream", required=True)
    s.add_argument("--sampler", required=True,
                   choices=["gsampler", "lp", "f0", "tukey", "matrix", "sliding",
                            "sliding-lp", "pair", "block", "multipass", "smallp"])
    _add_measure_args(s)
    s.add_argument("--row-measure", default="l2_row", choices=sorted(ROW_MEASURES))
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--passes-gamma", dest="gamma", default="1/2",
                   help="multipass chunk exponent gamma (rational)")
    s.add_argument("--duplication", type=int, default=256)
    s.add_argument("--trials", type=int, default=1,
                   help="independent seeded draws")
    s.add_argument("--window", type=int, default=None,
                   help="treat the stream as sliding-window with this W")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--strict", action="store_true",
                   help="exit 1 if any draw fails")
    s.add_argument("--format", default="table", choices=["json", "table"])
    s.set_defaults(func=cmd_sample)

    v = sub.add_parser("verify", help="run the verification battery")
    v.add_argument("--trials", type=int, default=200000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None, help="also write JSON reports here")
    v.add_argument("--format", default="table", choices=["json", "table"])
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="updates/sec for the L_p sampler")
    b.add_argument("--n", type=int, default=1000)
    b.add_argument("--m", type=int, default=100000)
    b.add_argument("--p", default="1")
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)

    args = ap.parse_args(argv)
    if hasattr(args, "p"):
        args.p = Fraction(args.p)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
