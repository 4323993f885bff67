"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line, printed in the terminal summary.
"""
import math
import subprocess
import sys
import time

import numpy as np
from scipy.special import binom

from randstab.discrete import (
    check_selfdecomp_discrete_stable,
    compose_sibuya_bernoulli,
    discrete_linnik,
    discrete_ml,
    discrete_stable,
    extract_pmf,
)
from randstab.identify import check_power_pgf, identify, identify_from_lt
from randstab.sampling import RandomSource, sample_discrete, sample_lt, sample_random_sum
from randstab.stability import GridSpec, check_class_L_decomposition, solve_scale, verify
from randstab.stats import ks_two_sample, tv_distance_pmf
from randstab.transforms import (
    Degenerate,
    Gamma,
    GeneralizedLinnik,
    Geometric1,
    Harris,
    MittagLeffler,
    PositiveStable,
    SemiML,
    SemiStable,
)

N = 100_000
SEED = 0xC0FFEE
S200 = np.linspace(0, 1, 200)
CF200 = GridSpec("linear", -50.0, 50.0, 200)


def _same(f, g, rtol=1e-9):
    return type(f) is type(g) and all(
        math.isclose(x, y, rel_tol=rtol) for x, y in zip(f.params().values(), g.params().values()))


def test_criterion_1_exact_identities(record):
    parts = {
        "harris-gamma": verify(Harris(3, 2), Gamma(0.5), 1 / 3).max_residual,
        "geometric-ml": max(verify(Geometric1(c**a), MittagLeffler(a), c).max_residual
                            for c in (0.1, 0.25, 0.5) for a in (0.3, 0.5, 1.0)),
        "harris-gl": max(verify(Harris(a, 2), GeneralizedLinnik(1.0, math.pi / 4, 0.5), 1 / a,
                                CF200).max_residual for a in (1.5, 2.0, math.e, 10.0)),
        "discrete-ml": max(verify(Geometric1(c**a), discrete_ml(1.0, a), c).max_residual
                           for c in (0.1, 0.25, 0.5) for a in (0.3, 0.5, 1.0)),
        "class-l": max(check_class_L_decomposition(GeneralizedLinnik(al, th, nu), a, CF200)
                       for al, th, nu in ((1.0, 0.0, 1.0), (0.5, 0.3, 0.5), (1.0, math.pi / 4, 0.5))
                       for a in (2.0, 5.0)),
        "selfdecomp": max(check_selfdecomp_discrete_stable(1.0, a, c, S200)
                          for a in (0.3, 0.5, 1.0) for c in (0.25, 0.5, 0.9)),
        "sibuya-bernoulli": max(compose_sibuya_bernoulli(l, d, n, S200)
                                for l, d, n in ((0.5, 0.5, 0.5), (0.3, 0.7, 0.4))),
    }
    worst = max(parts, key=parts.get)
    ok = all(v <= 1e-12 for v in parts.values())
    record(1, ok, f"7 identities, worst {worst} at {parts[worst]:.2e}")
    assert ok, parts


def test_criterion_2_identification(record):
    sups = []
    ok = True
    for c in (0.1, 0.3, 0.5, 0.7, 0.9):
        r = identify_from_lt(Gamma(1.0), c)
        ok &= r.matched is not None and _same(r.matched.family, Geometric1(c))
        sups.append(r.matched.sup_distance if r.matched else math.inf)
    ok &= max(sups) <= 1e-10
    r = identify_from_lt(Gamma(0.5), 1 / 3)
    ok &= r.matched is not None and _same(r.matched.family, Harris(3, 2))
    r = identify_from_lt(PositiveStable(0.5), 1 / 16)
    ok &= r.matched is not None and _same(r.matched.family, Degenerate(4))
    semi = SemiStable(0.5, 1.0, 0.25, 0.05)  # a = 2
    r = identify_from_lt(semi, semi.b)
    t = np.linspace(0.05, 0.95, 19)
    ok &= r.matched is not None and _same(r.matched.family, Degenerate(2))
    ok &= bool(np.max(np.abs(r.curve(t) - t**2)) <= 1e-10)
    record(2, ok, f"4 closed forms, geometric sup distance <= {max(sups):.1e}")
    assert ok


def test_criterion_3_negative_controls(record):
    r = identify(Gamma(0.7), 0.5)
    low = float(r.pmf.coeffs.min())
    power = check_power_pgf(Geometric1(0.5), 1.5)
    sol = solve_scale(Geometric1(0.5), Gamma(0.5))
    ok = (r.verdict == "not-a-pgf" and low < -1e-3 and not power
          and not sol.stable and sol.max_residual > 1e-3)
    record(3, ok, f"gamma(0.7) min coeff {low:.3f}, u=1.5 accepted={power}, "
                  f"best scale residual {sol.max_residual:.2e}")
    assert ok


def test_criterion_4_round_trip(record):
    cases = [(Gamma(1.0), c) for c in (0.1, 0.5, 0.9)] + [
        (Gamma(0.5), 1 / 3), (Gamma(0.25), 0.5), (MittagLeffler(0.5), 0.0625),
        (PositiveStable(0.5), 1 / 16), (PositiveStable(0.25), 1 / 16),
        (SemiStable(0.5, 1.0, 0.25, 0.05), 0.25), (SemiML(0.5, 1.0, 0.25, 0.05), 0.25),
        (discrete_ml(1.0, 0.5), 0.0625), (discrete_stable(1.0, 0.5), 1 / 16),
    ]
    worst, count, ok = 0.0, 0, True
    for X, c in cases:
        r = identify(X, c)
        if r.verdict != "valid-pgf" or r.matched is None:
            ok = False
            continue
        count += 1
        worst = max(worst, verify(r.matched.family, X, c).max_residual)
    ok &= worst <= 1e-10
    record(4, ok, f"{count}/{len(cases)} compounders re-verified, worst {worst:.2e}")
    assert ok


def test_criterion_5_monte_carlo(record):
    details, ok = [], True
    for tag, (P, X, c) in {"geometric-ml": (Geometric1(0.25), MittagLeffler(0.5), 0.0625),
                           "degenerate-stable": (Degenerate(4), PositiveStable(0.5), 1 / 16)}.items():
        t0 = time.perf_counter()
        src = RandomSource(SEED, 1)
        s = sample_random_sum(P, X, c, N, src.child(0))
        x = sample_lt(X, N, src.child(1))
        _, p = ks_two_sample(s, x)
        dt = time.perf_counter() - t0
        ok &= p > 1e-3 and dt < 10
        details.append(f"{tag} p={p:.3f} in {dt:.1f}s")
    # thinned geometric sum of discrete ML(1/2) with p=1/4, c=1/16. The plug-in TV of
    # n=1e5 exact draws from this heavy-tailed pmf sits near 0.027, so this can fail
    # with a correct sampler. The alpha=0.9 run is reported for comparison only.
    for a, c, gate in ((0.5, 0.0625, True), (0.9, 0.5, False)):
        t0 = time.perf_counter()
        Q = discrete_ml(1.0, a)
        s = sample_random_sum(Geometric1(c**a), Q, c, N, RandomSource(SEED, 2))
        tv = tv_distance_pmf(s, extract_pmf(Q, 8192))
        dt = time.perf_counter() - t0
        if gate:
            ok &= tv < 0.02 and dt < 10
        details.append(f"thinned-sum alpha={a} TV={tv:.4f} in {dt:.1f}s"
                       + ("" if gate else " (not gated)"))
    record(5, ok, "; ".join(details))
    assert ok


def test_criterion_6_oracles(record):
    tab = extract_pmf(Harris(2, 2), 64)
    m = np.arange(16)
    ref = np.zeros(33)
    ref[1 + 2 * m] = 2**-0.5 * binom(m - 0.5, m) * 0.5**m
    err = float(np.max(np.abs(tab.coeffs[:33] - ref)))
    tvs = {}
    for i, (name, Q) in enumerate({"stable": discrete_stable(1.0, 0.9),
                                   "ml": discrete_ml(1.0, 0.9),
                                   "linnik": discrete_linnik(1.0, 0.9, 2.0)}.items()):
        b = sample_discrete(Q, N, RandomSource(SEED, 10 + i))
        tvs[name] = tv_distance_pmf(b, extract_pmf(Q, 1024))
    ok = err <= 1e-9 and all(v < 0.02 for v in tvs.values())
    record(6, ok, f"Harris series error {err:.1e}; TV " +
           ", ".join(f"{k} {v:.4f}" for k, v in tvs.items()))
    assert ok


def test_criterion_7_suite(record):
    out = subprocess.run([sys.executable, "-m", "randstab", "suite", "paper"],
                         capture_output=True, text=True, timeout=300)
    last = out.stdout.strip().splitlines()[-1] if out.stdout.strip() else out.stderr.strip()
    ok = out.returncode == 0
    record(7, ok, f"exit {out.returncode}, {last}")
    assert ok, out.stdout + out.stderr
