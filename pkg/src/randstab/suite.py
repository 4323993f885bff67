"""Regression suite: named identity, identification, sampling and invariant checks.

Each check returns ``(passed, detail)``; :func:`run_suite` collects them in
a canonical order and :func:`format_table` renders the claim/pass table.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .discrete import (
    check_selfdecomp_discrete_stable,
    compose_sibuya_bernoulli,
    d_type_transform,
    discrete_linnik,
    discrete_ml,
    discrete_stable,
    extract_pmf,
)
from .identify import check_power_pgf, identify
from .sampling import (
    RandomSource,
    binomial_thin,
    sample_compounder,
    sample_discrete,
    sample_lt,
    sample_random_sum,
)
from .stability import (
    check_class_L_decomposition,
    solve_scale,
    verify,
)
from .stats import ks_two_sample, tv_distance_batches, tv_distance_pmf
from .transforms import (
    Degenerate,
    Gamma,
    GeneralizedLinnik,
    Geometric1,
    Harris,
    Linnik,
    MittagLeffler,
    PositiveLinnik,
    PositiveStable,
    ScaleFunction,
    SemiAlphaLaplace,
    SemiML,
    SemiStable,
    check_scale_equation,
)

__all__ = ["SuiteCheck", "SuiteRow", "CHECKS", "run_suite", "format_table", "SUITES"]

IDENTITY_TOL = 1e-12
ROUNDTRIP_TOL = 1e-10
MC_N = 100_000
MC_SEED = 0xC0FFEE


@dataclass(frozen=True)
class SuiteCheck:
    id: str
    claim: str
    run: Callable[[], tuple[bool, str]]


@dataclass
class SuiteRow:
    id: str
    claim: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> dict:
        return {"id": self.id, "claim": self.claim, "pass": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def _same(family, expected, rtol=1e-9) -> bool:
    if family is None or type(family) is not type(expected):
        return False
    return all(math.isclose(x, y, rel_tol=rtol)
               for x, y in zip(family.params().values(), expected.params().values()))


def _worst(values, tol):
    m = max(values)
    return m <= tol, f"max residual {m:.3e} (tol {tol:g})"


# ---------------------------------------------------------------------------
# exact identities


def _harris_gamma():
    return _worst([verify(Harris(3, 2), Gamma(0.5), 1 / 3).max_residual], IDENTITY_TOL)


def _geometric_ml():
    res = [verify(Geometric1(c**a), MittagLeffler(a), c).max_residual
           for c in (0.1, 0.25, 0.5) for a in (0.3, 0.5, 1.0)]
    return _worst(res, IDENTITY_TOL)


def _harris_gl():
    phi = GeneralizedLinnik(1.0, math.pi / 4, 0.5)
    res = [verify(Harris(a, 2), phi, 1 / a).max_residual for a in (1.5, 2.0, math.e, 10.0)]
    return _worst(res, IDENTITY_TOL)


def _discrete_geometric_ml():
    res = [verify(Geometric1(c**a), discrete_ml(1.0, a), c).max_residual
           for c in (0.1, 0.25, 0.5) for a in (0.3, 0.5, 1.0)]
    return _worst(res, IDENTITY_TOL)


def _class_l():
    res = [check_class_L_decomposition(GeneralizedLinnik(al, 0.0, 0.5), a)
           for al in (0.5, 1.0, 1.5) for a in (1.5, 2.0, 10.0)]
    return _worst(res, IDENTITY_TOL)


def _selfdecomp():
    s = np.linspace(0, 1, 200)
    res = [check_selfdecomp_discrete_stable(1.0, a, c, s)
           for a in (0.3, 0.7, 1.0) for c in (0.2, 0.5, 0.9)]
    return _worst(res, IDENTITY_TOL)


def _sibuya_bernoulli():
    s = np.linspace(0, 1, 200)
    res = [compose_sibuya_bernoulli(lam, d, nu, s)
           for lam in (0.3, 0.8) for d in (0.2, 0.9) for nu in (0.3, 0.7)]
    return _worst(res, IDENTITY_TOL)


# ---------------------------------------------------------------------------
# identification


def _id_exponential():
    out = []
    for c in (0.1, 0.3, 0.5, 0.7, 0.9):
        r = identify(Gamma(1.0), c)
        ok = (r.matched is not None and _same(r.matched.family, Geometric1(c))
              and r.matched.sup_distance <= 1e-10)
        out.append((ok, r.matched.sup_distance if r.matched else math.inf))
    worst = max(d for _, d in out)
    return all(ok for ok, _ in out), f"5 scales, worst sup distance {worst:.2e}"


def _id_harris():
    r = identify(Gamma(0.5), 1 / 3)
    ok = r.matched is not None and _same(r.matched.family, Harris(3, 2))
    return ok, f"matched {r.matched.family.descriptor() if r.matched else None}"


def _id_degenerate():
    r = identify(PositiveStable(0.5), 1 / 16)
    ok = r.matched is not None and _same(r.matched.family, Degenerate(4))
    return ok, f"matched {r.matched.family.descriptor() if r.matched else None}"


def _id_semistable():
    X = SemiStable(0.5, 1.0, 0.25, 0.05)
    r = identify(X, 0.25)
    ok = r.matched is not None and _same(r.matched.family, Degenerate(2))
    return ok, f"a={X.psi.a:g}, matched {r.matched.family.descriptor() if r.matched else None}"


# ---------------------------------------------------------------------------
# negative controls


def _neg_gamma():
    r = identify(Gamma(0.7), 0.5)
    low = float(r.pmf.coeffs.min())
    return (r.verdict == "not-a-pgf" and low < -1e-3), \
        f"verdict {r.verdict}, most negative coefficient {low:.4f}"


def _neg_power():
    rej = not check_power_pgf(Geometric1(0.5), 1.5)
    acc = check_power_pgf(Geometric1(0.5), 2.0)
    return rej and acc, f"u=1.5 rejected: {rej}, u=2 accepted: {acc}"


def _neg_scale():
    sol = solve_scale(Geometric1(0.5), Gamma(0.5))
    return (not sol.stable and sol.max_residual > 1e-3), \
        f"best c {sol.c:.4f}, min residual {sol.max_residual:.3e}"


def _roundtrip():
    cases = [(Gamma(1.0), c) for c in (0.2, 0.5, 0.8)] + [
        (Gamma(0.5), 1 / 3), (Gamma(1 / 3), 0.5), (MittagLeffler(0.5), 0.25),
        (PositiveStable(0.5), 1 / 16), (PositiveStable(0.5), 0.25),
        (SemiStable(0.5, 1.0, 0.25, 0.05), 0.25), (SemiML(0.5, 1.0, 0.25, 0.05), 0.25),
        (discrete_ml(1.0, 0.5), 0.25), (discrete_stable(1.0, 0.5), 1 / 16),
    ]
    worst, n_valid = 0.0, 0
    for X, c in cases:
        r = identify(X, c)
        if r.verdict != "valid-pgf" or r.matched is None:
            return False, f"{X.descriptor()} at c={c:g} did not identify"
        n_valid += 1
        worst = max(worst, verify(r.matched.family, X, c, tol=ROUNDTRIP_TOL).max_residual)
    return worst <= ROUNDTRIP_TOL, f"{n_valid} compounders, worst residual {worst:.3e}"


# ---------------------------------------------------------------------------
# invariants


def _scale_equation():
    grid = np.geomspace(1e-3, 1e3, 200)
    psis = [ScaleFunction.pure_power(1.0, a) for a in (0.3, 1.0, 2.0)] + \
           [ScaleFunction.log_periodic(1.0, a, 0.25, 0.05) for a in (0.5, 1.0)]
    return _worst([check_scale_equation(p, grid) for p in psis], IDENTITY_TOL)


def _lt_monotone():
    s = np.geomspace(1e-4, 1e4, 400)
    fams = [Gamma(0.5), MittagLeffler(0.5), PositiveLinnik(0.7, 2.0, 1.5),
            PositiveStable(0.3), SemiML(0.5), SemiStable(0.5)]
    bad = [f.descriptor() for f in fams
           if not (np.all(np.diff(f(s)) < 0) and np.all(f(s) > 0) and np.all(f(s) < 1))]
    return not bad, "strictly decreasing in (0, 1)" if not bad else f"failed: {bad}"


def _cf_hermitian():
    u = np.linspace(0.01, 50, 200)
    fams = [GeneralizedLinnik(1.0, math.pi / 4, 0.5), GeneralizedLinnik(1.5, 0.2, 2.0),
            Linnik(1.2), SemiAlphaLaplace(0.5)]
    res = [float(np.max(np.abs(f(-u) - np.conj(f(u))))) for f in fams]
    return _worst(res, IDENTITY_TOL)


def _cf_no_zero():
    u = np.linspace(-50, 50, 2001)
    fams = [GeneralizedLinnik(1.0, math.pi / 4, 0.5), GeneralizedLinnik(1.5, 0.2, 2.0),
            GeneralizedLinnik(0.5, math.pi / 4, 1.0), Linnik(2.0), SemiAlphaLaplace(0.5)]
    low = min(float(np.min(np.abs(f(u)))) for f in fams)
    return low > 0, f"min |cf| on grid {low:.3e}"


def _thinning_semigroup():
    s = np.linspace(0, 1, 200)
    Q = discrete_ml(1.0, 0.7)
    exact = float(np.max(np.abs(d_type_transform(d_type_transform(Q, 0.6), 0.5)(s)
                                - d_type_transform(Q, 0.3)(s))))
    src = RandomSource(MC_SEED, 11)
    b = sample_compounder(Geometric1(0.2), MC_N, src.child(0))
    twice = binomial_thin(binomial_thin(b, 0.6, src.child(1)), 0.5, src.child(2))
    once = binomial_thin(b, 0.3, src.child(3))
    tv = tv_distance_batches(twice, once)
    return exact <= IDENTITY_TOL and tv < 0.02, f"pgf residual {exact:.2e}, sample TV {tv:.4f}"


def _determinism():
    src = RandomSource(MC_SEED, 3)
    a = sample_lt(MittagLeffler(0.5), 1000, src).to_binary()
    b = sample_lt(MittagLeffler(0.5), 1000, src).to_binary()
    c = sample_lt(MittagLeffler(0.5), 1000, RandomSource(MC_SEED, 4)).to_binary()
    return a == b and a != c, "identical bytes for one stream, distinct for another"


# ---------------------------------------------------------------------------
# Monte Carlo


def _mc_ks(N, X, c, stream):
    def run():
        src = RandomSource(MC_SEED, stream)
        s = sample_random_sum(N, X, c, MC_N, src.child(0))
        x = sample_lt(X, MC_N, src.child(1))
        d, p = ks_two_sample(s, x)
        return p > 1e-3, f"D={d:.5f}, p={p:.4f}"
    return run


def _mc_thinned_sum():
    a, c = 0.9, 0.5
    Q = discrete_ml(1.0, a)
    s = sample_random_sum(Geometric1(c**a), Q, c, MC_N, RandomSource(MC_SEED, 21))
    tv = tv_distance_pmf(s, extract_pmf(Q, 1024))
    return tv < 0.02, f"TV {tv:.4f}"


def _mc_mixture():
    tvs = []
    for i, Q in enumerate((discrete_stable(1.0, 0.9), discrete_ml(1.0, 0.9),
                           discrete_linnik(1.0, 0.9, 2.0))):
        b = sample_discrete(Q, MC_N, RandomSource(MC_SEED, 30 + i))
        tvs.append(tv_distance_pmf(b, extract_pmf(Q, 1024)))
    return max(tvs) < 0.02, "TV " + ", ".join(f"{t:.4f}" for t in tvs)


def _harris_oracle():
    from scipy.special import binom
    tab = extract_pmf(Harris(2, 2), 64)
    m = np.arange(16)
    ref = np.zeros(33)
    ref[1 + 2 * m] = 2**-0.5 * binom(m - 0.5, m) * 0.5**m
    err = float(np.max(np.abs(tab.coeffs[:33] - ref)))
    return err <= 1e-9, f"max error {err:.2e} for n <= 32"


CHECKS: tuple[SuiteCheck, ...] = (
    SuiteCheck("identity/harris-gamma", "Harris(3,2) stabilises gamma(1/2) at c=1/3", _harris_gamma),
    SuiteCheck("identity/geometric-ml", "Geometric1(c^alpha) stabilises ML", _geometric_ml),
    SuiteCheck("identity/harris-gl", "Harris(a,2) stabilises GL(1,pi/4,1/2) for every a>1", _harris_gl),
    SuiteCheck("identity/discrete-geometric-ml", "discrete ML is D-stable under Geometric1", _discrete_geometric_ml),
    SuiteCheck("identity/class-l", "GL decomposes through a Harris compound", _class_l),
    SuiteCheck("identity/discrete-selfdecomp", "discrete stable self-decomposition", _selfdecomp),
    SuiteCheck("identity/sibuya-bernoulli", "Bernoulli-shift of Sibuya-Bernoulli composition", _sibuya_bernoulli),
    SuiteCheck("identify/exponential-geometric", "exponential at c identifies Geometric1(c)", _id_exponential),
    SuiteCheck("identify/gamma-harris", "gamma(1/2) at c=1/3 identifies Harris(3,2)", _id_harris),
    SuiteCheck("identify/stable-degenerate", "stable(1/2) at c=1/16 identifies Degenerate(4)", _id_degenerate),
    SuiteCheck("identify/semistable-power", "semi-stable with a=2 at c=b identifies t^2", _id_semistable),
    SuiteCheck("negative/gamma-0.7", "gamma(0.7) at c=1/2 is not a PGF", _neg_gamma),
    SuiteCheck("negative/power-1.5", "P^1.5 is not a PGF", _neg_power),
    SuiteCheck("negative/geometric-gamma", "Geometric1(1/2) stabilises no gamma(1/2)", _neg_scale),
    SuiteCheck("roundtrip/identified", "identified compounders re-verify", _roundtrip),
    SuiteCheck("oracle/harris-series", "Harris(2,2) pmf matches its binomial series", _harris_oracle),
    SuiteCheck("invariant/scale-equation", "psi(u) = a psi(b u)", _scale_equation),
    SuiteCheck("invariant/lt-monotone", "Laplace transforms decrease in (0,1)", _lt_monotone),
    SuiteCheck("invariant/cf-hermitian", "phi(-u) = conj(phi(u))", _cf_hermitian),
    SuiteCheck("invariant/cf-no-real-zero", "CFs have no real zero", _cf_no_zero),
    SuiteCheck("invariant/thinning-semigroup", "thin(thin(X,c1),c2) = thin(X,c1 c2)", _thinning_semigroup),
    SuiteCheck("invariant/seeded-determinism", "batches are a function of seed and stream", _determinism),
    SuiteCheck("mc/geometric-ml-ks", "c S_N ~ X for Geometric1(1/4), ML(1/2), c=1/16",
               _mc_ks(Geometric1(0.25), MittagLeffler(0.5), 0.0625, 1)),
    SuiteCheck("mc/degenerate-stable-ks", "c S_N ~ X for Degenerate(4), stable(1/2), c=1/16",
               _mc_ks(Degenerate(4), PositiveStable(0.5), 1 / 16, 2)),
    SuiteCheck("mc/thinned-sum-tv", "thinned geometric sum of discrete ML(0.9) matches Q", _mc_thinned_sum),
    SuiteCheck("mc/poisson-mixture-tv", "Poisson mixtures match extracted pmfs at alpha=0.9", _mc_mixture),
)

SUITES = {"paper": CHECKS}


def run_suite(name: str = "paper") -> list[SuiteRow]:
    if name not in SUITES:
        raise KeyError(name)
    rows = []
    for chk in SUITES[name]:
        t0 = time.perf_counter()
        try:
            ok, detail = chk.run()
        except Exception as exc:  # a crash is a failed row, not an aborted suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append(SuiteRow(chk.id, chk.claim, bool(ok), detail, time.perf_counter() - t0))
    return sorted(rows, key=lambda r: r.id)


def format_table(rows: list[SuiteRow]) -> str:
    w = max(len(r.id) for r in rows)
    lines = [f"{'check':<{w}}  result  detail", "-" * (w + 40)]
    for r in rows:
        lines.append(f"{r.id:<{w}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    n_pass = sum(r.passed for r in rows)
    lines.append(f"{n_pass}/{len(rows)} checks passed")
    return "\n".join(lines)
