"""Two-sample and goodness-of-fit comparisons for sample batches."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import kolmogorov

from . import _kernels
from .discrete import PmfTable
from .transforms import DomainError

__all__ = [
    "P_FLOOR",
    "TV_THRESHOLD",
    "ECF_THRESHOLD",
    "McVerdict",
    "ks_two_sample",
    "tv_distance_pmf",
    "tv_distance_batches",
    "ecf_grid",
    "ks_verdict",
    "tv_verdict",
]

P_FLOOR = 1e-3
TV_THRESHOLD = 0.02
ECF_THRESHOLD = 0.02


@dataclass
class McVerdict:
    test: str  # "ks-two-sample" | "tv-pmf" | "ecf-grid"
    statistic: float
    threshold: float
    n: int
    pvalue: float | None = None
    seeds: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if self.pvalue is not None:
            return bool(self.pvalue > self.threshold)
        return bool(self.statistic < self.threshold)

    def to_dict(self) -> dict:
        return {
            "test": self.test,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "pvalue": self.pvalue,
            "n": self.n,
            "pass": self.passed,
            "seeds": list(self.seeds),
        }


def _values(b):
    return np.asarray(getattr(b, "values", b))


def ks_two_sample(b1, b2) -> tuple[float, float]:
    """KS statistic and asymptotic p-value ``kolmogorov(sqrt(n_eff) D)``."""
    if getattr(b1, "discrete", False) or getattr(b2, "discrete", False):
        raise DomainError("KS needs continuous batches; use tv_distance_pmf for integer data")
    x, y = np.sort(_values(b1).astype(float)), np.sort(_values(b2).astype(float))
    n1, n2 = len(x), len(y)
    if min(n1, n2) < 100:
        raise DomainError(f"KS needs at least 100 values per batch, got {n1} and {n2}")
    d = _kernels.ks_statistic(x, y)
    n_eff = n1 * n2 / (n1 + n2)
    return d, float(kolmogorov(math.sqrt(n_eff) * d))


def tv_distance_pmf(batch, exact: PmfTable) -> float:
    """Half the L1 gap between the empirical pmf and ``exact`` plus both tail masses."""
    vals = _values(batch)
    n_max = exact.n_max
    inside = vals[vals <= n_max].astype(np.int64)
    emp = np.bincount(inside, minlength=n_max + 1)[: n_max + 1] / len(vals)
    above = float(np.count_nonzero(vals > n_max)) / len(vals)
    return float(0.5 * np.abs(emp - exact.coeffs).sum()
                 + 0.5 * (above + max(exact.mass_deficiency, 0.0)))


def tv_distance_batches(b1, b2) -> float:
    x, y = _values(b1).astype(np.int64), _values(b2).astype(np.int64)
    top = int(max(x.max(initial=0), y.max(initial=0)))
    px = np.bincount(x, minlength=top + 1) / len(x)
    py = np.bincount(y, minlength=top + 1) / len(y)
    return float(0.5 * np.abs(px - py).sum())


def ecf_grid(batch, cf, u) -> float:
    """Max modulus gap between the empirical CF of ``batch`` and ``cf`` on ``u``."""
    x = _values(batch).astype(float)
    u = np.asarray(u, dtype=float)
    emp = np.array([np.exp(1j * t * x).mean() for t in u])
    return float(np.max(np.abs(emp - cf(u))))


def ks_verdict(b1, b2, floor: float = P_FLOOR) -> McVerdict:
    d, p = ks_two_sample(b1, b2)
    seeds = [getattr(b, "seed", None) for b in (b1, b2)]
    return McVerdict("ks-two-sample", d, floor, min(len(_values(b1)), len(_values(b2))), p, seeds)


def tv_verdict(batch, exact: PmfTable, threshold: float = TV_THRESHOLD) -> McVerdict:
    return McVerdict("tv-pmf", tv_distance_pmf(batch, exact), threshold,
                     len(_values(batch)), None, [getattr(batch, "seed", None)])
