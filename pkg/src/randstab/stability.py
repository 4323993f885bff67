"""Numerical verification of random-sum stability equations.

Continuous: ``P(phi(c u)) = phi(u)`` for an LT or CF ``phi``.
Discrete:   ``P(Q(1 - c + c s)) = Q(s)`` for a PGF ``Q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .discrete import DiscretePgf, as_discrete
from .transforms import (
    CfFamily,
    Degenerate,
    DomainError,
    GeneralizedLinnik,
    Geometric1,
    Harris,
    LtFamily,
    PgfFamily,
)

__all__ = [
    "GridSpec",
    "StabilityReport",
    "ScaleSolution",
    "LT_GRID",
    "CF_GRID",
    "DISCRETE_GRID",
    "verify_continuous",
    "verify_discrete",
    "verify",
    "solve_scale",
    "closed_form_scale",
    "transform_shape",
    "check_class_L_decomposition",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    kind: str  # "geometric" | "linear"
    lo: float
    hi: float
    n: int

    def points(self) -> np.ndarray:
        if self.kind == "geometric":
            return np.geomspace(self.lo, self.hi, self.n)
        if self.kind == "linear":
            return np.linspace(self.lo, self.hi, self.n)
        raise DomainError(f"unknown grid kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str, kind: str = "linear") -> "GridSpec":
        """``lo:hi:n`` (``kind`` applied), or ``geometric:lo:hi:n``."""
        parts = text.split(":")
        if len(parts) == 4:
            kind, parts = parts[0], parts[1:]
        if len(parts) != 3:
            raise DomainError(f"malformed grid {text!r}; expected lo:hi:n")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise DomainError(f"malformed grid {text!r}; expected lo:hi:n") from None
        if n < 1 or hi < lo:
            raise DomainError(f"empty grid {text!r}")
        return cls(kind, lo, hi, n)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi, "n": self.n}


LT_GRID = GridSpec("geometric", 1e-3, 1e2, 200)
CF_GRID = GridSpec("linear", -50.0, 50.0, 201)
DISCRETE_GRID = GridSpec("linear", 1e-3, 1 - 1e-3, 200)


@dataclass
class StabilityReport:
    equation: str
    compounder: str
    transform: str
    c: float
    tolerance: float
    grid: GridSpec
    residuals: np.ndarray = field(repr=False)
    max_residual: float = float("nan")
    passed: bool = False

    def __post_init__(self):
        self.residuals = np.asarray(self.residuals, dtype=float)
        self.max_residual = float(np.max(self.residuals))
        self.passed = bool(self.max_residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "equation": self.equation,
            "compounder": self.compounder,
            "transform": self.transform,
            "c": self.c,
            "tolerance": self.tolerance,
            "max_residual": self.max_residual,
            "pass": self.passed,
            "grid": self.grid.to_dict(),
            "residuals": [float(r) for r in self.residuals],
        }

    def to_csv(self) -> str:
        lines = ["grid,residual"]
        lines += [f"{x!r},{r!r}" for x, r in zip(self.grid.points().tolist(),
                                                  self.residuals.tolist())]
        return "\n".join(lines) + "\n"


def _grid(grid, default: GridSpec) -> GridSpec:
    if grid is None:
        return default
    if isinstance(grid, GridSpec):
        return grid
    if isinstance(grid, str):
        return GridSpec.parse(grid, default.kind)
    raise DomainError(f"grid must be a GridSpec or 'lo:hi:n' text, got {grid!r}")


def verify_continuous(P: PgfFamily, phi: LtFamily | CfFamily, c: float, grid=None,
                      tol: float = DEFAULT_TOL) -> StabilityReport:
    """Residuals ``|P(phi(c u)) - phi(u)|`` on a grid (complex modulus for CFs)."""
    if isinstance(phi, LtFamily):
        if not 0 < c < 1:
            raise DomainError(
                f"c={c!r} rejected: stability of a Laplace transform needs 0 < c < 1, "
                "since phi(c s) must exceed phi(s) for s > 0"
            )
        spec = _grid(grid, LT_GRID)
        equation = "continuous-lt"
    elif isinstance(phi, CfFamily):
        if not c > 0:
            raise DomainError(f"c must be positive, got {c!r}")
        spec = _grid(grid, CF_GRID)
        equation = "continuous-cf"
    else:
        raise DomainError(f"{phi!r} is neither a Laplace transform nor a CF family")
    u = spec.points()
    res = np.abs(P(phi(c * u)) - phi(u))
    return StabilityReport(equation, P.descriptor(), phi.descriptor(), float(c), tol, spec, res)


def verify_discrete(P: PgfFamily, Q, c: float, grid=None,
                    tol: float = DEFAULT_TOL) -> StabilityReport:
    """Residuals ``|P(Q(1 - c + c s)) - Q(s)|`` for ``s`` in (0, 1)."""
    if not 0 < c < 1:
        raise DomainError(f"c must lie in (0, 1), got {c!r}")
    Q = as_discrete(Q)
    spec = _grid(grid, DISCRETE_GRID)
    s = spec.points()
    res = np.abs(P(Q.thinned(c)(s)) - Q(s))
    return StabilityReport("discrete", P.descriptor(), Q.descriptor(), float(c), tol, spec, res)


def verify(P, X, c, grid=None, tol=DEFAULT_TOL) -> StabilityReport:
    """Dispatch to the continuous or discrete check by the type of ``X``."""
    if isinstance(X, DiscretePgf):
        return verify_discrete(P, X, c, grid, tol)
    return verify_continuous(P, X, c, grid, tol)


# ---------------------------------------------------------------------------
# scale search


@dataclass
class ScaleSolution:
    c: float
    max_residual: float
    closed_form: bool
    stable: bool
    report: StabilityReport | None = None

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "closed_form": self.closed_form,
            "stable": self.stable,
            "max_residual": self.max_residual,
            "verdict": "stable" if self.stable else "not stable under this compounder",
        }


def _harris_params(P):
    if isinstance(P, Harris):
        return P.a, P.k
    if isinstance(P, Geometric1):
        return 1 / P.p, 1
    return None


def transform_shape(X):
    """(outer, beta_or_nu, psi) of an LT, CF or LT-sourced discrete PGF, or None."""
    if isinstance(X, DiscretePgf):
        if not X.from_lt:
            return None
        return transform_shape(X.source)
    if isinstance(X, LtFamily):
        return X.outer, X.beta, X.psi
    if isinstance(X, CfFamily):
        return "power", X.nu, X.psi
    return None


def closed_form_scale(P: PgfFamily, X) -> float | None:
    """Scale ``c`` fixed by the compounder/transform pairing, if a known pattern applies.

    Harris(a, k) with ``(1 + psi)**(-1/k)`` gives ``c = a**(-1/alpha)`` (``c = b``
    when psi is log-periodic with the same ``a``); a geometric law is
    Harris(1/p, 1); Degenerate(k) with ``exp(-psi)`` gives ``c = k**(-1/alpha)``.
    Discrete analogues share the scale of their source transform.
    """
    shape = transform_shape(X)
    if shape is None:
        return None
    outer, beta, psi = shape
    hk = _harris_params(P)
    c = None
    if hk is not None and outer == "power":
        a, k = hk
        if abs(beta * k - 1) < 1e-12:
            if psi.kind == "pure-power":
                c = a ** (-1 / psi.alpha)
            elif abs(psi.a - a) < 1e-12 * a:
                c = psi.b
    elif isinstance(P, Degenerate) and outer == "exp" and P.k >= 2:
        if psi.kind == "pure-power":
            c = P.k ** (-1 / psi.alpha)
        elif abs(psi.a - P.k) < 1e-12 * P.k:
            c = psi.b
    return c


def _residual_fn(P, X, grid):
    if isinstance(X, DiscretePgf):
        return lambda c: verify_discrete(P, X, c, grid, tol=math.inf).max_residual
    return lambda c: verify_continuous(P, X, c, grid, tol=math.inf).max_residual


def solve_scale(P: PgfFamily, X, bracket=(1e-6, 1 - 1e-6), grid=None,
                tol: float = DEFAULT_TOL, iterations: int = 60,
                coarse: int = 41) -> ScaleSolution:
    """Find the scale ``c`` making ``X`` stable under ``P``.

    Known compounder/transform pairings return their closed-form scale.
    Otherwise the max residual is minimised over ``log c``: a coarse scan
    locates the best cell, then golden-section search refines it. An
    unattainable tolerance is reported through ``stable=False``, not raised.
    """
    lo, hi = bracket
    if not 0 < lo < hi < 1:
        raise DomainError(f"bracket must satisfy 0 < lo < hi < 1, got {bracket!r}")
    c0 = closed_form_scale(P, X)
    if c0 is not None:
        rep = verify(P, X, c0, grid, tol)
        return ScaleSolution(c0, rep.max_residual, True, rep.passed, rep)

    f = _residual_fn(P, X, grid)
    xs = np.linspace(math.log(lo), math.log(hi), coarse)
    fs = np.array([f(math.exp(x)) for x in xs])
    i = int(np.argmin(fs))  # first minimum: ties go to the smaller c
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, coarse - 1)]
    g = (math.sqrt(5) - 1) / 2
    x1, x2 = b - g * (b - a), a + g * (b - a)
    f1, f2 = f(math.exp(x1)), f(math.exp(x2))
    for _ in range(iterations):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = f(math.exp(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = f(math.exp(x2))
    cands = [(fs[i], xs[i]), (f1, x1), (f2, x2)]
    best_f, best_x = min(cands, key=lambda p: (p[0], p[1]))
    c = math.exp(best_x)
    rep = verify(P, X, c, grid, tol)
    return ScaleSolution(c, rep.max_residual, False, rep.passed, rep)


# ---------------------------------------------------------------------------
# self-decomposability


def check_class_L_decomposition(phi: GeneralizedLinnik, a: float, grid=None) -> float:
    """Residual of ``phi(u) = phi(c u) * {a - (a-1) phi(c u)**k}**(-1/k)``, ``c = a**(-1/alpha)``.

    The factor multiplying ``phi(c u)`` is a compound CF, which is what puts
    these laws in class L. Requires ``nu = 1/k`` for a positive integer ``k``.
    """
    if not a > 1:
        raise DomainError(f"a must exceed 1, got {a!r}")
    k = round(1 / phi.nu)
    if k < 1 or abs(1 / phi.nu - k) > 1e-12:
        raise DomainError(f"nu must be 1/k for a positive integer k, got {phi.nu!r}")
    c = a ** (-1 / phi.alpha)
    u = _grid(grid, CF_GRID).points()
    inner = phi(c * u)
    factor = np.power(a - (a - 1) * inner**k, -1.0 / k)
    return float(np.max(np.abs(phi(u) - inner * factor)))
