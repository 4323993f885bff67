"""Discrete analogues of positive laws, binomial-thinning algebra and
coefficient extraction for PGFs."""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, ClassVar

import numpy as np

from .transforms import (
    BernoulliShift,
    DomainError,
    Gamma,
    GenSemiML,
    LtFamily,
    MittagLeffler,
    PgfFamily,
    PositiveLinnik,
    PositiveStable,
    SemiML,
    SemiStable,
    parse_descriptor,
    register,
)

__all__ = [
    "SibuyaBernoulli",
    "DiscretePgf",
    "PmfTable",
    "discretize",
    "as_discrete",
    "parse_discrete",
    "discrete_stable",
    "discrete_ml",
    "discrete_linnik",
    "discrete_gen_sml",
    "d_type_transform",
    "check_d_type",
    "auto_radius",
    "extract_pmf",
    "is_pgf_coeffs",
    "check_selfdecomp_discrete_stable",
    "compose_sibuya_bernoulli",
    "NEG_TOL",
]

NEG_TOL = 1e-10
_EPS = np.finfo(float).eps


@register
@dataclass(frozen=True)
class SibuyaBernoulli(PgfFamily):
    """``1 - delta (1 - t)**nu``: a Sibuya(nu) sum of Bernoulli(delta**(1/nu))."""

    delta: float
    nu: float
    tag: ClassVar[str] = "sibuyabernoulli"
    keys: ClassVar[dict] = {"delta": "delta", "nu": "nu"}
    n_params: ClassVar[int] = 2

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise DomainError(f"delta must lie in (0, 1], got {self.delta!r}")
        if not 0 < self.nu < 1:
            raise DomainError(f"nu must lie in (0, 1), got {self.nu!r}")

    def _eval(self, t):
        base = 1 - t
        if np.iscomplexobj(base):
            base = np.where(np.abs(base) < 1e-300, 1e-300, base)
            if np.any(base.real <= 0):
                raise DomainError("power base leaves the right half-plane; lower the radius")
        return 1 - self.delta * np.power(base, self.nu)


_CLOSED_TAGS = {
    PositiveStable: "DiscreteStable",
    MittagLeffler: "DiscreteML",
    PositiveLinnik: "DiscreteLinnik",
    Gamma: "DiscreteLinnik",
    SemiML: "DiscreteGenSML",
    GenSemiML: "DiscreteGenSML",
    SibuyaBernoulli: "SibuyaBernoulli",
}


@dataclass(frozen=True)
class DiscretePgf:
    """PGF ``Q`` built from an LT (``Q(s) = phi(thin * (1 - s))``) or a native PGF.

    ``thin`` is the accumulated binomial-thinning factor; a fresh analogue
    has ``thin == 1``. For a native source ``P`` the value is
    ``P(1 - thin * (1 - s))``.
    """

    source: LtFamily | PgfFamily
    thin: float = 1.0
    tag: str | None = None

    def __call__(self, s):
        s = np.asarray(s)
        if s.dtype.kind in "iub":
            s = s.astype(float)
        x = self.thin * (1 - s)
        if isinstance(self.source, LtFamily):
            return self.source(x)
        return self.source(1 - x)

    @property
    def from_lt(self) -> bool:
        return isinstance(self.source, LtFamily)

    def thinned(self, c: float) -> "DiscretePgf":
        return replace(self, thin=self.thin * c)

    def descriptor(self) -> str:
        base = self.source.descriptor()
        if self.from_lt:
            base = f"discrete[{base}]"
        if self.thin != 1.0:
            base = f"{base}|thin={self.thin!r}"
        return base

    def __str__(self):
        return self.descriptor()


def discretize(phi: LtFamily) -> DiscretePgf:
    """Discrete analogue ``Q(s) = phi(1 - s)`` of a Laplace transform."""
    if isinstance(phi, SemiStable) and phi.eps == 0:
        phi = PositiveStable(phi.alpha, phi.lam)
    return DiscretePgf(phi, 1.0, _CLOSED_TAGS.get(type(phi)))


def discrete_stable(lam: float, alpha: float) -> DiscretePgf:
    return discretize(PositiveStable(alpha, lam))


def discrete_ml(lam: float, alpha: float) -> DiscretePgf:
    return discretize(MittagLeffler(alpha, lam))


def discrete_linnik(lam: float, alpha: float, beta: float) -> DiscretePgf:
    return discretize(PositiveLinnik(alpha, lam, beta))


def discrete_gen_sml(psi, beta: float) -> DiscretePgf:
    return discretize(GenSemiML.from_psi(psi, beta))


_DISCRETE_TAGS = {"dstable": "pstable", "dml": "ml", "dlinnik": "plinnik",
                  "dgensml": "gensemiml"}


def parse_discrete(text: str) -> DiscretePgf:
    """Parse ``dml:alpha=0.5,lambda=1`` style descriptors (or any LT/PGF descriptor)."""
    tag, sep, body = text.strip().partition(":")
    tag = _DISCRETE_TAGS.get(tag.strip().lower(), tag)
    return as_discrete(parse_descriptor(tag + sep + body))


def as_discrete(obj) -> DiscretePgf:
    if isinstance(obj, DiscretePgf):
        return obj
    if isinstance(obj, LtFamily):
        return discretize(obj)
    if isinstance(obj, PgfFamily):
        return DiscretePgf(obj, 1.0, _CLOSED_TAGS.get(type(obj)))
    raise DomainError(f"cannot treat {obj!r} as a discrete PGF")


def d_type_transform(Q, c: float) -> DiscretePgf:
    """``s -> Q(1 - c + c s)``, the PGF of the binomial ``c``-thinning of Q's law."""
    if not 0 < c < 1:
        raise DomainError(f"thinning factor must lie in (0, 1), got {c!r}")
    return as_discrete(Q).thinned(c)


def check_d_type(Q1, Q2, c: float, grid) -> float:
    """Max of ``|Q1(s) - Q2(1 - c + c s)|`` over ``grid``: zero iff same D-type at ``c``."""
    grid = np.asarray(grid, dtype=float)
    return float(np.max(np.abs(Q1(grid) - Q2(1 - c + c * grid))))


# ---------------------------------------------------------------------------
# coefficient extraction


@dataclass
class PmfTable:
    coeffs: np.ndarray
    radius: float
    mass_deficiency: float
    first_negative_index: int | None

    @classmethod
    def from_coeffs(cls, coeffs, radius: float, neg_tol: float = NEG_TOL) -> "PmfTable":
        coeffs = np.asarray(coeffs, dtype=float)
        neg = np.flatnonzero(coeffs < -neg_tol)
        return cls(
            coeffs=coeffs,
            radius=float(radius),
            mass_deficiency=float(1.0 - coeffs.sum()),
            first_negative_index=int(neg[0]) if neg.size else None,
        )

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def to_dict(self) -> dict:
        return {
            "coeffs": [float(x) for x in self.coeffs],
            "mass_deficiency": self.mass_deficiency,
            "first_negative_index": self.first_negative_index,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "p_n"])
        for n, p in enumerate(self.coeffs):
            w.writerow([n, repr(float(p))])
        return buf.getvalue()


def auto_radius(n_max: int) -> float:
    """Contour radius balancing aliasing ``r**(4 n)`` against round-off ``eps / r**n``."""
    return float(_EPS ** (1.0 / (5.0 * max(n_max, 1))))


def extract_pmf(Q: Callable, n_max: int = 64, radius: float | None = None,
                neg_tol: float = NEG_TOL) -> PmfTable:
    """Taylor coefficients ``p_0 .. p_n_max`` of ``Q`` by a trapezoidal contour sum.

    ``Q`` is sampled at ``m = 4 * n_max`` points on the circle ``|s| = radius``
    and the coefficients read off a discrete Fourier transform. Accuracy is
    roughly ``radius**m + eps / radius**n_max``, so ``radius=None`` picks the
    radius balancing the two. Branch-unsafe contours raise ``DomainError``.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be positive, got {n_max!r}")
    r = auto_radius(n_max) if radius is None else float(radius)
    if not 0 < r < 1:
        raise DomainError(f"radius must lie in (0, 1), got {r!r}")
    if _EPS * r ** (-float(n_max)) > 1e-6:
        warnings.warn(f"radius {r!r} amplifies round-off by {r ** -float(n_max):.1e} at "
                      f"n_max={n_max}; high coefficients are unreliable", RuntimeWarning,
                      stacklevel=2)
    m = 4 * n_max
    z = r * np.exp(2j * np.pi * np.arange(m) / m)
    try:
        vals = np.asarray(Q(z), dtype=complex)
    except DomainError as exc:
        raise DomainError(f"{exc} (radius {r!r})") from None
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"PGF not finite on the contour of radius {r!r}; lower the radius")
    n = np.arange(n_max + 1)
    coeffs = (np.fft.fft(vals) / m)[: n_max + 1].real * r ** (-n.astype(float))
    return PmfTable.from_coeffs(coeffs, r, neg_tol)


def is_pgf_coeffs(table: PmfTable, tol: float = NEG_TOL) -> tuple[bool, int | None]:
    """Nonnegativity verdict on extracted coefficients, with first offending index."""
    neg = np.flatnonzero(table.coeffs < -tol)
    first = int(neg[0]) if neg.size else None
    return (first is None and table.mass_deficiency >= -tol), first


# ---------------------------------------------------------------------------
# discrete identities


def check_selfdecomp_discrete_stable(lam: float, alpha: float, c: float, grid,
                                     Q: Callable | None = None) -> float:
    """Residual of ``Q(s) = Q(1 - c(1-s)) Q(1 - (1 - c**alpha)**(1/alpha) (1-s))``.

    ``Q`` defaults to the discrete stable PGF with the given parameters; pass
    another PGF to see the identity fail.
    """
    if not 0 < c < 1:
        raise DomainError(f"c must lie in (0, 1), got {c!r}")
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    Q = discrete_stable(lam, alpha) if Q is None else Q
    s = np.asarray(grid, dtype=float)
    d = (1 - c**alpha) ** (1 / alpha)
    if isinstance(Q, DiscretePgf):
        # thinning in place of Q(1 - d (1 - s)) avoids cancellation when d is tiny
        rhs = Q.thinned(c)(s) * Q.thinned(d)(s)
    else:
        rhs = Q(1 - c * (1 - s)) * Q(1 - d * (1 - s))
    return float(np.max(np.abs(Q(s) - rhs)))


def compose_sibuya_bernoulli(lam: float, delta: float, nu: float, grid) -> float:
    """Residual of ``P(Q(s))`` against ``1 - lam delta (1-s)**nu``.

    ``P(s) = 1 - lam (1 - s)`` and ``Q(s) = 1 - delta (1 - s)**nu``.
    """
    for name, v in (("lambda", lam), ("delta", delta), ("nu", nu)):
        if not 0 < v < 1:
            raise DomainError(f"{name} must lie in (0, 1), got {v!r}")
    s = np.asarray(grid, dtype=float)
    P = BernoulliShift(lam)
    Q = SibuyaBernoulli(delta, nu)
    closed = 1 - lam * delta * (1 - s) ** nu
    return float(np.max(np.abs(P(Q(s)) - closed)))


def poisson_table(mean: float, n_max: int) -> PmfTable:
    """Exact Poisson masses; a convenience oracle for thinning checks."""
    n = np.arange(n_max + 1)
    logp = -mean + n * math.log(mean) - np.array([math.lgamma(k + 1) for k in n])
    return PmfTable.from_coeffs(np.exp(logp), radius=float("nan"))

