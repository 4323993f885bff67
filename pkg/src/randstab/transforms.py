"""Transform families: Laplace transforms, characteristic functions, PGFs.

Every family is an immutable descriptor that evaluates itself on numpy
arrays. Real arguments are domain-checked; complex arguments are accepted
for analytic continuation (coefficient extraction), with the power bases
checked to stay in the right half-plane so the principal branch is
continuous along the contour.

Families round-trip through a compact text form ``tag:key=value,...``::

    >>> parse_descriptor("harris:a=2,k=2")
    Harris(a=2.0, k=2)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import ClassVar

import numpy as np

__all__ = [
    "DomainError",
    "ScaleFunction",
    "Family",
    "LtFamily",
    "Gamma",
    "MittagLeffler",
    "PositiveLinnik",
    "SemiML",
    "GenSemiML",
    "PositiveStable",
    "SemiStable",
    "CfFamily",
    "GeneralizedLinnik",
    "Linnik",
    "SemiAlphaLaplace",
    "GenSemiAlphaLaplace",
    "PgfFamily",
    "Harris",
    "Geometric1",
    "Sibuya",
    "Degenerate",
    "BernoulliShift",
    "eval_scale_fn",
    "check_scale_equation",
    "eval_lt",
    "eval_cf",
    "eval_pgf",
    "integer_power",
    "parse_descriptor",
    "register",
]

_AB_RTOL = 1e-14
_INT_ATOL = 1e-12


class DomainError(ValueError):
    """Argument or parameter outside the domain of an operation."""


def _as_array(x):
    arr = np.asarray(x)
    if arr.dtype.kind in "iub":
        arr = arr.astype(float)
    return arr


def _check_nonneg(x, name="s"):
    if not np.iscomplexobj(x) and np.any(x < 0):
        raise DomainError(f"{name} must be nonnegative, got min {np.min(x)!r}")


def _scalar_out(arr, like):
    return arr.item() if np.ndim(like) == 0 else arr


def integer_power(z, p: float):
    """``z**p``, using exact integer powers when ``p`` is integral.

    Non-integral powers use the principal branch.
    """
    k = round(p)
    if abs(p - k) < _INT_ATOL:
        return z**k if np.iscomplexobj(z) else np.power(z, float(k))
    return np.power(z, p)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


# ---------------------------------------------------------------------------
# scale functions


@dataclass(frozen=True)
class ScaleFunction:
    """Continuous ``psi`` with ``psi(0) = 0`` and ``psi(u) = a * psi(b * u)``.

    ``kind`` is ``"pure-power"`` (``lam * s**alpha``) or ``"log-periodic"``
    (``lam * s**alpha * (1 + eps * cos(2 pi ln s / ln(1/b)))``). The scaling
    factor ``a`` is always recomputed from ``b`` and ``alpha``; pass ``a``
    only to have it validated.
    """

    kind: str
    lam: float
    alpha: float
    b: float = 0.5
    epsilon: float = 0.0
    a: float = field(default=float("nan"))

    def __post_init__(self):
        if self.kind not in ("pure-power", "log-periodic"):
            raise DomainError(f"unknown scale function kind {self.kind!r}")
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam!r}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not 0 < self.b < 1:
            raise DomainError(f"b must lie in (0, 1), got {self.b!r}")
        if not 0 <= self.epsilon < 1:
            raise DomainError(f"epsilon must lie in [0, 1), got {self.epsilon!r}")
        if self.kind == "pure-power" and self.epsilon != 0:
            raise DomainError("a pure-power scale function has epsilon = 0")
        a = self.b ** (-self.alpha)
        if not math.isnan(self.a) and abs(self.a * self.b**self.alpha - 1) > _AB_RTOL:
            raise DomainError(
                f"a * b**alpha must equal 1; got a={self.a!r}, b={self.b!r}, "
                f"alpha={self.alpha!r}"
            )
        object.__setattr__(self, "a", a)

    @classmethod
    def pure_power(cls, lam: float = 1.0, alpha: float = 1.0, b: float = 0.5):
        return cls("pure-power", float(lam), float(alpha), float(b))

    @classmethod
    def log_periodic(cls, lam: float = 1.0, alpha: float = 0.5, b: float = 0.25,
                     epsilon: float = 0.05):
        if epsilon == 0:
            return cls.pure_power(lam, alpha, b)
        return cls("log-periodic", float(lam), float(alpha), float(b), float(epsilon))

    @property
    def period(self) -> float:
        """Log-period ``ln(1/b)`` of the modulation."""
        return -math.log(self.b)

    def __call__(self, s):
        s = _as_array(s)
        _check_nonneg(s)
        if self.kind == "pure-power":
            out = self.lam * integer_power(s, self.alpha)
            return _scalar_out(np.asarray(out), s)
        out = np.zeros(s.shape, dtype=complex if np.iscomplexobj(s) else float)
        nz = s != 0
        sn = s[nz]
        mod = 1 + self.epsilon * np.cos(2 * np.pi * np.log(sn) / self.period)
        out[nz] = self.lam * np.power(sn, self.alpha) * mod
        return _scalar_out(out, s)

    def ratio_at(self, x: float) -> float | None:
        """``k`` such that ``psi(x*s) = k*psi(s)`` for all ``s``, if one exists.

        Always exists for the pure power; for the log-periodic kind only
        when ``x`` is an integer power of ``b``.
        """
        if self.kind == "pure-power":
            return x**self.alpha
        n = math.log(x) / math.log(self.b)
        if abs(n - round(n)) < 1e-12:
            return self.a ** (-round(n))
        return None

    def is_increasing(self) -> bool:
        """Whether psi is strictly increasing on (0, inf)."""
        if self.kind == "pure-power":
            return True
        w = 2 * math.pi / self.period
        return self.alpha - self.epsilon * math.hypot(self.alpha, w) > 0

    def inverse(self, v):
        """Inverse of an increasing psi on real arguments (bisection for log-periodic)."""
        v = _as_array(v)
        if self.kind == "pure-power":
            return _scalar_out(np.asarray(np.power(v / self.lam, 1 / self.alpha)), v)
        if not self.is_increasing():
            raise DomainError("log-periodic psi is not monotone; no inverse")
        lo = np.zeros(v.shape)
        guess = np.power(np.maximum(v, 0) / self.lam, 1 / self.alpha)
        hi = np.maximum(guess, 1e-300) * (1 + self.epsilon) ** (1 / self.alpha) * 2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            low = self(mid) < v
            lo = np.where(low, mid, lo)
            hi = np.where(low, hi, mid)
        return _scalar_out(0.5 * (lo + hi), v)


def eval_scale_fn(psi: ScaleFunction, s):
    return psi(s)


def check_scale_equation(psi: ScaleFunction, grid, a: float | None = None) -> float:
    """Max relative residual of ``psi(s) = a * psi(b * s)`` over ``grid``.

    ``a`` defaults to the function's own scaling factor; passing another
    value measures how badly a mismatched pair fails.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0):
        raise DomainError("grid must be nonempty and strictly positive")
    a = psi.a if a is None else a
    lhs = psi(grid)
    return float(np.max(np.abs(lhs - a * psi(psi.b * grid)) / lhs))


# ---------------------------------------------------------------------------
# family base and registry

_REGISTRY: dict[str, type] = {}


def register(cls):
    _REGISTRY[cls.tag] = cls
    return cls


class Family:
    """Common descriptor behaviour: ``keys`` maps text keys to attributes."""

    tag: ClassVar[str]
    keys: ClassVar[dict[str, str]]
    n_params: ClassVar[int] = 1

    def params(self) -> dict:
        return {k: getattr(self, attr) for k, attr in self.keys.items()}

    def descriptor(self) -> str:
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params().items())
        return f"{self.tag}:{body}"

    def __str__(self):
        return self.descriptor()


def parse_descriptor(text: str, kind: type | tuple[type, ...] | None = None):
    """Build a family from its text form, e.g. ``gamma:beta=0.5``."""
    text = text.strip()
    tag, _, body = text.partition(":")
    tag = tag.strip().lower()
    cls = _REGISTRY.get(tag)
    if cls is None:
        raise DomainError(f"unknown family tag {tag!r}")
    if kind is not None and not issubclass(cls, kind):
        raise DomainError(f"family {tag!r} is not a {_kind_name(kind)}")
    kwargs = {}
    for item in filter(None, (p.strip() for p in body.split(","))):
        key, eq, value = item.partition("=")
        key = key.strip().lower()
        if not eq or key not in cls.keys:
            raise DomainError(f"malformed descriptor token {item!r} for {tag!r}")
        attr = cls.keys[key]
        ftype = {f.name: f.type for f in fields(cls)}[attr]
        try:
            if ftype in ("int", int):
                num = float(value)
                if num != int(num):
                    raise ValueError
                kwargs[attr] = int(num)
            else:
                kwargs[attr] = float(value)
        except ValueError:
            raise DomainError(f"malformed descriptor token {item!r} for {tag!r}") from None
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise DomainError(f"incomplete descriptor {text!r}: {exc}") from None


def _kind_name(kind):
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return kind.__name__


# ---------------------------------------------------------------------------
# Laplace transforms


class LtFamily(Family):
    """Laplace transform of the form ``g(psi(s))``.

    ``g`` is either ``(1 + x)**(-beta)`` (``outer == "power"``) or
    ``exp(-x)`` (``outer == "exp"``).
    """

    outer: ClassVar[str] = "power"

    @property
    def psi(self) -> ScaleFunction:
        raise NotImplementedError

    @property
    def beta(self) -> float:
        return 1.0

    def _validate(self):
        psi = self.psi
        if psi.alpha > 1:
            raise DomainError(f"alpha must lie in (0, 1] for a Laplace transform, got {psi.alpha!r}")
        if not psi.is_increasing():
            raise DomainError("log-periodic modulation too strong: psi is not increasing")
        if self.beta <= 0:
            raise DomainError(f"beta must be positive, got {self.beta!r}")

    def outer_fn(self, x):
        if self.outer == "exp":
            return np.exp(-x)
        base = 1 + x
        if np.iscomplexobj(base) and np.any(base.real <= 0):
            raise DomainError(
                "power base left the right half-plane on the contour; lower the radius"
            )
        return integer_power(base, -self.beta)

    def outer_inverse(self, t):
        if self.outer == "exp":
            return -np.log(t)
        return integer_power(t, -1 / self.beta) - 1

    def __call__(self, s):
        s = _as_array(s)
        _check_nonneg(s)
        return _scalar_out(np.asarray(self.outer_fn(np.asarray(self.psi(s)))), s)

    def inverse(self, t):
        """Closed-form inverse on (0, 1) for real arguments."""
        t = _as_array(t)
        return self.psi.inverse(self.outer_inverse(t))


@register
@dataclass(frozen=True)
class Gamma(LtFamily):
    beta_: float
    tag: ClassVar[str] = "gamma"
    keys: ClassVar[dict] = {"beta": "beta_"}

    def __post_init__(self):
        self._validate()

    @property
    def beta(self):
        return self.beta_

    @property
    def psi(self):
        return ScaleFunction.pure_power(1.0, 1.0)


@register
@dataclass(frozen=True)
class MittagLeffler(LtFamily):
    alpha: float
    lam: float = 1.0
    tag: ClassVar[str] = "ml"
    keys: ClassVar[dict] = {"alpha": "alpha", "lambda": "lam"}

    def __post_init__(self):
        self._validate()

    @property
    def psi(self):
        return ScaleFunction.pure_power(self.lam, self.alpha)


@register
@dataclass(frozen=True)
class PositiveLinnik(LtFamily):
    alpha: float
    lam: float = 1.0
    beta_: float = 1.0
    tag: ClassVar[str] = "plinnik"
    keys: ClassVar[dict] = {"alpha": "alpha", "lambda": "lam", "beta": "beta_"}
    n_params: ClassVar[int] = 3

    def __post_init__(self):
        self._validate()

    @property
    def beta(self):
        return self.beta_

    @property
    def psi(self):
        return ScaleFunction.pure_power(self.lam, self.alpha)


@register
@dataclass(frozen=True)
class PositiveStable(LtFamily):
    alpha: float
    lam: float = 1.0
    tag: ClassVar[str] = "pstable"
    keys: ClassVar[dict] = {"alpha": "alpha", "lambda": "lam"}
    outer: ClassVar[str] = "exp"

    def __post_init__(self):
        self._validate()

    @property
    def psi(self):
        return ScaleFunction.pure_power(self.lam, self.alpha)


class _SemiMixin:
    """Families parameterised by a (possibly log-periodic) scale function."""

    @property
    def psi(self):
        return ScaleFunction.log_periodic(self.lam, self.alpha, self.b, self.eps)

    @classmethod
    def from_psi(cls, psi: ScaleFunction, **extra):
        return cls(alpha=psi.alpha, lam=psi.lam, b=psi.b, eps=psi.epsilon, **extra)


@register
@dataclass(frozen=True)
class SemiML(_SemiMixin, LtFamily):
    alpha: float
    lam: float = 1.0
    b: float = 0.25
    eps: float = 0.05
    tag: ClassVar[str] = "semiml"
    keys: ClassVar[dict] = {"alpha": "alpha", "lambda": "lam", "b": "b", "eps": "eps"}

    def __post_init__(self):
        self._validate()


@register
@dataclass(frozen=True)
class GenSemiML(_SemiMixin, LtFamily):
    alpha: float
    lam: float = 1.0
    b: float = 0.25
    eps: float = 0.05
    beta_: float = 1.0
    tag: ClassVar[str] = "gensemiml"
    keys: ClassVar[dict] = {"alpha": "alpha", "lambda": "lam", "b": "b", "eps": "eps",
                            "beta": "beta_"}

    def __post_init__(self):
        self._validate()

    @property
    def beta(self):
        return self.beta_

    @classmethod
    def from_psi(cls, psi: ScaleFunction, beta: float = 1.0):
        return super().from_psi(psi, beta_=beta)


@register
@dataclass(frozen=True)
class SemiStable(_SemiMixin, LtFamily):
    alpha: float
    lam: float = 1.0
    b: float = 0.25
    eps: float = 0.05
    tag: ClassVar[str] = "semistable"
    keys: ClassVar[dict] = {"alpha": "alpha", "lambda": "lam", "b": "b", "eps": "eps"}
    outer: ClassVar[str] = "exp"

    def __post_init__(self):
        self._validate()


def eval_lt(f: LtFamily, s):
    return f(s)


# ---------------------------------------------------------------------------
# characteristic functions


class CfFamily(Family):
    """CF ``(1 + psi(|u|) * exp(-i theta sgn u))**(-nu)`` on the real line."""

    theta: float = 0.0

    @property
    def psi(self) -> ScaleFunction:
        raise NotImplementedError

    @property
    def nu(self) -> float:
        return 1.0

    def _validate(self):
        alpha = self.psi.alpha
        if not 0 < alpha <= 2:
            raise DomainError(f"alpha must lie in (0, 2] for a CF, got {alpha!r}")
        bound = min(math.pi * alpha / 2, math.pi - math.pi * alpha / 2)
        if abs(self.theta) > bound + 1e-15:
            raise DomainError(
                f"|theta| must not exceed min(pi*alpha/2, pi - pi*alpha/2) = {bound!r}"
            )
        if self.nu <= 0:
            raise DomainError(f"nu must be positive, got {self.nu!r}")

    def __call__(self, u):
        u = _as_array(u).astype(float)
        z = self.psi(np.abs(u)) * np.exp(-1j * self.theta * np.sign(u))
        out = integer_power(1 + z, -self.nu)
        return _scalar_out(np.asarray(out, dtype=complex), u)


@register
@dataclass(frozen=True)
class GeneralizedLinnik(CfFamily):
    alpha: float
    theta: float = 0.0
    nu_: float = 1.0
    lam: float = 1.0
    tag: ClassVar[str] = "gl"
    keys: ClassVar[dict] = {"alpha": "alpha", "theta": "theta", "nu": "nu_", "lambda": "lam"}
    n_params: ClassVar[int] = 4

    def __post_init__(self):
        self._validate()

    @property
    def nu(self):
        return self.nu_

    @property
    def psi(self):
        return ScaleFunction.pure_power(self.lam, self.alpha)


@register
@dataclass(frozen=True)
class Linnik(CfFamily):
    alpha: float
    lam: float = 1.0
    tag: ClassVar[str] = "linnik"
    keys: ClassVar[dict] = {"alpha": "alpha", "lambda": "lam"}

    def __post_init__(self):
        self._validate()

    @property
    def psi(self):
        return ScaleFunction.pure_power(self.lam, self.alpha)


@register
@dataclass(frozen=True)
class SemiAlphaLaplace(_SemiMixin, CfFamily):
    alpha: float
    lam: float = 1.0
    b: float = 0.25
    eps: float = 0.05
    tag: ClassVar[str] = "semilaplace"
    keys: ClassVar[dict] = {"alpha": "alpha", "lambda": "lam", "b": "b", "eps": "eps"}

    def __post_init__(self):
        self._validate()


@register
@dataclass(frozen=True)
class GenSemiAlphaLaplace(_SemiMixin, CfFamily):
    alpha: float
    lam: float = 1.0
    b: float = 0.25
    eps: float = 0.05
    nu_: float = 1.0
    tag: ClassVar[str] = "gensemilaplace"
    keys: ClassVar[dict] = {"alpha": "alpha", "lambda": "lam", "b": "b", "eps": "eps",
                            "nu": "nu_"}

    def __post_init__(self):
        self._validate()

    @property
    def nu(self):
        return self.nu_


def eval_cf(f: CfFamily, u):
    return f(u)


# ---------------------------------------------------------------------------
# probability generating functions


class PgfFamily(Family):
    """PGF of a nonnegative integer law, evaluable on the closed unit disk."""

    def _eval(self, t):
        raise NotImplementedError

    def __call__(self, t):
        t = _as_array(t)
        if np.iscomplexobj(t):
            rmax = float(np.max(np.abs(t))) if t.size else 0.0
            if rmax > 1 + 1e-12:
                raise DomainError(f"PGF argument radius {rmax!r} exceeds 1")
        elif np.any(t > 1 + 1e-12):
            raise DomainError(f"PGF argument {float(np.max(t))!r} exceeds 1")
        return _scalar_out(np.asarray(self._eval(t)), t)

    @staticmethod
    def _branch_power(base, p, t):
        if np.iscomplexobj(base) and np.any(base.real <= 0):
            rmax = float(np.max(np.abs(t)))
            raise DomainError(
                f"power base leaves the right half-plane at radius {rmax!r}; lower the radius"
            )
        return np.power(base, p)


@register
@dataclass(frozen=True)
class Harris(PgfFamily):
    """``t * (a - (a-1) t**k)**(-1/k)``; support {1, 1+k, 1+2k, ...}."""

    a: float
    k: int = 1
    tag: ClassVar[str] = "harris"
    keys: ClassVar[dict] = {"a": "a", "k": "k"}
    n_params: ClassVar[int] = 2

    def __post_init__(self):
        if not self.a > 1:
            raise DomainError(f"Harris requires a > 1, got {self.a!r}")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"Harris requires a positive integer k, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "a", float(self.a))

    def _eval(self, t):
        base = self.a - (self.a - 1) * t**self.k
        return t * self._branch_power(base, -1.0 / self.k, t)


@register
@dataclass(frozen=True)
class Geometric1(PgfFamily):
    """Geometric law on {1, 2, ...}: ``p t / (1 - (1-p) t)``."""

    p: float
    tag: ClassVar[str] = "geometric1"
    keys: ClassVar[dict] = {"p": "p"}

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")

    def _eval(self, t):
        return self.p * t / (1 - (1 - self.p) * t)


@register
@dataclass(frozen=True)
class Sibuya(PgfFamily):
    nu: float
    tag: ClassVar[str] = "sibuya"
    keys: ClassVar[dict] = {"nu": "nu"}

    def __post_init__(self):
        if not 0 < self.nu < 1:
            raise DomainError(f"nu must lie in (0, 1), got {self.nu!r}")

    def _eval(self, t):
        base = 1 - t
        if np.iscomplexobj(base):
            # 1 - t touches 0 only at t = 1, where the power is 0
            base = np.where(np.abs(base) < 1e-300, 1e-300, base)
        return 1 - self._branch_power(base, self.nu, t)


@register
@dataclass(frozen=True)
class Degenerate(PgfFamily):
    k: int
    tag: ClassVar[str] = "degenerate"
    keys: ClassVar[dict] = {"k": "k"}

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"k must be a nonnegative integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    def _eval(self, t):
        return t**self.k


@register
@dataclass(frozen=True)
class BernoulliShift(PgfFamily):
    """``1 - lam (1 - t)``: one unit retained with probability ``lam``."""

    lam: float
    tag: ClassVar[str] = "bernoulli"
    keys: ClassVar[dict] = {"lambda": "lam"}

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise DomainError(f"lambda must lie in (0, 1), got {self.lam!r}")

    def _eval(self, t):
        return 1 - self.lam * (1 - t)


def eval_pgf(f: PgfFamily, t):
    return f(t)
