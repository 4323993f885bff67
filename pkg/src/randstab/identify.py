"""Recover the compounding law N from the law of X.

If ``P(phi(c s)) = phi(s)`` then ``P(t) = phi(phi_c^{-1}(t))`` with
``phi_c(s) = phi(c s)``; for a discrete ``Q`` the analogue is
``P(t) = Q(Q_c^{-1}(t))`` with ``Q_c(s) = Q(1 - c + c s)``. The curve is
computed by monotone inversion on the real line, then tested for being a
PGF by extracting its power-series coefficients.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares

from .discrete import (
    NEG_TOL,
    DiscretePgf,
    PmfTable,
    as_discrete,
    auto_radius,
    extract_pmf,
    is_pgf_coeffs,
)
from .stability import transform_shape
from .transforms import (
    Degenerate,
    DomainError,
    Family,
    Geometric1,
    Harris,
    LtFamily,
    PgfFamily,
    Sibuya,
    integer_power,
)

__all__ = [
    "invert_monotone_transform",
    "CompounderCurve",
    "Match",
    "IdentifiedCompounder",
    "classify_compounder",
    "identify_from_lt",
    "identify_from_pgf",
    "identify",
    "identify_sweep",
    "check_power_pgf",
    "MATCH_TOL",
    "DEFAULT_CANDIDATES",
]

MATCH_TOL = 1e-8
TRACKED_NEG_TOL = 1e-6
DEFAULT_CANDIDATES = ("degenerate", "geometric1", "harris", "sibuya")

_LO0, _HI0, _CAP, _ITERS = 1e-12, 1.0, 1e9, 200


def _bisect(f, t, lo, hi, iters=_ITERS, increasing=False):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = f(mid) > t
        go_right = ~above if increasing else above
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    return 0.5 * (lo + hi)


def invert_monotone_transform(f: Callable, t, tol: float = 1e-14,
                              decreasing: bool | None = None):
    """Solve ``f(s) = t`` for a monotone transform.

    Laplace transforms (decreasing on ``(0, inf)``) are bracketed from
    ``[1e-12, 1]``, expanding the upper end by doubling up to ``1e9``.
    PGFs (increasing) are bracketed in ``[0, 1]``; discrete analogues of
    Laplace transforms stay defined below 0, so their lower end is pushed
    down by doubling when ``f(0) >= t``. ``t`` outside the attainable range
    raises ``DomainError``.
    """
    if decreasing is None:
        if isinstance(f, LtFamily):
            decreasing = True
        elif isinstance(f, (PgfFamily, DiscretePgf)):
            decreasing = False
        else:
            raise DomainError("orientation of a bare callable must be given via `decreasing`")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any((t_arr <= 0) | (t_arr >= 1)):
        raise DomainError("inversion target must lie strictly inside (0, 1)")

    if decreasing:
        lo = np.full(t_arr.shape, _LO0)
        lo = np.where(f(lo) > t_arr, lo, 0.0)
        hi = np.full(t_arr.shape, _HI0)
        while True:
            short = f(hi) > t_arr
            if not np.any(short):
                break
            if np.max(hi) >= _CAP:
                bad = t_arr[short][0]
                raise DomainError(f"t={bad!r} is below the transform's range on [0, {_CAP:g}]")
            hi = np.where(short, hi * 2, hi)
        s = _bisect(f, t_arr, lo, hi)
    else:
        lo = np.zeros(t_arr.shape)
        hi = np.ones(t_arr.shape)
        step = 1.0
        while True:
            high = f(lo) >= t_arr
            if not np.any(high):
                break
            if step > _CAP:
                bad = t_arr[high][0]
                raise DomainError(f"t={bad!r} is below the PGF's attainable range")
            lo = np.where(high, -step, lo)
            step *= 2
        s = _bisect(f, t_arr, lo, hi, increasing=True)
    err = np.abs(f(s) - t_arr)
    if np.any(err > max(tol, 64 * np.finfo(float).eps)):
        raise DomainError(f"inversion did not converge (residual {float(err.max())!r})")
    return s.item() if np.ndim(t) == 0 else s


# ---------------------------------------------------------------------------
# the identified curve


class CompounderCurve:
    """``t -> X(X_c^{-1}(t))`` on (0, 1), with a closed-form continuation when known."""

    def __init__(self, source: LtFamily | DiscretePgf, c: float):
        if not 0 < c < 1:
            raise DomainError(f"c must lie in (0, 1), got {c!r}")
        self.source = source
        self.c = float(c)
        if isinstance(source, LtFamily):
            self._scaled = lambda s: source(self.c * np.asarray(s))
        else:
            self._scaled = source.thinned(self.c)
        self._kappa, self._outer, self._beta = self._closed_form()

    def _closed_form(self):
        shape = transform_shape(self.source)
        if shape is None:
            return None, None, None
        outer, beta, psi = shape
        return psi.ratio_at(1 / self.c), outer, beta

    def __call__(self, t):
        decreasing = isinstance(self.source, LtFamily)
        s = invert_monotone_transform(self._scaled, t, decreasing=decreasing)
        return self.source(s)

    @property
    def has_continuation(self) -> bool:
        return self._kappa is not None

    def continuation(self, z):
        """Closed form of the curve, evaluated with principal branches.

        ``exp(-psi)`` sources give ``z**kappa``; ``(1 + psi)**(-beta)``
        sources give ``z (kappa - (kappa - 1) z**(1/beta))**(-beta)``, where
        ``psi(s / c) = kappa psi(s)``. Non-integral powers of ``z`` are not
        analytic at 0, which the coefficient test then exposes.
        """
        if self._kappa is None:
            raise DomainError("no closed-form continuation for this source and c")
        z = np.asarray(z)
        k = self._kappa
        if self._outer == "exp":
            return integer_power(z, k)
        base = k - (k - 1) * integer_power(z, 1 / self._beta)
        return z * integer_power(base, -self._beta)


# ---------------------------------------------------------------------------
# classification


@dataclass
class Match:
    family: PgfFamily
    sup_distance: float

    def to_dict(self) -> dict:
        return {"family": self.family.tag, "params": self.family.params(),
                "sup_distance": self.sup_distance}


def _fit_points(n: int = 50) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def _refine(make, x0, lower, upper, t, y):
    def resid(x):
        try:
            return make(*map(float, x))(t) - y
        except DomainError:
            return np.full_like(y, 1e3)

    x0 = np.clip(np.atleast_1d(np.asarray(x0, dtype=float)), lower, upper)
    sol = least_squares(resid, x0, bounds=(lower, upper), xtol=1e-15, ftol=1e-15,
                        gtol=1e-15, method="trf")
    fam = make(*map(float, sol.x))
    return fam, float(np.max(np.abs(fam(t) - y)))


def _fit_degenerate(t, y, fixed):
    if "k" in fixed:
        ks = [int(fixed["k"])]
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            est = np.log(y) / np.log(t)
        est = est[np.isfinite(est)]
        if est.size == 0:
            return []
        ks = sorted({max(int(np.floor(np.median(est))), 0),
                     max(int(np.ceil(np.median(est))), 0)})
    out = []
    for k in ks:
        fam = Degenerate(k)
        out.append((fam, float(np.max(np.abs(fam(t) - y)))))
    return out


def _fit_geometric(t, y, fixed):
    if "p" in fixed:
        fam = Geometric1(fixed["p"])
        return [(fam, float(np.max(np.abs(fam(t) - y))))]
    with np.errstate(divide="ignore", invalid="ignore"):
        est = y * (1 - t) / (t * (1 - y))
    est = est[np.isfinite(est)]
    p0 = float(np.median(est)) if est.size else 0.5
    lo, hi = 1e-12, 1 - 1e-12
    return [_refine(Geometric1, p0, lo, hi, t, y)]


def _fit_harris(t, y, fixed, kmax=8):
    ks = [int(fixed["k"])] if "k" in fixed else range(1, kmax + 1)
    out = []
    for k in ks:
        if "a" in fixed:
            fam = Harris(fixed["a"], k)
            out.append((fam, float(np.max(np.abs(fam(t) - y)))))
            continue
        tk = t**k
        with np.errstate(divide="ignore", invalid="ignore"):
            est = ((t / y) ** k - tk) / (1 - tk)
        est = est[np.isfinite(est) & (est > 1)]
        a0 = float(np.median(est)) if est.size else 2.0
        out.append(_refine(lambda a, k=k: Harris(a, k), a0, 1 + 1e-12, 1e12, t, y))
    return out


def _fit_sibuya(t, y, fixed):
    if "nu" in fixed:
        fam = Sibuya(fixed["nu"])
        return [(fam, float(np.max(np.abs(fam(t) - y))))]
    with np.errstate(divide="ignore", invalid="ignore"):
        est = np.log1p(-y) / np.log1p(-t)
    est = est[np.isfinite(est)]
    nu0 = float(np.median(est)) if est.size else 0.5
    return [_refine(Sibuya, nu0, 1e-12, 1 - 1e-12, t, y)]


_FITTERS = {
    "degenerate": _fit_degenerate,
    "geometric1": _fit_geometric,
    "harris": _fit_harris,
    "sibuya": _fit_sibuya,
}


def _candidate(spec) -> tuple[str, dict]:
    if isinstance(spec, Family):
        return spec.tag, spec.params()
    tag, _, body = str(spec).partition(":")
    tag = tag.strip().lower()
    if tag not in _FITTERS:
        raise DomainError(f"no fitter for candidate family {tag!r}")
    fixed = {}
    if body:
        for item in body.split(","):
            key, _, value = item.partition("=")
            fixed[key.strip().lower()] = float(value)
    return tag, fixed


def classify_compounder(curve: Callable, candidates: Sequence = DEFAULT_CANDIDATES,
                        n_points: int = 50) -> Match | None:
    """Best-fitting candidate PGF for ``curve``, if its sup-distance is below ``MATCH_TOL``.

    Candidates are family tags, optionally with some parameters pinned
    (``"harris:k=2"``). Ties below the tolerance go to the family with the
    fewest parameters.
    """
    t = _fit_points(n_points)
    y = np.asarray(curve(t), dtype=float)
    fits = []
    for spec in candidates:
        tag, fixed = _candidate(spec)
        fits.extend(_FITTERS[tag](t, y, fixed))
    good = [(fam, d) for fam, d in fits if d < MATCH_TOL]
    if not good:
        return None
    fam, d = min(good, key=lambda p: (p[0].n_params, p[1]))
    return Match(fam, d)


# ---------------------------------------------------------------------------
# identification


@dataclass
class IdentifiedCompounder:
    transform: str
    c: float
    curve: CompounderCurve
    pmf: PmfTable
    verdict: str
    matched: Match | None
    route: str

    @property
    def valid(self) -> bool:
        return self.verdict == "valid-pgf"

    def to_dict(self) -> dict:
        return {
            "transform": self.transform,
            "c": self.c,
            "verdict": self.verdict,
            "matched": self.matched.to_dict() if self.matched else None,
            "pmf": self.pmf.to_dict(),
        }

    def curve_csv(self, n: int = 99) -> str:
        t = (np.arange(n) + 1) / (n + 1)
        q = self.curve(t)
        buf = io.StringIO()
        buf.write("t,Q\n")
        for a, b in zip(t.tolist(), np.asarray(q).tolist()):
            buf.write(f"{a!r},{b!r}\n")
        return buf.getvalue()


def _psi_log(psi, tau):
    """``psi(exp(tau))`` and its ``tau``-derivative; entire in ``tau``."""
    e = psi.lam * np.exp(psi.alpha * tau)
    if psi.kind == "pure-power":
        return e, psi.alpha * e
    w = 2 * np.pi / psi.period
    return (e * (1 + psi.epsilon * np.cos(w * tau)),
            e * (psi.alpha * (1 + psi.epsilon * np.cos(w * tau))
                 - psi.epsilon * w * np.sin(w * tau)))


def _solve_tau(psi, target, tau, iters=50):
    for _ in range(iters):
        v, d = _psi_log(psi, tau)
        step = (v - target) / d
        tau = tau - step
        if abs(step) <= 1e-15 * max(1.0, abs(tau)):
            return tau, True
    v, _ = _psi_log(psi, tau)
    return tau, abs(v - target) <= 1e-12 * max(1.0, abs(target))


def _tracked_table(curve: CompounderCurve, n_max: int) -> PmfTable:
    """Coefficients by numerically continuing the curve around the contour.

    With ``tau = log s`` the curve is ``g(psi(e**(tau - log c)))`` where
    ``psi(e**tau) = g^{-1}(t)``. ``psi`` is entire in ``tau`` and ``g^{-1}(t)``
    is explicit along the arc, so the root is followed by Newton steps from
    the real solution at ``t = r`` over the upper half circle, and the outer
    logarithm is unwrapped step by step instead of taking principal branches.
    The lower half follows by conjugate symmetry.
    """
    shape = transform_shape(curve.source)
    if shape is None:
        raise DomainError("numerical continuation needs a Laplace-transform source")
    outer, beta, psi = shape
    r = auto_radius(n_max)
    m = 4 * n_max
    half = m // 2
    lc = math.log(curve.c)

    def g_inv(theta):
        logt = math.log(r) + 1j * theta
        return -logt if outer == "exp" else np.exp(-logt / beta) - 1

    tau = complex(math.log(float(psi.inverse(g_inv(0.0).real))))
    prev_log = None
    vals = np.empty(half + 1, dtype=complex)
    for j in range(half + 1):
        hi = 2 * np.pi * j / m
        lo = 2 * np.pi * max(j - 1, 0) / m
        at = lo if j else hi
        while True:
            step = hi - at
            while True:
                cand, ok = _solve_tau(psi, g_inv(at + step), tau)
                if ok:
                    break
                step /= 2
                if step < 1e-9:
                    raise DomainError("numerical continuation of the inverse failed")
            tau, at = cand, at + step
            v, _ = _psi_log(psi, tau - lc)
            if outer == "power":
                lg = np.log(1 + v)
                if prev_log is not None:
                    lg += 2j * np.pi * np.round((prev_log - lg).imag / (2 * np.pi))
                prev_log = lg
            if at >= hi:
                break
        vals[j] = np.exp(-v) if outer == "exp" else np.exp(-beta * prev_log)
    full = np.concatenate([vals, np.conj(vals[1:half][::-1])])
    if not np.all(np.isfinite(full)):
        raise DomainError("continued curve is not finite on the contour")
    n = np.arange(n_max + 1)
    coeffs = (np.fft.fft(full) / m)[: n_max + 1].real * r ** (-n.astype(float))
    return PmfTable.from_coeffs(coeffs, r, neg_tol=TRACKED_NEG_TOL)


def _identify(source, c: float, n_max: int, candidates, route: str | None) -> IdentifiedCompounder:
    curve = CompounderCurve(source, c)
    match = classify_compounder(curve, candidates)
    if route is None:
        if match is not None:
            route = "matched"
        elif curve.has_continuation:
            route = "continuation"
        else:
            route = "tracked"
    if route == "matched":
        if match is None:
            raise DomainError("no candidate family matches the curve")
        pmf, tol = extract_pmf(match.family, n_max), NEG_TOL
    elif route == "continuation":
        pmf, tol = extract_pmf(curve.continuation, n_max), NEG_TOL
    elif route == "tracked":
        pmf, tol = _tracked_table(curve, n_max), TRACKED_NEG_TOL
    else:
        raise DomainError(f"unknown extraction route {route!r}")
    ok, _ = is_pgf_coeffs(pmf, tol)
    verdict = "valid-pgf" if ok else "not-a-pgf"
    if not ok:
        match = None
    desc = source.descriptor()
    return IdentifiedCompounder(desc, float(c), curve, pmf, verdict, match, route)


def identify_from_lt(phi: LtFamily, c: float, n_max: int = 64,
                     candidates=DEFAULT_CANDIDATES, route: str | None = None) -> IdentifiedCompounder:
    """Compounder PGF ``phi(phi_c^{-1}(t))`` for a Laplace transform ``phi``.

    Coefficients come from the matched family when one fits, else from the
    curve's closed-form continuation, else from numerically continuing the
    inverse around the contour (``route`` forces one of ``"matched"``,
    ``"continuation"``, ``"tracked"``).
    """
    return _identify(phi, c, n_max, candidates, route)


def identify_from_pgf(Q, c: float, n_max: int = 64, candidates=DEFAULT_CANDIDATES,
                      route: str | None = None) -> IdentifiedCompounder:
    """Compounder PGF ``Q(Q_c^{-1}(t))``, ``Q_c(s) = Q(1 - c + c s)``."""
    return _identify(as_discrete(Q), c, n_max, candidates, route)


def identify(X, c: float, **kw) -> IdentifiedCompounder:
    if isinstance(X, LtFamily):
        return identify_from_lt(X, c, **kw)
    return identify_from_pgf(X, c, **kw)


def identify_sweep(X, cs: Sequence[float], **kw) -> list[IdentifiedCompounder]:
    """Identify at each ``c``; results are returned in the order of ``cs``."""
    return [identify(X, float(c), **kw) for c in cs]


def check_power_pgf(P: PgfFamily, u: float, n_max: int = 64) -> bool:
    """Whether ``s -> P(s**u)`` has a nonnegative power series.

    ``s**u`` uses the principal branch; for non-integral ``u`` the composed
    function is not analytic at 0 and the contour coefficients turn negative.
    """
    if not u > 0:
        raise DomainError(f"u must be positive, got {u!r}")
    table = extract_pmf(lambda s: P(integer_power(np.asarray(s), u)), n_max)
    return is_pgf_coeffs(table)[0]

