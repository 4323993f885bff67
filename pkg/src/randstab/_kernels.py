"""Hot loops, compiled with numba when available.

Set ``RANDSTAB_NUMBA=0`` to force the pure-numpy versions. Both backends
consume the same uniform/exponential inputs, so they agree to round-off.
"""
from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

__all__ = [
    "backend",
    "kernels",
    "NUMPY",
    "NUMBA",
    "kanter_positive_stable",
    "cms_symmetric_stable",
    "segment_sum",
    "ks_statistic",
    "empirical_lt",
]


# ---------------------------------------------------------------------------
# numpy reference versions


def _kanter_np(u, e, alpha):
    # u ~ U(0, pi), e ~ Exp(1); LT exp(-s**alpha)
    a = (np.sin(alpha * u) / np.sin(u)) ** (1.0 / (1.0 - alpha)) \
        * np.sin((1.0 - alpha) * u) / np.sin(alpha * u)
    return (a / e) ** ((1.0 - alpha) / alpha)


def _cms_np(v, w, alpha):
    # v ~ U(-pi/2, pi/2), w ~ Exp(1); CF exp(-|u|**alpha)
    if alpha == 1.0:
        return np.tan(v)
    return np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha) \
        * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha)


def _segment_sum_np(values, counts):
    out = np.zeros(len(counts))
    nz = counts > 0
    if values.size:
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        out[nz] = np.add.reduceat(values, starts[nz])
    return out


def _ks_np(a, b):
    allv = np.concatenate([a, b])
    fa = np.searchsorted(a, allv, side="right") / len(a)
    fb = np.searchsorted(b, allv, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def _elt_np(x, s):
    return np.exp(-np.outer(s, x)).mean(axis=1)


NUMPY = SimpleNamespace(
    name="numpy",
    kanter_positive_stable=_kanter_np,
    cms_symmetric_stable=_cms_np,
    segment_sum=_segment_sum_np,
    ks_statistic=_ks_np,
    empirical_lt=_elt_np,
)


# ---------------------------------------------------------------------------
# numba versions


def _build_numba():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        return None

    @njit(cache=False)
    def kanter(u, e, alpha):
        out = np.empty(u.shape[0])
        p = 1.0 / (1.0 - alpha)
        q = (1.0 - alpha) / alpha
        for i in range(u.shape[0]):
            ui = u[i]
            sa = math.sin(alpha * ui)
            a = (sa / math.sin(ui)) ** p * math.sin((1.0 - alpha) * ui) / sa
            out[i] = (a / e[i]) ** q
        return out

    @njit(cache=False)
    def cms(v, w, alpha):
        out = np.empty(v.shape[0])
        if alpha == 1.0:
            for i in range(v.shape[0]):
                out[i] = math.tan(v[i])
            return out
        q = (1.0 - alpha) / alpha
        for i in range(v.shape[0]):
            vi = v[i]
            out[i] = (math.sin(alpha * vi) / math.cos(vi) ** (1.0 / alpha)
                      * (math.cos((1.0 - alpha) * vi) / w[i]) ** q)
        return out

    @njit(cache=False)
    def segment_sum(values, counts):
        out = np.zeros(counts.shape[0])
        k = 0
        for i in range(counts.shape[0]):
            acc = 0.0
            for _ in range(counts[i]):
                acc += values[k]
                k += 1
            out[i] = acc
        return out

    @njit(cache=False)
    def ks(a, b):
        na, nb = a.shape[0], b.shape[0]
        i = j = 0
        d = 0.0
        while i < na and j < nb:
            x = min(a[i], b[j])
            while i < na and a[i] <= x:
                i += 1
            while j < nb and b[j] <= x:
                j += 1
            diff = abs(i / na - j / nb)
            if diff > d:
                d = diff
        return d

    @njit(cache=False)
    def elt(x, s):
        out = np.empty(s.shape[0])
        for k in range(s.shape[0]):
            acc = 0.0
            for i in range(x.shape[0]):
                acc += math.exp(-s[k] * x[i])
            out[k] = acc / x.shape[0]
        return out

    return SimpleNamespace(
        name="numba",
        kanter_positive_stable=kanter,
        cms_symmetric_stable=cms,
        segment_sum=segment_sum,
        ks_statistic=lambda a, b: float(ks(a, b)),
        empirical_lt=elt,
    )


NUMBA = _build_numba()


def _select():
    if os.environ.get("RANDSTAB_NUMBA", "1").strip().lower() in ("0", "false", "no", "off"):
        return NUMPY
    return NUMBA if NUMBA is not None else NUMPY


kernels = _select()


def backend() -> str:
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return kernels.name


def _f64(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def kanter_positive_stable(u, e, alpha: float) -> np.ndarray:
    return kernels.kanter_positive_stable(_f64(u), _f64(e), float(alpha))


def cms_symmetric_stable(v, w, alpha: float) -> np.ndarray:
    return kernels.cms_symmetric_stable(_f64(v), _f64(w), float(alpha))


def segment_sum(values, counts) -> np.ndarray:
    """Sums of consecutive runs of ``values`` with lengths ``counts``."""
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    values = _f64(values)
    if values.shape[0] != counts.sum():
        raise ValueError("segment lengths do not add up to the number of values")
    return kernels.segment_sum(values, counts)


def ks_statistic(a_sorted, b_sorted) -> float:
    """Two-sample sup distance between empirical CDFs of two sorted arrays."""
    return kernels.ks_statistic(_f64(a_sorted), _f64(b_sorted))


def empirical_lt(x, s) -> np.ndarray:
    """``mean(exp(-s x))`` for each ``s``."""
    return kernels.empirical_lt(_f64(x), _f64(np.atleast_1d(s)))
