"""Seeded samplers for the positive, symmetric and integer-valued families."""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .discrete import DiscretePgf, SibuyaBernoulli, as_discrete, extract_pmf
from .transforms import (
    BernoulliShift,
    CfFamily,
    Degenerate,
    DomainError,
    Geometric1,
    Harris,
    LtFamily,
    PgfFamily,
    Sibuya,
)

__all__ = [
    "DEFAULT_SEED",
    "RandomSource",
    "SampleBatch",
    "sample_positive_stable",
    "sample_gen_ml",
    "sample_lt",
    "sample_symmetric_cf",
    "sample_compounder",
    "sample_discrete_via_poisson_mixture",
    "sample_discrete",
    "binomial_thin",
    "sample_random_sum",
    "sampler_for",
    "MAX_TOTAL_DRAWS",
]

DEFAULT_SEED = 0xC0FFEE
MAGIC = b"RSTB"
MAX_TOTAL_DRAWS = 50_000_000
_POISSON_NORMAL_CUTOFF = 1e12
_INT_CAP = float(2**62)


@dataclass(frozen=True)
class RandomSource:
    """Philox stream keyed by ``(master_seed, stream_index, *path)``.

    Every call to :meth:`generator` restarts the stream, so a batch is a pure
    function of its key. Use :meth:`child` for independent sub-streams.
    """

    master_seed: int = DEFAULT_SEED
    stream_index: int = 0
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.master_seed!r}")
        if self.stream_index < 0:
            raise DomainError(f"stream index must be nonnegative, got {self.stream_index!r}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed,
                                    spawn_key=(self.stream_index, *self.path))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, i: int) -> "RandomSource":
        return RandomSource(self.master_seed, self.stream_index, (*self.path, int(i)))


def _src(src) -> RandomSource:
    if src is None:
        return RandomSource()
    if isinstance(src, RandomSource):
        return src
    return RandomSource(int(src))


@dataclass
class SampleBatch:
    values: np.ndarray
    family: str
    seed: int
    stream: int
    discrete: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if self.discrete:
            if v.size and (not np.issubdtype(v.dtype, np.integer) or v.min() < 0):
                raise DomainError("discrete batches hold nonnegative integers only")
            v = v.astype(np.int64)
        else:
            v = v.astype(np.float64)
        self.values = v

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __len__(self):
        return self.n

    def pmf(self, n_max: int | None = None) -> np.ndarray:
        """Empirical masses at 0..n_max (default: the sample maximum)."""
        if not self.discrete:
            raise DomainError("empirical pmf needs a discrete batch")
        top = int(self.values.max()) if n_max is None else n_max
        inside = self.values[self.values <= top]
        return np.bincount(inside, minlength=top + 1)[: top + 1] / self.n

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# family={self.family}\n# n={self.n}\n# seed={self.seed}\n")
        buf.write(f"# stream={self.stream}\n# discrete={str(self.discrete).lower()}\n")
        for k in sorted(self.meta):
            buf.write(f"# {k}={self.meta[k]}\n")
        buf.write("value\n")
        if self.discrete:
            buf.writelines(f"{int(x)}\n" for x in self.values)
        else:
            buf.writelines(f"{x!r}\n" for x in self.values.tolist())
        return buf.getvalue()

    def to_binary(self) -> bytes:
        """16-byte header (magic, uint32 n, uint64 seed) then little-endian float64 values."""
        head = MAGIC + struct.pack("<IQ", self.n, self.seed & (2**64 - 1))
        return head + self.values.astype("<f8").tobytes()

    @classmethod
    def from_binary(cls, data: bytes, family: str = "", discrete: bool = False) -> "SampleBatch":
        if len(data) < 16 or data[:4] != MAGIC:
            raise DomainError("not a sample batch: bad magic")
        n, seed = struct.unpack("<IQ", data[4:16])
        vals = np.frombuffer(data[16:], dtype="<f8")
        if vals.shape[0] != n:
            raise DomainError(f"header says {n} values, payload has {vals.shape[0]}")
        if discrete:
            vals = vals.astype(np.int64)
        return cls(vals.copy(), family, seed, -1, discrete)


def _batch(values, family, src: RandomSource, discrete=False, **meta) -> SampleBatch:
    return SampleBatch(values, str(family), src.master_seed, src.stream_index, discrete, meta)


def _check_n(n):
    if int(n) != n or n < 0:
        raise DomainError(f"sample size must be a nonnegative integer, got {n!r}")
    return int(n)


# ---------------------------------------------------------------------------
# continuous laws


def _stable_draws(alpha, n, gen):
    if alpha == 1.0:
        return np.ones(n)
    u = np.pi * (1.0 - gen.random(n))  # (0, pi]
    e = gen.standard_exponential(n)
    return _kernels.kanter_positive_stable(u, e, alpha)


def sample_positive_stable(alpha: float, n: int, src=None, lam: float = 1.0) -> SampleBatch:
    """Draws with LT ``exp(-lam s**alpha)`` (Kanter's representation)."""
    n = _check_n(n)
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    src = _src(src)
    x = _stable_draws(float(alpha), n, src.generator()) * lam ** (1 / alpha)
    return _batch(x, f"pstable:alpha={alpha!r},lambda={lam!r}", src)


def sample_gen_ml(alpha: float, beta: float, lam: float, n: int, src=None) -> SampleBatch:
    """Draws with LT ``(1 + lam s**alpha)**(-beta)`` as ``(lam G)**(1/alpha) S``."""
    n = _check_n(n)
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not beta > 0 or not lam > 0:
        raise DomainError(f"beta and lambda must be positive, got {beta!r}, {lam!r}")
    src = _src(src)
    gen = src.generator()
    g = gen.standard_gamma(beta, n)
    s = _stable_draws(float(alpha), n, gen)
    x = (lam * g) ** (1 / alpha) * s
    return _batch(x, f"genml:alpha={alpha!r},beta={beta!r},lambda={lam!r}", src)


def _pure_power(X):
    psi = X.psi
    if psi.kind != "pure-power":
        raise DomainError(
            f"no sampler for {X.descriptor()}: log-periodic scale functions are not sampled"
        )
    return psi


def sample_lt(phi: LtFamily, n: int, src=None) -> SampleBatch:
    """Draws from the positive law with Laplace transform ``phi``."""
    psi = _pure_power(phi)
    if phi.outer == "exp":
        b = sample_positive_stable(psi.alpha, n, src, psi.lam)
    else:
        b = sample_gen_ml(psi.alpha, phi.beta, psi.lam, n, src)
    b.family = phi.descriptor()
    return b


def sample_symmetric_cf(phi: CfFamily, n: int, src=None) -> SampleBatch:
    """Draws with CF ``(1 + lam |u|**alpha)**(-nu)``: ``(lam G)**(1/alpha)`` times a symmetric stable."""
    n = _check_n(n)
    psi = _pure_power(phi)
    if phi.theta != 0:
        raise DomainError("only the symmetric case theta = 0 is sampled")
    src = _src(src)
    gen = src.generator()
    g = gen.standard_gamma(phi.nu, n)
    v = np.pi * (gen.random(n) - 0.5)
    w = gen.standard_exponential(n)
    s = _kernels.cms_symmetric_stable(v, w, psi.alpha)
    x = (psi.lam * g) ** (1 / psi.alpha) * s
    return _batch(x, phi.descriptor(), src)


# ---------------------------------------------------------------------------
# integer laws


def _geometric1(p, n, gen):
    u = 1.0 - gen.random(n)  # (0, 1]
    with np.errstate(divide="ignore"):
        k = np.ceil(np.log(u) / np.log1p(-np.asarray(p, dtype=float)))
    return np.clip(np.nan_to_num(k, nan=1.0, posinf=_INT_CAP), 1, _INT_CAP).astype(np.int64)


def _by_table(P, n, gen, tail=1e-12):
    for n_max in (64, 256, 1024):
        tab = extract_pmf(P, n_max)
        if abs(tab.mass_deficiency) <= tail:
            break
    else:
        raise DomainError(f"pmf of {P.descriptor()} not resolved to a {tail:g} tail")
    cdf = np.cumsum(np.clip(tab.coeffs, 0, None))
    cdf /= cdf[-1]
    return np.searchsorted(cdf, gen.random(n), side="right").astype(np.int64)


def sample_compounder(P: PgfFamily, n: int, src=None) -> SampleBatch:
    """Integer draws with PGF ``P``."""
    n = _check_n(n)
    src = _src(src)
    gen = src.generator()
    if isinstance(P, Geometric1):
        x = _geometric1(P.p, n, gen)
    elif isinstance(P, Degenerate):
        x = np.full(n, int(P.k), dtype=np.int64)
    elif isinstance(P, Sibuya):
        # geometric with a Beta(nu, 1 - nu) success probability
        x = _geometric1(gen.beta(P.nu, 1 - P.nu, n), n, gen)
    elif isinstance(P, Harris):
        m = gen.negative_binomial(1 / P.k, 1 / P.a, n)
        x = 1 + int(P.k) * m
    elif isinstance(P, BernoulliShift):
        x = (gen.random(n) < P.lam).astype(np.int64)
    elif isinstance(P, SibuyaBernoulli):
        m = _geometric1(gen.beta(P.nu, 1 - P.nu, n), n, gen)
        x = gen.binomial(m, P.delta ** (1 / P.nu))
    else:
        x = _by_table(P, n, gen)
    return _batch(x, P.descriptor(), src, discrete=True)


def _poisson(y, gen):
    # Poisson(y) breaks down for huge means; there the normal limit is exact to round-off
    y = np.minimum(y, _INT_CAP)
    big = y > _POISSON_NORMAL_CUTOFF
    out = np.empty(y.shape, dtype=np.int64)
    out[~big] = gen.poisson(y[~big])
    if big.any():
        yb = y[big]
        out[big] = np.minimum(np.rint(yb + np.sqrt(yb) * gen.standard_normal(yb.shape)),
                              _INT_CAP).astype(np.int64)
    return out


def sample_discrete_via_poisson_mixture(phi: LtFamily, n: int, src=None) -> SampleBatch:
    """Draws with PGF ``phi(1 - s)``: Poisson counts with a ``phi``-distributed mean."""
    src = _src(src)
    y = sample_lt(phi, n, src.child(0)).values
    x = _poisson(y, src.child(1).generator())
    return _batch(x, f"discrete[{phi.descriptor()}]", src, discrete=True)


def binomial_thin(batch: SampleBatch, c: float, src=None) -> SampleBatch:
    """Keep each of the ``x`` counted units independently with probability ``c``."""
    if not batch.discrete:
        raise DomainError("binomial thinning needs a discrete batch")
    if not 0 < c < 1:
        raise DomainError(f"c must lie in (0, 1), got {c!r}")
    src = _src(src)
    x = src.generator().binomial(batch.values, c)
    return SampleBatch(x, f"{batch.family}|thin={c!r}", src.master_seed,
                       src.stream_index, True, dict(batch.meta))


def sample_discrete(Q, n: int, src=None) -> SampleBatch:
    """Draws from a discrete analogue or native PGF, thinned as the PGF records."""
    Q = as_discrete(Q)
    src = _src(src)
    if Q.from_lt:
        b = sample_discrete_via_poisson_mixture(Q.source, n, src.child(0))
    else:
        b = sample_compounder(Q.source, n, src.child(0))
    if Q.thin != 1.0:
        b = binomial_thin(b, Q.thin, src.child(1))
    return SampleBatch(b.values, Q.descriptor(), src.master_seed, src.stream_index, True)


def sampler_for(obj) -> Callable[[int, RandomSource], SampleBatch]:
    """``(n, src) -> SampleBatch`` for a family object or an existing callable."""
    if callable(obj) and not hasattr(obj, "descriptor"):
        return obj
    if isinstance(obj, DiscretePgf):
        return lambda n, src: sample_discrete(obj, n, src)
    if isinstance(obj, LtFamily):
        return lambda n, src: sample_lt(obj, n, src)
    if isinstance(obj, CfFamily):
        return lambda n, src: sample_symmetric_cf(obj, n, src)
    if isinstance(obj, PgfFamily):
        return lambda n, src: sample_compounder(obj, n, src)
    raise DomainError(f"no sampler for {obj!r}")


def sample_random_sum(N, X, c: float, n: int, src=None, discrete: bool | None = None,
                      max_total: int = MAX_TOTAL_DRAWS) -> SampleBatch:
    """``c (X_1 + ... + X_N)``, or the sum of ``c``-thinned ``X_i`` in discrete mode.

    ``N`` and ``X`` are families or ``(n, src)`` samplers. The number of
    zero-length sums is recorded in ``meta["zero_count"]``.
    """
    n = _check_n(n)
    if not 0 < c <= 1:
        raise DomainError(f"c must lie in (0, 1], got {c!r}")
    src = _src(src)
    if discrete is None:
        discrete = isinstance(X, (DiscretePgf, PgfFamily))
    counts = sampler_for(N)(n, src.child(0))
    if not counts.discrete:
        raise DomainError("the number of summands must be integer-valued")
    total = int(counts.values.sum())
    if total > max_total:
        raise DomainError(f"random sum needs {total} summands, above the cap {max_total}")
    xs = sampler_for(X)(total, src.child(1))
    if discrete:
        if not xs.discrete:
            raise DomainError("discrete mode needs integer summands")
        if c < 1:
            xs = binomial_thin(xs, c, src.child(2))
        vals = np.rint(_kernels.segment_sum(xs.values, counts.values)).astype(np.int64)
    else:
        vals = c * _kernels.segment_sum(xs.values, counts.values)
    zeros = int(np.count_nonzero(counts.values == 0))
    desc = f"sum[{counts.family};{xs.family};c={c!r}]"
    return _batch(vals, desc, src, discrete=discrete, zero_count=zeros, total_draws=total)
