import math

import numpy as np
import pytest

from randstab.discrete import discrete_linnik, discrete_ml, discrete_stable, extract_pmf, poisson_table
from randstab.sampling import (
    RandomSource,
    SampleBatch,
    binomial_thin,
    sample_compounder,
    sample_discrete,
    sample_discrete_via_poisson_mixture,
    sample_gen_ml,
    sample_lt,
    sample_positive_stable,
    sample_random_sum,
    sample_symmetric_cf,
)
from randstab.stats import tv_distance_batches, tv_distance_pmf
from randstab.transforms import (
    Degenerate,
    DomainError,
    Gamma,
    GeneralizedLinnik,
    Geometric1,
    Harris,
    Linnik,
    MittagLeffler,
    PositiveLinnik,
    PositiveStable,
    SemiML,
    Sibuya,
)

N = 100_000
SRC = RandomSource(2024, 0)


def elt(x, s):
    return float(np.mean(np.exp(-s * x)))


class TestContinuous:
    def test_stable_alpha_one(self):
        assert np.all(sample_positive_stable(1.0, 50, SRC).values == 1.0)

    def test_stable_lt(self):
        x = sample_positive_stable(0.5, N, SRC).values
        assert abs(elt(x, 1.0) - math.exp(-1)) < 0.01

    def test_stable_deterministic(self):
        a = sample_positive_stable(0.5, 3, RandomSource(5, 1)).values
        b = sample_positive_stable(0.5, 3, RandomSource(5, 1)).values
        assert a.tolist() == b.tolist()

    def test_stable_domain(self):
        with pytest.raises(DomainError):
            sample_positive_stable(1.2, 10, SRC)

    def test_gen_ml_gamma_mean(self):
        x = sample_gen_ml(1.0, 2.0, 1.0, N, SRC).values
        assert abs(x.mean() / 2 - 1) < 0.02

    def test_gen_ml_lt(self):
        x = sample_gen_ml(0.5, 1.0, 1.0, N, SRC).values
        assert abs(elt(x, 4.0) - 1 / 3) < 0.01

    def test_gen_ml_half_beta(self):
        x = sample_gen_ml(0.5, 0.5, 1.0, N, SRC).values
        assert abs(elt(x, 1.0) - 2**-0.5) < 0.01

    @pytest.mark.parametrize("phi", [Gamma(0.5), MittagLeffler(0.7, 2.0),
                                     PositiveLinnik(0.6, 1.0, 2.0), PositiveStable(0.3)])
    def test_lt_within_three_se(self, phi):
        x = sample_lt(phi, N, RandomSource(99, 1)).values
        for s in (0.1, 0.5, 1.0, 2.0, 5.0):
            e = np.exp(-s * x)
            se = e.std() / math.sqrt(N)
            assert abs(e.mean() - float(phi(s))) < 3 * se + 1e-12

    def test_log_periodic_not_sampled(self):
        with pytest.raises(DomainError):
            sample_lt(SemiML(0.5), 10, SRC)

    @pytest.mark.parametrize("phi", [Linnik(1.5), GeneralizedLinnik(0.8, 0.0, 2.0, 0.5)])
    def test_symmetric_cf(self, phi):
        x = sample_symmetric_cf(phi, N, RandomSource(3, 0)).values
        for u in (0.2, 1.0, 3.0):
            assert abs(np.cos(u * x).mean() - float(phi(u).real)) < 0.01

    def test_skewed_cf_not_sampled(self):
        with pytest.raises(DomainError):
            sample_symmetric_cf(GeneralizedLinnik(1.0, 0.5, 1.0), 10, SRC)


class TestIntegers:
    def test_harris(self):
        x = sample_compounder(Harris(2, 2), N, SRC).values
        assert abs(np.mean(x == 1) - 0.7071068) < 0.01
        assert np.all((x - 1) % 2 == 0)

    def test_geometric_mean(self):
        x = sample_compounder(Geometric1(0.5), N, SRC).values
        assert abs(x.mean() / 2 - 1) < 0.02
        assert x.min() >= 1

    def test_sibuya(self):
        x = sample_compounder(Sibuya(0.5), N, SRC).values
        assert abs(np.mean(x == 1) - 0.5) < 0.01

    def test_sibuya_pmf(self):
        # against the mass recursion p_{j+1} = p_j (j - nu) / (j + 1)
        nu = 0.3
        p = [0.0, nu]
        for j in range(1, 20):
            p.append(p[-1] * (j - nu) / (j + 1))
        emp = sample_compounder(Sibuya(nu), N, SRC).pmf(20)
        assert np.max(np.abs(emp - np.array(p))) < 0.005

    def test_degenerate(self):
        assert np.all(sample_compounder(Degenerate(4), 20, SRC).values == 4)

    def test_mixture_gamma_zero_mass(self):
        b = sample_discrete_via_poisson_mixture(Gamma(1.0), N, SRC)
        assert abs(np.mean(b.values == 0) - 0.5) < 0.01

    def test_mixture_poisson(self):
        b = sample_discrete_via_poisson_mixture(PositiveStable(1.0), N, SRC)
        assert abs(np.mean(b.values == 0) - math.exp(-1)) < 0.01

    def test_mixture_ml_tv(self):
        # MittagLeffler(1, 0.5) read with alpha first: alpha=1, lambda=0.5
        Q = discrete_ml(0.5, 1.0)
        b = sample_discrete(Q, N, SRC)
        assert tv_distance_pmf(b, extract_pmf(Q, 128)) < 0.02

    @pytest.mark.parametrize("Q", [discrete_stable(1.0, 0.9), discrete_ml(1.0, 0.9),
                                   discrete_linnik(1.0, 0.9, 2.0)])
    def test_mixture_tv(self, Q):
        b = sample_discrete(Q, N, RandomSource(8, 2))
        assert tv_distance_pmf(b, extract_pmf(Q, 1024)) < 0.02


class TestThinning:
    def test_zeros(self):
        b = SampleBatch(np.zeros(100, dtype=np.int64), "zero", 0, 0, True)
        assert np.all(binomial_thin(b, 0.3, SRC).values == 0)

    def test_ones(self):
        b = SampleBatch(np.ones(N, dtype=np.int64), "one", 0, 0, True)
        assert abs(binomial_thin(b, 0.5, SRC).values.mean() / 0.5 - 1) < 0.02

    def test_poisson(self):
        b = sample_discrete(discrete_stable(1.0, 1.0), N, SRC)
        t = binomial_thin(b, 0.5, SRC.child(9))
        assert tv_distance_pmf(t, poisson_table(0.5, 40)) < 0.02

    def test_continuous_rejected(self):
        with pytest.raises(DomainError):
            binomial_thin(sample_lt(Gamma(1.0), 10, SRC), 0.5, SRC)

    def test_semigroup(self):
        b = sample_compounder(Geometric1(0.2), N, SRC)
        two = binomial_thin(binomial_thin(b, 0.6, SRC.child(1)), 0.5, SRC.child(2))
        one = binomial_thin(b, 0.3, SRC.child(3))
        assert tv_distance_batches(two, one) < 0.02


class TestRandomSum:
    def test_pass_through(self):
        s = sample_random_sum(Degenerate(1), Gamma(1.0), 1.0, 1000, SRC)
        x = sample_lt(Gamma(1.0), 1000, SRC.child(1))
        assert np.allclose(s.values, x.values)

    def test_zero_count_recorded(self):
        s = sample_random_sum(discrete_stable(1.0, 1.0), Gamma(1.0), 0.5, 1000, SRC)
        assert s.meta["zero_count"] == int(np.sum(s.values == 0))
        assert s.meta["zero_count"] > 0

    def test_discrete_mode(self):
        s = sample_random_sum(Geometric1(0.5), discrete_ml(1.0, 1.0), 0.5, 1000, SRC)
        assert s.discrete and s.values.dtype == np.int64

    def test_draw_cap(self):
        with pytest.raises(DomainError, match="cap"):
            sample_random_sum(Degenerate(10), Gamma(1.0), 0.5, 1000, SRC, max_total=100)


class TestStreams:
    def test_byte_identical(self):
        a = sample_lt(MittagLeffler(0.5), 1000, RandomSource(1, 4)).to_binary()
        b = sample_lt(MittagLeffler(0.5), 1000, RandomSource(1, 4)).to_binary()
        assert a == b

    def test_streams_uncorrelated(self):
        a = sample_lt(Gamma(1.0), N, RandomSource(1, 0)).values
        b = sample_lt(Gamma(1.0), N, RandomSource(1, 1)).values
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.01

    def test_children_differ(self):
        a = sample_lt(Gamma(1.0), 10, SRC.child(0)).values
        b = sample_lt(Gamma(1.0), 10, SRC.child(1)).values
        assert not np.array_equal(a, b)


class TestExport:
    def test_binary_round_trip(self):
        b = sample_lt(Gamma(1.0), 17, RandomSource(0xC0FFEE, 2))
        raw = b.to_binary()
        assert raw[:4] == b"RSTB" and len(raw) == 16 + 8 * 17
        back = SampleBatch.from_binary(raw)
        assert back.seed == 0xC0FFEE and back.n == 17
        assert np.array_equal(back.values, b.values)

    def test_bad_magic(self):
        with pytest.raises(DomainError):
            SampleBatch.from_binary(b"XXXX" + bytes(12))

    def test_csv(self):
        b = sample_compounder(Geometric1(0.5), 5, SRC)
        lines = b.to_csv().splitlines()
        assert lines[0] == "# family=geometric1:p=0.5"
        i = lines.index("value")
        assert [int(v) for v in lines[i + 1:]] == b.values.tolist()

    def test_discrete_batch_validates(self):
        with pytest.raises(DomainError):
            SampleBatch(np.array([1.5]), "x", 0, 0, True)
