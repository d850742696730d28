import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gpbatch import kernels
from gpbatch.errors import ConfigurationError, InputError
from gpbatch.kernels import KernelSpec

from oracles import matern_bessel, se

SPECS = [KernelSpec.se(0.5, 2), KernelSpec.matern(0.5, 0.7, 2),
         KernelSpec.matern(1.5, 0.7, 2), KernelSpec.matern(2.5, 0.7, 2)]


def test_se_unit_diagonal():
    assert kernels.eval(KernelSpec.se(0.37, 3), [0.1, 0.2, 0.3], [0.1, 0.2, 0.3]) == 1.0


def test_se_spot_value():
    spec = KernelSpec.se(0.5, 2)
    assert kernels.eval(spec, [0.0, 0.0], [0.3, 0.4]) == pytest.approx(0.606531, abs=1e-6)
    assert kernels.eval(spec, [0.0, 0.0], [0.3, 0.4]) == pytest.approx(math.exp(-0.5), abs=1e-15)


def test_matern_half_spot_value():
    assert kernels.eval(KernelSpec.matern(0.5, 1.0), 0.0, 1.0) == pytest.approx(math.exp(-1), abs=1e-15)


@pytest.mark.parametrize("nu", [0.5, 1.5, 2.5])
@pytest.mark.parametrize("r", [1e-3, 0.1, 0.5, 1.0, 2.0, 5.0])
def test_matern_closed_form_matches_bessel(nu, r):
    spec = KernelSpec.matern(nu, 0.8)
    assert kernels.eval(spec, 0.0, r) == pytest.approx(matern_bessel(r, 0.8, nu), rel=1e-10)


def test_se_matches_formula_on_random_pairs():
    rng = np.random.default_rng(3)
    spec = KernelSpec.se(0.9, 4)
    for _ in range(50):
        a, b = rng.normal(size=4), rng.normal(size=4)
        assert kernels.eval(spec, a, b) == pytest.approx(se(np.linalg.norm(a - b), 0.9), rel=1e-14)


def test_invalid_configurations():
    with pytest.raises(ConfigurationError):
        KernelSpec.matern(1.0, 1.0)
    with pytest.raises(ConfigurationError):
        KernelSpec.se(0.0)
    with pytest.raises(ConfigurationError):
        KernelSpec.se(-1.0)
    with pytest.raises(ConfigurationError):
        KernelSpec("se", 1.0, 1, nu=0.5)


def test_dimension_mismatch():
    with pytest.raises(InputError):
        kernels.eval(KernelSpec.se(1.0, 2), [0.0, 0.0], [0.0, 0.0, 0.0])
    with pytest.raises(InputError):
        kernels.gram(KernelSpec.se(1.0, 2), np.zeros((3, 3)))


class TestGram:
    def test_single_point(self):
        assert kernels.gram(KernelSpec.se(1.0, 2), [[0.2, 0.3]]).tolist() == [[1.0]]

    def test_identical_points(self):
        K = kernels.gram(KernelSpec.se(1.0, 2), [[0.2, 0.3], [0.2, 0.3]])
        assert K.tolist() == [[1.0, 1.0], [1.0, 1.0]]

    def test_empty(self):
        with pytest.raises(InputError):
            kernels.gram(KernelSpec.se(1.0, 2), np.empty((0, 2)))

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.family.value}-{s.nu}")
    def test_entrywise(self, spec):
        pts = np.random.default_rng(0).uniform(size=(3, 2))
        K = kernels.gram(spec, pts)
        for i in range(3):
            for j in range(3):
                assert K[i, j] == pytest.approx(kernels.eval(spec, pts[i], pts[j]), abs=1e-15)


points = arrays(np.float64, st.tuples(st.integers(1, 12), st.just(2)),
                elements=st.floats(-3, 3, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(pts=points, which=st.sampled_from(range(len(SPECS))))
def test_gram_symmetric_psd(pts, which):
    K = kernels.gram(SPECS[which], pts)
    assert np.max(np.abs(K - K.T)) <= 1e-12
    assert np.linalg.eigvalsh(K).min() >= -1e-9
    assert np.all(np.diag(K) == 1.0)
    assert np.all((K > 0) | np.isclose(K, 0)) and np.all(K <= 1.0)


@settings(max_examples=60, deadline=None)
@given(a=arrays(np.float64, 2, elements=st.floats(-5, 5)),
       b=arrays(np.float64, 2, elements=st.floats(-5, 5)),
       shift=arrays(np.float64, 2, elements=st.floats(-5, 5)),
       which=st.sampled_from(range(len(SPECS))))
def test_stationary_and_symmetric(a, b, shift, which):
    spec = SPECS[which]
    k = kernels.eval(spec, a, b)
    assert kernels.eval(spec, b, a) == k
    assert kernels.eval(spec, a + shift, b + shift) == pytest.approx(k, abs=1e-9)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.family.value}-{s.nu}")
def test_monotone_in_distance(spec):
    r = np.linspace(0, 10, 2001)
    values = spec.profile(r)
    assert np.all(np.diff(values) <= 0)
