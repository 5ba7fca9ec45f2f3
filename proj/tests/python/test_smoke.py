"""End-to-end smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import _core as gp


def test_phantom_shape_and_range():
    img = gp.phantom(40, 40)
    assert img.shape == (40, 40)
    assert img.min() >= 0.0
    assert img.max() <= 1.0


def test_basis_masks_are_deterministic():
    spec = gp.BasisSpec(20, 20, 10, seed=5)
    a = gp.RandomBasis(spec)
    b = gp.RandomBasis(spec)
    np.testing.assert_array_equal(a.mask(3), b.mask(3))
    assert a.pixel(3, 17) == a.mask(3)[0, 17]


def test_pseudo_correlation_statistics():
    spec = gp.BasisSpec(20, 20, 20000, seed=5)
    basis = gp.RandomBasis(spec)
    img = gp.phantom(20, 20)
    img = img - img.mean()  # zero-centered: E[C] = 0
    c = np.asarray(gp.pseudo_correlation(basis, img))
    st = gp.correlation_stats(spec, img)
    assert st.expected == pytest.approx(0.0, abs=1e-12)
    assert c.mean() == pytest.approx(0.0, abs=4 * math.sqrt(st.variance / len(c)))
    assert c.var() == pytest.approx(st.variance, rel=0.05)


def test_filter_and_cutoff():
    spec = gp.BasisSpec(20, 20, 20000, seed=5)
    basis = gp.RandomBasis(spec)
    img = gp.phantom(20, 20)
    st = gp.correlation_stats(spec, img)
    c = gp.pseudo_correlation(basis, img)
    cutoff = st.expected + math.sqrt(2 * st.variance) * gp.optimal_cutoff_x()
    sel = gp.filter_basis(c, st, cutoff)
    assert sel.kept_fraction == pytest.approx(0.270, abs=0.005)
    assert 0 < sel.n_kept < 20000

    x = gp.solve_optimal_x(1.0)
    assert abs(gp.approx_optimal_x(1.0) - x) < 0.15 / math.sqrt(2)


def test_nonneg_basis():
    b = gp.NonNegBasis.construct(3)
    v = b.vectors
    assert v.shape == (4, 3)
    t = np.array([4.0, 2.0, 1.0, 1.0])
    np.testing.assert_allclose(t @ v, np.zeros(3), atol=1e-12)


def test_run_experiment(tmp_path):
    res = gp.run_experiment(
        {
            "scheme": "filtered",
            "count": 20000,
            "seed": 7,
            "phantom_contrast": "moments:0.5:0.376759",
            "out": str(tmp_path),
        }
    )
    assert res.simulated_snr == pytest.approx(res.predicted_snr, rel=0.15)
    assert (tmp_path / "projection.csv").exists()
    assert (tmp_path / "manifest.kv").exists()
