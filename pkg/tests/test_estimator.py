import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dpkl import DPKLModelCheck
from dpkl.exceptions import InputError

FAST = dict(N=100, M=10, r1=200, r2=200)


def test_get_params_round_trip():
    est = DPKLModelCheck("gumbel", a=5.0, random_state=3, **FAST)
    params = est.get_params()
    assert params["family"] == "gumbel" and params["a"] == 5.0 and params["r1"] == 200
    assert set(params) == {"family", "a", "N", "M", "i0", "r1", "r2", "random_state", "n_jobs"}
    est.set_params(a=2.0)
    assert est.a == 2.0


def test_clone_is_unfitted_copy():
    est = DPKLModelCheck(random_state=0, **FAST).fit(np.random.default_rng(0).normal(size=20))
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert not hasattr(twin, "report_")


def test_fit_sets_attributes(rainfall):
    est = DPKLModelCheck("gumbel", a=1.0, random_state=1, **FAST).fit(rainfall)
    assert est.seed_ == 1 and est.n_samples_fit_ == 35 and est.n_features_in_ == 1
    assert est.model_.family == "gumbel"
    assert est.rb0_ == est.report_.rb0 and est.strength_ == est.report_.strength
    assert est.d_star_ == est.report_.d_star
    assert len(est.prior_sample_) == 200 and len(est.posterior_sample_) == 200
    assert est.to_dict()["config"]["a"] == 1.0


def test_fit_matches_library_path(rainfall):
    from dpkl.relative_belief import CheckConfig, run_check

    est = DPKLModelCheck("gumbel", a=5.0, random_state=4, **FAST).fit(rainfall)
    rep = run_check(rainfall, "gumbel", [CheckConfig(5.0, seed=4, **FAST)])[0]
    assert est.to_dict() == rep.to_dict()


def test_column_vector_accepted():
    x = np.random.default_rng(2).normal(size=(20, 1))
    est = DPKLModelCheck(random_state=0, **FAST).fit(x)
    assert est.n_samples_fit_ == 20


def test_generator_random_state_is_recorded():
    est = DPKLModelCheck(random_state=np.random.default_rng(5), **FAST)
    est.fit(np.random.default_rng(3).normal(size=20))
    again = DPKLModelCheck(random_state=est.seed_, **FAST).fit(np.random.default_rng(3).normal(size=20))
    assert again.to_dict() == est.to_dict()


@pytest.mark.parametrize("X", [np.ones((5, 2)), [1.0, np.nan, 2.0], [1.0]])
def test_fit_rejects_bad_input(X):
    with pytest.raises(InputError):
        DPKLModelCheck(random_state=0, **FAST).fit(X)


def test_unknown_family():
    with pytest.raises(InputError):
        DPKLModelCheck("weibull", random_state=0, **FAST).fit(np.arange(10.0))


def test_to_dict_before_fit():
    with pytest.raises(NotFittedError):
        DPKLModelCheck().to_dict()
