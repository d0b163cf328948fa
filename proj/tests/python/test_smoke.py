import math

import pytest

import larmor_flip as lf


def test_tanh_crossing_matches_closed_form():
    p = lf.FrequencyProfile.tanh(1.0, -1.0, 0.5)
    assert [k for _, k in p.zeros()] == [lf.ZeroKind.SignChange]
    tr = lf.integrate(p, -60.0, 60.0)
    assert tr.max_wronskian_residual < 1e-9
    assert len(tr.crossings) == 1
    ex = lf.extract(tr, 60.0)
    assert abs(ex.pair.identity_residual()) < 1e-9
    # exact reflection result for the symmetric tanh well, w = omega0 / kappa
    w = 2.0
    exact = math.cosh(0.5 * math.pi * math.sqrt(16 * w * w - 1)) ** 2 / math.sinh(2 * math.pi * w) ** 2
    assert abs(abs(ex.pair.u_minus) ** 2 - exact) < 1e-6


def test_power_law_ground_state_tripling():
    b = lf.analytic_powerlaw(1)
    assert abs(b.u_minus) ** 2 == pytest.approx(1.0)
    assert 1 + 2 * abs(b.u_minus) ** 2 == pytest.approx(3.0)


def test_distribution_normalised_with_closed_form_mean():
    d = lf.distribution(3, 2, math.sqrt(3.0))
    assert sum(d.probabilities) + d.tail_bound == pytest.approx(1.0, abs=1e-12)
    mean = sum(q * pq for q, pq in enumerate(d.probabilities))
    assert mean == pytest.approx(lf.mean_q(lf.FockLabel(3, 2), 3.0), rel=1e-8)
    assert lf.transition_probability(0, 0, 0, 1.0) == pytest.approx(0.5)


def test_compose_of_identity_pairs():
    one = lf.BogoliubovPair(1.0 + 0j, 0j)
    c = lf.compose([(one, 0.0), (one, 1.3)])
    assert abs(c.u_minus) == 0.0
    assert c.u_plus == pytest.approx(1.0 + 0j)


def test_errors_are_typed():
    with pytest.raises(lf.PreconditionError):
        lf.FrequencyProfile.tanh(1.0, -1.0, -0.1)
    with pytest.raises(lf.ConfigError):
        lf.run_config("[profile]\ntype = 'nope'\n", ".")
    with pytest.raises(lf.LarmorError):
        lf.integrate(lf.FrequencyProfile.constant(1.0), 0.0, 1.0, tol=1.0)


def test_run_config_writes_outputs(tmp_path):
    text = "\n".join([
        'outputs = ["coefficients", "observables"]',
        "[profile]",
        'type = "tanh"',
        "omega_i = 1.0",
        "omega_f = -1.0",
        "kappa = 0.5",
        "[observables]",
        "samples = 20",
    ])
    written, _ = lf.run_config(text, str(tmp_path), header_timestamp=False)
    assert {p.rsplit("/", 1)[-1] for p in written} == {"coefficients.json", "observables.csv"}
