import numpy as np
import pytest

from phasepad.figures import FIGURE_NUMBERS, build_figure, marginal_variance
from phasepad.numgrid import Axis, PhaseSpaceField, integrate_2d
from phasepad.validation import CheckResult, Metric

ODD = Axis(-8.0, 8.0, 257)


@pytest.mark.parametrize("n", FIGURE_NUMBERS)
def test_every_figure_has_finite_real_fields(n):
    fig = build_figure(n)
    assert fig.number == n and fig.title and fig.fields
    for f in fig.fields.values():
        assert np.isrealobj(f.values)
        assert np.all(np.isfinite(f.values))


def test_figure_1_parts_form_unit_mass():
    fig = build_figure(1)
    re, im = fig.fields["re"], fig.fields["im"]
    mass = integrate_2d(re.with_values(re.values**2 + im.values**2))
    assert mass.real == pytest.approx(1.0, abs=1e-8)


def test_figure_2_wigner_negative_somewhere_and_density_not():
    fig = build_figure(2, ODD, ODD)
    assert fig.fields["wigner"].values.min() < 0
    assert fig.fields["modsq"].values.min() >= 0
    j = 128
    assert fig.fields["wigner"].values[j, j] == pytest.approx(-0.20457922472806428, abs=1e-14)


def test_figure_3_width_ordering():
    # a narrow window (large β) resolves q better and p worse
    fig = build_figure(3)
    narrow_q = fig.fields["modsq_beta2"]
    wide_q = fig.fields["modsq_beta0.5"]
    assert marginal_variance(narrow_q, "q") < marginal_variance(wide_q, "q")
    assert marginal_variance(narrow_q, "p") > marginal_variance(wide_q, "p")


def test_figure_4_oscillator_wigner_at_origin():
    fig = build_figure(4, ODD, ODD)
    assert fig.fields["wigner"].values[128, 128] == pytest.approx(-1 / np.pi, abs=1e-14)
    assert fig.fields["modsq"].values[128, 128] == pytest.approx(0.0, abs=1e-15)


def test_figure_5_square_window_density():
    fig = build_figure(5)
    modsq = fig.fields["modsq"]
    assert modsq.values.min() >= 0
    assert 0.98 < integrate_2d(modsq).real < 1.0
    assert fig.params["window"].startswith("square")


def test_figure_6_momentum_eigenstate():
    fig = build_figure(6, ODD, ODD)
    re = fig.fields["re"].values
    # the modulus is largest on the line p = k₀, where it equals (4/π³)^{1/4}
    bound = (4 / np.pi**3) ** 0.25
    assert np.max(np.abs(re)) <= bound + 1e-14
    j = np.argmin(np.abs(ODD.points + 2.0))
    assert np.max(np.abs(re[:, j])) > 0.5 * bound


@pytest.mark.parametrize("n", [0, 7, 9])
def test_unknown_figure(n):
    with pytest.raises(ValueError):
        build_figure(n)


def test_marginal_variance_of_gaussian():
    f = PhaseSpaceField.from_function(lambda q, p: np.exp(-q**2 / 2 - 2 * p**2), ODD, ODD)
    assert marginal_variance(f, "q") == pytest.approx(1.0, abs=1e-10)
    assert marginal_variance(f, "p") == pytest.approx(0.25, abs=1e-10)
    with pytest.raises(ValueError):
        marginal_variance(f, "x")


def test_check_result_summary():
    ok = CheckResult(1, "demo", [Metric("a", 1e-9, 1e-8)])
    bad = CheckResult(2, "demo", [Metric("a", 1e-9, 1e-8), Metric("b", 2.0, 1.0)])
    assert ok.passed and ok.summary().startswith("[PASS]")
    assert not bad.passed and "b=2" in bad.summary()
    assert not Metric("nan", float("nan"), 1.0).passed
    assert bad.to_dict()["metrics"][1]["passed"] is False
