import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasepad.cli import EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK, main, read_field
from phasepad.cli.config import RunConfig, load_wavefunction, parse_axis, parse_grid, parse_state
from phasepad.cli.io import write_field
from phasepad.errors import ConfigError
from phasepad.numgrid import Axis, PhaseSpaceField, integrate_2d
from phasepad.windows import GaussianWindow, SquareWindow

SMALL_GRID = "-4,4,33,-4,4,33"


def _run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


# -- configuration ---------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(beta=st.floats(0.1, 10), mu_re=st.floats(-5, 5), mu_im=st.floats(-5, 5),
       n=st.integers(8, 300), dt=st.floats(1e-4, 1e-2), steps=st.integers(0, 5000),
       fmt=st.sampled_from(["csv", "bin"]))
def test_config_ini_round_trip(beta, mu_re, mu_im, n, dt, steps, fmt):
    cfg = RunConfig(state=parse_state(f"coherent:mu={mu_re!r}{mu_im:+.17g}j"),
                    window=GaussianWindow(beta, mu_re, mu_im), q_axis=Axis(-3.0, 5.0, n),
                    fmt=fmt, dt=dt, steps=steps, potential="q^4/4 - q^2")
    assert RunConfig.from_ini(cfg.to_ini()) == cfg


def test_config_with_square_window_round_trip():
    cfg = RunConfig(state=parse_state("oscillator:n=3"), window=SquareWindow(0.75))
    assert RunConfig.from_ini(cfg.to_ini()) == cfg


@pytest.mark.parametrize("text", ["[bogus]\nx = 1\n", "[state]\nspec = nothing\n",
                                  "[grid]\nq = 1,2\n", "[output]\nformat = xml\n",
                                  "[evolve]\ndt = -1\n", "[evolve]\nsteps = many\n",
                                  "[state]\ncolour = red\n", "not an ini file"])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        RunConfig.from_ini(text)


@pytest.mark.parametrize("text", ["coherent:nu=1", "coherent:mu=abc", "oscillator:n=13",
                                  "oscillator:n=-1", "free:gamma=0", "file:", "squeezed"])
def test_parse_state_errors(text):
    with pytest.raises(ConfigError):
        parse_state(text)


def test_parse_state_values():
    assert parse_state("coherent:mu=1+0.5i").get("mu") == 1 + 0.5j
    assert parse_state("oscillator").get("n") == 0
    assert parse_state("file:/tmp/psi.csv").path == "/tmp/psi.csv"
    assert parse_state(parse_state("free:gamma=2").to_string()) == parse_state("free:gamma=2")


def test_parse_axis_and_grid():
    assert parse_axis("-1, 1, 9") == Axis(-1, 1, 9)
    q, p = parse_grid(SMALL_GRID)
    assert q == p == Axis(-4, 4, 33)
    with pytest.raises(ConfigError):
        parse_axis("0,1,x")
    with pytest.raises(ConfigError):
        parse_grid("0,1,9")


def test_load_wavefunction(tmp_path):
    x = np.linspace(-10, 10, 201)
    psi = np.pi**-0.25 * np.exp(-x**2 / 2 + 0.3j * x)
    path = tmp_path / "psi.csv"
    np.savetxt(path, np.column_stack([x, psi.real, psi.imag]), delimiter=",", header="x,re,im",
               comments="")
    wf = load_wavefunction(path)
    assert wf.axis == Axis(-10, 10, 201)
    np.testing.assert_allclose(wf.values, psi, atol=1e-15)
    bad = tmp_path / "bad.csv"
    np.savetxt(bad, np.column_stack([x**3, psi.real]), delimiter=",")
    with pytest.raises(ConfigError):
        load_wavefunction(bad)
    with pytest.raises(ConfigError):
        load_wavefunction(tmp_path / "missing.csv")


# -- output files ------------------------------------------------------------------------

@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_field_write_read_is_lossless(tmp_path, fmt):
    rng = np.random.default_rng(3)
    ax_q, ax_p = Axis(-1.0, 2.0, 11), Axis(-3.0, 3.0, 13)
    F = PhaseSpaceField(ax_q, ax_p, rng.normal(size=(11, 13)) + 1j * rng.normal(size=(11, 13)))
    path = write_field(tmp_path, "f", F, fmt, metadata={"k": 1})
    G, side = read_field(path)
    assert G.q_axis == ax_q and G.p_axis == ax_p
    np.testing.assert_array_equal(G.values, F.values)
    assert side["metadata"] == {"k": 1}
    R = F.with_values(F.values.real)
    G, _ = read_field(write_field(tmp_path, "r", R, fmt))
    np.testing.assert_array_equal(G.values, R.values)


# -- commands ---------------------------------------------------------------------------

def test_amplitude_command_output_has_unit_mass(tmp_path):
    code = _run(tmp_path, "amplitude", "--state", "coherent:mu=0.5+0.5j", "--format", "bin")
    assert code == EXIT_OK
    F, side = read_field(tmp_path / "amplitude_modsq.bin")
    assert integrate_2d(F).real == pytest.approx(1.0, abs=1e-6)
    assert side["metadata"]["checks"]["subspace_residual"] < 1e-6
    Psi, _ = read_field(tmp_path / "amplitude.bin")
    assert np.iscomplexobj(Psi.values)


def test_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert _run(d, "amplitude", "--state", "test", f"--grid={SMALL_GRID}") == EXIT_OK
    for name in ("amplitude.csv", "amplitude.json", "amplitude_modsq.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize("command", ["wigner", "husimi", "bargmann"])
def test_derived_field_commands(tmp_path, command):
    assert _run(tmp_path, command, "--state", "oscillator:n=1", f"--grid={SMALL_GRID}") == EXIT_OK
    side = json.loads((tmp_path / f"{command}.json").read_text())
    assert side["metadata"]["command"] == command
    if command == "wigner":
        assert side["metadata"]["checks"]["min"] < 0


def test_bargmann_rejects_square_window(tmp_path):
    assert _run(tmp_path, "bargmann", "--window", "square:a=1") == EXIT_CONFIG


def test_unknown_window_is_config_error(tmp_path, capsys):
    assert _run(tmp_path, "amplitude", "--window", "triangle:a=1") == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_unknown_figure_exits_with_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        _run(tmp_path, "figure", "9")
    assert exc.value.code == EXIT_CONFIG


def test_figure_command(tmp_path):
    assert _run(tmp_path, "figure", "4", "--grid=-8,8,257,-8,8,257") == EXIT_OK
    W, side = read_field(tmp_path / "fig4_wigner.csv")
    assert W.values[128, 128] == pytest.approx(-1 / np.pi, abs=1e-14)
    assert side["metadata"]["figure"] == 4


def test_evolve_zero_steps(tmp_path):
    code = _run(tmp_path, "evolve", "--state", "coherent:mu=1", "--steps", "0",
                f"--grid={SMALL_GRID}")
    assert code == EXIT_OK
    meta = json.loads((tmp_path / "evolve.json").read_text())
    assert meta["checks"]["times"] == [0.0]
    assert meta["checks"]["max_abs_final_minus_initial"] == 0


def test_evolve_oscillator_period(tmp_path):
    steps = 3200
    code = _run(tmp_path, "evolve", "--state", "coherent:mu=1+0.5j", "--potential", "q^2/2",
                "--dt", repr(2 * np.pi / steps), "--steps", str(steps), "--snapshots", "2",
                f"--grid={SMALL_GRID}")
    assert code == EXIT_OK
    meta = json.loads((tmp_path / "evolve.json").read_text())
    assert meta["checks"]["max_abs_final_plus_initial"] < 1e-5
    assert np.allclose(meta["checks"]["norm_squared"], 1.0, atol=1e-6)
    assert np.allclose(meta["checks"]["energy"], meta["checks"]["energy"][0], atol=1e-6)


def test_evolve_rejects_unstable_step(tmp_path):
    assert _run(tmp_path, "evolve", "--dt", "0.1", "--steps", "3") == EXIT_CONFIG
    assert _run(tmp_path, "evolve", "--potential", "q*p") == EXIT_CONFIG
    assert _run(tmp_path, "evolve", "--potential", "q^^") == EXIT_CONFIG


@pytest.mark.parametrize("state, window", [("momentum:k0=1", None), ("position:x0=0.5", None),
                                           ("oscillator:n=2", None),
                                           ("oscillator:n=1", "square:a=1")])
def test_eigenstate_command(tmp_path, state, window):
    args = ["eigenstate", "--state", state, "--grid=-6,6,97,-6,6,97"]
    if window:
        args += ["--window", window]
    assert _run(tmp_path, *args) == EXIT_OK
    side = json.loads(next(tmp_path.glob("*.json")).read_text())
    checks = side["metadata"]["checks"]
    assert checks["eigen_residual"] <= checks["tolerance"]


def test_validate_exit_codes(tmp_path, capsys):
    assert _run(tmp_path, "validate", "--only", "1") == EXIT_OK
    assert "[PASS]" in capsys.readouterr().out
    report = json.loads((tmp_path / "validation.json").read_text())
    assert report["passed"] and report["results"][0]["number"] == 1
    assert _run(tmp_path, "validate", "--only", "3") == EXIT_CHECK_FAILED
    assert _run(tmp_path, "validate", "--only", "99") == EXIT_CONFIG
    assert _run(tmp_path, "validate", "--only", "one") == EXIT_CONFIG


def test_file_state(tmp_path):
    x = np.linspace(-16, 16, 512)
    psi = np.pi**-0.25 * np.exp(-(x - 1) ** 2 / 2)
    path = tmp_path / "psi.csv"
    np.savetxt(path, np.column_stack([x, psi]), delimiter=",")
    out = tmp_path / "out"
    assert _run(out, "amplitude", "--state", f"file:{path}", f"--grid={SMALL_GRID}") == EXIT_OK
    F, _ = read_field(out / "amplitude_modsq.csv")
    # the amplitude peaks at q = (x_C + x_W)/2 = 0.5
    assert np.unravel_index(np.argmax(F.values), F.values.shape) == (18, 16)
