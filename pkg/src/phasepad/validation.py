"""Acceptance checks shared by the test suite and the ``validate`` command.

Every check compares a numerical pipeline with an independent closed form
and reports the observed deviations next to their tolerances. Nothing here
adjusts tolerances to make a check pass.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.signal import fftconvolve

from . import analytic as A
from .dynamics import EvolutionConfig, evolve_amplitude, evolve_coordinate, hamiltonian_star_apply
from .figures import build_figure, marginal_variance
from .numgrid import Axis, PhaseSpaceField, integrate_2d, inner_product, l2_norm
from .staralg import PolySymbol, _field_star, born_wigner, expectation, state_projection_residual
from .staralg import subspace_residual
from .windows import CustomWindow, GaussianWindow, OscillatorWindow, SquareWindow, sample_window
from .xform import (
    DEFAULT_X_AXIS,
    TransformPlan,
    cohen_kernel,
    cross_wigner,
    forward_amplitude,
    gabor_transform,
    inverse_amplitude,
    pointwise_inverse,
    spectrogram_husimi,
    symplectic_fourier,
)

__all__ = ["Metric", "CheckResult", "CHECKS", "run_check", "run_all", "ODD_AXIS"]

#: Grid with the origin (and every multiple of 1/16) as a sample point.
ODD_AXIS = Axis(-8.0, 8.0, 257)


@dataclass
class Metric:
    """One measured deviation against its tolerance."""

    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": float(self.value), "tol": self.tol,
                "passed": self.passed}


@dataclass
class CheckResult:
    """Outcome of one acceptance criterion."""

    number: int
    title: str
    metrics: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.metrics)

    def failing(self) -> list:
        return [m for m in self.metrics if not m.passed]

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = ", ".join(f"{m.name}={m.value:.3g} (tol {m.tol:g})" for m in
                          (self.failing() or self.metrics[:2]))
        return f"[{status}] {self.number:2d}. {self.title}: {worst}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "seconds": round(self.seconds, 3), "metrics": [m.to_dict() for m in self.metrics]}


def _aligned_error(num: np.ndarray, ref: np.ndarray) -> float:
    """Max deviation after removing the best global phase."""
    overlap = np.vdot(ref, num)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(num - phase * ref)))


def _rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


# ---------------------------------------------------------------------------


def check_coherent() -> list:
    mu = 1 + 0.5j
    win = GaussianWindow.from_lambda(1.0, mu)
    psi = A.coherent_wavefunction(mu).sample()
    num = forward_amplitude(psi, TransformPlan.default(win))
    ref = A.coherent_amplitude(mu, 1.0, mu).on_grid()
    fine = forward_amplitude(psi, TransformPlan(DEFAULT_X_AXIS, ODD_AXIS, ODD_AXIS, win))
    peak = float(np.max(np.abs(fine.values)) ** 2)
    return [Metric("max |Psi_num - Psi_closed| (phase aligned)",
                   _aligned_error(num.values, ref.values), 1e-8),
            Metric("|peak |Psi|^2 - 2/pi|", abs(peak - 2 / np.pi), 1e-8)]


def check_born() -> list:
    mu = 1 + 0.5j
    win = GaussianWindow.from_lambda(1.0, mu)
    Psi = forward_amplitude(A.coherent_wavefunction(mu).sample(), TransformPlan.default(win))
    star = _field_star(Psi, Psi.conj()).values
    W = A.coherent_wigner(mu).on_grid().values
    return [Metric("max |Psi*conj(Psi) - W_mu|", float(np.max(np.abs(star.real - W))), 1e-6),
            Metric("max |Im Psi*conj(Psi)|", float(np.max(np.abs(star.imag))), 1e-8)]


def check_window_independence() -> list:
    psi1 = A.oscillator_wavefunction(1).sample()
    ref = A.oscillator_wigner(1).on_grid(ODD_AXIS, ODD_AXIS).values
    i0 = ODD_AXIS.n // 2
    out = []
    for label, win in (("gaussian", GaussianWindow()), ("square a=1", SquareWindow(1.0))):
        Psi = forward_amplitude(psi1, TransformPlan(DEFAULT_X_AXIS, ODD_AXIS, ODD_AXIS, win))
        W = born_wigner(Psi).values
        out.append(Metric(f"{label}: max |W - W_1|", float(np.max(np.abs(W - ref))), 1e-6))
        out.append(Metric(f"{label}: |W(0,0) + 1/pi|", abs(W[i0, i0] + 1 / np.pi), 1e-6))
    return out


def check_inverse() -> list:
    ts = A.test_state()
    win = A.test_state_window(1.0)
    psi = ts.wavefunction.sample()
    Psi = forward_amplitude(psi, TransformPlan.default(win))
    back = inverse_amplitude(Psi, win)
    point = pointwise_inverse(Psi, win, 0.0)
    return [Metric("relative L2 round-trip error", _rel_l2(back.values, psi.values), 1e-8),
            Metric("max |pointwise(y0=0) - inverse|",
                   float(np.max(np.abs(point.values - back.values))), 1e-7)]


def check_gabor() -> list:
    win = GaussianWindow()
    psi = A.test_state().wavefunction.sample()
    qa = pa = Axis.default()
    half = Axis(-4.0, 4.0, 256)
    Psi_half = forward_amplitude(psi, TransformPlan(DEFAULT_X_AXIS, half, half, win))
    Phi = gabor_transform(psi, lambda x: np.conj(win(-x)),
                          TransformPlan(DEFAULT_X_AXIS, qa, pa, win))
    Q, P = Phi.mesh()
    twist = np.exp(0.5j * Q * P)
    Psi = forward_amplitude(psi, TransformPlan.default(win))
    S = symplectic_fourier(Psi)
    return [Metric("max |Psi(q/2,p/2) - 2e^{iqp/2}Phi|",
                   float(np.max(np.abs(Psi_half.values - 2 * twist * Phi.values))), 1e-9),
            Metric("max |S[Psi] - e^{iqp/2}Phi|",
                   float(np.max(np.abs(S.values - twist * Phi.values))), 1e-8)]


def check_husimi() -> list:
    ts = A.test_state()
    win = GaussianWindow()
    qa = pa = Axis.default()
    Psi = forward_amplitude(ts.wavefunction.sample(), TransformPlan.default(win))
    H = spectrogram_husimi(Psi)
    Q, P = H.mesh()
    W = ts.wigner.on_grid(qa, pa).values
    hq, hp = qa.spacing, pa.spacing
    kq = np.arange(-(qa.n - 1), qa.n) * hq
    kp = np.arange(-(pa.n - 1), pa.n) * hp
    kern = np.exp(-kq[:, None] ** 2 - kp[None, :] ** 2) / np.pi
    smooth = fftconvolve(W, kern, mode="full")[qa.n - 1: 2 * qa.n - 1, pa.n - 1: 2 * pa.n - 1]
    smooth = smooth * hq * hp
    ck = cohen_kernel(win, qa, pa)
    R, V = ck.mesh()
    return [Metric("max |spectrogram - W*Gaussian|", float(np.max(np.abs(H.values - smooth))), 1e-6),
            Metric("max |f(r,v) - e^{-(r^2+v^2)/4}|",
                   float(np.max(np.abs(ck.values - np.exp(-(R**2 + V**2) / 4)))), 1e-10),
            Metric("negative part of spectrogram", float(max(0.0, -np.min(H.values))), 0.0),
            Metric("|mass - 1|", abs(integrate_2d(H).real - 1), 1e-8)]


def check_spectra() -> list:
    H = PolySymbol.parse("p^2/2 + q^2/2")
    win = GaussianWindow()
    basis = [forward_amplitude(A.oscillator_wavefunction(n).sample(), TransformPlan.default(win))
             for n in range(6)]
    energy_err, resid = 0.0, 0.0
    for n, Psi in enumerate(basis):
        HPsi = hamiltonian_star_apply(H, Psi)
        energy_err = max(energy_err, abs(inner_product(Psi, HPsi) - (n + 0.5)))
        resid = max(resid, l2_norm(HPsi - Psi * (n + 0.5)))
    gram = np.array([[inner_product(a, b) for b in basis] for a in basis])
    return [Metric("max |<Psi_n|H*Psi_n> - (n+1/2)|", energy_err, 1e-6),
            Metric("max |Gram - I|", float(np.max(np.abs(gram - np.eye(6)))), 1e-8),
            Metric("max ||H*Psi_n - E_n Psi_n||", resid, 1e-6)]


def check_free_particle() -> list:
    cfg = EvolutionConfig(PolySymbol(), dt=0.002, steps=1000, snapshot_steps=(250, 500, 1000))
    psi0 = A.free_particle_wavefunction(0.0).sample()
    err = 0.0
    for snap in evolve_amplitude(psi0, cfg):
        ref = A.free_particle_amplitude(snap.t).on_grid()
        err = max(err, float(np.max(np.abs(snap.field.values - ref.values))))
    drift = abs(evolve_coordinate(psi0, cfg).norm() - 1)
    origin = abs(complex(A.free_particle_amplitude(1.0)(0.0, 0.0)))
    return [Metric("max |Psi_split-step - Psi_closed| at t=0.5,1,2", err, 1e-6),
            Metric("norm drift over 1000 steps", drift, 1e-10),
            Metric("||Psi(0,0,1)| - 2/sqrt(pi sqrt5)|",
                   abs(origin - 2 / np.sqrt(np.pi * np.sqrt(5))), 1e-6)]


def check_subspace() -> list:
    ts = A.test_state()
    psi = ts.wavefunction.sample()
    custom = CustomWindow(sample_window(GaussianWindow(0.7, 0.3, -0.2), DEFAULT_X_AXIS))
    windows = {"gaussian": A.test_state_window(1.0), "oscillator n=1": OscillatorWindow(1),
               "custom": custom}
    out = []
    for label, win in windows.items():
        Psi = forward_amplitude(psi, TransformPlan.default(win))
        out.append(Metric(f"{label}: subspace residual", subspace_residual(Psi, win), 1e-6))
        out.append(Metric(f"{label}: state projection residual",
                          state_projection_residual(Psi, psi), 1e-6))
    rng = np.random.default_rng(20240611)
    qa = pa = Axis.default()
    Q, P = np.meshgrid(qa.points, pa.points, indexing="ij")
    noise = rng.standard_normal((qa.n, pa.n)) + 1j * rng.standard_normal((qa.n, pa.n))
    field_ = PhaseSpaceField(qa, pa, noise * np.exp(-(Q**2 + P**2) / 4))
    field_ = field_ * (1 / l2_norm(field_))
    r = subspace_residual(field_, GaussianWindow())
    out.append(Metric("random field: 0.1 - residual (must be < 0)", 0.1 - r, 0.0))
    return out


def check_bargmann() -> list:
    ts = A.test_state()
    psi = ts.wavefunction.sample()
    worst = 0.0
    for beta in (0.5, 1.0, 2.0):
        win = A.test_state_window(beta)
        Psi = forward_amplitude(psi, TransformPlan.default(win))
        worst = max(worst, A.amplitude_cr_residual(Psi, beta, win.lam))
        for mu in (0j, 1 + 0.5j):
            wc = GaussianWindow.from_lambda(beta, 0.3 - 0.2j)
            Psi = forward_amplitude(A.coherent_wavefunction(mu).sample(), TransformPlan.default(wc))
            worst = max(worst, A.amplitude_cr_residual(Psi, beta, wc.lam))
    adj = 0.0
    qa = pa = Axis.default()
    for beta, lam in ((1.0, 0j), (0.5, 0.3 - 0.2j), (2.0, -0.4 + 0.1j)):
        q, p = np.meshgrid(qa.points, pa.points, indexing="ij")
        z = A.bargmann_z(q, p, beta)
        G1 = PhaseSpaceField(qa, pa, 1 + z + 0.3 * z**2)
        G2 = PhaseSpaceField(qa, pa, z - 0.5j * z**3)
        left = A.bargmann_inner(A.bargmann_operator("annihilation", G1, beta, lam), G2, beta, lam)
        right = A.bargmann_inner(G1, A.bargmann_operator("creation", G2, beta, lam), beta, lam)
        adj = max(adj, abs(left - right) / max(abs(left), 1e-300))
    return [Metric("max Cauchy-Riemann residual", worst, 1e-5),
            Metric("max relative adjoint defect", adj, 1e-6)]


def check_expectations() -> list:
    Psi = A.test_state().amplitude(1.0).on_grid()
    mq = expectation(PolySymbol.q(), Psi)
    mp = expectation(PolySymbol.p(), Psi)
    return [Metric("|<q> - 1/(1+2sqrt2)|", abs(mq - A.TEST_STATE_MEAN_Q), 1e-6),
            Metric("|<p> - 8sqrt2/(9e^{1/3}sqrt3(1+2sqrt2))|", abs(mp - A.TEST_STATE_MEAN_P), 1e-6)]


def check_superposition() -> list:
    c1 = c2 = 1 / np.sqrt(2)
    win = GaussianWindow()
    qa = pa = Axis.default()
    psi0 = A.oscillator_wavefunction(0).sample()
    psi1 = A.oscillator_wavefunction(1).sample()
    plan = TransformPlan.default(win)
    Psi12 = forward_amplitude(psi0 * c1 + psi1 * c2, plan)
    W12 = _field_star(Psi12, Psi12.conj()).values
    W0 = A.oscillator_wigner(0).on_grid(qa, pa).values
    W1 = A.oscillator_wigner(1).on_grid(qa, pa).values
    X = cross_wigner(psi0, psi1, qa, pa).values
    rhs = c1**2 * W0 + c2**2 * W1 + c1 * c2 * X + c2 * c1 * np.conj(X)
    P0 = A.oscillator_amplitude(0, win).on_grid(qa, pa).values
    P1 = A.oscillator_amplitude(1, win).on_grid(qa, pa).values
    hus = (c1**2 * np.abs(P0) ** 2 + c2**2 * np.abs(P1) ** 2
           + 2 * c1 * c2 * np.real(P0 * np.conj(P1)))
    return [Metric("max |W_12 - superposed Wigner|", float(np.max(np.abs(W12 - rhs))), 1e-6),
            Metric("max ||Psi_12|^2 - superposed moduli|",
                   float(np.max(np.abs(np.abs(Psi12.values) ** 2 - hus))), 1e-6)]


def check_figures() -> list:
    figs = {n: build_figure(n, ODD_AXIS, ODD_AXIS) for n in range(1, 7)}
    nonfinite = sum(int(np.count_nonzero(~np.isfinite(f.values)))
                    for fig in figs.values() for f in fig.fields.values())
    w2min = float(np.min(figs[2].fields["wigner"].values))
    f3 = figs[3].fields
    vq_wide, vq_narrow = (marginal_variance(f3["modsq_beta0.5"], "q"),
                          marginal_variance(f3["modsq_beta2"], "q"))
    vp_wide, vp_narrow = (marginal_variance(f3["modsq_beta2"], "p"),
                          marginal_variance(f3["modsq_beta0.5"], "p"))
    i0 = ODD_AXIS.n // 2
    w4 = float(figs[4].fields["wigner"].values[i0, i0])
    win = GaussianWindow(1.0, 4.0, -2.0)
    q, p = np.meshgrid(ODD_AXIS.points, ODD_AXIS.points, indexing="ij")
    k0, kw, xw = -2.0, win.k_w, win.x_w
    ref6 = ((4 / np.pi**3) ** 0.25 * np.exp(-((2 * p - k0 - kw) ** 2) / 2)
            * np.cos(2 * q * p - 2 * q * k0 - 2 * xw * p + xw * k0 + xw * kw / 2))
    return [Metric("non-finite entries across figures 1-6", float(nonfinite), 0.0),
            Metric("figure 2: min W (must be < 0)", w2min, -1e-3),
            Metric("figure 3: Var_q(beta=2) - Var_q(beta=0.5) (must be < 0)",
                   vq_narrow - vq_wide, 0.0),
            Metric("figure 3: Var_p(beta=0.5) - Var_p(beta=2) (must be < 0)",
                   vp_narrow - vp_wide, 0.0),
            Metric("figure 4: |W_1(0,0) + 1/pi|", abs(w4 + 1 / np.pi), 1e-6),
            Metric("figure 6: max |Re Psi - closed form|",
                   float(np.max(np.abs(figs[6].fields["re"].values - ref6))), 1e-12)]


CHECKS: dict[int, tuple[str, Callable[[], list]]] = {
    1: ("coherent-state amplitude", check_coherent),
    2: ("Born relation", check_born),
    3: ("window independence of W", check_window_independence),
    4: ("inverse round trip", check_inverse),
    5: ("Gabor and symplectic relations", check_gabor),
    6: ("Husimi chain", check_husimi),
    7: ("oscillator spectra", check_spectra),
    8: ("free-particle dynamics", check_free_particle),
    9: ("subspace characterization", check_subspace),
    10: ("Bargmann analyticity", check_bargmann),
    11: ("expectation values", check_expectations),
    12: ("superposition identities", check_superposition),
    13: ("figure reproduction", check_figures),
}


def run_check(number: int) -> CheckResult:
    """Run acceptance criterion ``number`` (1..13)."""
    title, fn = CHECKS[number]
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        metrics = fn()
    return CheckResult(number, title, metrics, time.perf_counter() - t0)


def run_all(numbers=None) -> list:
    """Run the selected (default: all) acceptance criteria in order."""
    return [run_check(n) for n in (numbers or sorted(CHECKS))]
