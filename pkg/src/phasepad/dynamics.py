"""Time evolution of wavefunctions and phase-space amplitudes.

Propagation happens in coordinate space with the Strang split-step
Fourier method. Amplitudes at the requested times are then obtained with
:func:`~phasepad.xform.forward_amplitude`. The phase-space Schrödinger
equation ``i∂_tΨ = H ⋆ Ψ`` is used only as a residual diagnostic. For a
Hamiltonian with a known discrete spectrum, :func:`eigen_expand` and
:func:`evolve_by_phases` give an independent route.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import scipy.fft as sfft

from .errors import ConfigError, NormalizationWarning, PreconditionError, ShapeError, TruncationWarning
from .numgrid import Axis, PhaseSpaceField, Wavefunction1D, fft_workers, inner_product
from .staralg import PolySymbol, bopp_apply
from .windows import GaussianWindow, WindowSpec
from .xform import DEFAULT_X_AXIS, TransformPlan, forward_amplitude

__all__ = [
    "MAX_POTENTIAL_DEGREE",
    "EvolutionConfig",
    "Snapshot",
    "evolve_coordinate",
    "evolve_amplitude",
    "hamiltonian_star_apply",
    "schrodinger_residual",
    "eigen_expand",
    "evolve_by_phases",
    "oscillator_energies",
]

#: Largest supported degree of the potential.
MAX_POTENTIAL_DEGREE = 8

#: Tolerance on the Gram matrix of an eigenbasis.
GRAM_TOLERANCE = 1e-6


def _default_axis() -> Axis:
    return Axis.default()


@dataclass(frozen=True)
class EvolutionConfig:
    """Hamiltonian ``p²/2 + V(q)`` with time step, step count and grids.

    Parameters
    ----------
    potential : PolySymbol
        ``V(q)``; must not depend on ``p`` and has degree at most 8.
    dt : float
        Time step, positive.
    steps : int
        Number of steps, nonnegative. Zero steps is the identity map.
    window : WindowSpec
        Window used when amplitudes are formed.
    x_axis, q_axis, p_axis : Axis
        Coordinate grid for propagation and phase-space grid for output.
    t0 : float
        Initial time.
    snapshots : int
        Number of uniformly spaced output times, including both ends.
    snapshot_steps : tuple of int, optional
        Explicit step indices at which to record; overrides ``snapshots``.

    Raises
    ------
    ConfigError
        On any violated constraint, including the split-step stability
        bound ``dt · k_max²/2 < π`` with ``k_max`` the x-grid Nyquist
        wavenumber.
    """

    potential: PolySymbol
    dt: float
    steps: int
    window: WindowSpec = field(default_factory=GaussianWindow)
    x_axis: Axis = DEFAULT_X_AXIS
    q_axis: Axis = field(default_factory=_default_axis)
    p_axis: Axis = field(default_factory=_default_axis)
    t0: float = 0.0
    snapshots: int = 10
    snapshot_steps: tuple | None = None

    def __post_init__(self):
        if not isinstance(self.potential, PolySymbol):
            raise ConfigError("potential must be a PolySymbol")
        if not self.potential.q_only:
            raise ConfigError("potential must depend on q only")
        if self.potential.degree > MAX_POTENTIAL_DEGREE:
            raise ConfigError(f"potential degree {self.potential.degree} exceeds "
                              f"{MAX_POTENTIAL_DEGREE}")
        if not self.potential.is_real:
            raise ConfigError("potential must have real coefficients")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("dt must be positive")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ConfigError("steps must be a nonnegative integer")
        phase = self.dt * self.x_axis.nyquist**2 / 2
        if phase >= np.pi:
            raise ConfigError(f"dt={self.dt:g} violates the split-step bound: maximal kinetic "
                              f"phase {phase:.3g} >= pi")
        if self.snapshot_steps is not None:
            s = tuple(int(k) for k in self.snapshot_steps)
            if any(k < 0 or k > self.steps for k in s) or list(s) != sorted(set(s)):
                raise ConfigError("snapshot_steps must be increasing and within 0..steps")
            object.__setattr__(self, "snapshot_steps", s)
        elif int(self.snapshots) < 1:
            raise ConfigError("snapshots must be at least 1")

    @property
    def hamiltonian(self) -> PolySymbol:
        """The symbol ``p²/2 + V(q)``."""
        return PolySymbol.p() ** 2 / 2 + self.potential

    @property
    def record_steps(self) -> tuple:
        """Step indices at which snapshots are taken."""
        if self.snapshot_steps is not None:
            return self.snapshot_steps
        if self.steps == 0:
            return (0,)
        raw = np.rint(np.linspace(0, self.steps, int(self.snapshots))).astype(int)
        return tuple(sorted(set(raw.tolist())))

    @property
    def t_final(self) -> float:
        return self.t0 + self.steps * self.dt


class Snapshot(NamedTuple):
    """Amplitude at time ``t``."""

    t: float
    field: PhaseSpaceField


def _check_initial(psi0: Wavefunction1D, cfg: EvolutionConfig):
    if psi0.axis != cfg.x_axis:
        raise ShapeError("psi0 must be sampled on cfg.x_axis")
    nrm = psi0.norm()
    if abs(nrm - 1) > 1e-6:
        warnings.warn(f"initial state has norm {nrm:.9g}", NormalizationWarning, stacklevel=3)
    vals = np.abs(psi0.values)
    peak = vals.max()
    if peak > 0 and max(vals[0], vals[-1]) > 1e-8 * peak:
        warnings.warn("initial state does not decay at the x-grid edges", TruncationWarning,
                      stacklevel=3)


def _propagate(psi0: Wavefunction1D, cfg: EvolutionConfig, record: Sequence[int]):
    """Yield ``(step, values)`` at the requested step indices."""
    x = cfg.x_axis.points
    n = cfg.x_axis.n
    k = 2 * np.pi * sfft.fftfreq(n, d=cfg.x_axis.spacing)
    V = np.real(cfg.potential(x, np.zeros_like(x)))
    half_v = np.exp(-0.5j * cfg.dt * V)
    kinetic = np.exp(-0.5j * cfg.dt * k * k)
    workers = fft_workers()
    psi = np.array(psi0.values, dtype=complex)
    wanted = set(record)
    if 0 in wanted:
        yield 0, psi.copy()
    for step in range(1, max(record, default=0) + 1):
        psi = half_v * psi
        psi = sfft.ifft(kinetic * sfft.fft(psi, workers=workers), workers=workers)
        psi = half_v * psi
        if step in wanted:
            yield step, psi.copy()


def evolve_coordinate(psi0: Wavefunction1D, cfg: EvolutionConfig) -> Wavefunction1D:
    """Propagate ``i∂_tψ = (−½∂²ₓ + V)ψ`` for ``cfg.steps`` Strang steps.

    Each step applies ``e^{−iVdt/2} e^{−iTdt} e^{−iVdt/2}`` with the kinetic
    factor diagonal in Fourier space. The scheme is unitary and second
    order in ``dt``.

    Warns
    -----
    NormalizationWarning
        If ``psi0`` is not unit-norm within 1e-6.
    TruncationWarning
        If ``psi0`` does not decay at the grid edges.
    """
    _check_initial(psi0, cfg)
    *_, (_, vals) = _propagate(psi0, cfg, [cfg.steps])
    return psi0.with_values(vals)


def evolve_amplitude(psi0: Wavefunction1D, cfg: EvolutionConfig) -> list[Snapshot]:
    """Amplitudes ``Ψ(·,·,t_k)`` at the snapshot times of ``cfg``."""
    _check_initial(psi0, cfg)
    plan = TransformPlan(cfg.x_axis, cfg.q_axis, cfg.p_axis, cfg.window)
    out = []
    for step, vals in _propagate(psi0, cfg, cfg.record_steps):
        Psi = forward_amplitude(psi0.with_values(vals), plan)
        out.append(Snapshot(cfg.t0 + step * cfg.dt, Psi))
    return out


def hamiltonian_star_apply(cfg: EvolutionConfig | PolySymbol, Psi: PhaseSpaceField,
                           method: str = "spectral") -> PhaseSpaceField:
    """``H ⋆ Ψ = H(q_BL, p_BL) Ψ`` through the Bopp substitutions.

    ``cfg`` may be an :class:`EvolutionConfig` or the Hamiltonian symbol
    itself.
    """
    H = cfg.hamiltonian if isinstance(cfg, EvolutionConfig) else cfg
    return bopp_apply(H, "left", Psi, method=method)


def schrodinger_residual(psi0: Wavefunction1D, cfg: EvolutionConfig, step: int) -> float:
    """Relative residual of ``i∂_tΨ = H ⋆ Ψ`` at a given step.

    ``∂_tΨ`` is the centred difference of amplitudes one step apart, so the
    residual is ``O(dt²)`` plus the grid error of the star product.

    Returns
    -------
    float
        ``‖i∂_tΨ − H⋆Ψ‖ / ‖H⋆Ψ‖``.
    """
    if not 1 <= step <= cfg.steps - 1:
        raise ValueError("step must have neighbours on both sides")
    _check_initial(psi0, cfg)
    plan = TransformPlan(cfg.x_axis, cfg.q_axis, cfg.p_axis, cfg.window)
    amps = {s: forward_amplitude(psi0.with_values(v), plan)
            for s, v in _propagate(psi0, cfg, [step - 1, step, step + 1])}
    dPsi = (amps[step + 1].values - amps[step - 1].values) / (2 * cfg.dt)
    HPsi = hamiltonian_star_apply(cfg, amps[step]).values
    return float(np.linalg.norm(1j * dPsi - HPsi) / np.linalg.norm(HPsi))


def eigen_expand(Psi0: PhaseSpaceField, basis: Sequence[PhaseSpaceField]) -> np.ndarray:
    """Expansion coefficients ``c_n = ⟨Ψ_n, Ψ₀⟩``.

    Raises
    ------
    PreconditionError
        If the Gram matrix of ``basis`` deviates from the identity by more
        than 1e-6 in any entry.
    """
    basis = list(basis)
    if not basis:
        return np.zeros(0, dtype=complex)
    gram = np.array([[inner_product(a, b) for b in basis] for a in basis])
    dev = np.max(np.abs(gram - np.eye(len(basis))))
    if dev > GRAM_TOLERANCE:
        raise PreconditionError(f"basis is not orthonormal (Gram deviation {dev:.3g})")
    return np.array([inner_product(b, Psi0) for b in basis])


def evolve_by_phases(coeffs, energies, basis: Sequence[PhaseSpaceField], t: float,
                     t0: float = 0.0) -> PhaseSpaceField:
    """``Σ c_n e^{−iE_n(t − t₀)} Ψ_n``.

    Raises
    ------
    ShapeError
        If the three sequences differ in length or are empty.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    energies = np.asarray(energies, dtype=float)
    basis = list(basis)
    if not (len(coeffs) == len(energies) == len(basis)) or not basis:
        raise ShapeError("coeffs, energies and basis must be nonempty and of equal length")
    phases = coeffs * np.exp(-1j * energies * (t - t0))
    out = np.zeros_like(np.asarray(basis[0].values, dtype=complex))
    for c, b in zip(phases, basis):
        out = out + c * b.values
    return basis[0].with_values(out)


def oscillator_energies(nmax: int) -> np.ndarray:
    """``E_n = n + ½`` for ``n = 0..nmax``."""
    return np.arange(nmax + 1) + 0.5
