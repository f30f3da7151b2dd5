"""Phase-space amplitude transforms.

The amplitude of a state ψ with respect to a window φ₀ is

    Ψ(q, p) = √(2/π) ∫ ψ(u) conj(φ₀(2q − u)) e^{2ip(q − u)} du.

For fixed ``q`` this is a Fourier integral over ``u`` evaluated at frequency
``2p``, so each grid row is one chirp-z transform (:func:`~phasepad.numgrid.chirp_dft`)
followed by the phase twiddle ``e^{2ipq}``. Related objects built here are
the Gabor transform, the symplectic Fourier transform, the inverse
transforms, the spectrogram and the kernel of the associated Cohen-class
distribution.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    AliasingError,
    InconsistentAmplitudeWarning,
    RangeError,
    ShapeError,
    SingularityError,
    TruncationError,
)
from .numgrid import (
    Axis,
    PhaseSpaceField,
    Wavefunction1D,
    chirp_dft,
    fourier_eval,
    l2_norm,
    trapezoid_weights,
)
from .windows import CustomWindow, WindowSpec

__all__ = [
    "TransformPlan",
    "window_grid",
    "forward_amplitude",
    "gabor_transform",
    "gabor_window",
    "symplectic_fourier",
    "inverse_amplitude",
    "pointwise_inverse",
    "spectrogram_husimi",
    "cohen_kernel",
    "cross_wigner",
    "DEFAULT_X_AXIS",
]

#: Default coordinate axis for wavefunctions: wide enough that 2q − u stays
#: inside the sampled range for q on the default phase-space grid.
DEFAULT_X_AXIS = Axis(-16.0, 16.0, 512)

#: Relative residual above which an inverse transform warns that its input
#: is not a valid amplitude for the window.
SUBSPACE_THRESHOLD = 1e-4

#: Smallest |φ₀(y₀)| accepted by :func:`pointwise_inverse`.
SINGULAR_WINDOW = 1e-6


@dataclass(frozen=True)
class TransformPlan:
    """Grids and window for a forward transform.

    Parameters
    ----------
    x_axis : Axis
        Coordinate grid of the wavefunction.
    q_axis, p_axis : Axis
        Phase-space output grid.
    window : WindowSpec
        The window state φ₀.

    Raises
    ------
    AliasingError
        If frequency ``2 max|p|`` exceeds the Nyquist limit of ``x_axis``.
    RangeError
        If ``q_axis`` is not contained in ``x_axis``.
    """

    x_axis: Axis
    q_axis: Axis
    p_axis: Axis
    window: WindowSpec

    def __post_init__(self):
        pmax = max(abs(self.p_axis.min), abs(self.p_axis.max))
        if 2 * pmax >= self.x_axis.nyquist:
            raise AliasingError(
                f"momentum grid reaches |p| = {pmax:g}, but the coordinate spacing "
                f"{self.x_axis.spacing:.4g} resolves only |p| < {self.x_axis.nyquist / 2:.4g}"
            )
        if not self.x_axis.contains(self.q_axis.min, self.q_axis.max):
            raise RangeError("q grid must lie inside the coordinate grid")

    @classmethod
    def default(cls, window: WindowSpec, x_axis: Axis | None = None,
                q_axis: Axis | None = None, p_axis: Axis | None = None) -> "TransformPlan":
        """Plan on the default grids (``x`` in [−16, 16], ``q, p`` in [−8, 8])."""
        return cls(
            x_axis or DEFAULT_X_AXIS,
            q_axis or Axis.default(),
            p_axis or Axis.default(),
            window,
        )


def window_grid(window: WindowSpec, starts, step: float, m: int) -> np.ndarray:
    """``φ₀(starts[i] + j·step)`` for ``j < m`` as a ``(len(starts), m)`` array.

    Analytic windows are evaluated in closed form. Sampled windows use the
    band-limited interpolant, batched over rows, and vanish outside their
    sampled range.
    """
    starts = np.asarray(starts, dtype=float)
    pts = starts[:, None] + step * np.arange(m)[None, :]
    if not isinstance(window, CustomWindow):
        return np.asarray(window(pts), dtype=complex)
    ax = window.axis
    vals = fourier_eval(
        np.broadcast_to(window.samples.values, (len(starts), ax.n)),
        ax, 0.0, step, m, offsets=starts,
    )
    tol = 1e-9 * ax.spacing
    vals[(pts < ax.min - tol) | (pts > ax.max + tol)] = 0.0
    return vals


def forward_amplitude(psi: Wavefunction1D, plan: TransformPlan) -> PhaseSpaceField:
    """Phase-space amplitude Ψ of ``psi`` for the window of ``plan``.

    Parameters
    ----------
    psi : Wavefunction1D
        Unit-norm state sampled on ``plan.x_axis``.
    plan : TransformPlan
        Grids and window.

    Returns
    -------
    PhaseSpaceField
        ``Ψ(q, p) = √(2/π) ∫ ψ(u) conj(φ₀(2q − u)) e^{2ip(q − u)} du``.

    Raises
    ------
    ShapeError
        If ``psi`` is not sampled on ``plan.x_axis``.
    """
    if psi.axis != plan.x_axis:
        raise ShapeError("wavefunction axis differs from the plan's coordinate axis")
    xa, qa, pa = plan.x_axis, plan.q_axis, plan.p_axis
    q = qa.points
    u = xa.points
    # rows: conj(φ₀(2q_i − u_n)), a uniform grid with step −h_x per row
    win = np.conj(window_grid(plan.window, 2 * q - u[0], -xa.spacing, xa.n))
    g = win * (psi.values * trapezoid_weights(xa))[None, :]
    rows = chirp_dft(g, u[0], xa.spacing, 2 * pa.min, 2 * pa.spacing, pa.n, sign=-1)
    twiddle = np.exp(2j * np.outer(q, pa.points))
    return PhaseSpaceField(qa, pa, np.sqrt(2 / np.pi) * rows * twiddle)


def gabor_window(window: WindowSpec):
    """The Gabor window ``w(x) = conj(φ₀(−x))`` matching a window state."""

    def w(x):
        return np.conj(window(-np.asarray(x, dtype=float)))

    return w


def gabor_transform(psi: Wavefunction1D, window_fn, plan: TransformPlan) -> PhaseSpaceField:
    """Windowed Fourier transform ``Φ(q,p) = (2π)^{-1/2} ∫ ψ(u) w(u − q) e^{−ipu} du``.

    Parameters
    ----------
    psi : Wavefunction1D
        Signal sampled on ``plan.x_axis``.
    window_fn : callable or Wavefunction1D
        The window ``w``. Samples are interpolated band-limitedly and taken as
        zero outside their range.
    plan : TransformPlan
        Supplies the grids; its ``window`` field is not used.
    """
    if psi.axis != plan.x_axis:
        raise ShapeError("wavefunction axis differs from the plan's coordinate axis")
    xa, qa, pa = plan.x_axis, plan.q_axis, plan.p_axis
    u = xa.points
    q = qa.points
    starts = u[0] - q
    if isinstance(window_fn, Wavefunction1D):
        wgrid = _sampled_grid(window_fn, starts, xa.spacing, xa.n)
    else:
        wgrid = np.asarray(window_fn(starts[:, None] + xa.spacing * np.arange(xa.n)), dtype=complex)
    if max(abs(pa.min), abs(pa.max)) >= xa.nyquist:
        raise AliasingError("momentum grid exceeds the Nyquist limit of the coordinate grid")
    g = wgrid * (psi.values * trapezoid_weights(xa))[None, :]
    vals = chirp_dft(g, u[0], xa.spacing, pa.min, pa.spacing, pa.n, sign=-1)
    return PhaseSpaceField(qa, pa, vals / np.sqrt(2 * np.pi))


def _sampled_grid(samples: Wavefunction1D, starts, step, m) -> np.ndarray:
    ax = samples.axis
    starts = np.asarray(starts, dtype=float)
    vals = fourier_eval(np.broadcast_to(samples.values, (len(starts), ax.n)), ax, 0.0, step, m,
                        offsets=starts)
    pts = starts[:, None] + step * np.arange(m)[None, :]
    tol = 1e-9 * ax.spacing
    vals[(pts < ax.min - tol) | (pts > ax.max + tol)] = 0.0
    return vals


def cross_wigner(psi: Wavefunction1D, phi: Wavefunction1D, q_axis: Axis | None = None,
                 p_axis: Axis | None = None) -> PhaseSpaceField:
    """Two-state Wigner function ``(2π)^{-1} ∫ ψ(q − y/2) conj(φ(q + y/2)) e^{ipy} dy``.

    This is the forward transform with ``φ`` as the window, divided by
    ``√(2π)``. Neither state needs unit norm.
    """
    if psi.axis != phi.axis:
        raise ShapeError("the two states live on different axes")
    xa = psi.axis
    qa = q_axis or Axis.default()
    pa = p_axis or Axis.default()
    if 2 * max(abs(pa.min), abs(pa.max)) >= xa.nyquist:
        raise AliasingError("momentum grid exceeds the Nyquist limit of the coordinate grid")
    if not xa.contains(qa.min, qa.max):
        raise RangeError("q grid must lie inside the coordinate grid")
    q = qa.points
    u = xa.points
    win = np.conj(_sampled_grid(phi, 2 * q - u[0], -xa.spacing, xa.n))
    g = win * (psi.values * trapezoid_weights(xa))[None, :]
    rows = chirp_dft(g, u[0], xa.spacing, 2 * pa.min, 2 * pa.spacing, pa.n, sign=-1)
    twiddle = np.exp(2j * np.outer(q, pa.points))
    return PhaseSpaceField(qa, pa, rows * twiddle / np.pi)


def symplectic_fourier(f: PhaseSpaceField, q_axis: Axis | None = None,
                       p_axis: Axis | None = None) -> PhaseSpaceField:
    """Symplectic Fourier transform ``(2π)^{-1} ∫ f(q′,p′) e^{i(p′q − q′p)} dq′dp′``.

    The transform is separable and is evaluated as two chirp-z passes. It is
    an involution. The output grid defaults to the input grid.

    Raises
    ------
    AliasingError
        If the output grid extends beyond the Nyquist limit of the input grid.
    """
    qo = q_axis or f.q_axis
    po = p_axis or f.p_axis
    qmax = max(abs(qo.min), abs(qo.max))
    pmax = max(abs(po.min), abs(po.max))
    if qmax >= f.p_axis.nyquist or pmax >= f.q_axis.nyquist:
        raise AliasingError("output grid exceeds the Nyquist limit of the input grid")
    wq = trapezoid_weights(f.q_axis)
    wp = trapezoid_weights(f.p_axis)
    vals = np.asarray(f.values, dtype=complex) * wq[:, None] * wp[None, :]
    # sum over p′ with e^{+ip′q}: rows indexed by q′, columns by output q
    t = chirp_dft(vals, f.p_axis.min, f.p_axis.spacing, qo.min, qo.spacing, qo.n, sign=+1, axis=1)
    # sum over q′ with e^{−iq′p}: result indexed by (output p, output q)
    out = chirp_dft(t, f.q_axis.min, f.q_axis.spacing, po.min, po.spacing, po.n, sign=-1, axis=0)
    return PhaseSpaceField(qo, po, out.T / (2 * np.pi))


def _subspace_check(Psi: PhaseSpaceField, psi: Wavefunction1D, window: WindowSpec) -> float:
    """Relative distance between Ψ and the amplitude of its own inverse.

    Forward after inverse is the orthogonal projector onto the amplitudes of
    the window, so this equals the subspace residual of Ψ.
    """
    nrm = l2_norm(Psi)
    if nrm == 0:
        return 0.0
    try:
        plan = TransformPlan(psi.axis, Psi.q_axis, Psi.p_axis, window)
    except (AliasingError, RangeError):
        return float("nan")
    back = forward_amplitude(psi, plan)
    return l2_norm(back - Psi) / nrm


def inverse_amplitude(Psi: PhaseSpaceField, window: WindowSpec, x_axis: Axis | None = None,
                      check: bool = True) -> Wavefunction1D:
    """Recover ψ from its amplitude.

    ``ψ(x) = √(2/π) ∬ Ψ(q,p) φ₀(2q − x) e^{2ip(x − q)} dq dp``, the adjoint
    of :func:`forward_amplitude`. The ``p`` integral is a chirp-z transform
    evaluated at frequencies ``2x``.

    Parameters
    ----------
    Psi : PhaseSpaceField
        Amplitude, assumed to lie in the range of the forward transform.
    window : WindowSpec
        The window that produced ``Psi``.
    x_axis : Axis, optional
        Output grid, :data:`DEFAULT_X_AXIS` by default.
    check : bool
        If true, re-transform the result and warn with
        :class:`~phasepad.errors.InconsistentAmplitudeWarning` when
        ``Psi`` is further than 1e-4 (relative) from a valid amplitude.
    """
    xa = x_axis or DEFAULT_X_AXIS
    qa, pa = Psi.q_axis, Psi.p_axis
    if 2 * max(abs(xa.min), abs(xa.max)) >= pa.nyquist:
        raise AliasingError("coordinate grid exceeds what the momentum spacing resolves")
    q = qa.points
    x = xa.points
    vals = np.asarray(Psi.values, dtype=complex)
    prime = vals * np.exp(-2j * np.outer(q, pa.points)) * trapezoid_weights(pa)[None, :]
    k = chirp_dft(prime, pa.min, pa.spacing, 2 * xa.min, 2 * xa.spacing, xa.n, sign=+1, axis=1)
    # φ₀(2q_i − x_j): rows start at 2q_i − x_0, step −h_x
    win = window_grid(window, 2 * q - x[0], -xa.spacing, xa.n)
    out = np.sqrt(2 / np.pi) * (trapezoid_weights(qa) @ (k * win))
    psi = Wavefunction1D(xa, out)
    if check:
        resid = _subspace_check(Psi, psi, window)
        if resid > SUBSPACE_THRESHOLD:
            warnings.warn(
                f"field is not a valid amplitude for this window (residual {resid:.3g})",
                InconsistentAmplitudeWarning,
                stacklevel=2,
            )
            psi = Wavefunction1D(xa, out, ("inconsistent-amplitude",))
    return psi


def pointwise_inverse(Psi: PhaseSpaceField, window: WindowSpec, y0: float,
                      x_axis: Axis | None = None) -> Wavefunction1D:
    """Recover ψ from the single slice ``q = (x + y₀)/2`` of its amplitude.

    ``ψ(x) = (√(2π) conj(φ₀(y₀)))^{-1} ∫ Ψ((x + y₀)/2, p) e^{ip(x − y₀)} dp``.
    Off-grid ``q`` values come from band-limited interpolation along ``q``.

    Raises
    ------
    SingularityError
        If ``|φ₀(y₀)| <= 1e-6``.
    RangeError
        If ``(x + y₀)/2`` leaves the ``q`` grid for some output ``x``.
    """
    xa = x_axis or DEFAULT_X_AXIS
    phi = complex(np.asarray(window(np.array([y0])))[0])
    if abs(phi) <= SINGULAR_WINDOW:
        raise SingularityError(f"window vanishes at y0 = {y0}: |φ₀(y0)| = {abs(phi):.3g}")
    qa, pa = Psi.q_axis, Psi.p_axis
    qlo, qhi = (xa.min + y0) / 2, (xa.max + y0) / 2
    if not qa.contains(qlo, qhi):
        raise RangeError("(x + y0)/2 leaves the q grid")
    rows = fourier_eval(Psi.values, qa, qlo, xa.spacing / 2, xa.n, along=0)
    x = xa.points
    phase = np.exp(1j * np.outer(x - y0, pa.points))
    vals = (rows * phase) @ trapezoid_weights(pa)
    return Wavefunction1D(xa, vals / (np.sqrt(2 * np.pi) * np.conj(phi)))


def spectrogram_husimi(Psi: PhaseSpaceField) -> PhaseSpaceField:
    """Spectrogram ``|Ψ(q/2, p/2)/2|²`` on the grid of ``Psi``.

    The half-scaled samples come from band-limited interpolation in both
    directions. The result is real, nonnegative and of unit mass for a
    normalized amplitude whose support fits in the half-size grid.

    Raises
    ------
    RangeError
        If the half-scaled grid is not contained in the input grid.
    """
    qa, pa = Psi.q_axis, Psi.p_axis
    if not (qa.contains(qa.min / 2, qa.max / 2) and pa.contains(pa.min / 2, pa.max / 2)):
        raise RangeError("the half-scaled grid leaves the support of the field")
    half = fourier_eval(Psi.values, qa, qa.min / 2, qa.spacing / 2, qa.n, along=0)
    half = fourier_eval(half, pa, pa.min / 2, pa.spacing / 2, pa.n, along=1)
    return PhaseSpaceField(qa, pa, np.abs(half / 2) ** 2)


def cohen_kernel(window: WindowSpec, r_axis: Axis, v_axis: Axis,
                 theta_axis: Axis | None = None) -> PhaseSpaceField:
    """Kernel ``f(r,v) = ∫ conj(φ₀(θ − v/2)) φ₀(θ + v/2) e^{irθ} dθ``.

    Parameters
    ----------
    window : WindowSpec
        Unit-norm window.
    r_axis, v_axis : Axis
        Output grid; the first field index runs over ``r``.
    theta_axis : Axis, optional
        Integration grid, :data:`DEFAULT_X_AXIS` by default.

    Raises
    ------
    TruncationError
        If more than 1e-10 of the window mass falls outside the integration
        grid once shifted by ``±v/2``.
    AliasingError
        If ``r`` exceeds the Nyquist limit of the integration grid.
    """
    ta = theta_axis or DEFAULT_X_AXIS
    vmax = max(abs(v_axis.min), abs(v_axis.max))
    lo, hi = ta.min + vmax / 2, ta.max - vmax / 2
    if lo >= hi:
        raise TruncationError("integration grid shorter than the v range")
    tail = window.tail_mass(lo, hi)
    if tail > 1e-10:
        raise TruncationError(f"window tail mass {tail:.3g} outside the integration grid")
    if max(abs(r_axis.min), abs(r_axis.max)) >= ta.nyquist:
        raise AliasingError("r grid exceeds the Nyquist limit of the integration grid")
    v = v_axis.points
    theta0 = ta.min
    left = np.conj(window_grid(window, theta0 - v / 2, ta.spacing, ta.n))
    right = window_grid(window, theta0 + v / 2, ta.spacing, ta.n)
    prod = left * right * trapezoid_weights(ta)[None, :]
    vals = chirp_dft(prod, ta.min, ta.spacing, r_axis.min, r_axis.spacing, r_axis.n, sign=+1)
    return PhaseSpaceField(r_axis, v_axis, vals.T)
