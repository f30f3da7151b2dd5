"""Moyal star product, Bopp operators, Wigner functions and the Born relation.

Star products of sampled fields go through the Weyl correspondence with
integral kernels. A symbol ``A(q, p)`` corresponds to the kernel

    a(x, x′) = (2π)^{-1} ∫ A((x + x′)/2, p) e^{ip(x − x′)} dp,

kernels compose by matrix multiplication, and the product kernel is mapped
back with ``C(q, p) = ∫ c(q − y/2, q + y/2) e^{ipy} dy``. This evaluates the
integral form of the star product exactly up to quadrature error, without
the wrap-around of a periodic convolution.

Products with polynomial symbols use the terminating Moyal series, which
coincides with the Bopp substitutions ``q → q ± (i/2)∂_p``,
``p → p ∓ (i/2)∂_q``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .errors import (
    ConsistencyError,
    NormalizationWarning,
    ShapeError,
    TruncationWarning,
    UnsupportedDegreeError,
)
from .numgrid import (
    Axis,
    PhaseSpaceField,
    Wavefunction1D,
    central_diff,
    chirp_dft,
    fourier_eval,
    integrate_2d,
    l2_norm,
    spectral_diff,
    trapezoid_weights,
)
from .windows import (
    CustomWindow,
    GaussianWindow,
    OscillatorWindow,
    SquareWindow,
    WindowSpec,
)
from .xform import cross_wigner

__all__ = [
    "PolySymbol",
    "star_product",
    "bopp_apply",
    "wigner_of",
    "born_wigner",
    "expectation",
    "window_wigner",
    "subspace_residual",
    "state_projection_residual",
    "born_modulus_report",
    "laguerre",
]

#: Highest total degree accepted for polynomial symbols.
MAX_DEGREE = 16
#: Relative edge magnitude above which star products warn about truncation.
EDGE_MASS = 1e-8


# ---------------------------------------------------------------------------
# polynomial symbols


@dataclass(frozen=True)
class PolySymbol:
    """Polynomial ``Σ c_{ab} q^a p^b`` with complex coefficients.

    Stored as a sparse mapping ``{(a, b): c}``. Zero coefficients are
    dropped, so equal polynomials compare equal.
    """

    coeffs: tuple

    def __init__(self, coeffs=None):
        items = {}
        for key, val in dict(coeffs or {}).items():
            a, b = (int(key[0]), int(key[1]))
            if a < 0 or b < 0:
                raise ValueError("monomial powers must be nonnegative")
            val = complex(val)
            if val != 0:
                items[(a, b)] = items.get((a, b), 0) + val
        items = {k: v for k, v in items.items() if v != 0}
        object.__setattr__(self, "coeffs", tuple(sorted(items.items())))
        if self.degree > MAX_DEGREE:
            raise UnsupportedDegreeError(f"total degree {self.degree} exceeds {MAX_DEGREE}")

    # constructors -----------------------------------------------------------
    @classmethod
    def const(cls, c) -> "PolySymbol":
        return cls({(0, 0): c})

    @classmethod
    def q(cls) -> "PolySymbol":
        return cls({(1, 0): 1})

    @classmethod
    def p(cls) -> "PolySymbol":
        return cls({(0, 1): 1})

    @classmethod
    def monomial(cls, a: int, b: int, c=1) -> "PolySymbol":
        return cls({(a, b): c})

    @classmethod
    def parse(cls, text: str) -> "PolySymbol":
        """Parse an expression in ``q`` and ``p`` such as ``"p^2/2 + q^4/4"``."""
        import sympy

        q, p = sympy.symbols("q p")
        try:
            expr = sympy.sympify(text.replace("^", "**"), locals={"q": q, "p": p, "I": sympy.I})
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise ValueError(f"cannot parse polynomial {text!r}") from exc
        extra = expr.free_symbols - {q, p}
        if extra:
            raise ValueError(f"unknown symbols {sorted(map(str, extra))} in {text!r}")
        try:
            poly = sympy.Poly(sympy.expand(expr), q, p)
        except sympy.PolynomialError as exc:
            raise ValueError(f"{text!r} is not a polynomial in q and p") from exc
        return cls({k: complex(v) for k, v in poly.terms()})

    # structure --------------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self.coeffs)

    @property
    def degree(self) -> int:
        return max((a + b for (a, b), _ in self.coeffs), default=0)

    @property
    def q_only(self) -> bool:
        """True if no term contains ``p``."""
        return all(b == 0 for (_, b), _ in self.coeffs)

    @property
    def is_real(self) -> bool:
        """True if every coefficient is real."""
        return all(abs(c.imag) == 0 for _, c in self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "PolySymbol(0)"
        parts = []
        for (a, b), c in self.coeffs:
            c = c.real if c.imag == 0 else c
            parts.append(f"{c!r}*q^{a}*p^{b}")
        return "PolySymbol(" + " + ".join(parts) + ")"

    def to_string(self) -> str:
        parts = []
        for (a, b), c in self.coeffs:
            cs = repr(c.real) if c.imag == 0 else f"({c.real!r}+{c.imag!r}*I)"
            parts.append(f"{cs}*q**{a}*p**{b}")
        return " + ".join(parts) if parts else "0"

    # algebra ----------------------------------------------------------------
    def _coerce(self, other) -> "PolySymbol":
        return other if isinstance(other, PolySymbol) else PolySymbol.const(other)

    def __add__(self, other) -> "PolySymbol":
        other = self._coerce(other)
        out = self.terms
        for k, v in other.coeffs:
            out[k] = out.get(k, 0) + v
        return PolySymbol(out)

    __radd__ = __add__

    def __neg__(self) -> "PolySymbol":
        return PolySymbol({k: -v for k, v in self.coeffs})

    def __sub__(self, other) -> "PolySymbol":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PolySymbol":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PolySymbol":
        """Pointwise (commutative) product."""
        other = self._coerce(other)
        out: dict = {}
        for (a1, b1), c1 in self.coeffs:
            for (a2, b2), c2 in other.coeffs:
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, 0) + c1 * c2
        return PolySymbol(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "PolySymbol":
        return PolySymbol({k: v / scalar for k, v in self.coeffs})

    def __pow__(self, n: int) -> "PolySymbol":
        out = PolySymbol.const(1)
        for _ in range(int(n)):
            out = out * self
        return out

    def derivative(self, dq: int = 0, dp: int = 0) -> "PolySymbol":
        out = {}
        for (a, b), c in self.coeffs:
            if a >= dq and b >= dp:
                fac = factorial(a) // factorial(a - dq) * (factorial(b) // factorial(b - dp))
                out[(a - dq, b - dp)] = c * fac
        return PolySymbol(out)

    def star(self, other: "PolySymbol") -> "PolySymbol":
        """Exact Moyal product of two polynomials."""
        other = self._coerce(other)
        out = PolySymbol()
        nmax = min(self.degree, other.degree)
        for n in range(nmax + 1):
            pref = (0.5j) ** n / factorial(n)
            for k in range(n + 1):
                left = self.derivative(n - k, k)
                right = other.derivative(k, n - k)
                if left.coeffs and right.coeffs:
                    out = out + (left * right) * (pref * comb(n, k) * (-1) ** k)
        return out

    def __call__(self, q, p) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        out = np.zeros(np.broadcast(q, p).shape, dtype=complex)
        for (a, b), c in self.coeffs:
            out = out + c * q**a * p**b
        return out

    def evaluate(self, q_axis: Axis, p_axis: Axis) -> PhaseSpaceField:
        return PhaseSpaceField.from_function(self, q_axis, p_axis)


# ---------------------------------------------------------------------------
# Weyl symbol <-> kernel


def _edge_ratio(values: np.ndarray) -> float:
    peak = np.max(np.abs(values))
    if peak == 0:
        return 0.0
    edge = max(
        np.max(np.abs(values[0])), np.max(np.abs(values[-1])),
        np.max(np.abs(values[:, 0])), np.max(np.abs(values[:, -1])),
    )
    return float(edge / peak)


def symbol_to_kernel(f: PhaseSpaceField) -> np.ndarray:
    """Kernel matrix ``a[m, n] = a(x_m, x_n)`` on the q grid."""
    qa, pa = f.q_axis, f.p_axis
    n = qa.n
    half = fourier_eval(f.values, qa, qa.min, qa.spacing / 2, 2 * n - 1, along=0)
    weighted = half * trapezoid_weights(pa)[None, :]
    ahat = chirp_dft(weighted, pa.min, pa.spacing, -(n - 1) * qa.spacing, qa.spacing,
                     2 * n - 1, sign=+1, axis=1) / (2 * np.pi)
    m = np.arange(n)
    return ahat[m[:, None] + m[None, :], m[:, None] - m[None, :] + n - 1]


def kernel_to_symbol(c: np.ndarray, q_axis: Axis, p_axis: Axis) -> np.ndarray:
    """Weyl symbol on the grid from a kernel matrix on the q grid."""
    n = q_axis.n
    i = np.arange(n)[:, None]
    t = np.arange(-(n - 1), n)[None, :]
    rows, cols = i - t, i + t
    valid = (rows >= 0) & (rows < n) & (cols >= 0) & (cols < n)
    d = np.where(valid, c[np.clip(rows, 0, n - 1), np.clip(cols, 0, n - 1)], 0.0)
    h = q_axis.spacing
    return chirp_dft(d, -2 * (n - 1) * h, 2 * h, p_axis.min, p_axis.spacing, p_axis.n,
                     sign=+1) * (2 * h)


def _field_star(a: PhaseSpaceField, b: PhaseSpaceField) -> PhaseSpaceField:
    if not a.same_grid(b):
        raise ShapeError("star product of fields on different grids")
    for f in (a, b):
        if _edge_ratio(np.asarray(f.values)) > EDGE_MASS:
            warnings.warn("field does not decay at the grid edges; star product is truncated",
                          TruncationWarning, stacklevel=3)
            break
    ka = symbol_to_kernel(a)
    kb = symbol_to_kernel(b)
    kc = ka @ (trapezoid_weights(a.q_axis)[:, None] * kb)
    return a.with_values(kernel_to_symbol(kc, a.q_axis, a.p_axis))


# ---------------------------------------------------------------------------
# Bopp operators


class _Derivatives:
    """Cache of mixed partial derivatives of a sampled field."""

    def __init__(self, f: PhaseSpaceField, methods: tuple):
        self.f = f
        self.methods = methods
        self.cache = {(0, 0): np.asarray(f.values, dtype=complex)}

    def _diff(self, vals, h, axis):
        if self.methods[axis] == "spectral":
            return spectral_diff(vals, h, 1, axis=axis)
        return central_diff(vals, h, 1, axis=axis, radius=5)

    def __call__(self, dq: int, dp: int) -> np.ndarray:
        key = (dq, dp)
        if key not in self.cache:
            if dp > 0:
                self.cache[key] = self._diff(self(dq, dp - 1), self.f.p_axis.spacing, 1)
            else:
                self.cache[key] = self._diff(self(dq - 1, 0), self.f.q_axis.spacing, 0)
        return self.cache[key]


def bopp_apply(sym: PolySymbol, side: str, f: PhaseSpaceField,
               method: str = "spectral", return_mask: bool = False):
    """Star-multiply a field by a polynomial symbol.

    ``side="left"`` gives ``sym ⋆ f``, i.e. ``sym(q + (i/2)∂_p, p − (i/2)∂_q) f``;
    ``side="right"`` gives ``f ⋆ sym``, i.e. ``sym(q − (i/2)∂_p, p + (i/2)∂_q) f``.

    Parameters
    ----------
    sym : PolySymbol
        Polynomial of total degree at most 16.
    side : {"left", "right"}
    f : PhaseSpaceField
        Smooth field.
    method : {"spectral", "fd"} or pair of them
        Derivative scheme, or one scheme per axis as ``(q_method,
        p_method)``. ``"fd"`` uses 11-point central differences and suits
        directions in which the field does not decay at the grid edge.
        Points too close to such an edge for the stencil are set to zero
        and the result is flagged ``"edge-band-invalid"``. Each derivative
        order widens that band by five points.
    return_mask : bool
        If true, also return a boolean array marking the valid points.

    Returns
    -------
    PhaseSpaceField, or (PhaseSpaceField, numpy.ndarray) with ``return_mask``
    """
    if not isinstance(sym, PolySymbol):
        raise TypeError("bopp_apply needs a PolySymbol")
    if sym.degree > MAX_DEGREE:
        raise UnsupportedDegreeError(f"total degree {sym.degree} exceeds {MAX_DEGREE}")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    methods = (method, method) if isinstance(method, str) else tuple(method)
    if len(methods) != 2 or any(m not in ("spectral", "fd") for m in methods):
        raise ValueError("method must be 'spectral', 'fd' or a pair of them")
    derivs = _Derivatives(f, methods)
    q, p = f.mesh()
    out = np.zeros((f.q_axis.n, f.p_axis.n), dtype=complex)
    for n in range(sym.degree + 1):
        pref = (0.5j) ** n / factorial(n)
        for k in range(n + 1):
            coef = pref * comb(n, k) * (-1) ** k
            if side == "left":
                poly = sym.derivative(n - k, k)
                dfield = (k, n - k)
            else:
                poly = sym.derivative(k, n - k)
                dfield = (n - k, k)
            if not poly.coeffs:
                continue
            out = out + coef * poly(q, p) * derivs(*dfield)
    flags = ()
    bad = ~np.isfinite(out)
    if np.any(bad):
        out = np.where(bad, 0.0, out)
        flags = ("edge-band-invalid",)
    result = f.with_values(out, flags)
    return (result, ~bad) if return_mask else result


def star_product(A, B):
    """Moyal star product ``A ⋆ B``.

    Either factor may be a :class:`PolySymbol` or a
    :class:`~phasepad.numgrid.PhaseSpaceField`. Two polynomials give an exact
    polynomial; a polynomial and a field use the Bopp substitutions; two
    fields use the kernel composition described in the module docstring.

    Warns
    -----
    TruncationWarning
        If a field factor exceeds ``1e-8`` of its peak on the grid boundary.
    """
    if isinstance(A, PolySymbol) and isinstance(B, PolySymbol):
        return A.star(B)
    if isinstance(A, PolySymbol):
        return bopp_apply(A, "left", B)
    if isinstance(B, PolySymbol):
        return bopp_apply(B, "right", A)
    return _field_star(A, B)


# ---------------------------------------------------------------------------
# Wigner functions and the Born relation


def wigner_of(psi: Wavefunction1D, q_axis: Axis | None = None,
              p_axis: Axis | None = None) -> PhaseSpaceField:
    """Wigner function ``(2π)^{-1} ∫ ψ(q − y/2) conj(ψ(q + y/2)) e^{ipy} dy``.

    Returned as a real field on the given grid (default ``[-8, 8]²``).
    """
    w = cross_wigner(psi, psi, q_axis, p_axis)
    return w.with_values(w.values.real)


def born_wigner(Psi: PhaseSpaceField) -> PhaseSpaceField:
    """Wigner function recovered from an amplitude as ``Ψ ⋆ conj(Ψ)``.

    Raises
    ------
    ConsistencyError
        If the imaginary part exceeds ``1e-6`` of the real part's maximum.
    """
    w = _field_star(Psi, Psi.conj())
    re, im = w.values.real, w.values.imag
    scale = np.max(np.abs(re))
    if scale > 0 and np.max(np.abs(im)) > 1e-6 * scale:
        raise ConsistencyError(
            f"Ψ⋆conj(Ψ) has imaginary part {np.max(np.abs(im)):.3g} (real scale {scale:.3g})"
        )
    return w.with_values(re)


def expectation(sym: PolySymbol, Psi: PhaseSpaceField) -> complex:
    """``∫ (Ψ ⋆ conj(Ψ)) A dΓ`` for a polynomial observable ``A``.

    Warns
    -----
    NormalizationWarning
        If ``∫|Ψ|² dΓ`` differs from 1 by more than 1e-6.
    """
    nrm2 = l2_norm(Psi) ** 2
    if abs(nrm2 - 1) > 1e-6:
        warnings.warn(f"amplitude has squared norm {nrm2:.9g}, not 1", NormalizationWarning,
                      stacklevel=2)
    w = _field_star(Psi, Psi.conj())
    return integrate_2d(w * sym.evaluate(Psi.q_axis, Psi.p_axis))


def born_modulus_report(Psi: PhaseSpaceField) -> dict:
    """Compare ``|Ψ|²`` with the Wigner function ``Ψ ⋆ conj(Ψ)``.

    ``|Ψ|²`` is only a smoothed stand-in for ``W``; this report quantifies
    the gap and is never used as an approximation internally.
    """
    w = born_wigner(Psi).values.real
    m = np.abs(Psi.values) ** 2
    diff = np.abs(w - m)
    return {"max_deviation": float(diff.max()), "mean_deviation": float(diff.mean()),
            "wigner_min": float(w.min())}


def laguerre(n: int, x) -> np.ndarray:
    """Laguerre polynomial ``L_n(x)`` by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), 1.0 - x
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def window_wigner(window: WindowSpec, q_axis: Axis, p_axis: Axis) -> PhaseSpaceField:
    """Wigner function of a window state.

    Closed forms are used for Gaussian, oscillator and square windows; a
    custom window is transformed numerically.
    """
    q, p = np.meshgrid(q_axis.points, p_axis.points, indexing="ij")
    if isinstance(window, (GaussianWindow, OscillatorWindow)):
        n = window.n if isinstance(window, OscillatorWindow) else 0
        b = window.beta
        r2 = b * b * (q - window.x_w) ** 2 + (p - window.k_w) ** 2 / (b * b)
        vals = (-1) ** n * laguerre(n, 2 * r2) * np.exp(-r2) / np.pi
        return PhaseSpaceField(q_axis, p_axis, vals)
    if isinstance(window, SquareWindow):
        a = window.a
        s = np.clip(a - np.abs(q), 0.0, None)
        # sin(2ps)/(2πap), with the p → 0 limit s/(πa)
        vals = s * np.sinc(2 * p * s / np.pi) / (np.pi * a)
        return PhaseSpaceField(q_axis, p_axis, vals)
    if isinstance(window, CustomWindow):
        return wigner_of(window.samples, q_axis, p_axis)
    raise TypeError(f"unsupported window {window!r}")


def _projection_residual(Psi: PhaseSpaceField, w: PhaseSpaceField) -> float:
    nrm = l2_norm(Psi)
    if nrm == 0:
        return 0.0
    proj = _field_star(Psi, w) * (2 * np.pi)
    return l2_norm(proj - Psi) / nrm


def subspace_residual(Psi: PhaseSpaceField, window: WindowSpec) -> float:
    """Relative distance of ``Psi`` from the amplitudes generated by ``window``.

    Computes ``‖2π Ψ ⋆ W_φ₀ − Ψ‖ / ‖Ψ‖``. The map ``Ψ ↦ 2π Ψ ⋆ W_φ₀`` is the
    orthogonal projector onto valid amplitudes, so the residual lies in
    ``[0, 1]``: 0 for a valid amplitude, 1 for a field orthogonal to all of
    them.
    """
    return _projection_residual(Psi, window_wigner(window, Psi.q_axis, Psi.p_axis))


def state_projection_residual(Psi: PhaseSpaceField, psi: Wavefunction1D) -> float:
    """``‖2π W_ψ ⋆ Ψ − Ψ‖ / ‖Ψ‖``: zero when ``Ψ`` is an amplitude of ``ψ``.

    ``2π W_ψ ⋆`` projects onto amplitudes of the state ``ψ`` (for any
    window), so a mismatched state gives a residual near 1.
    """
    nrm = l2_norm(Psi)
    if nrm == 0:
        return 0.0
    w = wigner_of(psi, Psi.q_axis, Psi.p_axis)
    proj = _field_star(w, Psi) * (2 * np.pi)
    return l2_norm(proj - Psi) / nrm

