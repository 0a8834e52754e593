"""Mellin / two-sided Laplace transform engine on log-uniform radial grids.

The transform of f at the contour Re(lambda) = beta is computed as the FFT of
the damped log-domain signal exp(-beta*u) f(e^u).  Forward/inverse pairs on the
same grid invert each other to rounding error; accuracy against the continuum
transform is limited by the tail decay of the damped signal, which is what the
tail-mass precondition guards.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContourOutsideStrip,
    GridMismatch,
    NonFiniteInput,
    NonFiniteMultiplier,
    PoleOnContour,
)

# Fraction of total damped-signal energy allowed in the outermost grid nodes.
TAIL_MASS_TOL = 1e-6
_TAIL_NODES = 8


class LogGrid:
    """Log-uniform radial grid x_j = exp(u_j) with u_j equally spaced."""

    def __init__(self, u_min: float, u_max: float, n: int):
        if n < 16:
            raise ValueError("need at least 16 nodes")
        if n & (n - 1) != 0:
            raise ValueError("node count must be a power of two")
        if not u_max > u_min:
            raise ValueError("u_max must exceed u_min")
        self.u_min = float(u_min)
        self.u_max = float(u_max)
        self.n = int(n)
        self.u = np.linspace(u_min, u_max, n)
        self.du = (u_max - u_min) / (n - 1)
        self.x = np.exp(self.u)

    def sample(self, func):
        """Evaluate a callable of x on the grid."""
        return np.asarray(func(self.x), dtype=float)

    def im_nodes(self):
        """Contour imaginary parts, ascending, spacing 2*pi/(n*du)."""
        return 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(self.n, self.du))

    def __eq__(self, other):
        return (
            isinstance(other, LogGrid)
            and self.n == other.n
            and self.u_min == other.u_min
            and self.u_max == other.u_max
        )

    def __repr__(self):
        return f"LogGrid(u_min={self.u_min}, u_max={self.u_max}, n={self.n})"


@dataclass
class MellinSpectrum:
    """Samples of a transform on the vertical contour Re(lambda) = beta.

    values[k] approximates fhat(beta + i*im_nodes[k]); im_nodes ascend and are
    symmetric about zero except for the single unpaired node at -pi/du.
    """

    grid: LogGrid
    beta: float
    values: np.ndarray
    eps: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.eps < 1.0):
            raise ValueError("eps must lie in [0, 1)")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteInput("spectrum contains non-finite values")

    @property
    def im_nodes(self):
        return self.grid.im_nodes()

    @property
    def lam(self):
        return self.beta + 1j * self.im_nodes

    def mu(self):
        """Frequency cutoff min{|lambda|, 1/eps}; plain |lambda| when eps = 0."""
        a = np.abs(self.lam)
        if self.eps == 0.0:
            return a
        return np.minimum(a, 1.0 / self.eps)


@dataclass
class FrequencySplit:
    """Low/high frequency decomposition f = plus + minus of radial samples."""

    plus: np.ndarray
    minus: np.ndarray
    order: int
    spectrum: MellinSpectrum = field(repr=False, default=None)
    spectrum_plus: MellinSpectrum = field(repr=False, default=None)
    spectrum_minus: MellinSpectrum = field(repr=False, default=None)


def _check_tail(damped, du):
    total = np.sum(damped * damped) * du
    if total == 0.0:
        return
    edge = (
        np.sum(damped[:_TAIL_NODES] ** 2) + np.sum(damped[-_TAIL_NODES:] ** 2)
    ) * du
    if edge > TAIL_MASS_TOL * total:
        raise ContourOutsideStrip(
            f"weighted tail mass {edge / total:.3e} exceeds {TAIL_MASS_TOL:.0e}; "
            "the requested contour is outside the strip resolved by this grid"
        )


def mellin_forward(f, grid: LogGrid, beta: float, eps: float = 0.0,
                   check_tail: bool = True) -> MellinSpectrum:
    """Transform radial samples f on the contour Re(lambda) = beta."""
    f = np.asarray(f, dtype=float)
    if f.shape != grid.u.shape:
        raise GridMismatch("sample count does not match grid")
    if not np.all(np.isfinite(f)):
        raise NonFiniteInput("input samples contain NaN/Inf")
    damped = np.exp(-beta * grid.u) * f
    if check_tail:
        _check_tail(damped, grid.du)
    tau = grid.im_nodes()
    vals = grid.du * np.fft.fftshift(np.fft.fft(damped)) * np.exp(-1j * tau * grid.u_min)
    return MellinSpectrum(grid=grid, beta=beta, values=vals, eps=eps)


def mellin_inverse(spec: MellinSpectrum, grid: LogGrid = None) -> np.ndarray:
    """Invert a spectrum back to radial samples on its grid."""
    if grid is not None and grid != spec.grid:
        raise GridMismatch("spectrum was computed on a different grid")
    g = spec.grid
    tau = g.im_nodes()
    seq = np.fft.ifftshift(spec.values * np.exp(1j * tau * g.u_min))
    damped = np.fft.ifft(seq) / g.du
    return np.exp(spec.beta * g.u) * damped.real


def plancherel_norm(spec: MellinSpectrum) -> float:
    """L2 contour norm, equal to the physical weighted norm ||x^-beta f||_{L2(dx/x)}."""
    dtau = 2.0 * np.pi / (spec.grid.n * spec.grid.du)
    return float(np.sqrt(np.sum(np.abs(spec.values) ** 2) * dtau / (2.0 * np.pi)))


def apply_multiplier(spec: MellinSpectrum, m) -> MellinSpectrum:
    """Pointwise product m(lambda) * fhat(lambda) on the contour."""
    mv = np.asarray(m(spec.lam), dtype=complex)
    if not np.all(np.isfinite(mv)):
        raise NonFiniteMultiplier("multiplier is not finite at a contour node")
    return MellinSpectrum(grid=spec.grid, beta=spec.beta,
                          values=spec.values * mv, eps=spec.eps)


def split_frequencies(f, grid: LogGrid, eps: float, M: int = 2,
                      beta: float = 0.0) -> FrequencySplit:
    """Split radial samples into low/high frequency parts relative to 1/eps.

    The high-frequency part carries the multiplier (i*tan(eps*lambda))^M on the
    contour Re(lambda) = beta; the low-frequency part is the exact complement,
    so plus + minus reproduces the input to rounding error.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if M < 2 or M % 2 != 0:
        raise ValueError("blend order M must be an even integer >= 2")
    spec = mellin_forward(f, grid, beta, eps=eps)
    lam = spec.lam
    c = np.cos(eps * lam)
    if np.min(np.abs(c)) < 1e-12:
        raise PoleOnContour("cos(eps*lambda) vanishes at a contour node")
    mult = (1j * np.tan(eps * lam)) ** M
    spec_minus = MellinSpectrum(grid=grid, beta=beta, values=spec.values * mult, eps=eps)
    minus = mellin_inverse(spec_minus)
    plus = np.asarray(f, dtype=float) - minus
    spec_plus = MellinSpectrum(grid=grid, beta=beta,
                               values=spec.values - spec_minus.values, eps=eps)
    return FrequencySplit(plus=plus, minus=minus, order=M, spectrum=spec,
                          spectrum_plus=spec_plus, spectrum_minus=spec_minus)


def split_bound_ratios(split: FrequencySplit, k: float):
    """Pointwise ratios |lam|^k |fhat_+| / (mu^k |fhat|) and (1/eps)^k |fhat_-| / (mu^k |fhat|).

    Nodes where |fhat| is below 1e-13 of its maximum are skipped.
    """
    spec = split.spectrum
    mu = spec.mu()
    base = np.abs(spec.values)
    mask = base > 1e-13 * base.max()
    lam_abs = np.abs(spec.lam)
    rp = (lam_abs[mask] ** k) * np.abs(split.spectrum_plus.values[mask]) / (mu[mask] ** k * base[mask])
    rm = ((1.0 / spec.eps) ** k) * np.abs(split.spectrum_minus.values[mask]) / (mu[mask] ** k * base[mask])
    return rp, rm


def dump_spectrum_csv(spec: MellinSpectrum, path):
    """Debug dump: columns im_lambda, re_value, im_value."""
    with open(path, "w") as fh:
        fh.write("im_lambda,re_value,im_value\n")
        for t, z in zip(spec.im_nodes, spec.values):
            fh.write(f"{t!r},{z.real!r},{z.imag!r}\n")
