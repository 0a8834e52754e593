"""Coordinate transforms: moving droplet frame, wedge <-> strip maps, and the
vertical-shear pull-back from the reference wedge onto a perturbed wedge."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateDroplet, FoldedMap, OutOfDomain, PoleOnContour
from .mellin import LogGrid, MellinSpectrum, mellin_forward, mellin_inverse
from .strip import StripField, StripGrid


@dataclass
class DropletFrame:
    """Contact points, midpoint, width, and accumulated rescaled time."""

    s_minus: float
    s_plus: float
    t_scale: float = 0.0

    def __post_init__(self):
        if not self.s_plus > self.s_minus:
            raise DegenerateDroplet("contact points are not ordered")

    @property
    def midpoint(self):
        return 0.5 * (self.s_plus + self.s_minus)

    @property
    def width(self):
        return self.s_plus - self.s_minus


REFERENCE_SLOPE_COEFFS = (1.0, -2.0)   # f*(x) = 1 - 2x, the parabola slope


def reference_slope(x):
    return 1.0 - 2.0 * np.asarray(x, dtype=float)


def droplet_to_fixed(h, x, eps: float, gamma: float = 1.0,
                     s_minus: float = None, s_plus: float = None,
                     n_x: int = None, tol: float = 1e-8):
    """Map a physical profile onto the unit interval and extract the slope
    perturbation relative to the parabola.

    h are height samples on the physical abscissas x spanning [s_minus, s_plus]
    (endpoints default to x[0], x[-1], where h must vanish).  Returns
    (x_new, f, frame) with f = d/dx of h/(eps*width) minus the reference slope,
    on a uniform grid of n_x nodes.  The construction requires the contact
    slopes |h_x| = eps*width/width... i.e. f = 0 at both endpoints, and zero
    mean, both within tol.
    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    sm = x[0] if s_minus is None else s_minus
    sp = x[-1] if s_plus is None else s_plus
    width = sp - sm
    if width < 1e-10:
        raise DegenerateDroplet("support width below 1e-10")
    if np.any(h[1:-1] <= 0.0):
        raise DegenerateDroplet("height not positive in the interior")
    n_x = len(x) if n_x is None else n_x
    xt = (x - sm) / width
    ht = h / (eps * width)
    spline = CubicSpline(xt, ht)
    x_new = np.linspace(0.0, 1.0, n_x)
    f = spline(x_new, 1) - reference_slope(x_new)
    end_res = max(abs(f[0]), abs(f[-1]))
    if end_res > tol:
        raise DegenerateDroplet(
            f"contact-slope residual {end_res:.2e} exceeds {tol:.0e}; "
            "the datum does not meet the prescribed contact angle")
    mean_res = abs(np.trapezoid(f, x_new))
    if mean_res > tol:
        raise DegenerateDroplet(f"integral condition violated by {mean_res:.2e}")
    f[0] = 0.0
    f[-1] = 0.0
    return x_new, f, DropletFrame(s_minus=sm, s_plus=sp)


def fixed_to_droplet(f, x, frame: DropletFrame, eps: float):
    """Reconstruct physical (x, h) samples from the slope perturbation."""
    x = np.asarray(x, dtype=float)
    from scipy.integrate import cumulative_trapezoid
    ht = x * (1.0 - x) + cumulative_trapezoid(np.asarray(f), x, initial=0.0)
    return frame.s_minus + frame.width * x, eps * frame.width * ht


class StripMap:
    """Log-polar map between the reference wedge and the strip R x [0, 1].

    x = e^u cos(eps v), y = (1/eps) e^u sin(eps v); the Jacobian determinant is
    e^{2u}.  The reference wedge is the image of v in [0, 1]; its upper edge is
    the ray y = x tan(eps)/eps.
    """

    def __init__(self, eps: float):
        if not (0.0 < eps < np.pi / 2):
            raise ValueError("eps must lie in (0, pi/2)")
        self.eps = eps

    def to_strip(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        e = self.eps
        r = np.hypot(x, e * y)
        theta = np.arctan2(e * y, x)
        v = theta / e
        if np.any(r <= 0.0) or np.any(v < -1e-12) or np.any(v > 1.0 + 1e-12):
            raise OutOfDomain("point outside the reference wedge")
        return np.log(r), np.clip(v, 0.0, 1.0)

    def to_wedge(self, u, v):
        e = self.eps
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return np.exp(u) * np.cos(e * v), np.exp(u) * np.sin(e * v) / e

    def jacobian_det(self, u):
        return np.exp(2.0 * np.asarray(u, dtype=float))

    def top_height(self, x):
        """Upper-boundary height above abscissa x."""
        return np.asarray(x, dtype=float) * np.tan(self.eps) / self.eps


def wedge_to_strip(func, grid: StripGrid, eps: float, beta: float = 0.5) -> StripField:
    """Sample a callable field on the wedge at the strip nodes."""
    m = StripMap(eps)
    u = grid.u[:, None] * np.ones((1, grid.n_v))
    v = np.ones((grid.n_u, 1)) * grid.v[None, :]
    x, y = m.to_wedge(u, v)
    return StripField(grid, np.asarray(func(x, y), dtype=float), eps, beta)


def strip_to_wedge(field: StripField, x, y):
    """Evaluate a strip field at wedge points: cubic in u, linear in v."""
    m = StripMap(field.eps)
    u, v = m.to_strip(x, y)
    g = field.grid
    if np.any(u < g.ugrid.u_min) or np.any(u > g.ugrid.u_max):
        raise OutOfDomain("radius outside the strip grid")
    jv = np.clip(np.searchsorted(g.v, v) - 1, 0, g.n_v - 2)
    w = (v - g.v[jv]) / g.dv
    splines = [CubicSpline(g.u, field.values[:, j]) for j in range(g.n_v)]
    lo = np.empty_like(u)
    hi = np.empty_like(u)
    flat_u = u.ravel()
    flat_j = jv.ravel()
    lo_f = np.empty(flat_u.shape)
    hi_f = np.empty(flat_u.shape)
    for j in np.unique(flat_j):
        sel = flat_j == j
        lo_f[sel] = splines[j](flat_u[sel])
        hi_f[sel] = splines[j + 1](flat_u[sel])
    lo = lo_f.reshape(u.shape)
    hi = hi_f.reshape(u.shape)
    return (1.0 - w) * lo + w * hi


@dataclass
class Pullback:
    """Vertical-shear diffeomorphism (x, y) -> (x, y + psi) onto a perturbed wedge."""

    psi: StripField
    phi: np.ndarray = field(repr=False, default=None)

    def psi_y(self) -> np.ndarray:
        return self.psi.dy().values

    def gamma_field(self) -> np.ndarray:
        """(1 + psi_y)^-1, the vertical stretch factor of the inverse map."""
        one_plus = 1.0 + self.psi_y()
        if np.min(one_plus) <= 0.0:
            raise FoldedMap("1 + psi_y reached zero; the shear map folds")
        return 1.0 / one_plus


# fold guard threshold: the shear map is accepted only while 1 + psi_y stays
# above this, which directly excludes the one failure mode (loss of injectivity)
FOLD_MARGIN = 0.5


def build_pullback(phi, grid: StripGrid, eps: float, beta_phi: float = 1.0) -> Pullback:
    """Harmonic vertical displacement with boundary datum int_0^x phi.

    psi solves the anisotropic Laplace equation on the wedge with psi = 0 on the
    bottom edge and psi = integral of phi on the top edge; it is assembled
    spectrally row by row:  psi_hat(lam, v) = sin(eps lam v) / (lam sin(eps lam))
    * phi_hat(lam - 1).
    """
    phi = np.asarray(phi, dtype=float)
    spec = mellin_forward(phi, grid.ugrid, beta_phi, eps=eps)
    lam = spec.lam + 1.0          # psi contour sits one to the right
    den = np.sin(eps * lam)
    if np.min(np.abs(den)) < 1e-12:
        raise PoleOnContour("sin(eps*lambda) vanishes at a contour node")
    vals = np.empty((grid.n_u, grid.n_v))
    for j, vv in enumerate(grid.v):
        rows = np.sin(eps * lam * vv) / (lam * den) * spec.values
        ms = MellinSpectrum(grid=grid.ugrid, beta=beta_phi + 1.0, values=rows, eps=eps)
        vals[:, j] = mellin_inverse(ms)
    psi = StripField(grid, vals, eps, beta=beta_phi + 1.0)
    pb = Pullback(psi=psi, phi=phi)
    if np.min(1.0 + pb.psi_y()) <= FOLD_MARGIN:
        raise FoldedMap(
            f"min(1 + psi_y) <= {FOLD_MARGIN}; perturbation too large for the shear map")
    return pb


def shear_multiplier_bound(eps: float, lam, v):
    """Pointwise bound |sin(eps lam v)/sin(eps lam)| <= (C/(eps mu)) e^{eps|lam|(v-1)/2}.

    Returns the measured ratios against the C = 8 envelope (should be <= 1).
    """
    lam = np.asarray(lam, dtype=complex)
    v = np.asarray(v, dtype=float)
    mu = np.minimum(np.abs(lam), 1.0 / eps)
    num = np.abs(np.sin(eps * lam[:, None] * v[None, :]))
    den = np.abs(np.sin(eps * lam))[:, None]
    envelope = (8.0 / (eps * mu))[:, None] * np.exp(
        0.5 * eps * np.abs(lam)[:, None] * (v[None, :] - 1.0))
    return num / (den * envelope)
