"""Weighted norms for profiles and pressures, uniform in the contact-angle parameter.

Profile norms measure radial samples through a Taylor-polynomial subtraction at
the contact point followed by a weighted contour integral of the transform.
Pressure/source norms act on strip fields through a ladder of contour levels
with a supremum over the angular variable.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AngularDerivativeUnderresolved,
    BetaForbidden,
    DerivativeUnderresolved,
    IllConditionedFit,
    TimeGridTooCoarse,
)
from .mellin import (
    LogGrid,
    MellinSpectrum,
    mellin_forward,
    plancherel_norm,
    split_frequencies,
)
from .strip import StripField, _dv_matrix_apply

LADDER_STEP = 1.0 / 6.0
LADDER_START = 2.0 / 3.0

_FIT_WINDOW = 1.0 / 16.0
_FIT_GUARD = 5


# ---------------------------------------------------------------------------
# cutoffs
# ---------------------------------------------------------------------------

def _smooth_step(s):
    """C-infinity transition from 1 at s<=0 to 0 at s>=1 (tanh profile)."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    out[s <= 0.0] = 1.0
    out[s >= 1.0] = 0.0
    mid = (s > 0.0) & (s < 1.0)
    sm = s[mid]
    out[mid] = 0.5 * (1.0 - np.tanh((2.0 * sm - 1.0) / (2.0 * sm * (1.0 - sm))))
    return out


def smooth_cutoff(x):
    """Radial cutoff: 1 on [0, 1/8], 0 on [1/4, inf)."""
    x = np.asarray(x, dtype=float)
    return _smooth_step((x - 0.125) / 0.125)


def symmetric_cutoff(x):
    """Cutoff with zeta(x) + zeta(1-x) = 1: 1 on [0, 1/8], 0 on [7/8, inf)."""
    x = np.asarray(x, dtype=float)
    return _smooth_step((x - 0.125) / 0.75)


# ---------------------------------------------------------------------------
# Taylor subtraction at the contact point
# ---------------------------------------------------------------------------

def taylor_order(k: float) -> int:
    """Largest integer below 3k - 1/2; equals 3k - 1 at integer k, -1 below k=1/6."""
    return int(math.ceil(3.0 * k - 1.5 - 1e-9))


def _is_borderline(k: float) -> bool:
    # 3k - 3/2 integer: the power x^{n_k+1} sits exactly on the contour and its
    # coefficient must vanish for the weighted integral to converge.
    t = 3.0 * k - 1.5
    return abs(t - round(t)) < 1e-9


@dataclass
class TaylorSplit:
    """Decomposition f = zeta * P + f0 with P fitted at the contact point."""

    poly_coeffs: np.ndarray
    cutoff: str
    remainder: np.ndarray
    order: int
    grid: LogGrid = field(repr=False, default=None)

    def poly_value(self, x):
        if len(self.poly_coeffs) == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return np.polynomial.polynomial.polyval(x, self.poly_coeffs)

    def coefficient(self, m: int) -> float:
        """Fitted coefficient of x^m (0 beyond the fitted order)."""
        if m < len(self.poly_coeffs):
            return float(self.poly_coeffs[m])
        return 0.0


def fit_contact_coefficients(f, grid: LogGrid, degree: int,
                             window: float = _FIT_WINDOW,
                             with_guard: bool = False):
    """Least-squares polynomial coefficients of f near x = 0.

    Fits on all nodes with x <= window in the scaled variable x/window with
    guard terms, so coefficients up to `degree` are unbiased by the next few
    orders of the expansion.  with_guard=True also returns the guard
    coefficients (estimates of the next Taylor orders).
    """
    mask = grid.x <= window
    npts = int(mask.sum())
    deg_fit = degree + _FIT_GUARD
    if npts < 4 * (deg_fit + 1):
        raise IllConditionedFit(
            f"only {npts} nodes below x={window}; grid does not resolve the contact region")
    s = grid.x[mask] / window
    A = np.vander(s, deg_fit + 1, increasing=True)
    scale = np.linalg.norm(A, axis=0)
    A = A / scale
    sol, _, rank, sv = np.linalg.lstsq(A, np.asarray(f, dtype=float)[mask], rcond=None)
    if rank < deg_fit + 1 or sv[0] / sv[-1] > 1e10:
        raise IllConditionedFit("contact-point polynomial fit is rank deficient")
    coeffs = (sol / scale) / window ** np.arange(deg_fit + 1)
    if with_guard:
        return coeffs[: degree + 1], coeffs[degree + 1:]
    return coeffs[: degree + 1]


# Below this log-radius the sampled remainder f - zeta*P is dominated by float
# cancellation noise, which the contour damping amplifies exponentially.  The
# remainder is blended smoothly into its fitted continuation (the guard
# coefficients, i.e. the next Taylor orders), whose powers decay under every
# contour weight in use.
_BLEND_U_HI = math.log(1.0 / 32.0)
_BLEND_WIDTH = 1.5


def _blend_deep(sampled, continuation, u, u_min=None):
    w_cont = _smooth_step((u - (_BLEND_U_HI - _BLEND_WIDTH)) / _BLEND_WIDTH)
    out = w_cont * continuation + (1.0 - w_cont) * sampled
    if u_min is not None:
        # roll the continuation off at the left grid edge instead of truncating it
        out = out * (1.0 - _smooth_step((u - u_min) / 1.2))
    return out


def taylor_split(f, grid: LogGrid, k: float) -> TaylorSplit:
    """Split radial samples into cutoff * polynomial + remainder vanishing at 0.

    The polynomial order is the largest integer below 3k - 1/2.  When 3k - 3/2
    is itself an integer, the next (borderline) coefficient is also projected
    out so the remainder admits the working contour.  Deep inside the contact
    region the remainder is blended into the fitted continuation instead of
    being computed by subtraction, which would amplify rounding noise under the
    contour damping.
    """
    f = np.asarray(f, dtype=float)
    n_k = taylor_order(k)
    n_fit = n_k + 1 if (_is_borderline(k) and n_k >= -1) else n_k
    if n_fit < 0:
        return TaylorSplit(poly_coeffs=np.zeros(0), cutoff="none",
                           remainder=f.copy(), order=n_k, grid=grid)
    coeffs, guard = fit_contact_coefficients(f, grid, n_fit, with_guard=True)
    zeta = smooth_cutoff(grid.x)
    remainder = f - zeta * np.polynomial.polynomial.polyval(grid.x, coeffs)
    cont = np.zeros_like(remainder)
    for j, c in enumerate(guard):
        cont += c * grid.x ** (n_fit + 1 + j)
    remainder = _blend_deep(remainder, cont, grid.u, u_min=grid.u_min)
    return TaylorSplit(poly_coeffs=coeffs, cutoff="smooth_cutoff[1/8,1/4]",
                       remainder=remainder, order=n_k, grid=grid)


# ---------------------------------------------------------------------------
# norm reports
# ---------------------------------------------------------------------------

@dataclass
class NormReport:
    """Weighted-norm evaluation broken into its defining parts."""

    space: str            # X | Y | Z | parabolic-X | parabolic-Y
    k: float
    eps: float
    homogeneous_levels: dict
    poly_norm: float = 0.0
    l2_part: float = 0.0
    total: float = 0.0

    def as_json(self) -> str:
        payload = {
            "space": self.space,
            "k": self.k,
            "eps": self.eps,
            "levels": {f"{ell:.6f}": val for ell, val in self.homogeneous_levels.items()},
            "poly_norm": self.poly_norm,
            "l2_part": self.l2_part,
            "total": self.total,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _l2_radial(f, grid: LogGrid) -> float:
    # L2(dx) via dx = x du
    f = np.asarray(f, dtype=float)
    return float(np.sqrt(np.sum(f * f * grid.x) * grid.du))


# Relative level below which transform samples are treated as exact zeros.
# Polynomial-subtraction residue and rounding noise leave a structured spectral
# floor around 1e-9 of the peak; the contour weights grow fast enough that
# keeping it would let the floor dominate high-order norms.  Spectral content
# below this level is unmeasurable in double precision.
SPECTRAL_FLOOR = 3e-9


def _apply_floor(values, floor_rel=SPECTRAL_FLOOR):
    peak = np.max(np.abs(values))
    if peak == 0.0:
        return values
    out = values.copy()
    out[np.abs(out) < floor_rel * peak] = 0.0
    return out


def homogeneous_profile_value(remainder, grid: LogGrid, k: float, eps: float) -> float:
    """Contour value || |lam|^{3k+1} mu^k fhat_0 || at Re(lambda) = 3k - 1/2."""
    beta = 3.0 * k - 0.5
    spec = mellin_forward(remainder, grid, beta, eps=eps)
    lam_abs = np.abs(spec.lam)
    weight = lam_abs ** (3.0 * k + 1.0) * spec.mu() ** k
    weighted = MellinSpectrum(grid=grid, beta=beta,
                              values=_apply_floor(spec.values) * weight, eps=eps)
    return plancherel_norm(weighted)


def profile_norm(f, grid: LogGrid, k: float, eps: float,
                 split: TaylorSplit = None) -> NormReport:
    """Profile norm: polynomial part + L2 + weighted homogeneous contour value."""
    if split is None:
        split = taylor_split(f, grid, k)
    hom = homogeneous_profile_value(split.remainder, grid, k, eps)
    poly = float(np.linalg.norm(split.poly_coeffs)) if len(split.poly_coeffs) else 0.0
    l2 = _l2_radial(split.remainder, grid)
    return NormReport(space="X", k=k, eps=eps, homogeneous_levels={k: hom},
                      poly_norm=poly, l2_part=l2, total=poly + l2 + hom)


# ---------------------------------------------------------------------------
# real-space integer form (independent of the contour route)
# ---------------------------------------------------------------------------

_D1_STENCIL = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


def _deriv_u(g, du):
    """6th-order first derivative in u, zero-extended (signals decay at both ends)."""
    padded = np.concatenate([np.zeros(3), np.asarray(g, dtype=float), np.zeros(3)])
    out = np.zeros(len(g))
    for shift, c in zip(range(-3, 4), _D1_STENCIL):
        if c != 0.0:
            out += c * padded[3 + shift: 3 + shift + len(g)]
    return out / du


def _deriv_x(g, grid: LogGrid, m: int):
    """m-th x-derivative via repeated chain rule d/dx = e^{-u} d/du."""
    out = np.asarray(g, dtype=float)
    for _ in range(m):
        out = np.exp(-grid.u) * _deriv_u(out, grid.du)
    return out


# Repeated x-derivatives of smooth data rely on exact cancellation of the
# chain-rule factors e^{-u}; below this log-radius the cancellation residue of
# finite-difference stencils outgrows the weighted integrand of any admissible
# function, so the real-space quadrature stops there.
_SOBOLEV_U_FLOOR = -6.0


def _weighted_deriv_l2(g, grid: LogGrid, m: int, weight_pow: float,
                       du_scale: int = 1) -> float:
    """|| x^{weight_pow} d^m g / dx^m ||_{L2(dx, x > e^floor)}.

    du_scale = 2 evaluates on every other node (for the stencil error estimate).
    """
    if du_scale == 1:
        u, x, du = grid.u, grid.x, grid.du
        gg = np.asarray(g, dtype=float)
    else:
        u, x, du = grid.u[::du_scale], grid.x[::du_scale], grid.du * du_scale
        gg = np.asarray(g, dtype=float)[::du_scale]
    out = gg
    for _ in range(m):
        out = np.exp(-u) * _deriv_u(out, du)
    keep = u >= _SOBOLEV_U_FLOOR
    integrand = x[keep] ** (2 * weight_pow) * out[keep] ** 2 * x[keep]
    return float(np.sqrt(np.sum(integrand) * du))


def _split_value(f_plus, f_minus, grid: LogGrid, ell: int, eps: float) -> float:
    a = _weighted_deriv_l2(f_plus, grid, 4 * ell + 1, ell + 1)
    b = _weighted_deriv_l2(f_minus, grid, 3 * ell + 1, 1.0) / eps ** ell
    return a + b


def profile_norm_sobolev(f, grid: LogGrid, ell: int, eps: float) -> float:
    """Real-space homogeneous norm at integer level: infimum over decompositions.

    Evaluates || x^{l+1} d^{4l+1} f_+ || + (1/eps^l) || x d^{3l+1} f_- || over
    trivial decompositions, tangent-blend splits at orders M in {2, 4, 6}, and a
    golden-section refinement of the high-frequency amplitude.
    """
    if ell < 0 or int(ell) != ell:
        raise ValueError("level must be a nonnegative integer")
    f = np.asarray(f, dtype=float)
    # stencil resolution check: compare the leading candidate at du and 2*du
    ref = _weighted_deriv_l2(f, grid, 4 * ell + 1, ell + 1)
    ref2 = _weighted_deriv_l2(f, grid, 4 * ell + 1, ell + 1, du_scale=2)
    if ref > 0 and abs(ref - ref2) > 0.1 * ref:
        raise DerivativeUnderresolved(
            f"stencil error estimate {abs(ref - ref2) / ref:.2%} exceeds 10%")
    zeros = np.zeros_like(f)
    best = min(_split_value(f, zeros, grid, ell, eps),
               _split_value(zeros, f, grid, ell, eps))
    # the tangent-blend decomposition is contour independent inside the pole-free
    # strip; computing it at Re(lambda) = 0 avoids exponential noise growth
    best_minus = None
    for M in (2, 4, 6):
        sp = split_frequencies(f, grid, eps, M=M, beta=0.0)
        val = _split_value(sp.plus, sp.minus, grid, ell, eps)
        if val < best:
            best, best_minus = val, sp.minus
    if best_minus is not None:
        # golden-section over the amplitude of the high-frequency part
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        lo, hi = 0.25, 1.75
        c, d = hi - phi * (hi - lo), lo + phi * (hi - lo)
        fc = _split_value(f - c * best_minus, c * best_minus, grid, ell, eps)
        fd = _split_value(f - d * best_minus, d * best_minus, grid, ell, eps)
        for _ in range(12):
            if fc < fd:
                hi, d, fd = d, c, fc
                c = hi - phi * (hi - lo)
                fc = _split_value(f - c * best_minus, c * best_minus, grid, ell, eps)
            else:
                lo, c, fc = c, d, fd
                d = lo + phi * (hi - lo)
                fd = _split_value(f - d * best_minus, d * best_minus, grid, ell, eps)
        best = min(best, fc, fd)
    return best


# ---------------------------------------------------------------------------
# Hardy and algebra checks
# ---------------------------------------------------------------------------

def hardy_ratio(f, grid: LogGrid, beta: float) -> float:
    """||x^beta f|| / ||x^{beta+1} f_x|| in L2(dx); 0 for f identically zero."""
    if abs(beta + 0.5) < 1e-12:
        raise BetaForbidden("beta = -1/2 is excluded from the inequality")
    f = np.asarray(f, dtype=float)
    num = _l2_radial(grid.x ** beta * f, grid)
    if num == 0.0:
        return 0.0
    fx = _deriv_x(f, grid, 1)
    den = _l2_radial(grid.x ** (beta + 1.0) * fx, grid)
    return num / den


def algebra_ratio(f, g, grid: LogGrid, k: int, eps: float) -> float:
    """profile_norm(f g) / (profile_norm(f) profile_norm(g)); bounded, not exact."""
    if k < 1:
        raise ValueError("the product estimate needs k >= 1")
    nf = profile_norm(f, grid, k, eps).total
    ng = profile_norm(g, grid, k, eps).total
    if nf == 0.0 or ng == 0.0:
        return 0.0
    nfg = profile_norm(np.asarray(f) * np.asarray(g), grid, k, eps).total
    return nfg / (nf * ng)


# ---------------------------------------------------------------------------
# pressure (strip) norms
# ---------------------------------------------------------------------------

def ladder_levels(k: float, step: float = LADDER_STEP):
    """Sample points of [2/3, k] used for the supremum over levels."""
    if k < LADDER_START - 1e-12:
        raise ValueError("pressure norms need k >= 2/3")
    pts = list(np.arange(LADDER_START, k - 1e-12, step))
    pts.append(float(k))
    return pts


def corner_polynomial_2d(field: StripField, order: int, window: float = _FIT_WINDOW,
                         guard: int = _FIT_GUARD):
    """Least-squares polynomial in (x, y) of total degree `order` near the corner.

    Returns (pairs, coeffs, guard_pairs, guard_coeffs) where the guard entries
    estimate the next few orders of the corner expansion.  Radius on the strip
    is e^u, so the fit window is a u-interval.
    """
    g = field.grid
    mask_u = g.ugrid.x <= window
    deg_fit = max(order, -1) + guard
    pairs_all = [(d - jj, jj) for d in range(deg_fit + 1) for jj in range(d + 1)]
    npts = int(mask_u.sum()) * g.n_v
    if npts < 6 * len(pairs_all):
        raise IllConditionedFit("grid does not resolve the corner region")
    x, y = field.xy()
    xs = (x[mask_u] / window).ravel()
    ys = (y[mask_u] / window).ravel()
    A = np.stack([xs ** i * ys ** j for i, j in pairs_all], axis=1)
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0.0] = 1.0
    sol, _, rank, sv = np.linalg.lstsq(A / scale, field.values[mask_u].ravel(), rcond=None)
    if rank < len(pairs_all) or sv[0] / max(sv[-1], 1e-300) > 1e10:
        raise IllConditionedFit("corner polynomial fit is rank deficient")
    coeffs_all = sol / scale / np.array([window ** (i + j) for i, j in pairs_all])
    main = [(p, c) for p, c in zip(pairs_all, coeffs_all) if sum(p) <= order]
    rest = [(p, c) for p, c in zip(pairs_all, coeffs_all) if sum(p) > order]
    pairs = [p for p, _ in main]
    coeffs = np.array([c for _, c in main])
    return pairs, coeffs, [p for p, _ in rest], np.array([c for _, c in rest])


def subtract_corner_polynomial(field: StripField, order: int):
    """field - zeta(r) * P with P the fitted corner polynomial; returns (field0, coeffs).

    Deep inside the corner the subtracted field is blended into the guard
    continuation, as in the radial Taylor split.
    """
    pairs, coeffs, gpairs, gcoeffs = corner_polynomial_2d(field, max(order, -1))
    x, y = field.xy()
    vals = field.values.copy()
    if len(pairs):
        P = np.zeros_like(vals)
        for (i, j), c in zip(pairs, coeffs):
            P += c * x ** i * y ** j
        zeta = smooth_cutoff(field.grid.ugrid.x)[:, None]
        vals = vals - zeta * P
    cont = np.zeros_like(vals)
    for (i, j), c in zip(gpairs, gcoeffs):
        cont += c * x ** i * y ** j
    u2d = field.grid.u[:, None] * np.ones((1, field.grid.n_v))
    vals = _blend_deep(vals, cont, u2d, u_min=field.grid.ugrid.u_min)
    return field.like(vals), coeffs


def _ladder_level_value(field0: StripField, ell: float, eps: float, beta: float,
                        alpha_total: float) -> float:
    """One ladder level: sum over angular orders of the sup-in-v contour L2 norm."""
    g = field0.grid
    lam, spectra = field0.row_spectra(beta=beta)
    peak = np.max(np.abs(spectra))
    if peak > 0.0:
        spectra = np.where(np.abs(spectra) < 10 * SPECTRAL_FLOOR * peak, 0.0, spectra)
    lam_abs = np.abs(lam)
    mu = np.minimum(lam_abs, 1.0 / eps) if eps > 0 else lam_abs
    boost = np.exp(0.5 * eps * lam_abs[:, None] * (1.0 - g.v[None, :]))
    dtau = 2.0 * np.pi / (g.ugrid.n * g.ugrid.du)
    # angular resolution guard: e^{eps|lam| v}-type rows steeper than the v grid
    steep = eps * lam_abs * g.dv > 0.8
    total = 0.0
    levels = []
    d_v = spectra
    n_ang_max = int(math.floor(alpha_total + 1e-9))
    for a2 in range(n_ang_max + 1):
        a1 = alpha_total - a2
        if a1 < -1e-12:
            break
        weighted = boost * np.abs(d_v) * (lam_abs ** a1 * mu ** ell)[:, None]
        sup_v = weighted.max(axis=1)
        if np.any(steep):
            carried = np.sum(sup_v[steep] ** 2) / max(np.sum(sup_v ** 2), 1e-300)
            if carried > 0.01:
                raise AngularDerivativeUnderresolved(
                    "under-resolved angular variation carries "
                    f"{carried:.1%} of the contour norm; increase n_v")
        levels.append(float(np.sqrt(np.sum(sup_v ** 2) * dtau / (2 * np.pi))))
        d_v = _dv_matrix_apply(d_v, g.dv) / eps
    return float(sum(levels))


def pressure_norm(q: StripField, k: float, eps: float,
                  ladder_step: float = LADDER_STEP) -> NormReport:
    """Strip-pressure norm: corner polynomial + sup over the level ladder."""
    n_k = taylor_order(k)
    q0, coeffs = subtract_corner_polynomial(q, n_k - 1)
    levels = {}
    for ell in ladder_levels(k, ladder_step):
        beta = 3.0 * ell - 1.5
        levels[ell] = _ladder_level_value(q0, ell, eps, beta, 3.0 * ell)
    poly = float(np.linalg.norm(coeffs)) if len(coeffs) else 0.0
    total = poly + max(levels.values())
    return NormReport(space="Y", k=k, eps=eps, homogeneous_levels=levels,
                      poly_norm=poly, total=total)


def source_norm(g: StripField, k: float, eps: float,
                ladder_step: float = LADDER_STEP) -> NormReport:
    """Norm for anisotropic-Laplacian images: shifted contours and exponents."""
    n_k = taylor_order(k)
    g0, coeffs = subtract_corner_polynomial(g, n_k - 3)
    levels = {}
    for ell in ladder_levels(k, ladder_step):
        beta = 3.0 * ell - 3.5
        levels[ell] = _ladder_level_value(g0, ell, eps, beta, 3.0 * ell - 2.0)
    poly = float(np.linalg.norm(coeffs)) if len(coeffs) else 0.0
    total = poly + max(levels.values())
    return NormReport(space="Z", k=k, eps=eps, homogeneous_levels=levels,
                      poly_norm=poly, total=total)


# ---------------------------------------------------------------------------
# parabolic (space-time) norms
# ---------------------------------------------------------------------------

def _time_derivative(snapshots, dt):
    """Centered first time-derivatives, one-sided at the ends."""
    arr = np.asarray(snapshots, dtype=float)
    out = np.empty_like(arr)
    out[1:-1] = (arr[2:] - arr[:-2]) / (2 * dt)
    out[0] = (-3 * arr[0] + 4 * arr[1] - arr[2]) / (2 * dt)
    out[-1] = (3 * arr[-1] - 4 * arr[-2] + arr[-3]) / (2 * dt)
    return out


def _check_time_resolution(snapshots, dt):
    arr = np.asarray(snapshots, dtype=float)
    if arr.shape[0] < 5:
        raise TimeGridTooCoarse("need at least 5 snapshots")
    d1 = _time_derivative(arr, dt)[2:-2]
    d1c = _time_derivative(arr[::2], 2 * dt)[1:-1]
    scale = np.max(np.abs(d1)) if d1.size else 0.0
    if scale > 0:
        err = np.max(np.abs(d1[::2][1:-1] - d1c[1:-1][: len(d1[::2][1:-1])]))
        if err > 0.1 * scale:
            raise TimeGridTooCoarse(
                f"difference-quotient error estimate {err / scale:.1%} exceeds 10%")


def parabolic_profile_norm(times, profiles, grid: LogGrid, k: int, eps: float) -> NormReport:
    """Space-time profile norm: time-derivative levels, half-integer interior
    levels, and a sup-in-time L2 term, combined in quadrature."""
    times = np.asarray(times, dtype=float)
    if times.size < 3:
        raise TimeGridTooCoarse("need at least 3 snapshots")
    dt = times[1] - times[0]
    if not np.allclose(np.diff(times), dt, rtol=1e-8):
        raise TimeGridTooCoarse("snapshots must be uniformly spaced in time")
    snaps = np.asarray(profiles, dtype=float)
    _check_time_resolution(snaps, dt)

    derivs = {0: snaps}
    for i in range(1, k + 1):
        derivs[i] = _time_derivative(derivs[i - 1], dt)

    def l2_time(values):
        return float(np.sqrt(np.trapezoid(np.asarray(values) ** 2, times)))

    total_sq = 0.0
    levels = {}
    for i in range(0, k + 1):
        for j in range(0, k - i + 1):
            if i + j < 1:
                continue
            vals = [profile_norm(s, grid, float(j), eps).total for s in derivs[i]]
            term = l2_time(vals)
            levels[float(f"{i}.{j}")] = term
            total_sq += term ** 2
    for i in range(0, k):
        for j in range(0, k - i):
            kk = j + 0.5
            vals = [profile_norm(s, grid, kk, eps).total for s in derivs[i]]
            term = l2_time(vals)
            levels[float(f"{i}.{j}") + 0.05] = term
            total_sq += term ** 2
    sup_l2 = max(_l2_radial(s, grid) for s in snaps)
    total_sq += sup_l2 ** 2
    return NormReport(space="parabolic-X", k=k, eps=eps, homogeneous_levels=levels,
                      l2_part=sup_l2, total=math.sqrt(total_sq))


def parabolic_pressure_norm(times, fields, k: int, eps: float) -> NormReport:
    """Space-time pressure norm; levels below the ladder start use its lowest point."""
    times = np.asarray(times, dtype=float)
    dt = times[1] - times[0]
    total_sq = 0.0
    levels = {}
    snaps = list(fields)
    grid = snaps[0].grid
    stack = np.stack([f.values for f in snaps])
    for i in range(0, k + 1):
        arr = stack
        for _ in range(i):
            arr = _time_derivative(arr, dt)
        for j in range(0, k - i + 1):
            if i + j < 1:
                continue
            keff = max(float(j), LADDER_START)
            vals = [pressure_norm(StripField(grid, a, eps, snaps[0].beta), keff, eps).total
                    for a in arr]
            term = float(np.sqrt(np.trapezoid(np.asarray(vals) ** 2, times)))
            levels[float(f"{i}.{j}")] = term
            total_sq += term ** 2
    return NormReport(space="parabolic-Y", k=k, eps=eps, homogeneous_levels=levels,
                      total=math.sqrt(total_sq))


# ---------------------------------------------------------------------------
# interval localization
# ---------------------------------------------------------------------------

def interval_halves(f, x, norm_grid: LogGrid):
    """Left/right localized copies of an interval profile on a radial grid.

    f^L(x) = f(x) zeta(x) and f^R(x) = f(1-x) zeta(x) with the partition cutoff,
    resampled by cubic interpolation onto the radial grid (zero beyond x = 1).
    """
    from scipy.interpolate import CubicSpline

    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    spline = CubicSpline(x, f)
    zeta = symmetric_cutoff(norm_grid.x)
    inside = norm_grid.x <= 1.0
    left = np.zeros(norm_grid.n)
    right = np.zeros(norm_grid.n)
    left[inside] = spline(norm_grid.x[inside]) * zeta[inside]
    right[inside] = spline(1.0 - norm_grid.x[inside]) * zeta[inside]
    return left, right


def profile_norm_interval(f, x, k: float, eps: float, norm_grid: LogGrid = None) -> NormReport:
    """Profile norm on (0, 1): sum of the two localized half norms."""
    if norm_grid is None:
        norm_grid = LogGrid(-16.0, 4.0, 2048)
    left, right = interval_halves(f, x, norm_grid)
    rl = profile_norm(left, norm_grid, k, eps)
    rr = profile_norm(right, norm_grid, k, eps)
    levels = {k: rl.homogeneous_levels[k] + rr.homogeneous_levels[k]}
    return NormReport(space="X", k=k, eps=eps, homogeneous_levels=levels,
                      poly_norm=rl.poly_norm + rr.poly_norm,
                      l2_part=rl.l2_part + rr.l2_part,
                      total=rl.total + rr.total)
