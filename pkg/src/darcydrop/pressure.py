"""Elliptic pressure solvers on the wedge and droplet domains.

Spectral route: the anisotropic Laplace problem on the wedge becomes, row by
row in the log-radial transform variable, a two-point ODE in the angular
coordinate with explicit cosine/sine solution kernels.  Brute-force routes: a
5-point finite-difference solve on the strip and a column-mapped solve on
arbitrary single-valued domains, used as independent oracles and for the
droplet evolution.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    DegenerateDroplet,
    NoContraction,
    PoleOnContour,
    QuadratureUnderresolved,
    SingularSystem,
)
from .geometry import FOLD_MARGIN, Pullback, StripMap, build_pullback
from .mellin import LogGrid, MellinSpectrum, mellin_forward, mellin_inverse
from .norms import pressure_norm
from .strip import StripField, StripGrid

__all__ = [
    "PressureProblem", "solve_wedge_dirichlet", "solve_wedge_poisson",
    "dno_wedge", "dno_symbol", "linear_symbol", "remainder_source",
    "solve_perturbed_wedge", "dno_perturbed", "fd_oracle_solve",
    "boundary_traces", "column_mapped_solve", "dno_droplet",
]


@dataclass
class PressureProblem:
    """Dirichlet datum on the top edge plus an optional interior source."""

    dirichlet: np.ndarray
    eps: float
    source: StripField = None
    beta: float = 0.5


# ---------------------------------------------------------------------------
# trace symbols
# ---------------------------------------------------------------------------

def _trace_factors(eps: float):
    # coefficients of the boundary combination -p_x + (1/eps^2) p_y at the top
    # edge, written in strip derivatives: e^{-u} (a p_u + b p_v)
    a = np.sin(eps) / eps - np.cos(eps)
    b = (eps * np.sin(eps) + np.cos(eps)) / eps ** 2
    return a, b


def dno_symbol(z, eps: float):
    """Transform of the flux map: (B eta)^(lam) = dno_symbol(lam + 1) eta^(lam + 1).

    At eps = 0 this degenerates to -(z)^2, the transform of -(x eta_x)_x.
    """
    z = np.asarray(z, dtype=complex)
    if eps == 0.0:
        return -z ** 2
    a, b = _trace_factors(eps)
    return z * (a - b * eps * np.tan(eps * z))


def linear_symbol(lam, eps: float):
    """Transform factor of the linearized evolution operator.

    (A f)^(lam) = linear_symbol(lam) * fhat(lam + 3); the zero-angle limit is
    (lam+1)(lam+2)^2(lam+3), the transform factor of (x f_xx)_xx.
    """
    lam = np.asarray(lam, dtype=complex)
    pref = (1.0 + eps ** 2) ** -1.5
    if eps == 0.0:
        s = -(lam + 2.0)
    else:
        a, b = _trace_factors(eps)
        s = a - b * eps * np.tan(eps * (lam + 2.0))
    return -pref * (lam + 1.0) * (lam + 2.0) * (lam + 3.0) * s


def _check_cos(lam, eps):
    c = np.cos(eps * lam)
    if np.min(np.abs(c)) < 1e-12:
        raise PoleOnContour("cos(eps*lambda) vanishes at a contour node")
    return c


# ---------------------------------------------------------------------------
# spectral wedge solvers
# ---------------------------------------------------------------------------

def solve_wedge_dirichlet(eta, grid: StripGrid, eps: float,
                          beta: float = 0.5) -> StripField:
    """Anisotropic-harmonic field with top Dirichlet datum and bottom no-flux.

    Row-wise solution q_hat(lam, v) = cos(eps lam v)/cos(eps lam) eta_hat(lam);
    the top trace reproduces the datum and the bottom angular derivative
    vanishes identically in the representation.
    """
    spec = mellin_forward(np.asarray(eta, dtype=float), grid.ugrid, beta, eps=eps)
    lam = spec.lam
    c = _check_cos(lam, eps)
    vals = np.empty((grid.n_u, grid.n_v))
    for j, vv in enumerate(grid.v):
        rows = np.cos(eps * lam * vv) / c * spec.values
        vals[:, j] = mellin_inverse(
            MellinSpectrum(grid=grid.ugrid, beta=beta, values=rows, eps=eps))
    return StripField(grid, vals, eps, beta)


def solve_wedge_poisson(g: StripField, eps: float, beta: float = 0.5,
                        check_quadrature: bool = True) -> StripField:
    """Particular solution with zero top datum and bottom no-flux.

    Assembled from the angular Green kernel: for each transform row the two
    cumulative integrals against sin(eps lam (z-1)) and cos(eps lam z), with
    trapezoid quadrature in the angular variable.
    """
    w = _poisson_once(g, eps, beta, sub=1)
    if check_quadrature:
        w2 = _poisson_once(g, eps, beta, sub=2)
        scale = np.max(np.abs(w.values))
        if scale > 0:
            drift = np.max(np.abs(w2 - w.values[:, ::2])) / scale
            if drift > 0.01:
                raise QuadratureUnderresolved(
                    f"halving the angular resolution changes the field by {drift:.2%}")
    return w


def _poisson_once(g: StripField, eps: float, beta: float, sub: int = 1):
    grid = g.grid
    v = grid.v[::sub]
    dv = grid.dv * sub
    lam_g, ghat = g.row_spectra(beta=beta - 2.0)
    ghat = ghat[:, ::sub]
    # dealias: sources assembled from pointwise products of differentiated
    # fields alias into the top of the band, which the fixed-point loop would
    # amplify; roll the highest third of the frequencies off smoothly
    from .norms import _smooth_step
    tau_rel = np.abs(np.imag(lam_g)) / np.max(np.abs(np.imag(lam_g)))
    ghat = ghat * _smooth_step((tau_rel - 0.6) / 0.25)[:, None]
    lam = lam_g + 2.0            # kernels live on the target contour
    c = _check_cos(lam, eps)
    elam = eps * lam[:, None]
    sin_z1 = np.sin(elam * (v[None, :] - 1.0))
    cos_z = np.cos(elam * v[None, :])
    # I2(v) = int_0^v cos(eps lam z) ghat dz, I1(v) = int_v^1 sin(eps lam (z-1)) ghat dz
    f2 = cos_z * ghat
    I2 = np.zeros_like(f2)
    I2[:, 1:] = np.cumsum(0.5 * (f2[:, 1:] + f2[:, :-1]) * dv, axis=1)
    f1 = sin_z1 * ghat
    J = np.zeros_like(f1)
    J[:, 1:] = np.cumsum(0.5 * (f1[:, 1:] + f1[:, :-1]) * dv, axis=1)
    I1 = J[:, -1:] - J
    what = eps / (lam[:, None] * c[:, None]) * (np.cos(elam * v[None, :]) * I1
                                                + np.sin(elam * (v[None, :] - 1.0)) * I2)
    if sub == 1:
        out = np.empty((grid.n_u, grid.n_v))
        for j in range(grid.n_v):
            out[:, j] = mellin_inverse(
                MellinSpectrum(grid=grid.ugrid, beta=beta, values=what[:, j]))
        return StripField(grid, out, eps, beta)
    out = np.empty((grid.n_u, what.shape[1]))
    for j in range(what.shape[1]):
        out[:, j] = mellin_inverse(
            MellinSpectrum(grid=grid.ugrid, beta=beta, values=what[:, j]))
    return out


def dno_wedge(eta, grid: LogGrid, eps: float, beta: float = 0.5) -> np.ndarray:
    """Flux map: top datum -> (-q_x + (1/eps^2) q_y) on the top edge.

    Evaluated from the analytic angular derivative of the row-wise solution,
    i.e. by the multiplier dno_symbol on the contour shifted one to the left.
    """
    spec = mellin_forward(np.asarray(eta, dtype=float), grid, beta, eps=eps)
    if eps > 0.0:
        _check_cos(spec.lam, eps)
    vals = dno_symbol(spec.lam, eps) * spec.values
    out = MellinSpectrum(grid=grid, beta=beta - 1.0, values=vals, eps=eps)
    return mellin_inverse(out)


# ---------------------------------------------------------------------------
# perturbed wedge: remainder operator and fixed point
# ---------------------------------------------------------------------------

def remainder_source(p: StripField, pb: Pullback) -> StripField:
    """Source term transferring the perturbed-domain problem onto the wedge.

    All eight terms in the pulled-back Laplacian defect, written with the
    stretch factor gamma = (1 + psi_y)^-1 and its derivative identities
    gamma_x = -gamma^2 psi_xy, gamma_y = -gamma^2 psi_yy.
    """
    eps = p.eps
    psi = pb.psi
    psi_x = psi.dx().values
    psi_y = psi.dy().values
    psi_xy = psi.dx().dy().values
    psi_xx = psi.dx().dx().values
    psi_yy = psi.dy().dy().values
    one_plus = 1.0 + psi_y
    if np.min(one_plus) <= 0.0:
        raise DegenerateDroplet("shear map folds inside the remainder evaluation")
    gam = 1.0 / one_plus
    gam_x = -gam ** 2 * psi_xy
    gam_y = -gam ** 2 * psi_yy
    p_y = p.dy().values
    p_yy = p.dy().dy().values
    p_xy = p.dx().dy().values
    ie2 = 1.0 / eps ** 2
    r = (-gam_x * psi_x * p_y
         - gam * psi_xx * p_y
         - 2.0 * gam * psi_x * p_xy
         + gam * gam_y * psi_x ** 2 * p_y
         + gam ** 2 * psi_x * psi_xy * p_y
         + gam ** 2 * psi_x ** 2 * p_yy
         + ie2 * gam * gam_y * p_y
         + ie2 * (gam ** 2 - 1.0) * p_yy)
    # The genuine remainder of localized data decays beyond the data support,
    # but rounding noise at the radial truncation edge would be re-amplified by
    # the source-side contour shift on every fixed-point sweep; roll it off.
    from .norms import _smooth_step
    u = p.grid.u
    taper = _smooth_step((u - (u[-1] - 2.0)) / 1.5)
    r = r * taper[:, None]
    return StripField(p.grid, r, eps, p.beta)


@dataclass
class PerturbedSolveStats:
    iterations: int
    deltas: list
    ratios: list = field(default_factory=list)


def solve_perturbed_wedge(eta, phi, grid: StripGrid, eps: float,
                          beta: float = 0.5, tol: float = 1e-10,
                          max_iter: int = 50, pullback: Pullback = None,
                          norm_k: float = 1.0):
    """Pressure on the sheared wedge, pulled back to the reference wedge.

    Fixed-point iteration starting from the zero source: each sweep solves the
    reference-wedge problem with source given by the remainder of the previous
    iterate.  Stops when the pressure-norm of the update falls below tol.
    Returns (field, stats).
    """
    pb = pullback if pullback is not None else build_pullback(phi, grid, eps)
    q = solve_wedge_dirichlet(eta, grid, eps, beta)
    p = q
    deltas = []
    ratios = []
    stall = 0
    for it in range(1, max_iter + 1):
        r = remainder_source(p, pb)
        w = solve_wedge_poisson(r, eps, beta, check_quadrature=False)
        p_next = StripField(grid, q.values + w.values, eps, beta)
        diff = StripField(grid, p_next.values - p.values, eps, beta)
        delta = pressure_norm(diff, norm_k, eps).total
        deltas.append(delta)
        p = p_next
        # converged: absolute target, or the rounding floor of the update norm
        # (the angular boost amplifies row-transform noise, so differences of
        # order-one fields cannot be measured below roughly 1e-5 relative)
        if delta < tol or delta < 1e-8 * deltas[0]:
            break
        if len(deltas) >= 3 and min(deltas[:-1]) < 1e-3 * deltas[0] \
                and delta > 0.7 * min(deltas[:-1]):
            break
        if len(deltas) >= 2 and deltas[-2] > 0:
            ratio = deltas[-1] / deltas[-2]
            ratios.append(ratio)
            stall = stall + 1 if (ratio > 0.9 and delta > 1e-4 * deltas[0]) else 0
            if stall >= 5:
                raise NoContraction(
                    "update ratio exceeded 0.9 for 5 consecutive sweeps; "
                    "the boundary perturbation is too large")
    stats = PerturbedSolveStats(iterations=it, deltas=deltas, ratios=ratios)
    p.solve_stats = stats
    return p, stats


def dno_perturbed(eta, phi, grid: StripGrid, eps: float, beta: float = 0.5,
                  solution: StripField = None, pullback: Pullback = None):
    """Flux map on the sheared wedge, evaluated through the pull-back traces.

    The top-edge flux is -h_x (p_x - gamma psi_x p_y) + (1/eps^2) gamma p_y
    with h the perturbed top height; derivatives are taken on the reference
    strip and combined at v = 1.
    """
    pb = pullback if pullback is not None else build_pullback(phi, grid, eps)
    if solution is None:
        solution, _ = solve_perturbed_wedge(eta, phi, grid, eps, beta, pullback=pb)
    p = solution
    psi_x_top = pb.psi.dx().values[:, -1]
    gam_top = pb.gamma_field()[:, -1]
    p_x_top = p.dx().values[:, -1]
    p_y_top = p.dy().values[:, -1]
    hx = np.tan(eps) / eps + np.asarray(phi, dtype=float)
    return (-hx * (p_x_top - gam_top * psi_x_top * p_y_top)
            + gam_top * p_y_top / eps ** 2)


# ---------------------------------------------------------------------------
# finite-difference oracle on the strip
# ---------------------------------------------------------------------------

def fd_oracle_solve(problem: PressureProblem, grid: StripGrid,
                    far_field: str = "spectral") -> StripField:
    """Independent 5-point solve of the strip problem by direct elimination.

    far_field selects the Dirichlet closure at the two radial truncation edges:
    'spectral' evaluates the spectral solution there, 'zero' uses zeros.
    """
    eps = problem.eps
    n_u, n_v = grid.n_u, grid.n_v
    du, dv = grid.ugrid.du, grid.dv
    eta = np.asarray(problem.dirichlet, dtype=float)
    rhs_field = np.zeros((n_u, n_v))
    if problem.source is not None:
        # strip form of the equation carries e^{2u} times the wedge source
        rhs_field = np.exp(2.0 * grid.u)[:, None] * problem.source.values
    if far_field == "spectral":
        if problem.source is None:
            edge = solve_wedge_dirichlet(eta, grid, eps, problem.beta).values
        else:
            qd = solve_wedge_dirichlet(eta, grid, eps, problem.beta).values
            qw = solve_wedge_poisson(problem.source, eps, problem.beta,
                                     check_quadrature=False).values
            edge = qd + qw
    else:
        edge = np.zeros((n_u, n_v))

    N = n_u * n_v
    ie2 = 1.0 / eps ** 2
    idx = lambda i, j: i * n_v + j
    rows, cols, data = [], [], []
    rhs = np.zeros(N)
    for i in range(n_u):
        for j in range(n_v):
            k = idx(i, j)
            if j == n_v - 1:
                rows.append(k); cols.append(k); data.append(1.0)
                rhs[k] = eta[i]
                continue
            if i == 0 or i == n_u - 1:
                rows.append(k); cols.append(k); data.append(1.0)
                rhs[k] = edge[i, j]
                continue
            diag = -2.0 / du ** 2 - 2.0 * ie2 / dv ** 2
            rows += [k, k, k]
            cols += [idx(i - 1, j), idx(i + 1, j), k]
            data += [1.0 / du ** 2, 1.0 / du ** 2, diag]
            if j == 0:
                # reflected ghost enforces the bottom no-flux condition
                rows.append(k); cols.append(idx(i, 1)); data.append(2.0 * ie2 / dv ** 2)
            else:
                rows += [k, k]
                cols += [idx(i, j - 1), idx(i, j + 1)]
                data += [ie2 / dv ** 2, ie2 / dv ** 2]
            rhs[k] = rhs_field[i, j]
    A = sp.csr_matrix((data, (rows, cols)), shape=(N, N))
    try:
        sol = spla.spsolve(A.tocsc(), rhs)
    except Exception as exc:  # pragma: no cover - scipy raises various types
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(sol)):
        raise SingularSystem("direct solve returned non-finite values")
    return StripField(grid, sol.reshape(n_u, n_v), eps, problem.beta)


def boundary_traces(p: StripField, eps: float):
    """Top-edge traces (p_x, (1/eps^2) p_y) as radial sample arrays."""
    px = p.dx().values[:, -1]
    py_scaled = p.dy_scaled().values[:, -1] / eps
    return px, py_scaled


# ---------------------------------------------------------------------------
# column-mapped direct solver (droplet bodies and sheared wedges)
# ---------------------------------------------------------------------------

class ColumnMappedSolution:
    """Solution of the anisotropic Laplace problem under y = s * H(x)."""

    def __init__(self, x, height, values, eps):
        self.x = np.asarray(x, dtype=float)
        self.height = np.asarray(height, dtype=float)
        self.values = values         # (n_x, n_s)
        self.eps = eps
        self.n_s = values.shape[1]
        self.s = np.linspace(0.0, 1.0, self.n_s)

    def top_flux(self, datum_slope=None):
        """(-H_x p_x + (1/eps^2) p_y) on the top boundary."""
        x, H, P = self.x, self.height, self.values
        dx = x[1] - x[0]
        ds = 1.0 / (self.n_s - 1)
        Hx = np.gradient(H, x, edge_order=2)
        A = Hx / H
        c = np.array([25.0 / 12, -4.0, 3.0, -4.0 / 3, 0.25])
        P_s_top = (c[0] * P[:, -1] + c[1] * P[:, -2] + c[2] * P[:, -3]
                   + c[3] * P[:, -4] + c[4] * P[:, -5]) / ds
        P_x_top = np.gradient(P[:, -1], x, edge_order=2)
        p_x = P_x_top - A * P_s_top
        p_y = P_s_top / H
        return -Hx * p_x + p_y / self.eps ** 2


def column_mapped_solve(x, height, top_datum, eps: float,
                        n_s: int = 25, side: str = "pinch",
                        side_values=None, max_aspect: float = 1e4) -> ColumnMappedSolution:
    """Direct solve of p_xx + (1/eps^2) p_yy = 0 on {0 < y < H(x)}.

    Vertical-line mapping y = s H(x), 9-point second-order stencil, bottom
    no-flux by reflection, top Dirichlet.  side='pinch' closes the lateral
    boundaries with the nearest top-datum value (the column height vanishes
    there); side='dirichlet' uses the provided side_values (n_s columns).
    """
    x = np.asarray(x, dtype=float)
    H = np.asarray(height, dtype=float)
    eta = np.asarray(top_datum, dtype=float)
    n_x = len(x)
    dx = x[1] - x[0]
    ds = 1.0 / (n_s - 1)
    if np.any(H <= 0.0):
        raise DegenerateDroplet("column height must be positive on the solve nodes")
    aspect = dx / (np.min(H) * ds)
    if aspect > max_aspect:
        raise DegenerateDroplet(
            f"mapped cell aspect ratio {aspect:.1e} exceeds {max_aspect:.0e}")
    Hx = np.gradient(H, x, edge_order=2)
    A = Hx / H
    A_x = np.gradient(A, x, edge_order=2)
    s = np.linspace(0.0, 1.0, n_s)
    ie2 = 1.0 / eps ** 2

    idx = lambda i, j: i * n_s + j
    N = n_x * n_s
    rows, cols, data = [], [], []
    rhs = np.zeros(N)

    def add(k, kk, val):
        rows.append(k); cols.append(kk); data.append(val)

    for i in range(n_x):
        for j in range(n_s):
            k = idx(i, j)
            if j == n_s - 1:
                add(k, k, 1.0); rhs[k] = eta[i]; continue
            if i == 0 or i == n_x - 1:
                add(k, k, 1.0)
                if side == "pinch":
                    rhs[k] = eta[i]
                else:
                    rhs[k] = side_values[0 if i == 0 else 1][j]
                continue
            sj = s[j]
            c_ss = sj ** 2 * A[i] ** 2 + ie2 / H[i] ** 2
            c_s = sj * (A[i] ** 2 - A_x[i])
            c_x = sj * A[i]   # coefficient of -2 s A P_xs
            # P_xx
            add(k, idx(i - 1, j), 1.0 / dx ** 2)
            add(k, idx(i + 1, j), 1.0 / dx ** 2)
            add(k, k, -2.0 / dx ** 2)
            # P_ss with bottom reflection
            jm, jp = j - 1, j + 1
            add(k, idx(i, jp), c_ss / ds ** 2)
            add(k, k, -2.0 * c_ss / ds ** 2)
            if j == 0:
                add(k, idx(i, 1), c_ss / ds ** 2)
            else:
                add(k, idx(i, jm), c_ss / ds ** 2)
            # P_s (vanishes at j=0 by symmetry of the reflected stencil)
            if j > 0:
                add(k, idx(i, jp), c_s / (2 * ds))
                add(k, idx(i, jm), -c_s / (2 * ds))
            # -2 s A P_xs, central cross difference
            if j > 0:
                w = -2.0 * c_x / (4 * dx * ds)
                add(k, idx(i + 1, jp), w)
                add(k, idx(i - 1, jm), w)
                add(k, idx(i + 1, jm), -w)
                add(k, idx(i - 1, jp), -w)
    Amat = sp.csr_matrix((data, (rows, cols)), shape=(N, N))
    try:
        sol = spla.spsolve(Amat.tocsc(), rhs)
    except Exception as exc:  # pragma: no cover
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(sol)):
        raise SingularSystem("column-mapped solve returned non-finite values")
    return ColumnMappedSolution(x, H, sol.reshape(n_x, n_s), eps)


def dno_droplet(h, datum, x, eps: float, n_s: int = 25) -> np.ndarray:
    """Flux map for a droplet body {0 < y < h(x)} on the unit interval.

    h and datum are sampled on x (uniform, h = 0 at the endpoints).  Solves on
    the interior columns with pinch closures at the contact points and returns
    the top-edge flux on the full grid, extrapolated at the endpoints.
    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    datum = np.asarray(datum, dtype=float)
    if np.any(h[1:-1] <= 0.0):
        raise DegenerateDroplet("height vanishes in the interior")
    sol = column_mapped_solve(x[1:-1], h[1:-1], datum[1:-1], eps, n_s=n_s)
    flux = np.empty_like(x)
    flux[1:-1] = sol.top_flux()
    flux[0] = 3.0 * flux[1] - 3.0 * flux[2] + flux[3]
    flux[-1] = 3.0 * flux[-2] - 3.0 * flux[-3] + flux[-4]
    return flux
