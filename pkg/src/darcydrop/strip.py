"""Fields on the strip (u, v) in R x [0, 1], the log-polar image of the wedge.

values[i, j] is the field at (u_i, v_j).  Radial (u) derivatives are spectral
per v-row at the field's working contour; angular (v) derivatives use 4th-order
finite differences with one-sided closures at v = 0, 1.
"""

import numpy as np

from .errors import GridMismatch, NonFiniteInput
from .mellin import LogGrid, MellinSpectrum, mellin_forward, mellin_inverse


class StripGrid:
    """Tensor grid: log-uniform u (power-of-two count) x uniform v in [0, 1]."""

    def __init__(self, u_min: float, u_max: float, n_u: int, n_v: int = 64):
        if n_v < 9:
            raise ValueError("need at least 9 angular nodes")
        self.ugrid = LogGrid(u_min, u_max, n_u)
        self.n_u = n_u
        self.n_v = int(n_v)
        self.v = np.linspace(0.0, 1.0, n_v)
        self.dv = 1.0 / (n_v - 1)

    @property
    def u(self):
        return self.ugrid.u

    def __eq__(self, other):
        return (
            isinstance(other, StripGrid)
            and self.ugrid == other.ugrid
            and self.n_v == other.n_v
        )

    def __repr__(self):
        g = self.ugrid
        return f"StripGrid(u_min={g.u_min}, u_max={g.u_max}, n_u={g.n}, n_v={self.n_v})"


def _dv_matrix_apply(F, dv):
    """4th-order d/dv along axis 1 with one-sided 5-point closures."""
    out = np.empty_like(F)
    out[:, 2:-2] = (F[:, :-4] - 8 * F[:, 1:-3] + 8 * F[:, 3:-1] - F[:, 4:]) / (12 * dv)
    c0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
    c1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
    out[:, 0] = F[:, :5] @ c0 / dv
    out[:, 1] = F[:, :5] @ c1 / dv
    out[:, -1] = -(F[:, -1:-6:-1] @ c0) / dv
    out[:, -2] = -(F[:, -1:-6:-1] @ c1) / dv
    return out


class StripField:
    """Real field on a StripGrid with an anisotropy parameter eps and a working contour."""

    def __init__(self, grid: StripGrid, values, eps: float, beta: float = 0.5):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n_u, grid.n_v):
            raise GridMismatch("values shape does not match grid")
        if not np.all(np.isfinite(values)):
            raise NonFiniteInput("field contains non-finite values")
        self.grid = grid
        self.values = values
        self.eps = float(eps)
        self.beta = float(beta)

    # --- coordinates of the wedge image ---

    def xy(self):
        u = self.grid.u[:, None]
        v = self.grid.v[None, :]
        e = self.eps
        x = np.exp(u) * np.cos(e * v)
        y = np.exp(u) * np.sin(e * v) / e if e > 0 else np.exp(u) * v * 0.0
        return np.broadcast_to(x, self.values.shape), np.broadcast_to(y, self.values.shape)

    def like(self, values):
        return StripField(self.grid, values, self.eps, self.beta)

    # --- spectral representation ---

    def row_spectra(self, beta=None, check_tail=False):
        """Transform every v-row in u; returns (lam, complex array (n_u, n_v))."""
        b = self.beta if beta is None else beta
        out = np.empty((self.grid.n_u, self.grid.n_v), dtype=complex)
        lam = None
        for j in range(self.grid.n_v):
            spec = mellin_forward(self.values[:, j], self.grid.ugrid, b,
                                  check_tail=check_tail)
            out[:, j] = spec.values
            lam = spec.lam
        return lam, out

    @classmethod
    def from_row_spectra(cls, grid: StripGrid, beta, spectra, eps):
        vals = np.empty((grid.n_u, grid.n_v))
        for j in range(grid.n_v):
            spec = MellinSpectrum(grid=grid.ugrid, beta=beta, values=spectra[:, j])
            vals[:, j] = mellin_inverse(spec)
        return cls(grid, vals, eps, beta)

    # --- derivatives ---

    def du(self):
        """d/du = x d/dx + y d/dy, spectral per row."""
        lam, spectra = self.row_spectra()
        return self.like(StripField.from_row_spectra(
            self.grid, self.beta, spectra * lam[:, None], self.eps).values)

    def dv(self):
        return self.like(_dv_matrix_apply(self.values, self.grid.dv))

    def dx(self):
        """Horizontal derivative via the strip chain rule."""
        e = self.eps
        u = self.grid.u[:, None]
        v = self.grid.v[None, :]
        fu = self.du().values
        fv = self.dv().values
        vals = np.exp(-u) * (np.cos(e * v) * fu - np.sin(e * v) * fv / e)
        return self.like(vals)

    def dy_scaled(self):
        """(1/eps) * vertical derivative via the strip chain rule."""
        e = self.eps
        u = self.grid.u[:, None]
        v = self.grid.v[None, :]
        fu = self.du().values
        fv = self.dv().values
        vals = np.exp(-u) * (np.sin(e * v) * fu + np.cos(e * v) * fv / e)
        return self.like(vals)

    def dy(self):
        return self.like(self.eps * self.dy_scaled().values)

    # --- traces ---

    def top(self):
        """Samples on the v = 1 boundary as a function of u."""
        return self.values[:, -1].copy()

    def bottom(self):
        return self.values[:, 0].copy()

    def dump_csv(self, path):
        """Debug dump: columns u, v, value."""
        with open(path, "w") as fh:
            fh.write("u,v,value\n")
            for i, uu in enumerate(self.grid.u):
                for j, vv in enumerate(self.grid.v):
                    fh.write(f"{uu!r},{vv!r},{self.values[i, j]!r}\n")


def laplacian_aniso(field: StripField) -> np.ndarray:
    """Delta_eps in wedge coordinates: e^{-2u} (F_uu + (1/eps^2) F_vv)."""
    u = field.grid.u[:, None]
    fuu = field.du().du().values
    fvv = _dv_matrix_apply(_dv_matrix_apply(field.values, field.grid.dv), field.grid.dv)
    return np.exp(-2 * u) * (fuu + fvv / field.eps ** 2)
