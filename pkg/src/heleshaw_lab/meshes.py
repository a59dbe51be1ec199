"""Uniform cell-centered meshes, scalar fields and discrete operators.

Two geometries: a 1D Cartesian interval [-L, L] and a radially symmetric
ball of radius L in N dimensions (cell centers at (i+1/2)h, no center at
r = 0). The radial Laplacian is the conservative finite-volume form, which
is exact on quadratics.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MeshError

ZERO_FLUX = "zero_flux"


def unit_ball_volume(N):
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


@dataclass(frozen=True)
class Mesh:
    geometry: str  # "cartesian1d" | "radial"
    n_cells: int
    L: float
    dim: int = 1  # spatial dimension, radial geometry only

    def __post_init__(self):
        if self.geometry not in ("cartesian1d", "radial"):
            raise MeshError(f"unknown geometry {self.geometry!r}")
        if self.n_cells < 8:
            raise MeshError(f"need at least 8 cells, got {self.n_cells}")
        if not self.L > 0:
            raise MeshError(f"domain size must be positive, got {self.L}")
        if self.geometry == "radial" and self.dim < 1:
            raise MeshError(f"radial dimension must be >= 1, got {self.dim}")

    @property
    def extent(self):
        return 2.0 * self.L if self.geometry == "cartesian1d" else self.L

    @property
    def h(self):
        return self.extent / self.n_cells

    @property
    def centers(self):
        h = self.h
        if self.geometry == "cartesian1d":
            return -self.L + h * (np.arange(self.n_cells) + 0.5)
        return h * (np.arange(self.n_cells) + 0.5)

    @property
    def faces(self):
        h = self.h
        if self.geometry == "cartesian1d":
            return -self.L + h * np.arange(self.n_cells + 1)
        return h * np.arange(self.n_cells + 1)

    @property
    def volumes(self):
        """Cell measures used by the integral norms."""
        if self.geometry == "cartesian1d":
            return np.full(self.n_cells, self.h)
        r = self.faces
        return unit_ball_volume(self.dim) * (r[1:] ** self.dim - r[:-1] ** self.dim)


@dataclass
class Field:
    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_cells,):
            raise MeshError(
                f"field length {self.values.shape} does not match mesh ({self.mesh.n_cells} cells)"
            )
        if not np.all(np.isfinite(self.values)):
            raise MeshError("field contains non-finite values")

    def copy(self):
        return Field(self.mesh, self.values.copy())


def _check_same_mesh(f: Field, g: Field):
    if f.mesh != g.mesh:
        raise MeshError("fields live on different meshes")


def laplacian_values(v, mesh: Mesh, bc=ZERO_FLUX, bc_value=0.0):
    """Discrete Laplacian of raw values; the core used by the time stepper.

    bc is either ZERO_FLUX or "dirichlet" with bc_value imposed at the outer
    boundary faces (both ends in Cartesian geometry, outer end only in radial
    geometry, where r = 0 always carries the symmetry condition).
    """
    h = mesh.h
    out = np.empty_like(v)
    if mesh.geometry == "cartesian1d":
        # interior
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
        if bc == ZERO_FLUX:
            out[0] = (v[1] - v[0]) / (h * h)
            out[-1] = (v[-2] - v[-1]) / (h * h)
        else:
            out[0] = (v[1] - 3.0 * v[0] + 2.0 * bc_value) / (h * h)
            out[-1] = (v[-2] - 3.0 * v[-1] + 2.0 * bc_value) / (h * h)
        return out
    # radial, conservative form: divide the face-flux difference by the exact
    # cell average of r^(N-1), i.e. (r+^N - r-^N)/(N h); exact on quadratics.
    N = mesh.dim
    r = mesh.faces
    w = r ** (N - 1)
    flux = np.zeros(mesh.n_cells + 1)
    flux[1:-1] = w[1:-1] * (v[1:] - v[:-1]) / h
    if bc == ZERO_FLUX:
        flux[-1] = 0.0
    else:
        flux[-1] = w[-1] * 2.0 * (bc_value - v[-1]) / h
    shell = (r[1:] ** N - r[:-1] ** N) / (N * h)
    out[:] = (flux[1:] - flux[:-1]) / (h * shell)
    return out


def laplacian(f: Field, bc=ZERO_FLUX, bc_value=0.0) -> Field:
    return Field(f.mesh, laplacian_values(f.values, f.mesh, bc, bc_value))


def gradient_sq(f: Field) -> Field:
    """Squared gradient, central differences inside, one-sided at the ends."""
    v = f.values
    h = f.mesh.h
    g = np.empty_like(v)
    g[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    g[0] = (v[1] - v[0]) / h
    g[-1] = (v[-1] - v[-2]) / h
    return Field(f.mesh, g * g)


def norm(f: Field, kind="l1"):
    v, vol = f.values, f.mesh.volumes
    if kind == "l1":
        return float(np.sum(np.abs(v) * vol))
    if kind == "l2":
        return float(np.sqrt(np.sum(v * v * vol)))
    if kind == "linf":
        return float(np.max(np.abs(v))) if v.size else 0.0
    if kind == "total_variation":
        if f.mesh.geometry != "cartesian1d":
            raise MeshError("total variation is only defined on Cartesian meshes")
        return float(np.sum(np.abs(np.diff(v))))
    raise MeshError(f"unknown norm kind {kind!r}")


def l1_distance(f: Field, g: Field):
    _check_same_mesh(f, g)
    return norm(Field(f.mesh, f.values - g.values), "l1")


def support_radius(f: Field, threshold):
    """Largest coordinate where f crosses the threshold, or None.

    Linear interpolation between the last cell at or above the threshold and
    its outward neighbor.
    """
    if not threshold > 0:
        raise MeshError(f"threshold must be positive, got {threshold}")
    v = f.values
    above = np.nonzero(v >= threshold)[0]
    if above.size == 0:
        return None
    i = int(above[-1])
    x = f.mesh.centers
    if i == f.mesh.n_cells - 1:
        return float(x[i])
    denom = v[i] - v[i + 1]
    frac = (v[i] - threshold) / denom if denom > 0 else 0.0
    return float(x[i] + frac * f.mesh.h)


def resample(f: Field, target: Mesh) -> Field:
    """Conservative piecewise-constant projection onto a mesh of the same
    geometry and extent."""
    src = f.mesh
    if src.geometry != target.geometry or abs(src.extent - target.extent) > 1e-12 * src.extent:
        raise MeshError("resample requires matching geometry and extent")
    if src.geometry == "radial" and src.dim != target.dim:
        raise MeshError("resample requires matching dimension")
    if src == target:
        return f.copy()
    sf = src.faces
    tf = target.faces
    if src.geometry == "cartesian1d":
        measure = lambda a, b: b - a
    else:
        N = src.dim
        cN = unit_ball_volume(N)
        measure = lambda a, b: cN * (b ** N - a ** N)
    out = np.zeros(target.n_cells)
    for j in range(target.n_cells):
        a, b = tf[j], tf[j + 1]
        i0 = max(0, int(np.searchsorted(sf, a, side="right")) - 1)
        i1 = min(src.n_cells, int(np.searchsorted(sf, b, side="left")))
        acc = 0.0
        for i in range(i0, i1):
            lo, hi = max(a, sf[i]), min(b, sf[i + 1])
            if hi > lo:
                acc += f.values[i] * measure(lo, hi)
        out[j] = acc / measure(a, b)
    return Field(target, out)
