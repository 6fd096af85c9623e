"""Analytic fixed-source solver on a heterogeneous slab.

Per region the solution is an eigensystem expansion

    Psi(x) = P (Gtilde(t) alpha + J(t)),   t = x - x_left(region),

where Gtilde is the block exponential with each block anchored at the edge
that keeps its argument nonpositive (decaying blocks at the left edge,
growing blocks at the right edge) and J is the particular response to the
piecewise-constant source, accumulated cell by cell with bounded
multipliers.  Anchoring keeps every matrix entry and intermediate value
O(1); expanding all blocks from the left edge instead produces condition
numbers around e^(lambda L), which for thick regions at high S_N order is
far beyond double precision.

The alpha coefficients of all regions solve one (N G R) x (N G R) linear
system: N G / 2 rows per boundary condition and N G rows of angular-flux
continuity per interior interface.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .exceptions import (PointOutOfDomainError, SingularSystemError,
                         ValidationError)
from .mesh import FineMesh, FluxField, SourceField
from .model import QuadratureSet, SlabGeometry
from .spectral import BlockSpectrum, exp_pair, phi_pair, phi_real

SOLVE_RCOND_MIN = 1e-14
UNIFORM_RTOL = 1e-12


@dataclass(frozen=True)
class RegionSolution:
    """Expansion coefficients for one region, in the anchored block basis."""

    alpha: np.ndarray
    spectrum: BlockSpectrum
    x_left: float
    x_right: float


@dataclass(frozen=True)
class GlobalSystem:
    """Assembled boundary/continuity system M alpha = rhs."""

    matrix: np.ndarray
    rhs: np.ndarray
    ng: int
    n_regions: int


def select_rows(matrix: np.ndarray, quad: QuadratureSet, sign: str) -> np.ndarray:
    """Rows of an (N G) x ... matrix whose ordinate matches the mu sign.

    Row (g-1)N + n is kept iff sign(mu_n) matches; original order is
    preserved.
    """
    if sign not in ("positive", "negative"):
        raise ValidationError(f"sign must be 'positive' or 'negative', got {sign!r}")
    n = quad.n
    if matrix.shape[0] % n != 0:
        raise ValidationError("matrix rows are not a multiple of the quadrature size")
    g = matrix.shape[0] // n
    mask = np.tile(quad.mu > 0.0 if sign == "positive" else quad.mu < 0.0, g)
    return matrix[mask]


def _pair_rows(quad: QuadratureSet, g: int):
    """Row indices (positive-mu row, mirrored negative-mu row) pairing
    ordinates of equal |mu|, group-major."""
    n = quad.n
    pos = np.arange(n // 2, n)
    neg = n - 1 - pos
    pos_rows = (np.arange(g)[:, None] * n + pos[None, :]).ravel()
    neg_rows = (np.arange(g)[:, None] * n + neg[None, :]).ravel()
    return pos_rows, neg_rows


def _region_theta(source: SourceField, quad: QuadratureSet, cells: np.ndarray) -> np.ndarray:
    g = source.ng // quad.n
    return (source.q[cells] / np.tile(quad.mu, g)[None, :]).T


class _RegionWork:
    """Everything the assembly and evaluation need for one region."""

    def __init__(self, spec: BlockSpectrum, x_left: float, x_right: float,
                 t_edges: np.ndarray, theta: np.ndarray):
        self.spec = spec
        self.x_left = x_left
        self.x_right = x_right
        self.length = x_right - x_left
        self.t_edges = t_edges
        self.widths = np.diff(t_edges)
        # anchor each block at the edge that keeps its exponent nonpositive
        self.real_anchor = np.where(spec.real_lams > 0.0, self.length, 0.0)
        self.pair_anchor = np.where(spec.pair_z.real > 0.0, self.length, 0.0)
        # encoded pair scalar: the 2x2 block action on (u1, u2) ~ u1 + i u2
        # is multiplication by conj(z), so all encoded math uses conj(z)
        self.pair_zc = np.conj(spec.pair_z)
        self.theta_x = spec.P_inv @ theta
        self.theta_real = self.theta_x[spec.real_cols]
        self.theta_pair = (self.theta_x[spec.pair_cols]
                           + 1j * self.theta_x[spec.pair_cols + 1])
        self.j_real = self._particular_edges(spec.real_lams, self.real_anchor,
                                             self.theta_real)
        self.j_pair = self._particular_edges(self.pair_zc, self.pair_anchor,
                                             self.theta_pair)

    def _particular_edges(self, rates, anchors, theta):
        """Particular solution J at every local cell edge, one row per block.

        Forward recurrence from the left edge for blocks anchored at 0,
        backward from the right edge otherwise; all step multipliers have
        magnitude <= 1.
        """
        m = self.widths.size
        out = np.zeros((rates.size, m + 1), dtype=theta.dtype)
        uniform = m > 0 and np.ptp(self.widths) <= UNIFORM_RTOL * self.widths[0]
        for k in range(rates.size):
            rate = rates[k]
            if anchors[k] == 0.0:
                step = np.exp(rate * self.widths)
                src = phi(rate, self.widths, theta.dtype) * theta[k]
                out[k, 1:] = _recurrence(step, src, uniform)
            else:
                step = np.exp(-rate * self.widths[::-1])
                src = -phi(-rate, self.widths[::-1], theta.dtype) * theta[k, ::-1]
                out[k, :-1] = _recurrence(step, src, uniform)[::-1]
        return out

    def edge_particular(self, side: str) -> np.ndarray:
        """Particular X-vector at the local edge (t = 0 or t = L)."""
        col = 0 if side == "left" else -1
        return self._decode(self.j_real[:, col], self.j_pair[:, col])

    def _decode(self, real_vals, pair_vals):
        out = np.zeros(self.spec.size)
        out[self.spec.real_cols] = real_vals
        out[self.spec.pair_cols] = pair_vals.real
        out[self.spec.pair_cols + 1] = pair_vals.imag
        return out

    def pg_at(self, t: float) -> np.ndarray:
        """P @ Gtilde(t): the anchored-basis trial functions at local t."""
        spec = self.spec
        out = np.empty_like(spec.P)
        if spec.real_cols.size:
            scale = np.exp(spec.real_lams * (t - self.real_anchor))
            out[:, spec.real_cols] = spec.P[:, spec.real_cols] * scale[None, :]
        s = exp_pair(spec.pair_z, t - self.pair_anchor)
        for k, col in enumerate(spec.pair_cols):
            p, q = spec.P[:, col], spec.P[:, col + 1]
            out[:, col] = p * s[k].real - q * s[k].imag
            out[:, col + 1] = p * s[k].imag + q * s[k].real
        return out

    def evaluate(self, alpha: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Psi at local coordinates t (each in [0, L]), columns per point."""
        spec = self.spec
        cell = np.searchsorted(self.t_edges[1:], t, side="left")
        cell = np.clip(cell, 0, self.widths.size - 1)
        x = np.zeros((spec.size, t.size))

        lam = spec.real_lams[:, None]
        if lam.size:
            a = self.real_anchor[:, None]
            ref_edge = np.where(lam <= 0.0, cell[None, :], cell[None, :] + 1)
            d = t[None, :] - self.t_edges[ref_edge]
            j_ref = np.take_along_axis(self.j_real, ref_edge, axis=1)
            th = self.theta_real[:, cell]
            j_t = np.exp(lam * d) * j_ref + phi(lam, d, float) * th
            x[spec.real_cols] = np.exp(lam * (t[None, :] - a)) * alpha[spec.real_cols][:, None] + j_t

        zc = self.pair_zc[:, None]
        if zc.size:
            a = self.pair_anchor[:, None]
            ref_edge = np.where(zc.real <= 0.0, cell[None, :], cell[None, :] + 1)
            d = t[None, :] - self.t_edges[ref_edge]
            j_ref = np.take_along_axis(self.j_pair, ref_edge, axis=1)
            th = self.theta_pair[:, cell]
            j_t = np.exp(zc * d) * j_ref + phi(zc, d, complex) * th
            alpha_w = alpha[spec.pair_cols] + 1j * alpha[spec.pair_cols + 1]
            w = np.exp(zc * (t[None, :] - a)) * alpha_w[:, None] + j_t
            x[spec.pair_cols] = w.real
            x[spec.pair_cols + 1] = w.imag
        return spec.P @ x


def phi(rate, dt, dtype):
    """Integral of e^{rate u} du over [0, dt]; dispatches on block kind."""
    if dtype is complex or np.iscomplexobj(rate):
        return phi_pair(rate, dt)
    return phi_real(rate, dt)


def _recurrence(step, src, uniform: bool):
    """y_m = step_m y_{m-1} + src_m with y_0 = 0; returns y_1..y_M."""
    if uniform:
        return lfilter([1.0], [1.0, -step[0]], src)
    y = np.zeros(src.size, dtype=src.dtype)
    acc = 0.0j if np.iscomplexobj(src) else 0.0
    for m in range(src.size):
        acc = step[m] * acc + src[m]
        y[m] = acc
    return y


def _region_works(geometry: SlabGeometry, spectra, source: SourceField,
                  quad: QuadratureSet):
    """One _RegionWork per region; spectra maps material name -> BlockSpectrum."""
    mesh = source.mesh
    works = []
    for r in range(geometry.n_regions):
        cells = mesh.cells_of_region(r)
        if cells.size == 0:
            raise ValidationError(f"region {r} has no source cells")
        x_left = geometry.edges[r]
        spec = spectra[geometry.materials[r]]
        t_edges = np.concatenate([mesh.edges[cells] - x_left,
                                  [mesh.edges[cells[-1] + 1] - x_left]])
        theta = _region_theta(source, quad, cells)
        works.append(_RegionWork(spec, x_left, geometry.edges[r + 1], t_edges, theta))
    return works


def _boundary_rows(work: _RegionWork, bc, quad: QuadratureSet, side: str):
    """(rows, rhs) for one boundary condition applied to one region edge."""
    t = 0.0 if side == "left" else work.length
    pg = work.pg_at(t)
    psi_part = work.spec.P @ work.edge_particular(side)
    g = work.spec.size // quad.n
    if bc.kind == "reflective":
        pos, neg = _pair_rows(quad, g)
        rows = pg[pos] - pg[neg]
        rhs = -(psi_part[pos] - psi_part[neg])
        return rows, rhs
    sign = "positive" if side == "left" else "negative"
    rows = select_rows(pg, quad, sign)
    incoming = bc.values if bc.kind == "incoming" else np.zeros(rows.shape[0])
    rhs = incoming - select_rows(psi_part[:, None], quad, sign)[:, 0]
    return rows, rhs


def assemble_global_system(geometry: SlabGeometry, spectra, source: SourceField,
                           quad: QuadratureSet) -> GlobalSystem:
    """Boundary + continuity system for the expansion coefficients.

    The first N G rows hold the two boundary conditions (N G / 2 each); each
    interior interface contributes N G continuity rows coupling the two
    adjacent regions.  spectra maps material name -> BlockSpectrum.
    """
    works = _region_works(geometry, spectra, source, quad)
    return _assemble(works, geometry, quad)


def _assemble(works, geometry: SlabGeometry, quad: QuadratureSet) -> GlobalSystem:
    ng = works[0].spec.size
    r = len(works)
    mat = np.zeros((ng * r, ng * r))
    rhs = np.zeros(ng * r)
    half = ng // 2

    rows, vals = _boundary_rows(works[0], geometry.bc_left, quad, "left")
    mat[:half, :ng] = rows
    rhs[:half] = vals
    rows, vals = _boundary_rows(works[-1], geometry.bc_right, quad, "right")
    mat[half:ng, (r - 1) * ng:] = rows
    rhs[half:ng] = vals

    for i in range(r - 1):
        left, right = works[i], works[i + 1]
        r0, r1 = ng * (i + 1), ng * (i + 2)
        mat[r0:r1, ng * i:ng * (i + 1)] = left.pg_at(left.length)
        mat[r0:r1, ng * (i + 1):ng * (i + 2)] = -right.pg_at(0.0)
        rhs[r0:r1] = (right.spec.P @ right.edge_particular("left")
                      - left.spec.P @ left.edge_particular("right"))
    return GlobalSystem(matrix=mat, rhs=rhs, ng=ng, n_regions=r)


def solve_alpha(system: GlobalSystem):
    """Direct dense solve; raises SingularSystemError below rcond 1e-14."""
    sv = np.linalg.svd(system.matrix, compute_uv=False)
    rcond = sv[-1] / sv[0] if sv[0] > 0 else 0.0
    if not np.isfinite(rcond) or rcond < SOLVE_RCOND_MIN:
        raise SingularSystemError(
            f"global system is numerically singular (rcond={rcond:.3e}); "
            "the shift may sit on an eigenvalue of the problem")
    alpha = np.linalg.solve(system.matrix, system.rhs)
    return [alpha[i * system.ng:(i + 1) * system.ng] for i in range(system.n_regions)]


def _solutions_from_alphas(works, alphas):
    return [RegionSolution(alpha=a, spectrum=w.spec, x_left=w.x_left, x_right=w.x_right)
            for a, w in zip(alphas, works)]


def _locate_regions(geometry: SlabGeometry, points: np.ndarray) -> np.ndarray:
    if np.any(points < geometry.edges[0]) or np.any(points > geometry.edges[-1]):
        raise PointOutOfDomainError(
            f"points outside [{geometry.edges[0]}, {geometry.edges[-1]}]")
    # a point exactly on an interface belongs to the region on its left
    return np.searchsorted(geometry.edges[1:], points, side="left")


def evaluate_flux(solutions, source: SourceField, points, quad: QuadratureSet,
                  geometry: SlabGeometry = None) -> FluxField:
    """Angular and scalar flux at arbitrary points inside the slab.

    Points on a region interface are evaluated from the left region;
    continuity of the solution makes the choice immaterial to within the
    solver tolerance.
    """
    points = np.atleast_1d(np.asarray(points, dtype=float))
    if geometry is None:
        geometry = _geometry_of(solutions)
    region = _locate_regions(geometry, points)
    mesh = source.mesh
    ng = solutions[0].spectrum.size
    psi = np.zeros((points.size, ng))
    for r, sol in enumerate(solutions):
        idx = np.nonzero(region == r)[0]
        if idx.size == 0:
            continue
        cells = mesh.cells_of_region(r)
        t_edges = np.concatenate([mesh.edges[cells] - sol.x_left,
                                  [mesh.edges[cells[-1] + 1] - sol.x_left]])
        theta = _region_theta(source, quad, cells)
        work = _RegionWork(sol.spectrum, sol.x_left, sol.x_right, t_edges, theta)
        psi[idx] = work.evaluate(sol.alpha, points[idx] - sol.x_left).T
    return FluxField.from_psi(points, psi, quad)


def _geometry_of(solutions) -> SlabGeometry:
    edges = [solutions[0].x_left] + [s.x_right for s in solutions]
    return SlabGeometry(edges=np.array(edges),
                        materials=tuple(f"r{i}" for i in range(len(solutions))))


def solve_fixed_source(geometry: SlabGeometry, spectra, source: SourceField,
                       quad: QuadratureSet):
    """Assemble, solve, and wrap the per-region solutions (no evaluation)."""
    works = _region_works(geometry, spectra, source, quad)
    system = _assemble(works, geometry, quad)
    alphas = solve_alpha(system)
    return _solutions_from_alphas(works, alphas), works


def fixed_source_solve(geometry: SlabGeometry, spectra, source: SourceField,
                       quad: QuadratureSet) -> FluxField:
    """Full fixed-source solve evaluated at the source-cell centers."""
    solutions, works = solve_fixed_source(geometry, spectra, source, quad)
    mesh = source.mesh
    centers = mesh.centers
    ng = works[0].spec.size
    psi = np.zeros((centers.size, ng))
    for r, (sol, work) in enumerate(zip(solutions, works)):
        cells = mesh.cells_of_region(r)
        psi[cells] = work.evaluate(sol.alpha, centers[cells] - sol.x_left).T
    return FluxField.from_psi(centers, psi, quad)
