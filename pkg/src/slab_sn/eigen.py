"""Power iteration over either fixed-source solver, with optional Wielandt shift.

Each outer iteration treats the fission term as a piecewise-constant
external source

    Q(x) = (1/k - 1/k_e) * chi_g / 2 * sum_g' nu_sigma_f[g'] phi_g'(x)

(1/k_e == 0 without a shift), solves the fixed-source problem, re-evaluates
the fission production on the source-mesh centers, and updates k from the
ratio of successive production integrals.  With a shift the chi nu-fission
/ k_e part of the production is folded into the transport operator itself:
the analytic solver assembles its matrices with fission_scale = 1/k_e and
the sweep solver adds it to the iterated scattering source.

Convergence is declared when the L2 norm of the change in the renormalized
fine-mesh scalar flux (per-group concatenated) drops below the tolerance.
"""

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analytic import fixed_source_solve
from .exceptions import (MaxOuterIterationsError, NonpositiveIntegralError,
                         ShiftAtEigenvalueError, ValidationError, ZeroFluxError)
from .mesh import FineMesh, FluxField, SourceField, build_fine_mesh
from .model import (QuadratureSet, SlabGeometry, SolverConfig, gauss_legendre,
                    validate_problem)
from .spectral import assemble_A, block_diagonalize
from .sweep import source_iteration

SHIFT_GUARD = 1e-12


@dataclass(frozen=True)
class FissionSourceState:
    """Fission source for one outer iteration plus its bookkeeping."""

    source: SourceField
    production: np.ndarray        # per-cell production density
    production_integral: float
    k: float
    ke: Optional[float]


@dataclass(frozen=True)
class EigenResult:
    """Converged eigenpair with per-iteration history.

    history_seconds is cumulative wall time of the iteration loop; one-time
    setup (eigensystem construction, mesh build) is reported separately in
    timing["setup_seconds"].
    """

    k_eff: float
    iterations: int
    flux: FluxField
    history_k: np.ndarray
    history_norm: np.ndarray
    history_seconds: np.ndarray
    timing: dict
    solver_kind: str
    sn_order: int
    ke: Optional[float]
    tolerance: float
    mesh_size: int
    inner_sweeps: int = 0


def _per_cell(geometry: SlabGeometry, materials, mesh: FineMesh, attr: str) -> np.ndarray:
    table = np.vstack([getattr(materials[name], attr) for name in geometry.materials])
    return table[mesh.region_of_cell]


def _production_density(flux: FluxField, geometry, materials, mesh) -> np.ndarray:
    nusf = _per_cell(geometry, materials, mesh, "nu_sigma_f")
    return np.sum(flux.phi * nusf, axis=1)


def _source_from_production(production, geometry, materials, mesh, quad,
                            k: float, ke: Optional[float]) -> FissionSourceState:
    if ke is None:
        prefactor = 1.0 / k
    else:
        prefactor = 1.0 / k - 1.0 / ke
        if abs(prefactor) < SHIFT_GUARD:
            raise ShiftAtEigenvalueError(
                f"shift k_e={ke} coincides with the current k estimate {k}; "
                "move k_e away from the converged eigenvalue")
    chi = _per_cell(geometry, materials, mesh, "chi")
    emission = prefactor * chi * production[:, None]
    source = SourceField.isotropic(mesh, emission, quad.n)
    integral = float(np.sum(production * mesh.widths))
    return FissionSourceState(source=source, production=production,
                              production_integral=integral, k=k, ke=ke)


def fission_source(flux: FluxField, geometry: SlabGeometry, materials,
                   mesh: FineMesh, quad: QuadratureSet, k: float,
                   ke: Optional[float] = None) -> SourceField:
    """Fission source built from fluxes evaluated on the source-mesh centers."""
    if not k > 0.0:
        raise ValidationError(f"k must be positive, got {k}")
    production = _production_density(flux, geometry, materials, mesh)
    return _source_from_production(production, geometry, materials, mesh,
                                   quad, k, ke).source


def update_keff(prev_k: float, ke: Optional[float], integral_prev: float,
                integral_new: float) -> float:
    """Eigenvalue update from the ratio of successive production integrals.

    Without a shift: k <- k * new / prev.  With a shift the same update is
    applied to the shifted-operator eigenvalue, 1/k - 1/k_e, which reduces
    to the unshifted formula as k_e -> infinity.
    """
    for label, val in (("previous", integral_prev), ("new", integral_new)):
        if not np.isfinite(val) or val <= 0.0:
            raise NonpositiveIntegralError(f"{label} fission integral is {val!r}")
    if ke is None:
        return prev_k * integral_new / integral_prev
    inv = 1.0 / ke + (1.0 / prev_k - 1.0 / ke) * (integral_prev / integral_new)
    if inv <= 0.0:
        raise NonpositiveIntegralError(
            f"shifted eigenvalue update produced 1/k = {inv!r}; k_e is below the eigenvalue")
    return 1.0 / inv


def normalize(flux: FluxField, mesh: FineMesh) -> FluxField:
    """Scale so the summed group integrals of the scalar flux equal one."""
    total = float(np.sum(flux.phi * mesh.widths[:, None]))
    if not np.isfinite(total) or total == 0.0:
        raise ZeroFluxError("flux integrates to zero; cannot normalize")
    return flux.scaled(1.0 / total)


def _initial_production(geometry, materials, mesh, kind: str) -> np.ndarray:
    fissile = np.array([materials[name].fissile for name in geometry.materials])
    mask = fissile[mesh.region_of_cell]
    if kind == "flat":
        p = np.ones(mesh.n_cells)
    else:
        p = np.abs(mesh.centers)
    return np.where(mask, p, 0.0)


def power_iteration(geometry: SlabGeometry, materials, config: SolverConfig) -> EigenResult:
    """Eigenvalue power iteration over the configured fixed-source solver."""
    t_setup = time.perf_counter()
    validate_problem(geometry, materials, config)
    if not any(materials[name].fissile for name in geometry.materials):
        raise ValidationError("eigenvalue problem needs at least one fissile region")
    quad = gauss_legendre(config.sn_order)
    mesh = build_fine_mesh(geometry, config.fine_mesh_size)
    ke = config.ke
    spectra = None
    if config.solver_kind == "analytic":
        fission_scale = 0.0 if ke is None else 1.0 / ke
        spectra = {name: block_diagonalize(assemble_A(materials[name], quad, fission_scale))
                   for name in set(geometry.materials)}
    setup_seconds = time.perf_counter() - t_setup

    production = _initial_production(geometry, materials, mesh, config.initial_source)
    integral_prev = float(np.sum(production * mesh.widths))
    k = 1.0
    tol = config.flux_tolerance
    phi_prev = None
    sweep_flux = None
    inner_total = 0
    history_k, history_norm, history_seconds = [], [], []

    t_loop = time.perf_counter()
    for outer in range(1, config.max_outer + 1):
        state = _source_from_production(production, geometry, materials, mesh,
                                        quad, k, ke)
        if config.solver_kind == "analytic":
            flux = fixed_source_solve(geometry, spectra, state.source, quad)
        else:
            raw, sweeps = source_iteration(
                geometry, materials, mesh, quad, state.source.q, tol / 2.0,
                flux0=sweep_flux, ke=ke, max_inner=config.max_inner,
                scheme=config.sweep_scheme)
            sweep_flux = raw
            inner_total += sweeps
            flux = FluxField.from_psi(mesh.centers, raw, quad)

        production = _production_density(flux, geometry, materials, mesh)
        integral_new = float(np.sum(production * mesh.widths))
        k = update_keff(k, ke, integral_prev, integral_new)
        integral_prev = integral_new

        total = float(np.sum(flux.phi * mesh.widths[:, None]))
        if total == 0.0:
            raise ZeroFluxError("scalar flux vanished during power iteration")
        phi_shape = flux.phi / total
        change = np.inf if phi_prev is None else float(np.linalg.norm(phi_shape - phi_prev))
        phi_prev = phi_shape

        history_k.append(k)
        history_norm.append(change)
        history_seconds.append(time.perf_counter() - t_loop)
        if change < tol:
            break
    else:
        raise MaxOuterIterationsError(
            f"power iteration did not reach {tol} in {config.max_outer} outer "
            f"iterations (last change {history_norm[-1]:.3e})")

    if config.normalization == "total_scalar_flux_one":
        flux = normalize(flux, mesh)
    return EigenResult(
        k_eff=k,
        iterations=outer,
        flux=flux,
        history_k=np.array(history_k),
        history_norm=np.array(history_norm),
        history_seconds=np.array(history_seconds),
        timing={"setup_seconds": setup_seconds,
                "iteration_seconds": history_seconds[-1]},
        solver_kind=config.solver_kind,
        sn_order=config.sn_order,
        ke=ke,
        tolerance=tol,
        mesh_size=mesh.n_cells,
        inner_sweeps=inner_total,
    )
