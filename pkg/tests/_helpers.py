"""Shared builders and independent oracles used across the test modules."""

import numpy as np

from slab_sn import (BoundaryCondition, MaterialXS, SlabGeometry,
                     BlockSpectrum, ComplexPairBlock, RealBlock)


def legendre_and_deriv(n, x):
    """P_n(x) and P_n'(x) via the three-term recurrence."""
    p0, p1 = 1.0, x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    return p1, n * (x * p1 - p0) / (x * x - 1.0)


def gauss_legendre_newton(n):
    """Independent Gauss-Legendre rule: Newton iteration on P_n."""
    roots = []
    for i in range(1, n + 1):
        x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
        for _ in range(100):
            p, dp = legendre_and_deriv(n, x)
            step = p / dp
            x -= step
            if abs(step) < 1e-15:
                break
        roots.append(x)
    roots = np.array(sorted(roots))
    weights = np.empty(n)
    for i, r in enumerate(roots):
        _, dp = legendre_and_deriv(n, r)
        weights[i] = 2.0 / ((1.0 - r * r) * dp * dp)
    return roots, weights


def one_group_material(name="m", sigma_t=1.0, sigma_s=0.0, nu_sigma_f=0.0):
    chi = [1.0] if nu_sigma_f > 0 else [0.0]
    return MaterialXS(name=name, sigma_t=[sigma_t], sigma_s=[[sigma_s]],
                      nu_sigma_f=[nu_sigma_f], chi=chi)


def absorber_problem(sigma_t=1.0, length=4.0, bc_left=None, bc_right=None):
    geo = SlabGeometry(
        edges=np.array([0.0, length]), materials=("abs",),
        bc_left=bc_left or BoundaryCondition.vacuum(),
        bc_right=bc_right or BoundaryCondition.vacuum())
    return geo, {"abs": one_group_material("abs", sigma_t=sigma_t)}


def absorber_psi(x, mu, sigma_t, q, length):
    """Closed-form angular flux of a vacuum-bounded pure absorber with a
    constant per-ordinate source q: (q/sigma_t)(1 - exp(-sigma_t d / |mu|))
    with d the distance to the inflow boundary."""
    d = np.where(mu > 0, x, length - x)
    return (q / sigma_t) * (1.0 - np.exp(-sigma_t * d / np.abs(mu)))


def random_spectrum(rng, n, zero_block=False, max_rate=3.0):
    """Well-conditioned random block system; returns (A, BlockSpectrum ref).

    Built from known blocks and a controlled-conditioning P, so A is
    guaranteed diagonalizable with eigenvector condition around 10.
    """
    blocks = []
    cols = 0
    if zero_block:
        blocks.append(RealBlock(0.0))
        cols += 1
    while cols < n:
        if n - cols >= 2 and rng.random() < 0.5:
            blocks.append(ComplexPairBlock(rng.uniform(-max_rate, max_rate),
                                           rng.uniform(0.1, max_rate)))
            cols += 2
        else:
            blocks.append(RealBlock(rng.uniform(-max_rate, max_rate)))
            cols += 1
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    p = q * rng.uniform(0.5, 2.0, size=n)[None, :]
    spec = BlockSpectrum(P=p, P_inv=np.linalg.inv(p), blocks=tuple(blocks))
    return p @ spec.B @ np.linalg.inv(p), spec


def faddeev_leverrier(a):
    """Characteristic polynomial coefficients via trace recursion
    (independent of any eigensolver)."""
    n = a.shape[0]
    coeffs = [1.0]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.array(coeffs)
