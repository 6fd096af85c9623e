"""
Quadrature sets and problem files
=================================

Build Gauss-Legendre ordinate sets, load the shipped two-group pincell
benchmark, and poke at the pieces a solver consumes.
"""

import numpy as np

from slab_sn import builtin_problem_path, gauss_legendre, load_problem

# An S_8 quadrature: eight direction cosines on (-1, 1) with weights that
# integrate angle exactly for polynomials up to degree 15.
quad = gauss_legendre(8)
print("mu      =", np.round(quad.mu, 6))
print("weights =", np.round(quad.weight, 6))
print("sum of weights =", quad.weight.sum())

# check the advertised exactness on a few even monomials
for k in (2, 6, 14):
    print(f"integral of x^{k}: quadrature={quad.weight @ quad.mu**k:.12f} "
          f"exact={2 / (k + 1):.12f}")

# The pincell benchmark: a 30 cm two-group core between 2.5 cm water
# reflectors, vacuum on both ends.
problem = load_problem(builtin_problem_path("pincell_reflector"))
geo = problem.geometry
print("\nregions:")
for i, name in enumerate(geo.materials):
    print(f"  [{geo.edges[i]:+7.2f}, {geo.edges[i + 1]:+7.2f}] cm  {name}")
print("boundary conditions:", geo.bc_left.kind, "/", geo.bc_right.kind)

core = problem.materials["core"]
print("\ncore cross sections (cm^-1):")
print("  sigma_t    =", core.sigma_t)
print("  sigma_s    =", core.sigma_s.tolist(), " (row g' holds g' -> g)")
print("  nu_sigma_f =", core.nu_sigma_f)
print("  chi        =", core.chi)

print("\nsolver defaults: S_N order", problem.config.sn_order,
      "| fine mesh", problem.config.fine_mesh_size,
      "| tolerance", problem.config.flux_tolerance)
