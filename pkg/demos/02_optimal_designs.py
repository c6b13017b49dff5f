# %% [markdown]
# Optimal sampling designs
#
# With n observations at 0 = t1 < ... < tn = 1 the discretization loss of the
# best linear estimator is driven by tr(M B^- M), where M is the continuous-time
# information matrix and B its discrete counterpart.

# %%
import numpy as np

from seriesdesign import (DesignGrid, OrthonormalBasis, PsoConfig, brownian, build_M, criterion, exponential,
                          optimize_design)
from seriesdesign.design import moment_matrices, optimal_weights, psi

basis = OrthonormalBasis(3, "cosine")
print("M for Brownian errors (expect diag(0, 4 pi^2, 16 pi^2)):")
print(build_M(brownian(), basis).round(6))

# %%
# B approaches M as the grid is refined, so the criterion tends to tr(M)
for n in (5, 21, 201):
    print(n, criterion(brownian(), basis, DesignGrid.equidistant(n)), 20 * np.pi**2)

# %% [markdown]
# Particle swarm search over the interior points.  Each run is deterministic
# given its seed.

# %%
for kernel in (exponential(1.0), exponential(5.0), brownian()):
    for n in (4, 7):
        grid, value = optimize_design(kernel, basis, n, PsoConfig(seed=0))
        print(f"{kernel.name:12s} {kernel.params!s:8s} n={n}: {grid.points.round(3)}  criterion {value:.3f}")

# %% [markdown]
# At the optimum the weights gamma_i = M B^- beta_i satisfy the unbiasedness
# constraint sum gamma_i beta_i^T = M, and the loss equals criterion - tr(M).

# %%
d = DesignGrid([0.0, 0.25, 0.52, 1.0])
mm = moment_matrices(exponential(1.0), basis, d)
w = optimal_weights(mm.M, mm.betas, mm.B_ginv, d, exponential(1.0))
print("constraint residual:", np.abs(w.gammas.T @ mm.betas - mm.M).max())
print("loss:", psi(w.gammas, mm.M), " criterion - tr M:", criterion(exponential(1.0), basis, d) - np.trace(mm.M))
