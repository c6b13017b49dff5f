# %% [markdown]
# Estimating the regression function from a handful of correlated observations

# %%
import numpy as np

from seriesdesign import (DesignGrid, OrthonormalBasis, Sample, SeriesEstimator, brownian, estimate_functions,
                          exponential, fourier_coefficients, model_from_name, riemann_estimate, sample_gp)

basis = OrthonormalBasis(3, "cosine")
f = model_from_name("4t(t-1)")
print("true coefficients:", fourier_coefficients(basis, f).round(4))

# %%
kernel = exponential(1.0)
design = DesignGrid([0.0, 0.25, 0.52, 1.0])
est = SeriesEstimator(kernel, basis, design)
y = sample_gp(kernel, f, design, np.random.default_rng(42))
res = est.estimate(y)
print("observations:   ", y.round(3))
print("unbiased:       ", res.theta_blue.round(3))
print(f"shrunk (x{res.shrink_factor:.3f}):", res.theta_shrunk.round(3))
print("Riemann sum:    ", riemann_estimate(Sample(design, y), basis).round(3))

# %%
fhat, fcheck = estimate_functions(res, basis)
t = np.linspace(0, 1, 6)
print(np.column_stack([t, f(t), fhat(t), fcheck(t)]).round(3))

# %% [markdown]
# Under Brownian errors Y(0) carries no noise.  The constant coefficient is
# then read off Y(0) and the rest comes from the increments.

# %%
bm_design = DesignGrid([0.0, 0.25, 0.47, 1.0])
bm_est = SeriesEstimator(brownian(), basis, bm_design)
noiseless = np.sqrt(2) * np.cos(2 * np.pi * bm_design.points)
print("noiseless phi_2 recovered as", bm_est.blue(noiseless).round(12))
y = sample_gp(brownian(), f, bm_design, np.random.default_rng(1))
print(bm_est.estimate(y))
