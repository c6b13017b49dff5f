# %% [markdown]
# Kernels and the continuous-time oracle
#
# A triangular kernel is fixed by two functions u and v: K(s, t) = u(s) v(t) for s <= t.
# The exponential kernel exp(-L|s-t|) and Brownian motion min(s, t) are built in.

# %%
import numpy as np

from seriesdesign import (brownian, constant, covariance, exponential, model_from_name, oracle_measure,
                          oracle_mise, q_funcs, tsybakov_comparison, validate, verify_optimality)

ou = exponential(1.0)
bm = brownian()
print("K(0.2, 0.5), exponential L=1:", covariance(ou, 0.2, 0.5))
print("K(0.3, 0.7), Brownian:       ", covariance(bm, 0.3, 0.7))

# %%
# q = u / v is the time change that turns the error process into a Brownian motion
t = np.linspace(0, 1, 5)
q, dq, _ = q_funcs(ou, t)
print("q(t) =", q.round(4), " q'(t) =", dq.round(4))
print(validate(bm))

# %% [markdown]
# The oracle measure: atoms at 0 and 1 plus a density.  For Brownian errors and
# f(t) = 4t(t-1) everything is available in closed form: c = 16/3, P1 = f'(1) = 4, p = -f'' = -8.

# %%
f = model_from_name("4t(t-1)")
m = oracle_measure(bm, f)
print(f"case {m.case}: c = {m.c:.6f}, P0 = {m.P0}, P1 = {m.P1:.6f}, p(0.5) = {float(m.p(0.5)):.6f}")
print("oracle MISE:", oracle_mise(bm, f), " 8/95 =", 8 / 95)
print("optimality residual on 101 points:", verify_optimality(m, bm, f, np.linspace(0, 1, 101)))

# %%
m1 = oracle_measure(ou, constant(1.0))
print(f"exponential L=1, f = 1: c = {m1.c}, P0 = {m1.P0}, P1 = {m1.P1}, p = {float(m1.p(0.3))}")

# %% [markdown]
# Estimating all coefficients jointly beats estimating them one at a time.

# %%
for theta_bar in ([1.0], [1.0, 1.0], [0.5, 2.0, 0.1]):
    star, tilde = tsybakov_comparison(theta_bar)
    print(theta_bar, f"joint {star:.4f} <= coordinatewise {tilde:.4f}")
