# %% [markdown]
# Monte-Carlo MISE: optimal versus comparative designs
#
# Replicate l draws from a stream derived from (seed, l), so the numbers below
# are identical on every run and for any thread count.

# %%
from seriesdesign import (DesignGrid, OrthonormalBasis, SimulationConfig, brownian, exponential,
                          model_from_name, run_mise)
from seriesdesign.design import named_design

basis = OrthonormalBasis(3, "cosine")
designs = {
    "exponential": (exponential(1.0), DesignGrid([0.0, 0.253, 0.473, 1.0])),
    "brownian": (brownian(), DesignGrid([0.0, 0.253, 0.472, 1.0])),
}

# %%
for model_name in ("4t(t-1)", "sqrt(t(1-t))"):
    model = model_from_name(model_name)
    for label, (kernel, optimal) in designs.items():
        for name, grid in (("optimal", optimal), ("comparative-n4", named_design("comparative-n4"))):
            cfg = SimulationConfig(kernel=kernel, basis=basis, model=model, design=grid, design_name=name,
                                   estimators=("shrunk", "blue", "riemann"), S=2000, seed=0)
            r = run_mise(cfg).results
            cells = "  ".join(f"{k} {v.mise:.3f}+-{v.stderr:.3f}" for k, v in r.items())
            print(f"{model_name:13s} {label:12s} {name:15s} {cells}")
