"""Published reference values that ``reproduce-paper`` compares against."""

# kernel label -> n -> full design
DESIGNS = {
    "exponential-L1": {4: (0.0, 0.25, 0.52, 1.0), 7: (0.0, 0.12, 0.27, 0.45, 0.57, 0.77, 1.0)},
    "exponential-L5": {4: (0.0, 0.25, 0.51, 1.0), 7: (0.0, 0.12, 0.27, 0.45, 0.57, 0.76, 1.0)},
    "brownian": {4: (0.0, 0.25, 0.47, 1.0), 7: (0.0, 0.22, 0.28, 0.50, 0.72, 0.78, 1.0)},
}

# (kernel label, model, n, design kind, estimator) -> simulated MISE, S = 1000
_ORDER = [("optimal", 4), ("comparative", 4), ("optimal", 7), ("comparative", 7)]
_ROWS = {
    "exponential-L1": {
        ("4t(t-1)", "shrunk"): (1.72, 2.06, 1.58, 1.59),
        ("4t(t-1)", "blue"): (1.89, 2.22, 1.76, 1.77),
        ("sqrt(t(1-t))", "shrunk"): (1.67, 2.04, 1.54, 1.56),
        ("sqrt(t(1-t))", "blue"): (1.89, 2.21, 1.76, 1.79),
    },
    "exponential-L5": {
        ("4t(t-1)", "shrunk"): (0.65, 2.13, 0.47, 0.51),
        ("4t(t-1)", "blue"): (0.77, 2.30, 0.58, 0.62),
        ("sqrt(t(1-t))", "shrunk"): (0.64, 2.09, 0.43, 0.43),
        ("sqrt(t(1-t))", "blue"): (0.81, 2.30, 0.59, 0.59),
    },
    "brownian": {
        ("4t(t-1)", "shrunk"): (0.16, 0.41, 0.13, 0.14),
        ("4t(t-1)", "blue"): (0.15, 0.43, 0.12, 0.12),
        ("sqrt(t(1-t))", "shrunk"): (0.13, 0.45, 0.11, 0.11),
        ("sqrt(t(1-t))", "blue"): (0.15, 0.48, 0.12, 0.13),
    },
}

MISE = {
    (label, model, n, kind, est): value
    for label, rows in _ROWS.items()
    for (model, est), values in rows.items()
    for (kind, n), value in zip(_ORDER, values)
}

KERNELS = {
    "exponential-L1": {"type": "exponential", "L": 1.0},
    "exponential-L5": {"type": "exponential", "L": 5.0},
    "brownian": {"type": "brownian"},
}
