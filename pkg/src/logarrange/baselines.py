"""Reference orderings and cost-ratio reports."""
from __future__ import annotations

import numpy as np

from .arrangement import beta, cost, from_order
from .exceptions import ValidationError
from .validation import check_same_nodes

__all__ = ["BASELINES", "baseline", "compare"]

BASELINES = ("natural", "random", "reverse")


def baseline(g, kind="natural", seed=0):
    """Natural (input order), reverse, or seeded uniformly random arrangement.

    The random permutation comes from ``numpy.random.default_rng(seed)``
    (PCG64), so it is reproducible across runs and platforms.
    """
    if kind == "natural":
        order = np.arange(g.n)
    elif kind == "reverse":
        order = np.arange(g.n)[::-1]
    elif kind == "random":
        order = np.random.default_rng(seed).permutation(g.n)
    else:
        raise ValidationError(f"unknown baseline {kind!r}; choose from {BASELINES}")
    return from_order(order, g.volumes)


def compare(g, arrangements, solver="solver"):
    """Cost and bits-per-link of each arrangement plus ``solver``'s ratio to the best other one.

    Parameters
    ----------
    g : Graph
    arrangements : mapping of name to Arrangement
        Must contain at least two entries, one of them named ``solver``.
    """
    if len(arrangements) < 2:
        raise ValidationError("compare() needs at least two arrangements")
    if solver not in arrangements:
        raise ValidationError(f"no arrangement named {solver!r}")
    check_same_nodes(g, *arrangements.values())
    rows = {}
    for name, a in arrangements.items():
        c = cost(g, a)
        rows[name] = {"cost": c, "beta": beta(g, a) if g.total_weight > 0 else 0.0}
    others = {k: v["cost"] for k, v in rows.items() if k != solver}
    best = min(others, key=others.get)
    num, den = rows[solver]["cost"], others[best]
    if den == 0:
        ratio = 1.0 if num == 0 else float("inf")
    else:
        ratio = num / den
    return {"arrangements": rows, "best_baseline": best, "ratio": ratio}
