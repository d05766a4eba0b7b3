"""Refining composite-trapezoid quadrature (1D radial and tensorized 2D)."""

from __future__ import annotations

import numpy as np


class QuadratureError(RuntimeError):
    """Successive refinements failed to agree to the requested tolerance."""


def trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    w = np.empty_like(nodes)
    w[0] = 0.5 * (nodes[1] - nodes[0])
    w[-1] = 0.5 * (nodes[-1] - nodes[-2])
    w[1:-1] = 0.5 * (nodes[2:] - nodes[:-2])
    return w


def tensor_trapezoid(f, t_nodes: np.ndarray, r_nodes: np.ndarray, chunk: int = 256) -> float:
    """Trapezoid in t x r of a broadcasting integrand f(t, r); rows chunked for memory."""
    wr = trapezoid_weights(r_nodes)
    row_sums = np.empty(t_nodes.size)
    rr = r_nodes[None, :]
    for i0 in range(0, t_nodes.size, chunk):
        tt = t_nodes[i0:i0 + chunk, None]
        row_sums[i0:i0 + chunk] = f(tt, rr) @ wr
    return float(trapezoid_weights(t_nodes) @ row_sums)


def _refine(values, tol: float, max_levels: int, what: str) -> float:
    """Drive node-doubling until successive Richardson extrapolates agree to tol.

    `values` yields the raw trapezoid value per level; the returned value is
    the Richardson second column (error O(h^4) for smooth integrands), which
    typically settles several doublings before the raw trapezoid does.
    """
    trap_prev = rich_prev = None
    for level in range(max_levels):
        val = values(level)
        if trap_prev is not None:
            rich = (4.0 * val - trap_prev) / 3.0
            if rich_prev is not None:
                scale = max(abs(rich), abs(rich_prev), 1e-300)
                if abs(rich - rich_prev) <= tol * scale:
                    return rich
            rich_prev = rich
        trap_prev = val
    raise QuadratureError(f"{what} quadrature did not converge to {tol} in {max_levels} levels")


def refine_1d(f, nodes_for_level, tol: float = 1e-6, max_levels: int = 14) -> float:
    def value(level):
        nodes = nodes_for_level(level)
        return float(np.dot(trapezoid_weights(nodes), f(nodes)))

    return _refine(value, tol, max_levels, "1D")


def refine_2d(f, t_nodes_for_level, r_nodes_for_level,
              tol: float = 1e-6, max_levels: int = 9) -> float:
    def value(level):
        return tensor_trapezoid(f, t_nodes_for_level(level), r_nodes_for_level(level))

    return _refine(value, tol, max_levels, "2D")


def radial_nodes(r_lo: float, r_hi: float, count: int) -> np.ndarray:
    """{0} followed by a geometric ladder: resolves power-law and localized profiles."""
    return np.concatenate([[0.0], np.geomspace(r_lo, r_hi, count)])
