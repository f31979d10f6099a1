"""Panel-based Gauss-Legendre quadrature with geometric and graded meshes.

All singular integrals in the package are computed on explicit panel
decompositions: geometric (log-spaced) ladders resolve power kernels,
and graded clusters with ratio 1/2 resolve integrable endpoint
singularities of the integrand.  Integrands are evaluated vectorized
on the full node set in one call.
"""

import numpy as np

_GL_CACHE = {}


def gauss_legendre(n):
    """Nodes and weights for n-point Gauss-Legendre on (-1, 1), cached."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def panel_nodes(edges, npts):
    """Map an n-point rule onto every panel [edges[i], edges[i+1]].

    Returns flat arrays (nodes, weights); edges must be increasing.
    """
    x, w = gauss_legendre(npts)
    lo = edges[:-1]
    hi = edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate_panels(f, edges, npts):
    """Integrate f over the panel decomposition with an n-point rule."""
    nodes, weights = panel_nodes(edges, npts)
    return float(np.dot(weights, f(nodes)))


def geometric_edges(lo, hi, per_decade):
    """Log-spaced panel edges covering [lo, hi], at least one panel."""
    if not (0.0 < lo < hi):
        raise ValueError("need 0 < lo < hi for a geometric ladder")
    n = max(1, int(np.ceil(per_decade * np.log10(hi / lo))))
    return np.geomspace(lo, hi, n + 1)


def graded_cluster(point, span, ratio=0.5, depth=48):
    """Edge values accumulating geometrically toward `point` from both sides.

    `span` sets the outermost distance of the cluster; successive edges
    approach the point with the given ratio.  The point itself is never
    an edge (the innermost gap is span * ratio**depth on each side).
    """
    d = span * ratio ** np.arange(depth + 1)
    return np.concatenate([point - d, point + d])


def build_edges(lo, hi, per_decade, cluster_points=(), cluster_depth=48,
                cluster_ratio=0.5):
    """Geometric ladder on [lo, hi] with graded clusters at interior points.

    Cluster points outside (lo, hi) are ignored.  Edges are deduplicated
    with a relative tolerance so panels never collapse.
    """
    edges = [geometric_edges(lo, hi, per_decade)]
    for p in cluster_points:
        left_room = p - lo
        right_room = hi - p
        if left_room <= 0 and right_room <= 0:
            continue
        if left_room > 0 and right_room > 0:
            span = 0.5 * min(left_room, right_room)
        else:
            span = 0.5 * max(left_room, right_room)
        if span <= 0:
            continue
        c = graded_cluster(p, span, cluster_ratio, cluster_depth)
        edges.append(c[(c > lo) & (c < hi)])
    e = np.unique(np.concatenate(edges))
    keep = np.ones(len(e), dtype=bool)
    gaps = np.diff(e)
    scale = np.maximum(np.abs(e[1:]), lo)
    keep[1:] = gaps > 1e-15 * scale
    e = e[keep]
    if e[-1] != hi:
        e = np.append(e, hi)
    return e


def neville_to_zero(xs, ys):
    """Polynomial extrapolation of (xs, ys) to x = 0.

    Returns (value, corrections) where corrections[k] is the change made
    by raising the polynomial degree to k; they measure convergence.
    """
    xs = np.asarray(xs, dtype=float)
    t = np.asarray(ys, dtype=float).copy()
    n = len(xs)
    corrections = []
    for k in range(1, n):
        prev = t[0]
        for i in range(n - k):
            t[i] = (xs[i + k] * t[i] - xs[i] * t[i + 1]) / (xs[i + k] - xs[i])
        corrections.append(t[0] - prev)
    return float(t[0]), corrections
