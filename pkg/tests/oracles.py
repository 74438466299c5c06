"""Independent reference implementations used to check the real ones.

Everything here is deliberately written in plain Python (loops, the
``statistics`` module, ``math``) so that agreement with the vectorized
package code is meaningful.  Keep this module free of amsdetect imports.
"""

from __future__ import annotations

import math
import statistics


def exhaustive_two_means(points):
    """Globally optimal 2-partition by SSE, by trying every partition.

    :param points: sequence of scalars or equal-length tuples, len <= 20
    :returns: (best_sse, labels) with labels[i] in {0, 1}; label 0 goes to
        the group whose mean has the smaller first coordinate
    """
    pts = [tuple(p) if hasattr(p, "__len__") else (float(p),) for p in points]
    n = len(pts)
    if n < 2:
        raise ValueError("need at least two points")
    dims = len(pts[0])
    best_sse = math.inf
    best_mask = None
    # point 0 pinned to group 0 halves the search space
    for mask in range(1, 2 ** (n - 1)):
        groups = ([], [])
        groups[0].append(pts[0])
        for i in range(1, n):
            groups[(mask >> (i - 1)) & 1].append(pts[i])
        if not groups[1]:
            continue
        sse = 0.0
        for g in groups:
            cent = [sum(p[d] for p in g) / len(g) for d in range(dims)]
            sse += sum((p[d] - cent[d]) ** 2 for p in g for d in range(dims))
        if sse < best_sse:
            best_sse = sse
            best_mask = mask
    labels = [0] + [(best_mask >> (i - 1)) & 1 for i in range(1, n)]
    mean0 = sum(pts[i][0] for i in range(n) if labels[i] == 0) / labels.count(0)
    mean1 = sum(pts[i][0] for i in range(n) if labels[i] == 1) / labels.count(1)
    if mean1 < mean0:
        labels = [1 - l for l in labels]
    return best_sse, labels


def em_step(points, weights, means, variances, var_floor=1e-8):
    """One EM iteration for a diagonal-covariance Gaussian mixture.

    :returns: (loglik_at_input_params, new_weights, new_means, new_variances)
    """
    pts = [tuple(p) if hasattr(p, "__len__") else (float(p),) for p in points]
    n, d, k = len(pts), len(pts[0]), len(weights)
    log2pi = math.log(2.0 * math.pi)
    resp = [[0.0] * k for _ in range(n)]
    loglik = 0.0
    for i, p in enumerate(pts):
        comp = []
        for c in range(k):
            s = math.log(weights[c])
            for j in range(d):
                v = variances[c][j]
                s -= 0.5 * (log2pi + math.log(v) + (p[j] - means[c][j]) ** 2 / v)
            comp.append(s)
        mx = max(comp)
        total = mx + math.log(sum(math.exp(s - mx) for s in comp))
        loglik += total
        for c in range(k):
            resp[i][c] = math.exp(comp[c] - total)
    nj = [sum(resp[i][c] for i in range(n)) for c in range(k)]
    new_w = [nj[c] / n for c in range(k)]
    new_mu = [[sum(resp[i][c] * pts[i][j] for i in range(n)) / nj[c]
               for j in range(d)] for c in range(k)]
    new_var = [[max(sum(resp[i][c] * (pts[i][j] - new_mu[c][j]) ** 2
                        for i in range(n)) / nj[c], var_floor)
                for j in range(d)] for c in range(k)]
    return loglik, new_w, new_mu, new_var


def selection_trace(values, mu_k, sigma_k, sigma_scope="global"):
    """Reference walk for the interval-mean centroid selection rule.

    Mirrors the documented semantics step by step with explicit loops:
    for each side, walk i = 1..4, take the first i minimizing the gap
    between the cluster-mean walk (inward by its own sigma) and the
    global-mean walk (outward by the global sigma), bound the averaging
    interval with (i + 1) steps of the scope sigma, and average the values
    inside; an empty or inverted interval falls back to the cluster mean.

    :returns: dict(low, high, m_l, m_g, low_fallback, high_fallback)
    """
    xs = [float(v) for v in values]
    mu = statistics.fmean(xs)
    sigma = statistics.pstdev(xs)
    mk0, mk1 = float(mu_k[0]), float(mu_k[1])
    sk0, sk1 = float(sigma_k[0]), float(sigma_k[1])
    if mk1 < mu or mk0 > mu:
        raise ValueError("degenerate: cluster means on one side of the mean")

    out = {"low": mk0, "high": mk1, "m_l": 1, "m_g": 1,
           "low_fallback": True, "high_fallback": True}

    if mk0 < mu:
        gaps = []
        for i in (1, 2, 3, 4):
            gaps.append(abs((mk0 + i * sk0) - (mu - i * sigma)))
        best, m = gaps[0], 1
        for i in (2, 3, 4):
            if gaps[i - 1] < best:
                best, m = gaps[i - 1], i
        out["m_l"] = m
        step = sigma if sigma_scope == "global" else sk0
        lo_bound = mk0 + (m + 1) * step
        if lo_bound <= mu:
            inside = [v for v in xs if lo_bound <= v <= mu]
            if inside:
                out["low"] = statistics.fmean(inside)
                out["low_fallback"] = False

    if mk1 > mu:
        gaps = []
        for i in (1, 2, 3, 4):
            gaps.append(abs((mk1 - i * sk1) - (mu + i * sigma)))
        best, m = gaps[0], 1
        for i in (2, 3, 4):
            if gaps[i - 1] < best:
                best, m = gaps[i - 1], i
        out["m_g"] = m
        step = sigma if sigma_scope == "global" else sk1
        hi_bound = mk1 - (m + 1) * step
        if hi_bound >= mu:
            inside = [v for v in xs if mu <= v <= hi_bound]
            if inside:
                out["high"] = statistics.fmean(inside)
                out["high_fallback"] = False

    return out


def straight_line_fit(values):
    """Least-squares slope of values against their 0-based index."""
    n = len(values)
    xs = list(range(n))
    xbar = statistics.fmean(xs)
    ybar = statistics.fmean(values)
    num = sum((x - xbar) * (y - ybar) for x, y in zip(xs, values))
    den = sum((x - xbar) ** 2 for x in xs)
    return num / den
