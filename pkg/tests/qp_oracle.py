"""Independent projected-gradient solver for the SVM duals.

Used by the tests as an oracle against the SMO path: it solves

    minimize 0.5 * b'Qb + p'b   s.t.  sum(s*b) = 0,  0 <= b <= C

by accelerated projected gradient descent. The projection onto the
box-intersect-hyperplane set is computed exactly via the scalar Lagrange
multiplier of the equality constraint: the constraint value is a piecewise
linear nonincreasing function of the multiplier, so its root sits between
two of the 2m clip breakpoints and is found by direct evaluation. Nothing
here shares code with the SMO implementation.
"""

from __future__ import annotations

import numpy as np


def project_box_hyperplane(v: np.ndarray, s: np.ndarray, c: float) -> np.ndarray:
    """Euclidean projection of v onto {b: 0 <= b <= c, sum(s*b) = 0} with
    s in {-1, +1}; requires both signs present."""
    # entries clip at 0 or c where mu crosses these values
    bps = np.concatenate([s * v, s * v - s * c])
    bps.sort()
    # h(mu) = s . clip(v - mu*s, 0, c) is nonincreasing piecewise linear
    clipped = np.clip(v[None, :] - bps[:, None] * s[None, :], 0.0, c)
    h = clipped @ s
    k = int(np.searchsorted(-h, 0.0))  # first index with h <= 0
    if k == 0:
        mu = bps[0]
    elif k == len(bps):
        mu = bps[-1]
    else:
        h0, h1 = h[k - 1], h[k]
        mu0, mu1 = bps[k - 1], bps[k]
        mu = mu0 if h0 == h1 else mu0 + (mu1 - mu0) * h0 / (h0 - h1)
    return np.clip(v - mu * s, 0.0, c)


def solve_qp(
    q: np.ndarray,
    p: np.ndarray,
    s: np.ndarray,
    c: float,
    max_iter: int = 30_000,
    residual_tol: float = 1e-11,
    stall_limit: int = 400,
) -> np.ndarray:
    """FISTA-style accelerated projected gradient with monotone restarts.

    Stops when the projected-gradient fixed-point residual at the incumbent
    falls below residual_tol (scaled by c), when the incumbent objective has
    not improved for stall_limit iterations, or on iteration exhaustion.
    """
    m = len(p)
    eigmax = float(np.linalg.eigvalsh(q)[-1]) if m else 1.0
    step = 1.0 / max(eigmax, 1e-12)
    stop = residual_tol * max(1.0, c)

    def objective(b):
        return 0.5 * float(b @ q @ b) + float(p @ b)

    def fixed_point_residual(b):
        proj = project_box_hyperplane(b - step * (q @ b + p), s, c)
        return float(np.max(np.abs(proj - b)))

    beta = project_box_hyperplane(np.zeros(m), s, c)
    momentum = beta.copy()
    t_acc = 1.0
    best = beta.copy()
    best_obj = objective(beta)
    stall = 0
    for _ in range(max_iter):
        grad = q @ momentum + p
        nxt = project_box_hyperplane(momentum - step * grad, s, c)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_acc * t_acc))
        momentum = nxt + ((t_acc - 1.0) / t_next) * (nxt - beta)
        moved = float(np.max(np.abs(nxt - beta)))
        beta, t_acc = nxt, t_next

        obj = objective(beta)
        if obj < best_obj:
            best_obj = obj
            best = beta.copy()
            stall = 0
        else:
            stall += 1
            if stall % 60 == 0:  # restart momentum at the incumbent
                momentum = best.copy()
                t_acc = 1.0
            if stall >= stall_limit:
                break

        if moved < stop and fixed_point_residual(best) < stop:
            break
    return best


def svc_dual_matrices(x, y, kernel_fn):
    """Q and p of the classification dual in minimization form."""
    k = kernel_fn(x, x)
    q = (y[:, None] * y[None, :]) * k
    return q, -np.ones(len(y)), y.astype(float)


def svr_dual_matrices(x, y, epsilon, kernel_fn):
    """Q, p and the sign vector of the 2n-variable tube dual."""
    k = kernel_fn(x, x)
    q = np.block([[k, -k], [-k, k]])
    p = np.concatenate([epsilon - y, epsilon + y])
    s = np.concatenate([np.ones(len(y)), -np.ones(len(y))])
    return q, p, s


def svc_objective_max(alpha, q):
    """Maximization-form dual value for classification multipliers."""
    return float(alpha.sum()) - 0.5 * float(alpha @ q @ alpha)


def svr_objective_max(theta, kmat, y, epsilon):
    """Maximization-form dual value as a function of net coefficients."""
    return (
        -0.5 * float(theta @ kmat @ theta)
        - epsilon * float(np.abs(theta).sum())
        + float(y @ theta)
    )
