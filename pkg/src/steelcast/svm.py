"""Kernel machines trained by sequential minimal optimization.

Both duals are instances of one box-and-equality-constrained QP,

    minimize   0.5 * sum_kl b_k b_l s_k s_l K(a_k, a_l) + sum_k p_k b_k
    subject to sum_k s_k b_k = 0,   0 <= b_k <= C,

where a_k maps variable k to a data point. Classification uses one variable
per point (s = label, p = -1); epsilon-tube regression uses two (s = +1/-1,
p = eps -/+ target). The solver repeatedly picks the maximally KKT-violating
pair and solves the two-variable subproblem exactly.

Note: the RBF kernel here is exp(-||a - b||^2 / sigma_squared) with a bare
sigma_squared in the denominator. Many libraries use 2*sigma^2 or a gamma
parametrization; translate accordingly when comparing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabels, NoConvergence, ShapeError

SUPPORT_COEF_TOL = 1e-12  # |coefficient| above this makes a support vector
_DEFAULT_TOL = 1e-10  # KKT gap target; well inside the 1e-6 guarantee
_BOUND_TOL_SCALE = 1e-10


@dataclass(frozen=True)
class Kernel:
    kind: str  # linear | rbf
    sigma_squared: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf":
            if self.sigma_squared is None or not self.sigma_squared > 0:
                raise ValueError("rbf kernel needs sigma_squared > 0")


def kernel_eval(k: Kernel, a, b) -> float:
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=float)
    if av.shape != bv.shape or av.ndim != 1:
        raise ShapeError(f"kernel arguments have shapes {av.shape} and {bv.shape}")
    if k.kind == "linear":
        return float(av @ bv)
    d = av - bv
    return float(math.exp(-(d @ d) / k.sigma_squared))


def kernel_matrix(k: Kernel, x: np.ndarray, z: np.ndarray | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    z = x if z is None else np.asarray(z, dtype=float)
    if x.shape[1] != z.shape[1]:
        raise ShapeError(f"feature dims differ: {x.shape[1]} vs {z.shape[1]}")
    if k.kind == "linear":
        return x @ z.T
    sq = (
        np.sum(x * x, axis=1)[:, None]
        + np.sum(z * z, axis=1)[None, :]
        - 2.0 * (x @ z.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / k.sigma_squared)


@dataclass(frozen=True)
class SvmProblem:
    x: np.ndarray  # (n, p) feature rows
    y: np.ndarray  # (n,) targets; {-1,+1} for classification
    c: float
    epsilon: float = 0.0

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y, dtype=float)
        if x.shape[0] != y.shape[0] or y.ndim != 1:
            raise ShapeError(f"x has {x.shape[0]} rows but y has shape {y.shape}")
        if x.shape[0] < 2:
            raise ValueError("need at least 2 training points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("training data contains non-finite values")
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class SvcModel:
    support_vectors: np.ndarray
    dual_coefficients: np.ndarray  # alpha_i * y_i per support vector
    bias: float
    kernel: Kernel
    c: float
    support_indices: tuple[int, ...]


@dataclass(frozen=True)
class SvrModel:
    support_vectors: np.ndarray
    dual_coefficients: np.ndarray  # alpha_i - alpha*_i per support vector
    bias: float
    kernel: Kernel
    c: float
    epsilon: float
    support_indices: tuple[int, ...]


def _smo_solve(kmat, idx, svec, p, c, tol, max_updates):
    """SMO on the generic QP; returns (beta, h, gap_lo, gap_hi).

    The first pair member is the maximal KKT violator over the up set; the
    second is chosen among the down-set members it violates against by the
    largest second-order objective decrease (the working-set refinement of
    Fan, Chen & Lin 2005). Convergence is declared on the maximum violating
    pair: stop when gap_lo - gap_hi <= tol.

    The loop maintains h_k = -s_k * gradient_k, which is simultaneously the
    selection score and the KKT bias candidate of variable k (h is constant
    across free variables at the optimum, and the valid bias interval is
    [gap_lo, gap_hi]). Because s_k^2 = 1, a pair update changes h by a
    single scaled row difference of the variable-expanded kernel matrix. h
    is refreshed from beta before any stop is accepted, which keeps float
    drift out of the convergence decision.
    """
    m = len(p)
    kext = kmat[np.ix_(idx, idx)]  # kernel over variables, (m, m)
    kdiag = np.diag(kext)
    pos = svec > 0
    neg = ~pos
    beta = np.zeros(m)
    h = -svec * p
    up_mask = pos.copy()  # beta = 0: up iff s > 0, low iff s < 0
    low_mask = neg.copy()
    updates = 0
    since_refresh = 0
    neg_inf = -np.inf

    def exact_h():
        return -(kext @ (svec * beta)) - svec * p

    while True:
        up_vals = np.where(up_mask, h, neg_inf)
        i = int(up_vals.argmax())
        lo = up_vals[i]
        hi = float(np.where(low_mask, h, np.inf).min())

        if lo - hi <= tol:
            if since_refresh == 0:
                return beta, h, lo, hi
            h = exact_h()  # verify on an exact gradient
            since_refresh = 0
            continue

        if updates >= max_updates:
            raise NoConvergence(
                f"SMO did not reach gap {tol:g} within {max_updates} pair updates "
                f"(current gap {lo - hi:g})"
            )

        diffs = lo - h  # positive for candidates i violates against
        etas = np.maximum(kdiag[i] + kdiag - 2.0 * kext[i], 1e-12)
        gains = np.where(low_mask & (diffs > 0), diffs * diffs / etas, neg_inf)
        j = int(gains.argmax())

        step = diffs[j] / etas[j]
        cap_i = (c - beta[i]) if pos[i] else beta[i]
        cap_j = beta[j] if pos[j] else (c - beta[j])
        step = min(step, cap_i, cap_j)

        # move beta[i] by +s_i*step and beta[j] by -s_j*step; land exactly on
        # a bound when the step is capped there
        if pos[i]:
            beta[i] = c if step == cap_i else beta[i] + step
        else:
            beta[i] = 0.0 if step == cap_i else beta[i] - step
        if pos[j]:
            beta[j] = 0.0 if step == cap_j else beta[j] - step
        else:
            beta[j] = c if step == cap_j else beta[j] + step

        h -= step * (kext[i] - kext[j])
        for k in (i, j):
            interior_up = (pos[k] and beta[k] < c) or (neg[k] and beta[k] > 0)
            interior_low = (pos[k] and beta[k] > 0) or (neg[k] and beta[k] < c)
            up_mask[k] = interior_up
            low_mask[k] = interior_low

        updates += 1
        since_refresh += 1
        if since_refresh >= 1024:
            h = exact_h()
            since_refresh = 0


def _max_updates(n: int) -> int:
    return 10_000 * n


def _extract_bias(free_candidates: np.ndarray, gap_lo: float, gap_hi: float) -> float:
    if len(free_candidates):
        return float(free_candidates.mean())
    # no free multiplier: any bias in [gap_lo, gap_hi] is KKT-consistent
    if math.isinf(gap_lo) and math.isinf(gap_hi):
        return 0.0
    if math.isinf(gap_lo):
        return float(gap_hi)
    if math.isinf(gap_hi):
        return float(gap_lo)
    return 0.5 * (float(gap_lo) + float(gap_hi))


def train_svc(prob: SvmProblem, kernel: Kernel = Kernel("linear"), tol: float = _DEFAULT_TOL) -> SvcModel:
    """Soft-margin support vector classifier.

    Labels must be -1/+1 with both classes present. The returned model keeps
    only points with nonzero dual coefficient; the bias is the average over
    free support vectors, or the midpoint of the feasible bias interval when
    no multiplier is strictly inside the box.
    """
    y = prob.y
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise DegenerateLabels("classification labels must be -1 or +1")
    if np.all(y > 0) or np.all(y < 0):
        raise DegenerateLabels("need both classes present")

    n = prob.n
    kmat = kernel_matrix(kernel, prob.x)
    idx = np.arange(n)
    p = -np.ones(n)
    alpha, h, gap_lo, gap_hi = _smo_solve(kmat, idx, y, p, prob.c, tol, _max_updates(n))

    free = (alpha > 0) & (alpha < prob.c)
    bias = _extract_bias(h[free], gap_lo, gap_hi)

    coef = alpha * y
    sv = np.abs(coef) > SUPPORT_COEF_TOL
    return SvcModel(
        support_vectors=prob.x[sv].copy(),
        dual_coefficients=coef[sv].copy(),
        bias=bias,
        kernel=kernel,
        c=prob.c,
        support_indices=tuple(int(i) for i in np.flatnonzero(sv)),
    )


def train_svr(prob: SvmProblem, kernel: Kernel = Kernel("linear"), tol: float = _DEFAULT_TOL) -> SvrModel:
    """Epsilon-insensitive support vector regression.

    Trains the 2n-variable tube dual with SMO; dual coefficients of the
    returned model are alpha_i - alpha*_i.
    """
    n = prob.n
    eps = prob.epsilon
    kmat = kernel_matrix(kernel, prob.x)
    idx = np.concatenate([np.arange(n), np.arange(n)])
    svec = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([eps - prob.y, eps + prob.y])
    beta, h, gap_lo, gap_hi = _smo_solve(kmat, idx, svec, p, prob.c, tol, _max_updates(n))

    free = (beta > 0) & (beta < prob.c)
    bias = _extract_bias(h[free], gap_lo, gap_hi)

    coef = beta[:n] - beta[n:]
    sv = np.abs(coef) > SUPPORT_COEF_TOL
    return SvrModel(
        support_vectors=prob.x[sv].copy(),
        dual_coefficients=coef[sv].copy(),
        bias=bias,
        kernel=kernel,
        c=prob.c,
        epsilon=eps,
        support_indices=tuple(int(i) for i in np.flatnonzero(sv)),
    )


def decision(model, x):
    """Kernel expansion over the support vectors plus bias.

    Accepts one feature vector (returns a float) or a matrix of rows
    (returns an array).
    """
    xa = np.asarray(x, dtype=float)
    single = xa.ndim == 1
    xa = np.atleast_2d(xa)
    n_features = model.support_vectors.shape[1] if len(model.support_vectors) else xa.shape[1]
    if xa.shape[1] != n_features:
        raise ShapeError(f"expected {n_features} features, got {xa.shape[1]}")
    if len(model.support_vectors) == 0:
        out = np.full(xa.shape[0], model.bias)
    else:
        kmat = kernel_matrix(model.kernel, xa, model.support_vectors)
        out = kmat @ model.dual_coefficients + model.bias
    return float(out[0]) if single else out


def classify(model: SvcModel, x):
    """Class labels from the decision sign; f(x) == 0 maps to +1."""
    f = decision(model, x)
    if np.isscalar(f):
        return 1.0 if f >= 0 else -1.0
    return np.where(np.asarray(f) >= 0, 1.0, -1.0)


def _full_coefficients(model, n: int) -> np.ndarray:
    theta = np.zeros(n)
    for k, i in enumerate(model.support_indices):
        theta[i] = model.dual_coefficients[k]
    return theta


def dual_objective(model, prob: SvmProblem) -> float:
    """Dual objective value (maximization form) of the model on its problem."""
    kmat = kernel_matrix(model.kernel, prob.x)
    theta = _full_coefficients(model, prob.n)
    quad = 0.5 * float(theta @ kmat @ theta)
    if isinstance(model, SvcModel):
        alpha = theta * prob.y  # alpha_i = coef_i * y_i
        return float(alpha.sum()) - quad
    return -quad - model.epsilon * float(np.abs(theta).sum()) + float(prob.y @ theta)


def kkt_residual(model, prob: SvmProblem) -> float:
    """Maximum violation of feasibility and complementarity across all points.

    Zero (up to solver tolerance) certifies the dual solution; perturbing any
    coefficient of a converged model makes this grow measurably.
    """
    theta = _full_coefficients(model, prob.n)
    f = decision(model, prob.x)
    c = prob.c
    bound_tol = _BOUND_TOL_SCALE * max(1.0, c)
    # the equality constraint reads sum(theta) = 0 for both model kinds
    worst = abs(float(theta.sum()))

    if isinstance(model, SvcModel):
        alpha = theta * prob.y
        margins = prob.y * f
        for a, m in zip(alpha, margins):
            worst = max(worst, -a, a - c)
            if a <= bound_tol:
                worst = max(worst, 1.0 - m if 1.0 - m > 0 else 0.0)
            elif a >= c - bound_tol:
                worst = max(worst, m - 1.0 if m - 1.0 > 0 else 0.0)
            else:
                worst = max(worst, abs(m - 1.0))
        return float(worst)

    eps = model.epsilon
    resid = f - prob.y
    for t, r in zip(theta, resid):
        al = max(t, 0.0)  # alpha
        ast = max(-t, 0.0)  # alpha*
        worst = max(worst, al - c, ast - c)
        if al <= bound_tol and ast <= bound_tol:
            worst = max(worst, abs(r) - eps if abs(r) > eps else 0.0)
        elif al >= c - bound_tol:
            worst = max(worst, r + eps if r + eps > 0 else 0.0)
        elif ast >= c - bound_tol:
            worst = max(worst, eps - r if eps - r > 0 else 0.0)
        elif al > bound_tol:
            worst = max(worst, abs(r + eps))
        else:
            worst = max(worst, abs(r - eps))
    return float(worst)


def dumps_model(model) -> str:
    """Text serialization; floats carry 17 significant digits so the
    round-trip through loads_model is bit-exact."""

    def g(v: float) -> str:
        return format(float(v), ".17g")

    is_svr = isinstance(model, SvrModel)
    head = [
        f"steelcast-svm type={'svr' if is_svr else 'svc'}",
        f"kernel={model.kernel.kind}",
    ]
    if model.kernel.kind == "rbf":
        head.append(f"sigma_squared={g(model.kernel.sigma_squared)}")
    head.append(f"c={g(model.c)}")
    if is_svr:
        head.append(f"epsilon={g(model.epsilon)}")
    head.append(f"bias={g(model.bias)}")
    lines = [" ".join(head)]
    for k in range(len(model.dual_coefficients)):
        row = [g(model.dual_coefficients[k]), str(model.support_indices[k])]
        row += [g(v) for v in model.support_vectors[k]]
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def loads_model(text: str):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("steelcast-svm"):
        raise ValueError("not a steelcast model dump")
    fields = dict(part.split("=", 1) for part in lines[0].split()[1:])
    kind = fields["type"]
    kernel = Kernel(
        fields["kernel"],
        float(fields["sigma_squared"]) if "sigma_squared" in fields else None,
    )
    coefs, indices, rows = [], [], []
    for ln in lines[1:]:
        parts = ln.split()
        coefs.append(float(parts[0]))
        indices.append(int(parts[1]))
        rows.append([float(v) for v in parts[2:]])
    sv = np.asarray(rows, dtype=float) if rows else np.zeros((0, 0))
    coef = np.asarray(coefs, dtype=float)
    common = dict(
        support_vectors=sv,
        dual_coefficients=coef,
        bias=float(fields["bias"]),
        kernel=kernel,
        c=float(fields["c"]),
        support_indices=tuple(indices),
    )
    if kind == "svr":
        return SvrModel(epsilon=float(fields["epsilon"]), **common)
    return SvcModel(**common)
