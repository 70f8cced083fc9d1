"""Ordinary least squares with the usual summary diagnostics.

Solved by QR factorization. Rank deficiency is declared when the smallest
singular value falls below 1e-10 times the largest column norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .errors import ShapeError, SingularDesign, Underdetermined

# Display floor used by common statistical software for vanishing p-values.
P_VALUE_FLOOR = 2.2e-16

_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class DesignMatrix:
    """n x p matrix of finite regressors; flags whether column 0 is an intercept."""

    matrix: np.ndarray
    intercept_included: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ShapeError(f"design must be 2-D, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("design matrix contains non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def with_intercept(cls, *columns) -> "DesignMatrix":
        cols = [np.asarray(c, dtype=float) for c in columns]
        n = len(cols[0]) if cols else 0
        return cls(np.column_stack([np.ones(n)] + cols), intercept_included=True)


@dataclass(frozen=True)
class LinearModel:
    coefficients: tuple[float, ...]
    coefficient_std_errors: tuple[float, ...]
    residuals: tuple[float, ...]
    rse: float
    r_squared: float
    adj_r_squared: float
    f_p_value: float
    df_residual: int
    intercept_included: bool = True

    @property
    def n(self) -> int:
        return len(self.residuals)

    @property
    def p(self) -> int:
        return len(self.coefficients)

    def t_statistic(self, j: int) -> float:
        """t-ratio coefficient/std-error for column j."""
        return self.coefficients[j] / self.coefficient_std_errors[j]


def f_survival(f: float, df1: int, df2: int) -> float:
    """P(F > f) for the F(df1, df2) distribution, via the regularized
    incomplete beta function."""
    if f <= 0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return float(betainc(df2 / 2.0, df1 / 2.0, x))


def ols_fit(x: DesignMatrix, y) -> LinearModel:
    """Least-squares fit of y on the design columns.

    Raises Underdetermined when n <= p and SingularDesign when the design is
    rank deficient at the tolerance documented above.
    """
    if not isinstance(x, DesignMatrix):
        x = DesignMatrix(np.asarray(x, dtype=float))
    ymat = np.asarray(y, dtype=float)
    if ymat.ndim != 1 or ymat.shape[0] != x.n:
        raise ShapeError(f"y has shape {ymat.shape}, expected ({x.n},)")
    if not np.all(np.isfinite(ymat)):
        raise ValueError("y contains non-finite entries")
    n, p = x.n, x.p
    if n <= p:
        raise Underdetermined(f"{n} observations cannot identify {p} coefficients")

    m = x.matrix
    col_norms = np.linalg.norm(m, axis=0)
    svals = np.linalg.svd(m, compute_uv=False)
    if svals[-1] <= _RANK_RTOL * col_norms.max():
        raise SingularDesign(
            f"design is rank deficient (sigma_min={svals[-1]:.3e}, "
            f"max column norm={col_norms.max():.3e})"
        )

    q, r = np.linalg.qr(m)
    beta = np.linalg.solve(r, q.T @ ymat)
    fitted = m @ beta
    resid = ymat - fitted

    df_residual = n - p
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((ymat - ymat.mean()) ** 2))
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0  # constant response: the intercept fits exactly
    r2 = min(1.0, max(0.0, r2))
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / df_residual
    rse = math.sqrt(ss_res / df_residual)

    # (X'X)^-1 from the triangular factor
    xtx_inv = np.linalg.inv(r.T @ r)
    sigma2 = ss_res / df_residual
    std_errors = np.sqrt(np.maximum(sigma2 * np.diag(xtx_inv), 0.0))

    df_model = p - 1 if x.intercept_included else p
    if df_model < 1 or ss_tot == 0:
        f_p = 1.0  # intercept-only design or constant response
    elif ss_res == 0:
        f_p = 0.0
    elif ss_res >= ss_tot:
        f_p = 1.0  # fit no better than the mean (possible without intercept)
    else:
        f_stat = ((ss_tot - ss_res) / df_model) / (ss_res / df_residual)
        f_p = f_survival(f_stat, df_model, df_residual)
    f_p = max(f_p, P_VALUE_FLOOR)

    return LinearModel(
        coefficients=tuple(float(b) for b in beta),
        coefficient_std_errors=tuple(float(s) for s in std_errors),
        residuals=tuple(float(e) for e in resid),
        rse=rse,
        r_squared=r2,
        adj_r_squared=adj_r2,
        f_p_value=f_p,
        df_residual=df_residual,
        intercept_included=x.intercept_included,
    )


def predict(model: LinearModel, x: DesignMatrix):
    if not isinstance(x, DesignMatrix):
        x = DesignMatrix(np.asarray(x, dtype=float), intercept_included=model.intercept_included)
    if x.p != model.p:
        raise ShapeError(f"design has {x.p} columns, model expects {model.p}")
    return x.matrix @ np.asarray(model.coefficients)
