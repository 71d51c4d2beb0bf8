"""One-sample t-tests and Pearson correlation for the evaluation tables."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.special import betainc

from .errors import DegenerateSampleError


@dataclass(frozen=True)
class TTestResult:
    n: int
    mean: float
    sd: float
    t: float
    df: int
    p_two_tailed: float
    mu0: float


def one_sample_t(values: Sequence[float], mu0: float) -> TTestResult:
    """Two-tailed one-sample t-test of ``values`` against ``mu0``.

    t = (mean - mu0) / (sd / sqrt(n)) with the sample sd (ddof=1); the
    two-tailed p-value is the regularized incomplete beta
    I_{df/(df+t^2)}(df/2, 1/2).
    """
    n = len(values)
    if n < 2:
        raise DegenerateSampleError(f"need at least 2 values, got {n}")
    mean = math.fsum(values) / n
    ss = math.fsum((v - mean) ** 2 for v in values)
    sd = math.sqrt(ss / (n - 1))
    if sd == 0.0:
        raise DegenerateSampleError("sample standard deviation is zero")
    t = (mean - mu0) / (sd / math.sqrt(n))
    df = n - 1
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TTestResult(n=n, mean=mean, sd=sd, t=t, df=df, p_two_tailed=p, mu0=mu0)


def one_sample_t_p_from_t(t: float, df: int) -> float:
    """Two-tailed p for a t statistic with ``df`` degrees of freedom."""
    if df < 1:
        raise DegenerateSampleError("degrees of freedom must be >= 1")
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation coefficient in [-1, 1]."""
    if len(x) != len(y):
        raise DegenerateSampleError("sequences must have equal length")
    n = len(x)
    if n < 2:
        raise DegenerateSampleError(f"need at least 2 pairs, got {n}")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [xi - mx for xi in x]
    dy = [yi - my for yi in y]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSampleError("zero variance in one of the sequences")
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    r = sxy / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def significance_stars(p: float) -> str:
    """Conventional significance marks: * <.05, ** <.01, *** <.001."""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""
