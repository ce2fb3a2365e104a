"""Statistical kernels for term certification.

Provides the one-sided Wilson score upper bound on a binomial proportion,
the standard normal quantile it depends on, and the coverage ratio of an
audit tally. All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ProtocolParams",
    "TermTally",
    "normal_quantile",
    "wilson_upper",
    "coverage",
]


@dataclass(frozen=True)
class ProtocolParams:
    """Certification thresholds.

    tau: maximum tolerated contradiction bound.
    delta: confidence parameter; the bound holds with probability >= 1 - delta.
    rho_min: minimum coverage (fraction of audited exposures that permit
        comparison) required before a term may certify.
    """

    tau: float = 0.05
    delta: float = 0.05
    rho_min: float = 0.10

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not 0.0 <= self.rho_min <= 1.0:
            raise ValueError(f"rho_min must be in [0, 1], got {self.rho_min}")

    def to_dict(self) -> dict:
        return {"tau": self.tau, "delta": self.delta, "rho_min": self.rho_min}

    @classmethod
    def from_dict(cls, data: dict) -> "ProtocolParams":
        return cls(tau=data["tau"], delta=data["delta"], rho_min=data["rho_min"])


@dataclass(frozen=True)
class TermTally:
    """Per-term audit counters.

    n_aud: events where at least one agent gave a decided verdict.
    k: eligible comparisons (both agents decided).
    c: contradictions among eligible comparisons.
    """

    n_aud: int
    k: int
    c: int

    def __post_init__(self) -> None:
        if not 0 <= self.c <= self.k <= self.n_aud:
            raise ValueError(
                f"tally must satisfy 0 <= c <= k <= n_aud, got {self}"
            )

    def to_dict(self) -> dict:
        return {"n_aud": self.n_aud, "k": self.k, "c": self.c}

    @classmethod
    def from_dict(cls, data: dict) -> "TermTally":
        return cls(n_aud=data["n_aud"], k=data["k"], c=data["c"])


# Rational approximation coefficients (Acklam). Relative error < 1.15e-9
# before refinement; one Halley step below brings it near machine precision.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF, absolute error well below 1e-8.

    Raises ValueError outside the open interval (0, 1).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"normal_quantile requires 0 < p < 1, got {p}")

    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))

    # One Halley refinement step against the exact CDF via erfc.
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def wilson_upper(c: int, k: int, delta: float) -> float:
    """One-sided Wilson score upper confidence bound on a proportion.

    Given c observed contradictions in k eligible comparisons, returns an
    upper bound u on the true rate that holds with probability >= 1 - delta:

        u = (p + z^2/(2k) + z * sqrt(p(1-p)/k + z^2/(4k^2))) / (1 + z^2/k)

    with p = c/k and z the (1 - delta) standard normal quantile. With no
    eligible comparisons (k = 0) the bound is 1.0: maximal uncertainty, so
    the term cannot certify. At c = k the bound is exactly 1.0 by the
    algebraic identity of numerator and denominator.
    """
    if c < 0 or k < 0 or c > k:
        raise ValueError(f"require 0 <= c <= k, got c={c}, k={k}")
    if k == 0 or c == k:
        return 1.0
    z = normal_quantile(1.0 - delta)
    p_hat = c / k
    z2k = z * z / k
    numerator = p_hat + z2k / 2.0 + z * math.sqrt(
        p_hat * (1.0 - p_hat) / k + z2k / (4.0 * k)
    )
    u = numerator / (1.0 + z2k)
    return min(1.0, max(0.0, u))


def coverage(tally: TermTally) -> float:
    """Fraction of audited exposures that permitted comparison: k / max(n_aud, 1)."""
    return tally.k / max(tally.n_aud, 1)
