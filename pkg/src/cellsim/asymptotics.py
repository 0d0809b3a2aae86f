"""Closed-form rate bounds and limiting maxima distributions.

These are the analytical oracles the Monte Carlo estimates are checked
against.  All bounds are first-order asymptotics: the vanishing correction
terms are dropped, so finite-n agreement is envelope-with-slack, never
exact containment.  Rates are in bits per channel use (log base 2 outside,
natural log inside the centering terms).
"""

from __future__ import annotations

import math
import warnings


def _check_n(n: float, minimum: float) -> None:
    if n <= minimum:
        raise ValueError(f"user count must be > {minimum}, got {n}")


def log_correction(n: float) -> float:
    """Decay scale log2(log n)/log n shared by every symmetric-model bound."""
    _check_n(n, math.e)  # log log n must be positive
    return math.log2(math.log(n)) / math.log(n)


def f_centering(n: float, rho: float) -> float:
    """Centering term log2(rho * log n) of the symmetric-model rates."""
    _check_n(n, 1.0)
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    if rho * math.log(n) <= 1.0:
        warnings.warn(
            f"rho*log(n) = {rho * math.log(n):.3g} <= 1; centering is negative",
            stacklevel=2,
        )
    return math.log2(rho * math.log(n))


def lemma1_bounds(n: float, rho: float) -> tuple[float, float]:
    """Bracket for the mean interference-free scheduled rate:
    f(n) -/+ log2(log n)/log n."""
    c = log_correction(n)
    f = f_centering(n, rho)
    return f - c, f + c


def lemma2_bounds(n: float, rho: float, n_interferers: int) -> tuple[float, float]:
    """Bracket for the mean max-SINR rate under equal path loss:
    f(n) - (N+1)c(n) <= rate <= f(n) - (N-1)c(n)."""
    if n_interferers < 1:
        raise ValueError(f"need at least one interferer, got {n_interferers}")
    c = log_correction(n)
    f = f_centering(n, rho)
    return f - (n_interferers + 1) * c, f - (n_interferers - 1) * c


def theorem1_envelope(n: float, n_interferers: int) -> tuple[float, float]:
    """Envelope for the mean rate gap: (N-2)c(n) <= gap <= (N+2)c(n).

    The lower edge is clamped at zero for N < 2 since the per-drop gap is
    nonnegative by construction.
    """
    if n_interferers < 1:
        raise ValueError(f"need at least one interferer, got {n_interferers}")
    c = log_correction(n)
    return max(0.0, (n_interferers - 2) * c), (n_interferers + 2) * c


def gumbel_cdf_approx(u: float) -> float:
    """Limit CDF exp(-exp(-u)) of exponential maxima centered by log n."""
    return math.exp(-math.exp(-u))


def frechet_cdf(t: float, epsilon: float) -> float:
    """Limit CDF exp(-t**(-2/epsilon)) of rescaled power-law maxima."""
    if epsilon <= 0:
        raise ValueError(f"exponent must be > 0, got {epsilon}")
    if t <= 0:
        raise ValueError(f"frechet CDF defined for t > 0, got {t}")
    return math.exp(-(t ** (-2.0 / epsilon)))


def frechet_moment_term(epsilon: float) -> float:
    """E[Y**(2/eps)]**(eps/2) for unit-mean exponential Y: Gamma(1+2/eps)**(eps/2)."""
    if epsilon <= 0:
        raise ValueError(f"exponent must be > 0, got {epsilon}")
    return math.gamma(1.0 + 2.0 / epsilon) ** (epsilon / 2.0)


def frechet_scale(n: float, scale: float, epsilon: float) -> float:
    """Normalizing constant scale * Gamma(1+2/eps)**(eps/2) * n**(eps/2)."""
    if n < 1:
        raise ValueError(f"user count must be >= 1, got {n}")
    if scale <= 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    return scale * frechet_moment_term(epsilon) * n ** (epsilon / 2.0)


def lemma3_rate_asymptote(n: float, epsilon: float, base: str = "bits") -> float:
    """Growth asymptote (eps/2) * log(n) of the uniform-disc upper-bound rate.

    ``base="bits"`` uses log2 (the interpretation matched by the slope
    experiment in the asymmetric model); ``base="nats"`` exposes the
    natural-log variant.
    """
    _check_n(n, 1.0)
    if epsilon <= 0:
        raise ValueError(f"exponent must be > 0, got {epsilon}")
    if base == "bits":
        return 0.5 * epsilon * math.log2(n)
    if base == "nats":
        return 0.5 * epsilon * math.log(n)
    raise ValueError(f"base must be 'bits' or 'nats', got {base!r}")
