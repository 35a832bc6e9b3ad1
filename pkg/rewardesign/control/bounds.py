"""
Intervalli ammissibili dei pesi del reward e certificati di validità.

T1  λ > α, β = 0, μ > −α/τ                           (sconto 1)
T2  λ > α·γ_m^(t_c − t_max), β < α·γ_m^t_max·(1 − γ_m)² / (2ρ(1 − γ_m^t_max))
C1  λ = 0, β come in T2                                (senza vincolo di stato)

Tutte le disuguaglianze sono strette. I preset "vicini al limite" spostano ogni
peso all'interno dell'intervallo di un margine relativo ε.
"""

import logging
import math
import warnings
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from rewardesign.control.reward import WeightVector
from rewardesign.core.errors import ConfigurationError, DomainError, RewardDesignWarning

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.05


class Theorem(str, Enum):
    T1 = "T1"
    T2 = "T2"
    C1 = "C1"


class BoundInputs(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: Optional[float] = None
    gamma_m: Optional[float] = None
    t_max: Optional[int] = None
    t_c: Optional[int] = None
    rho: Optional[float] = None
    tau: Optional[float] = None


class BoundCertificate(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    theorem: Theorem
    inputs: BoundInputs
    weights: WeightVector
    lambda_lower: float
    beta_upper: float
    mu_lower: Optional[float] = None
    satisfied: bool
    checks: Dict[str, bool] = Field(default_factory=dict)
    margin: Dict[str, float] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)


# ====================================================================
# LIMITI
# ====================================================================


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")


def _check_gamma(gamma_m: float) -> None:
    if not 0 < gamma_m < 1:
        raise DomainError(f"gamma_m must lie in (0, 1), got {gamma_m}")


def _beta_upper(alpha: float, gamma_m: float, t_max: int, rho: float) -> float:
    if t_max < 1:
        raise DomainError(f"t_max must be >= 1, got {t_max}")
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    g_t = gamma_m**t_max
    return alpha * g_t * (1 - gamma_m) ** 2 / (2 * rho * (1 - g_t))


def theorem1_bounds(alpha: float, tau: float) -> Tuple[float, float, float]:
    """(lambda_lower, beta_required, mu_lower)."""
    _check_alpha(alpha)
    if not tau > 0:
        raise DomainError(f"τ must be a positive cumulative-cost bound, got {tau}")
    return alpha, 0.0, -alpha / tau


def theorem2_bounds(alpha: float, gamma_m: float, t_c: int, t_max: int, rho: float) -> Tuple[float, float]:
    """(lambda_lower, beta_upper)."""
    _check_alpha(alpha)
    _check_gamma(gamma_m)
    if t_c < 1:
        raise DomainError(f"t_c must be >= 1, got {t_c}")
    if t_c > t_max:
        raise DomainError(f"t_c ({t_c}) cannot exceed t_max ({t_max})")
    return alpha * gamma_m ** (t_c - t_max), _beta_upper(alpha, gamma_m, t_max, rho)


def corollary1_bounds(alpha: float, gamma_m: float, t_max: int, rho: float) -> Tuple[float, float]:
    """(lambda_required, beta_upper)."""
    _check_alpha(alpha)
    _check_gamma(gamma_m)
    return 0.0, _beta_upper(alpha, gamma_m, t_max, rho)


def _require(inputs: BoundInputs, theorem: Theorem, *names: str) -> None:
    for name in names:
        if getattr(inputs, name) is None:
            raise ConfigurationError(f"Missing input '{name}' for theorem {theorem.value}", key=name)


# ====================================================================
# CERTIFICATI
# ====================================================================


def certify(weights: WeightVector, theorem: Theorem, inputs: BoundInputs) -> BoundCertificate:
    theorem = Theorem(theorem)
    if inputs.alpha is None:
        inputs = inputs.model_copy(update={"alpha": weights.alpha})
    alpha = inputs.alpha
    checks: Dict[str, bool] = {}
    margin: Dict[str, float] = {}
    notes: List[str] = []
    mu_lower = None

    if theorem == Theorem.T1:
        _require(inputs, theorem, "tau")
        lambda_lower, beta_upper, mu_lower = theorem1_bounds(alpha, inputs.tau)
        checks["lambda"] = weights.lambda_pen > lambda_lower
        checks["beta"] = weights.beta == 0.0
        checks["mu"] = mu_lower < weights.mu <= 0.0
        checks["discount"] = weights.discount == 1.0
        margin["lambda"] = weights.lambda_pen - lambda_lower
        margin["beta"] = -weights.beta
        margin["mu"] = weights.mu - mu_lower
        if weights.mu == 0.0:
            notes.append("mu = 0 makes the cost term vacuous")
    else:
        _require(inputs, theorem, "gamma_m", "t_max", "rho")
        if theorem == Theorem.T2:
            _require(inputs, theorem, "t_c")
            lambda_lower, beta_upper = theorem2_bounds(alpha, inputs.gamma_m, inputs.t_c, inputs.t_max, inputs.rho)
            checks["lambda"] = weights.lambda_pen > lambda_lower
        else:
            lambda_lower, beta_upper = corollary1_bounds(alpha, inputs.gamma_m, inputs.t_max, inputs.rho)
            checks["lambda"] = weights.lambda_pen == 0.0
        checks["beta"] = weights.beta < beta_upper
        checks["discount"] = weights.discount == inputs.gamma_m
        margin["lambda"] = weights.lambda_pen - lambda_lower
        margin["beta"] = beta_upper - weights.beta

    if inputs.alpha != weights.alpha:
        checks["alpha"] = False
        notes.append(f"bounds computed for alpha={inputs.alpha} but weights use alpha={weights.alpha}")

    certificate = BoundCertificate(
        theorem=theorem,
        inputs=inputs,
        weights=weights,
        lambda_lower=lambda_lower,
        beta_upper=beta_upper,
        mu_lower=mu_lower,
        satisfied=all(checks.values()),
        checks=checks,
        margin=margin,
        warnings=notes,
    )

    for note in notes:
        logger.warning(f"[{theorem.value}] {note}")
        warnings.warn(note, RewardDesignWarning, stacklevel=2)
    if not certificate.satisfied:
        failed = [k for k, ok in checks.items() if not ok]
        logger.warning(f"Certificate {theorem.value} not satisfied (failed: {', '.join(failed)})")
    return certificate


def preset_weights(
    theorem: Theorem,
    inputs: BoundInputs,
    epsilon: float = DEFAULT_EPSILON,
    use_guidance: bool = True,
) -> WeightVector:
    """Pesi all'interno dei limiti: lower·(1+ε), upper·(1−ε)."""
    theorem = Theorem(theorem)
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    _require(inputs, theorem, "alpha")
    alpha = inputs.alpha

    if theorem == Theorem.T1:
        _require(inputs, theorem, "tau")
        lambda_lower, _, mu_lower = theorem1_bounds(alpha, inputs.tau)
        return WeightVector(
            alpha=alpha,
            beta=0.0,
            lambda_pen=lambda_lower * (1 + epsilon),
            mu=mu_lower * (1 - epsilon),
            discount=1.0,
        )

    _require(inputs, theorem, "gamma_m", "t_max", "rho")
    if theorem == Theorem.T2:
        _require(inputs, theorem, "t_c")
        lambda_lower, beta_upper = theorem2_bounds(alpha, inputs.gamma_m, inputs.t_c, inputs.t_max, inputs.rho)
        lambda_pen = lambda_lower * (1 + epsilon)
    else:
        _, beta_upper = corollary1_bounds(alpha, inputs.gamma_m, inputs.t_max, inputs.rho)
        lambda_pen = 0.0

    beta = beta_upper * (1 - epsilon) if use_guidance else 0.0
    if not math.isfinite(beta):
        raise DomainError(f"beta preset is not finite (rho={inputs.rho})")
    return WeightVector(alpha=alpha, beta=beta, lambda_pen=lambda_pen, mu=0.0, discount=inputs.gamma_m)
