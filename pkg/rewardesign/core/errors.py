"""
Gerarchia delle eccezioni del toolkit.

Tutte derivano da RewardDesignError, così la CLI può distinguere un errore
"atteso" (configurazione, dominio, capacità) da un bug.
"""

from typing import Any, Dict, Optional


class RewardDesignError(Exception):
    """Radice di tutti gli errori del toolkit."""


class DomainError(RewardDesignError, ValueError):
    """Argomento fuori dominio: stato/azione sconosciuti, sconto fuori (0,1], serie vuota..."""


class UsageError(RewardDesignError, RuntimeError):
    """Uso scorretto dell'API (es. step su un episodio già concluso)."""


class ConfigurationError(RewardDesignError):
    """Configurazione non valida o incompleta (file, chiave, policy non definita)."""

    def __init__(self, message: str, path: Optional[str] = None, key: Optional[str] = None):
        self.path = path
        self.key = key
        location = ""
        if path:
            location += f" [file: {path}]"
        if key:
            location += f" [key: {key}]"
        super().__init__(f"{message}{location}")


class EstimationError(RewardDesignError):
    """La policy passata a uno stimatore non rispetta la precondizione (τ o t_c)."""

    def __init__(self, message: str, initial_state: Any = None):
        self.initial_state = initial_state
        super().__init__(message)


class CapacityError(RewardDesignError):
    """Il problema è troppo grande per il solver esatto o per l'enumerazione."""

    def __init__(self, message: str, size: int):
        self.size = size
        super().__init__(f"{message} (size={size})")


class NumericalError(RewardDesignError):
    """Valore non finito in una tabella Q."""

    def __init__(self, message: str, entry: Any = None):
        self.entry = entry
        super().__init__(message)


class StageError(RewardDesignError):
    """Uno stage del curriculum non ha raggiunto il criterio di convergenza."""

    def __init__(self, stage_index: int, metrics: Dict[str, Any], partial: Any = None, reason: str = ""):
        self.stage_index = stage_index
        self.metrics = metrics
        self.partial = partial
        detail = f": {reason}" if reason else ""
        super().__init__(f"Stage {stage_index} did not converge{detail} (metrics={metrics})")


class PreconditionError(RewardDesignError):
    """Precondizione di una verifica oracle non soddisfatta (es. nessuna traccia Pi3)."""


class RewardDesignWarning(UserWarning):
    """Avviso di validazione non bloccante (sconto = 1 nello schema minimum-time, μ = 0...)."""
