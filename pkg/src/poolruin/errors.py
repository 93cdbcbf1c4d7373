"""Exception hierarchy for model validation and numerical failures."""


class PoolRuinError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PoolRuinError):
    """A model configuration file is malformed or inconsistent."""


class SubordinatorRegime(PoolRuinError):
    """Operation requires a regime whose running maximum can be split off;
    a subordinator (a.s. nondecreasing path) has no right inverse."""


class NotSubordinator(PoolRuinError):
    """Operation is only defined for subordinator regimes."""


class NoRoot(PoolRuinError):
    """The Laplace exponent never reaches the requested level."""


class RegimeMismatch(PoolRuinError):
    """Operation requires a different family of regimes (e.g. positive pure drifts)."""


class KillingRequired(PoolRuinError):
    """Operation is only defined for a strictly positive killing rate."""


class NonIdenticalClaims(PoolRuinError):
    """Operation requires all claim sizes to share one distribution."""


class MomentUndefined(PoolRuinError):
    """A requested moment of a claim distribution does not exist."""


class SingularSystem(PoolRuinError):
    """A linear system that should be regular turned out singular
    (indicates an invalid phase-type representation)."""


class NoConvergence(PoolRuinError):
    """An iterative or extrapolation procedure failed to stabilize."""


class ChainBudgetExceeded(PoolRuinError):
    """Explicit ladder-chain enumeration would exceed the configured budget."""
