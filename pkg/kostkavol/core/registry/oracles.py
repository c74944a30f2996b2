from ..base.log import GlobalLogger
from ..oracle.kostka import enumerate_patterns, kostka_count, scaling_limit
from ..oracle.probes import logconcavity_probe
from ..oracle.volume import DEFAULT_DIM_CAP, exact_kostka_volume


def _kostka(lam, mu, **options):
    return kostka_count(lam, mu)


def _volume(lam, mu, dim_cap=DEFAULT_DIM_CAP, **options):
    return exact_kostka_volume(lam, mu, dim_cap)


def _scaling(lam, mu, N=1, **options):
    return scaling_limit(lam, mu, N)


def _logconcavity(lam, mu, mu_b=None, steps=4, dim_cap=DEFAULT_DIM_CAP, **options):
    if mu_b is None:
        raise ValueError("The 'logconcavity' oracle needs a second weight (mu_b).")
    return logconcavity_probe(lam, mu, mu_b, steps, dim_cap)


def _patterns(lam, mu, **options):
    return list(enumerate_patterns(lam, mu))


class OracleRegistry:
    """
    Global registry of ground-truth oracles, called as oracle(lam, mu, **options).

    Enforce Singleton pattern while maintaining a global registry.
    """

    _instance = None  # Singleton instance
    _registry = {}  # User-registered oracles

    PREDEFINED_ORACLES = {
        "kostka": "Kostka number K(lambda, mu) by row-by-row GT pattern counting.",
        "volume": "Exact volume of the Kostka polytope (projected volume and sqrt((n-1)!) factor).",
        "scaling": "K(N lambda, N mu) / N^d, the lattice-point approximation of the projected volume.",
        "logconcavity": "Exact log-concavity checks of the volume along a segment of weights.",
        "patterns": "Every integral GT pattern with top row lambda and weight mu.",
    }

    _PREDEFINED_CALLABLES = {
        "kostka": _kostka,
        "volume": _volume,
        "scaling": _scaling,
        "logconcavity": _logconcavity,
        "patterns": _patterns,
    }

    def __new__(cls, *args, **kwargs):
        """Ensure only one instance exists."""
        if cls._instance is None:
            cls._instance = super(OracleRegistry, cls).__new__(cls)
        return cls._instance

    @classmethod
    def register(cls, name, oracle):
        """Register a user oracle; predefined names cannot be overwritten."""
        if name in cls.PREDEFINED_ORACLES:
            raise ValueError(f"'{name}' is a predefined oracle: {cls.PREDEFINED_ORACLES[name]}")
        if name in cls._registry:
            raise ValueError(f"Oracle '{name}' is already registered.")
        if not callable(oracle):
            raise ValueError(f"Oracle '{name}' must be callable.")
        cls._registry[name] = oracle
        GlobalLogger.log(f"Registered oracle '{name}'", level="debug")

    @classmethod
    def get(cls, name):
        """Retrieve an oracle by name, user-registered first."""
        if name in cls._registry:
            return cls._registry[name]
        if name in cls._PREDEFINED_CALLABLES:
            return cls._PREDEFINED_CALLABLES[name]
        raise ValueError(
            f"Oracle '{name}' is not registered. Available oracles: "
            f"{sorted(list(cls.PREDEFINED_ORACLES) + list(cls._registry))}."
        )

    @classmethod
    def remove(cls, name):
        """Remove a user-registered oracle."""
        if name not in cls._registry:
            raise ValueError(f"Oracle '{name}' is not a user-registered oracle.")
        del cls._registry[name]

    @classmethod
    def list_registered(cls):
        """List all user-registered oracles."""
        return list(cls._registry.keys())

    @classmethod
    def list_predefined(cls):
        """List the predefined oracles with their descriptions."""
        return cls.PREDEFINED_ORACLES
