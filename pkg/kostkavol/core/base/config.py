import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional

# pip install pyyaml
import yaml

from .errors import InputError, InstanceParseError
from ..utils.utilities import Utils

CONFIG_ENV_VAR = "KOSTKAVOL_CONFIG"

_FRACTION_KEYS = ("eps_opt", "delta_eval")
_INT_KEYS = (
    "precision_bit_cap",
    "postnikov_threshold",
    "oracle_dim_cap",
    "max_domain_doublings",
    "max_iterations",
    "pi_digits",
)


@dataclass(frozen=True)
class RunConfig:
    """
    Tolerances and caps shared by every pipeline stage.

    Parameters:
    - eps_opt (Fraction): Additive accuracy of the minimizer.
    - delta_eval (Fraction): Accuracy of stand-alone Schur evaluations.
    - precision_bit_cap (int): Largest fixed-point precision, in bits, of the certified kernels.
    - postnikov_threshold (int): Largest n for the exact permutohedron volume.
    - oracle_dim_cap (int): Largest dimension handled by the exact volume oracle.
    - output_format (str): "json" or "csv".
    - max_domain_doublings (int): Restarts allowed when the minimizer touches the domain ring.
    - max_iterations (int): Cutting-plane iteration cap per restart.
    - pi_digits (int): Decimal digits of the rational bracket around pi.
    - log_level (str): Level name applied to GlobalLogger; None defers to $KOSTKAVOL_LOG_LEVEL, then WARNING.
    """

    eps_opt: Fraction = Fraction(1, 1000)
    delta_eval: Fraction = Fraction(1, 1000)
    precision_bit_cap: int = 4096
    postnikov_threshold: int = 8
    oracle_dim_cap: int = 6
    output_format: str = "json"
    max_domain_doublings: int = 8
    max_iterations: int = 20000
    pi_digits: int = 60
    log_level: Optional[str] = None
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        for key in _FRACTION_KEYS:
            value = getattr(self, key)
            if isinstance(value, float):
                # YAML reads 0.001 as a float; its shortest repr is what the user wrote.
                value = repr(value)
            if not isinstance(value, Fraction):
                object.__setattr__(self, key, Utils.parse_number(value, where=key))
            if not 0 < getattr(self, key) < 1:
                raise InputError(f"{key} must lie in (0, 1), got {getattr(self, key)}")
        for key in _INT_KEYS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise InputError(f"{key} must be a positive integer, got {value!r}")
        if self.output_format not in ("json", "csv"):
            raise InputError(f"output_format must be 'json' or 'csv', got {self.output_format!r}")
        if self.pi_digits > 1000:
            raise InputError("pi_digits is limited to 1000")

    @classmethod
    def from_mapping(cls, mapping: Dict[str, Any], source: Optional[str] = None) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls) if f.name != "source"}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise InputError(f"Unknown configuration keys {unknown}. Known keys: {sorted(known)}.")
        return cls(source=source, **mapping)

    @classmethod
    def from_yaml(cls, path: str) -> "RunConfig":
        """
        Read a YAML mapping of configuration keys.

        Parameters:
        - path (str): Path to the YAML file.

        Returns:
        - RunConfig: The validated configuration.
        """
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = yaml.safe_load(handle)
        except OSError as exc:
            raise InstanceParseError(f"{path}: cannot read configuration: {exc.strerror}") from exc
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise InstanceParseError(
                f"{path}: malformed YAML",
                line=mark.line + 1 if mark else None,
                column=mark.column + 1 if mark else None,
            ) from exc
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise InstanceParseError(f"{path}: configuration must be a mapping")
        return cls.from_mapping(data, source=path)

    @classmethod
    def load(cls, path: Optional[str] = None, **overrides) -> "RunConfig":
        """
        Resolve the configuration: explicit path, then $KOSTKAVOL_CONFIG, then defaults.
        Keyword overrides (e.g. from command-line flags) win; None values are ignored.
        """
        resolved = Utils()._get_env_path(CONFIG_ENV_VAR, path)
        base = cls.from_yaml(resolved) if resolved else cls()
        overrides = {key: value for key, value in overrides.items() if value is not None}
        return base.replace(**overrides) if overrides else base

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> Dict[str, str]:
        return {
            f.name: (Utils.exact_string(getattr(self, f.name)) if f.name in _FRACTION_KEYS else getattr(self, f.name))
            for f in dataclasses.fields(self)
            if f.name != "source"
        }
