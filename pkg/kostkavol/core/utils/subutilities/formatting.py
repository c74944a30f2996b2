import json
import re
from decimal import Decimal, Context, ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Union

from ...base.errors import InstanceParseError

_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_RATIO_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")

Number = Union[int, Fraction]


class Formatting:
    """
    Exact parsing of instance files and outward-rounded rendering of certified numbers.
    """

    significant_digits = 12

    # -- parsing ---------------------------------------------------------------------

    @staticmethod
    def parse_number(token: Any, where: str = "value") -> Fraction:
        """
        Parse an integer, a decimal string or a "p/q" string into an exact Fraction.

        Floats are rejected: their binary value is not the number the user wrote.
        """
        if isinstance(token, bool):
            raise InstanceParseError(f"{where}: booleans are not numbers")
        if isinstance(token, int):
            return Fraction(token)
        if isinstance(token, Fraction):
            return token
        if isinstance(token, Decimal):
            if not token.is_finite():
                raise InstanceParseError(f"{where}: {token} is not a finite number")
            return Fraction(token)
        if isinstance(token, float):
            raise InstanceParseError(
                f"{where}: bare floating-point literal {token!r}; write it as a string, e.g. \"{token!r}\""
            )
        if isinstance(token, str):
            text = token.strip()
            ratio = _RATIO_RE.match(text)
            if ratio:
                p, q = int(ratio.group(1)), int(ratio.group(2))
                if q == 0:
                    raise InstanceParseError(f"{where}: zero denominator in {token!r}")
                value = Fraction(p, q)
                if q < 0 or Fraction(abs(p), abs(q)).denominator != abs(q):
                    raise InstanceParseError(f"{where}: {token!r} is not in lowest terms with q > 0")
                return value
            if _DECIMAL_RE.match(text):
                return Fraction(Decimal(text))
        raise InstanceParseError(f"{where}: cannot parse {token!r} as an exact rational")

    def parse_instance_text(self, text: str, source: str = "<instance>") -> Dict[str, List[Fraction]]:
        """
        Parse an instance document {"lambda": [...], "mu": [...]}.

        Returns:
        - dict: keys "lambda" and "mu" mapped to lists of Fractions.
        """
        try:
            raw = json.loads(text, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise InstanceParseError(f"{source}: malformed JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
        if not isinstance(raw, dict):
            raise InstanceParseError(f"{source}: expected a JSON object with keys 'lambda' and 'mu'")
        parsed = {}
        for key in ("lambda", "mu"):
            if key not in raw:
                raise InstanceParseError(f"{source}: missing key '{key}'")
            if not isinstance(raw[key], list) or not raw[key]:
                raise InstanceParseError(f"{source}: '{key}' must be a non-empty list")
            parsed[key] = [self.parse_number(v, where=f"{source}:{key}[{i}]") for i, v in enumerate(raw[key])]
        return parsed

    def parse_instance_file(self, path: str) -> Dict[str, List[Fraction]]:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise InstanceParseError(f"{path}: cannot read instance file: {exc.strerror}") from exc
        return self.parse_instance_text(text, source=path)

    # -- rendering -------------------------------------------------------------------

    @staticmethod
    def exact_string(value: Optional[Number]) -> str:
        if value is None:
            return "inf"
        value = Fraction(value)
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"

    @classmethod
    def decimal_string(cls, value: Optional[Number], direction: str = "nearest") -> str:
        """
        Render a rational with `significant_digits` digits.

        Parameters:
        - value (Fraction or None): None stands for +infinity.
        - direction (str): "down", "up" or "nearest".
        """
        if value is None:
            return "inf"
        value = Fraction(value)
        if value == 0:
            return "0"
        rounding = {"down": ROUND_FLOOR, "up": ROUND_CEILING, "nearest": ROUND_HALF_EVEN}[direction]
        context = Context(prec=cls.significant_digits, rounding=rounding)
        quotient = context.divide(Decimal(value.numerator), Decimal(value.denominator))
        return f"{quotient:.{cls.significant_digits - 1}e}"

    @classmethod
    def render_exact(cls, value: Optional[Number]) -> Dict[str, str]:
        return {"exact": cls.exact_string(value), "decimal": cls.decimal_string(value)}

    @classmethod
    def render_interval(cls, lower: Optional[Number], upper: Optional[Number]) -> Dict[str, Dict[str, str]]:
        """Render [lower, upper] with each end rounded outward."""
        return {
            "lower": {"exact": cls.exact_string(lower), "decimal": cls.decimal_string(lower, "down")},
            "upper": {"exact": cls.exact_string(upper), "decimal": cls.decimal_string(upper, "up")},
        }

    @staticmethod
    def render_vector(values: Iterable[Number]) -> List[str]:
        return [Formatting.exact_string(v) for v in values]
