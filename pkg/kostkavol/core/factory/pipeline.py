from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..base.config import RunConfig
from ..base.errors import (
    BoundaryInstanceError,
    DegenerateInstanceError,
    InputError,
    KostkaVolError,
    PreconditionError,
    ResourceLimitError,
)
from ..bounds.bracket import (
    VolumeBracket,
    assemble_bracket,
    closed_form_bracket,
    inscribed_ball_floor,
    psh_volume,
    ratio_envelope,
)
from ..certarith.certified import CertifiedValue
from ..conditioning.record import ConditioningRecord, condition
from ..domain.partition import Instance, gt_volume, normalize
from ..optimization.ellipsoid import OptimizationResult, minimize
from ..oracle.probes import LogConcavityReport
from ..oracle.volume import KostkaVolume, exact_kostka_volume
from ..registry.oracles import OracleRegistry
from ..schur.evaluator import log_schur
from ..utils.utilities import Utils
from ..wrappers.logging_mixin import LoggingMixin

SCHEMA_VERSION = 1

Source = Union[str, Dict[str, Sequence], Tuple[Sequence, Sequence]]


@dataclass
class ResultRecord:
    """
    One machine-readable result document.

    Parameters:
    - command (str): Pipeline that produced the record.
    - status (str): "ok" or the status of the error class that stopped the pipeline.
    - exit_code (int): Process exit status for this record.
    - payload (dict): Rendered results; every number is an exact string plus a decimal.
    - timings (dict): Seconds per stage.
    """

    command: str
    status: str = "ok"
    exit_code: int = 0
    payload: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_error(cls, command: str, exc: KostkaVolError, payload: Optional[Dict[str, Any]] = None) -> "ResultRecord":
        error: Dict[str, Any] = {"type": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "line", None) is not None:
            error["line"], error["column"] = exc.line, exc.column
        if getattr(exc, "diagnostics", None):
            error["diagnostics"] = {k: str(v) for k, v in sorted(exc.diagnostics.items())}
        body = dict(payload or {})
        body["error"] = error
        return cls(command=command, status=exc.status, exit_code=exc.exit_code, payload=body)

    def as_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        document = {"schema": SCHEMA_VERSION, "command": self.command, "status": self.status, "exit_code": self.exit_code}
        document.update(self.payload)
        if include_timings:
            document["timings"] = {stage: round(seconds, 6) for stage, seconds in sorted(self.timings.items())}
        return document


# -- rendering --------------------------------------------------------------------------


def render_certified(value: Optional[CertifiedValue]) -> Optional[Dict[str, Dict[str, str]]]:
    if value is None:
        return None
    return Utils.render_interval(*value.bounds())


def render_instance(lam: Sequence[Fraction], mu: Sequence[Fraction], instance: Optional[Instance] = None) -> Dict[str, Any]:
    rendered: Dict[str, Any] = {"lambda": Utils.render_vector(lam), "mu": Utils.render_vector(mu)}
    if instance is not None:
        rendered["normalization"] = {
            "shift": Utils.exact_string(instance.shift),
            "scale": Utils.exact_string(instance.scale),
            "volume_factor": Utils.render_exact(instance.volume_factor),
        }
    return rendered


def render_conditioning(record: ConditioningRecord) -> Dict[str, Any]:
    return {
        "n": record.n,
        "dim": record.dim,
        "lambda_gap": Utils.render_exact(record.lambda_gap),
        "lambda1": Utils.render_exact(record.lambda1),
        "tau": Utils.render_exact(record.tau),
        "d_mu": render_certified(record.d_mu),
        "r0": render_certified(record.r0),
        "r": Utils.render_exact(record.r),
        "delta_prime": render_certified(record.delta_prime),
        "epsilon": render_certified(record.epsilon),
        "epsilon_squared": Utils.render_exact(record.epsilon_squared),
        "boundary": record.is_boundary,
        "domain_radius": render_certified(record.domain_radius),
        "floors": dict(sorted(record.floors.items())),
    }


def render_optimization(opt: OptimizationResult) -> Dict[str, Any]:
    return {
        "y_star": Utils.render_vector(opt.y_star),
        "g_star": render_certified(opt.g_star),
        "f_star": render_certified(opt.f_star),
        "min_lower": Utils.render_exact(opt.min_lower),
        "iterations": opt.iterations,
        "domain_doublings": opt.domain_doublings,
        "domain_radius": Utils.render_exact(opt.domain_radius),
        "stationarity_residual": render_certified(opt.stationarity_residual),
    }


def render_bracket(bracket: VolumeBracket) -> Dict[str, Any]:
    return {
        "volume": Utils.render_interval(bracket.lower, bracket.upper),
        "F_estimate": render_certified(bracket.F_estimate),
        "psh_volume": Utils.render_exact(bracket.psh_volume),
        "psh_exact": bracket.psh_exact,
        "approximation_ratio_log": render_certified(bracket.approximation_ratio_log),
        "estimate_ratio_log": None if bracket.estimate_ratio_log is None else Utils.render_exact(bracket.estimate_ratio_log),
        "ball_floor": render_certified(bracket.ball_floor),
    }


def render_volume(volume: KostkaVolume) -> Dict[str, Any]:
    return {
        "volume_tilde": Utils.render_exact(volume.tilde),
        "volume": render_certified(volume.volume),
        "volume_squared": Utils.render_exact(volume.volume_squared),
        "volume_symbolic": f"sqrt({Utils.exact_string(volume.volume_squared)})",
    }


def render_oracle_value(kind: str, value: Any) -> Dict[str, Any]:
    if isinstance(value, KostkaVolume):
        return render_volume(value)
    if isinstance(value, LogConcavityReport):
        return {
            "points": [Utils.render_vector(p) for p in value.points],
            "volumes": Utils.render_vector(value.volumes),
            "triples": value.triples,
            "midpoint": value.midpoint,
            "midpoint_volume": Utils.render_exact(value.midpoint_volume),
            "holds": value.holds,
        }
    if kind == "patterns":
        return {"count": len(value), "patterns": [[Utils.render_vector(row) for row in p] for p in value]}
    if isinstance(value, bool):
        return {"value": value}
    if isinstance(value, (int, Fraction)):
        return {"value": Utils.render_exact(value)}
    return {"value": str(value)}


# -- pipelines --------------------------------------------------------------------------


class Pipeline(LoggingMixin):
    """
    Base pipeline: resolves an instance source and turns pipeline errors into records.

    Parameters:
    - config (RunConfig): Tolerances and caps.
    """

    command = "pipeline"

    def __init__(self, config: Optional[RunConfig] = None):
        self.config = config or RunConfig()
        self.utils = Utils()
        self._initialize_logger(self.command, self.config.log_level)

    def resolve(self, source: Source) -> Tuple[List[Fraction], List[Fraction]]:
        """Accept a path, a {"lambda", "mu"} mapping or a (lambda, mu) pair."""
        if isinstance(source, str):
            parsed = self.utils.parse_instance_file(source)
        elif isinstance(source, dict):
            parsed = {
                key: [self.utils.parse_number(v, where=f"{key}[{i}]") for i, v in enumerate(source[key])]
                for key in ("lambda", "mu")
            }
        else:
            lam, mu = source
            parsed = {
                "lambda": [self.utils.parse_number(v, where=f"lambda[{i}]") for i, v in enumerate(lam)],
                "mu": [self.utils.parse_number(v, where=f"mu[{i}]") for i, v in enumerate(mu)],
            }
        if len(parsed["lambda"]) != len(parsed["mu"]):
            raise InputError(f"length mismatch: lambda has {len(parsed['lambda'])} parts, mu has {len(parsed['mu'])}")
        return parsed["lambda"], parsed["mu"]

    def run(self, source: Source) -> ResultRecord:
        raise NotImplementedError

    def run_safely(self, source: Source) -> ResultRecord:
        """Like run, but pipeline errors become error records with their exit code."""
        self.utils.timings = {}
        try:
            record = self.run(source)
        except KostkaVolError as exc:
            self.log_event(f"{self.command} failed: {exc}", level="warning", metadata={"status": exc.status})
            record = ResultRecord.from_error(self.command, exc)
        record.timings = dict(self.utils.timings)
        return record

    def _prepare(self, lam, mu) -> Tuple[Instance, ConditioningRecord]:
        with self.utils.timed("normalize"):
            instance = normalize(lam, mu)
        with self.utils.timed("conditioning"):
            record = condition(instance)
        self.log_event(
            "instance conditioned",
            metadata={"n": instance.n, "boundary": record.is_boundary, "tau": str(record.tau)},
        )
        return instance, record


class BoundsPipeline(Pipeline):
    """Conditioning record and a-priori quantities, without optimization."""

    command = "bounds"

    def run(self, source: Source) -> ResultRecord:
        lam, mu = self.resolve(source)
        instance, record = self._prepare(lam, mu)
        psh, exact = psh_volume(instance.lam, self.config.postnikov_threshold)
        payload = {
            "instance": render_instance(lam, mu, instance),
            "conditioning": render_conditioning(record),
            "psh_volume": Utils.render_exact(psh / instance.scale ** (instance.n - 1)),
            "psh_exact": exact,
            "ball_floor": render_certified(inscribed_ball_floor(instance, record, self.config.pi_digits)),
        }
        with self.utils.timed("schur"):
            origin = log_schur(instance.lam, [0] * instance.n, self.config.delta_eval, self.config.precision_bit_cap)
        payload["gt_volume"] = Utils.render_exact(gt_volume(instance.lam))
        payload["log_schur_origin"] = render_certified(origin)
        return ResultRecord(command=self.command, payload=payload)


class EstimatePipeline(Pipeline):
    """normalize -> conditioning -> minimize -> assemble_bracket."""

    command = "estimate"

    def estimate(self, lam, mu) -> Tuple[Instance, ConditioningRecord, OptimizationResult, VolumeBracket]:
        instance, record = self._prepare(lam, mu)
        if record.is_boundary:
            raise BoundaryInstanceError("epsilon = 0: mu lies on the boundary of the permutohedron")
        with self.utils.timed("minimize"):
            opt = minimize(instance, self.config.eps_opt, self.config, record)
        with self.utils.timed("bracket"):
            bracket = assemble_bracket(instance, record, opt, self.config)
        return instance, record, opt, bracket

    def _estimate_payload(self, lam, mu, instance, record, opt, bracket) -> Dict[str, Any]:
        payload = {
            "instance": render_instance(lam, mu, instance),
            "conditioning": render_conditioning(record),
            "optimization": render_optimization(opt),
            "bracket": render_bracket(bracket),
        }
        try:
            lower, upper = closed_form_bracket(instance, record, opt, self.config.pi_digits)
            payload["closed_form_bracket"] = Utils.render_interval(lower, upper)
        except PreconditionError:
            payload["closed_form_bracket"] = None
        return payload

    def _boundary_record(self, lam, mu, exc: KostkaVolError) -> ResultRecord:
        instance = normalize(lam, mu)
        record = condition(instance)
        payload = {
            "instance": render_instance(lam, mu, instance),
            "conditioning": render_conditioning(record),
            "bracket": {"volume": Utils.render_interval(Fraction(0), None)},
        }
        return ResultRecord.from_error(self.command, exc, payload)

    def _degenerate_record(self, lam, mu, exc: KostkaVolError) -> ResultRecord:
        payload = {
            "instance": render_instance(lam, mu),
            "bracket": {"volume": Utils.render_interval(Fraction(0), Fraction(0))},
        }
        return ResultRecord.from_error(self.command, exc, payload)

    def run(self, source: Source) -> ResultRecord:
        lam, mu = self.resolve(source)
        try:
            instance, record, opt, bracket = self.estimate(lam, mu)
        except BoundaryInstanceError as exc:
            return self._boundary_record(lam, mu, exc)
        except DegenerateInstanceError as exc:
            return self._degenerate_record(lam, mu, exc)
        return ResultRecord(command=self.command, payload=self._estimate_payload(lam, mu, instance, record, opt, bracket))


class CertifyPipeline(EstimatePipeline):
    """Runs the estimate and the exact volume oracle and checks containment exactly."""

    command = "certify"

    def run(self, source: Source) -> ResultRecord:
        lam, mu = self.resolve(source)
        n = len(lam)
        dim = (n - 1) * (n - 2) // 2
        if dim > self.config.oracle_dim_cap:
            raise ResourceLimitError(
                f"certify needs the exact volume oracle, capped at dimension {self.config.oracle_dim_cap}",
                {"dim": dim, "dim_cap": self.config.oracle_dim_cap},
            )
        try:
            instance, record, opt, bracket = self.estimate(lam, mu)
        except BoundaryInstanceError as exc:
            return self._boundary_record(lam, mu, exc)
        except DegenerateInstanceError as exc:
            return self._degenerate_record(lam, mu, exc)
        with self.utils.timed("oracle"):
            exact = exact_kostka_volume(instance, dim_cap=self.config.oracle_dim_cap)
        passed = bracket.lower ** 2 <= exact.volume_squared and (
            bracket.upper is None or exact.volume_squared <= bracket.upper ** 2
        )
        lambda1 = instance.original_lam.parts[0]
        if lambda1 <= 0:
            lambda1 = instance.lam.parts[0]
        constant, within = ratio_envelope(bracket, n, lambda1)
        payload = self._estimate_payload(lam, mu, instance, record, opt, bracket)
        payload["oracle"] = render_volume(exact)
        payload["certified"] = "PASS" if passed else "FAIL"
        payload["ratio_envelope"] = {
            "constant": None if constant is None else Utils.render_exact(constant),
            "within_k0": within,
        }
        self.log_event("certification", metadata={"passed": passed, "n": n})
        if not passed:
            return ResultRecord(command=self.command, status="certify-fail", exit_code=6, payload=payload)
        return ResultRecord(command=self.command, payload=payload)


class OraclePipeline(Pipeline):
    """
    Runs one registered oracle on the instance.

    Parameters:
    - kind (str): Oracle name in the OracleRegistry.
    - N (int): Scale factor for the "scaling" oracle.
    - mu_b (Source): Second weight (or instance file) for the "logconcavity" oracle.
    - steps (int): Segment subdivisions for the "logconcavity" oracle.
    """

    command = "oracle"

    def __init__(self, config: Optional[RunConfig] = None, kind: str = "kostka", N: int = 1,
                 mu_b: Optional[Source] = None, steps: int = 4):
        super().__init__(config)
        self.kind = kind
        self.N = N
        self.mu_b = mu_b
        self.steps = steps

    def _second_weight(self) -> Optional[List[Fraction]]:
        if self.mu_b is None:
            return None
        if isinstance(self.mu_b, str):
            return self.utils.parse_instance_file(self.mu_b)["mu"]
        if isinstance(self.mu_b, dict):
            return [self.utils.parse_number(v, where=f"mu_b[{i}]") for i, v in enumerate(self.mu_b["mu"])]
        return [self.utils.parse_number(v, where=f"mu_b[{i}]") for i, v in enumerate(self.mu_b)]

    def run(self, source: Source) -> ResultRecord:
        lam, mu = self.resolve(source)
        try:
            oracle = OracleRegistry.get(self.kind)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        with self.utils.timed(f"oracle:{self.kind}"):
            try:
                value = oracle(
                    lam,
                    mu,
                    N=self.N,
                    mu_b=self._second_weight(),
                    steps=self.steps,
                    dim_cap=self.config.oracle_dim_cap,
                )
            except KostkaVolError:
                raise
            except ValueError as exc:
                # adapters and user oracles report bad options as plain ValueError
                raise InputError(str(exc)) from exc
        payload = {"instance": render_instance(lam, mu), "kind": self.kind}
        if self.kind == "scaling":
            payload["N"] = self.N
        payload["result"] = render_oracle_value(self.kind, value)
        return ResultRecord(command=self.command, payload=payload)


class EstimatorFactory:
    """
    A factory for the estimation pipelines.
    """

    PIPELINES = {
        "estimate": EstimatePipeline,
        "bounds": BoundsPipeline,
        "certify": CertifyPipeline,
        "oracle": OraclePipeline,
    }

    @staticmethod
    def create(kind: str, config: Optional[RunConfig] = None, **kwargs) -> Pipeline:
        """
        Create a pipeline.

        Parameters:
        - kind (str): "estimate", "oracle", "certify" or "bounds".
        - config (RunConfig, optional): Tolerances and caps; defaults when omitted.
        - kwargs: Extra options; the oracle pipeline takes kind-specific ones (`oracle`, `N`, `mu_b`, `steps`).

        Returns:
        - Pipeline: Object exposing run(source) and run_safely(source).
        """
        key = kind.lower()
        if key not in EstimatorFactory.PIPELINES:
            raise ValueError(f"Unsupported pipeline kind: {kind}. Available: {sorted(EstimatorFactory.PIPELINES)}")
        if key == "oracle":
            return OraclePipeline(
                config,
                kind=kwargs.get("oracle", "kostka"),
                N=kwargs.get("N", 1),
                mu_b=kwargs.get("mu_b"),
                steps=kwargs.get("steps", 4),
            )
        return EstimatorFactory.PIPELINES[key](config)
