from enum import Enum
from typing import Optional, Union
import csv
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from common.constants.defaults import CURVE_NORMALIZATION_TOLERANCE
from exceptions.speedup_exceptions import (
    InvalidSpeedupException,
    SpeedupSpecParseException,
    InvalidCurveException,
    DegenerateCurveException,
    InvalidServerCountException,
)


class SpeedupKind(str, Enum):
    POWER_LAW = "power_law"
    AMDAHL = "amdahl"


# Spec prefixes accepted by SpeedupFunction.from_spec
_SPEC_KINDS = {
    "power": (SpeedupKind.POWER_LAW, "p"),
    "powerlaw": (SpeedupKind.POWER_LAW, "p"),
    "power_law": (SpeedupKind.POWER_LAW, "p"),
    "amdahl": (SpeedupKind.AMDAHL, "f"),
}


class SpeedupFunction(BaseModel):
    """
    Service rate s(k) of a job holding k servers.

    PowerLaw: s(k) = k^p with 0 < p < 1.
    Amdahl:   s(k) = 1 / ((1 - f) + f / k) with 0 < f < 1.

    Both give s(0) = 0 and s(1) = 1. Fractional k below 1 is allowed; for the
    power law it evaluates to k^p > k, which is how the divisible-pool model
    reads literally.
    """

    model_config = ConfigDict(frozen=True)

    kind: SpeedupKind
    p: Optional[float] = None  # power-law exponent
    f: Optional[float] = None  # Amdahl parallelizable fraction

    @model_validator(mode="after")
    def validate_parameters(self):
        if self.kind == SpeedupKind.POWER_LAW:
            if self.f is not None:
                raise InvalidSpeedupException(kind=self.kind.value)
            if self.p is None or not 0.0 < self.p < 1.0:
                raise InvalidSpeedupException(self.kind.value, "p", self.p)
        else:
            if self.p is not None:
                raise InvalidSpeedupException(kind=self.kind.value)
            if self.f is None or not 0.0 < self.f < 1.0:
                raise InvalidSpeedupException(self.kind.value, "f", self.f)
        return self

    @classmethod
    def power_law(cls, p: float) -> "SpeedupFunction":
        return cls(kind=SpeedupKind.POWER_LAW, p=p)

    @classmethod
    def amdahl(cls, f: float) -> "SpeedupFunction":
        return cls(kind=SpeedupKind.AMDAHL, f=f)

    @classmethod
    def from_spec(cls, spec: str) -> "SpeedupFunction":
        """
        Parse 'power:p=0.5' or 'amdahl:f=0.9'.

        Args:
            spec: Kind prefix and a single key=value parameter.

        Returns:
            SpeedupFunction: The parsed function.
        """
        kind_text, sep, param_text = spec.strip().partition(":")
        if not sep or kind_text.lower() not in _SPEC_KINDS:
            raise SpeedupSpecParseException(spec, "expected 'power:p=<p>' or 'amdahl:f=<f>'")

        kind, key = _SPEC_KINDS[kind_text.lower()]
        name, eq, value = param_text.partition("=")
        if not eq or name.strip() != key:
            raise SpeedupSpecParseException(spec, f"expected parameter '{key}'")
        try:
            number = float(value)
        except ValueError:
            raise SpeedupSpecParseException(spec, f"'{value}' is not a number")

        return cls(kind=kind, **{key: number})

    @property
    def is_power_law(self) -> bool:
        return self.kind == SpeedupKind.POWER_LAW

    @property
    def label(self) -> str:
        if self.is_power_law:
            return f"power:p={self.p}"
        return f"amdahl:f={self.f}"

    def evaluate(self, k: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """
        Service rate at k servers. Accepts a scalar or an array of server counts.
        """
        servers = np.asarray(k, dtype=float)
        if np.any(servers < 0) or np.any(np.isnan(servers)):
            raise InvalidServerCountException(k)

        if self.is_power_law:
            rate = np.power(servers, self.p)
        else:
            rate = servers / ((1.0 - self.f) * servers + self.f)

        if rate.ndim == 0:
            return float(rate)
        return rate


class CurvePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    cores: float
    speedup: float

    @field_validator("cores", "speedup")
    def validate_positive(cls, v):
        if not v > 0 or math.isinf(v):
            raise InvalidCurveException(f"cores and speedup must be positive and finite, got {v}")
        return v


class MeasuredCurve(BaseModel):
    """Measured speedup curve: (cores, speedup) points with strictly increasing cores."""

    model_config = ConfigDict(frozen=True)

    points: tuple[CurvePoint, ...]

    @field_validator("points")
    def validate_points(cls, v):
        if len(v) < 2:
            raise InvalidCurveException(f"need at least 2 points, got {len(v)}")

        for previous, current in zip(v, v[1:]):
            if not current.cores > previous.cores:
                raise InvalidCurveException(
                    f"cores must be strictly increasing, {current.cores} follows {previous.cores}"
                )

        for point in v:
            if point.cores == 1.0 and abs(point.speedup - 1.0) > CURVE_NORMALIZATION_TOLERANCE:
                raise InvalidCurveException(
                    f"speedup at 1 core must be 1, got {point.speedup}"
                )
        return v

    @classmethod
    def from_pairs(cls, pairs) -> "MeasuredCurve":
        return cls(points=tuple(CurvePoint(cores=c, speedup=s) for c, s in pairs))

    @classmethod
    def from_csv(cls, path: str) -> "MeasuredCurve":
        """
        Load a curve from a CSV with header 'cores,speedup'. Exact duplicate rows
        are dropped; two rows with the same cores and different speedups are rejected.
        """
        try:
            with open(path, newline="", encoding="utf-8") as handle:
                reader = csv.DictReader(handle)
                if reader.fieldnames is None or [
                    name.strip() for name in reader.fieldnames
                ] != ["cores", "speedup"]:
                    raise InvalidCurveException("header must be 'cores,speedup'", path)
                rows = []
                for line_number, row in enumerate(reader, start=2):
                    try:
                        rows.append((float(row["cores"]), float(row["speedup"])))
                    except (TypeError, ValueError):
                        raise InvalidCurveException(f"unparseable row {line_number}", path)
        except OSError as exc:
            raise InvalidCurveException(str(exc), path)

        unique = sorted(set(rows))
        cores = [c for c, _ in unique]
        if unique and len(set(cores)) == 1:
            raise DegenerateCurveException(cores)
        if len(set(cores)) != len(cores):
            raise InvalidCurveException("same core count measured with different speedups", path)

        return cls.from_pairs(unique)

    @property
    def cores(self) -> np.ndarray:
        return np.array([point.cores for point in self.points])

    @property
    def speedups(self) -> np.ndarray:
        return np.array([point.speedup for point in self.points])

    def renormalized(self, base_cores: float) -> "MeasuredCurve":
        """
        Re-express the curve relative to the measurement at base_cores, so that
        point becomes (1, 1).
        """
        base = [point for point in self.points if point.cores == base_cores]
        if not base:
            raise InvalidCurveException(f"no measurement at {base_cores} cores")
        reference = base[0]
        return MeasuredCurve.from_pairs(
            (point.cores / reference.cores, point.speedup / reference.speedup)
            for point in self.points
        )


class PowerLawFit(BaseModel):
    """Result of fitting s(k) = k^p to a measured curve."""

    speedup: SpeedupFunction
    raw_p: float  # least-squares slope before clamping
    clamped: bool
    residual_sum_squares: float
    n_points: int
