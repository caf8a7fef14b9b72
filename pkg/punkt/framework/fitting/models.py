"""Rank-curve models and fit results."""

from abc import ABC, abstractmethod

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class FitWindow(BaseModel):
    """Inclusive rank range ``[r_min, r_max]`` used by a fit."""

    model_config = ConfigDict(frozen=True)

    r_min: int = Field(ge=1)
    r_max: int

    @model_validator(mode="after")
    def _check_order(self) -> "FitWindow":
        if self.r_min >= self.r_max:
            raise ValueError(f"r_min {self.r_min} must be below r_max {self.r_max}")
        return self


class ModelFit(BaseModel, ABC):
    """A fitted rank model.

    ``residual_sum`` is the sum of squared log10 residuals over the window, so
    fits of different models over the same window can be compared directly.
    """

    model_config = ConfigDict(frozen=True)

    window: FitWindow
    n_points: int
    residual_sum: float

    @property
    @abstractmethod
    def model(self) -> str:
        raise NotImplementedError()

    @abstractmethod
    def predict(self, ranks: np.ndarray) -> np.ndarray:
        raise NotImplementedError()

    @abstractmethod
    def params(self) -> dict[str, float]:
        raise NotImplementedError()

    def math_repr(self) -> str:
        return self.model


class PowerLawFit(ModelFit):
    """``value = amplitude * rank ** -exponent``."""

    exponent: float
    amplitude: float = Field(gt=0)
    r_squared: float = Field(ge=0, le=1)

    @property
    def model(self) -> str:
        return "power_law"

    def predict(self, ranks: np.ndarray) -> np.ndarray:
        return self.amplitude * np.power(ranks, -self.exponent)

    def params(self) -> dict[str, float]:
        return {"exponent": self.exponent, "amplitude": self.amplitude}

    def math_repr(self) -> str:
        return f"l(R) = {self.amplitude:.6g} * R^-{self.exponent:.4f}"


class StretchedExponentialFit(ModelFit):
    """``value = amplitude * exp(-rate * rank ** stretch_exponent)``."""

    amplitude: float = Field(gt=0)
    rate: float = Field(gt=0)
    stretch_exponent: float = Field(gt=0, le=2)

    @property
    def model(self) -> str:
        return "stretched_exponential"

    def predict(self, ranks: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(
            -self.rate * np.power(ranks, self.stretch_exponent)
        )

    def params(self) -> dict[str, float]:
        return {
            "amplitude": self.amplitude,
            "rate": self.rate,
            "stretch_exponent": self.stretch_exponent,
        }

    def math_repr(self) -> str:
        return (
            f"l(R) = {self.amplitude:.6g} * exp(-{self.rate:.6g} * "
            f"R^{self.stretch_exponent:.4f})"
        )


class StretchedExponentialInit(BaseModel):
    """Starting point for the stretched-exponential search.

    Only ``stretch_exponent`` seeds the search. Amplitude and rate are solved
    exactly for each trial stretch, so their values here only describe the
    starting curve and do not change the result.
    """

    model_config = ConfigDict(frozen=True)

    amplitude: float = Field(gt=0)
    rate: float = Field(ge=0)
    stretch_exponent: float = Field(default=0.5, gt=0, le=2)


class BreakEstimate(BaseModel):
    """Large-rank change of slope in a log-log rank curve.

    Slopes are log-log slopes (negative for decreasing curves). ``material`` is
    true only when the curve steepens past the break (``slope_after`` below
    ``slope_before``) and either the slopes differ by at least 0.05 or splitting
    improves the single-line residual by at least 1%.
    """

    model_config = ConfigDict(frozen=True)

    break_rank: int
    break_length: int | float
    slope_before: float
    slope_after: float
    residual_single: float
    residual_split: float
    improvement: float
    material: bool
