"""Fits on rank-size data.

All fits work on log10(rank), log10(value) over an inclusive rank window, with
one equally weighted point per rank.
"""

import logging

import numpy as np
from scipy import optimize, stats

from punkt.framework.errors import (
    ConvergenceError,
    DegenerateFitError,
    InsufficientPointsError,
    NonPositiveValueError,
)
from punkt.framework.fitting.models import (
    BreakEstimate,
    FitWindow,
    PowerLawFit,
    StretchedExponentialFit,
    StretchedExponentialInit,
)
from punkt.framework.ranking.ranking import RankedSeries

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 3
MIN_BREAK_POINTS = 10

STRETCH_BOUNDS = (0.01, 2.0)
STRETCH_MAX_ITERATIONS = 500
STRETCH_RELATIVE_TOLERANCE = 1e-9

# Residual sums below this (per point) are treated as an exact fit.
EXACT_FIT_TOLERANCE = 1e-12

NO_BREAK_SLOPE_DELTA = 0.05
NO_BREAK_IMPROVEMENT = 0.01


def _window_points(
    series: RankedSeries, window: FitWindow
) -> tuple[np.ndarray, np.ndarray, FitWindow]:
    """Return the in-window ranks and values, and the window capped at the
    series' maximum rank."""
    r_max = min(window.r_max, series.max_rank)
    n_points = r_max - window.r_min + 1
    if n_points < MIN_FIT_POINTS:
        raise InsufficientPointsError(
            f"{series.label}: fewer than {MIN_FIT_POINTS} in-window points "
            f"(window [{window.r_min}, {window.r_max}], max rank {series.max_rank})"
        )
    ranks = series.ranks()[window.r_min - 1 : r_max]
    values = series.values()[window.r_min - 1 : r_max]
    if np.any(values <= 0):
        raise NonPositiveValueError(f"{series.label}: non-positive in-window value")
    effective = (
        window
        if r_max == window.r_max
        else FitWindow(r_min=window.r_min, r_max=r_max)
    )
    return ranks, values, effective


def fit_power_law(series: RankedSeries, window: FitWindow) -> PowerLawFit:
    """Least-squares line through log10(value) against log10(rank).

    The exponent is minus the slope and the amplitude is ten to the intercept.
    A window reaching past the last rank is capped there.
    """
    ranks, values, window = _window_points(series, window)
    log_ranks = np.log10(ranks)
    log_values = np.log10(values)

    regression = stats.linregress(log_ranks, log_values)
    predicted = regression.intercept + regression.slope * log_ranks
    residual_sum = float(np.sum((log_values - predicted) ** 2))
    if np.ptp(log_values) == 0:
        r_squared = 1.0
    else:
        total = float(np.sum((log_values - log_values.mean()) ** 2))
        r_squared = min(1.0, max(0.0, 1.0 - residual_sum / total))

    fit = PowerLawFit(
        exponent=-float(regression.slope) + 0.0,
        amplitude=float(10.0**regression.intercept),
        window=window,
        r_squared=r_squared,
        n_points=len(ranks),
        residual_sum=residual_sum,
    )
    logger.debug("%s: %s (R^2=%.4f)", series.label, fit.math_repr(), fit.r_squared)
    return fit


def default_stretched_init(
    series: RankedSeries, window: FitWindow
) -> StretchedExponentialInit:
    """Amplitude at ``r_min``, stretch 0.5, and the rate that makes the model
    pass through the value at ``r_max``."""
    ranks, values, _ = _window_points(series, window)
    amplitude = float(values[0])
    stretch = 0.5
    rate = max(0.0, float(np.log(amplitude / values[-1]) / ranks[-1] ** stretch))
    return StretchedExponentialInit(
        amplitude=amplitude, rate=rate, stretch_exponent=stretch
    )


def fit_stretched_exponential(
    series: RankedSeries,
    window: FitWindow,
    init: StretchedExponentialInit | None = None,
) -> StretchedExponentialFit:
    """Fit ``amplitude * exp(-rate * rank ** stretch)`` in log space.

    For a fixed stretch exponent the model is linear in log(amplitude) and
    rate, so those two are solved exactly and a bounded Nelder-Mead search runs
    over the stretch exponent alone, starting from ``init.stretch_exponent``
    (the amplitude and rate of ``init`` are not used). The search stops
    when updates fall below 1e-9 relative or after 500 iterations.

    Raises:
        DegenerateFitError: The in-window values are constant (the rate is not
            identifiable) or the best rate is not positive.
        ConvergenceError: The iteration cap was reached; carries the best-so-far
            parameters.
    """
    ranks, values, window = _window_points(series, window)
    log_values = np.log10(values)
    if np.ptp(log_values) == 0:
        raise DegenerateFitError(
            f"{series.label}: constant in-window values; "
            "the decay rate is not identifiable"
        )
    init = init or default_stretched_init(series, window)

    def solve_linear(stretch: float) -> tuple[float, float, float]:
        design = np.column_stack(
            [np.ones_like(ranks), -np.power(ranks, stretch) / np.log(10.0)]
        )
        (log_amplitude, rate), *_ = np.linalg.lstsq(design, log_values, rcond=None)
        residual = float(np.sum((log_values - design @ (log_amplitude, rate)) ** 2))
        return float(log_amplitude), float(rate), residual

    def profile(x: np.ndarray) -> float:
        return solve_linear(float(x[0]))[2]

    start = min(max(init.stretch_exponent, STRETCH_BOUNDS[0]), STRETCH_BOUNDS[1])
    start_residual = profile(np.array([start]))
    result = optimize.minimize(
        profile,
        x0=np.array([start]),
        method="Nelder-Mead",
        bounds=[STRETCH_BOUNDS],
        options={
            "xatol": STRETCH_RELATIVE_TOLERANCE * start,
            "fatol": STRETCH_RELATIVE_TOLERANCE * max(start_residual, 1e-300),
            "maxiter": STRETCH_MAX_ITERATIONS,
        },
    )
    stretch = float(result.x[0])
    log_amplitude, rate, residual_sum = solve_linear(stretch)

    if not result.success:
        raise ConvergenceError(
            f"{series.label}: stretched exponential did not converge in "
            f"{STRETCH_MAX_ITERATIONS} iterations ({result.message})",
            best={
                "amplitude": 10.0**log_amplitude,
                "rate": rate,
                "stretch_exponent": stretch,
                "residual_sum": residual_sum,
            },
        )
    if rate <= 0:
        raise DegenerateFitError(
            f"{series.label}: best-fit rate {rate:.3g} is not positive"
        )

    fit = StretchedExponentialFit(
        amplitude=10.0**log_amplitude,
        rate=rate,
        stretch_exponent=stretch,
        window=window,
        n_points=len(ranks),
        residual_sum=residual_sum,
    )
    logger.debug(
        "%s: %s after %d iterations", series.label, fit.math_repr(), result.nit
    )
    return fit


def _line(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope and residual sum of the least-squares line through ``(x, y)``."""
    regression = stats.linregress(x, y)
    residual = y - (regression.intercept + regression.slope * x)
    return float(regression.slope), float(np.sum(residual**2))


def _split_fits(
    x: np.ndarray, y: np.ndarray, min_side: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Two independent lines for every split position.

    Entry ``k`` splits the points into ``[0, k]`` and ``[k + 1, n)``. Returns the
    total residual and the slopes on each side; splits leaving fewer than
    ``min_side`` points on a side have an ``inf`` residual and ``nan`` slopes.
    """
    x = x - x.mean()
    y = y - y.mean()
    zero = np.zeros(1)
    sx = np.concatenate([zero, np.cumsum(x)])
    sy = np.concatenate([zero, np.cumsum(y)])
    sxx = np.concatenate([zero, np.cumsum(x * x)])
    sxy = np.concatenate([zero, np.cumsum(x * y)])
    syy = np.concatenate([zero, np.cumsum(y * y)])

    def line(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        m = hi - lo
        cx, cy = sx[hi] - sx[lo], sy[hi] - sy[lo]
        cxx = sxx[hi] - sxx[lo] - cx * cx / m
        cxy = sxy[hi] - sxy[lo] - cx * cy / m
        cyy = syy[hi] - syy[lo] - cy * cy / m
        return cxy / cxx, np.maximum(cyy - cxy * cxy / cxx, 0.0)

    n = len(x)
    totals = np.full(n, np.inf)
    slopes_before = np.full(n, np.nan)
    slopes_after = np.full(n, np.nan)
    split = np.arange(min_side - 1, n - min_side)
    if split.size:
        slopes_before[split], before = line(np.zeros_like(split), split + 1)
        slopes_after[split], after = line(split + 1, np.full_like(split, n))
        totals[split] = before + after
    return totals, slopes_before, slopes_after


def detect_break(series: RankedSeries, r_min: int = 5) -> BreakEstimate:
    """Locate the rank where the log-log rank curve changes slope.

    Every candidate break rank ``b`` with at least three points on each side of
    ``[r_min, max rank]`` is tried; independent lines are fitted to ranks
    ``r_min..b`` and ``b+1..max``. Only candidates where the curve steepens
    (``slope_after < slope_before``) model a truncation; among them the smallest
    total squared residual wins, the smaller ``b`` on ties. A curve that never
    steepens yields the best split overall, reported as not material.
    """
    above = series.max_rank - r_min
    if above < MIN_BREAK_POINTS:
        raise InsufficientPointsError(
            f"{series.label}: break detection needs at least {MIN_BREAK_POINTS} "
            f"ranks above r_min={r_min}, found {max(above, 0)}"
        )
    values = series.values()[r_min - 1 :]
    if np.any(values <= 0):
        raise NonPositiveValueError(f"{series.label}: non-positive value")
    ranks = series.ranks()[r_min - 1 :]
    x, y = np.log10(ranks), np.log10(values)

    totals, slopes_before, slopes_after = _split_fits(x, y, MIN_FIT_POINTS)
    steepening = np.where(slopes_after < slopes_before, totals, np.inf)
    k = int(np.argmin(steepening if np.isfinite(steepening).any() else totals))
    slope_before, residual_before = _line(x[: k + 1], y[: k + 1])
    slope_after, residual_after = _line(x[k + 1 :], y[k + 1 :])
    _, residual_single = _line(x, y)
    residual_split = residual_before + residual_after

    if residual_single > EXACT_FIT_TOLERANCE * len(x):
        improvement = (residual_single - residual_split) / residual_single
    else:
        improvement = 0.0
    material = slope_after < slope_before and (
        slope_before - slope_after >= NO_BREAK_SLOPE_DELTA
        or improvement >= NO_BREAK_IMPROVEMENT
    )

    break_rank = int(ranks[k])
    estimate = BreakEstimate(
        break_rank=break_rank,
        break_length=series.value_at(break_rank),
        slope_before=slope_before,
        slope_after=slope_after,
        residual_single=residual_single,
        residual_split=residual_split,
        improvement=improvement,
        material=material,
    )
    if material:
        logger.debug(
            "%s: break at rank %d (length %s), slopes %.3f -> %.3f",
            series.label,
            break_rank,
            estimate.break_length,
            slope_before,
            slope_after,
        )
    else:
        logger.debug("%s: no material break", series.label)
    return estimate
