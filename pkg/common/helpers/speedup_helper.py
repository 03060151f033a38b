from aws_lambda_powertools import Logger
import numpy as np

from common.constants.defaults import FIT_CLAMP
from common.constants.services import SERVICE
from common.models.speedup import MeasuredCurve, PowerLawFit, SpeedupFunction
from exceptions.speedup_exceptions import DegenerateCurveException


class SpeedupHelper:
    """
    Fits the power-law family s(k) = k^p to measured speedup curves.
    """

    def __init__(self, run_id: str = None):
        self.logger = Logger(service=SERVICE)
        if run_id:
            self.logger.append_keys(run_id=run_id)

    def load_curve(self, path: str) -> MeasuredCurve:
        curve = MeasuredCurve.from_csv(path)
        self.logger.info(f"Loaded {len(curve.points)} speedup points from {path}")
        return curve

    def fit_power_law(self, curve: MeasuredCurve) -> PowerLawFit:
        """
        Least-squares slope through the origin of log(speedup) against log(cores).

        Args:
            curve: A validated measured curve.

        Returns:
            PowerLawFit: The fitted power law; `clamped` is set when the slope
            fell outside [1e-6, 1 - 1e-6] and was pulled back into range.
        """
        log_cores = np.log(curve.cores)
        log_speedups = np.log(curve.speedups)

        denominator = float(np.dot(log_cores, log_cores))
        if denominator == 0.0:
            raise DegenerateCurveException(curve.cores.tolist())

        raw_p = float(np.dot(log_cores, log_speedups)) / denominator
        p = min(max(raw_p, FIT_CLAMP), 1.0 - FIT_CLAMP)
        clamped = p != raw_p
        residuals = log_speedups - p * log_cores

        if clamped:
            self.logger.warning(f"Fitted exponent {raw_p} clamped to {p}")
        else:
            self.logger.info(f"Fitted exponent p={p} over {len(curve.points)} points")

        return PowerLawFit(
            speedup=SpeedupFunction.power_law(p),
            raw_p=raw_p,
            clamped=clamped,
            residual_sum_squares=float(np.dot(residuals, residuals)),
            n_points=len(curve.points),
        )
