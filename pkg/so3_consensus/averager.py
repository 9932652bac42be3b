"""Running the averaging methods by name."""

from __future__ import annotations

import logging

from .exceptions import RotationAverageError
from .flow import run_flow
from .means import karcher_mean, projected_mean
from .models import FlowConfig, FlowResult, KarcherConfig, MethodResult, WeightedDataset

logger = logging.getLogger(__name__)

KL = "kl"
KLW = "klw"
PROJECTED = "projected"
GEODESIC = "geodesic"
METHODS = (KL, KLW, PROJECTED, GEODESIC)


class RotationAverager:
    """Computes rotation averages with the consensus flow and the baselines."""

    def __init__(
        self,
        flow_config: FlowConfig | None = None,
        karcher_config: KarcherConfig | None = None,
    ):
        """Initialize averager.

        Args:
            flow_config: Parameters for the kl and klw methods
            karcher_config: Parameters for the geodesic method
        """
        self.flow_config = flow_config or FlowConfig()
        self.karcher_config = karcher_config or KarcherConfig()
        self.flows: dict[str, FlowResult] = {}
        self.errors: list[str] = []

    def average(self, data: WeightedDataset, method: str) -> MethodResult:
        """Average a dataset with one method.

        kl ignores the weights; klw, projected and geodesic use them.

        Args:
            data: Rotations and weights
            method: One of "kl", "klw", "projected", "geodesic"

        Returns:
            MethodResult; flow methods carry their status and T

        Raises:
            ValueError: If the method is unknown
            DegenerateProjectionError: From the projected and geodesic methods
            NoConvergenceError: From the geodesic method
        """
        if method in (KL, KLW):
            if method == KL and not data.is_unweighted:
                logger.warning("kl ignores the dataset weights; use klw to apply them")
            flow_data = data.with_unit_weights() if method == KL else data
            flow = run_flow(flow_data, self.flow_config)
            self.flows[method] = flow
            return MethodResult(
                method=method,
                average=flow.average,
                status=flow.status.value,
                termination_time=flow.termination_time,
                iterations=flow.steps,
            )
        if method == PROJECTED:
            return MethodResult(method=method, average=projected_mean(data))
        if method == GEODESIC:
            rotation, iterations = karcher_mean(data, self.karcher_config)
            return MethodResult(method=method, average=rotation, iterations=iterations)
        raise ValueError(f"Unknown method: {method}. Use one of {', '.join(METHODS)}")

    def compare(
        self, data: WeightedDataset, methods: list[str] | None = None
    ) -> list[MethodResult]:
        """Run several methods, keeping going when one of them fails.

        Args:
            data: Rotations and weights
            methods: Methods to run; defaults to kl, projected and geodesic,
                plus klw when the dataset is weighted

        Returns:
            Results of the methods that produced an average; failures are
            recorded in ``errors``
        """
        if methods is None:
            methods = [KL, PROJECTED, GEODESIC]
            if not data.is_unweighted:
                methods.insert(1, KLW)

        self.errors = []
        results = []
        for method in methods:
            try:
                results.append(self.average(data, method))
            except RotationAverageError as e:
                logger.error(f"{method} failed: {e}")
                self.errors.append(f"{method}: {e}")
        return results
