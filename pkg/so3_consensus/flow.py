"""Non-Abelian Kuramoto consensus flow on SO(3).

Each member follows

    dR_j/dt = (1/N) * sum_i k_i (R_i - R_j R_i^T R_j)

which, with S = sum_i k_i R_i, collapses to (S - R_j S^T R_j) / N. Members
are integrated with classical RK4 at a fixed step and re-projected onto SO(3)
after every step. The run stops once the order parameter det(R_hat) is within
epsilon of 1.
"""

from __future__ import annotations

import logging
from collections import deque

import numpy as np

from .exceptions import DegenerateProjectionError, SizeMismatchError
from .models import (
    FlowConfig,
    FlowResult,
    FlowState,
    FlowStatus,
    Stack,
    TraceRecord,
    WeightedDataset,
)
from .so3 import Matrix, project_stack, project_to_so3

logger = logging.getLogger(__name__)


def _check_sizes(state: FlowState, data: WeightedDataset) -> None:
    if len(state) != len(data.weights):
        raise SizeMismatchError(
            f"Population has {len(state)} members but {len(data.weights)} weights"
        )


def _rhs(rotations: Stack, weights: np.ndarray) -> Stack:
    n = len(rotations)
    coupling = np.tensordot(weights, rotations, axes=1)
    derivative: Stack = (coupling - rotations @ coupling.T @ rotations) / n
    return derivative


def flow_rhs(state: FlowState, data: WeightedDataset) -> Stack:
    """Time derivative of every member, in O(N).

    Args:
        state: Current population
        data: Supplies the weights k_i, paired index-wise with the members

    Returns:
        Array of shape (N, 3, 3); R_j^T dR_j/dt is skew-symmetric

    Raises:
        SizeMismatchError: If the population and weight counts differ
    """
    _check_sizes(state, data)
    return _rhs(state.rotations, data.weights)


def flow_rhs_pairwise(state: FlowState, data: WeightedDataset) -> Stack:
    """Reference O(N^2) evaluation of the flow, term by term."""
    _check_sizes(state, data)
    rotations = state.rotations
    n = len(rotations)
    derivative = np.zeros_like(rotations)
    for j in range(n):
        r_j = rotations[j]
        for i in range(n):
            r_i = rotations[i]
            derivative[j] += data.weights[i] * (r_i - r_j @ r_i.T @ r_j)
    derivative /= n
    return derivative


def rk4_step(
    state: FlowState, data: WeightedDataset, delta: float, project: bool = True
) -> FlowState:
    """Advance the population by one classical Runge-Kutta step.

    Args:
        state: Population at time t
        data: Supplies the weights
        delta: Step size in flow time
        project: Re-project every member onto SO(3) after the step

    Returns:
        Population at time t + delta
    """
    _check_sizes(state, data)
    if delta <= 0:
        raise ValueError("Step size must be positive")

    r = state.rotations
    w = data.weights
    k1 = _rhs(r, w)
    k2 = _rhs(r + 0.5 * delta * k1, w)
    k3 = _rhs(r + 0.5 * delta * k2, w)
    k4 = _rhs(r + delta * k3, w)
    advanced = r + (delta / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    if project:
        advanced = project_stack(advanced)
    return FlowState(advanced, state.time + delta)


def potential(state: FlowState, data: WeightedDataset) -> float:
    """Alignment potential -(1/(2N^2)) sum_i sum_j k_i Tr(R_i^T R_j).

    With unit weights this lies in [-3/2, 3/2] and equals -3/2 exactly at
    consensus.
    """
    _check_sizes(state, data)
    n = len(state)
    weighted_sum = np.tensordot(data.weights, state.rotations, axes=1)
    plain_sum = state.rotations.sum(axis=0)
    return -float(np.sum(weighted_sum * plain_sum)) / (2.0 * n * n)


def weighted_energy(state: FlowState, data: WeightedDataset) -> float:
    """Return -(1/(2N^2)) ||sum_i k_i R_i||_F^2.

    Non-increasing along the weighted flow for any nonnegative weights; it
    coincides with :func:`potential` when all weights are 1.
    """
    _check_sizes(state, data)
    n = len(state)
    coupling = np.tensordot(data.weights, state.rotations, axes=1)
    return -float(np.sum(coupling * coupling)) / (2.0 * n * n)


def order_parameter(state: FlowState) -> float:
    """Determinant of the unweighted mean of the population; 1 only at consensus."""
    return float(np.linalg.det(state.rotations.mean(axis=0)))


def average_state(state: FlowState) -> Matrix:
    """Projected mean of the population members."""
    return project_to_so3(state.rotations.mean(axis=0))


def run_flow(data: WeightedDataset, config: FlowConfig | None = None) -> FlowResult:
    """Integrate the consensus flow from the data until the population aligns.

    The population starts at R_j(0) = R_j. After every RK4 step the stopping
    test 1 - det(R_hat) < epsilon is evaluated. A run whose potential moves
    less than ``stall_tolerance`` over ``stall_window`` flow time without
    aligning ends as NonConsensus; one that reaches ``t_max`` ends as
    MaxTimeExceeded. Weights are taken from the dataset as given, so unit
    weights give the unweighted algorithm.

    Args:
        data: Rotations and weights
        config: Flow parameters (defaults if None)

    Returns:
        FlowResult with the projected mean of the final population
    """
    config = config or FlowConfig()
    logger.info(
        f"Starting consensus flow: N={len(data)}, weighted={not data.is_unweighted}, "
        f"delta={config.delta}, epsilon={config.epsilon}"
    )

    state = FlowState(data.rotations.copy(), 0.0)
    trace: list[TraceRecord] = []
    window_steps = max(1, int(round(config.stall_window / config.delta)))
    recent_potentials: deque[float] = deque(maxlen=window_steps + 1)
    max_steps = int(np.floor(config.t_max / config.delta + 1e-9))

    steps = 0
    status = FlowStatus.MAX_TIME_EXCEEDED
    while True:
        rho = order_parameter(state)
        current = potential(state, data)
        if config.record_trace:
            trace.append(TraceRecord(state.time, current, rho))

        if 1.0 - rho < config.epsilon:
            status = FlowStatus.CONVERGED
            break

        recent_potentials.append(current)
        if (
            len(recent_potentials) == recent_potentials.maxlen
            and abs(current - recent_potentials[0]) < config.stall_tolerance
        ):
            logger.warning(
                f"Flow stalled at t={state.time:.2f} without consensus "
                f"(1 - det R_hat = {1.0 - rho:.3e})"
            )
            status = FlowStatus.NON_CONSENSUS
            break

        if steps >= max_steps:
            logger.warning(f"Flow reached t_max={config.t_max} without consensus")
            break

        state = rk4_step(state, data, config.delta)
        steps += 1
        # Integer multiples keep the trace spacing exact
        state.time = steps * config.delta

    try:
        average = average_state(state)
    except DegenerateProjectionError:
        logger.warning("Final population mean is degenerate; returning the first member")
        average = state.rotations[0].copy()

    logger.info(f"Consensus flow finished: status={status.value}, T={state.time:.2f}")
    return FlowResult(
        average=average,
        termination_time=state.time,
        status=status,
        trace=trace,
        steps=steps,
        final_state=state,
    )
