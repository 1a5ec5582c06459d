"""Greedy one-angle-per-iteration estimators over the covariance square root.

OMP scores candidates by correlation with the square-root residual
covariance; OLS scores the least-squares improvement of refitting all
selected angles plus the candidate, reduced to an efficient ratio form
(residual correlation over projected steering norm).  Both recompute the
complement projector from the full selected steering matrix each iteration —
selection counts are small, and recomputation avoids rank-one update drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from doalab.fastgrid import DoaGrid, Pseudospectrum, objective_values
from doalab.linalg import projectors
from doalab.scenario import steering_matrix

GREEDY_METHODS = ("omp", "ols")


@dataclass(frozen=True)
class GreedyState:
    """Selection state after k greedy iterations.

    Attributes:
        selected: Angles chosen so far, in selection order.
        Pc: M x M projector onto the complement of their steering span.
        residual_sqrt: Pc applied to the initial covariance square root.
        k: Iteration count (= len(selected)).
        sqrt0: The initial square root, kept so updates recompute the
            residual from scratch instead of compounding projections.
        phase_factor: Element phase factor used to rebuild steering vectors.
    """

    selected: tuple
    Pc: np.ndarray
    residual_sqrt: np.ndarray
    k: int
    sqrt0: np.ndarray
    phase_factor: float = math.pi


def initial_state(sqrt_R: np.ndarray, phase_factor: float = math.pi) -> GreedyState:
    """State before any selection: Pc = I, residual = the full square root."""
    M = sqrt_R.shape[0]
    return GreedyState(
        selected=(),
        Pc=np.eye(M, dtype=complex),
        residual_sqrt=np.asarray(sqrt_R, dtype=complex),
        k=0,
        sqrt0=np.asarray(sqrt_R, dtype=complex),
        phase_factor=phase_factor,
    )


def greedy_objective(
    state: GreedyState,
    grid: DoaGrid,
    method: str = "omp",
    evaluator: str = "fft",
) -> Pseudospectrum:
    """Candidate scores for the next angle.

    OMP: ``||residual_sqrt^H a(u)||^2``.  OLS: the same numerator divided by
    ``||Pc a(u)||^2``; candidates whose projected steering norm falls below
    1e-9*M (already selected or numerically degenerate) are masked to -inf.
    """
    if method not in GREEDY_METHODS:
        raise ValueError(f"unknown greedy method: {method!r}")
    values = objective_values(
        state.residual_sqrt, grid, method, evaluator, pc=state.Pc
    )
    return Pseudospectrum(values=values, grid=grid)


def greedy_update(state: GreedyState, new_angle: float) -> GreedyState:
    """Add one angle and refresh the projector and residual.

    The complement projector is recomputed from the full steering matrix of
    all selected angles, and the residual square root is re-derived from the
    initial one, so the state is always bit-recomputable from scratch.

    Raises:
        ValueError: If the angle was already selected.
        numpy.linalg.LinAlgError: If the selected steering matrix becomes
            rank-deficient (near-duplicate angles).
    """
    if new_angle in state.selected:
        raise ValueError(f"angle {new_angle} already selected")
    selected = state.selected + (float(new_angle),)
    M = state.Pc.shape[0]
    A = steering_matrix(selected, M, state.phase_factor)
    _, Pc = projectors(A)
    return GreedyState(
        selected=selected,
        Pc=Pc,
        residual_sqrt=Pc @ state.sqrt0,
        k=state.k + 1,
        sqrt0=state.sqrt0,
        phase_factor=state.phase_factor,
    )


def greedy_estimate(
    sqrt_R: np.ndarray,
    K: int,
    grid: DoaGrid,
    method: str = "omp",
    evaluator: str = "fft",
) -> np.ndarray:
    """Run K greedy iterations and return the selected angles in order.

    Args:
        sqrt_R: M x M covariance square root.
        K: Number of angles to select, 1 <= K < M.
        grid: Search grid.
        method: "omp" or "ols".
        evaluator: "fft" or "direct".
    """
    M = sqrt_R.shape[0]
    if not 1 <= K < M:
        raise ValueError(f"K must satisfy 1 <= K < M, got K={K}, M={M}")
    state = initial_state(sqrt_R, grid.phase_factor)
    for _ in range(K):
        ps = greedy_objective(state, grid, method, evaluator)
        state = greedy_update(state, grid.angles[int(np.argmax(ps.values))])
    return np.array(state.selected)
