"""
Invariant check suite behind `simulate.py check`.

Each check returns a CheckResult (pass / fail / skipped) with the measured
deviation and its tolerance. Dense-oracle checks are skipped above
ORACLE_MAX_POINTS.
"""

import logging
from typing import Callable

import numpy as np

from analytics.records import CheckResult
from core.config import Experiment
from core.errors import TeleportationError, ZeroWeightOutcome
from core.freqgrid import dft_orthogonality_defect
from core.states import (
    EprSpec,
    MultiChannelState,
    SinglePhotonAmplitude,
    epr_state,
    partial_trace,
    two_peak_packet,
)
from optics.scheme import SchemeConfig, run_scheme
from oracle.dense import dense_completeness, dense_condition, dense_weight
from protocol.povm import (
    PovmOutcome,
    completeness_defect,
    condition_on_outcome,
    outcome_distribution,
    outcome_weight,
    time_variation,
)

log = logging.getLogger(__name__)

ORACLE_MAX_POINTS = 8
ORACLE_CASES = 50
PATH_DETECTORS = 10

TOL_DFT = 1e-10
TOL_COMPLETENESS = 1e-8
TOL_TOTAL = 1e-8
TOL_NO_INFO = 1e-12
TOL_CONDITIONING = 1e-9
TOL_PATH = 1e-9
TOL_ORACLE = 1e-10


def _result(name: str, value: float, tol: float, detail: str = "") -> CheckResult:
    status = "pass" if value <= tol else "fail"
    return CheckResult(name, status, float(value), tol, detail)


def comparison_packet(exp: Experiment) -> SinglePhotonAmplitude:
    """Two-peak packet well inside the grid, distinct from any single-peak input."""
    grid = exp.grid
    mid = (grid.omega_min + grid.omega_max) / 2
    span = grid.omega_max - grid.omega_min
    return two_peak_packet(grid, mid, span / 6, span / 24)


# ── Checks ────────────────────────────────────────────────────────────────────

def check_dft(exp: Experiment, **_) -> CheckResult:
    return _result("dft_orthogonality", dft_orthogonality_defect(exp.grid), TOL_DFT)


def check_completeness(exp: Experiment, truncate_time_grid: bool = False) -> CheckResult:
    defect = completeness_defect(exp.grid, truncate_time_grid)
    detail = "time grid truncated to half its nodes" if truncate_time_grid else ""
    return _result("completeness", defect, TOL_COMPLETENESS, detail)


def check_total_probability(exp: Experiment, **_) -> CheckResult:
    epr = epr_state(exp.grid, exp.epr_spec)
    dist = outcome_distribution(epr, exp.packet)
    expected = epr.norm_sq * exp.packet.norm_sq
    return _result("total_probability", abs(dist.total - expected) / expected, TOL_TOTAL)


def check_no_information(exp: Experiment, **_) -> CheckResult:
    epr = epr_state(exp.grid, EprSpec(exp.pump))
    m = exp.grid.sums.index_of(exp.pump)
    first = outcome_distribution(epr, exp.packet)
    second = outcome_distribution(epr, comparison_packet(exp))
    a = first.normalized()[:, m]
    b = second.normalized()[:, m]
    spread = max(time_variation(first, m), time_variation(second, m))
    mismatch = float(np.max(np.abs(a - b)) / np.max(np.abs(a)))
    return _result("no_information", max(spread, mismatch), TOL_NO_INFO,
                   f"t-spread {spread:.3e}, packet mismatch {mismatch:.3e}")


def check_conditioning(exp: Experiment, **_) -> CheckResult:
    grid = exp.grid
    epr = epr_state(grid, exp.epr_spec)
    dist = outcome_distribution(epr, exp.packet)
    mixture = np.zeros((grid.n_points, grid.n_points), dtype=complex)
    for k, m in zip(*np.nonzero(dist.weights)):
        outcome = PovmOutcome.from_indices(grid, int(k), int(m))
        try:
            rho = condition_on_outcome(epr, exp.packet, outcome)
        except ZeroWeightOutcome:
            continue
        mixture += dist.weights[k, m] * rho.mat
    full = MultiChannelState(grid, np.einsum("ab,c->abc", epr.amps, exp.packet.amps), (1, 2, 3))
    reduced = partial_trace(full, keep=2)
    return _result("conditioning_consistency", float(np.max(np.abs(mixture - reduced.mat))), TOL_CONDITIONING)


def check_path_equivalence(exp: Experiment, **_) -> CheckResult:
    grid = exp.grid
    epr = epr_state(grid, EprSpec(exp.pump))
    p = grid.sums.index_of(exp.pump)
    order = sorted(range(grid.sums.n_points), key=lambda m: (abs(m - p), m))
    worst, used = 0.0, 0
    for m in order:
        if used == PATH_DETECTORS:
            break
        detector = float(grid.sums.nodes[m])
        result = run_scheme(SchemeConfig(grid, exp.chi[0], exp.pump, exp.packet, detector), quiet=True)
        if result.normalized_state is None:
            continue
        try:
            rho = condition_on_outcome(epr, exp.packet, PovmOutcome.at(grid, 0.0, detector))
        except ZeroWeightOutcome:
            continue
        worst = max(worst, float(np.max(np.abs(result.normalized_state.mat - rho.mat))))
        used += 1
    return _result("path_equivalence", worst, TOL_PATH, f"{used} detector frequencies compared")


def check_oracle_completeness(exp: Experiment, truncate_time_grid: bool = False) -> CheckResult:
    if exp.grid.n_points > ORACLE_MAX_POINTS:
        return CheckResult("oracle_completeness", "skipped", detail=f"n > {ORACLE_MAX_POINTS}")
    fast = completeness_defect(exp.grid, truncate_time_grid)
    dense = dense_completeness(exp.grid, truncate_time_grid)
    return _result("oracle_completeness", abs(fast - dense), TOL_ORACLE)


def check_oracle_equivalence(exp: Experiment, **_) -> CheckResult:
    grid = exp.grid
    if grid.n_points > ORACLE_MAX_POINTS:
        return CheckResult("oracle_equivalence", "skipped", detail=f"n > {ORACLE_MAX_POINTS}")
    rng = np.random.default_rng(exp.config.outcome.seed)
    epr = epr_state(grid, exp.epr_spec)
    worst, cases = 0.0, 0
    for _ in range(20 * ORACLE_CASES):
        if cases == ORACLE_CASES:
            break
        raw = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
        packet = SinglePhotonAmplitude(grid, raw).normalized()
        outcome = PovmOutcome.from_indices(grid, int(rng.integers(grid.n_points)),
                                           int(rng.integers(grid.sums.n_points)))
        try:
            fast = condition_on_outcome(epr, packet, outcome)
        except ZeroWeightOutcome:
            continue
        dense = dense_condition(grid, epr, packet, outcome)
        worst = max(worst,
                    float(np.max(np.abs(fast.mat - dense.mat))),
                    abs(outcome_weight(epr, packet, outcome) - dense_weight(grid, epr, packet, outcome)))
        cases += 1
    if cases < ORACLE_CASES:
        return CheckResult("oracle_equivalence", "fail", detail=f"only {cases} cases had nonzero weight")
    return _result("oracle_equivalence", worst, TOL_ORACLE, f"{cases} randomized cases")


CHECKS: list[Callable[..., CheckResult]] = [
    check_dft,
    check_completeness,
    check_total_probability,
    check_no_information,
    check_conditioning,
    check_path_equivalence,
    check_oracle_completeness,
    check_oracle_equivalence,
]


def run_checks(exp: Experiment, truncate_time_grid: bool = False) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        try:
            result = check(exp, truncate_time_grid=truncate_time_grid)
        except TeleportationError as exc:
            result = CheckResult(check.__name__.removeprefix("check_"), "fail", detail=str(exc))
        log.info("check %-26s %s", result.name, result.status)
        results.append(result)
    return results
