import logging
import math

import numpy as np
import pytest

from src.errors import InvalidArgument, InvalidPlan, MatchViolation, NoSolution, NotCyclic
from src.holonomy.conditions import check_cyclic, check_geometric
from src.holonomy.gate_extraction import (
    amplitude_error_sensitivity,
    closed_form_beta,
    compose_gates,
    extract_gate,
    total_rotation_angle,
)
from src.holonomy.matching import (
    BRANCHES,
    continue_path,
    detuning_for,
    duration_for,
    match_phase,
    match_rotation_angle,
)
from src.lambda_system.bright_dark import BrightFrame, SegmentSpec, bright_dark
from src.operators.matrix_algebra import angle_difference, is_unitary, wrap_angle
from src.propagation.evolve_path import PathPlan, evolve_path

ETA1 = math.atan(4 / 3)
OMEGA = 4 * math.pi / 15
THETA2 = 0.76539282622045379
PHI2 = -2.6895892692549883
# arg(0.5 + 0.3 sqrt(3) i) - 0.2 pi; the resonant second segment adds no phase
BETA = 0.17631514638315382
TOTAL_ANGLE = 1.8125903774170515


def perturbed(plan, shift=0.3):
    first, second = plan.segments
    return PathPlan((first, second.with_changes(laser_phase=second.laser_phase + shift)), plan.initial_frame)


def random_matched_plan(rng):
    """Two segments in one random bright frame, closed by the matching rules."""
    while True:
        eta1, eta2, theta1 = rng.uniform(0.15, math.pi - 0.15, size=3)
        if math.sin(theta1) * math.sin(eta1) < math.sin(eta2) - 0.02:
            break
    branch = BRANCHES[rng.integers(2)]
    frame = BrightFrame(float(rng.uniform(0, math.pi / 2)), float(rng.uniform(0, 2 * math.pi)))
    omega = float(rng.uniform(0.3, 2.0))
    phi1 = float(rng.uniform(0, 2 * math.pi))

    theta2 = match_rotation_angle(theta1, eta1, eta2, branch)
    delta1, delta2 = detuning_for(eta1, omega), detuning_for(eta2, omega)
    first = SegmentSpec(frame, omega, delta1, phi1, duration_for(theta1, eta1, omega))
    solution = match_phase(phi1, delta1, delta2, first.tau, theta1, eta1, theta2, eta2)
    second = SegmentSpec(frame, omega, delta2, solution.phi2, duration_for(theta2, eta2, omega))
    return PathPlan((first, second), frame)


def shifted_phases(plan, shift):
    return PathPlan(
        tuple(seg.with_changes(laser_phase=seg.laser_phase + shift) for seg in plan.segments),
        plan.initial_frame,
    )


# --------------------------
# Matching
# --------------------------


def test_match_rotation_angle_worked_example():
    assert match_rotation_angle(math.pi / 3, ETA1, math.pi / 2) == pytest.approx(THETA2, abs=1e-12)
    complement = match_rotation_angle(math.pi / 3, ETA1, math.pi / 2, "complement")
    assert complement == pytest.approx(math.pi - THETA2, abs=1e-12)


def test_match_rotation_angle_unreachable():
    with pytest.raises(NoSolution):
        match_rotation_angle(math.pi / 2, math.pi / 2, math.pi / 6)


@pytest.mark.parametrize(
    "args",
    [(0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 4.0)],
)
def test_match_rotation_angle_invalid(args):
    with pytest.raises(InvalidArgument):
        match_rotation_angle(*args)


def test_match_rotation_angle_unknown_branch():
    with pytest.raises(InvalidArgument):
        match_rotation_angle(1.0, 1.0, 1.0, "sideways")


def test_match_phase_worked_example():
    solution = match_phase(0.0, 0.4 * math.pi, 0.0, 1.0, math.pi / 3, ETA1, THETA2, math.pi / 2)
    assert solution.a == pytest.approx(math.pi)
    assert angle_difference(solution.phi2, PHI2) == pytest.approx(0.0, abs=1e-12)
    assert not solution.degenerate_phase


def test_match_phase_rejects_mismatched_amplitudes():
    with pytest.raises(MatchViolation):
        match_phase(0.0, 1.0, 0.0, 1.0, math.pi / 3, ETA1, 0.2, math.pi / 2)


def test_match_phase_flags_full_transfer(caplog):
    with caplog.at_level(logging.WARNING):
        solution = match_phase(0.0, 0.0, 0.0, 1.0, math.pi / 2, math.pi / 2, math.pi / 2, math.pi / 2)
    assert solution.degenerate_phase
    assert "unconstrained" in caplog.text


def test_detuning_and_duration_helpers():
    assert detuning_for(ETA1, OMEGA) == pytest.approx(0.4 * math.pi)
    assert duration_for(math.pi / 3, ETA1, OMEGA) == pytest.approx(1.0)
    assert detuning_for(math.pi / 2, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_continue_path_reproduces_two_segment_match(worked_plan):
    prefix = PathPlan(worked_plan.segments[:1], worked_plan.initial_frame)
    closed = continue_path(prefix, math.pi / 2, OMEGA)
    expected = worked_plan.segments[1]
    added = closed.segments[1]
    assert added.tau == pytest.approx(expected.tau, abs=1e-10)
    assert angle_difference(added.laser_phase, expected.laser_phase) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("branch", ["principal", "complement"])
def test_continue_path_three_segments_is_holonomic(worked_plan, branch):
    prefix = PathPlan(worked_plan.segments[:1], worked_plan.initial_frame)
    middle = continue_path(prefix, math.pi / 2, OMEGA, rotation_angle=0.3)
    closed = continue_path(middle, math.pi / 2, OMEGA, branch=branch)
    assert len(closed.segments) == 3
    report = extract_gate(closed)
    assert report.cyclic_residual < 1e-8
    assert report.geometric_residual < 1e-8
    assert report.closed_form_beta is None


def test_continue_path_requires_shared_frame(worked_plan):
    first = worked_plan.segments[0]
    other = first.with_changes(frame=BrightFrame(0.1, 0.0))
    plan = PathPlan((first, other), worked_plan.initial_frame)
    with pytest.raises(InvalidPlan):
        continue_path(plan, math.pi / 2, OMEGA)


def test_continue_path_unreachable(worked_plan):
    prefix = PathPlan(worked_plan.segments[:1], worked_plan.initial_frame)
    with pytest.raises(NoSolution):
        continue_path(prefix, 0.2, OMEGA)


# --------------------------
# Conditions
# --------------------------


def test_worked_example_is_cyclic_and_geometric(worked_plan):
    assert check_cyclic(worked_plan) < 1e-8
    assert check_geometric(worked_plan, 32) < 1e-8


def test_perturbed_plan_breaks_cyclicity(worked_plan):
    assert check_cyclic(perturbed(worked_plan)) > 1e-3


def test_first_segment_alone_is_not_cyclic(worked_plan):
    prefix = PathPlan(worked_plan.segments[:1], worked_plan.initial_frame)
    assert check_cyclic(prefix) > 0.1


def test_tilted_second_frame_breaks_parallel_transport(worked_plan):
    first, second = worked_plan.segments
    tilted = BrightFrame(second.frame.theta + 0.2, second.frame.phi)
    plan = PathPlan((first, second.with_changes(frame=tilted)), worked_plan.initial_frame)
    assert check_geometric(plan, 32) > 0.01


# --------------------------
# Gate extraction
# --------------------------


def test_worked_example_gate(worked_plan):
    report = extract_gate(worked_plan)
    assert report.beta == pytest.approx(BETA, abs=1e-9)
    assert report.closed_form_beta == pytest.approx(BETA, abs=1e-9)
    assert abs(report.beta - math.pi / 18) < 0.002 * math.pi
    assert report.total_angle == pytest.approx(TOTAL_ANGLE, abs=1e-9)
    assert abs(report.total_angle - 0.57 * math.pi) < 0.01 * math.pi
    assert report.cyclic
    assert np.allclose(report.gate2x2, np.diag([np.exp(1j * report.beta), 1.0]), atol=1e-9)


def test_pi_loop_gate(pi_plan):
    report = extract_gate(pi_plan)
    assert report.beta == pytest.approx(math.pi, abs=1e-9)
    assert report.total_angle == pytest.approx(math.pi)


@pytest.mark.parametrize("eta", [0.4, 1.0, 2.2])
def test_single_detuned_loop_phase(eta):
    frame = BrightFrame(0.5, 0.3)
    omega = 1.0
    seg = SegmentSpec(frame, omega, detuning_for(eta, omega), 0.0, duration_for(math.pi, eta, omega))
    report = extract_gate(PathPlan((seg,), frame))
    expected = wrap_angle(math.pi * (1 - math.cos(eta)))
    assert angle_difference(report.beta, expected) == pytest.approx(0.0, abs=1e-9)
    assert report.closed_form_beta == pytest.approx(report.beta, abs=1e-9)


def test_extract_gate_not_cyclic(worked_plan):
    with pytest.raises(NotCyclic) as info:
        extract_gate(perturbed(worked_plan))
    assert info.value.report is not None
    assert not info.value.report.cyclic

    report = extract_gate(perturbed(worked_plan), strict=False)
    assert not report.cyclic


def test_computational_gate_keeps_dark_state(worked_plan):
    report = extract_gate(worked_plan)
    gate = report.computational_gate()
    bright, dark = bright_dark(worked_plan.initial_frame)
    assert is_unitary(gate)
    assert np.allclose(gate @ dark[:2], dark[:2], atol=1e-9)
    assert np.allclose(gate @ bright[:2], np.exp(1j * report.beta) * bright[:2], atol=1e-9)


def test_compose_gates_adds_phases(worked_plan):
    report = extract_gate(worked_plan)
    composed = compose_gates(report, report)
    bright, _ = bright_dark(worked_plan.initial_frame)
    assert np.allclose(composed @ bright[:2], np.exp(2j * report.beta) * bright[:2], atol=1e-9)


def test_report_dict_keys(worked_plan):
    data = extract_gate(worked_plan).to_dict()
    assert {"beta", "total_angle", "cyclic_residual", "geometric_residual", "gate"} <= set(data)
    assert len(data["gate"]) == 4


def test_closed_form_beta_skips_long_plans(split_plan):
    assert closed_form_beta(split_plan) is None
    assert total_rotation_angle(split_plan) == pytest.approx(math.pi / 3 + THETA2)


def test_amplitude_error_sensitivity(worked_plan):
    assert amplitude_error_sensitivity(worked_plan, 0.0) == pytest.approx(0.0, abs=1e-12)
    small = amplitude_error_sensitivity(worked_plan, 0.01)
    large = amplitude_error_sensitivity(worked_plan, 0.05)
    assert 0.0 < small < large < 0.1


# --------------------------
# Randomized matched plans
# --------------------------


def test_random_matched_plans_are_holonomic():
    rng = np.random.default_rng(2024)
    for _ in range(500):
        plan = random_matched_plan(rng)
        report = extract_gate(plan, 16)
        assert report.cyclic_residual <= 1e-8
        assert report.geometric_residual <= 1e-8
        assert abs(angle_difference(report.beta, report.closed_form_beta)) <= 1e-8


def test_stretched_second_segment_leaves_excited_population():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(500):
        plan = random_matched_plan(rng)
        first, second = plan.segments
        stretched = PathPlan((first, second.with_changes(tau=1.01 * second.tau)), plan.initial_frame)
        residual = check_cyclic(stretched, evolve_path(stretched, 2))
        # excited amplitude left behind: sin(eta2) sin(0.01 theta2)
        theta2 = second.rotation_angle
        expected = math.sqrt(2.0) * second.sin_eta * math.sin(0.01 * theta2)
        assert residual == pytest.approx(expected, rel=1e-6, abs=1e-12)
        if second.sin_eta * theta2 >= 0.1:
            assert residual >= 1e-3
            checked += 1
    assert checked >= 250


@pytest.mark.parametrize("shift", [0.7, -2.1, math.pi])
def test_common_laser_phase_shift_keeps_beta(worked_plan, shift):
    base = extract_gate(worked_plan).beta
    moved = extract_gate(shifted_phases(worked_plan, shift)).beta
    assert abs(angle_difference(moved, base)) <= 1e-10


def test_common_laser_phase_shift_keeps_beta_on_random_plans():
    rng = np.random.default_rng(11)
    for _ in range(50):
        plan = random_matched_plan(rng)
        shift = float(rng.uniform(-math.pi, math.pi))
        base = extract_gate(plan, 8).beta
        moved = extract_gate(shifted_phases(plan, shift), 8).beta
        assert abs(angle_difference(moved, base)) <= 1e-10
