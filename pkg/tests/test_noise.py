import math

import numpy as np
import pytest

from src.decoupling.interleave import interleave
from src.errors import InvalidArgument, StepTooLarge
from src.holonomy.gate_extraction import extract_gate
from src.ingestion.load_plan import load_noise
from src.lambda_system.bright_dark import BrightFrame, SegmentSpec, hamiltonian
from src.noise.compare_paths import compare_paths, pi_pulse_plan, rate_sweep
from src.noise.fidelity import (
    average_gate_fidelity,
    noisy_gate_channel,
    process_fidelity,
    unitary_superop,
)
from src.noise.lindblad import (
    NoiseModel,
    default_dt,
    evolve_density,
    lindblad_step,
    max_step,
)
from src.propagation.evolve_path import PathPlan, path_propagator


def idle_segment(tau):
    return SegmentSpec(BrightFrame(0.0), omega=0.0, delta=0.0, laser_phase=0.0, tau=tau)


def excited_state():
    rho = np.zeros((3, 3), dtype=complex)
    rho[2, 2] = 1.0
    return rho


# --------------------------
# Master equation
# --------------------------


def test_noise_model_validation():
    with pytest.raises(InvalidArgument):
        NoiseModel(gamma_e0=-1.0)
    with pytest.raises(InvalidArgument):
        NoiseModel.from_dict({"gamma_e2": 1.0})
    assert NoiseModel(gamma_e0=0.1, kappa_e=0.2).total_rate == pytest.approx(0.3)
    assert NoiseModel(gamma_e0=0.1).scaled(3.0).gamma_e0 == pytest.approx(0.3)


def test_jump_operators_only_for_nonzero_rates():
    assert NoiseModel().jump_operators().shape == (0, 3, 3)
    jumps = NoiseModel(gamma_e0=0.04, kappa_1=0.09).jump_operators()
    assert jumps.shape == (2, 3, 3)
    assert jumps[0][0, 2] == pytest.approx(0.2)
    assert jumps[1][1, 1] == pytest.approx(0.3)


def test_excited_decay_follows_exponential_law():
    noise = NoiseModel(gamma_e0=0.3, gamma_e1=0.2)
    rho = evolve_density(excited_state(), [idle_segment(2.0)], noise, dt=0.01)
    assert rho[2, 2].real == pytest.approx(math.exp(-0.5 * 2.0), rel=1e-8)
    assert rho[0, 0].real == pytest.approx(0.6 * (1 - math.exp(-1.0)), rel=1e-8)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)


def test_dephasing_damps_coherence():
    noise = NoiseModel(kappa_0=0.4)
    rho = np.full((3, 3), 0.0, dtype=complex)
    rho[0, 0] = rho[1, 1] = rho[0, 1] = rho[1, 0] = 0.5
    out = evolve_density(rho, [idle_segment(1.5)], noise, dt=0.01)
    assert abs(out[0, 1]) == pytest.approx(0.5 * math.exp(-0.5 * 0.4 * 1.5), rel=1e-8)
    assert out[0, 0].real == pytest.approx(0.5)


def test_zero_noise_matches_unitary(worked_plan):
    rho0 = np.zeros((3, 3), dtype=complex)
    rho0[0, 0] = 1.0
    rho = evolve_density(rho0, worked_plan.segments, NoiseModel())
    u = path_propagator(worked_plan)
    assert np.allclose(rho, u @ rho0 @ u.conj().T, atol=1e-8)


def test_step_bound(worked_plan):
    seg = worked_plan.segments[0]
    h = hamiltonian(seg)
    limit = max_step(h, NoiseModel())
    assert limit == pytest.approx(0.01 / np.linalg.norm(h, 2))
    with pytest.raises(StepTooLarge):
        lindblad_step(excited_state(), h, NoiseModel(), 2 * limit)
    assert default_dt(worked_plan.segments, NoiseModel()) <= limit


def test_large_user_step_is_subdivided(worked_plan):
    rho0 = np.zeros((3, 3), dtype=complex)
    rho0[1, 1] = 1.0
    coarse = evolve_density(rho0, worked_plan.segments, NoiseModel(), dt=10.0)
    fine = evolve_density(rho0, worked_plan.segments, NoiseModel())
    assert np.allclose(coarse, fine, atol=1e-8)


def test_rk4_error_shrinks_at_fourth_order(pi_plan):
    noise = NoiseModel(gamma_e0=0.02, gamma_e1=0.01, kappa_0=0.005)
    rho0 = np.zeros((3, 3), dtype=complex)
    rho0[0, 0] = 1.0
    tau = pi_plan.segments[0].tau
    reference = evolve_density(rho0, pi_plan.segments, noise, dt=tau / 2560)
    coarse = np.max(np.abs(evolve_density(rho0, pi_plan.segments, noise, dt=tau / 320) - reference))
    fine = np.max(np.abs(evolve_density(rho0, pi_plan.segments, noise, dt=tau / 640) - reference))
    assert coarse <= 1e-8
    assert 8.0 <= coarse / fine <= 24.0


def test_evolve_density_rejects_bad_step(worked_plan):
    with pytest.raises(InvalidArgument):
        evolve_density(excited_state(), worked_plan.segments, NoiseModel(), dt=0.0)


# --------------------------
# Channels and fidelity
# --------------------------


def test_ideal_channel_has_unit_fidelity(worked_plan):
    channel = noisy_gate_channel(worked_plan, NoiseModel())
    ideal = extract_gate(worked_plan).computational_gate()
    assert process_fidelity(channel, ideal) == pytest.approx(1.0, abs=1e-8)
    assert average_gate_fidelity(channel, ideal) == pytest.approx(1.0, abs=1e-8)
    assert channel.trace_preservation_error() < 1e-8
    assert channel.is_completely_positive()


def test_completely_dephased_identity_has_half_fidelity():
    idle = PathPlan((idle_segment(40.0),), BrightFrame(0.0))
    channel = noisy_gate_channel(idle, NoiseModel(kappa_0=1.0, kappa_1=1.0), dt=0.01)
    assert channel.retained_population() == pytest.approx(1.0)
    # coherences decay completely, populations stay: F_pro = 1/2, F_avg = 2/3
    assert process_fidelity(channel, np.eye(2)) == pytest.approx(0.5, abs=1e-6)
    assert average_gate_fidelity(channel, np.eye(2)) == pytest.approx(2 / 3, abs=1e-6)


def test_unitary_superop_composition():
    u = np.array([[0, 1], [1, 0]], dtype=complex)
    v = np.diag([1, 1j])
    assert np.allclose(unitary_superop(v @ u), unitary_superop(v) @ unitary_superop(u))


def test_noisy_channel_is_physical(worked_plan, plans_dir):
    noise = load_noise(plans_dir / "noise_decay.json")
    channel = noisy_gate_channel(worked_plan, noise)
    ideal = extract_gate(worked_plan).computational_gate()
    assert channel.trace_preservation_error() < 1e-8
    assert channel.is_completely_positive()
    assert 0.0 < average_gate_fidelity(channel, ideal) < 1.0


def test_protected_schedule_channel(split_plan):
    schedule = interleave(split_plan, 4)
    channel = noisy_gate_channel(schedule, NoiseModel())
    ideal = extract_gate(split_plan).computational_gate()
    assert average_gate_fidelity(channel, ideal) == pytest.approx(1.0, abs=1e-8)


# --------------------------
# Path comparison
# --------------------------


def test_pi_pulse_plan(worked_plan):
    plan = pi_pulse_plan(worked_plan.initial_frame, 2.0)
    assert plan.segments[0].rotation_angle == pytest.approx(math.pi)
    assert extract_gate(plan).beta == pytest.approx(math.pi, abs=1e-9)


def test_zero_noise_comparison_is_perfect(worked_plan, pi_plan):
    result = compare_paths(worked_plan, pi_plan, NoiseModel())
    assert result["fidelity_short"] == pytest.approx(1.0, abs=1e-8)
    assert result["fidelity_reference"] == pytest.approx(1.0, abs=1e-8)


def test_short_path_wins_under_decay(worked_plan, pi_plan, plans_dir):
    noise = load_noise(plans_dir / "noise_decay.json")
    result = compare_paths(worked_plan, pi_plan, noise)
    assert 0.0 < result["fidelity_reference"] < result["fidelity_short"] < 1.0
    assert result["total_angle_short"] < result["total_angle_reference"]
    assert result["duration_short"] < result["duration_reference"]


def test_rate_sweep_rows(worked_plan, pi_plan, plans_dir):
    noise = load_noise(plans_dir / "noise_decay.json")
    table = rate_sweep(worked_plan, pi_plan, noise, [0.0, 1.0, 10.0])
    assert list(table["factor"]) == [0.0, 1.0, 10.0]
    assert table["fidelity_short"].iloc[0] == pytest.approx(1.0, abs=1e-8)
    assert table["fidelity_short"].is_monotonic_decreasing
    assert "noise" not in table.columns


def test_rate_sweep_uses_requested_step(worked_plan, pi_plan, plans_dir):
    noise = load_noise(plans_dir / "noise_decay.json")
    table = rate_sweep(worked_plan, pi_plan, noise, [1.0, 2.0], dt=0.05, samples_per_segment=8)
    assert list(table["dt"]) == [0.05, 0.05]
    direct = compare_paths(worked_plan, pi_plan, noise.scaled(2.0), 0.05, 8)
    assert table["fidelity_short"].iloc[1] == pytest.approx(direct["fidelity_short"], abs=1e-12)
