"""Tests for scenario configuration, construction and the episode loop."""

from pathlib import Path

import numpy as np
import pytest

from src.errors import CalibrationError, ConfigError, InvalidArgumentError
from src.manager import AI, HUMAN, ScriptedPolicy, random_manager
from src.routing import EnvironmentKind
from src.scenario import (
    BACKGROUND_ID,
    CASE_LABELS,
    MANAGED_ID,
    Case,
    DelegationEnv,
    EpisodeRecord,
    EpisodeSimulation,
    Family,
    Outcome,
    ScenarioConfig,
    SimulatorConfig,
    build_scenario,
    calibrate_case_parameters,
    classify_avoidable,
    load_simulator_config,
    oracle_agent,
    parse_case,
    run_episode,
    scenario_for,
    verify_case_matrix,
)
from src.scenario.calibration import axis_default
from src.scenario.config import BACKGROUND_COLOR

REPO_ROOT = Path(__file__).resolve().parent.parent


def _config(family="mask", label="S/S", env=EnvironmentKind.FOUR_WAY, **kwargs):
    return scenario_for(env, family, label).model_copy(update=kwargs)


@pytest.fixture(scope="module")
def mask_scenarios():
    settings = SimulatorConfig.model_validate({"perception": {"image_resolution": 64}, "manager": {"input_size": 24}})
    return {label: build_scenario(_config("mask", label), settings) for label in CASE_LABELS}


def test_parse_case():
    assert parse_case("S/E") == (Case.SUCCESS, Case.ERROR)
    assert parse_case(" e/s ") == (Case.ERROR, Case.SUCCESS)
    for bad in ("S", "S/X", "S/E/S", ""):
        with pytest.raises(ConfigError):
            parse_case(bad)


def test_scenario_for_validates_names():
    config = scenario_for("t_intersection", "fog", "E/S", seed=4)
    assert config.environment == EnvironmentKind.T_INTERSECTION
    assert config.family == Family.FOG
    assert config.case == "E/S"
    assert config.with_case("S/S").case == "S/S"
    with pytest.raises(ConfigError):
        scenario_for("roundabout", "fog", "S/S")
    with pytest.raises(ConfigError):
        scenario_for("four_way", "rain", "S/S")


def test_override_keys_need_a_side():
    with pytest.raises(ValueError):
        ScenarioConfig(
            environment="four_way",
            family="fog",
            human_case="success",
            ai_case="success",
            overrides={"fog.severity_value": 0.3},
        )


def test_repository_config_matches_defaults():
    assert load_simulator_config(REPO_ROOT / "config.yaml") == SimulatorConfig()


def test_partial_environment_section_keeps_defaults():
    config = SimulatorConfig.model_validate({"environments": {"four_way": {"arrival_tolerance": 1.0}}})
    four_way = config.environment("four_way")
    assert four_way.arrival_tolerance == 1.0
    assert four_way.managed.start_node == "S_in_start"
    assert four_way.layout.arm_lengths == {"N": 40.0, "E": 40.0, "S": 22.0, "W": 12.0}
    assert config.environment("t_intersection").background.start_node == "W_in_start"


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_simulator_config(tmp_path / "missing.yaml")
    bad_yaml = tmp_path / "bad.yaml"
    bad_yaml.write_text("simulation: [unclosed\n")
    with pytest.raises(ConfigError):
        load_simulator_config(bad_yaml)
    bad_value = tmp_path / "value.yaml"
    bad_value.write_text("simulation:\n  dt: -1\n")
    with pytest.raises(ConfigError):
        load_simulator_config(bad_value)
    not_mapping = tmp_path / "list.yaml"
    not_mapping.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_simulator_config(not_mapping)


@pytest.mark.parametrize(
    "env, crossing, background_crossing",
    [(EnvironmentKind.FOUR_WAY, 23.11, 40.0), (EnvironmentKind.T_INTERSECTION, 20.63, 48.0)],
)
def test_conflict_schedule(env, crossing, background_crossing):
    scenario = build_scenario(_config(env=env))
    schedule = scenario.schedule
    assert schedule.managed_crossing == pytest.approx(crossing, abs=0.1)
    assert schedule.background_crossing == pytest.approx(background_crossing, abs=0.1)
    assert 0.0 < schedule.background_offset < background_crossing
    assert schedule.arrival_gap <= 0.5
    background = scenario.world.entity(BACKGROUND_ID)
    start = scenario.paths[BACKGROUND_ID].point_at(schedule.background_offset)
    assert background.center.distance_to(start) < 1e-9
    assert scenario.world.entity(MANAGED_ID).center.distance_to(scenario.paths[MANAGED_ID].start) < 1e-9


def test_short_background_arm_is_rejected():
    settings = SimulatorConfig.model_validate(
        {"environments": {"four_way": {"layout": {"arm_lengths": {"N": 20.0, "E": 40.0, "S": 22.0, "W": 12.0}}}}}
    )
    with pytest.raises(ConfigError, match="too short"):
        build_scenario(_config(), settings)


def test_bad_route_is_a_config_error():
    settings = SimulatorConfig.model_validate({"environments": {"four_way": {"managed": {"goal_node": "Q_out_end"}}}})
    with pytest.raises(ConfigError):
        build_scenario(_config(), settings)


def test_extra_traffic_crossing_pairs():
    settings = SimulatorConfig.model_validate(
        {
            "environments": {
                "four_way": {
                    "extra_traffic": [
                        {"start_node": "E_in_start", "goal_node": "W_out_end", "color": [240, 200, 0], "spawn_offset": 5.0}
                    ]
                }
            }
        }
    )
    scenario = build_scenario(_config(), settings)
    assert scenario.world.entity(3).color == (240, 200, 0)
    assert scenario.crossing_pairs == [(BACKGROUND_ID, 3)]
    bad = SimulatorConfig.model_validate(
        {
            "environments": {
                "four_way": {
                    "extra_traffic": [
                        {"start_node": "E_in_start", "goal_node": "W_out_end", "color": [240, 200, 0], "spawn_offset": 500.0}
                    ]
                }
            }
        }
    )
    with pytest.raises(ConfigError):
        build_scenario(_config(), bad)


def test_fog_family_profiles():
    scenario = build_scenario(_config("fog", "S/E"))
    human, ai = scenario.human_profile, scenario.ai_profile
    assert (human.fog.severity_distance, human.fog.severity_value) == (60.0, 0.6)
    assert human.masks[0].area_fraction == 0.15
    assert ai.fog is None
    assert ai.masks[0].area_fraction == 0.95
    assert human.noise is None


def test_color_family_profiles():
    error = build_scenario(_config("color", "S/E")).ai_profile
    assert error.color_sensitivity == [BACKGROUND_COLOR]
    assert error.color_tolerance == 80.0
    success = build_scenario(_config("color", "E/S")).ai_profile
    assert success.color_sensitivity == [(0, 160, 0)]
    assert BACKGROUND_COLOR not in success.color_sensitivity


def test_fog_color_band_runs_toward_the_fog_color():
    ai = build_scenario(_config("fog_color", "S/E")).ai_profile
    band = ai.color_sensitivity
    assert len(band) == 9
    assert band[0] == BACKGROUND_COLOR
    assert ai.fog is not None
    assert band[-1] == tuple(int(round(0.2 * c + 0.8 * f)) for c, f in zip(BACKGROUND_COLOR, ai.fog.fog_color))


def test_noisy_family_adds_noise_to_the_human_only():
    scenario = build_scenario(_config("noisy_night", "E/S"))
    assert scenario.human_profile.noise is not None
    assert scenario.human_profile.night.severity_value == 0.01
    assert scenario.ai_profile.noise is None


def test_overrides_apply_per_side():
    scenario = build_scenario(_config("fog", "S/S", overrides={"human.fog.severity_value": 0.3, "ai.area_fraction": 0.5}))
    assert scenario.human_profile.fog.severity_value == 0.3
    assert scenario.ai_profile.masks[0].area_fraction == 0.5
    with pytest.raises(ConfigError):
        build_scenario(_config("mask", "S/S", overrides={"human.fog.severity_value": 0.3}))
    with pytest.raises(ConfigError):
        build_scenario(_config("mask", "S/S", overrides={"ai.color_tolerance": 10.0}))


def test_episode_record_validation():
    with pytest.raises(InvalidArgumentError):
        EpisodeRecord(Outcome.GOAL, 10, 0, 0, 90.0, True, (HUMAN,) * 10, "S/S", 0)


@pytest.mark.parametrize(
    "label, outcome, expected",
    [
        ("S/S", Outcome.COLLISION, True),
        ("S/E", Outcome.COLLISION, True),
        ("E/S", Outcome.COLLISION, True),
        ("E/E", Outcome.COLLISION, False),
        ("S/E", Outcome.GOAL, False),
        ("S/E", Outcome.TIMEOUT, False),
    ],
)
def test_classify_avoidable(label, outcome, expected):
    assert classify_avoidable(outcome, _config(label=label)) == expected


def test_oracle_agent():
    assert oracle_agent(_config(label="S/E")) == HUMAN
    assert oracle_agent(_config(label="E/S")) == AI
    assert oracle_agent(_config(label="S/S")) == HUMAN
    assert oracle_agent(_config(label="E/E")) == HUMAN


def test_simulation_observation(mask_scenarios):
    simulation = EpisodeSimulation(mask_scenarios["S/S"], seed=3)
    observation = simulation.observe()
    assert observation["human"].shape == (24, 24, 3)
    assert observation["ai"].dtype == np.uint8
    assert observation["features"].shape == (10,)
    assert set(simulation.frames) == {"world", "human", "ai"}
    assert simulation.manager_profile is None
    with pytest.raises(InvalidArgumentError):
        simulation.record()
    assert simulation.advance(HUMAN) is None
    assert simulation.step_index == 1
    assert simulation.state.time_step_index == 1


def test_noisy_manager_view_is_drawn_per_episode():
    scenario = build_scenario(_config("noisy_fog", "S/S"))
    a = EpisodeSimulation(scenario, seed=1).manager_profile.fog
    b = EpisodeSimulation(scenario, seed=2).manager_profile.fog
    again = EpisodeSimulation(scenario, seed=1).manager_profile.fog
    assert a == again
    assert a != b
    assert 40.0 <= a.severity_distance <= 80.0
    assert 0.4 <= a.severity_value <= 0.8
    # the driver itself keeps the ground-truth parameters
    assert scenario.human_profile.fog.severity_value == 0.6


def test_success_driver_yields_and_reaches_the_goal(mask_scenarios):
    record = run_episode(mask_scenarios["S/S"], ScriptedPolicy(HUMAN), seed=0)
    assert record.outcome == Outcome.GOAL
    assert record.steps < 300
    assert record.reward == pytest.approx(100.0 - record.steps)
    assert record.basic_changes == 0
    assert not record.avoidable


def test_error_drivers_collide(mask_scenarios):
    record = run_episode(mask_scenarios["E/E"], ScriptedPolicy(AI), seed=0)
    assert record.outcome == Outcome.COLLISION
    assert record.reward == pytest.approx(-100.0 - record.steps)
    assert not record.avoidable


def test_wrong_delegation_is_an_avoidable_collision(mask_scenarios):
    scenario = mask_scenarios["S/E"]
    record = run_episode(scenario, ScriptedPolicy(AI), seed=0)
    assert record.outcome == Outcome.COLLISION
    assert record.avoidable
    assert record.case == "S/E"
    assert run_episode(scenario, ScriptedPolicy(HUMAN), seed=0).outcome == Outcome.GOAL


def test_episodes_are_deterministic_per_seed(mask_scenarios):
    scenario = mask_scenarios["E/S"]
    first = run_episode(scenario, random_manager(10), seed=11)
    second = run_episode(scenario, random_manager(10), seed=11)
    assert first == second
    assert all(first.delegation[i] == first.delegation[0] for i in range(min(10, first.steps)))


def test_frame_callback_sees_every_step(mask_scenarios):
    steps = []
    record = run_episode(mask_scenarios["E/E"], ScriptedPolicy(HUMAN), seed=0, on_frame=lambda step, frames: steps.append(step))
    assert steps == list(range(record.steps))


def test_delegation_env_api(mask_scenarios):
    env = DelegationEnv([mask_scenarios["S/S"]])
    with pytest.raises(InvalidArgumentError):
        env.step(0)
    observation, info = env.reset(seed=5)
    assert env.observation_space.contains(observation)
    assert info["case"] == "S/S"
    with pytest.raises(InvalidArgumentError):
        env.step(3)
    total_steps, terminated, truncated = 0, False, False
    while not (terminated or truncated):
        observation, reward, terminated, truncated, info = env.step(HUMAN)
        total_steps += 1
        if not (terminated or truncated):
            assert reward == 0.0
    record = info["record"]
    assert terminated and not truncated
    assert record.outcome == Outcome.GOAL
    assert reward == record.reward
    assert record.steps == total_steps
    assert env.render().shape[2] == 3


def test_env_samples_every_scenario(mask_scenarios):
    env = DelegationEnv(list(mask_scenarios.values()))
    cases = {env.reset(seed=s)[1]["case"] for s in range(40)}
    assert cases == set(CASE_LABELS)
    _, info = env.reset(options={"scenario_index": 2, "episode_seed": 9})
    assert info == {"case": CASE_LABELS[2], "seed": 9}


def test_timeout_truncates(mask_scenarios):
    settings = mask_scenarios["S/S"].settings
    scenario = build_scenario(_config(step_limit=5), settings)
    env = DelegationEnv([scenario])
    env.reset(seed=0)
    for _ in range(4):
        assert env.step(HUMAN)[2:4] == (False, False)
    _, reward, terminated, truncated, info = env.step(HUMAN)
    assert truncated and not terminated
    assert info["record"].outcome == Outcome.TIMEOUT
    assert reward == pytest.approx(-105.0)


def test_axis_defaults_match_stored_cases():
    assert axis_default(Family.MASK, "human", Case.ERROR) == 0.95
    assert axis_default(Family.FOG, "human", Case.SUCCESS) == 0.6
    assert axis_default(Family.COLOR, "ai", Case.ERROR) == 80.0


def test_calibration_rejects_unknown_side():
    with pytest.raises(CalibrationError):
        calibrate_case_parameters("mask", "robot", "success")


def test_calibration_error_lists_the_transcript():
    error = CalibrationError("search failed", ["seed#0: timeout"])
    assert "seed#0: timeout" in str(error)


@pytest.mark.slow
@pytest.mark.parametrize("env", list(EnvironmentKind))
@pytest.mark.parametrize("family", list(Family))
def test_case_matrix_holds(env, family):
    matrix = verify_case_matrix(env, family, seeds=5)
    assert matrix["passed"].all(), matrix.to_string()


@pytest.mark.slow
@pytest.mark.parametrize("family, side", [("mask", "human"), ("fog", "human"), ("color", "ai")])
@pytest.mark.parametrize("case", ["success", "error"])
def test_stored_parameters_need_no_adjustment(family, side, case):
    result = calibrate_case_parameters(family, side, case)
    assert not result.adjusted
    assert result.overrides == {}
    assert result.transcript


@pytest.mark.slow
@pytest.mark.parametrize("env, expected_steps", [(EnvironmentKind.T_INTERSECTION, 165), (EnvironmentKind.FOUR_WAY, 120)])
@pytest.mark.parametrize("label", ["S/E", "E/S"])
def test_oracle_episode_length(env, expected_steps, label):
    config = _config("mask", label, env=env)
    record = run_episode(build_scenario(config), ScriptedPolicy(oracle_agent(config)), seed=0)
    assert record.outcome == Outcome.GOAL
    # includes the wait for the background car
    assert record.steps == pytest.approx(expected_steps, abs=12)
