"""Tests for result tables, run manifests, seeding and the episode orchestrator."""

import math

import pytest

from src.errors import ConfigError
from src.evaluation import (
    EPISODE_COLUMNS,
    RESULTS_COLUMNS,
    SWEEP_COLUMNS,
    EvaluationOrchestrator,
    PolicyKind,
    PolicySpec,
    RunManifest,
    format_results,
    load_manifest,
    make_policy,
    summarize_cases,
    summarize_sweep,
    write_manifest,
)
from src.manager import AI, HUMAN, GreedyManagerPolicy, RandomIntervalPolicy, ScriptedPolicy
from src.manager.network import ManagerNetwork, save_checkpoint
from src.models import ExperimentRepository, ExperimentRun, create_tables, session_scope
from src.scenario import scenario_for
from src.utils import derive_seed, episode_streams


def _row(case, reward, basic=0, sudden=0, avoidable=False, interval=None, outcome="goal"):
    return {
        "episode_index": 0,
        "environment": "four_way",
        "family": "mask",
        "case": case,
        "policy": "test",
        "interval": interval,
        "seed": 0,
        "outcome": outcome,
        "steps": 100,
        "basic_changes": basic,
        "sudden_changes": sudden,
        "reward": reward,
        "avoidable": avoidable,
    }


@pytest.fixture
def repository(tmp_path):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    create_tables(url)
    with session_scope(url) as session:
        yield ExperimentRepository(session)


def test_session_scope_commits_or_rolls_back(tmp_path):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    create_tables(url)
    with session_scope(url) as session:
        session.add(ExperimentRun(command="eval", seed=1, code_version="test"))
    with pytest.raises(RuntimeError):
        with session_scope(url) as session:
            session.add(ExperimentRun(command="train", seed=2, code_version="test"))
            session.flush()
            raise RuntimeError("interrupted")
    with session_scope(url) as session:
        assert [run.command for run in session.query(ExperimentRun)] == ["eval"]


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(7, 3) == derive_seed(7, 3)
    seeds = {derive_seed(7, i) for i in range(500)}
    assert len(seeds) == 500
    assert derive_seed(7, 0) != derive_seed(8, 0)
    assert all(0 <= s < 2**32 for s in seeds)


def test_episode_streams_are_independent():
    first = [g.random() for g in episode_streams(5)]
    again = [g.random() for g in episode_streams(5)]
    assert first == again
    assert len(set(first)) == 4


def test_summarize_cases():
    rows = [
        _row("E/S", 10.0, basic=1, avoidable=True, outcome="collision"),
        _row("E/S", 20.0, basic=3),
        _row("S/S", 50.0, sudden=2),
    ]
    table = summarize_cases(rows)
    assert list(table.columns) == RESULTS_COLUMNS
    assert list(table["case"]) == ["S/S", "E/S"]
    mixed = table.set_index("case").loc["E/S"]
    assert mixed["avoidable_collisions"] == 1
    assert mixed["mean_reward"] == pytest.approx(15.0)
    assert mixed["sem_reward"] == pytest.approx(5.0)
    assert mixed["mean_basic"] == pytest.approx(2.0)
    assert mixed["sem_basic"] == pytest.approx(1.0)
    single = table.set_index("case").loc["S/S"]
    assert single["sem_reward"] == 0.0
    assert single["mean_sudden"] == 2.0


def test_summaries_of_no_episodes():
    table = summarize_cases([])
    assert table.empty
    assert list(table.columns) == RESULTS_COLUMNS
    assert format_results(table) == "(no episodes)"
    assert list(summarize_sweep([]).columns) == SWEEP_COLUMNS


def test_summarize_sweep_orders_intervals():
    rows = [_row("S/E", -50.0, interval=20), _row("S/E", 30.0, interval=10), _row("S/E", 10.0, interval=10)]
    sweep = summarize_sweep(rows)
    assert list(sweep["interval"]) == [10, 20]
    assert sweep.iloc[0]["mean_reward"] == pytest.approx(20.0)
    assert sweep.iloc[0]["sem_reward"] == pytest.approx(10.0)


def test_format_results_shows_mean_and_stderr():
    text = format_results(summarize_cases([_row("S/E", 10.0), _row("S/E", 20.0)]))
    assert "S/E" in text
    assert "reward=15.0±5.0" in text


def test_manifest_round_trip(tmp_path, settings):
    manifest = RunManifest(command="eval", arguments={"episodes": 3}, config=settings.model_dump(mode="json"), seeds=[9])
    manifest.add_output("results", tmp_path / "results.csv")
    manifest.finish()
    path = write_manifest(manifest, tmp_path / "run")
    assert path.name == "manifest.yaml"
    loaded = load_manifest(path)
    assert loaded.status == "completed"
    assert loaded.seeds == [9]
    assert loaded.outputs == {"results": str(tmp_path / "results.csv")}
    assert loaded.config["simulation"]["step_limit"] == 300
    assert loaded.finished_at is not None


def test_policy_spec_validation():
    with pytest.raises(ValueError):
        PolicySpec(kind=PolicyKind.MANAGER)
    with pytest.raises(ValueError):
        PolicySpec(kind=PolicyKind.RANDOM)
    assert PolicySpec(kind="random", interval=15).label == "random_15"
    assert PolicySpec(kind="oracle").label == "oracle"


def test_make_policy(tmp_path, fast_settings):
    config = scenario_for("four_way", "mask", "E/S")
    assert make_policy(PolicySpec(kind="human"), config, fast_settings).agent == HUMAN
    assert make_policy(PolicySpec(kind="ai"), config, fast_settings).agent == AI
    assert make_policy(PolicySpec(kind="oracle"), config, fast_settings).agent == AI
    assert isinstance(make_policy(PolicySpec(kind="random", interval=5), config, fast_settings), RandomIntervalPolicy)
    checkpoint = save_checkpoint(ManagerNetwork(fast_settings.manager), tmp_path / "manager.pt")
    manager = make_policy(PolicySpec(kind="manager", checkpoint=str(checkpoint)), config, fast_settings)
    assert isinstance(manager, GreedyManagerPolicy)


def test_jobs_cover_every_cell(fast_settings):
    orchestrator = EvaluationOrchestrator(fast_settings)
    policies = [PolicySpec(kind="human"), PolicySpec(kind="random", interval=10)]
    jobs = orchestrator.jobs_for("four_way", "mask", policies, episodes=3, seed=4)
    assert len(jobs) == 4 * 2 * 3
    assert [job.index for job in jobs] == list(range(24))
    assert [job.seed for job in jobs] == [derive_seed(4, i) for i in range(24)]
    assert {job.config.case for job in jobs} == {"S/S", "S/E", "E/S", "E/E"}
    assert orchestrator.jobs_for("four_way", "mask", policies, episodes=0, seed=4) == []


def test_orchestrator_rejects_zero_workers(fast_settings):
    with pytest.raises(ConfigError):
        EvaluationOrchestrator(fast_settings, workers=0)


def test_oracle_evaluation_is_reproducible_and_stored(fast_settings, repository):
    run = repository.create_run("eval", 3, "test", {"episodes": 1})
    orchestrator = EvaluationOrchestrator(fast_settings, repository=repository, run_id=run.id)
    jobs = orchestrator.jobs_for("four_way", "mask", [PolicySpec(kind="oracle")], episodes=1, seed=3)
    seen = []
    rows = orchestrator.run(jobs, on_result=seen.append)
    assert len(rows) == len(seen) == 4
    assert set(EPISODE_COLUMNS) <= set(rows[0])
    outcomes = {row["case"]: row["outcome"] for row in rows}
    assert outcomes == {"S/S": "goal", "S/E": "goal", "E/S": "goal", "E/E": "collision"}
    assert not any(row["avoidable"] for row in rows)
    assert all(len(row["delegation_trace"]) == row["steps"] for row in rows)

    again = EvaluationOrchestrator(fast_settings).run(jobs)
    assert [r["reward"] for r in again] == [r["reward"] for r in rows]

    stored = repository.get_episodes(run.id)
    assert [e.case for e in stored] == ["S/S", "S/E", "E/S", "E/E"]
    assert stored[0].delegation_trace == rows[0]["delegation_trace"]
    summary = {s["case"]: s for s in repository.get_case_summary(run.id)}
    assert summary["E/E"]["avoidable_collisions"] == 0
    assert summary["S/S"]["mean_reward"] == pytest.approx(rows[0]["reward"])
    assert repository.get_episodes(run.id, case="E/S")[0].outcome == "goal"


def test_repository_run_lifecycle(repository):
    run = repository.create_run("train", 1, "1.0.0", {"training": {"episodes": 2}})
    assert run.status == "running"
    repository.complete_run(run.id, {"checkpoint": "out/checkpoint.pt"})
    stored = repository.get_run(run.id)
    assert stored.status == "completed"
    assert stored.output_paths == {"checkpoint": "out/checkpoint.pt"}
    assert stored.completed_at is not None

    failed = repository.create_run("calibrate", 1, "1.0.0")
    repository.fail_run(failed.id, "case matrix failed")
    assert repository.get_run(failed.id).error_message == "case matrix failed"
    assert repository.get_run(999) is None


def test_repository_case_summary(repository):
    run = repository.create_run("sweep-random", 0, "1.0.0")
    for i, (case, reward, avoidable) in enumerate([("S/E", 10.0, False), ("S/E", -120.0, True), ("E/E", -110.0, False)]):
        repository.save_episode(
            {
                "run_id": run.id,
                "environment": "four_way",
                "family": "mask",
                "case": case,
                "policy": "random_10",
                "interval": 10,
                "episode_index": i,
                "seed": i,
                "outcome": "collision" if reward < 0 else "goal",
                "steps": 100,
                "basic_changes": 1,
                "sudden_changes": 0,
                "reward": reward,
                "avoidable": avoidable,
                "delegation_trace": [0] * 100,
            }
        )
    summary = {s["case"]: s for s in repository.get_case_summary(run.id)}
    assert summary["S/E"]["episodes"] == 2
    assert summary["S/E"]["avoidable_collisions"] == 1
    assert summary["S/E"]["mean_reward"] == pytest.approx(-55.0)
    assert math.isclose(summary["E/E"]["mean_basic"], 1.0)
