"""Main entry point for training and evaluating the delegation manager."""

import argparse
import logging
import sys
from contextlib import ExitStack
from pathlib import Path
from typing import Callable, Dict, List, Optional

import yaml

from src import __version__
from src.errors import CalibrationError, CheckpointError, ConfigError, TrainingDivergedError
from src.evaluation import (
    EvaluationOrchestrator,
    PolicyKind,
    PolicySpec,
    RunManifest,
    episodes_frame,
    format_results,
    summarize_cases,
    summarize_sweep,
    write_manifest,
)
from src.manager import DQNTrainer, ManagerNetwork, ScriptedPolicy, load_checkpoint, save_checkpoint
from src.manager.rewards import AI, HUMAN
from src.models import ExperimentRepository, create_tables, session_scope
from src.routing import EnvironmentKind
from src.scenario import (
    CASE_LABELS,
    DelegationEnv,
    Family,
    build_scenario,
    calibrate_case_parameters,
    load_simulator_config,
    oracle_policy,
    run_episode,
    scenario_for,
    scripted_optimum,
    verify_case_matrix,
)
from src.utils import get_database_url, get_settings
from src.world import save_frame

logger = logging.getLogger("run_delegation")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_CHECKPOINT = 4
EXIT_CALIBRATION = 5


class RunContext:
    """Manifest and optional database bookkeeping shared by every command."""

    def __init__(self, command: str, args: argparse.Namespace, config):
        self.out = Path(args.out or Path("results") / command)
        self.manifest = RunManifest(
            command=command,
            arguments={k: v for k, v in vars(args).items() if k != "handler"},
            config=config.model_dump(mode="json"),
            seeds=[args.seed],
        )
        self.repository: Optional[ExperimentRepository] = None
        self.run_id: Optional[int] = None
        self._resources = ExitStack()
        if not args.no_db:
            database_url = get_database_url()
            create_tables(database_url)
            session = self._resources.enter_context(session_scope(database_url))
            self.repository = ExperimentRepository(session)
            run = self.repository.create_run(command, args.seed, __version__, self.manifest.config)
            self.run_id = run.id

    def finish(self) -> Path:
        self.manifest.finish()
        path = write_manifest(self.manifest, self.out)
        if self.repository is not None:
            self.repository.complete_run(self.run_id, dict(self.manifest.outputs, manifest=str(path)))
        return path

    def fail(self, error: Exception) -> None:
        self.manifest.finish("failed")
        write_manifest(self.manifest, self.out)
        if self.repository is not None:
            self.repository.fail_run(self.run_id, str(error))

    def __enter__(self) -> "RunContext":
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        with self._resources:
            if exc is None:
                self.finish()
            else:
                self.fail(exc)
        return False


def _scenarios(config, args, cases: List[str]):
    return [build_scenario(scenario_for(args.env, args.family, label, config, args.seed), config) for label in cases]


def cmd_train(args: argparse.Namespace, config, ctx: RunContext) -> int:
    """Train the manager over all four cases and write checkpoint plus learning curve."""
    episodes = args.episodes if args.episodes is not None else config.training.episodes
    print(f"🚀 Training manager: {args.env} / {args.family}, {episodes} episodes, seed {args.seed}")
    print("=" * 60)

    print("\n🛣️  Building scenarios...")
    env = DelegationEnv(_scenarios(config, args, CASE_LABELS))
    for scenario in env.scenarios:
        print(f"✓ {scenario.config.case}: background offset {scenario.schedule.background_offset:.1f} m")

    trainer = DQNTrainer(ManagerNetwork(config.manager), config.training, seed=args.seed, device=args.device)

    def progress(episode: int, reward: float, epsilon: float, loss: float) -> None:
        if (episode + 1) % max(1, episodes // 20) == 0:
            print(f"  episode {episode + 1}/{episodes}: reward={reward:.1f} epsilon={epsilon:.3f}")

    print("\n🎯 Training...")
    curve = trainer.train(env, episodes, on_episode=progress)

    ctx.out.mkdir(parents=True, exist_ok=True)
    checkpoint = save_checkpoint(trainer.net, ctx.out / "checkpoint.pt")
    curve_path = ctx.out / "learning_curve.csv"
    curve.to_csv(curve_path, index=False)
    ctx.manifest.add_output("checkpoint", checkpoint)
    ctx.manifest.add_output("learning_curve", curve_path)

    print("\n" + "=" * 60)
    print(f"✅ Training completed! Checkpoint: {checkpoint}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, config, ctx: RunContext) -> int:
    """Evaluate a policy over every case and write the results table."""
    episodes = args.episodes if args.episodes is not None else config.evaluation.episodes
    if args.policy == PolicyKind.MANAGER.value:
        if not args.checkpoint:
            raise ConfigError("--checkpoint is required for the manager policy")
        if not Path(args.checkpoint).is_file():
            raise ConfigError(f"Checkpoint not found: {args.checkpoint}")
        load_checkpoint(args.checkpoint, config.manager)
    policy = PolicySpec(kind=args.policy, checkpoint=args.checkpoint)

    print(f"📊 Evaluating {policy.label} policy: {args.env} / {args.family}, {episodes} episodes per case")
    print("=" * 60)
    orchestrator = EvaluationOrchestrator(config, _workers(args, config), ctx.repository, ctx.run_id)
    jobs = orchestrator.jobs_for(args.env, args.family, [policy], episodes, args.seed)
    rows = orchestrator.run(jobs, on_result=_echo)

    results = summarize_cases(rows)
    ctx.out.mkdir(parents=True, exist_ok=True)
    results_path = ctx.out / "results.csv"
    episodes_path = ctx.out / "episodes.csv"
    results.to_csv(results_path, index=False)
    episodes_frame(rows).to_csv(episodes_path, index=False)
    ctx.manifest.add_output("results", results_path)
    ctx.manifest.add_output("episodes", episodes_path)

    print("\n" + format_results(results))
    print("\n" + "=" * 60)
    print(f"✅ Evaluation completed! Results: {results_path}")
    return EXIT_OK


def cmd_sweep_random(args: argparse.Namespace, config, ctx: RunContext) -> int:
    """Random manager over each decision interval."""
    episodes = args.episodes if args.episodes is not None else config.evaluation.episodes
    intervals = args.intervals or config.evaluation.intervals
    if any(i < 1 for i in intervals):
        raise ConfigError(f"Intervals must be positive integers, got {intervals}")
    print(f"🎲 Random-manager sweep: intervals {intervals}, {episodes} episodes per cell")
    print("=" * 60)

    orchestrator = EvaluationOrchestrator(config, _workers(args, config), ctx.repository, ctx.run_id)
    policies = [PolicySpec(kind=PolicyKind.RANDOM, interval=i) for i in intervals]
    rows = orchestrator.run(orchestrator.jobs_for(args.env, args.family, policies, episodes, args.seed))

    sweep = summarize_sweep(rows)
    ctx.out.mkdir(parents=True, exist_ok=True)
    sweep_path = ctx.out / "sweep.csv"
    sweep.to_csv(sweep_path, index=False)
    ctx.manifest.add_output("sweep", sweep_path)

    for _, row in sweep.iterrows():
        print(
            f"  {row['case']} interval={int(row['interval']):3d}: "
            f"reward={row['mean_reward']:.1f}±{row['sem_reward']:.1f} avoidable={int(row['avoidable_collisions'])}"
        )
    print("\n" + "=" * 60)
    print(f"✅ Sweep completed! Results: {sweep_path}")
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace, config, ctx: RunContext) -> int:
    """Verify case parameters per side, then the full case matrix under scripted policies."""
    families = [args.family] if args.family else [f.value for f in Family]
    seeds = args.episodes if args.episodes is not None else config.calibration.trial_seeds
    print(f"🔧 Calibrating {', '.join(families)} in {args.env}")
    print("=" * 60)

    report: Dict[str, dict] = {}
    failed: List[str] = []
    ctx.out.mkdir(parents=True, exist_ok=True)
    for family in families:
        overrides: Dict[str, float] = {}
        for side in ("human", "ai"):
            for case in ("success", "error"):
                result = calibrate_case_parameters(family, side, case, args.env, config, args.seed)
                overrides.update(result.overrides)
                marker = "⚠️ " if result.adjusted else "✓"
                print(f"{marker} {family}/{side}/{case}: {result.axis}={result.value:.4f}")
        matrix = verify_case_matrix(args.env, family, config, seeds, args.seed)
        matrix_path = ctx.out / f"case_matrix_{family}.csv"
        matrix.to_csv(matrix_path, index=False)
        ctx.manifest.add_output(f"case_matrix_{family}", matrix_path)
        optimum = scripted_optimum(args.env, family, config, seed=args.seed)
        report[family] = {"overrides": overrides, "scripted_optimum": optimum}
        if not matrix["passed"].all():
            failed.append(family)
            print(f"✗ {family}: case matrix does not reproduce the expected outcomes")
        else:
            print(f"✓ {family}: case matrix reproduced, optimum {optimum}")

    report_path = ctx.out / "calibration.yaml"
    with open(report_path, "w") as f:
        yaml.safe_dump(report, f, sort_keys=False)
    ctx.manifest.add_output("calibration", report_path)

    print("\n" + "=" * 60)
    if failed:
        raise CalibrationError(f"Case matrix failed for: {', '.join(failed)}")
    print("✅ Calibration completed!")
    return EXIT_OK


def cmd_render_debug(args: argparse.Namespace, config, ctx: RunContext) -> int:
    """Dump the world rendering and both drivers' degraded views for one episode."""
    scenario = build_scenario(scenario_for(args.env, args.family, args.case, config, args.seed), config)
    if args.policy == "oracle":
        policy = oracle_policy(scenario.config)
    else:
        policy = ScriptedPolicy(AI if args.policy == "ai" else HUMAN)
    frames_dir = ctx.out / "frames"
    limit = args.frames

    def dump(step: int, frames) -> None:
        if step < limit:
            for name, image in frames.items():
                save_frame(image, frames_dir, 0, step, prefix=name)

    print(f"🖼️  Rendering {args.env} / {args.family} {args.case} ({limit} frames)")
    record = run_episode(scenario, policy, args.seed, on_frame=dump)
    ctx.manifest.add_output("frames", frames_dir)
    print(f"✅ Episode ended with {record.outcome.value} after {record.steps} steps; frames in {frames_dir}")
    return EXIT_OK


def _workers(args: argparse.Namespace, config) -> int:
    return args.workers or get_settings().delegation_workers or config.evaluation.workers


def _echo(row) -> None:
    marker = "✓" if row["outcome"] == "goal" else "✗"
    print(f"{marker} {row['case']} #{row['episode_index']}: {row['outcome']} reward={row['reward']:.1f}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Human-AI delegation manager simulator")
    parser.add_argument("--config", default=None, help="Path to config file (default: $DELEGATION_CONFIG or config.yaml)")
    parser.add_argument("--seed", type=int, default=0, help="Master seed")
    parser.add_argument("--out", default=None, help="Output directory (default: results/<command>)")
    parser.add_argument("--no-db", action="store_true", help="Do not record the run in the database")
    parser.add_argument("--verbose", action="store_true", help="Debug logging on stderr")

    scenario = argparse.ArgumentParser(add_help=False)
    scenario.add_argument("--env", choices=[e.value for e in EnvironmentKind], default=EnvironmentKind.FOUR_WAY.value)
    scenario.add_argument("--episodes", type=int, default=None, help="Episodes (per case for evaluation)")

    subparsers = parser.add_subparsers(dest="command", required=True)

    train = subparsers.add_parser("train", parents=[scenario], help="Train the delegation manager")
    train.add_argument("--family", choices=[f.value for f in Family], default=Family.MASK.value)
    train.add_argument("--device", default="cpu")
    train.set_defaults(handler=cmd_train)

    evaluate = subparsers.add_parser("eval", parents=[scenario], help="Evaluate a policy over the case matrix")
    evaluate.add_argument("--family", choices=[f.value for f in Family], default=Family.MASK.value)
    evaluate.add_argument("--checkpoint", default=None)
    evaluate.add_argument(
        "--policy",
        choices=[PolicyKind.MANAGER.value, PolicyKind.HUMAN.value, PolicyKind.AI.value, PolicyKind.ORACLE.value],
        default=PolicyKind.MANAGER.value,
    )
    evaluate.add_argument("--workers", type=int, default=None)
    evaluate.set_defaults(handler=cmd_eval)

    sweep = subparsers.add_parser("sweep-random", parents=[scenario], help="Random manager interval sweep")
    sweep.add_argument("--family", choices=[f.value for f in Family], default=Family.MASK.value)
    sweep.add_argument("--intervals", type=int, nargs="+", default=None)
    sweep.add_argument("--workers", type=int, default=None)
    sweep.set_defaults(handler=cmd_sweep_random)

    calibrate = subparsers.add_parser("calibrate", parents=[scenario], help="Verify and tune case parameters")
    calibrate.add_argument("--family", choices=[f.value for f in Family], default=None)
    calibrate.set_defaults(handler=cmd_calibrate)

    render = subparsers.add_parser("render-debug", parents=[scenario], help="Dump rendered frames")
    render.add_argument("--family", choices=[f.value for f in Family], default=Family.MASK.value)
    render.add_argument("--case", choices=CASE_LABELS, default="S/E")
    render.add_argument("--policy", choices=["human", "ai", "oracle"], default="oracle")
    render.add_argument("--frames", type=int, default=50, help="Steps to dump")
    render.set_defaults(handler=cmd_render_debug)
    return parser


HANDLED_ERRORS: Dict[type, int] = {
    ConfigError: EXIT_CONFIG,
    TrainingDivergedError: EXIT_DIVERGED,
    CheckpointError: EXIT_CHECKPOINT,
    CalibrationError: EXIT_CALIBRATION,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line interface; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    handler: Callable = args.handler
    try:
        config = load_simulator_config(args.config)
        with RunContext(args.command, args, config) as ctx:
            return handler(args, config, ctx)
    except Exception as exc:
        code = next((c for t, c in HANDLED_ERRORS.items() if isinstance(exc, t)), EXIT_UNEXPECTED)
        if code == EXIT_UNEXPECTED:
            logger.exception("Unexpected failure")
        print(f"❌ {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
