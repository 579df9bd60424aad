"""Closed-loop verification and tuning of case parameters."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from data.scenarios import get_calibration_axis, get_case_parameters

from ..errors import CalibrationError
from ..manager.policies import ScriptedPolicy
from ..manager.rewards import AGENT_NAMES, AI, HUMAN
from ..routing.network import EnvironmentKind
from ..utils.seeding import derive_seed
from .builder import build_scenario
from .config import CASE_LABELS, Case, Family, ScenarioConfig, SimulatorConfig, parse_case
from .simulation import Outcome, oracle_policy, run_episode

logger = logging.getLogger(__name__)

# noise only reaches the manager, so noisy families drive like their base family
CALIBRATION_BASE = {Family.NOISY_FOG: Family.FOG, Family.NOISY_NIGHT: Family.NIGHT}

SIDES = {"human": HUMAN, "ai": AI}

MATRIX_COLUMNS = ["case", "agent", "expected", "goal", "collision", "timeout", "passed"]


@dataclass
class CalibrationResult:
    """Verified parameters for one side of a family."""

    environment: EnvironmentKind
    family: Family
    side: str
    case: Case
    axis: str
    value: float
    adjusted: bool
    transcript: List[str] = field(default_factory=list)

    @property
    def overrides(self) -> Dict[str, float]:
        return {f"{self.side}.{self.axis}": self.value} if self.adjusted else {}


def expected_outcome(case: Case) -> Outcome:
    return Outcome.GOAL if Case(case) == Case.SUCCESS else Outcome.COLLISION


def axis_default(family: Family, side: str, case: Case) -> float:
    """Current value of the family's calibration axis in the stored parameters."""
    axis, _ = get_calibration_axis(family.value, side)
    params = get_case_parameters(family.value, side, case.value)
    if axis == "area_fraction":
        return float(params["masks"][0]["area_fraction"])
    if axis == "color_tolerance":
        return float(params["color"]["tolerance"])
    context, name = axis.split(".", 1)
    return float(params[context][name])


def _solo_config(environment, family: Family, side: str, case: Case, overrides: Dict[str, float], settings):
    return ScenarioConfig(
        environment=EnvironmentKind(environment),
        family=family,
        human_case=case,
        ai_case=case,
        step_limit=settings.simulation.step_limit,
        overrides=overrides,
    )


def solo_trial(
    environment: Union[str, EnvironmentKind],
    family: Family,
    side: str,
    case: Case,
    overrides: Dict[str, float],
    settings: SimulatorConfig,
    seed: int = 0,
) -> Tuple[bool, List[str]]:
    """Solo runs of one driver; passes when every seed gives the case's expected outcome."""
    config = _solo_config(environment, family, side, case, overrides, settings)
    scenario = build_scenario(config, settings)
    expected = expected_outcome(case)
    policy = ScriptedPolicy(SIDES[side])
    lines: List[str] = []
    passed = True
    for i in range(settings.calibration.trial_seeds):
        record = run_episode(scenario, policy, derive_seed(seed, i))
        ok = record.outcome == expected
        passed &= ok
        lines.append(
            f"{family.value}/{side}/{case.value} {overrides or 'defaults'} seed#{i}: "
            f"{record.outcome.value} after {record.steps} steps ({'ok' if ok else 'expected ' + expected.value})"
        )
        if not ok:
            break
    for line in lines:
        logger.info(line)
    return passed, lines


def calibrate_case_parameters(
    family: Union[str, Family],
    side: str,
    case: Union[str, Case],
    environment: Union[str, EnvironmentKind] = EnvironmentKind.FOUR_WAY,
    settings: Optional[SimulatorConfig] = None,
    seed: int = 0,
) -> CalibrationResult:
    """Verify a side's parameters by solo runs, bisecting along the family's axis if they fail.

    Error parameters must make the driver collide and success parameters must
    reach the goal. When the stored value fails, the axis is bisected toward
    its extreme (most severe for error, least severe for success).
    """
    settings = settings or SimulatorConfig()
    family, case = Family(family), Case(case)
    if side not in SIDES:
        raise CalibrationError(f"Unknown side: {side}")
    base = CALIBRATION_BASE.get(family, family)
    axis, (least, most) = get_calibration_axis(base.value, side)
    default = axis_default(base, side, case)
    key = f"{side}.{axis}"
    transcript: List[str] = []

    passed, lines = solo_trial(environment, base, side, case, {}, settings, seed)
    transcript.extend(lines)
    if passed:
        return CalibrationResult(EnvironmentKind(environment), family, side, case, axis, default, False, transcript)

    extreme = least if case == Case.SUCCESS else most
    passed, lines = solo_trial(environment, base, side, case, {key: extreme}, settings, seed)
    transcript.extend(lines)
    if not passed:
        raise CalibrationError(
            f"{family.value}/{side}/{case.value}: even {axis}={extreme} does not give {expected_outcome(case).value}",
            transcript,
        )

    failing, passing = default, extreme
    for _ in range(settings.calibration.bisection_iterations):
        mid = 0.5 * (failing + passing)
        passed, lines = solo_trial(environment, base, side, case, {key: mid}, settings, seed)
        transcript.extend(lines)
        if passed:
            passing = mid
        else:
            failing = mid
    logger.info("Calibrated %s=%.4f for %s/%s (stored %.4f)", key, passing, family.value, case.value, default)
    return CalibrationResult(EnvironmentKind(environment), family, side, case, axis, float(passing), True, transcript)


def verify_case_matrix(
    environment: Union[str, EnvironmentKind],
    family: Union[str, Family],
    settings: Optional[SimulatorConfig] = None,
    seeds: int = 20,
    seed: int = 0,
) -> pd.DataFrame:
    """Scripted always-human and always-AI runs over every case, against the expected outcome."""
    settings = settings or SimulatorConfig()
    family = Family(family)
    rows = []
    for label in CASE_LABELS:
        human_case, ai_case = parse_case(label)
        config = ScenarioConfig(
            environment=EnvironmentKind(environment),
            family=family,
            human_case=human_case,
            ai_case=ai_case,
            step_limit=settings.simulation.step_limit,
        )
        scenario = build_scenario(config, settings)
        for agent, side_case in ((HUMAN, human_case), (AI, ai_case)):
            expected = expected_outcome(side_case)
            outcomes = [
                run_episode(scenario, ScriptedPolicy(agent), derive_seed(seed, i)).outcome for i in range(seeds)
            ]
            counts = {o: sum(1 for x in outcomes if x == o) for o in Outcome}
            rows.append(
                {
                    "case": label,
                    "agent": AGENT_NAMES[agent],
                    "expected": expected.value,
                    "goal": counts[Outcome.GOAL],
                    "collision": counts[Outcome.COLLISION],
                    "timeout": counts[Outcome.TIMEOUT],
                    "passed": counts[expected] == seeds,
                }
            )
    return pd.DataFrame(rows, columns=MATRIX_COLUMNS)


def scripted_optimum(
    environment: Union[str, EnvironmentKind],
    family: Union[str, Family],
    settings: Optional[SimulatorConfig] = None,
    seeds: int = 5,
    seed: int = 0,
) -> Dict[str, float]:
    """Mean reward of the oracle delegation in the mixed cases."""
    settings = settings or SimulatorConfig()
    optimum: Dict[str, float] = {}
    for label in ("S/E", "E/S"):
        human_case, ai_case = parse_case(label)
        config = ScenarioConfig(
            environment=EnvironmentKind(environment),
            family=Family(family),
            human_case=human_case,
            ai_case=ai_case,
            step_limit=settings.simulation.step_limit,
        )
        scenario = build_scenario(config, settings)
        rewards = [run_episode(scenario, oracle_policy(config), derive_seed(seed, i)).reward for i in range(seeds)]
        optimum[label] = float(np.mean(rewards))
    return optimum
