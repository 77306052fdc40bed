# coding=utf-8
# Copyright 2026 The risnoma Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import sys
from argparse import ArgumentParser, ArgumentTypeError
from pathlib import Path
from typing import List, Optional

from .config import ConfigError, ScenarioConfig, parse_config
from .experiments import convergence_trace, solve_trial, sweep_power, sweep_qos, trial_result, trial_seed
from .export import emit_csv, emit_trial_csv, render_plots
from .frameworks import FrameworksManager
from .validate import validate_solution
from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name

COMMANDS = ("convergence", "sweep-power", "sweep-qos", "single-trial")


def _framework_list(text: str) -> List[str]:
    try:
        return FrameworksManager.parse_framework_list(text)
    except ValueError as e:
        raise ArgumentTypeError(str(e))


def _element_list(text: str) -> List[int]:
    try:
        values = [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")
    if not values or any(v < 0 for v in values):
        raise ArgumentTypeError(f"expected RIS sizes >= 0, got {text!r}")
    return values


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ArgumentTypeError(f"expected an integer, got {text!r}")
    if not 0 <= value < 2**64:
        raise ArgumentTypeError(f"expected an unsigned 64-bit seed, got {value}")
    return value


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON scenario file; missing keys take defaults.")
    common.add_argument(
        "--out-dir", type=Path, default=Path("results"), help="Directory receiving the CSV (and PNG) files."
    )
    common.add_argument("--seed", type=_seed, default=None, help="Master seed, overrides `master_seed`.")
    common.add_argument("--trials", type=_positive_int, default=None, help="Monte Carlo trials per point.")
    common.add_argument(
        "--framework",
        type=_framework_list,
        default=None,
        help="Comma-separated frameworks to compare. Supported values: "
        f"{', '.join(FrameworksManager.AVAILABLE_FRAMEWORKS_INCLUDING_SYNONYMS)}.",
    )
    common.add_argument("--jobs", type=_positive_int, default=1, help="Worker processes running the trials.")
    common.add_argument("--emit-plots", action="store_true", help="Also render PNG line charts (needs matplotlib).")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log iteration details.")
    verbosity.add_argument("--quiet", action="store_true", help="Only log warnings and errors.")

    parser = ArgumentParser(
        "risnoma", description="Energy-efficiency simulations of RIS-assisted NOMA LEO satellite downlinks."
    )
    subparsers = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")
    subparsers.required = True

    convergence = subparsers.add_parser(
        "convergence", parents=[common], help="Mean EE per alternating iteration for several RIS sizes."
    )
    convergence.add_argument(
        "--elements", type=_element_list, default=None, help="Comma-separated RIS sizes, e.g. `32,64`."
    )
    subparsers.add_parser("sweep-power", parents=[common], help="Mean EE against the satellite power budget.")
    subparsers.add_parser("sweep-qos", parents=[common], help="Mean EE against the QoS rate requirement.")
    subparsers.add_parser("single-trial", parents=[common], help="Every framework on one channel draw, with traces.")
    return parser


def load_config(args) -> ScenarioConfig:
    cfg = parse_config(args.config) if args.config is not None else ScenarioConfig().validate()
    changes = {}
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.framework is not None:
        changes["frameworks"] = args.framework
    return cfg.replace(**changes).validate() if changes else cfg


def _configure_logging(args):
    logging.configure_from_flags(verbose=args.verbose, quiet=args.quiet)


def run_convergence(cfg: ScenarioConfig, args):
    table = convergence_trace(cfg, M_values=args.elements, jobs=args.jobs)
    emit_csv(table, args.out_dir / "convergence.csv")
    return {"convergence": table}


def run_sweep_power(cfg: ScenarioConfig, args):
    sweep = sweep_power(cfg, jobs=args.jobs)
    emit_csv(sweep, args.out_dir / "sweep_power.csv")
    return {"sweep_power": sweep}


def run_sweep_qos(cfg: ScenarioConfig, args):
    sweep = sweep_qos(cfg, jobs=args.jobs)
    emit_csv(sweep, args.out_dir / "sweep_qos.csv")
    return {"sweep_qos": sweep}


def run_single_trial(cfg: ScenarioConfig, args):
    seed = trial_seed(cfg.master_seed, 0)
    results = []
    for framework in cfg.frameworks:
        channels, solution = solve_trial(cfg, seed, framework)
        validate_solution(solution, channels, cfg)
        emit_csv(solution.trace, args.out_dir / f"trace_{framework}.csv")
        results.append(trial_result(seed, framework, solution))
        logger.info(f"{framework}: EE {solution.ee:.6g} bits/s/Hz/W ({solution.status})")
    emit_trial_csv(results, args.out_dir / "single_trial.csv")
    return {}


_RUNNERS = {
    "convergence": run_convergence,
    "sweep-power": run_sweep_power,
    "sweep-qos": run_sweep_qos,
    "single-trial": run_single_trial,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    try:
        cfg = load_config(args)
    except (ConfigError, OSError) as e:
        logger.error(str(e))
        return 2

    try:
        logger.info(f"Running {args.command} with {cfg.trials} trials per point, master seed {cfg.master_seed}")
        plottable = _RUNNERS[args.command](cfg, args)
        if args.emit_plots and plottable:
            render_plots(plottable, args.out_dir)
    except ConfigError as e:
        logger.error(str(e))
        return 2
    except Exception as e:  # pylint: disable=broad-except
        logger.error(f"{args.command} failed: {e}")
        return 1

    logger.info(f"All good, results saved in: {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
