"""Command-line entry point (``dememory``)."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: cli.py
#
# Command-line entry point (``dememory``).
#
# Without a subcommand the positional compat grammar applies:
#
#   dememory <algorithm> <num_frames> <show_process> <debug> <indexes> <page_refs>
#
# e.g. ``dememory B 10 1 0 100 1000``. Algorithm ``A`` is one-level aging,
# ``B`` is 3-level memory-aware aging with speeds 1, 2 and 3; any policy name
# is accepted in the same position. Subcommands ``simulate``, ``sweep`` and
# ``gen-trace`` expose everything else.
#
# Exit codes: 0 success, 1 runtime/I-O failure, 2 invalid invocation.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241127       Created.                                       jrowley
#   20241203       Added sweep presets and perturbed comparison.  jrowley
#   20241216       Log level follows the parsed flags.            jrowley
#
###############################################################################

import argparse
from dataclasses import dataclass, replace
import logging
from pathlib import Path
import sys
from typing import Optional, Sequence, TextIO

from pagesim.bench import (
	PRESETS,
	SweepSpec,
	compare_perturbed,
	default_seeds,
	preset,
	run_sweep,
)
from pagesim.constants import (
	COMPAT_CODES,
	DEFAULT_COUNTER_WIDTH,
	DEFAULT_SEED,
	DEFAULT_SEED_COUNT,
	DEFAULT_SPEEDS,
	DEFAULT_TICK_PERIOD,
	EXPERIMENT_TICK_PERIOD,
	LOG_PATH_ENV,
	PolicyId,
	SweepAxis,
)
from pagesim.engine import Simulation, SnapshotHook, format_snapshot
from pagesim.exceptions import (
	ConfigurationError,
	LogWriteError,
	SimulatorError,
	TraceFormatError,
)
from pagesim.metrics import append_log, format_summary
from pagesim.types import (
	Access,
	AccessOutcome,
	HierarchyConfig,
	LevelSpec,
	ReferenceTrace,
)
from pagesim.workload import WorkloadSpec, generate_trace, read_trace, write_trace

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("simulate", "sweep", "gen-trace")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Parameter name -> the flag or argument a user would have to fix.
_FLAG_NAMES = {
	"capacity_frames": "num_frames/--frames/--level",
	"speed_factor": "--level",
	"tick_divisor": "--level",
	"levels": "algorithm/--level",
	"counter_width_bits": "--counter-width",
	"tick_period": "--tick-period",
	"miss_penalty": "--miss-penalty",
	"write_probability": "--write-prob",
	"num_indexes": "indexes/--indexes",
	"num_refs": "page_refs/--refs",
	"trace": "--trace",
	"points": "--points",
	"seeds": "--seeds",
	"policies": "--policies",
	"speeds": "--level",
	"workers": "--workers",
	"preset": "--preset",
}


def _policy_list() -> str:
	codes = ", ".join(f"{code} ({p.value})" for code, p in COMPAT_CODES.items())
	names = ", ".join(p.value for p in PolicyId)
	return f"algorithm codes: {codes}\npolicies: {names}"


def resolve_policy(text: str) -> PolicyId:
	"""
	Resolve an algorithm code or policy name.

	:param text: ``A``, ``B``, or a policy name such as ``fifo-n`` or
		``AGING_N``.
	:type text: str
	:return: The policy.
	:rtype: PolicyId
	:raises argparse.ArgumentTypeError: Will raise for an unknown algorithm.
	"""
	if text.upper() in COMPAT_CODES and len(text) == 1:
		return COMPAT_CODES[text.upper()]
	try:
		return PolicyId(text)
	except ValueError:
		raise argparse.ArgumentTypeError(
			f"unknown algorithm {text!r}; {_policy_list()}"
		) from None


def _positive_int(text: str) -> int:
	try:
		value = int(text)
	except ValueError:
		raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
	if value < 1:
		raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
	return value


def _non_negative_int(text: str) -> int:
	try:
		value = int(text)
	except ValueError:
		raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text!r}")
	if value < 0:
		raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text!r}")
	return value


def _switch(text: str) -> bool:
	if text not in ("0", "1"):
		raise argparse.ArgumentTypeError(f"expected 0 or 1, got {text!r}")
	return text == "1"


def _probability(text: str) -> float:
	try:
		value = float(text)
	except ValueError:
		raise argparse.ArgumentTypeError(f"expected a number in [0, 1], got {text!r}")
	if not 0.0 <= value <= 1.0:
		raise argparse.ArgumentTypeError(f"expected a number in [0, 1], got {text!r}")
	return value


def _level(text: str) -> tuple[int, float]:
	"""Parse ``FRAMES:SPEED`` (speed defaults to 1)."""
	frames_text, _, speed_text = text.partition(":")
	try:
		frames = int(frames_text)
		speed = float(speed_text) if speed_text else 1.0
	except ValueError:
		raise argparse.ArgumentTypeError(f"expected FRAMES:SPEED, got {text!r}")
	return frames, speed


def _points(text: str) -> tuple[int, ...]:
	"""Parse ``10,20,50`` or ``START:STOP:STEP`` (stop inclusive)."""
	try:
		if ":" in text:
			start, stop, step = (int(p) for p in text.split(":"))
			if step < 1:
				raise ValueError
			return tuple(range(start, stop + 1, step))
		return tuple(int(p) for p in text.split(","))
	except ValueError:
		raise argparse.ArgumentTypeError(
			f"expected a comma list or START:STOP:STEP, got {text!r}"
		) from None


def _policies(text: str) -> tuple[PolicyId, ...]:
	return tuple(resolve_policy(p.strip()) for p in text.split(",") if p.strip())


@dataclass(frozen=True)
class SimulationRequest:
	# noinspection PyUnresolvedReferences
	"""
	A single simulation as requested on the command line.

	:ivar policy: The algorithm.
	:type policy: PolicyId
	:ivar config: The hierarchy.
	:type config: HierarchyConfig
	:ivar workload: Inline trace generation parameters, None for trace files.
	:type workload: Optional[WorkloadSpec]
	:ivar trace_path: Trace file to replay. Optional.
	:type trace_path: Optional[Path]
	:ivar show_process: Print the page tables after every reference.
	:type show_process: bool
	:ivar debug: Log every hit, miss and migration.
	:type debug: bool
	:ivar progress: Print the statistics so far every this many references,
		0 for never.
	:type progress: int
	:ivar log_path: Results log. Optional, see ``resolve_log_path``.
	:type log_path: Optional[Path]
	:ivar seed_defaulted: True if no seed was given on the command line.
	:type seed_defaulted: bool
	"""

	policy: PolicyId
	config: HierarchyConfig
	workload: Optional[WorkloadSpec] = None
	trace_path: Optional[Path] = None
	show_process: bool = False
	debug: bool = False
	progress: int = 0
	log_path: Optional[Path] = None
	seed_defaulted: bool = False


@dataclass(frozen=True)
class CliInvocation:
	# noinspection PyUnresolvedReferences
	"""
	A parsed command line.

	:ivar mode: ``compat``, ``simulate``, ``sweep`` or ``gen-trace``.
	:type mode: str
	:ivar args: The parsed arguments.
	:type args: argparse.Namespace
	:ivar simulation: The simulation to run, for compat and simulate.
	:type simulation: Optional[SimulationRequest]
	"""

	mode: str
	args: argparse.Namespace
	simulation: Optional[SimulationRequest] = None


class UsageError(Exception):
	"""Invalid combination of otherwise well-formed arguments."""


def _hierarchy_for(
	policy: PolicyId, frames: int, **kwargs: object
) -> HierarchyConfig:
	if policy.multi_level:
		return HierarchyConfig.uniform(frames, DEFAULT_SPEEDS, **kwargs)
	return HierarchyConfig.single(frames, **kwargs)


def build_compat_parser() -> argparse.ArgumentParser:
	"""Build the parser of the positional ``dememory`` grammar."""
	parser = argparse.ArgumentParser(
		prog="dememory",
		description="Simulate page replacement on a one- or N-level memory hierarchy.",
		epilog=(
			f"{_policy_list()}\n"
			f"subcommands: {', '.join(SUBCOMMANDS)} (see 'dememory <subcommand> -h')\n"
			f"example: dememory B 10 1 0 100 1000\n"
			f"results are appended to dememory.log (override with ${LOG_PATH_ENV})"
		),
		formatter_class=argparse.RawDescriptionHelpFormatter,
	)
	parser.add_argument("algorithm", type=resolve_policy, help="A, B, or a policy name")
	parser.add_argument("num_frames", type=_positive_int, help="frames per level")
	parser.add_argument("show_process", type=_switch, help="1 to print the page tables")
	parser.add_argument("debug", type=_switch, help="1 to print every migration")
	parser.add_argument("indexes", type=_positive_int, help="unique page indexes")
	parser.add_argument("page_refs", type=_positive_int, help="page references")
	parser.add_argument(
		"--seed", type=int, default=None, help=f"workload seed (default {DEFAULT_SEED})"
	)
	parser.add_argument("--log", type=Path, default=None, help="results log file")
	parser.add_argument(
		"--progress",
		type=_non_negative_int,
		default=0,
		help="print statistics so far every N references",
	)
	return parser


def parse_compat(argv: Sequence[str]) -> CliInvocation:
	"""
	Parse the positional compat grammar.

	:param argv: Arguments, without the program name.
	:type argv: Sequence[str]
	:return: The invocation.
	:rtype: CliInvocation
	:raises SystemExit: Will exit with code 2 after printing usage on wrong
		arity or invalid values.
	:raises ConfigurationError: Will raise if the values describe no valid
		simulation.
	"""
	args = build_compat_parser().parse_args(list(argv))
	seed = DEFAULT_SEED if args.seed is None else args.seed
	policy: PolicyId = args.algorithm
	request = SimulationRequest(
		policy=policy,
		config=_hierarchy_for(policy, args.num_frames),
		workload=WorkloadSpec(args.indexes, args.page_refs, seed),
		show_process=args.show_process,
		debug=args.debug,
		progress=args.progress,
		log_path=args.log,
		seed_defaulted=args.seed is None,
	)
	return CliInvocation("compat", args, request)


def build_parser() -> argparse.ArgumentParser:
	"""Build the subcommand parser."""
	parser = argparse.ArgumentParser(
		prog="dememory",
		description="Page replacement simulator subcommands.",
		epilog=_policy_list(),
		formatter_class=argparse.RawDescriptionHelpFormatter,
	)
	parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
	sub = parser.add_subparsers(dest="mode", required=True, metavar="subcommand")

	sim = sub.add_parser("simulate", help="run one simulation", epilog=_policy_list())
	sim.add_argument("--policy", type=resolve_policy, default=PolicyId.AGING_N)
	sim.add_argument(
		"--level",
		type=_level,
		action="append",
		metavar="FRAMES:SPEED",
		help="add a memory level, fastest first (repeatable)",
	)
	sim.add_argument(
		"--frames",
		type=_positive_int,
		default=10,
		help="frames per level without --level",
	)
	sim.add_argument("--indexes", type=_positive_int, default=100)
	sim.add_argument("--refs", type=_non_negative_int, default=1000)
	sim.add_argument("--seed", type=int, default=None)
	sim.add_argument("--trace", type=Path, default=None, help="replay a trace file")
	sim.add_argument("--write-prob", type=_probability, default=0.0)
	sim.add_argument("--tick-period", type=_positive_int, default=DEFAULT_TICK_PERIOD)
	sim.add_argument(
		"--counter-width", type=_positive_int, default=DEFAULT_COUNTER_WIDTH
	)
	sim.add_argument("--miss-penalty", type=float, default=None)
	sim.add_argument("--promote-on-hit", action="store_true")
	sim.add_argument("--show-process", action="store_true")
	sim.add_argument("--debug", action="store_true")
	sim.add_argument("--progress", type=_non_negative_int, default=0)
	sim.add_argument("--log", type=Path, default=None)

	sweep = sub.add_parser("sweep", help="run a parameter sweep", epilog=_policy_list())
	sweep.add_argument("--preset", choices=sorted(PRESETS), default=None)
	sweep.add_argument(
		"--axis",
		type=SweepAxis,
		default=None,
		choices=list(SweepAxis),
		metavar="{frames,indexes,refs}",
	)
	sweep.add_argument("--points", type=_points, default=None)
	sweep.add_argument("--frames", type=_positive_int, default=10)
	sweep.add_argument("--indexes", type=_positive_int, default=100)
	sweep.add_argument("--refs", type=_non_negative_int, default=1000)
	sweep.add_argument("--policies", type=_policies, default=None)
	sweep.add_argument(
		"--seeds",
		type=_positive_int,
		default=DEFAULT_SEED_COUNT,
		help="number of seeds",
	)
	sweep.add_argument("--seed", type=int, default=DEFAULT_SEED, help="first seed")
	sweep.add_argument("--write-prob", type=_probability, default=0.0)
	sweep.add_argument(
		"--tick-period", type=_positive_int, default=EXPERIMENT_TICK_PERIOD
	)
	sweep.add_argument("--hpc", action="store_true", help="allow axis values up to 1e6")
	sweep.add_argument("--workers", type=_positive_int, default=1)
	sweep.add_argument(
		"--compare-perturbed",
		action="store_true",
		help="pair aging-n with aging-n-perturbed at the fixed parameters",
	)
	sweep.add_argument("-o", "--output", type=Path, default=None, help="CSV file")

	gen = sub.add_parser("gen-trace", help="write a generated trace file")
	gen.add_argument("--indexes", type=_positive_int, default=100)
	gen.add_argument("--refs", type=_non_negative_int, default=1000)
	gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
	gen.add_argument("--write-prob", type=_probability, default=0.0)
	gen.add_argument("-o", "--output", type=Path, required=True)
	return parser


def _simulate_request(args: argparse.Namespace) -> SimulationRequest:
	common = dict(
		counter_width_bits=args.counter_width,
		tick_period=args.tick_period,
		miss_penalty=args.miss_penalty,
		write_probability=args.write_prob,
		promote_on_hit=args.promote_on_hit,
	)
	if args.level:
		levels = tuple(
			LevelSpec(frames, speed, tick_divisor=i)
			for i, (frames, speed) in enumerate(args.level, start=1)
		)
		config = HierarchyConfig(levels, **common)  # type: ignore[arg-type]
	else:
		config = _hierarchy_for(args.policy, args.frames, **common)
	workload = None
	if args.trace is None:
		seed = DEFAULT_SEED if args.seed is None else args.seed
		workload = WorkloadSpec(args.indexes, args.refs, seed, args.write_prob)
	return SimulationRequest(
		policy=args.policy,
		config=config,
		workload=workload,
		trace_path=args.trace,
		show_process=args.show_process,
		debug=args.debug,
		progress=args.progress,
		log_path=args.log,
		seed_defaulted=args.trace is None and args.seed is None,
	)


def parse_args(argv: Sequence[str]) -> CliInvocation:
	"""
	Parse a command line in either grammar.

	:param argv: Arguments, without the program name.
	:type argv: Sequence[str]
	:return: The invocation.
	:rtype: CliInvocation
	:raises SystemExit: Will exit with code 2 after printing usage.
	:raises ConfigurationError: Will raise for an invalid simulation setup.
	"""
	argv = list(argv)
	if not argv or argv[0] not in SUBCOMMANDS + ("-v", "--verbose"):
		return parse_compat(argv)
	args = build_parser().parse_args(argv)
	if args.mode == "simulate":
		return CliInvocation(args.mode, args, _simulate_request(args))
	if args.mode == "sweep" and args.preset is None and not args.compare_perturbed:
		if args.axis is None or args.points is None:
			raise UsageError("--axis and --points are required without --preset")
	return CliInvocation(args.mode, args)


def _make_hook(
	request: SimulationRequest, out: TextIO
) -> Optional[SnapshotHook]:
	if not request.show_process and request.progress <= 0:
		return None

	def hook(sim: Simulation, access: Access, outcome: AccessOutcome) -> None:
		if request.show_process:
			where = "miss" if outcome.hit_level is None else f"hit L{outcome.hit_level}"
			print(f"ref {access.sequence}: page {int(access.page)} {where}", file=out)
			print(format_snapshot(sim.state), file=out)
		if request.progress > 0 and (access.sequence + 1) % request.progress == 0:
			print(f"-- after {access.sequence + 1} references --", file=out)
			print(format_summary(sim.report), file=out)

	return hook


def run_simulation(request: SimulationRequest, out: TextIO) -> int:
	"""
	Run a compat or simulate invocation.

	Prints the configuration, optional per-reference snapshots, and the
	final statistics, then appends one line to the results log.

	:param request: The simulation.
	:type request: SimulationRequest
	:param out: Stream for the console output.
	:type out: TextIO
	:return: Exit code.
	:rtype: int
	"""
	trace: ReferenceTrace
	if request.trace_path is not None:
		trace = read_trace(request.trace_path)
		source = f"trace {request.trace_path}"
		indexes, seed = None, None
	else:
		assert request.workload is not None
		trace = generate_trace(request.workload)
		indexes, seed = request.workload.num_indexes, request.workload.seed
		note = " (default)" if request.seed_defaulted else ""
		source = f"{indexes} indexes, seed {seed}{note}"

	config = request.config
	print(
		f"{request.policy.name}: {config.num_levels} level(s) "
		f"{'/'.join(str(f) for f in config.frames_per_level)} frames, speeds "
		f"{'/'.join(f'{lv.speed_factor:g}' for lv in config.levels)}, "
		f"{len(trace)} references, {source}",
		file=out,
	)
	sim = Simulation(
		config,
		request.policy,
		trace,
		indexes=indexes,
		seed=seed,
		snapshot_hook=_make_hook(request, out),
	)
	report = sim.run()
	print(format_summary(report), file=out)
	path = append_log(report, request.log_path)
	print(f"Results appended to {path}", file=out)
	return EXIT_OK


def run_sweep_command(args: argparse.Namespace, out: TextIO) -> int:
	"""Run a sweep invocation, writing CSV to ``--output`` or ``out``."""
	seeds = default_seeds(args.seeds, args.seed)
	if args.compare_perturbed:
		comparison = compare_perturbed(
			args.frames,
			args.indexes,
			args.refs,
			seeds,
			write_probability=args.write_prob,
			tick_period=args.tick_period,
		)
		text = comparison.to_csv()
		if args.output is not None:
			with args.output.open("w", encoding="utf-8", newline="") as f:
				f.write(text)
		else:
			out.write(text)
		return EXIT_OK

	overrides: dict[str, object] = dict(
		seeds=seeds, workers=args.workers, tick_period=args.tick_period
	)
	if args.policies:
		overrides["policies"] = args.policies
	if args.write_prob:
		overrides["write_probability"] = args.write_prob
	if args.preset is not None:
		spec = preset(args.preset, hpc=args.hpc, **overrides)
	else:
		spec = SweepSpec(
			axis=args.axis,
			points=args.points,
			frames=args.frames,
			indexes=args.indexes,
			refs=args.refs,
			allow_hpc=args.hpc,
			**overrides,  # type: ignore[arg-type]
		)
	if args.output is not None:
		spec = replace(spec, output=args.output)
	result = run_sweep(spec)
	if args.output is None:
		out.write(result.to_csv())
	if result.failed:
		failed = len(result.failed)
		print(f"{failed} cell(s) failed, see the status column", file=sys.stderr)
	return EXIT_OK


def run_gen_trace(args: argparse.Namespace, out: TextIO) -> int:
	"""Run a gen-trace invocation."""
	spec = WorkloadSpec(args.indexes, args.refs, args.seed, args.write_prob)
	header = (
		f"indexes={spec.num_indexes} refs={spec.num_refs} seed={spec.seed} "
		f"write_prob={spec.write_probability:g}"
	)
	write_trace(generate_trace(spec), args.output, header=header)
	print(f"Wrote {spec.num_refs} references to {args.output}", file=out)
	return EXIT_OK


def run_cli(invocation: CliInvocation, out: Optional[TextIO] = None) -> int:
	"""
	Execute a parsed invocation.

	:param invocation: The invocation.
	:type invocation: CliInvocation
	:param out: Stream for the console output. Optional, defaults to stdout.
	:type out: Optional[TextIO]
	:return: Exit code.
	:rtype: int
	"""
	out = sys.stdout if out is None else out
	configure_logging(invocation)
	if invocation.simulation is not None:
		return run_simulation(invocation.simulation, out)
	if invocation.mode == "sweep":
		return run_sweep_command(invocation.args, out)
	return run_gen_trace(invocation.args, out)


def configure_logging(invocation: CliInvocation) -> None:
	"""
	Set the log level an invocation asks for.

	WARNING by default, INFO with ``--verbose``, DEBUG with compat debug=1 or
	``--debug``.

	:param invocation: The parsed invocation.
	:type invocation: CliInvocation
	"""
	level = logging.WARNING
	if getattr(invocation.args, "verbose", False):
		level = logging.INFO
	request = invocation.simulation
	if (request is not None and request.debug) or getattr(
		invocation.args, "debug", False
	):
		level = logging.DEBUG
	logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
	logging.getLogger().setLevel(level)


def _error(message: str) -> None:
	print(f"dememory: error: {message}", file=sys.stderr)


def _flag_of(error: ConfigurationError) -> str:
	if error.field is None:
		return "arguments"
	return _FLAG_NAMES.get(error.field, error.field)


def main(
	argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None
) -> int:
	"""
	Run the ``dememory`` command.

	:param argv: Arguments, without the program name. Optional, defaults to
		``sys.argv[1:]``.
	:type argv: Optional[Sequence[str]]
	:param out: Stream for the console output. Optional, defaults to stdout.
	:type out: Optional[TextIO]
	:return: Exit code: 0 success, 1 runtime failure, 2 invalid invocation.
	:rtype: int
	"""
	argv = sys.argv[1:] if argv is None else list(argv)
	try:
		invocation = parse_args(argv)
		return run_cli(invocation, out)
	except SystemExit as e:
		return e.code if isinstance(e.code, int) else EXIT_USAGE
	except UsageError as e:
		_error(str(e))
		return EXIT_USAGE
	except ConfigurationError as e:
		_error(f"{_flag_of(e)}: {e}")
		return EXIT_USAGE
	except TraceFormatError as e:
		_error(f"--trace: {e}")
		return EXIT_USAGE
	except LogWriteError as e:
		_error(str(e))
		return EXIT_FAILURE
	except SimulatorError as e:
		_error(str(e))
		return EXIT_FAILURE
	except OSError as e:
		_error(f"{e.filename}: {e.strerror or e}")
		return EXIT_FAILURE


if __name__ == "__main__":
	sys.exit(main())
