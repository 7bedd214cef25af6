"""Parameter sweeps comparing replacement policies."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: bench.py
#
# Parameter sweeps comparing replacement policies.
#
# A sweep varies one of frames (F), unique indexes (I) or references (R)
# while the other two stay fixed. Every (axis value, seed) pair gets one
# trace which all policies run on. One-level policies get F frames; N-level
# policies get F frames on each level.
#
# Sweep CSV (LF line endings, header first):
#
#   axis,axis_value,policy,seed,hits,misses,hit_miss_ratio,hit_rate,
#   weighted_cost,status,ratio_stddev
#
# ``status`` is "ok" for a data row, "failed: <reason>" for a cell whose
# setup was rejected, and "aggregate" for the per-(axis value, policy)
# summary row following its data rows. Aggregate rows carry "mean" in the
# seed column, means over the successful seeds in the numeric columns, and
# the sample standard deviation of hit_miss_ratio in ``ratio_stddev``.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241126       Created.                                       jrowley
#   20241203       Added perturbed comparison and sweep presets.  jrowley
#   20241216       Failed workloads no longer abort a sweep.      jrowley
#
###############################################################################

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field, replace
import io
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from pagesim.constants import (
	DEFAULT_COUNTER_WIDTH,
	DEFAULT_SEED,
	DEFAULT_SEED_COUNT,
	DEFAULT_SPEEDS,
	DESK_SCALE_CAP,
	EXPERIMENT_TICK_PERIOD,
	HPC_SCALE_CAP,
	PolicyId,
	SweepAxis,
)
from pagesim.engine import simulate
from pagesim.exceptions import ConfigurationError, SimulatorError
from pagesim.metrics import SimReport
from pagesim.types import HierarchyConfig
from pagesim.workload import WorkloadSpec, generate_trace

logger = logging.getLogger(__name__)

SWEEP_HEADER = (
	"axis",
	"axis_value",
	"policy",
	"seed",
	"hits",
	"misses",
	"hit_miss_ratio",
	"hit_rate",
	"weighted_cost",
	"status",
	"ratio_stddev",
)

PERTURBED_HEADER = ("seed", "aging_n", "aging_n_perturbed", "difference")


def default_seeds(
	count: int = DEFAULT_SEED_COUNT, base: int = DEFAULT_SEED
) -> tuple[int, ...]:
	"""Get ``count`` consecutive seeds starting at ``base``."""
	return tuple(range(base, base + count))


@dataclass(frozen=True)
class SweepSpec:
	# noinspection PyUnresolvedReferences
	"""
	Definition of a parameter sweep.

	:ivar axis: The swept parameter.
	:type axis: SweepAxis
	:ivar points: Axis values, strictly increasing.
	:type points: tuple[int, ...]
	:ivar frames: Frames per level when not swept.
	:type frames: int
	:ivar indexes: Unique page indexes when not swept.
	:type indexes: int
	:ivar refs: References per trace when not swept.
	:type refs: int
	:ivar policies: Policies to compare.
	:type policies: tuple[PolicyId, ...]
	:ivar speeds: Speed factor per level for N-level policies; the level
		count follows from its length.
	:type speeds: tuple[float, ...]
	:ivar seeds: Workload seeds, one trace per (axis value, seed).
	:type seeds: tuple[int, ...]
	:ivar write_probability: Probability of a reference being a write.
	:type write_probability: float
	:ivar counter_width_bits: Aging counter width.
	:type counter_width_bits: int
	:ivar tick_period: References per clock interrupt.
	:type tick_period: int
	:ivar output: CSV file to (over)write. Optional.
	:type output: Optional[Path]
	:ivar allow_hpc: Permit axis values above the desk-scale cap, up to the
		HPC cap.
	:type allow_hpc: bool
	:ivar workers: Worker processes; 1 runs in-process.
	:type workers: int
	"""

	axis: SweepAxis
	points: tuple[int, ...]
	frames: int = 10
	indexes: int = 100
	refs: int = 1000
	policies: tuple[PolicyId, ...] = (PolicyId.AGING_1, PolicyId.AGING_N)
	speeds: tuple[float, ...] = DEFAULT_SPEEDS
	seeds: tuple[int, ...] = field(default_factory=default_seeds)
	write_probability: float = 0.0
	counter_width_bits: int = DEFAULT_COUNTER_WIDTH
	tick_period: int = EXPERIMENT_TICK_PERIOD
	output: Optional[Path] = None
	allow_hpc: bool = False
	workers: int = 1

	def __post_init__(self) -> None:
		"""Validate the sweep definition."""
		object.__setattr__(self, "axis", SweepAxis(self.axis))
		object.__setattr__(self, "points", tuple(int(p) for p in self.points))
		object.__setattr__(self, "policies", tuple(PolicyId(p) for p in self.policies))
		object.__setattr__(self, "speeds", tuple(self.speeds))
		object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
		if self.output is not None:
			object.__setattr__(self, "output", Path(self.output))
		if not self.points:
			raise ConfigurationError("at least one point is required", "points")
		if any(b <= a for a, b in zip(self.points, self.points[1:])):
			raise ConfigurationError("must be strictly increasing", "points")
		cap = HPC_SCALE_CAP if self.allow_hpc else DESK_SCALE_CAP
		if self.points[-1] > cap:
			hint = "" if self.allow_hpc else " (enable HPC scale to go further)"
			raise ConfigurationError(
				f"{self.points[-1]} exceeds the cap of {cap}{hint}", "points"
			)
		if not self.seeds:
			raise ConfigurationError("at least one seed is required", "seeds")
		if not self.policies:
			raise ConfigurationError("at least one policy is required", "policies")
		if not self.speeds:
			raise ConfigurationError("at least one level speed is required", "speeds")
		if self.workers < 1:
			raise ConfigurationError(
				f"must be at least 1, got {self.workers}", "workers"
			)

	def parameters(self, value: int) -> tuple[int, int, int]:
		"""Get ``(frames, indexes, refs)`` at axis value ``value``."""
		frames, indexes, refs = self.frames, self.indexes, self.refs
		if self.axis is SweepAxis.FRAMES:
			frames = value
		elif self.axis is SweepAxis.INDEXES:
			indexes = value
		else:
			refs = value
		return frames, indexes, refs

	def hierarchy(self, policy: PolicyId, frames: int) -> HierarchyConfig:
		"""
		Build the hierarchy a policy runs on.

		:param policy: The policy.
		:type policy: PolicyId
		:param frames: Frames per level.
		:type frames: int
		:return: One level of ``frames`` for one-level policies, else one
			level of ``frames`` per configured speed.
		:rtype: HierarchyConfig
		"""
		common = dict(
			counter_width_bits=self.counter_width_bits,
			tick_period=self.tick_period,
			write_probability=self.write_probability,
		)
		if policy.multi_level:
			return HierarchyConfig.uniform(frames, self.speeds, **common)
		return HierarchyConfig.single(frames, **common)


@dataclass(frozen=True)
class SweepRow:
	# noinspection PyUnresolvedReferences
	"""
	One cell of a sweep: a policy on one trace.

	:ivar axis_value: The axis value.
	:type axis_value: int
	:ivar policy: The policy.
	:type policy: PolicyId
	:ivar seed: The workload seed.
	:type seed: int
	:ivar report: The run's report, None if the cell failed.
	:type report: Optional[SimReport]
	:ivar error: Why the cell failed. Optional.
	:type error: Optional[str]
	"""

	axis_value: int
	policy: PolicyId
	seed: int
	report: Optional[SimReport] = None
	error: Optional[str] = None

	@property
	def ok(self) -> bool:
		"""True if the cell ran."""
		return self.report is not None


@dataclass(frozen=True)
class SweepAggregate:
	# noinspection PyUnresolvedReferences
	"""
	Summary of one (axis value, policy) over the successful seeds.

	:ivar axis_value: The axis value.
	:type axis_value: int
	:ivar policy: The policy.
	:type policy: PolicyId
	:ivar runs: Successful seeds.
	:type runs: int
	:ivar hits: Mean hits.
	:type hits: float
	:ivar misses: Mean misses.
	:type misses: float
	:ivar ratio_mean: Mean hit/miss ratio.
	:type ratio_mean: float
	:ivar ratio_stddev: Sample standard deviation of the hit/miss ratio, 0
		for a single seed.
	:type ratio_stddev: float
	:ivar hit_rate: Mean hit rate.
	:type hit_rate: float
	:ivar weighted_cost: Mean weighted cost.
	:type weighted_cost: float
	"""

	axis_value: int
	policy: PolicyId
	runs: int
	hits: float
	misses: float
	ratio_mean: float
	ratio_stddev: float
	hit_rate: float
	weighted_cost: float


def _mean(values: Sequence[float]) -> float:
	return float(np.mean(values)) if len(values) else 0.0


def _stddev(values: Sequence[float]) -> float:
	return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def aggregate(rows: Sequence[SweepRow]) -> SweepAggregate:
	"""
	Summarize the rows of one (axis value, policy).

	:param rows: Rows sharing axis value and policy.
	:type rows: Sequence[SweepRow]
	:return: Means and ratio standard deviation over successful rows.
	:rtype: SweepAggregate
	"""
	reports = [r.report for r in rows if r.report is not None]
	return SweepAggregate(
		axis_value=rows[0].axis_value,
		policy=rows[0].policy,
		runs=len(reports),
		hits=_mean([r.hits for r in reports]),
		misses=_mean([r.misses for r in reports]),
		ratio_mean=_mean([r.hit_miss_ratio for r in reports]),
		ratio_stddev=_stddev([r.hit_miss_ratio for r in reports]),
		hit_rate=_mean([r.hit_rate for r in reports]),
		weighted_cost=_mean([r.weighted_cost for r in reports]),
	)


@dataclass
class SweepResult:
	# noinspection PyUnresolvedReferences
	"""
	All cells of a sweep, in (axis value, policy, seed) order.

	:ivar spec: The sweep definition.
	:type spec: SweepSpec
	:ivar rows: The cells.
	:type rows: list[SweepRow]
	"""

	spec: SweepSpec
	rows: list[SweepRow]

	def _cells(self, value: int, policy: PolicyId) -> list[SweepRow]:
		return [r for r in self.rows if r.axis_value == value and r.policy is policy]

	def aggregates(self) -> list[SweepAggregate]:
		"""One summary per (axis value, policy), in sweep order."""
		out: list[SweepAggregate] = []
		for value in self.spec.points:
			for policy in self.spec.policies:
				group = self._cells(value, policy)
				if group:
					out.append(aggregate(group))
		return out

	def mean_ratio(self, value: int, policy: PolicyId) -> float:
		"""Mean hit/miss ratio of ``policy`` at axis value ``value``."""
		for agg in self.aggregates():
			if agg.axis_value == value and agg.policy is policy:
				return agg.ratio_mean
		raise KeyError((value, policy))

	@property
	def failed(self) -> list[SweepRow]:
		"""Cells whose setup was rejected."""
		return [r for r in self.rows if not r.ok]

	def to_csv(self) -> str:
		"""Render the sweep CSV, header included."""
		axis = self.spec.axis.value
		buf = io.StringIO()
		writer = csv.writer(buf, lineterminator="\n")
		writer.writerow(SWEEP_HEADER)
		aggs = {(a.axis_value, a.policy): a for a in self.aggregates()}
		for value in self.spec.points:
			for policy in self.spec.policies:
				group = self._cells(value, policy)
				for row in group:
					rep = row.report
					if rep is None:
						writer.writerow(
							[axis, value, policy.name, row.seed, "", "", "", "", ""]
							+ [f"failed: {row.error}", ""]
						)
					else:
						writer.writerow(
							[
								axis,
								value,
								policy.name,
								row.seed,
								rep.hits,
								rep.misses,
								f"{rep.hit_miss_ratio:.6f}",
								f"{rep.hit_rate:.6f}",
								f"{rep.weighted_cost:.3f}",
								"ok",
								"",
							]
						)
				agg = aggs.get((value, policy))
				if agg is not None:
					writer.writerow(
						[
							axis,
							value,
							policy.name,
							"mean",
							f"{agg.hits:.3f}",
							f"{agg.misses:.3f}",
							f"{agg.ratio_mean:.6f}",
							f"{agg.hit_rate:.6f}",
							f"{agg.weighted_cost:.3f}",
							"aggregate",
							f"{agg.ratio_stddev:.6f}",
						]
					)
		return buf.getvalue()

	def write(self, path: Union[str, Path]) -> None:
		"""Write the sweep CSV, replacing any existing file."""
		with Path(path).open("w", encoding="utf-8", newline="") as f:
			f.write(self.to_csv())


def _run_trace_group(spec: SweepSpec, value: int, seed: int) -> list[SweepRow]:
	"""Run every policy of ``spec`` on the trace for ``(value, seed)``."""
	frames, indexes, refs = spec.parameters(value)
	if refs <= 0:
		logger.warning(f"{spec.axis.value}={value} seed {seed}: {refs} references")
	try:
		trace = generate_trace(
			WorkloadSpec(indexes, refs, seed, spec.write_probability)
		)
	except SimulatorError as e:
		logger.warning(f"{spec.axis.value}={value} seed {seed}: {e}")
		return [SweepRow(value, p, seed, error=str(e)) for p in spec.policies]
	rows: list[SweepRow] = []
	for policy in spec.policies:
		try:
			config = spec.hierarchy(policy, frames)
			report = simulate(config, policy, trace, indexes=indexes, seed=seed)
		except SimulatorError as e:
			logger.warning(f"{spec.axis.value}={value} {policy.name} seed {seed}: {e}")
			rows.append(SweepRow(value, policy, seed, error=str(e)))
			continue
		logger.debug(
			f"{spec.axis.value}={value} {policy.name} seed {seed}: "
			f"ratio {report.hit_miss_ratio:.4f}"
		)
		rows.append(SweepRow(value, policy, seed, report))
	return rows


def run_sweep(spec: SweepSpec) -> SweepResult:
	"""
	Run a parameter sweep.

	Cells may run in parallel (``spec.workers``); the result is always in
	(axis value, policy, seed) order. A cell whose setup is rejected is
	recorded as failed and the sweep continues. The CSV is written to
	``spec.output`` when set.

	:param spec: The sweep definition.
	:type spec: SweepSpec
	:return: Every cell of the sweep.
	:rtype: SweepResult
	"""
	groups = [(value, seed) for value in spec.points for seed in spec.seeds]
	logger.info(
		f"Sweeping {spec.axis.value} over {len(spec.points)} point(s), "
		f"{len(spec.policies)} policies, {len(spec.seeds)} seed(s)."
	)
	if spec.workers > 1:
		with ProcessPoolExecutor(max_workers=spec.workers) as pool:
			results = list(
				pool.map(
					_run_trace_group,
					[spec] * len(groups),
					[v for v, _ in groups],
					[s for _, s in groups],
				)
			)
	else:
		results = [_run_trace_group(spec, v, s) for v, s in groups]

	order = {p: i for i, p in enumerate(spec.policies)}
	rows = sorted(
		(row for group in results for row in group),
		key=lambda r: (r.axis_value, order[r.policy], spec.seeds.index(r.seed)),
	)
	result = SweepResult(spec, rows)
	if spec.output is not None:
		result.write(spec.output)
		logger.info(f"Wrote sweep CSV to {spec.output}.")
	return result


@dataclass(frozen=True)
class PerturbedPair:
	# noinspection PyUnresolvedReferences
	"""
	AGING_N and its perturbed control on one trace.

	:ivar seed: The workload seed.
	:type seed: int
	:ivar correct: Report of AGING_N.
	:type correct: SimReport
	:ivar perturbed: Report of AGING_N_PERTURBED.
	:type perturbed: SimReport
	"""

	seed: int
	correct: SimReport
	perturbed: SimReport

	@property
	def difference(self) -> float:
		"""Correct minus perturbed hit/miss ratio."""
		return self.correct.hit_miss_ratio - self.perturbed.hit_miss_ratio


@dataclass
class PerturbedComparison:
	# noinspection PyUnresolvedReferences
	"""
	Paired comparison of AGING_N against AGING_N_PERTURBED.

	:ivar pairs: One pair per seed, in seed order.
	:type pairs: list[PerturbedPair]
	"""

	pairs: list[PerturbedPair]

	@property
	def mean_correct(self) -> float:
		"""Mean hit/miss ratio of AGING_N."""
		return _mean([p.correct.hit_miss_ratio for p in self.pairs])

	@property
	def mean_perturbed(self) -> float:
		"""Mean hit/miss ratio of AGING_N_PERTURBED."""
		return _mean([p.perturbed.hit_miss_ratio for p in self.pairs])

	@property
	def mean_difference(self) -> float:
		"""``mean_correct - mean_perturbed``."""
		return self.mean_correct - self.mean_perturbed

	def to_csv(self) -> str:
		"""Render paired ratios plus a final ``mean`` row."""
		buf = io.StringIO()
		writer = csv.writer(buf, lineterminator="\n")
		writer.writerow(PERTURBED_HEADER)
		for p in self.pairs:
			writer.writerow(
				[
					p.seed,
					f"{p.correct.hit_miss_ratio:.6f}",
					f"{p.perturbed.hit_miss_ratio:.6f}",
					f"{p.difference:.6f}",
				]
			)
		writer.writerow(
			[
				"mean",
				f"{self.mean_correct:.6f}",
				f"{self.mean_perturbed:.6f}",
				f"{self.mean_difference:.6f}",
			]
		)
		return buf.getvalue()


def compare_perturbed(
	frames: int,
	indexes: int,
	refs: int,
	seeds: Sequence[int],
	speeds: Sequence[float] = DEFAULT_SPEEDS,
	write_probability: float = 0.0,
	tick_period: int = EXPERIMENT_TICK_PERIOD,
) -> PerturbedComparison:
	"""
	Run AGING_N and AGING_N_PERTURBED on identical traces.

	:param frames: Frames per level.
	:type frames: int
	:param indexes: Unique page indexes.
	:type indexes: int
	:param refs: References per trace.
	:type refs: int
	:param seeds: One trace per seed, shared by both policies.
	:type seeds: Sequence[int]
	:param speeds: Speed factor per level; must describe 3 levels.
	:type speeds: Sequence[float]
	:param write_probability: Probability of a reference being a write.
	:type write_probability: float
	:param tick_period: References per clock interrupt.
	:type tick_period: int
	:return: Paired reports and their summary.
	:rtype: PerturbedComparison
	:raises ConfigurationError: Will raise unless the hierarchy has 3 levels.
	"""
	if not seeds:
		raise ConfigurationError("at least one seed is required", "seeds")
	config = HierarchyConfig.uniform(
		frames,
		speeds,
		tick_period=tick_period,
		write_probability=write_probability,
	)
	pairs: list[PerturbedPair] = []
	for seed in seeds:
		trace = generate_trace(WorkloadSpec(indexes, refs, seed, write_probability))
		correct = simulate(config, PolicyId.AGING_N, trace, indexes=indexes, seed=seed)
		perturbed = simulate(
			config, PolicyId.AGING_N_PERTURBED, trace, indexes=indexes, seed=seed
		)
		pairs.append(PerturbedPair(seed, correct, perturbed))
	comparison = PerturbedComparison(pairs)
	logger.info(
		f"AGING_N mean ratio {comparison.mean_correct:.4f}, perturbed "
		f"{comparison.mean_perturbed:.4f}."
	)
	return comparison


_DESK_STEPS = tuple(range(10, 101, 10))
_HPC_STEPS = (1_000, 10_000, 100_000)

PRESETS: dict[str, dict] = {
	"frames": dict(axis=SweepAxis.FRAMES, points=_DESK_STEPS, indexes=100, refs=1000),
	"indexes": dict(axis=SweepAxis.INDEXES, points=_DESK_STEPS, frames=10, refs=1000),
	"refs": dict(axis=SweepAxis.REFS, points=_DESK_STEPS, frames=10, indexes=100),
	"frames-hpc": dict(
		axis=SweepAxis.FRAMES, points=_HPC_STEPS, indexes=100_000, refs=100_000
	),
	"indexes-hpc": dict(
		axis=SweepAxis.INDEXES, points=_HPC_STEPS, frames=10, refs=100_000
	),
	"refs-hpc": dict(axis=SweepAxis.REFS, points=_HPC_STEPS, frames=10, indexes=100),
	"refs-perturbed": dict(
		axis=SweepAxis.REFS,
		points=_DESK_STEPS,
		frames=10,
		indexes=100,
		policies=(PolicyId.AGING_1, PolicyId.AGING_N, PolicyId.AGING_N_PERTURBED),
	),
}


def preset(name: str, hpc: bool = False, **overrides: object) -> SweepSpec:
	"""
	Build one of the standard experiment sweeps.

	``frames``, ``indexes`` and ``refs`` sweep F, I and R over 10..100; the
	``-hpc`` variants sweep them over 1e3..1e5, plus 1e6 when ``hpc`` is set;
	``refs-perturbed`` adds the perturbed control to the R sweep.

	:param name: Preset name.
	:type name: str
	:param hpc: Extend HPC presets to 1e6.
	:type hpc: bool
	:param overrides: SweepSpec fields replacing the preset's.
	:return: The sweep definition.
	:rtype: SweepSpec
	:raises ConfigurationError: Will raise for an unknown preset.
	"""
	if name not in PRESETS:
		raise ConfigurationError(
			f"unknown preset {name!r}, expected one of {', '.join(PRESETS)}", "preset"
		)
	params = dict(PRESETS[name])
	if hpc and params["points"] == _HPC_STEPS:
		params["points"] = _HPC_STEPS + (HPC_SCALE_CAP,)
		params["allow_hpc"] = True
	spec = SweepSpec(**params)
	return replace(spec, **overrides) if overrides else spec
