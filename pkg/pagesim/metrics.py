"""Simulation reports, hierarchy aggregates, and the results log."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: metrics.py
#
# Simulation reports, hierarchy aggregates, and the results log.
#
# The headline metric is the hit/miss ratio, hits divided by misses. It is
# unbounded, unlike the hit rate hits / (hits + misses) which is reported
# alongside it. Only ``hit_miss_ratio`` encodes that choice.
#
# Results log format (one CSV line per run, appended, never truncated):
#
#   timestamp_iso8601,policy,levels,frames_per_level,indexes,refs,seed,
#   hits,misses,hit_miss_ratio,hit_rate,weighted_cost,elapsed_ms
#
# ``frames_per_level`` joins the level capacities with "/"; ``indexes`` and
# ``seed`` are empty for runs over a trace file.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241121       Created.                                       jrowley
#
###############################################################################

from dataclasses import dataclass, field
from datetime import datetime, timezone
import logging
import os
from pathlib import Path
import sys
import threading
from typing import Iterable, Optional, Union

from pagesim.constants import DEFAULT_LOG_NAME, LOG_PATH_ENV, PolicyId
from pagesim.exceptions import LogWriteError
from pagesim.types import LevelSpec

logger = logging.getLogger(__name__)

UNBOUNDED_RATIO = sys.float_info.max

LOG_FIELDS = (
	"timestamp_iso8601",
	"policy",
	"levels",
	"frames_per_level",
	"indexes",
	"refs",
	"seed",
	"hits",
	"misses",
	"hit_miss_ratio",
	"hit_rate",
	"weighted_cost",
	"elapsed_ms",
)

_log_lock = threading.Lock()


def hit_miss_ratio(hits: int, misses: int) -> float:
	"""
	Get the hit/miss ratio.

	:param hits: Number of hits.
	:type hits: int
	:param misses: Number of misses.
	:type misses: int
	:return: ``hits / misses``; 0 when there were no hits; the
		``UNBOUNDED_RATIO`` sentinel when there were hits but no misses.
	:rtype: float
	"""
	if misses > 0:
		return hits / misses
	if hits == 0:
		return 0.0
	return UNBOUNDED_RATIO


def hit_rate(hits: int, misses: int) -> float:
	"""Get ``hits / (hits + misses)``, 0 for no references."""
	total = hits + misses
	return hits / total if total else 0.0


def total_volume(levels: Iterable[LevelSpec]) -> int:
	"""
	Get the total volume of a memory complex.

	:param levels: The levels.
	:type levels: Iterable[LevelSpec]
	:return: Sum of the level capacities, in frames.
	:rtype: int
	"""
	return sum(lv.capacity_frames for lv in levels)


def total_speed(levels: Iterable[LevelSpec]) -> float:
	"""
	Get the average speed factor of a memory complex.

	Three equal levels with speeds 1, 2 and 3 are 3 times bigger than the
	first level alone but 2 times slower on average.

	:param levels: The levels.
	:type levels: Iterable[LevelSpec]
	:return: Mean of the level speed factors.
	:rtype: float
	"""
	speeds = [lv.speed_factor for lv in levels]
	if not speeds:
		return 0.0
	return sum(speeds) / len(speeds)


@dataclass
class SimReport:
	# noinspection PyUnresolvedReferences
	"""
	Statistics of one simulation run.

	Reports compare equal when everything but ``elapsed`` matches.

	:ivar policy: The algorithm.
	:type policy: PolicyId
	:ivar frames_per_level: Capacity of each level, fastest first.
	:type frames_per_level: tuple[int, ...]
	:ivar indexes: Unique page indexes of the workload, None for trace files.
	:type indexes: Optional[int]
	:ivar refs: Trace length.
	:type refs: int
	:ivar seed: Workload seed, None for trace files.
	:type seed: Optional[int]
	:ivar hits: References found resident.
	:type hits: int
	:ivar misses: References not found resident.
	:type misses: int
	:ivar hits_per_level: Hits by 1-based level.
	:type hits_per_level: dict[int, int]
	:ivar weighted_cost: Sum of per-reference charges: the level's speed
		factor on a hit, the miss penalty on a miss.
	:type weighted_cost: float
	:ivar migrations: Page moves between levels (store moves excluded).
	:type migrations: int
	:ivar spills: Pages pushed to the backing store.
	:type spills: int
	:ivar ticks: Clock interrupts fired.
	:type ticks: int
	:ivar elapsed: Wall-clock run time, in seconds.
	:type elapsed: float
	"""

	policy: PolicyId
	frames_per_level: tuple[int, ...]
	indexes: Optional[int] = None
	refs: int = 0
	seed: Optional[int] = None
	hits: int = 0
	misses: int = 0
	hits_per_level: dict[int, int] = field(default_factory=dict)
	weighted_cost: float = 0.0
	migrations: int = 0
	spills: int = 0
	ticks: int = 0
	elapsed: float = field(default=0.0, compare=False)

	def __post_init__(self) -> None:
		"""Make sure every level has a hit counter."""
		for level in range(1, len(self.frames_per_level) + 1):
			self.hits_per_level.setdefault(level, 0)

	@property
	def levels(self) -> int:
		"""Number of memory levels."""
		return len(self.frames_per_level)

	@property
	def accesses(self) -> int:
		"""References processed."""
		return self.hits + self.misses

	@property
	def hit_miss_ratio(self) -> float:
		"""Hits divided by misses, see ``hit_miss_ratio``."""
		return hit_miss_ratio(self.hits, self.misses)

	@property
	def ratio_unbounded(self) -> bool:
		"""True if the ratio is the no-miss sentinel rather than a number."""
		return self.misses == 0 and self.hits > 0

	@property
	def hit_rate(self) -> float:
		"""Hits divided by references."""
		return hit_rate(self.hits, self.misses)

	def record_hit(self, level: int, cost: float) -> None:
		"""Count a hit at ``level`` costing ``cost``."""
		self.hits += 1
		self.hits_per_level[level] = self.hits_per_level.get(level, 0) + 1
		self.weighted_cost += cost

	def record_miss(self, cost: float) -> None:
		"""Count a miss costing ``cost``."""
		self.misses += 1
		self.weighted_cost += cost


def format_ratio(report: SimReport) -> str:
	"""Render the hit/miss ratio, ``inf`` for the no-miss sentinel."""
	if report.ratio_unbounded:
		return "inf"
	return f"{report.hit_miss_ratio:.6f}"


def format_log_line(report: SimReport, timestamp: Optional[datetime] = None) -> str:
	"""
	Render a report as one results-log CSV line, without line ending.

	:param report: The report.
	:type report: SimReport
	:param timestamp: Time of the run. Optional, defaults to now (UTC).
	:type timestamp: Optional[datetime]
	:return: 13 comma-separated fields.
	:rtype: str
	"""
	if timestamp is None:
		timestamp = datetime.now(timezone.utc)
	fields = (
		timestamp.isoformat(timespec="seconds"),
		report.policy.name,
		str(report.levels),
		"/".join(str(f) for f in report.frames_per_level),
		"" if report.indexes is None else str(report.indexes),
		str(report.refs),
		"" if report.seed is None else str(report.seed),
		str(report.hits),
		str(report.misses),
		format_ratio(report),
		f"{report.hit_rate:.6f}",
		f"{report.weighted_cost:.3f}",
		f"{report.elapsed * 1000.0:.3f}",
	)
	return ",".join(fields)


def resolve_log_path(path: Optional[Union[str, Path]] = None) -> Path:
	"""
	Decide where the results log goes.

	:param path: Explicit path. Optional.
	:type path: Optional[Union[str, Path]]
	:return: ``path`` if given, else ``$DEMEMORY_LOG`` if set, else
		``dememory.log`` in the working directory.
	:rtype: Path
	"""
	if path is not None:
		return Path(path)
	env = os.environ.get(LOG_PATH_ENV)
	if env:
		return Path(env)
	return Path(DEFAULT_LOG_NAME)


def append_log(
	report: SimReport,
	path: Optional[Union[str, Path]] = None,
	timestamp: Optional[datetime] = None,
) -> Path:
	"""
	Append a report to the results log.

	The line is rendered before the file is opened and written in a single
	call, so a failure never leaves a partial line behind. Appends from
	threads of one process are serialized.

	:param report: The report.
	:type report: SimReport
	:param path: Log file. Optional, see ``resolve_log_path``.
	:type path: Optional[Union[str, Path]]
	:param timestamp: Time of the run. Optional, defaults to now (UTC).
	:type timestamp: Optional[datetime]
	:return: The log file written.
	:rtype: Path
	:raises LogWriteError: Will raise if the file cannot be appended.
	"""
	target = resolve_log_path(path)
	line = format_log_line(report, timestamp) + "\n"
	with _log_lock:
		try:
			with target.open("a", encoding="utf-8", newline="\n") as f:
				f.write(line)
		except OSError as e:
			raise LogWriteError(target, e) from e
	logger.debug(f"Appended {report.policy.name} results to {target}.")
	return target


def format_summary(report: SimReport) -> str:
	"""
	Render the final statistics block printed after a run.

	Every line except ``Elapsed`` is a pure function of the run's inputs.

	:param report: The report.
	:type report: SimReport
	:return: Multi-line summary, without trailing newline.
	:rtype: str
	"""
	per_level = ", ".join(
		f"L{lv}={n}" for lv, n in sorted(report.hits_per_level.items())
	)
	lines = [
		f"Algorithm:        {report.policy.name}",
		f"Levels:           {report.levels}",
		f"Frames per level: {'/'.join(str(f) for f in report.frames_per_level)}",
		f"References:       {report.refs}",
		f"Hits:             {report.hits}",
		f"Hits per level:   {per_level}",
		f"Misses:           {report.misses}",
		f"Hit/Miss ratio:   {format_ratio(report)}",
		f"Hit rate:         {report.hit_rate:.6f}",
		f"Weighted cost:    {report.weighted_cost:.3f}",
		f"Migrations:       {report.migrations}",
		f"Spills:           {report.spills}",
		f"Elapsed:          {report.elapsed:.6f} s",
	]
	return "\n".join(lines)
