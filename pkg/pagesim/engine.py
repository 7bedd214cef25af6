"""The reference-processing loop."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: engine.py
#
# The reference-processing loop.
#
# Looks each reference up across the levels, keeps hit/miss accounting,
# hands faults to the policy, and fires a clock interrupt after every
# ``tick_period`` references.
#
# Snapshot (show_process) format, one line per slot, then the victim list:
#
#   L<level>[<slot>] page=<id> R=<bit> M=<bit> ctr=<binary counter>
#   L<level>[<slot>] empty
#   victims: <id> <id> ...
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241122       Created.                                       jrowley
#   20241125       Added promote_on_hit and invariant checking.   jrowley
#
###############################################################################

import logging
import time
from typing import Callable, Optional

from pagesim.constants import PolicyId
from pagesim.metrics import SimReport
from pagesim.policies import ReplacementPolicy, make_policy
from pagesim.state import PolicyState
from pagesim.types import (
	Access,
	AccessOutcome,
	HierarchyConfig,
	Migration,
	PageId,
	ReferenceTrace,
)
from pagesim.util import format_counter

logger = logging.getLogger(__name__)

SnapshotHook = Callable[["Simulation", Access, AccessOutcome], None]


class Simulation:
	"""
	One simulation run: a policy driving a hierarchy over a trace.

	A Simulation owns all of its mutable state; distinct runs never share
	anything and can execute in parallel.

	:ivar config: The hierarchy.
	:type config: HierarchyConfig
	:ivar policy_id: The algorithm.
	:type policy_id: PolicyId
	:ivar trace: The references to process.
	:type trace: ReferenceTrace
	:ivar policy: The policy object.
	:type policy: ReplacementPolicy
	:ivar state: Page tables and victim list.
	:type state: PolicyState
	:ivar report: Statistics, accumulated as references are processed.
	:type report: SimReport
	:ivar tick_index: Clock interrupts fired so far.
	:type tick_index: int
	:ivar snapshot_hook: Observer called after every reference. Optional.
	:type snapshot_hook: Optional[SnapshotHook]
	:ivar check_invariants: Verify state bookkeeping after every reference.
	:type check_invariants: bool
	"""

	config: HierarchyConfig
	policy_id: PolicyId
	trace: ReferenceTrace
	policy: ReplacementPolicy
	state: PolicyState
	report: SimReport
	tick_index: int
	snapshot_hook: Optional[SnapshotHook]
	check_invariants: bool

	def __init__(
		self,
		config: HierarchyConfig,
		policy_id: PolicyId,
		trace: ReferenceTrace,
		*,
		indexes: Optional[int] = None,
		seed: Optional[int] = None,
		snapshot_hook: Optional[SnapshotHook] = None,
		check_invariants: bool = False,
	) -> None:
		"""
		Set up a run. Nothing is processed until ``step`` or ``run``.

		:param config: The hierarchy.
		:type config: HierarchyConfig
		:param policy_id: The algorithm.
		:type policy_id: PolicyId
		:param trace: The references to process.
		:type trace: ReferenceTrace
		:param indexes: Unique page indexes of the workload, for the report.
		:type indexes: Optional[int]
		:param seed: Workload seed, for the report.
		:type seed: Optional[int]
		:param snapshot_hook: Observer called after every reference.
		:type snapshot_hook: Optional[SnapshotHook]
		:param check_invariants: Verify bookkeeping after every reference.
		:type check_invariants: bool
		:raises ConfigurationError: Will raise if the policy cannot drive the
			hierarchy.
		"""
		self.config = config
		self.policy_id = PolicyId(policy_id)
		self.trace = trace
		self.policy = make_policy(self.policy_id, config, trace)
		self.state = PolicyState(config)
		self.report = SimReport(
			policy=self.policy_id,
			frames_per_level=config.frames_per_level,
			indexes=indexes,
			refs=len(trace),
			seed=seed,
		)
		self.tick_index = 0
		self.snapshot_hook = snapshot_hook
		self.check_invariants = check_invariants
		self._processed = 0
		if config.promote_on_hit and config.num_levels == 1:
			logger.warning("promote_on_hit has no effect on a 1-level hierarchy.")

	def lookup(self, page: PageId) -> Optional[int]:
		"""Level holding ``page``, or None if it is not resident."""
		return self.state.lookup(page)

	def step(self, access: Access) -> AccessOutcome:
		"""
		Process one reference.

		A hit is charged the level's speed factor and updates the page's
		bits; the page stays where it is unless ``promote_on_hit`` is set. A
		miss is charged the miss penalty, takes the page out of the victim
		list if it is there, and inserts it from level 1 down.

		:param access: The next reference, in trace order.
		:type access: Access
		:return: Where the page was found and what moved.
		:rtype: AccessOutcome
		"""
		state = self.state
		where = state.locate(access.page)
		migrations: list[Migration] = []
		if where is not None:
			level, slot = where
			entry = state.table(level).slots[slot]
			assert entry is not None
			self.report.record_hit(level, self.config.level(level).speed_factor)
			self.policy.on_hit(state, entry, access)
			if self.config.promote_on_hit and level > 1:
				state.remove(level, slot)
				migrations = self.policy.fault_insert(
					state, entry, access.sequence, source=level
				)
			logger.debug(f"ref {access.sequence}: page {int(access.page)} hit L{level}")
			outcome = AccessOutcome(level, tuple(migrations))
		else:
			self.report.record_miss(self.config.effective_miss_penalty)
			state.reclaim(access.page)
			entry = self.policy.new_entry(access)
			migrations = self.policy.fault_insert(state, entry, access.sequence)
			logger.debug(f"ref {access.sequence}: page {int(access.page)} miss")
			outcome = AccessOutcome(None, tuple(migrations))

		for m in migrations:
			if m.to_level is None:
				self.report.spills += 1
			elif m.from_level is not None:
				self.report.migrations += 1
			logger.debug(str(m))

		self._processed += 1
		if self._processed % self.config.tick_period == 0:
			self.tick_index += 1
			self.report.ticks += 1
			self.policy.on_tick(state, self.tick_index)

		if self.check_invariants:
			state.check_invariants()
		if self.snapshot_hook is not None:
			self.snapshot_hook(self, access, outcome)
		return outcome

	def run(self) -> SimReport:
		"""
		Process the whole trace.

		:return: The final report, elapsed time included.
		:rtype: SimReport
		"""
		logger.info(
			f"Running {self.policy_id.name} on {self.config.num_levels} level(s) "
			f"{self.config.frames_per_level}, {len(self.trace)} references."
		)
		start = time.perf_counter()
		for access in self.trace.accesses[self._processed :]:
			self.step(access)
		self.report.elapsed = time.perf_counter() - start
		logger.info(
			f"{self.policy_id.name}: {self.report.hits} hits, "
			f"{self.report.misses} misses."
		)
		return self.report


def simulate(
	config: HierarchyConfig,
	policy_id: PolicyId,
	trace: ReferenceTrace,
	**kwargs: object,
) -> SimReport:
	"""
	Run a policy over a trace and return the report.

	:param config: The hierarchy.
	:type config: HierarchyConfig
	:param policy_id: The algorithm.
	:type policy_id: PolicyId
	:param trace: The references.
	:type trace: ReferenceTrace
	:param kwargs: Further ``Simulation`` keyword arguments.
	:return: The final report.
	:rtype: SimReport
	"""
	sim = Simulation(config, policy_id, trace, **kwargs)  # type: ignore[arg-type]
	return sim.run()


def format_snapshot(state: PolicyState) -> str:
	"""
	Render every level's page table and the victim list.

	:param state: The memory image.
	:type state: PolicyState
	:return: Snapshot lines, without trailing newline.
	:rtype: str
	"""
	width = state.config.counter_width_bits
	lines: list[str] = []
	for table in state.levels:
		for slot, entry in enumerate(table.slots):
			prefix = f"L{table.number}[{slot}]"
			if entry is None:
				lines.append(f"{prefix} empty")
			else:
				lines.append(
					f"{prefix} page={int(entry.page)} R={entry.r_bit} "
					f"M={entry.m_bit} ctr={format_counter(entry.age_counter, width)}"
				)
	victims = " ".join(str(int(p)) for p in state.victims)
	lines.append(f"victims: {victims}".rstrip())
	return "\n".join(lines)
