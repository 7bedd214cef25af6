"""Page replacement policies, one-level and N-level."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: policies.py
#
# Page replacement policies, one-level and N-level.
#
# The module-level functions are the victim selection and bookkeeping
# primitives; the policy classes combine them behind one contract the
# engine drives (new_entry / on_hit / on_tick / fault_insert).
#
# Every insertion follows the same recursion: try the current level, and
# if it is full let the policy pick what moves down and to which level.
# Past the last level a page spills into the victim list (the backing
# store) instead of being dropped.
#
# Victim ties are always broken by the lowest slot index.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241120       Created.                                       jrowley
#   20241203       Added perturbed aging control.                 jrowley
#   20241210       OPT uses a next-use index.                     jrowley
#   20241216       OPT maps sequence numbers to positions.        jrowley
#
###############################################################################

from abc import ABC, abstractmethod
from bisect import bisect_left
from collections import defaultdict, deque
import logging
import math
from typing import Callable, ClassVar, Iterable, Optional, Sequence, TypeVar

from pagesim.constants import PolicyId
from pagesim.exceptions import ConfigurationError, SimulationStateError
from pagesim.state import LevelTable, PolicyState
from pagesim.types import (
	Access,
	HierarchyConfig,
	Migration,
	PageEntry,
	ReferenceTrace,
)
from pagesim.util import leading_zero_bits

logger = logging.getLogger(__name__)

_Slots = Sequence[Optional[PageEntry]]


def _min_slot(slots: _Slots, key: Callable[[PageEntry], int]) -> int:
	"""Occupied slot with the minimal key, lowest slot on ties."""
	best_slot = -1
	best_key = 0
	for slot, entry in enumerate(slots):
		if entry is None:
			continue
		k = key(entry)
		if best_slot < 0 or k < best_key:
			best_slot, best_key = slot, k
	if best_slot < 0:
		raise SimulationStateError("No resident page to select a victim from.")
	return best_slot


# Victim selection and tick primitives.


def nru_class(entry: PageEntry) -> int:
	"""
	Get the NRU class of a page.

	0: not referenced, not modified; 1: not referenced, modified;
	2: referenced, not modified; 3: referenced, modified.

	:param entry: The page.
	:type entry: PageEntry
	:return: ``2 * R + M``.
	:rtype: int
	"""
	return 2 * entry.r_bit + entry.m_bit


def nru_select_victim(slots: _Slots) -> int:
	"""Slot of a page from the lowest nonempty NRU class."""
	return _min_slot(slots, nru_class)


def second_chance_select(queue: deque[int], slots: _Slots) -> int:
	"""
	Select a victim by second chance, mutating the FIFO queue.

	While the page at the head of the queue has its R bit set, the bit is
	cleared and the page moves to the tail. The first head with R = 0 is
	the victim and is taken off the queue. If every R bit was set, one full
	pass clears them all and the original head is chosen.

	:param queue: Occupied slots in arrival order, oldest first.
	:type queue: deque[int]
	:param slots: The level's slots.
	:type slots: Sequence[Optional[PageEntry]]
	:return: The victim slot, no longer in ``queue``.
	:rtype: int
	:raises SimulationStateError: Will raise if the queue is empty.
	"""
	if not queue:
		raise SimulationStateError("Second chance on an empty queue.")
	while True:
		head = queue[0]
		entry = slots[head]
		if entry is None:
			raise SimulationStateError(f"Queue references empty slot {head}.")
		if entry.r_bit:
			entry.r_bit = 0
			queue.rotate(-1)
		else:
			return queue.popleft()


def aging_tick(entries: Iterable[PageEntry], width: int) -> None:
	"""
	Shift every aging counter right, inserting the R bit at the top.

	The R bit is cleared afterwards. With R pattern 1, 1, 0, 0, 0 a counter
	starting at zero reads 10000000, 11000000, 01100000, 00110000, 00011000.

	:param entries: Resident pages of one level.
	:type entries: Iterable[PageEntry]
	:param width: Counter width in bits.
	:type width: int
	"""
	top = width - 1
	for entry in entries:
		entry.age_counter = (entry.age_counter >> 1) | (entry.r_bit << top)
		entry.r_bit = 0


def aging_select_victim(slots: _Slots) -> int:
	"""Slot of the page with the lowest aging counter."""
	return _min_slot(slots, lambda e: e.age_counter)


def aging_target_level(
	counter: int, current_level: int, config: HierarchyConfig
) -> int:
	"""
	Map an evicted page's counter to the level it should move to.

	The level is the counter's leading zero count divided by the number of
	counter bits per level, rounded up; pages idle for longer sink deeper.
	The result is clamped into ``[current_level + 1, ML]``. A page evicted
	from the last level goes to the backing store, ``ML + 1``.

	:param counter: The page's aging counter.
	:type counter: int
	:param current_level: Level the page is evicted from.
	:type current_level: int
	:param config: Hierarchy, for ML and the counter width.
	:type config: HierarchyConfig
	:return: Destination level, ``ML + 1`` meaning the backing store.
	:rtype: int
	:raises ConfigurationError: Will raise if ML exceeds the counter width.
	"""
	num_levels = config.num_levels
	width = config.counter_width_bits
	bits_per_level = width // num_levels
	if bits_per_level == 0:
		raise ConfigurationError(
			f"{num_levels} levels need a counter of at least {num_levels} bits",
			"counter_width_bits",
		)
	if current_level >= num_levels:
		return num_levels + 1
	raw = -(-leading_zero_bits(counter, width) // bits_per_level)
	return min(max(raw, current_level + 1), num_levels)


def aging_target_level_perturbed(
	counter: int, current_level: int, config: HierarchyConfig
) -> int:
	"""
	Same as ``aging_target_level`` but with levels 2 and 3 swapped.

	The swap only applies while the swapped level is still below the
	evicting level, so in practice only evictions from level 1 change.

	:param counter: The page's aging counter.
	:type counter: int
	:param current_level: Level the page is evicted from.
	:type current_level: int
	:param config: Hierarchy; must have exactly 3 levels.
	:type config: HierarchyConfig
	:return: Destination level, 4 meaning the backing store.
	:rtype: int
	:raises ConfigurationError: Will raise unless there are 3 levels.
	"""
	if config.num_levels != 3:
		raise ConfigurationError(
			f"perturbed level mapping needs 3 levels, got {config.num_levels}",
			"levels",
		)
	target = aging_target_level(counter, current_level, config)
	if target in (2, 3):
		swapped = 5 - target
		if swapped > current_level:
			return swapped
	return target


def lru_select_victim(slots: _Slots) -> int:
	"""Slot of the least recently used page."""
	return _min_slot(slots, lambda e: e.last_used_stamp)


def nfu_tick(entries: Iterable[PageEntry]) -> None:
	"""Add each R bit to its page's NFU counter, then clear it."""
	for entry in entries:
		entry.nfu_counter += entry.r_bit
		entry.r_bit = 0


def nfu_select_victim(slots: _Slots) -> int:
	"""Slot of the page with the lowest NFU counter."""
	return _min_slot(slots, lambda e: e.nfu_counter)


class NextUseIndex:
	"""Positions of every page in a trace, for next-reference queries."""

	def __init__(self, pages: Iterable[int]) -> None:
		"""Index a sequence of page references."""
		self._positions: dict[int, list[int]] = defaultdict(list)
		for pos, page in enumerate(pages):
			self._positions[int(page)].append(pos)

	def next_use(self, page: int, position: int) -> Optional[int]:
		"""
		Get the first reference to ``page`` at or after ``position``.

		:param page: The page.
		:type page: int
		:param position: Trace position to search from.
		:type position: int
		:return: The position, or None if never referenced again.
		:rtype: Optional[int]
		"""
		positions = self._positions.get(int(page))
		if not positions:
			return None
		i = bisect_left(positions, position)
		return positions[i] if i < len(positions) else None


def opt_select_victim(
	slots: _Slots,
	trace: ReferenceTrace,
	position: int,
	index: Optional[NextUseIndex] = None,
) -> int:
	"""
	Select the page whose next reference is farthest away.

	Each resident page is tagged with the distance to its next reference at
	or after ``position``; pages never referenced again are tagged with
	infinity and beat every finite tag.

	:param slots: The level's slots.
	:type slots: Sequence[Optional[PageEntry]]
	:param trace: The whole trace.
	:type trace: ReferenceTrace
	:param position: Current trace position.
	:type position: int
	:param index: Prebuilt index of ``trace``. Optional, built if omitted.
	:type index: Optional[NextUseIndex]
	:return: The victim slot.
	:rtype: int
	:raises SimulationStateError: Will raise if the level is empty.
	"""
	if index is None:
		index = NextUseIndex(trace.pages)
	best_slot = -1
	best_tag = -1.0
	for slot, entry in enumerate(slots):
		if entry is None:
			continue
		nxt = index.next_use(entry.page, position)
		tag = math.inf if nxt is None else float(nxt - position)
		if tag > best_tag:
			best_slot, best_tag = slot, tag
	if best_slot < 0:
		raise SimulationStateError("No resident page to select a victim from.")
	return best_slot


# Policy classes.

_registry: dict[PolicyId, type["ReplacementPolicy"]] = {}

_P = TypeVar("_P", bound=type["ReplacementPolicy"])


def _register(cls: _P) -> _P:
	"""Decorate a policy class so ``make_policy`` can build it."""
	_registry[cls.policy_id] = cls
	return cls


class ReplacementPolicy(ABC):
	"""
	Shared contract of all replacement policies.

	:cvar policy_id: The PolicyId implemented by the class.
	:ivar config: The hierarchy being managed.
	:type config: HierarchyConfig
	"""

	policy_id: ClassVar[PolicyId]
	config: HierarchyConfig

	def __init__(
		self, config: HierarchyConfig, trace: Optional[ReferenceTrace] = None
	) -> None:
		"""
		Initialize policy, validating it against the hierarchy.

		:param config: The hierarchy to manage.
		:type config: HierarchyConfig
		:param trace: The whole trace, for offline policies. Ignored by online
			policies.
		:type trace: Optional[ReferenceTrace]
		:raises ConfigurationError: Will raise if this policy cannot drive
			``config``.
		"""
		self.config = config
		self.validate(config)

	def validate(self, config: HierarchyConfig) -> None:
		"""Check the hierarchy shape; subclasses extend."""
		if self.policy_id.multi_level and config.num_levels < 2:
			raise ConfigurationError(
				f"{self.policy_id.name} needs at least 2 levels, got "
				f"{config.num_levels}",
				"levels",
			)
		if not self.policy_id.multi_level and config.num_levels != 1:
			raise ConfigurationError(
				f"{self.policy_id.name} needs exactly 1 level, got "
				f"{config.num_levels}",
				"levels",
			)

	@property
	def initial_counter(self) -> int:
		"""Aging counter given to newly placed pages."""
		return 0

	def new_entry(self, access: Access) -> PageEntry:
		"""
		Create the entry for a page brought in by a miss.

		:param access: The faulting reference.
		:type access: Access
		:return: Entry with R set, M set on writes, stamps at this reference.
		:rtype: PageEntry
		"""
		return PageEntry(
			page=access.page,
			r_bit=1,
			m_bit=1 if access.is_write else 0,
			age_counter=self.initial_counter,
			arrival_stamp=access.sequence,
			last_used_stamp=access.sequence,
		)

	def on_hit(self, state: PolicyState, entry: PageEntry, access: Access) -> None:
		"""Record a reference to a resident page. The page does not move."""
		entry.touch(access)

	def on_tick(self, state: PolicyState, tick_index: int) -> None:
		"""Handle a global clock interrupt (1-based ``tick_index``)."""

	def fault_insert(
		self,
		state: PolicyState,
		entry: PageEntry,
		sequence: int,
		source: Optional[int] = None,
	) -> list[Migration]:
		"""
		Insert a page, starting at level 1 and cascading downwards.

		At each level: place the page if a frame is free; otherwise ask the
		policy to make room, which either evicts a page (the incoming page
		takes its frame and the victim continues the recursion at the level
		the policy names) or declines (the incoming page itself moves on to
		the next level). Past the last level the moving page spills into the
		victim list.

		:param state: The memory image.
		:type state: PolicyState
		:param entry: The page to insert; not resident.
		:type entry: PageEntry
		:param sequence: Current trace position, stamped on placed pages.
		:type sequence: int
		:param source: Level the page comes from, None for the backing store.
		:type source: Optional[int]
		:return: Page moves performed, in order.
		:rtype: list[Migration]
		"""
		migrations: list[Migration] = []
		moving = entry
		level = 1
		last = self.config.num_levels
		while True:
			if level > last:
				state.spill(moving.page)
				migrations.append(Migration(moving.page, source, None))
				return migrations
			table = state.table(level)
			if not table.full:
				self._place(state, moving, level, sequence)
				migrations.append(Migration(moving.page, source, level))
				return migrations
			victim = self._evict(state, table, sequence)
			if victim is None:
				level += 1
				continue
			self._place(state, moving, level, sequence)
			migrations.append(Migration(moving.page, source, level))
			moving, source = victim, level
			level = self._victim_level(victim, level)

	def _place(
		self, state: PolicyState, entry: PageEntry, level: int, sequence: int
	) -> None:
		entry.arrival_stamp = sequence
		state.place(entry, level)

	@abstractmethod
	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		"""
		Make room in a full level.

		:return: The removed victim, or None to pass the incoming page to the
			next level instead.
		"""

	def _victim_level(self, victim: PageEntry, level: int) -> int:
		"""Level a victim evicted from ``level`` moves to."""
		return level + 1


@_register
class FifoPolicy(ReplacementPolicy):
	"""Evict the page that arrived first."""

	policy_id = PolicyId.FIFO_1

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		slot = table.queue.popleft()
		return state.remove(table.number, slot)


@_register
class SecondChancePolicy(ReplacementPolicy):
	"""FIFO, but a referenced head page is cleared and requeued once."""

	policy_id = PolicyId.SECOND_CHANCE_1

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		slot = second_chance_select(table.queue, table.slots)
		return state.remove(table.number, slot)


@_register
class ClockPolicy(ReplacementPolicy):
	"""Second chance over a cyclic list of frames with a rotating hand."""

	policy_id = PolicyId.CLOCK_1

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		while True:
			entry = table.slots[table.hand]
			if entry is None:
				raise SimulationStateError(f"Clock hand on empty slot {table.hand}.")
			if not entry.r_bit:
				break
			entry.r_bit = 0
			table.hand = (table.hand + 1) % table.capacity
		slot = table.hand
		# The incoming page takes this frame; the hand moves past it.
		table.hand = (slot + 1) % table.capacity
		return state.remove(table.number, slot)


class _NruTicks(ReplacementPolicy):
	"""Clears R bits per level, each level at its own tick rate."""

	def on_tick(self, state: PolicyState, tick_index: int) -> None:
		for table in state.levels:
			if tick_index % table.spec.tick_divisor == 0:
				for entry in table.entries():
					entry.r_bit = 0


@_register
class NruPolicy(_NruTicks):
	"""Evict a page from the lowest nonempty R/M class."""

	policy_id = PolicyId.NRU_1

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		return state.remove(table.number, nru_select_victim(table.slots))


@_register
class LruPolicy(ReplacementPolicy):
	"""Evict the page unreferenced for the longest time."""

	policy_id = PolicyId.LRU_1

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		return state.remove(table.number, lru_select_victim(table.slots))


@_register
class NfuPolicy(ReplacementPolicy):
	"""Evict the page with the fewest referenced ticks."""

	policy_id = PolicyId.NFU_1

	def on_tick(self, state: PolicyState, tick_index: int) -> None:
		for table in state.levels:
			nfu_tick(table.entries())

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		return state.remove(table.number, nfu_select_victim(table.slots))


class _AgingTicks(ReplacementPolicy):
	"""Shifts every counter on every tick; new pages start at the top bit."""

	@property
	def initial_counter(self) -> int:
		return 1 << (self.config.counter_width_bits - 1)

	def on_tick(self, state: PolicyState, tick_index: int) -> None:
		width = self.config.counter_width_bits
		for table in state.levels:
			aging_tick(table.entries(), width)

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		return state.remove(table.number, aging_select_victim(table.slots))


@_register
class AgingPolicy(_AgingTicks):
	"""Evict the page with the lowest aging counter."""

	policy_id = PolicyId.AGING_1


@_register
class OptimalPolicy(ReplacementPolicy):
	"""
	Evict the page referenced farthest in the future.

	Offline: the whole trace has to be known before the run, and the policy
	is only valid for that trace.
	"""

	policy_id = PolicyId.OPT_1

	def __init__(
		self, config: HierarchyConfig, trace: Optional[ReferenceTrace] = None
	) -> None:
		"""Initialize OptimalPolicy, indexing the trace."""
		super().__init__(config, trace)
		if trace is None:
			raise ConfigurationError("OPT_1 needs the whole trace up front", "trace")
		self.trace = trace
		self.index = NextUseIndex(trace.pages)
		self._positions = {a.sequence: i for i, a in enumerate(trace)}

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		position = self._positions[sequence]
		slot = opt_select_victim(table.slots, self.trace, position, self.index)
		return state.remove(table.number, slot)


@_register
class NruNPolicy(_NruTicks):
	"""NRU on every level; each victim drops exactly one level."""

	policy_id = PolicyId.NRU_N

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		return state.remove(table.number, nru_select_victim(table.slots))


@_register
class FifoNPolicy(ReplacementPolicy):
	"""
	Second-chance FIFO on every level.

	If some page of a full level has R = 0, second chance picks a victim
	that drops one level. If every R bit is set the level is left alone and
	the incoming page itself moves on to the next level.
	"""

	policy_id = PolicyId.FIFO_N

	def _evict(
		self, state: PolicyState, table: LevelTable, sequence: int
	) -> Optional[PageEntry]:
		if all(e.r_bit for e in table.entries()):
			return None
		slot = second_chance_select(table.queue, table.slots)
		return state.remove(table.number, slot)


@_register
class AgingNPolicy(_AgingTicks):
	"""
	Memory-aware aging.

	The victim of a full level goes straight to the level matching its
	counter's leading zeros, skipping the levels in between. If that level
	is full the same procedure repeats there.
	"""

	policy_id = PolicyId.AGING_N

	def validate(self, config: HierarchyConfig) -> None:
		super().validate(config)
		if config.counter_width_bits // config.num_levels == 0:
			raise ConfigurationError(
				f"{config.num_levels} levels need a counter of at least "
				f"{config.num_levels} bits",
				"counter_width_bits",
			)

	def _victim_level(self, victim: PageEntry, level: int) -> int:
		return aging_target_level(victim.age_counter, level, self.config)


@_register
class PerturbedAgingNPolicy(AgingNPolicy):
	"""AGING_N with levels 2 and 3 swapped in the victim level mapping."""

	policy_id = PolicyId.AGING_N_PERTURBED

	def validate(self, config: HierarchyConfig) -> None:
		super().validate(config)
		if config.num_levels != 3:
			raise ConfigurationError(
				f"{self.policy_id.name} needs exactly 3 levels, got "
				f"{config.num_levels}",
				"levels",
			)

	def _victim_level(self, victim: PageEntry, level: int) -> int:
		return aging_target_level_perturbed(victim.age_counter, level, self.config)


def make_policy(
	policy_id: PolicyId,
	config: HierarchyConfig,
	trace: Optional[ReferenceTrace] = None,
) -> ReplacementPolicy:
	"""
	Build the policy object for a PolicyId.

	:param policy_id: The algorithm.
	:type policy_id: PolicyId
	:param config: The hierarchy it will manage.
	:type config: HierarchyConfig
	:param trace: The whole trace; required by OPT_1.
	:type trace: Optional[ReferenceTrace]
	:return: A validated policy.
	:rtype: ReplacementPolicy
	:raises ConfigurationError: Will raise if the policy cannot drive the
		hierarchy.
	"""
	cls = _registry[PolicyId(policy_id)]
	return cls(config, trace)
