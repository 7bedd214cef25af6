"""Per-level page tables, FIFO queues, and the victim list."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: state.py
#
# Per-level page tables, FIFO queues, and the victim list.
#
# PolicyState is the mutable memory image a replacement policy works on. It
# knows nothing about replacement decisions; it only keeps the bookkeeping
# consistent (one home per page, no level over capacity, nothing lost).
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241120       Created.                                       jrowley
#   20241125       Added residency index and invariant checks.    jrowley
#
###############################################################################

from collections import deque
import heapq
import logging
from typing import Iterator, Optional

from pagesim.exceptions import SimulationStateError
from pagesim.types import HierarchyConfig, LevelSpec, PageEntry, PageId

logger = logging.getLogger(__name__)


class LevelTable:
	"""
	Page table of a single memory level.

	:ivar number: 1-based level index.
	:type number: int
	:ivar spec: Shape of the level.
	:type spec: LevelSpec
	:ivar slots: One entry per frame, None when the frame is free.
	:type slots: list[Optional[PageEntry]]
	:ivar queue: Occupied slots in arrival order, oldest first.
	:type queue: deque[int]
	:ivar hand: Clock hand, the next slot a clock scan inspects.
	:type hand: int
	"""

	number: int
	spec: LevelSpec
	slots: list[Optional[PageEntry]]
	queue: deque[int]
	hand: int

	def __init__(self, number: int, spec: LevelSpec) -> None:
		"""Initialize an empty LevelTable."""
		self.number = number
		self.spec = spec
		self.slots = [None] * spec.capacity_frames
		self.queue = deque()
		self.hand = 0
		self._free = list(range(spec.capacity_frames))
		self._occupancy = 0

	@property
	def capacity(self) -> int:
		"""Number of frames in this level."""
		return self.spec.capacity_frames

	@property
	def occupancy(self) -> int:
		"""Number of occupied frames."""
		return self._occupancy

	@property
	def full(self) -> bool:
		"""True if no frame is free."""
		return self._occupancy >= self.spec.capacity_frames

	def entries(self) -> Iterator[PageEntry]:
		"""Iterate resident entries in slot order."""
		return (e for e in self.slots if e is not None)

	def _take_free_slot(self) -> int:
		if not self._free:
			raise SimulationStateError(f"Level {self.number} has no free frame.")
		slot = heapq.heappop(self._free)
		self._occupancy += 1
		return slot

	def _release_slot(self, slot: int) -> None:
		heapq.heappush(self._free, slot)
		self._occupancy -= 1


class PolicyState:
	"""
	Memory image shared by a policy and the engine.

	Pages live in exactly one place: a slot of some level, or the victim
	list (the backing store). Pages never seen are in neither.

	:ivar config: The hierarchy this state models.
	:type config: HierarchyConfig
	:ivar levels: One table per level, ``levels[0]`` being level 1.
	:type levels: list[LevelTable]
	:ivar victims: Pages in the backing store, in eviction order.
	:type victims: dict[PageId, None]
	"""

	config: HierarchyConfig
	levels: list[LevelTable]
	victims: dict[PageId, None]

	def __init__(self, config: HierarchyConfig) -> None:
		"""Initialize an empty PolicyState for ``config``."""
		self.config = config
		self.levels = [
			LevelTable(i, spec) for i, spec in enumerate(config.levels, start=1)
		]
		self.victims = {}
		self._where: dict[PageId, tuple[int, int]] = {}
		self._seen: set[PageId] = set()

	def table(self, level: int) -> LevelTable:
		"""Get the table of 1-based ``level``."""
		return self.levels[level - 1]

	def lookup(self, page: PageId) -> Optional[int]:
		"""
		Find the level holding a page.

		:param page: The page to find.
		:type page: PageId
		:return: The 1-based level, or None if the page is in the victim list
			or has never been seen.
		:rtype: Optional[int]
		"""
		where = self._where.get(page)
		return None if where is None else where[0]

	def locate(self, page: PageId) -> Optional[tuple[int, int]]:
		"""Get ``(level, slot)`` of a resident page, or None."""
		return self._where.get(page)

	def entry(self, page: PageId) -> Optional[PageEntry]:
		"""Get the entry of a resident page, or None."""
		where = self._where.get(page)
		if where is None:
			return None
		return self.levels[where[0] - 1].slots[where[1]]

	def place(self, entry: PageEntry, level: int) -> int:
		"""
		Place a page into the lowest free slot of a level.

		The entry's ``level`` is updated and its slot is appended to the tail
		of the level's FIFO queue.

		:param entry: The page to place. Must not be resident anywhere.
		:type entry: PageEntry
		:param level: The 1-based destination level.
		:type level: int
		:return: The slot used.
		:rtype: int
		:raises SimulationStateError: Will raise if the page is already
			resident or the level is full.
		"""
		if entry.page in self._where:
			raise SimulationStateError(
				f"Page {int(entry.page)} is already resident at "
				f"L{self._where[entry.page][0]}."
			)
		table = self.table(level)
		slot = table._take_free_slot()
		table.slots[slot] = entry
		table.queue.append(slot)
		entry.level = level
		self._where[entry.page] = (level, slot)
		self.victims.pop(entry.page, None)
		self._seen.add(entry.page)
		return slot

	def remove(self, level: int, slot: int) -> PageEntry:
		"""
		Remove the page held in a slot.

		The entry is returned intact, bits and counters included, so it can
		be placed elsewhere.

		:param level: The 1-based level.
		:type level: int
		:param slot: The slot index within the level.
		:type slot: int
		:return: The removed entry.
		:rtype: PageEntry
		:raises SimulationStateError: Will raise if the slot is empty.
		"""
		table = self.table(level)
		entry = table.slots[slot]
		if entry is None:
			raise SimulationStateError(f"Slot L{level}[{slot}] is already empty.")
		table.slots[slot] = None
		table._release_slot(slot)
		if slot in table.queue:
			table.queue.remove(slot)
		del self._where[entry.page]
		return entry

	def spill(self, page: PageId) -> None:
		"""Append a page that left the last level to the victim list."""
		if page in self._where:
			raise SimulationStateError(
				f"Page {int(page)} is resident and cannot enter the victim list."
			)
		self.victims[page] = None
		self._seen.add(page)

	def reclaim(self, page: PageId) -> bool:
		"""Take a page out of the victim list, returning True if it was there."""
		if page in self.victims:
			del self.victims[page]
			return True
		return False

	@property
	def resident_count(self) -> int:
		"""Number of pages resident in any level."""
		return len(self._where)

	@property
	def seen_count(self) -> int:
		"""Number of distinct pages ever inserted."""
		return len(self._seen)

	def occupancy(self) -> tuple[int, ...]:
		"""Occupied frames per level, fastest first."""
		return tuple(t.occupancy for t in self.levels)

	def check_invariants(self) -> None:
		"""
		Verify residency, capacity, and conservation.

		:raises SimulationStateError: Will raise on the first violation.
		"""
		found: dict[PageId, tuple[int, int]] = {}
		for table in self.levels:
			count = 0
			for slot, entry in enumerate(table.slots):
				if entry is None:
					continue
				count += 1
				if entry.page in found:
					raise SimulationStateError(
						f"Page {int(entry.page)} resident twice: "
						f"L{found[entry.page][0]} and L{table.number}."
					)
				if entry.level != table.number:
					raise SimulationStateError(
						f"Page {int(entry.page)} in L{table.number} claims level "
						f"{entry.level}."
					)
				found[entry.page] = (table.number, slot)
			if count != table.occupancy or count > table.capacity:
				raise SimulationStateError(
					f"L{table.number} holds {count} pages, counted "
					f"{table.occupancy}, capacity {table.capacity}."
				)
			if sorted(table.queue) != [
				s for s, e in enumerate(table.slots) if e is not None
			]:
				raise SimulationStateError(f"L{table.number} queue out of sync.")
		if found != self._where:
			raise SimulationStateError("Residency index out of sync.")
		both = found.keys() & self.victims.keys()
		if both:
			raise SimulationStateError(
				f"Pages both resident and in the victim list: {sorted(both)}."
			)
		if len(found) + len(self.victims) != len(self._seen):
			raise SimulationStateError(
				f"{len(self._seen)} pages inserted but {len(found)} resident and "
				f"{len(self.victims)} in the victim list."
			)
