"""Simulator domain types: hierarchy shape, pages, references, outcomes."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: types.py
#
# Simulator domain types: hierarchy shape, pages, references, outcomes.
#
# Level indices are 1-based, level 1 being the fastest. The backing store is
# a virtual level N+1 with no capacity limit and is written as ``None`` in
# migration records.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241118       Created.                                       jrowley
#   20241125       Added promote_on_hit extension point.          jrowley
#
###############################################################################

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, overload

from pagesim.constants import (
	DEFAULT_COUNTER_WIDTH,
	DEFAULT_MISS_PENALTY_FACTOR,
	DEFAULT_SPEEDS,
	DEFAULT_TICK_PERIOD,
	AccessKind,
)
from pagesim.exceptions import ConfigurationError


class PageId(int):
	"""A page index, in ``[0, num_indexes)`` of the workload."""

	def __new__(cls, value: int) -> "PageId":
		"""Create PageId, rejecting negative indexes."""
		if value < 0:
			raise ValueError(f"Page index must be non-negative, got {value}.")
		return super().__new__(cls, value)

	def __repr__(self) -> str:
		"""Get representation."""
		return f"PageId({int(self)})"


@dataclass(frozen=True)
class LevelSpec:
	# noinspection PyUnresolvedReferences
	"""
	Shape of one memory level.

	:ivar capacity_frames: Number of page frames (C_i), at least 1.
	:type capacity_frames: int
	:ivar speed_factor: Access cost relative to the fastest level (V_i), at
		least 1. Dimensionless.
	:type speed_factor: float
	:ivar tick_divisor: Global clock ticks per local R-bit clearing tick for
		N-level NRU, at least 1. Slower levels usually tick less often.
	:type tick_divisor: int
	"""

	capacity_frames: int
	speed_factor: float = 1
	tick_divisor: int = 1

	def __post_init__(self) -> None:
		"""Validate field ranges."""
		if self.capacity_frames < 1:
			raise ConfigurationError(
				f"must be at least 1, got {self.capacity_frames}", "capacity_frames"
			)
		if self.speed_factor < 1:
			raise ConfigurationError(
				f"must be at least 1, got {self.speed_factor}", "speed_factor"
			)
		if self.tick_divisor < 1:
			raise ConfigurationError(
				f"must be at least 1, got {self.tick_divisor}", "tick_divisor"
			)


@dataclass(frozen=True)
class HierarchyConfig:
	# noinspection PyUnresolvedReferences
	"""
	Shape and timing of an N-level memory hierarchy.

	:ivar levels: Levels ordered fastest first; ``levels[0]`` is level 1.
	:type levels: tuple[LevelSpec, ...]
	:ivar counter_width_bits: Width of each page's aging counter.
	:type counter_width_bits: int
	:ivar tick_period: Page references per global clock interrupt.
	:type tick_period: int
	:ivar miss_penalty: Cost charged for a reference served from the backing
		store. Optional, defaults to 10 times the slowest level's speed.
	:type miss_penalty: Optional[float]
	:ivar write_probability: Fraction of generated references that are
		writes, for inline trace generation.
	:type write_probability: float
	:ivar promote_on_hit: Move a page hit at a slower level back into level 1.
		Off by default; the replacement formulations never promote.
	:type promote_on_hit: bool
	"""

	levels: tuple[LevelSpec, ...]
	counter_width_bits: int = DEFAULT_COUNTER_WIDTH
	tick_period: int = DEFAULT_TICK_PERIOD
	miss_penalty: Optional[float] = None
	write_probability: float = 0.0
	promote_on_hit: bool = False

	def __post_init__(self) -> None:
		"""Validate the hierarchy shape."""
		# Accept any sequence, store a tuple.
		object.__setattr__(self, "levels", tuple(self.levels))
		if len(self.levels) < 1:
			raise ConfigurationError("at least one level is required", "levels")
		for upper, lower in zip(self.levels, self.levels[1:]):
			if lower.speed_factor < upper.speed_factor:
				raise ConfigurationError(
					"speed factors must not decrease from level 1 downwards",
					"levels",
				)
		if self.counter_width_bits < 1:
			raise ConfigurationError(
				f"must be at least 1, got {self.counter_width_bits}",
				"counter_width_bits",
			)
		if self.tick_period < 1:
			raise ConfigurationError(
				f"must be at least 1, got {self.tick_period}", "tick_period"
			)
		if self.miss_penalty is not None and self.miss_penalty < 0:
			raise ConfigurationError(
				f"must not be negative, got {self.miss_penalty}", "miss_penalty"
			)
		if not 0.0 <= self.write_probability <= 1.0:
			raise ConfigurationError(
				f"must be within [0, 1], got {self.write_probability}",
				"write_probability",
			)

	@classmethod
	def single(cls, frames: int, **kwargs: object) -> "HierarchyConfig":
		"""
		Build a classic one-level (DRAM only) hierarchy.

		:param frames: Number of frames.
		:type frames: int
		:param kwargs: Further HierarchyConfig fields.
		:return: One-level configuration with speed factor 1.
		:rtype: HierarchyConfig
		"""
		return cls((LevelSpec(frames),), **kwargs)  # type: ignore[arg-type]

	@classmethod
	def uniform(
		cls,
		frames: int,
		speeds: Sequence[float] = DEFAULT_SPEEDS,
		**kwargs: object,
	) -> "HierarchyConfig":
		"""
		Build a hierarchy of equally sized levels.

		With the default speeds this is a DRAM level followed by two storage
		class memory levels, 2 and 3 times slower, each with the same volume.
		Level ``i`` gets a tick divisor equal to ``i``.

		:param frames: Frames per level.
		:type frames: int
		:param speeds: Speed factor of each level, fastest first.
		:type speeds: Sequence[float]
		:param kwargs: Further HierarchyConfig fields.
		:return: N-level configuration, N being ``len(speeds)``.
		:rtype: HierarchyConfig
		"""
		levels = tuple(
			LevelSpec(frames, speed, tick_divisor=i)
			for i, speed in enumerate(speeds, start=1)
		)
		return cls(levels, **kwargs)  # type: ignore[arg-type]

	@property
	def num_levels(self) -> int:
		"""
		Get the number of memory levels (ML).

		:getter: Get the number of memory levels (ML).
		:setter: None, computed/read-only.
		:return: Number of levels, not counting the backing store.
		:rtype: int
		"""
		return len(self.levels)

	@property
	def backing_level(self) -> int:
		"""Index of the virtual backing store level, ``ML + 1``."""
		return len(self.levels) + 1

	@property
	def frames_per_level(self) -> tuple[int, ...]:
		"""Capacity of each level, fastest first."""
		return tuple(lv.capacity_frames for lv in self.levels)

	@property
	def effective_miss_penalty(self) -> float:
		"""
		Get the cost charged for a miss.

		:getter: Get the configured miss penalty, or 10 times the slowest
			level's speed factor when not configured.
		:setter: None, computed/read-only.
		:return: Miss penalty in speed-factor units.
		:rtype: float
		"""
		if self.miss_penalty is not None:
			return self.miss_penalty
		return DEFAULT_MISS_PENALTY_FACTOR * self.levels[-1].speed_factor

	def level(self, index: int) -> LevelSpec:
		"""Get the LevelSpec of 1-based level ``index``."""
		if not 1 <= index <= len(self.levels):
			raise IndexError(
				f"No level {index} in a {len(self.levels)}-level hierarchy."
			)
		return self.levels[index - 1]


@dataclass(frozen=True)
class Access:
	# noinspection PyUnresolvedReferences
	"""
	One page reference.

	:ivar page: The referenced page.
	:type page: PageId
	:ivar kind: Read or write.
	:type kind: AccessKind
	:ivar sequence: 0-based position in the trace.
	:type sequence: int
	"""

	page: PageId
	kind: AccessKind = AccessKind.READ
	sequence: int = 0

	@property
	def is_write(self) -> bool:
		"""True for write references."""
		return self.kind is AccessKind.WRITE


@dataclass(frozen=True)
class ReferenceTrace:
	# noinspection PyUnresolvedReferences
	"""
	Ordered sequence of page references driving a simulation.

	:ivar accesses: The references, with strictly increasing sequence numbers.
	:type accesses: tuple[Access, ...]
	"""

	accesses: tuple[Access, ...] = ()

	def __post_init__(self) -> None:
		"""Check ordering of sequence numbers."""
		object.__setattr__(self, "accesses", tuple(self.accesses))
		for prev, cur in zip(self.accesses, self.accesses[1:]):
			if cur.sequence <= prev.sequence:
				raise ConfigurationError(
					f"sequence numbers must increase ({prev.sequence} then "
					f"{cur.sequence})",
					"trace",
				)

	@classmethod
	def from_pages(
		cls,
		pages: Iterable[int],
		kinds: Optional[Iterable[AccessKind]] = None,
	) -> "ReferenceTrace":
		"""
		Build a trace from bare page indexes.

		:param pages: Page indexes in reference order.
		:type pages: Iterable[int]
		:param kinds: Kind of each reference. Optional, defaults to all reads.
		:type kinds: Optional[Iterable[AccessKind]]
		:return: Trace numbered from 0.
		:rtype: ReferenceTrace
		"""
		page_list = [PageId(int(p)) for p in pages]
		if kinds is None:
			kind_list = [AccessKind.READ] * len(page_list)
		else:
			kind_list = list(kinds)
			if len(kind_list) != len(page_list):
				raise ConfigurationError("one kind per page is required", "kinds")
		return cls(
			tuple(
				Access(page, kind, seq)
				for seq, (page, kind) in enumerate(zip(page_list, kind_list))
			)
		)

	@property
	def pages(self) -> tuple[PageId, ...]:
		"""The referenced pages, in order."""
		return tuple(a.page for a in self.accesses)

	@property
	def unique_pages(self) -> int:
		"""Number of distinct pages referenced."""
		return len({a.page for a in self.accesses})

	def __len__(self) -> int:
		"""Get the number of references."""
		return len(self.accesses)

	def __iter__(self) -> Iterator[Access]:
		"""Iterate references in order."""
		return iter(self.accesses)

	@overload
	def __getitem__(self, index: int) -> Access:
		...

	@overload
	def __getitem__(self, index: slice) -> tuple[Access, ...]:
		...

	def __getitem__(self, index: int | slice) -> Access | tuple[Access, ...]:
		"""Get a reference, or a tuple of references for a slice."""
		return self.accesses[index]


@dataclass(slots=True)
class PageEntry:
	# noinspection PyUnresolvedReferences
	"""
	A page resident in some memory level, with its bookkeeping.

	:ivar page: The page.
	:type page: PageId
	:ivar r_bit: Referenced bit, set on every reference, cleared by ticks.
	:type r_bit: int
	:ivar m_bit: Modified bit, set on writes, kept for the residency.
	:type m_bit: int
	:ivar age_counter: Aging counter, ``counter_width_bits`` wide.
	:type age_counter: int
	:ivar nfu_counter: Sum of R bits seen at clock interrupts.
	:type nfu_counter: int
	:ivar arrival_stamp: Sequence number of insertion into the current
		level's queue.
	:type arrival_stamp: int
	:ivar last_used_stamp: Sequence number of the most recent reference.
	:type last_used_stamp: int
	:ivar level: Current level, 1-based.
	:type level: int
	"""

	page: PageId
	r_bit: int = 0
	m_bit: int = 0
	age_counter: int = 0
	nfu_counter: int = 0
	arrival_stamp: int = 0
	last_used_stamp: int = 0
	level: int = 1

	def touch(self, access: Access) -> None:
		"""Record a reference: set R, set M on writes, stamp recency."""
		self.r_bit = 1
		if access.is_write:
			self.m_bit = 1
		self.last_used_stamp = access.sequence


@dataclass(frozen=True)
class Migration:
	# noinspection PyUnresolvedReferences
	"""
	One page move performed while servicing a reference.

	:ivar page: The moved page.
	:type page: PageId
	:ivar from_level: Source level, or None for the backing store.
	:type from_level: Optional[int]
	:ivar to_level: Destination level, or None for the backing store.
	:type to_level: Optional[int]
	"""

	page: PageId
	from_level: Optional[int]
	to_level: Optional[int]

	def __str__(self) -> str:
		"""Render as ``page 42: L1 -> L2``."""

		def _name(level: Optional[int]) -> str:
			return "store" if level is None else f"L{level}"

		source, target = _name(self.from_level), _name(self.to_level)
		return f"page {int(self.page)}: {source} -> {target}"


@dataclass(frozen=True)
class AccessOutcome:
	# noinspection PyUnresolvedReferences
	"""
	Result of servicing one reference.

	:ivar hit_level: Level the page was found at, or None on a miss.
	:type hit_level: Optional[int]
	:ivar migrations: Page moves performed, in order. Empty on a hit unless
		promotion is enabled.
	:type migrations: tuple[Migration, ...]
	"""

	hit_level: Optional[int]
	migrations: tuple[Migration, ...] = field(default=())

	@property
	def hit(self) -> bool:
		"""True if the page was resident."""
		return self.hit_level is not None

	@property
	def spills(self) -> int:
		"""Number of pages pushed to the backing store."""
		return sum(1 for m in self.migrations if m.to_level is None)
