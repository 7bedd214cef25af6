"""Simulator enumerations, defaults, and constants."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: constants.py
#
# Simulator enumerations, defaults, and constants.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241118       Created                                        jrowley
#   20241203       Added perturbed aging and sweep axes.          jrowley
#
###############################################################################

from typing import Final

from pagesim.util import FlexEnum

DEFAULT_COUNTER_WIDTH: Final = 8
DEFAULT_TICK_PERIOD: Final = 1
# References per clock interrupt in the benchmark experiments. Coarser than
# per-reference ticks so a level 1 victim still has a nonzero aging counter.
EXPERIMENT_TICK_PERIOD: Final = 8
DEFAULT_MISS_PENALTY_FACTOR: Final = 10
DEFAULT_SPEEDS: Final = (1, 2, 3)
DEFAULT_LEVELS: Final = 3

DEFAULT_SEED: Final = 20151201
DEFAULT_SEED_COUNT: Final = 20

DEFAULT_LOG_NAME: Final = "dememory.log"
LOG_PATH_ENV: Final = "DEMEMORY_LOG"

DESK_SCALE_CAP: Final = 100_000
HPC_SCALE_CAP: Final = 1_000_000


class AccessKind(FlexEnum):
	"""
	Kind of a single page reference.

	The value is the one-letter code used in trace files.

	:cvar READ: Read reference (``R`` in trace files).
	:cvar WRITE: Write reference (``W`` in trace files), sets the M bit.
	"""

	READ = "R"
	WRITE = "W"


class PolicyId(FlexEnum):
	"""
	A page replacement algorithm.

	Members ending in ``_1`` drive a one-level hierarchy, members ending in
	``_N`` drive two or more levels. The value is the long-form name accepted
	on the command line.

	:cvar FIFO_1: First-in first-out.
	:cvar SECOND_CHANCE_1: FIFO with a second chance for referenced pages.
	:cvar CLOCK_1: Second chance over a cyclic list with a rotating hand.
	:cvar NRU_1: Not recently used, four R/M classes.
	:cvar LRU_1: Least recently used, exact timestamps.
	:cvar NFU_1: Not frequently used, summed R bits.
	:cvar AGING_1: Aging counters (compat code ``A``).
	:cvar OPT_1: Offline optimal; needs the whole trace up front.
	:cvar NRU_N: NRU cascading victims one level down.
	:cvar FIFO_N: Second-chance FIFO cascading one level down.
	:cvar AGING_N: Memory-aware aging, victims go to the level matching their
		counter's leading zeros (compat code ``B``).
	:cvar AGING_N_PERTURBED: AGING_N with levels 2 and 3 swapped in the
		level mapping; a control for the level mapping's contribution.
	"""

	FIFO_1 = "fifo"
	SECOND_CHANCE_1 = "second-chance"
	CLOCK_1 = "clock"
	NRU_1 = "nru"
	LRU_1 = "lru"
	NFU_1 = "nfu"
	AGING_1 = "aging"
	OPT_1 = "opt"
	NRU_N = "nru-n"
	FIFO_N = "fifo-n"
	AGING_N = "aging-n"
	AGING_N_PERTURBED = "aging-n-perturbed"

	@property
	def multi_level(self) -> bool:
		"""
		Check if this policy drives an N-level hierarchy.

		:getter: Check if this policy drives an N-level hierarchy.
		:setter: None, computed/read-only.
		:return: True for ``*_N`` policies.
		:rtype: bool
		"""
		return self.name.endswith("_N") or self.name.endswith("_PERTURBED")

	@property
	def uses_aging(self) -> bool:
		"""True if pages carry an aging counter under this policy."""
		return self.name.startswith("AGING")

	@property
	def needs_future(self) -> bool:
		"""True if the policy must see the whole trace before running."""
		return self is PolicyId.OPT_1


# One-letter algorithm codes of the dememory compat command line.
COMPAT_CODES: Final = {
	"A": PolicyId.AGING_1,
	"B": PolicyId.AGING_N,
}

ONE_LEVEL_POLICIES: Final = tuple(p for p in PolicyId if not p.multi_level)
N_LEVEL_POLICIES: Final = tuple(p for p in PolicyId if p.multi_level)


class SweepAxis(FlexEnum):
	"""
	The swept parameter of a benchmark.

	:cvar FRAMES: Frames per level (F).
	:cvar INDEXES: Unique page indexes (I).
	:cvar REFS: Page references (R).
	"""

	FRAMES = "frames"
	INDEXES = "indexes"
	REFS = "refs"
