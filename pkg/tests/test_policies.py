"""Tests for victim selection primitives and replacement policies."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: test_policies.py
#
# Tests for victim selection primitives and replacement policies.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241120       Created.                                       jrowley
#   20241203       Added perturbed mapping cases.                 jrowley
#   20241210       Added brute force OPT comparison.              jrowley
#
###############################################################################

from collections import deque
import functools
import unittest

import numpy as np

from pagesim.constants import ONE_LEVEL_POLICIES, PolicyId
from pagesim.engine import Simulation, simulate
from pagesim.exceptions import ConfigurationError
from pagesim.policies import (
	NextUseIndex,
	aging_select_victim,
	aging_target_level,
	aging_target_level_perturbed,
	aging_tick,
	lru_select_victim,
	make_policy,
	nfu_select_victim,
	nfu_tick,
	nru_class,
	nru_select_victim,
	opt_select_victim,
	second_chance_select,
)
from pagesim.state import PolicyState
from pagesim.types import (
	Access,
	HierarchyConfig,
	Migration,
	PageEntry,
	PageId,
	ReferenceTrace,
)
from pagesim.util import format_counter
from pagesim.workload import WorkloadSpec, generate_trace

BELADY_TRACE = (1, 2, 3, 4, 1, 2, 5, 1, 2, 3, 4, 5)


def _entry(page: int, **kwargs: int) -> PageEntry:
	return PageEntry(PageId(page), **kwargs)


def _misses(policy: PolicyId, pages: tuple[int, ...], frames: int) -> int:
	trace = ReferenceTrace.from_pages(pages)
	return simulate(HierarchyConfig.single(frames), policy, trace).misses


def _min_faults(pages: tuple[int, ...], frames: int) -> int:
	"""Fewest faults any demand paging schedule can achieve, by exhaustion."""

	@functools.lru_cache(maxsize=None)
	def best(position: int, resident: frozenset[int]) -> int:
		if position == len(pages):
			return 0
		page = pages[position]
		if page in resident:
			return best(position + 1, resident)
		if len(resident) < frames:
			return 1 + best(position + 1, resident | {page})
		return 1 + min(
			best(position + 1, (resident - {out}) | {page}) for out in resident
		)

	return best(0, frozenset())


class TestNru(unittest.TestCase):
	"""Tests for NRU classes and victim selection."""

	def test_classes(self) -> None:
		"""Test class numbering from R and M."""
		self.assertEqual(nru_class(_entry(0)), 0)
		self.assertEqual(nru_class(_entry(0, m_bit=1)), 1)
		self.assertEqual(nru_class(_entry(0, r_bit=1)), 2)
		self.assertEqual(nru_class(_entry(0, r_bit=1, m_bit=1)), 3)

	def test_lowest_class_lowest_slot(self) -> None:
		"""Test that the lowest class wins and ties go to the lowest slot."""
		slots = [
			_entry(0, r_bit=1, m_bit=1),
			_entry(1, m_bit=1),
			_entry(2, r_bit=1),
			_entry(3, m_bit=1),
		]
		self.assertEqual(nru_select_victim(slots), 1)
		self.assertEqual(nru_select_victim([None, _entry(4, r_bit=1)]), 1)


class TestSecondChance(unittest.TestCase):
	"""Tests for second chance selection."""

	def test_skips_referenced_head(self) -> None:
		"""Test that a referenced head is cleared and requeued."""
		slots = [_entry(0, r_bit=1), _entry(1)]
		queue = deque([0, 1])
		self.assertEqual(second_chance_select(queue, slots), 1)
		self.assertEqual(list(queue), [0])
		self.assertEqual(slots[0].r_bit, 0)  # type: ignore[union-attr]

	def test_all_referenced(self) -> None:
		"""Test that a full pass clears every bit and picks the old head."""
		slots = [_entry(0, r_bit=1), _entry(1, r_bit=1), _entry(2, r_bit=1)]
		queue = deque([1, 2, 0])
		self.assertEqual(second_chance_select(queue, slots), 1)
		self.assertEqual(list(queue), [2, 0])
		self.assertTrue(all(e.r_bit == 0 for e in slots))  # type: ignore[union-attr]


class TestAging(unittest.TestCase):
	"""Tests for aging counters and the level mapping."""

	def setUp(self) -> None:
		"""Create the default 3-level, 8-bit hierarchy."""
		self.config = HierarchyConfig.uniform(1)

	def test_tick_sequence(self) -> None:
		"""Test the counter after R pattern 1, 1, 0, 0, 0."""
		entry = _entry(0)
		seen = []
		for r in (1, 1, 0, 0, 0):
			entry.r_bit = r
			aging_tick([entry], 8)
			seen.append(format_counter(entry.age_counter, 8))
			self.assertEqual(entry.r_bit, 0)
		self.assertEqual(
			seen, ["10000000", "11000000", "01100000", "00110000", "00011000"]
		)

	def test_tick_single_step(self) -> None:
		"""Test one shift with and without the R bit."""
		entry = _entry(0, r_bit=1, age_counter=0b10000000)
		aging_tick([entry], 8)
		self.assertEqual(entry.age_counter, 0b11000000)
		idle = _entry(1)
		aging_tick([idle], 8)
		self.assertEqual(idle.age_counter, 0)

	def test_select_victim(self) -> None:
		"""Test that the smallest counter is evicted, lowest slot on ties."""
		slots = [
			_entry(0, age_counter=0b00011000),
			_entry(1, age_counter=0b11000000),
			_entry(2, age_counter=0b00000001),
		]
		self.assertEqual(aging_select_victim(slots), 2)
		self.assertEqual(aging_select_victim([_entry(0), _entry(1)]), 0)

	def test_target_level(self) -> None:
		"""Test the leading zero mapping and its clamping."""
		config = self.config
		self.assertEqual(aging_target_level(0b00011000, 1, config), 2)
		self.assertEqual(aging_target_level(0, 1, config), 3)
		self.assertEqual(aging_target_level(0xFF, 1, config), 2)
		self.assertEqual(aging_target_level(0xFF, 2, config), 3)
		self.assertEqual(aging_target_level(0b00001000, 1, config), 2)
		self.assertEqual(aging_target_level(0b00000100, 1, config), 3)
		self.assertEqual(aging_target_level(0xFF, 3, config), 4)

	def test_target_level_range(self) -> None:
		"""Test that every counter maps below the evicting level."""
		config = self.config
		for current in (1, 2):
			for counter in range(256):
				target = aging_target_level(counter, current, config)
				self.assertGreater(target, current)
				self.assertLessEqual(target, config.num_levels)
		for counter in range(256):
			self.assertEqual(aging_target_level(counter, 3, config), 4)

	def test_target_level_narrow_counter(self) -> None:
		"""Test that a counter narrower than ML is refused."""
		config = HierarchyConfig.uniform(1, counter_width_bits=2)
		with self.assertRaises(ConfigurationError):
			aging_target_level(0, 1, config)

	def test_perturbed_target_level(self) -> None:
		"""Test the 2/3 swap and that it never maps upwards."""
		config = self.config
		self.assertEqual(aging_target_level_perturbed(0b00011000, 1, config), 3)
		self.assertEqual(aging_target_level_perturbed(0, 1, config), 2)
		self.assertEqual(aging_target_level_perturbed(0xFF, 1, config), 3)
		self.assertEqual(aging_target_level_perturbed(0b00011000, 2, config), 3)
		self.assertEqual(aging_target_level_perturbed(0, 3, config), 4)
		with self.assertRaises(ConfigurationError):
			aging_target_level_perturbed(0, 1, HierarchyConfig.uniform(1, (1, 2)))


class TestLruNfu(unittest.TestCase):
	"""Tests for LRU and NFU primitives."""

	def test_lru(self) -> None:
		"""Test that the oldest stamp is evicted."""
		slots = [
			_entry(0, last_used_stamp=5),
			_entry(1, last_used_stamp=2),
			_entry(2, last_used_stamp=9),
		]
		self.assertEqual(lru_select_victim(slots), 1)

	def test_nfu(self) -> None:
		"""Test counter accumulation and selection."""
		entry = _entry(0, r_bit=1, nfu_counter=4)
		nfu_tick([entry])
		self.assertEqual((entry.nfu_counter, entry.r_bit), (5, 0))
		slots = [_entry(0, nfu_counter=3), _entry(1), _entry(2, nfu_counter=7)]
		self.assertEqual(nfu_select_victim(slots), 1)


class TestOpt(unittest.TestCase):
	"""Tests for the offline optimal policy."""

	def test_next_use_index(self) -> None:
		"""Test next reference lookups."""
		index = NextUseIndex([0, 1, 0, 2])
		self.assertEqual(index.next_use(0, 0), 0)
		self.assertEqual(index.next_use(0, 1), 2)
		self.assertIsNone(index.next_use(0, 3))
		self.assertIsNone(index.next_use(9, 0))

	def test_never_used_again_wins(self) -> None:
		"""Test that a page with no future reference beats any distance."""
		trace = ReferenceTrace.from_pages([0, 1, 2, 0, 1, 1, 1, 1, 1, 0])
		slots = [_entry(0), _entry(1), _entry(2)]
		self.assertEqual(opt_select_victim(slots, trace, 3), 2)
		self.assertEqual(opt_select_victim([_entry(0), _entry(1)], trace, 4), 0)
		self.assertEqual(opt_select_victim([_entry(1), _entry(2)], trace, 9), 0)

	def test_small_trace(self) -> None:
		"""Test fault counts of a short looping trace."""
		pages = (0, 1, 2, 0, 1, 3, 0, 1, 2, 3)
		self.assertEqual(_misses(PolicyId.OPT_1, pages, 3), 5)
		self.assertEqual(_min_faults(pages, 3), 5)

	def test_sparse_sequence_numbers(self) -> None:
		"""Test that gaps between sequence numbers do not change decisions."""
		pages = (0, 1, 2, 0)
		sparse = ReferenceTrace(
			tuple(Access(PageId(p), sequence=5 * i) for i, p in enumerate(pages))
		)
		config = HierarchyConfig.single(2)
		self.assertEqual(simulate(config, PolicyId.OPT_1, sparse).misses, 3)
		self.assertEqual(_misses(PolicyId.OPT_1, pages, 2), 3)

	def test_belady_trace(self) -> None:
		"""Test the classic 12 reference trace against FIFO and LRU."""
		self.assertEqual(_misses(PolicyId.OPT_1, BELADY_TRACE, 3), 7)
		self.assertEqual(_misses(PolicyId.FIFO_1, BELADY_TRACE, 3), 9)
		self.assertEqual(_misses(PolicyId.FIFO_1, BELADY_TRACE, 4), 10)
		self.assertEqual(_misses(PolicyId.LRU_1, BELADY_TRACE, 3), 10)

	def test_matches_exhaustive_search(self) -> None:
		"""Test OPT against the brute force minimum on short traces."""
		rng = np.random.default_rng(7)
		for _ in range(100):
			length = int(rng.integers(1, 13))
			indexes = int(rng.integers(2, 7))
			frames = int(rng.integers(1, 4))
			pages = tuple(int(p) for p in rng.integers(0, indexes, size=length))
			with self.subTest(pages=pages, frames=frames):
				self.assertEqual(
					_misses(PolicyId.OPT_1, pages, frames),
					_min_faults(pages, frames),
				)

	def test_dominates_online_policies(self) -> None:
		"""Test that no one-level policy misses less than OPT."""
		rng = np.random.default_rng(11)
		online = [p for p in ONE_LEVEL_POLICIES if p is not PolicyId.OPT_1]
		for i in range(200):
			frames = int(rng.integers(2, 6))
			spec = WorkloadSpec(int(rng.integers(4, 11)), 50, seed=i)
			trace = generate_trace(spec)
			config = HierarchyConfig.single(frames)
			best = simulate(config, PolicyId.OPT_1, trace).misses
			for policy in online:
				with self.subTest(seed=i, policy=policy):
					self.assertLessEqual(best, simulate(config, policy, trace).misses)

	def test_needs_trace(self) -> None:
		"""Test that OPT cannot be built without the trace."""
		with self.assertRaises(ConfigurationError):
			make_policy(PolicyId.OPT_1, HierarchyConfig.single(3))


class TestClock(unittest.TestCase):
	"""Tests for the clock policy."""

	def test_same_outcome_as_second_chance(self) -> None:
		"""Test that clock and second chance fault identically."""
		for seed in range(20):
			trace = generate_trace(WorkloadSpec(12, 300, seed=seed))
			config = HierarchyConfig.single(5)
			with self.subTest(seed=seed):
				self.assertEqual(
					simulate(config, PolicyId.CLOCK_1, trace).misses,
					simulate(config, PolicyId.SECOND_CHANCE_1, trace).misses,
				)


class TestNruN(unittest.TestCase):
	"""Tests for N-level NRU."""

	def test_tick_divisors(self) -> None:
		"""Test that each level clears R bits at its own rate."""
		config = HierarchyConfig.uniform(1)
		policy = make_policy(PolicyId.NRU_N, config)
		state = PolicyState(config)
		entries = [_entry(p) for p in range(3)]
		for level, entry in enumerate(entries, start=1):
			state.place(entry, level)

		def cleared_after(tick: int) -> list[int]:
			for e in entries:
				e.r_bit = 1
			policy.on_tick(state, tick)
			return [e.r_bit for e in entries]

		self.assertEqual(cleared_after(1), [0, 1, 1])
		self.assertEqual(cleared_after(2), [0, 0, 1])
		self.assertEqual(cleared_after(3), [0, 1, 0])
		self.assertEqual(cleared_after(6), [0, 0, 0])

	def test_victim_drops_one_level(self) -> None:
		"""Test that an evicted page lands exactly one level down."""
		config = HierarchyConfig.uniform(1)
		sim = Simulation(config, PolicyId.NRU_N, ReferenceTrace.from_pages([0, 1, 2]))
		sim.run()
		self.assertEqual(
			[sim.lookup(PageId(p)) for p in range(3)],
			[3, 2, 1],
		)


class TestFifoN(unittest.TestCase):
	"""Tests for N-level second chance FIFO."""

	def setUp(self) -> None:
		"""Create a 2-level hierarchy with 2 frames per level."""
		self.config = HierarchyConfig.uniform(2, (1, 2))
		self.policy = make_policy(PolicyId.FIFO_N, self.config)
		self.state = PolicyState(self.config)

	def _insert(self, page: int, sequence: int) -> list[Migration]:
		entry = self.policy.new_entry(Access(PageId(page), sequence=sequence))
		return self.policy.fault_insert(self.state, entry, sequence)

	def test_all_referenced_passes_incoming_down(self) -> None:
		"""Test that a full level of referenced pages is left alone."""
		self._insert(0, 0)
		self._insert(1, 1)
		self.assertEqual(self._insert(2, 2), [Migration(PageId(2), None, 2)])
		self.assertEqual(self.state.lookup(PageId(0)), 1)
		self.assertEqual(self.state.lookup(PageId(1)), 1)
		self._insert(3, 3)
		self.assertEqual(self._insert(4, 4), [Migration(PageId(4), None, None)])
		self.assertEqual(list(self.state.victims), [4])
		self.state.check_invariants()

	def test_unreferenced_page_drops(self) -> None:
		"""Test that second chance picks the unreferenced page."""
		self._insert(0, 0)
		self._insert(1, 1)
		self.state.entry(PageId(0)).r_bit = 0  # type: ignore[union-attr]
		self.assertEqual(
			self._insert(2, 2),
			[Migration(PageId(2), None, 1), Migration(PageId(0), 1, 2)],
		)
		self.assertEqual(self.state.lookup(PageId(2)), 1)
		self.assertEqual(self.state.lookup(PageId(0)), 2)


class TestAgingN(unittest.TestCase):
	"""Tests for memory-aware aging."""

	def _setup(self, frames: int, policy: PolicyId = PolicyId.AGING_N) -> None:
		self.config = HierarchyConfig.uniform(frames)
		self.policy = make_policy(policy, self.config)
		self.state = PolicyState(self.config)

	def _insert(self, entry: PageEntry, sequence: int) -> list[Migration]:
		return self.policy.fault_insert(self.state, entry, sequence)

	def _new(self, page: int, sequence: int) -> PageEntry:
		return self.policy.new_entry(Access(PageId(page), sequence=sequence))

	def test_new_page_counter(self) -> None:
		"""Test that new pages start referenced with the top bit set."""
		self._setup(2)
		entry = self._new(7, 0)
		self.assertEqual((entry.r_bit, entry.m_bit), (1, 0))
		self.assertEqual(entry.age_counter, 0b10000000)

	def test_victim_moves_by_counter(self) -> None:
		"""Test that a victim with 3 leading zeros goes to level 2."""
		self._setup(2)
		self._insert(_entry(1, age_counter=0b00011000), 0)
		self._insert(_entry(2, age_counter=0b11000000), 1)
		migrations = self._insert(self._new(3, 2), 2)
		self.assertEqual(
			migrations,
			[Migration(PageId(3), None, 1), Migration(PageId(1), 1, 2)],
		)
		self.assertEqual(self.state.table(1).slots[0].page, 3)  # type: ignore
		self.assertEqual(self.state.lookup(PageId(1)), 2)

	def test_idle_victim_skips_level(self) -> None:
		"""Test that a zero counter victim goes straight to level 3."""
		self._setup(2)
		self._insert(_entry(1, age_counter=0), 0)
		self._insert(_entry(2, age_counter=0b11000000), 1)
		self._insert(self._new(3, 2), 2)
		self.assertEqual(self.state.lookup(PageId(1)), 3)
		self.assertEqual(self.state.occupancy(), (2, 0, 1))

	def test_cascade_to_store(self) -> None:
		"""Test the cascade when the destination levels are full."""
		self._setup(1)
		self._insert(_entry(1, age_counter=0), 0)
		self._insert(self._new(2, 1), 1)
		self._insert(self._new(3, 2), 2)
		self.assertEqual(self.state.occupancy(), (1, 1, 1))
		migrations = self._insert(self._new(4, 3), 3)
		self.assertEqual(
			migrations,
			[
				Migration(PageId(4), None, 1),
				Migration(PageId(3), 1, 2),
				Migration(PageId(2), 2, 3),
				Migration(PageId(1), 3, None),
			],
		)
		self.assertEqual(list(self.state.victims), [1])
		self.state.check_invariants()

	def test_perturbed_sends_active_victim_deep(self) -> None:
		"""Test that the control variant swaps levels 2 and 3."""
		self._setup(2, PolicyId.AGING_N_PERTURBED)
		self._insert(_entry(1, age_counter=0b00011000), 0)
		self._insert(_entry(2, age_counter=0b11000000), 1)
		self._insert(self._new(3, 2), 2)
		self.assertEqual(self.state.lookup(PageId(1)), 3)

	def test_perturbed_same_without_evictions(self) -> None:
		"""Test that both variants agree while level 1 never fills."""
		config = HierarchyConfig.uniform(8)
		trace = generate_trace(WorkloadSpec(8, 200, seed=3))
		correct = simulate(config, PolicyId.AGING_N, trace)
		perturbed = simulate(config, PolicyId.AGING_N_PERTURBED, trace)
		self.assertEqual(
			(correct.hits, correct.hits_per_level, correct.migrations),
			(perturbed.hits, perturbed.hits_per_level, perturbed.migrations),
		)


class TestValidation(unittest.TestCase):
	"""Tests for policy and hierarchy pairing."""

	def test_level_counts(self) -> None:
		"""Test that policies refuse hierarchies of the wrong depth."""
		one, three = HierarchyConfig.single(4), HierarchyConfig.uniform(4)
		for policy in (PolicyId.NRU_N, PolicyId.FIFO_N, PolicyId.AGING_N):
			with self.subTest(policy=policy):
				with self.assertRaises(ConfigurationError):
					make_policy(policy, one)
		for policy in (PolicyId.FIFO_1, PolicyId.AGING_1, PolicyId.LRU_1):
			with self.subTest(policy=policy):
				with self.assertRaises(ConfigurationError):
					make_policy(policy, three)

	def test_perturbed_needs_three_levels(self) -> None:
		"""Test that the control variant needs exactly 3 levels."""
		with self.assertRaises(ConfigurationError) as cm:
			make_policy(PolicyId.AGING_N_PERTURBED, HierarchyConfig.uniform(4, (1, 2)))
		self.assertEqual(cm.exception.field, "levels")

	def test_counter_too_narrow(self) -> None:
		"""Test that AGING_N needs a counter bit per level."""
		config = HierarchyConfig.uniform(4, counter_width_bits=2)
		with self.assertRaises(ConfigurationError) as cm:
			make_policy(PolicyId.AGING_N, config)
		self.assertEqual(cm.exception.field, "counter_width_bits")

	def test_every_policy_builds(self) -> None:
		"""Test that make_policy knows every PolicyId."""
		trace = ReferenceTrace.from_pages([0])
		for policy in PolicyId:
			config = (
				HierarchyConfig.uniform(2)
				if policy.multi_level
				else HierarchyConfig.single(2)
			)
			with self.subTest(policy=policy):
				self.assertIs(make_policy(policy, config, trace).policy_id, policy)


if __name__ == "__main__":
	unittest.main()
