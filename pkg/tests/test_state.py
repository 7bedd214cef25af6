"""Tests for page tables, queues and the victim list."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: test_state.py
#
# Tests for page tables, queues and the victim list.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241120       Created.                                       jrowley
#
###############################################################################

import unittest

from pagesim.exceptions import SimulationStateError
from pagesim.state import PolicyState
from pagesim.types import HierarchyConfig, PageEntry, PageId


def _entry(page: int) -> PageEntry:
	return PageEntry(PageId(page))


class TestPolicyState(unittest.TestCase):
	"""Tests for PolicyState bookkeeping."""

	def setUp(self) -> None:
		"""Create an empty 3-level state with 2 frames per level."""
		self.state = PolicyState(HierarchyConfig.uniform(2))

	def test_place_lowest_free_slot(self) -> None:
		"""Test slot allocation, queue order and lookup."""
		state = self.state
		self.assertEqual(state.place(_entry(5), 1), 0)
		self.assertEqual(state.place(_entry(6), 1), 1)
		self.assertTrue(state.table(1).full)
		self.assertEqual(list(state.table(1).queue), [0, 1])
		self.assertEqual(state.lookup(PageId(6)), 1)
		self.assertEqual(state.locate(PageId(6)), (1, 1))
		self.assertIsNone(state.lookup(PageId(7)))
		self.assertEqual(state.occupancy(), (2, 0, 0))

	def test_remove_frees_slot(self) -> None:
		"""Test that a removed slot is reused and leaves the queue."""
		state = self.state
		state.place(_entry(1), 2)
		state.place(_entry(2), 2)
		removed = state.remove(2, 0)
		self.assertEqual(removed.page, 1)
		self.assertIsNone(state.lookup(PageId(1)))
		self.assertEqual(list(state.table(2).queue), [1])
		self.assertEqual(state.place(_entry(3), 2), 0)
		self.assertEqual(list(state.table(2).queue), [1, 0])
		self.assertEqual(state.entry(PageId(3)).level, 2)  # type: ignore[union-attr]

	def test_illegal_moves(self) -> None:
		"""Test that bookkeeping violations are refused."""
		state = self.state
		entry = _entry(1)
		state.place(entry, 1)
		with self.assertRaises(SimulationStateError):
			state.place(entry, 2)
		with self.assertRaises(SimulationStateError):
			state.remove(1, 1)
		with self.assertRaises(SimulationStateError):
			state.spill(PageId(1))
		state.place(_entry(2), 1)
		with self.assertRaises(SimulationStateError):
			state.place(_entry(3), 1)

	def test_victim_list(self) -> None:
		"""Test spilling, reclaiming and re-placing a page."""
		state = self.state
		state.place(_entry(1), 3)
		entry = state.remove(3, 0)
		state.spill(entry.page)
		self.assertEqual(list(state.victims), [1])
		self.assertIsNone(state.lookup(PageId(1)))
		self.assertEqual(state.seen_count, 1)
		self.assertEqual(state.resident_count, 0)
		state.check_invariants()
		self.assertTrue(state.reclaim(PageId(1)))
		self.assertFalse(state.reclaim(PageId(1)))
		state.place(entry, 1)
		self.assertEqual(list(state.victims), [])
		state.check_invariants()

	def test_check_invariants_detects_corruption(self) -> None:
		"""Test that an inconsistent image is reported."""
		state = self.state
		state.place(_entry(1), 1)
		state.check_invariants()
		state.table(1).slots[0].level = 3  # type: ignore[union-attr]
		with self.assertRaises(SimulationStateError):
			state.check_invariants()

	def test_check_invariants_detects_lost_page(self) -> None:
		"""Test that a page dropped without spilling breaks conservation."""
		state = self.state
		state.place(_entry(1), 1)
		state.remove(1, 0)
		with self.assertRaises(SimulationStateError):
			state.check_invariants()


if __name__ == "__main__":
	unittest.main()
