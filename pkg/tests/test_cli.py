"""Tests for the dememory command line."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: test_cli.py
#
# Tests for the dememory command line.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241127       Created.                                       jrowley
#   20241203       Added sweep cases.                             jrowley
#
###############################################################################

import argparse
import contextlib
import io
import logging
import os
from pathlib import Path
import tempfile
import unittest
from unittest import mock

from pagesim.cli import (
	EXIT_FAILURE,
	EXIT_OK,
	EXIT_USAGE,
	SUBCOMMANDS,
	main,
	parse_args,
	parse_compat,
	run_cli,
	resolve_policy,
)
from pagesim.constants import DEFAULT_SEED, LOG_PATH_ENV, PolicyId
from pagesim.metrics import LOG_FIELDS

GOLDEN = ["B", "10", "1", "0", "100", "1000"]


class CliTestCase(unittest.TestCase):
	"""Runs ``main`` in a scratch directory with captured streams."""

	def setUp(self) -> None:
		"""Point the results log into a scratch directory and save logging."""
		self._tmp = tempfile.TemporaryDirectory()
		self.addCleanup(self._tmp.cleanup)
		self.dir = Path(self._tmp.name)
		self.log = self.dir / "dememory.log"
		patcher = mock.patch.dict(os.environ, {LOG_PATH_ENV: str(self.log)})
		patcher.start()
		self.addCleanup(patcher.stop)
		root = logging.getLogger()
		level, handlers = root.level, list(root.handlers)

		def restore_logging() -> None:
			root.setLevel(level)
			for handler in root.handlers[:]:
				if handler not in handlers:
					root.removeHandler(handler)

		self.addCleanup(restore_logging)

	def run_main(self, *argv: str) -> tuple[int, str, str]:
		"""Run the command, returning exit code, stdout, and stderr."""
		out, err = io.StringIO(), io.StringIO()
		with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
			code = main(list(argv), out=out)
		return code, out.getvalue(), err.getvalue()

	def log_lines(self) -> list[str]:
		"""Lines of the results log, empty if it does not exist."""
		if not self.log.exists():
			return []
		return self.log.read_text().splitlines()


def _summary(text: str) -> list[str]:
	"""Summary lines of a run, except the elapsed time."""
	lines = text.splitlines()
	start = next(i for i, ln in enumerate(lines) if ln.startswith("Algorithm:"))
	return [ln for ln in lines[start:] if ln.startswith(("Hits", "Misses", "Hit/"))]


class TestParsing(unittest.TestCase):
	"""Tests for argument parsing without running anything."""

	def test_golden_compat(self) -> None:
		"""Test the positional grammar with algorithm B."""
		request = parse_compat(GOLDEN).simulation
		assert request is not None
		self.assertIs(request.policy, PolicyId.AGING_N)
		self.assertEqual(request.config.frames_per_level, (10, 10, 10))
		self.assertEqual([lv.speed_factor for lv in request.config.levels], [1, 2, 3])
		self.assertTrue(request.show_process)
		self.assertFalse(request.debug)
		assert request.workload is not None
		self.assertEqual(request.workload.num_indexes, 100)
		self.assertEqual(request.workload.num_refs, 1000)
		self.assertEqual(request.workload.seed, DEFAULT_SEED)
		self.assertTrue(request.seed_defaulted)

	def test_debug_compat(self) -> None:
		"""Test the positional grammar with debug on and few references."""
		request = parse_compat(["B", "10", "1", "1", "100", "5"]).simulation
		assert request is not None and request.workload is not None
		self.assertTrue(request.debug)
		self.assertEqual(request.workload.num_refs, 5)

	def test_one_level_compat(self) -> None:
		"""Test that A and one-level names get a single level."""
		for name in ("A", "lru", "FIFO_1"):
			with self.subTest(name=name):
				request = parse_compat([name, "16", "0", "0", "50", "200"]).simulation
				assert request is not None
				self.assertEqual(request.config.frames_per_level, (16,))

	def test_resolve_policy(self) -> None:
		"""Test codes, names, and unknown algorithms."""
		self.assertIs(resolve_policy("b"), PolicyId.AGING_N)
		self.assertIs(resolve_policy("aging-n-perturbed"), PolicyId.AGING_N_PERTURBED)
		self.assertIs(resolve_policy("NRU_N"), PolicyId.NRU_N)
		with self.assertRaises(argparse.ArgumentTypeError):
			resolve_policy("Z")

	def test_simulate_levels(self) -> None:
		"""Test unequal levels given with --level."""
		invocation = parse_args(
			["simulate", "--policy", "nru-n", "--level", "4:1", "--level", "8:2.5"]
		)
		assert invocation.simulation is not None
		config = invocation.simulation.config
		self.assertEqual(config.frames_per_level, (4, 8))
		self.assertEqual(config.levels[1].speed_factor, 2.5)
		self.assertEqual(config.levels[1].tick_divisor, 2)

	def test_sweep_points(self) -> None:
		"""Test both point list notations."""
		args = parse_args(["sweep", "--axis", "frames", "--points", "10:30:10"]).args
		self.assertEqual(args.points, (10, 20, 30))
		args = parse_args(["sweep", "--axis", "refs", "--points", "5,50"]).args
		self.assertEqual(args.points, (5, 50))


class TestCompat(CliTestCase):
	"""Tests for the positional dememory grammar."""

	def test_golden_run(self) -> None:
		"""Test the reference invocation end to end."""
		code, out, _ = self.run_main(*GOLDEN)
		self.assertEqual(code, EXIT_OK)
		self.assertEqual(
			out.splitlines()[0],
			"AGING_N: 3 level(s) 10/10/10 frames, speeds 1/2/3, 1000 references, "
			f"100 indexes, seed {DEFAULT_SEED} (default)",
		)
		self.assertEqual(sum(ln.startswith("ref ") for ln in out.splitlines()), 1000)
		self.assertIn(f"Results appended to {self.log}", out)
		lines = self.log_lines()
		self.assertEqual(len(lines), 1)
		fields = lines[0].split(",")
		self.assertEqual(len(fields), len(LOG_FIELDS))
		self.assertEqual(
			fields[1:7], ["AGING_N", "3", "10/10/10", "100", "1000", str(DEFAULT_SEED)]
		)
		self.assertEqual(int(fields[7]) + int(fields[8]), 1000)

	def test_repeatable(self) -> None:
		"""Test that repeated runs print the same results and append."""
		argv = ["A", "10", "0", "0", "100", "1000", "--seed", "4"]
		_, first, _ = self.run_main(*argv)
		_, second, _ = self.run_main(*argv)
		self.assertEqual(_summary(first), _summary(second))
		self.assertNotIn("(default)", first)
		self.assertEqual(len(self.log_lines()), 2)

	def test_unknown_algorithm(self) -> None:
		"""Test that an unknown algorithm code is a usage error."""
		code, _, err = self.run_main("Z", "10", "1", "0", "100", "1000")
		self.assertEqual(code, EXIT_USAGE)
		self.assertIn("unknown algorithm", err)
		self.assertEqual(self.log_lines(), [])

	def test_bad_arguments(self) -> None:
		"""Test wrong arity and out-of-range values."""
		for argv in (
			GOLDEN[:5],
			GOLDEN + ["7"],
			["B", "10", "2", "0", "100", "1000"],
			["B", "0", "1", "0", "100", "1000"],
		):
			with self.subTest(argv=argv):
				code, _, err = self.run_main(*argv)
				self.assertEqual(code, EXIT_USAGE)
				self.assertIn("usage:", err)

	def test_help(self) -> None:
		"""Test that help lists every policy and subcommand."""
		code, out, _ = self.run_main("-h")
		self.assertEqual(code, EXIT_OK)
		for policy in PolicyId:
			self.assertIn(policy.value, out)
		for name in SUBCOMMANDS:
			self.assertIn(name, out)

	def test_progress(self) -> None:
		"""Test periodic statistics."""
		code, out, _ = self.run_main(
			"B", "10", "0", "0", "100", "1000", "--progress", "250"
		)
		self.assertEqual(code, EXIT_OK)
		self.assertEqual(out.count("-- after "), 4)
		self.assertIn("-- after 500 references --", out)

	def test_log_failure(self) -> None:
		"""Test that an unwritable log is a runtime failure."""
		code, _, err = self.run_main(
			"B", "10", "0", "0", "100", "100", "--log", str(self.dir)
		)
		self.assertEqual(code, EXIT_FAILURE)
		self.assertIn(str(self.dir), err)


class TestSimulateCommand(CliTestCase):
	"""Tests for the simulate and gen-trace subcommands."""

	def test_trace_file_matches_inline(self) -> None:
		"""Test that a written trace replays like the inline generator."""
		trace = self.dir / "w.trace"
		gen = "gen-trace --indexes 50 --refs 400 --seed 3 -o".split()
		code, out, _ = self.run_main(*gen, str(trace))
		self.assertEqual(code, EXIT_OK)
		self.assertIn("Wrote 400 references", out)
		_, replayed, _ = self.run_main(
			"simulate", "--frames", "5", "--trace", str(trace)
		)
		inline_argv = "simulate --frames 5 --indexes 50 --refs 400 --seed 3".split()
		_, inline, _ = self.run_main(*inline_argv)
		self.assertEqual(_summary(replayed), _summary(inline))
		first, second = (ln.split(",") for ln in self.log_lines())
		self.assertEqual((first[4], first[6]), ("", ""))
		self.assertEqual((second[4], second[6]), ("50", "3"))

	def test_levels(self) -> None:
		"""Test an unequal hierarchy end to end."""
		argv = "simulate --policy nru-n --level 4:1 --level 8:2 --refs 300".split()
		code, _, _ = self.run_main(*argv)
		self.assertEqual(code, EXIT_OK)
		self.assertEqual(self.log_lines()[0].split(",")[1:4], ["NRU_N", "2", "4/8"])

	def test_policy_level_mismatch(self) -> None:
		"""Test that an N-level policy on one level names --level."""
		code, _, err = self.run_main(
			"simulate", "--policy", "aging-n", "--level", "4:1"
		)
		self.assertEqual(code, EXIT_USAGE)
		self.assertIn("--level", err)
		self.assertEqual(self.log_lines(), [])

	def test_missing_trace(self) -> None:
		"""Test that a missing trace file is a runtime failure."""
		missing = self.dir / "nope.trace"
		code, _, err = self.run_main("simulate", "--trace", str(missing))
		self.assertEqual(code, EXIT_FAILURE)
		self.assertIn("nope.trace", err)

	def test_malformed_trace(self) -> None:
		"""Test that a bad trace line is reported with its number."""
		trace = self.dir / "bad.trace"
		trace.write_text("R 1\nX 2\n")
		code, _, err = self.run_main("simulate", "--trace", str(trace))
		self.assertEqual(code, EXIT_USAGE)
		self.assertIn("line 2", err)

	def test_undecodable_trace(self) -> None:
		"""Test that a trace that is not UTF-8 is a usage error, not a crash."""
		trace = self.dir / "binary.trace"
		trace.write_bytes(b"R 1\nR \xff\n")
		code, _, err = self.run_main(
			"simulate", "--policy", "fifo", "--frames", "2", "--trace", str(trace)
		)
		self.assertEqual(code, EXIT_USAGE)
		self.assertIn("line 2", err)
		self.assertIn("binary.trace", err)
		self.assertEqual(self.log_lines(), [])


class TestSweepCommand(CliTestCase):
	"""Tests for the sweep subcommand."""

	def test_output_file(self) -> None:
		"""Test that the CSV file is written and later overwritten."""
		csv_path = self.dir / "sweep.csv"
		argv = "sweep --axis refs --points 10,20 --frames 5 --indexes 20".split()
		argv += ["--seeds", "2", "-o", str(csv_path)]
		code, out, _ = self.run_main(*argv)
		self.assertEqual(code, EXIT_OK)
		self.assertEqual(out, "")
		first = csv_path.read_text()
		self.assertEqual(len(first.splitlines()), 1 + 8 + 4)
		self.run_main(*argv)
		self.assertEqual(csv_path.read_text(), first)

	def test_preset_to_stdout(self) -> None:
		"""Test a preset with overrides written to stdout."""
		code, out, _ = self.run_main(
			"sweep", "--preset", "refs", "--seeds", "1", "--policies", "A,B"
		)
		self.assertEqual(code, EXIT_OK)
		self.assertEqual(len(out.splitlines()), 1 + 20 + 20)

	def test_compare_perturbed(self) -> None:
		"""Test the paired comparison CSV."""
		argv = "--compare-perturbed --frames 5 --indexes 20 --refs 200".split()
		argv += ["--seeds", "3"]
		code, out, _ = self.run_main("sweep", *argv)
		self.assertEqual(code, EXIT_OK)
		lines = out.splitlines()
		self.assertEqual(lines[0], "seed,aging_n,aging_n_perturbed,difference")
		self.assertTrue(lines[-1].startswith("mean,"))

	def test_usage_errors(self) -> None:
		"""Test missing axis and decreasing points."""
		code, _, err = self.run_main("sweep", "--points", "10,20")
		self.assertEqual(code, EXIT_USAGE)
		self.assertIn("--axis", err)
		code, _, err = self.run_main("sweep", "--axis", "refs", "--points", "20,10")
		self.assertEqual(code, EXIT_USAGE)
		self.assertIn("--points", err)


class TestLogLevel(CliTestCase):
	"""Tests for the log level taken from the parsed flags."""

	def level_after(self, *argv: str) -> int:
		"""Run the command and return the root log level it left behind."""
		code, _, _ = self.run_main(*argv)
		self.assertEqual(code, EXIT_OK)
		return logging.getLogger().level

	def test_compat_debug_after_option(self) -> None:
		"""Test that debug=1 is honored behind a leading option."""
		level = self.level_after("--seed", "7", "B", "10", "0", "1", "5", "20")
		self.assertEqual(level, logging.DEBUG)

	def test_compat_one_frame_stays_quiet(self) -> None:
		"""Test that a frame count of 1 is not mistaken for debug=1."""
		level = self.level_after("--seed", "7", "B", "1", "0", "0", "5", "20")
		self.assertEqual(level, logging.WARNING)

	def test_subcommands(self) -> None:
		"""Test --debug and --verbose on the subcommand grammar."""
		self.assertEqual(
			self.level_after(*"simulate --refs 20 --debug".split()), logging.DEBUG
		)
		self.assertEqual(
			self.level_after(*"-v simulate --refs 20".split()), logging.INFO
		)
		self.assertEqual(
			self.level_after(*"simulate --refs 20".split()), logging.WARNING
		)

	def test_run_cli_applies_debug(self) -> None:
		"""Test that run_cli honors the parsed debug flag on its own."""
		invocation = parse_compat(["A", "4", "0", "1", "10", "20"])
		self.assertEqual(run_cli(invocation, io.StringIO()), EXIT_OK)
		self.assertEqual(logging.getLogger().level, logging.DEBUG)
		self.assertEqual(len(self.log_lines()), 1)


if __name__ == "__main__":
	unittest.main()
