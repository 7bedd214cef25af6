"""Randomized reference trace generation and trace files."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: workload.py
#
# Randomized reference trace generation and trace files.
#
# Traces are drawn with numpy's PCG64 bit generator, so a given seed yields
# the same trace on every machine and numpy release that keeps PCG64's
# stream stable.
#
# Trace file format, one reference per line, LF endings:
#
#   # comment
#   R 42
#   W 7
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241119       Created.                                       jrowley
#   20241216       Undecodable trace lines are format errors.     jrowley
#
###############################################################################

from dataclasses import dataclass
import logging
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from pagesim.constants import DEFAULT_SEED, AccessKind
from pagesim.exceptions import ConfigurationError, TraceFormatError
from pagesim.types import Access, PageId, ReferenceTrace

logger = logging.getLogger(__name__)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class WorkloadSpec:
	# noinspection PyUnresolvedReferences
	"""
	Parameters of a uniformly random reference trace.

	:ivar num_indexes: Unique page indexes (I), at least 1.
	:type num_indexes: int
	:ivar num_refs: Number of references (R), at least 0.
	:type num_refs: int
	:ivar seed: RNG seed, reduced to 64 bits.
	:type seed: int
	:ivar write_probability: Probability of each reference being a write.
	:type write_probability: float
	"""

	num_indexes: int
	num_refs: int
	seed: int = DEFAULT_SEED
	write_probability: float = 0.0

	def __post_init__(self) -> None:
		"""Validate field ranges."""
		if self.num_indexes < 1:
			raise ConfigurationError(
				f"must be at least 1, got {self.num_indexes}", "num_indexes"
			)
		if self.num_refs < 0:
			raise ConfigurationError(
				f"must not be negative, got {self.num_refs}", "num_refs"
			)
		if not 0.0 <= self.write_probability <= 1.0:
			raise ConfigurationError(
				f"must be within [0, 1], got {self.write_probability}",
				"write_probability",
			)


def generate_trace(spec: WorkloadSpec) -> ReferenceTrace:
	"""
	Generate a uniformly random reference trace.

	Every page is drawn independently and uniformly from
	``[0, num_indexes)``. Write flags are drawn after all pages, so changing
	only ``write_probability`` never changes which pages are referenced.

	:param spec: Workload parameters.
	:type spec: WorkloadSpec
	:return: Trace of exactly ``spec.num_refs`` references.
	:rtype: ReferenceTrace
	"""
	rng = np.random.Generator(np.random.PCG64(spec.seed & _SEED_MASK))
	pages = rng.integers(0, spec.num_indexes, size=spec.num_refs, dtype=np.int64)
	if spec.write_probability > 0.0:
		writes = rng.random(size=spec.num_refs) < spec.write_probability
	else:
		writes = np.zeros(spec.num_refs, dtype=bool)
	logger.debug(
		f"Generated {spec.num_refs} references over {spec.num_indexes} "
		f"indexes (seed {spec.seed})."
	)
	return ReferenceTrace(
		tuple(
			Access(PageId(int(p)), AccessKind.WRITE if w else AccessKind.READ, seq)
			for seq, (p, w) in enumerate(zip(pages.tolist(), writes.tolist()))
		)
	)


def parse_trace(
	lines: Iterable[Union[str, bytes]], path: Optional[Union[str, Path]] = None
) -> ReferenceTrace:
	"""
	Parse trace file lines.

	Blank lines and lines starting with ``#`` are skipped. Sequence numbers
	are assigned from the order of the remaining lines.

	:param lines: Lines of a trace file, with or without line endings. Byte
		lines are decoded as UTF-8.
	:type lines: Iterable[Union[str, bytes]]
	:param path: Source file, used only in error messages.
	:type path: Optional[Union[str, Path]]
	:return: The parsed trace.
	:rtype: ReferenceTrace
	:raises TraceFormatError: Will raise on the first malformed line.
	"""
	accesses: list[Access] = []
	for line_number, raw in enumerate(lines, start=1):
		if isinstance(raw, bytes):
			try:
				raw = raw.decode("utf-8")
			except UnicodeDecodeError:
				bad = raw.decode("utf-8", "replace").rstrip("\r\n")
				raise TraceFormatError(line_number, bad, "invalid UTF-8", path)
		line = raw.rstrip("\r\n")
		stripped = line.strip()
		if not stripped or stripped.startswith("#"):
			continue
		parts = stripped.split()
		if len(parts) != 2:
			raise TraceFormatError(line_number, line, "expected '<R|W> <page>'", path)
		code, value = parts
		if code not in ("R", "W"):
			raise TraceFormatError(line_number, line, f"invalid kind {code!r}", path)
		if not (value.isascii() and value.isdigit()):
			raise TraceFormatError(line_number, line, f"invalid page {value!r}", path)
		accesses.append(Access(PageId(int(value)), AccessKind(code), len(accesses)))
	return ReferenceTrace(tuple(accesses))


def read_trace(path: Union[str, Path]) -> ReferenceTrace:
	"""
	Read a trace file.

	:param path: Trace file to read.
	:type path: Union[str, Path]
	:return: The parsed trace.
	:rtype: ReferenceTrace
	:raises TraceFormatError: Will raise if a line is malformed, naming the
		line number.
	:raises OSError: Will raise if the file cannot be read.
	"""
	path = Path(path)
	with path.open("rb") as f:
		trace = parse_trace(f, path)
	logger.debug(f"Read {len(trace)} references from {path}.")
	return trace


def format_trace(trace: ReferenceTrace, header: Optional[str] = None) -> str:
	"""Render a trace in file format, optionally after a ``#`` comment."""
	out: list[str] = []
	if header:
		out.extend(f"# {h}" for h in header.splitlines())
	out.extend(f"{a.kind.value} {int(a.page)}" for a in trace)
	return "".join(f"{line}\n" for line in out)


def write_trace(
	trace: ReferenceTrace, path: Union[str, Path], header: Optional[str] = None
) -> None:
	"""
	Write a trace file, replacing any existing file.

	:param trace: Trace to write.
	:type trace: ReferenceTrace
	:param path: Destination file.
	:type path: Union[str, Path]
	:param header: Text written as leading ``#`` comment lines. Optional.
	:type header: Optional[str]
	:raises OSError: Will raise if the file cannot be written.
	"""
	path = Path(path)
	with path.open("w", encoding="utf-8", newline="\n") as f:
		f.write(format_trace(trace, header))
	logger.debug(f"Wrote {len(trace)} references to {path}.")
