"""Simulator custom exception types."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: exceptions.py
#
# Simulator custom exception types.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241118       Created                                        jrowley
#
###############################################################################

from pathlib import Path
from typing import Optional, Union


class SimulatorError(Exception):
	"""Shared base class for this package's exceptions."""


class ConfigurationError(SimulatorError, ValueError):
	"""
	Exception thrown for an invalid simulation setup.

	Raised before any reference is processed: bad level shapes, workload
	parameters, or a policy paired with a hierarchy it cannot drive.

	:ivar field: Name of the offending parameter, if known.
	:type field: Optional[str]
	"""

	field: Optional[str]

	def __init__(self, message: str, field: Optional[str] = None) -> None:
		"""Create ConfigurationError instance."""
		self.field = field
		if field is not None:
			message = f"{field}: {message}"
		super(ValueError, self).__init__(message)


class TraceFormatError(SimulatorError, ValueError):
	"""
	Exception thrown when a trace file line cannot be parsed.

	:ivar line_number: 1-based line number of the bad line.
	:type line_number: int
	:ivar line: The offending line, without line ending.
	:type line: str
	:ivar path: The trace file, if reading from a file.
	:type path: Optional[Path]
	"""

	line_number: int
	line: str
	path: Optional[Path]

	def __init__(
		self,
		line_number: int,
		line: str,
		reason: str,
		path: Optional[Union[str, Path]] = None,
	) -> None:
		"""Create TraceFormatError instance."""
		self.line_number = line_number
		self.line = line
		self.path = None if path is None else Path(path)
		where = f"line {line_number}"
		if self.path is not None:
			where = f"{self.path}, {where}"
		message = f"Malformed trace ({where}): {reason}: {line!r}"
		super(ValueError, self).__init__(message)


class SimulationStateError(SimulatorError, RuntimeError):
	"""Exception thrown when simulator bookkeeping is violated (a bug)."""


class LogWriteError(SimulatorError):
	"""
	Exception thrown when the results log cannot be appended.

	:ivar path: The log file path.
	:type path: Path
	"""

	path: Path

	def __init__(self, path: Union[str, Path], cause: OSError) -> None:
		"""Create LogWriteError instance."""
		self.path = Path(path)
		message = f"Cannot append to results log {self.path}: {cause.strerror or cause}"
		super().__init__(message)
