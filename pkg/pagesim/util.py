"""Utility functions for pagesim."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: util.py
#
# Utility functions for pagesim.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241118       Created                                        jrowley
#   20241120       Added counter bit helpers.                     jrowley
#
###############################################################################

from enum import Enum
from typing import Any


class FlexEnum(Enum):
	"""
	Enum with more flexible constructor.

	For an Enum ``Foo`` with a member ``BAR = "bar"``, the valid patterns would
	be:

	- ``Foo("bar") is Foo.BAR``
	- ``Foo(Foo.BAR) is Foo.BAR``

	FlexEnum adds two additional patterns, both case-insensitive:

	- ``Foo("BAR") is Foo.BAR``
	- ``Foo("Bar") is Foo.BAR``

	An unknown name or value raises ValueError.
	"""

	@classmethod
	def _missing_(cls, value: Any) -> "FlexEnum":
		"""
		Get a member of FlexEnum by name, as fallback to by value.

		:param value: FlexEnum member name or value, in any case.
		:type value: Any
		:raises ValueError: Will raise if nothing matches.
		"""
		if isinstance(value, str):
			key = value.strip()
			for member in cls:
				if key.upper() == member.name:
					return member
				value_text = member.value if isinstance(member.value, str) else None
				if value_text is not None and key.lower() == value_text.lower():
					return member
		raise ValueError(f"{value!r} is not a valid {cls.__name__}")


def leading_zero_bits(counter: int, width: int) -> int:
	"""
	Count leading zeros of a fixed-width counter.

	Counts consecutive 0 bits starting from the most significant of the
	``width`` bits, so ``leading_zero_bits(0b00011000, 8) == 3`` and an
	all-zero counter yields ``width``.

	:param counter: The counter value, ``0 <= counter < 2**width``.
	:type counter: int
	:param width: Counter width in bits, at least 1.
	:type width: int
	:return: Number of leading zero bits.
	:rtype: int
	:raises ValueError: Will raise if ``counter`` does not fit in ``width``
		bits.
	"""
	if width < 1:
		raise ValueError(f"Counter width must be at least 1, got {width}.")
	if counter < 0 or counter >= (1 << width):
		raise ValueError(f"Counter {counter} does not fit in {width} bits.")
	return width - counter.bit_length()


def format_counter(counter: int, width: int) -> str:
	"""Render a counter as a zero-padded binary string of ``width`` digits."""
	return format(counter, f"0{width}b")
