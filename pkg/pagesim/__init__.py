"""N-level page replacement simulator."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: __init__.py
#
# N-level page replacement simulator.
#
# Simulates classic one-level replacement algorithms (FIFO, second chance,
# clock, NRU, LRU, NFU, aging and the offline optimum) next to their N-level
# counterparts, which cascade evicted pages into slower storage class memory
# levels instead of dropping them straight to the backing store.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241118       Created                                        jrowley
#
###############################################################################
