"""Demonstrate one-level and 3-level aging on the same trace."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: simulate_example.py
#
# Demonstrate one-level and 3-level aging on the same trace.
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241128       Created                                        jrowley
#
###############################################################################

from pagesim.constants import EXPERIMENT_TICK_PERIOD, PolicyId
from pagesim.engine import Simulation, simulate
from pagesim.metrics import format_summary, total_speed, total_volume
from pagesim.types import HierarchyConfig
from pagesim.workload import WorkloadSpec, generate_trace

FRAMES = 10
INDEXES = 100
REFS = 10_000
SEED = 20151201
SPEEDS = (1, 2, 3)
TICK = EXPERIMENT_TICK_PERIOD

trace = generate_trace(WorkloadSpec(INDEXES, REFS, SEED))

one_level = HierarchyConfig.single(FRAMES, tick_period=TICK)
three_level = HierarchyConfig.uniform(FRAMES, SPEEDS, tick_period=TICK)
print(
	f"3 levels: volume {total_volume(three_level.levels)} frames, "
	f"mean speed factor {total_speed(three_level.levels):g}"
)

baseline = simulate(one_level, PolicyId.AGING_1, trace, indexes=INDEXES, seed=SEED)
print(format_summary(baseline))
print()

# Step through manually to watch where pages settle.
sim = Simulation(three_level, PolicyId.AGING_N, trace, indexes=INDEXES, seed=SEED)
for access in trace[: REFS // 2]:
	sim.step(access)
print(f"occupancy after {REFS // 2} references: {sim.state.occupancy()}")
report = sim.run()
print(format_summary(report))
print()

gain = report.hit_miss_ratio / baseline.hit_miss_ratio
print(f"AGING_N / AGING_1 hit/miss ratio: {gain:.2f}")
