"""Plot mean hit/miss ratio per policy from a sweep CSV."""
###############################################################################
# Project: N-Level Page Replacement Simulator
# File: plot_sweep.py
#
# Plot mean hit/miss ratio per policy from a sweep CSV.
#
# Usage: python scripts/plot_sweep.py sweep.csv
#
# Needs the "plot" extra (matplotlib).
#
# Copyright (c) 2024 Marcus Engineering, LLC (MIT Licensed)
#
#   Date      SCR  Comment                                        Eng
# -----------------------------------------------------------------------------
#   20241128       Created                                        jrowley
#
###############################################################################

import csv
from pathlib import Path
import sys

import matplotlib.pyplot as plt
import numpy as np

if len(sys.argv) != 2:
	print("Usage: plot_sweep.py <sweep.csv>")
	exit(-1)

CSV_PATH = Path(sys.argv[1])

with CSV_PATH.open("r", encoding="utf-8", newline="") as f:
	rows = [r for r in csv.DictReader(f) if r["status"] == "aggregate"]
if not rows:
	print(f"No aggregate rows in {CSV_PATH}.")
	exit(-1)

axis = rows[0]["axis"]
for policy in dict.fromkeys(r["policy"] for r in rows):
	mine = [r for r in rows if r["policy"] == policy]
	x = np.array([int(r["axis_value"]) for r in mine])
	y = np.array([float(r["hit_miss_ratio"]) for r in mine])
	err = np.array([float(r["ratio_stddev"]) for r in mine])
	plt.errorbar(x, y, yerr=err, marker="o", capsize=3, label=policy)

if max(int(r["axis_value"]) for r in rows) >= 10_000:
	plt.xscale("log")
plt.xlabel(axis)
plt.ylabel("hit/miss ratio")
plt.title(CSV_PATH.name)
plt.legend()
plt.show()
