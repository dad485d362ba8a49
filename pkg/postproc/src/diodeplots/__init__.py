"""Static figure generation for sgdiode run directories.

Reads the solver's documented output files (moments.csv, potential.csv,
stats.csv, snapshots/, manifest.json) and regenerates the standard figure
set: moment-vs-position curves, phase-space color maps and run-comparison
curves. Never writes into a run directory.
"""

__version__ = "0.1.0"
