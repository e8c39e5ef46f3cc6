"""How much does a second path buy?

One path that is up 90% of the time is down for 1 hour in 10.  Two such
paths carrying the same data are down only when both are, 1 hour in 100.
This script prints the closed form next to a Monte-Carlo estimate from a
Duplicate-mode run in which both radio links fail as independent renewal
processes.

    python demos/availability_curve.py [simulated seconds per point]
"""
import sys

from dcsim import run_availability_sweep
from dcsim.scenarios import SWEEP_POINTS

duration = float(sys.argv[1]) if len(sys.argv) > 1 else 2.0e4

rows = run_availability_sweep(SWEEP_POINTS, duration_s=duration)

print(f"{'uptime':>7} {'downtime':>8} | {'one path':>8} {'two paths':>9} {'simulated':>9}")
for r in rows:
    print(f"{r.psi_s:6.1f}s {r.gamma_s:7.1f}s | {r.theta_single:8.4f} {r.theta_dc_analytic:9.4f} "
          f"{r.theta_dc_empirical:9.4f}")

# the gain is largest where a single path is weakest
gain = [(r.theta_dc_analytic - r.theta_single) for r in rows]
print(f"\nabsolute gain ranges from {min(gain):.4f} to {max(gain):.4f}")
