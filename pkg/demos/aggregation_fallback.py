"""LTE + Wi-Fi carrier aggregation with a Wi-Fi outage.

The connection starts on LTE alone.  Wi-Fi appears at 10 s and MPTCP
spreads data over both paths; at 20 s Wi-Fi disappears and the connection
falls back to LTE without losing application data.
"""
from dcsim import run_scenario
from dcsim.scenarios import lte_wifi_aggregation

cfg = lte_wifi_aggregation()
report = run_scenario(cfg)

scale = 40 / max(s.aggregate_mbps for s in report.trace)
for s in report.trace[::2]:
    lte, wifi = s.throughput("lte"), s.throughput("wifi")
    bar = "#" * round(lte * scale) + "=" * round(wifi * scale)
    print(f"{s.t_s:5.1f}s {lte:6.2f} + {wifi:6.2f} Mbit/s  {bar}")

conn = report.simulation.conn
print(f"\nsegments lost in flight: {conn.segments_lost}, all retransmitted; "
      f"application gaps: {len(conn.reorder.skipped)}")
