"""Backup mode over two WLAN accesses.

WiGig is the regular path and Wi-Fi the standby.  Wi-Fi stays idle until
WiGig fails at 10 s, carries the connection while WiGig is gone, then goes
idle again once WiGig is back at 20 s.
"""
from dcsim import run_scenario
from dcsim.scenarios import wigig_wifi_backup

report = run_scenario(wigig_wifi_backup())

print(" time   WiGig   Wi-Fi  active")
for s in report.trace:
    if 9.0 <= s.t_s <= 11.0 or 19.5 <= s.t_s <= 21.5:
        print(f"{s.t_s:5.1f}s {s.throughput('wigig'):6.2f} {s.throughput('wifi'):6.2f}  "
              f"{','.join(s.active_subflows)}")

wifi_total = sum(s.throughput("wifi") for s in report.trace) * 0.5 / 8
print(f"\nWi-Fi carried {wifi_total:.1f} MB, almost all of it during the WiGig outage")
