"""Where should MPTCP terminate in EN-DC?

With the MPTCP proxy at the serving gateway, a secondary-node change looks
like a handover to the core: the SN sub-flow stops for an interruption
period.  With the proxy in the anchor eNB, the anchor re-steers the SN leg
itself and the change is invisible.  The price of the latter is a proxy in
every anchor node; the sketch below only shows the throughput side.
"""
from dcsim import run_scenario
from dcsim.scenarios import sn_change

for t_interrupt in (50.0, 1500.0):
    for term in ("AtSGW", "AtMN"):
        report = run_scenario(sn_change(term, t_interrupt))
        sid = report.simulation.conn.sn_subflow().id
        around = [s for s in report.trace if 9.5 < s.t_s <= 12.0]
        series = " ".join(f"{s.throughput(sid):5.1f}" for s in around)
        applied = report.totals["sn_interruptions_ms"][0]
        print(f"T_interrupt {t_interrupt:6.0f} ms, {term:5}: applied {applied:6.1f} ms | SN Mbit/s {series}")
