#!/usr/bin/env python3
"""Regenerates the bundled synthetic scenario under scenarios/demo/.

48 hours at 5-minute ticks, 16 VMs on 4 hosts, with demand oscillations
that keep the fleet contended under low frequency caps. All pseudo-noise
is deterministic so the files are reproducible byte for byte.
"""
import math
import os

BASE = os.path.join(os.path.dirname(__file__), "..", "scenarios", "demo")
T0 = 1614556800  # 2021-03-01T00:00:00Z, midnight and ISP-aligned
TICK = 300
HOURS = 48
N_VMS = 16


def wobble(i, k):
    # cheap deterministic pseudo-noise in [-1, 1]
    return math.sin(12.9898 * (i * 31 + k) + 78.233) * math.cos(0.45 * i + k)


def main():
    os.makedirs(BASE, exist_ok=True)
    ticks = HOURS * 3600 // TICK

    with open(os.path.join(BASE, "trace.csv"), "w") as f:
        f.write("timestamp,vm_id,cpu_demand_mhz,memory_mb\n")
        for i in range(ticks):
            t = T0 + i * TICK
            hours = i * TICK / 3600.0
            for v in range(N_VMS):
                base = 4000 + 1500 * math.sin(2 * math.pi * hours / 8.0 + 0.15 * v)
                daily = 450 * math.sin(2 * math.pi * hours / 24.0 + 0.1 * v)
                noise = 420 * wobble(i, v)
                demand = max(200.0, base + daily + noise)
                f.write(f"{t},vm{v:02d},{demand:.1f},2048\n")

    with open(os.path.join(BASE, "pstates.csv"), "w") as f:
        f.write("index,frequency_mhz,voltage_v,power_w\n")
        freqs = [3000, 2600, 2200, 1800, 1400, 1000]
        volts = [1.20, 1.10, 1.02, 0.95, 0.88, 0.80]
        watts = [95, 85, 75, 65, 55, 45]
        for i, (fr, vo, wa) in enumerate(zip(freqs, volts, watts)):
            f.write(f"{i},{fr},{vo:.2f},{wa}\n")

    def iso(t):
        days, rem = divmod(t, 86400)
        # civil-from-days for the fixed epoch range we use
        import datetime

        d = datetime.datetime(1970, 1, 1, tzinfo=datetime.timezone.utc) + datetime.timedelta(
            seconds=t
        )
        return d.strftime("%Y-%m-%dT%H:%M:%S+00:00")

    spot = []
    with open(os.path.join(BASE, "spot.csv"), "w") as f:
        f.write("hour_start_iso8601,price_eur_mwh\n")
        for h in range(HOURS):
            t = T0 + h * 3600
            price = 45 + 25 * math.sin(2 * math.pi * h / 24.0 - 1.0) + 5 * wobble(h, 99)
            spot.append(price)
            f.write(f"{iso(t)},{price:.2f}\n")

    with open(os.path.join(BASE, "imbalance.csv"), "w") as f:
        f.write("isp_start_iso8601,shortage_eur_mwh,surplus_eur_mwh,regulation_state\n")
        for k in range(HOURS * 4):
            t = T0 + k * 900
            s = spot[k // 4]
            swing = 90 * math.sin(2 * math.pi * k / 36.0 + 0.5) + 40 * wobble(k, 7)
            shortage = s + swing
            if k % 23 == 0:
                shortage = -abs(shortage) - 5  # occasional negative imbalance price
            surplus = shortage - 8
            reg = [-1, 0, 1, 2][k % 4]
            f.write(f"{iso(t)},{shortage:.2f},{surplus:.2f},{reg}\n")


if __name__ == "__main__":
    main()
