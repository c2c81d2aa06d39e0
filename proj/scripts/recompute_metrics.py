#!/usr/bin/env python3
"""Recompute every scalar in a seed directory's metrics.json from the raw
run artifacts (requests_final.csv, traversals.csv, links_meta.csv,
events.csv, carrier summaries) and compare against the reported values.

Usage: recompute_metrics.py SEED_DIR [SEED_DIR ...]

Exits non-zero if any scalar differs by more than the tolerance. Summation
follows the artifact file order so results agree with the simulator to
floating-point equality, but a 1e-9 relative tolerance is allowed anyway.
"""

import csv
import json
import math
import os
import sys

DAY = 86400.0
TOL = 1e-9

KINDS = {"SINGLE": "single", "SHARED": "shared", "PARCEL": "parcel"}


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def recompute(seed_dir):
    meta = json.load(open(os.path.join(seed_dir, "run_meta.json")))
    fleet = int(meta["fleet_size"])
    am, pm, mid = meta["am_peak"], meta["pm_peak"], meta["midday"]
    periods = [
        ("am", [tuple(am)]),
        ("midday", [tuple(mid)]),
        ("pm", [tuple(pm)]),
        ("peak", [tuple(am), tuple(pm)]),
        ("daily", [(0.0, DAY)]),
    ]

    def contains(windows, t):
        return any(lo <= t < hi for lo, hi in windows)

    s = {}
    requests = read_csv(os.path.join(seed_dir, "requests_final.csv"))

    for k in ("single", "shared", "parcel"):
        for p in ("total", "served", "failed", "pending"):
            s[f"{p}_{k}"] = 0.0
    for r in requests:
        k = KINDS[r["kind"]]
        s[f"total_{k}"] += 1
        if r["state"] == "COMPLETED":
            s[f"served_{k}"] += 1
        elif r["state"] == "FAILED":
            s[f"failed_{k}"] += 1
        else:
            s[f"pending_{k}"] += 1
    for p in ("total", "served", "failed", "pending"):
        s[f"{p}_passenger"] = s[f"{p}_single"] + s[f"{p}_shared"]
    s["demand_served_total"] = s["served_passenger"] + s["served_parcel"]

    for k in ("single", "shared", "parcel"):
        for name, windows in periods:
            wait_sum = travel_sum = 0.0
            n = 0
            for r in requests:
                if KINDS[r["kind"]] != k or r["state"] != "COMPLETED":
                    continue
                if not contains(windows, float(r["request_time_s"])):
                    continue
                wait_sum += float(r["t_pickup"]) - float(r["request_time_s"])
                travel_sum += float(r["t_dropoff"]) - float(r["t_pickup"])
                n += 1
            if n > 0:
                s[f"mean_wait_s_{k}_{name}"] = wait_sum / n
                s[f"mean_travel_s_{k}_{name}"] = travel_sum / n

    links = {}
    for row in read_csv(os.path.join(seed_dir, "links_meta.csv")):
        links[row["link_id"]] = (float(row["length_m"]), float(row["fft_s"]))
    dist_sum = time_sum = tti_w = tti_wt = tti_wp = tti_wtp = 0.0
    peak_windows = [tuple(am), tuple(pm)]
    for tr in read_csv(os.path.join(seed_dir, "traversals.csv")):
        length, fft = links[tr["link_id"]]
        entry, exit_ = float(tr["t_entry"]), float(tr["t_exit"])
        dt = exit_ - entry
        dist_sum += length
        time_sum += dt
        tti_w += length
        tti_wt += length * (dt / fft)
        if contains(peak_windows, entry):
            tti_wp += length
            tti_wtp += length * (dt / fft)
    s["mod_distance_km"] = dist_sum / 1000.0
    s["mod_vht_h"] = time_sum / 3600.0
    s["tti_weighted_daily"] = tti_wt / tti_w if tti_w > 0 else 1.0
    s["tti_weighted_peak"] = tti_wtp / tti_wp if tti_wp > 0 else 1.0
    s["total_vkt_km"] = s["mod_distance_km"]
    s["total_vht_h"] = s["mod_vht_h"]

    spans = [[] for _ in range(fleet)]
    open_at = [None] * fleet
    for ev in read_csv(os.path.join(seed_dir, "events.csv")):
        v = int(ev["vehicle_id"])
        if ev["event"] == "DEPART":
            open_at[v] = float(ev["t"])
        elif ev["event"] == "PARK" and open_at[v] is not None:
            spans[v].append((open_at[v], float(ev["t"])))
            open_at[v] = None
    for v in range(fleet):
        if open_at[v] is not None:
            spans[v].append((open_at[v], math.inf))
    for name, windows in periods:
        busy = samples = 0
        for lo, hi in windows:
            t = lo
            while t < hi:
                samples += 1
                for v in range(fleet):
                    if contains(spans[v], t):
                        busy += 1
                t += 60.0
        if samples > 0:
            s[f"utilization_{name}"] = busy / (fleet * samples)

    summary = os.path.join(seed_dir, "carrier_summary.csv")
    if os.path.exists(summary):
        def carrier(path):
            h = km = 0.0
            n = 0
            for row in read_csv(path):
                h += float(row["total_time_s"]) / 3600.0
                km += float(row["total_distance_m"]) / 1000.0
                n += 1
            return h, km, n

        h, km, n = carrier(summary)
        s["carrier_driving_h"] = h
        s["carrier_vkt_km"] = km
        s["carrier_trips"] = float(n)
        bh, bkm, bn = carrier(
            os.path.join(os.path.dirname(os.path.abspath(seed_dir)),
                         "carrier_baseline_summary.csv"))
        s["carrier_baseline_driving_h"] = bh
        s["carrier_baseline_vkt_km"] = bkm
        s["carrier_baseline_trips"] = float(bn)
        s["total_vkt_km"] = s["mod_distance_km"] + km
        s["total_vht_h"] = s["mod_vht_h"] + h
    return s


def close(a, b):
    return abs(a - b) <= TOL * max(1.0, abs(a), abs(b))


def main():
    if len(sys.argv) < 2:
        print(__doc__)
        return 2
    bad = 0
    for seed_dir in sys.argv[1:]:
        reported = json.load(open(os.path.join(seed_dir, "metrics.json")))["scalars"]
        computed = recompute(seed_dir)
        keys = sorted(set(reported) | set(computed))
        for k in keys:
            if k not in computed:
                print(f"{seed_dir}: {k}: in metrics.json but not recomputable")
                bad += 1
            elif k not in reported:
                print(f"{seed_dir}: {k}: recomputed but missing from metrics.json")
                bad += 1
            elif not close(reported[k], computed[k]):
                print(f"{seed_dir}: {k}: reported {reported[k]!r} != recomputed {computed[k]!r}")
                bad += 1
        print(f"{seed_dir}: {len(keys)} scalars checked")
    if bad:
        print(f"FAIL: {bad} mismatches")
        return 1
    print("OK")
    return 0


if __name__ == "__main__":
    sys.exit(main())
