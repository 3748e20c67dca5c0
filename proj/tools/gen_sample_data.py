#!/usr/bin/env python3
"""Writes the deterministic sample dataset under data/sample."""
import csv
import datetime as dt
import math
import random
import sys
from pathlib import Path

REGIONS = [
    ("IN", "India", "nation", ""),
    ("IN-DL", "Delhi", "state", "IN"),
    ("IN-KL", "Kerala", "state", "IN"),
    ("IN-KL-EKM", "Ernakulam", "district", "IN-KL"),
    ("IN-KL-TVM", "Thiruvananthapuram", "district", "IN-KL"),
    ("IN-MH", "Maharashtra", "state", "IN"),
]

POPULATION = {
    "IN": 1210854977,
    "IN-DL": 16787941,
    "IN-KL": 33406061,
    "IN-KL-EKM": 3282388,
    "IN-KL-TVM": 3301427,
    "IN-MH": 112374333,
}

ALIASES = [
    ("Bharat", "IN"),
    ("NCT of Delhi", "IN-DL"),
    ("New Delhi", "IN-DL"),
    ("Keralam", "IN-KL"),
    ("Cochin", "IN-KL-EKM"),
    ("Trivandrum", "IN-KL-TVM"),
    ("Bombay State", "IN-MH"),
]

# Reported leaf regions: (first wave height, peak day, width, second wave height, peak day, width).
WAVES = {
    "IN-DL": (4000, 90, 25, 6000, 250, 20),
    "IN-KL-EKM": (800, 170, 30, 1500, 300, 25),
    "IN-KL-TVM": (700, 180, 30, 1200, 310, 25),
    "IN-MH": (20000, 200, 35, 40000, 385, 20),
}

START = dt.date(2020, 3, 1)
DAYS = 400


def poisson(rng, lam):
    if lam <= 0:
        return 0
    if lam > 50:
        return max(0, round(rng.gauss(lam, math.sqrt(lam))))
    limit, k, p = math.exp(-lam), 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20210213)
    with open(out / "region_registry.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["region_code", "name", "level", "parent_code"])
        w.writerows(REGIONS)
    with open(out / "population.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["region_code", "name", "population"])
        for code, name, _, _ in REGIONS:
            w.writerow([code, name, POPULATION[code]])
    with open(out / "aliases.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["alias", "region_code"])
        w.writerows(ALIASES)
    with open(out / "daily_cases.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["date", "region_code", "confirmed", "recovered", "deceased", "tested"])
        for t in range(DAYS):
            day = (START + dt.timedelta(days=t)).isoformat()
            for code, (a1, p1, s1, a2, p2, s2) in WAVES.items():
                lam = a1 * math.exp(-((t - p1) ** 2) / (2 * s1 * s1)) + a2 * math.exp(-((t - p2) ** 2) / (2 * s2 * s2)) + 1
                confirmed = poisson(rng, lam)
                recovered = poisson(rng, 0.97 * lam) if t >= 14 else 0
                deceased = poisson(rng, 0.013 * lam)
                tested = poisson(rng, 12 * lam + 200)
                w.writerow([day, code, confirmed, recovered, deceased, tested])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/sample")
