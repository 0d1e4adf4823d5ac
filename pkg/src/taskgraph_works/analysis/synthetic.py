"""Synthetic activity/occupation tables with a known wage gradient.

Each occupation gets a latent coordination level.  The six default
activities have importance and frequency ratings that rise with it, and log
wage is a linear function of the employment-weighted z-score of the resulting
index plus Gaussian noise.  With ``null=True`` wages ignore the index.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .index import DEFAULT_SUB_INDICES
from .stats import weighted_zscore

FILLER_ACTIVITIES = ("Handling and Moving Objects", "Operating Vehicles, Mechanized Devices, or Equipment")


@dataclass(frozen=True)
class SyntheticConfig:
    n: int = 500
    slope: float = 0.38
    noise: float = 0.15
    intercept: float = 3.0
    seed: int = 20240517
    null: bool = False
    covariates: bool = True


def write_synthetic(out_dir: str | Path, cfg: SyntheticConfig = SyntheticConfig(), *, stem: str = "synthetic") -> tuple[Path, Path]:
    """Write ``<stem>_activities.csv`` and ``<stem>_occupations.csv``; return both paths."""
    rng = np.random.default_rng(cfg.seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    codes = [f"{11 + i // 1000:02d}-{i % 1000:04d}.00" for i in range(cfg.n)]
    latent = rng.normal(size=cfg.n)
    employment = np.round(np.exp(rng.normal(9.0, 0.6, size=cfg.n)))

    act_rows = []
    intensity = np.zeros(cfg.n)
    for name in DEFAULT_SUB_INDICES:
        importance = np.clip(3.0 + 0.6 * latent + rng.normal(0, 0.3, cfg.n), 1.0, 5.0).round(2)
        frequency = np.clip(3.0 + 0.4 * latent + rng.normal(0, 0.3, cfg.n), 1.0, 5.0).round(2)
        intensity += importance * frequency
        act_rows.append((name, importance, frequency))
    for name in FILLER_ACTIVITIES:
        act_rows.append((name, rng.uniform(1, 5, cfg.n).round(2), rng.uniform(1, 5, cfg.n).round(2)))
    z = weighted_zscore(intensity / len(DEFAULT_SUB_INDICES), employment)

    signal = np.zeros(cfg.n) if cfg.null else cfg.slope * z
    ln_wage = cfg.intercept + signal + rng.normal(0, cfg.noise, cfg.n)
    wage = np.round(np.exp(ln_wage), 4)

    activities = out / f"{stem}_activities.csv"
    with open(activities, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["occupation_code", "activity_name", "importance", "frequency"])
        for i, code in enumerate(codes):
            for name, imp, freq in act_rows:
                w.writerow([code, name, f"{imp[i]:.2f}", f"{freq[i]:.2f}"])

    occupations = out / f"{stem}_occupations.csv"
    with open(occupations, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["occupation_code", "median_hourly_wage", "employment"]
        if cfg.covariates:
            header += ["education_years", "share_female"]
        w.writerow(header)
        for i, code in enumerate(codes):
            row = [code, f"{wage[i]:.4f}", f"{int(employment[i])}"]
            if cfg.covariates:
                edu = 12.0 + 1.5 * latent[i] + rng.normal(0, 1.0)
                female = float(np.clip(0.5 + rng.normal(0, 0.15), 0.0, 1.0))
                row += [f"{edu:.2f}", f"{female:.3f}"]
            w.writerow(row)
    return activities, occupations
