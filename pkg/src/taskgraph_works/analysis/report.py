"""End-to-end coordination-index report from activity and occupation CSVs."""

from __future__ import annotations

import csv
import json
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import IoFailure
from .index import DEFAULT_SUB_INDICES, build_coordination_index
from .ingest import load_activities, load_occupations
from .plot import emit_scatter
from .stats import residualize, weighted_ols, weighted_pearson, weighted_zscore

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReportConfig:
    sub_index_names: Sequence[str] = DEFAULT_SUB_INDICES
    aliases: Mapping[str, str] = field(default_factory=dict)
    standardize_components: bool = False


@dataclass
class ReportBundle:
    codes: list[str]
    index: np.ndarray
    z_index: np.ndarray
    ln_wage: np.ndarray
    employment: np.ndarray
    correlations: list[dict]
    wage_slope: float
    effect_pct: float
    summary: dict
    files: dict[str, Path]


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(header)
            out.writerows(rows)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def run_report(
    activities_path: str | Path,
    occupations_path: str | Path,
    out_dir: str | Path,
    config: ReportConfig | None = None,
) -> ReportBundle:
    """Build the index, standardize it, and correlate it with wages and employment.

    Everything is weighted by employment.  Occupations with zero employment
    carry no weight and are dropped, since their log employment is undefined.
    When the occupation table has covariate columns, both sides are also
    residualized on them and the residuals correlated.
    """
    config = config or ReportConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    acts = load_activities(activities_path)
    occs = load_occupations(occupations_path)
    index = build_coordination_index(
        acts.records,
        config.sub_index_names,
        aliases=config.aliases,
        standardize_components=config.standardize_components,
    )
    by_code = {r.occupation_code: r for r in occs.records}
    covariate_names = list(occs.columns[3:])
    codes = sorted(c for c in index.values if c in by_code and by_code[c].employment > 0)
    dropped = sorted(c for c in index.values if c not in codes)
    if dropped:
        log.warning("%d indexed occupation(s) lack positive employment or an occupation row", len(dropped))

    raw = np.array([index.values[c] for c in codes])
    emp = np.array([by_code[c].employment for c in codes])
    wage = np.array([by_code[c].median_hourly_wage for c in codes])
    ln_wage = np.log(wage)
    ln_emp = np.log(emp)
    z = weighted_zscore(raw, emp)

    fit = weighted_ols(ln_wage, z, emp, add_intercept=True)
    slope = float(fit.coefficients[1])
    effect = 100.0 * (math.exp(slope) - 1.0)
    emp_slope = float(weighted_ols(ln_emp, z, emp, add_intercept=True).coefficients[1])

    correlations = [
        {"x": "z_index", "y": "ln_wage", "controls": "", "n": len(codes),
         "weighted_r": weighted_pearson(z, ln_wage, emp), "slope": slope},
        {"x": "z_index", "y": "ln_employment", "controls": "", "n": len(codes),
         "weighted_r": weighted_pearson(z, ln_emp, emp), "slope": emp_slope},
    ]
    if covariate_names:
        controls = np.array([[by_code[c].covariates[k] for k in covariate_names] for c in codes])
        rz = residualize(z, controls, emp)
        for name, target in (("ln_wage", ln_wage), ("ln_employment", ln_emp)):
            ry = residualize(target, controls, emp)
            correlations.append({
                "x": "z_index_resid", "y": f"{name}_resid", "controls": ";".join(covariate_names),
                "n": len(codes), "weighted_r": weighted_pearson(rz, ry, emp),
                "slope": float(weighted_ols(ry, rz, emp, add_intercept=True).coefficients[1]),
            })
    log.info("1sd of coordination intensity ~ %+.1f%% hourly wage (slope %.4f)", effect, slope)

    files = {}
    files["index"] = out / "index.csv"
    _write_csv(
        files["index"],
        ["occupation_code", "coordination_index", "z_index", "median_hourly_wage", "ln_wage", "employment",
         *covariate_names],
        [
            [c, _cell(raw[i]), _cell(z[i]), _cell(wage[i]), _cell(ln_wage[i]), _cell(emp[i]),
             *(_cell(float(by_code[c].covariates[k])) for k in covariate_names)]
            for i, c in enumerate(codes)
        ],
    )
    files["correlations"] = out / "correlations.csv"
    cols = ["x", "y", "controls", "n", "weighted_r", "slope"]
    _write_csv(files["correlations"], cols, [[_cell(row[k]) for k in cols] for row in correlations])
    files["scatter_wage"] = emit_scatter(
        z, ln_wage, emp, codes, out / "scatter_wage.svg",
        x_label="coordination intensity (z)", y_label="log median hourly wage",
    )
    files["scatter_employment"] = emit_scatter(
        z, ln_emp, emp, codes, out / "scatter_employment.svg",
        x_label="coordination intensity (z)", y_label="log employment",
    )

    summary = {
        "n_occupations": len(codes),
        "wage_slope_per_sd": slope,
        "wage_effect_pct_per_sd": effect,
        "employment_slope_per_sd": emp_slope,
        "correlations": correlations,
        "excluded": {
            "incomplete_index": {k: list(v) for k, v in index.incomplete.items()},
            "no_employment_match": dropped,
        },
        "row_errors": {
            "activities": [[e.line, e.message] for e in acts.errors],
            "occupations": [[e.line, e.message] for e in occs.errors],
        },
    }
    files["report"] = out / "report.json"
    try:
        files["report"].write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {files['report']}: {exc}") from exc
    return ReportBundle(codes, raw, z, ln_wage, emp, correlations, slope, effect, summary, files)
