"""Replicated simulate-ingest-estimate experiments with median/MAD summaries.

Each replication draws one path with a seed derived from (master seed,
replication index), so results are identical for any parallelism degree and
merge deterministically by index.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .estimator import LagGrid, estimate_levels, hry_lag
from .filters import base_filter, cascade_length
from .ingest import returns_from_sample
from .model import ObservationScheme, SpectralModel, load_model
from .simulate import CirculantEmbedding, build_embedding, circulant_embed_sample

SUMMARY_SCHEMA_VERSION = 1

DEFAULT_FAMILIES = ("haar", "la8", "la20")


@dataclass(frozen=True)
class MCConfig:
    """Design of one Monte Carlo experiment."""

    model: SpectralModel
    scheme: ObservationScheme
    families: tuple[str, ...] = DEFAULT_FAMILIES
    j_max: int = 8
    grid_half_width: int = 60
    replications: int = 200
    master_seed: int = 0
    include_hry: bool = True
    threads: int = 1
    sim_max_lag: int | None = None

    def __post_init__(self):
        if self.replications < 1:
            raise DataError(f"need at least one replication, got {self.replications}")
        if self.threads < 1:
            raise DataError(f"thread count must be >= 1, got {self.threads}")
        for family in self.families:
            length = cascade_length(base_filter(family).length, self.j_max)
            if length + self.grid_half_width > self.scheme.n:
                raise DataError(
                    f"{family} at level {self.j_max} with grid half-width "
                    f"{self.grid_half_width} needs {length + self.grid_half_width} "
                    f"samples but n={self.scheme.n}"
                )
        for c in self.model.components:
            if abs(c.lag_steps) > self.grid_half_width:
                raise DataError(
                    f"model lag {c.lag_steps} steps at level {c.level} lies "
                    f"outside the search grid +-{self.grid_half_width}"
                )


@dataclass(frozen=True)
class MCSummary:
    """Lower median and MAD of the per-replication lag estimates."""

    families: tuple[str, ...]
    j_max: int
    replications: int
    failures: int
    valid: bool
    medians: dict = field(default_factory=dict)  # family -> tuple over j
    mads: dict = field(default_factory=dict)
    hry_median: float | None = None
    hry_mad: float | None = None


def lower_median(values) -> float:
    """Median that stays on the sample grid: element (R-1)//2 of the sorted
    values, which is the usual median for odd counts and the lower of the
    two middle values for even counts."""
    vals = sorted(values)
    if not vals:
        raise DataError("median of an empty collection")
    return float(vals[(len(vals) - 1) // 2])


def median_abs_deviation(values) -> float:
    """Lower median of absolute deviations from the lower median."""
    center = lower_median(values)
    return lower_median(abs(v - center) for v in values)


def summarize(
    lags_by_family: dict,
    hry_lags=None,
    *,
    families=None,
    j_max: int | None = None,
    replications: int | None = None,
    failures: int = 0,
) -> MCSummary:
    """Aggregate per-replication lag estimates into medians and MADs.

    ``lags_by_family`` maps family -> list of per-replication lag vectors
    (one integer per level).
    """
    if families is None:
        families = tuple(lags_by_family)
    counts = [len(v) for v in lags_by_family.values()]
    if hry_lags is not None:
        counts.append(len(hry_lags))
    if not counts or min(counts) == 0:
        raise DataError("no replications to summarize")
    if replications is None:
        replications = max(counts) + failures
    if j_max is None:
        j_max = len(next(iter(lags_by_family.values()))[0])
    medians, mads = {}, {}
    for family in families:
        per_rep = np.asarray(lags_by_family[family])
        medians[family] = tuple(
            lower_median(per_rep[:, j]) for j in range(per_rep.shape[1])
        )
        mads[family] = tuple(
            median_abs_deviation(per_rep[:, j]) for j in range(per_rep.shape[1])
        )
    hry_med = hry_mad = None
    if hry_lags is not None:
        hry_med = lower_median(hry_lags)
        hry_mad = median_abs_deviation(hry_lags)
    return MCSummary(
        families=tuple(families),
        j_max=j_max,
        replications=replications,
        failures=failures,
        valid=failures <= 0.05 * replications,
        medians=medians,
        mads=mads,
        hry_median=hry_med,
        hry_mad=hry_mad,
    )


def replication_seeds(master_seed: int, count: int) -> list[int]:
    """One 64-bit seed per replication, derived from the master seed."""
    state = np.random.SeedSequence(master_seed).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


def run_replication(
    model: SpectralModel,
    scheme: ObservationScheme,
    families,
    j_max: int,
    grid: LagGrid,
    include_hry: bool,
    seed: int,
    embedding: CirculantEmbedding | None = None,
) -> dict:
    """One simulate-ingest-estimate pass; returns lags per family (+ 'hry')."""
    sample = circulant_embed_sample(model, scheme, seed, embedding=embedding)
    ret1, ret2 = returns_from_sample(sample, scheme)
    out = {}
    for family in families:
        results = estimate_levels(ret1, ret2, family, j_max, grid)
        out[family] = [est.lag for _, est in results]
    if include_hry:
        out["hry"] = hry_lag(ret1, ret2, grid).lag
    return out


_WORKER: dict = {}


def _init_worker(model, scheme, families, j_max, half_width, include_hry, sim_max_lag):
    _WORKER["args"] = (model, scheme, families, j_max, half_width, include_hry)
    _WORKER["embedding"] = build_embedding(model, scheme, max_lag=sim_max_lag)


def _run_worker(seed: int):
    model, scheme, families, j_max, half_width, include_hry = _WORKER["args"]
    grid = LagGrid.symmetric(half_width)
    try:
        return run_replication(
            model, scheme, families, j_max, grid, include_hry, seed,
            embedding=_WORKER["embedding"],
        )
    except Exception as exc:  # noqa: BLE001 - failures recorded, not fatal
        return {"error": f"{type(exc).__name__}: {exc}"}


def run_mc(config: MCConfig) -> MCSummary:
    """Run the replicated experiment described by ``config``."""
    seeds = replication_seeds(config.master_seed, config.replications)
    grid = LagGrid.symmetric(config.grid_half_width)
    results = []
    if config.threads > 1:
        with ProcessPoolExecutor(
            max_workers=config.threads,
            initializer=_init_worker,
            initargs=(
                config.model,
                config.scheme,
                config.families,
                config.j_max,
                config.grid_half_width,
                config.include_hry,
                config.sim_max_lag,
            ),
        ) as pool:
            results = list(pool.map(_run_worker, seeds, chunksize=8))
    else:
        embedding = build_embedding(config.model, config.scheme, max_lag=config.sim_max_lag)
        for seed in seeds:
            try:
                results.append(
                    run_replication(
                        config.model,
                        config.scheme,
                        config.families,
                        config.j_max,
                        grid,
                        config.include_hry,
                        seed,
                        embedding=embedding,
                    )
                )
            except Exception as exc:  # noqa: BLE001
                results.append({"error": f"{type(exc).__name__}: {exc}"})

    lags_by_family = {family: [] for family in config.families}
    hry_lags = [] if config.include_hry else None
    failures = 0
    for res in results:
        if "error" in res:
            failures += 1
            continue
        for family in config.families:
            lags_by_family[family].append(res[family])
        if config.include_hry:
            hry_lags.append(res["hry"])
    if failures == config.replications:
        raise DataError("every replication failed")
    return summarize(
        lags_by_family,
        hry_lags,
        families=config.families,
        j_max=config.j_max,
        replications=config.replications,
        failures=failures,
    )


def load_mc_config(source, **overrides) -> MCConfig:
    """Build an MCConfig from a JSON file path or dict.

    Recognized fields: model (inline object) or model_path, families, j_max,
    l_max, replications, master_seed, include_hry, sim_max_lag. Keyword
    overrides (reps, seed, threads, ...) take precedence when not None.
    """
    if isinstance(source, (str, bytes)):
        try:
            with open(source, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read MC config: {exc}") from exc
    else:
        raw = dict(source)
    if "model" in raw:
        model, scheme = load_model(raw["model"])
    elif "model_path" in raw:
        model, scheme = load_model(raw["model_path"])
    else:
        raise DataError("MC config needs 'model' or 'model_path'")

    def pick(key, default):
        value = overrides.get(key)
        return default if value is None else value

    return MCConfig(
        model=model,
        scheme=scheme,
        families=tuple(raw.get("families", DEFAULT_FAMILIES)),
        j_max=int(raw.get("j_max", 8)),
        grid_half_width=int(raw.get("l_max", 60)),
        replications=int(pick("replications", raw.get("replications", 200))),
        master_seed=int(pick("master_seed", raw.get("master_seed", 0))),
        include_hry=bool(raw.get("include_hry", True)),
        threads=int(pick("threads", raw.get("threads", 1))),
        sim_max_lag=raw.get("sim_max_lag"),
    )


def write_summary_csv(summary: MCSummary, fh) -> None:
    """Table-style CSV: one median and one MAD row per family, columns by
    level, plus a single-valued baseline row replicated across columns."""
    fh.write(f"# leadlag-mc-summary schema_version={SUMMARY_SCHEMA_VERSION}\n")
    cols = ",".join(f"j{j}" for j in range(1, summary.j_max + 1))
    fh.write(f"family,statistic,{cols}\n")
    for family in summary.families:
        med = ",".join(f"{v:g}" for v in summary.medians[family])
        mad = ",".join(f"{v:g}" for v in summary.mads[family])
        fh.write(f"{family},median,{med}\n")
        fh.write(f"{family},mad,{mad}\n")
    if summary.hry_median is not None:
        med = ",".join(f"{summary.hry_median:g}" for _ in range(summary.j_max))
        mad = ",".join(f"{summary.hry_mad:g}" for _ in range(summary.j_max))
        fh.write(f"hry,median,{med}\n")
        fh.write(f"hry,mad,{mad}\n")
