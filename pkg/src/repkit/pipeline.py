"""Pipeline orchestration: chained reversible stages, coders, significance, verdicts.

A pipeline is an ordered list of stage specs.  Each stage applies one
reversible transform, records what it did (enough to replay bit-identically),
and -- whenever the stage output is a discrete symbol or bit stream -- runs
the configured coders against it.  Observed compression rates get empirical
p-values against a Monte-Carlo null of i.i.d. uniform series matched in
length and alphabet width.

The final discrete stage decides the verdict:

* REGULAR            -- some coder is significant AND its rate clears the
                        regular-rate threshold.
* RANDOM-IN-PRACTICE -- nothing significant, or only weak significant rates
                        (annotated).  The report wording notes that
                        theoretical compressibility stays undecidable.

"RANDOM-INCOMPRESSIBLE" is never asserted; when every coder sits at p >= 0.5
the report annotates the result as consistent with an incompressible source.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__ as _pkg_version
from .bits import BitSequence, SymbolSeries, bits_to_symbols, duplicate_each_bit
from .bits import symbols_to_bits, symbols_to_packed_bytes, take_every_kth
from .codecs import ALL_CODERS, compress
from .discretize import (
    DiscretizationRecord,
    empirical_quantile_discretize,
    equal_width_bins,
    normal_quantile_bounds,
    discretize_with_bounds,
    progressive_discretize,
)
from .errors import DataError, PipelineError, SizeError
from .generators import uniform_symbols
from .rng import derive_seed
from .series import IntegerSeries, PriceSeries, ReturnSeries, affine_shift, first_difference, log_returns
from .stats import run_test

DEFAULT_TRIALS = 199
DEFAULT_SIGNIFICANCE = 0.05
DEFAULT_REGULAR_THRESHOLD = 0.05

VERDICT_REGULAR = "REGULAR"
VERDICT_RANDOM_IN_PRACTICE = "RANDOM-IN-PRACTICE"
VERDICT_RANDOM_INCOMPRESSIBLE = "RANDOM-INCOMPRESSIBLE"  # displayed only, never asserted


@dataclass(frozen=True)
class StageSpec:
    """One transform application: name plus its parameters."""

    transform: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NullDistribution:
    """Compression rates of one coder on i.i.d. uniform symbol series."""

    coder_id: str
    length: int
    width: int
    trials: int
    rates: np.ndarray  # sorted ascending
    seed: int

    def to_json(self) -> dict:
        return {
            "coder_id": self.coder_id,
            "length": self.length,
            "width": self.width,
            "trials": self.trials,
            "seed": self.seed,
            "rates": [float(r) for r in self.rates],
        }


def mc_null_distribution(
    coder: str, length: int, width: int, trials: int = DEFAULT_TRIALS, seed: int = 0
) -> NullDistribution:
    """Rates of ``coder`` on ``trials`` i.i.d. uniform series of the given shape.

    Trials run on independently derived child seeds, so results do not depend
    on evaluation order.
    """
    if trials < 100:
        raise SizeError("null distributions need at least 100 trials")
    if length < 1:
        raise SizeError("null series length must be positive")
    rates = np.empty(trials, dtype=np.float64)
    for i in range(trials):
        series = uniform_symbols(length, width, derive_seed(seed, i))
        _, outcome = compress(series, coder)
        rates[i] = outcome.rate
    rates.sort()
    return NullDistribution(coder, length, width, trials, rates, seed)


_null_cache: dict[tuple, NullDistribution] = {}


def cached_null_distribution(
    coder: str, length: int, width: int, trials: int, seed: int
) -> NullDistribution:
    key = (coder, length, width, trials, seed)
    if key not in _null_cache:
        _null_cache[key] = mc_null_distribution(coder, length, width, trials, seed)
    return _null_cache[key]


def empirical_p_value(observed_rate: float, null: NullDistribution) -> float:
    """(1 + #{null rates >= observed}) / (trials + 1); always in (0, 1]."""
    greater_equal = int(np.sum(null.rates >= observed_rate))
    return (1 + greater_equal) / (null.trials + 1)


# -- stage machinery -------------------------------------------------------------


def _kind(value) -> str:
    if isinstance(value, PriceSeries):
        return "prices"
    if isinstance(value, ReturnSeries):
        return "returns"
    if isinstance(value, IntegerSeries):
        return "integers"
    if isinstance(value, SymbolSeries):
        return "symbols"
    if isinstance(value, BitSequence):
        return "bits"
    raise DataError(f"unsupported pipeline value {type(value).__name__}")


def _apply_stage(value, spec: StageSpec):
    """Apply one transform; returns (new value, provenance record dict)."""
    name = spec.transform
    p = spec.params
    if name == "log_returns":
        out = log_returns(value)
        return out, {"initial_price": float(value.values[0])}
    if name == "first_difference":
        out = first_difference(value)
        return out, {"initial_value": float(np.asarray(value.values)[0])}
    if name == "affine_shift":
        return affine_shift(value, p["offset"]), {"offset": int(p["offset"])}
    if name == "as_symbols":
        width = int(p["width"])
        return SymbolSeries(value.values, width), {"width": width}
    if name == "equal_width":
        width = int(p["width"])
        symbols, bounds = equal_width_bins(value, width)
        return symbols, {
            "record": DiscretizationRecord("equal_width", width),
            "min": float(bounds.bounds[0]),
            "max": float(bounds.bounds[-1]),
        }
    if name == "normal_quantile":
        width = int(p["width"])
        symbols = discretize_with_bounds(value, normal_quantile_bounds(width))
        return symbols, {"record": DiscretizationRecord("normal_quantile", width)}
    if name == "empirical_quantile":
        width = int(p["width"])
        symbols = empirical_quantile_discretize(value, width)
        return symbols, {"record": DiscretizationRecord("empirical_quantile", width)}
    if name == "progressive":
        width = int(p["width"])
        window = int(p["window"])
        symbols = progressive_discretize(value, window, width)
        return symbols, {"record": DiscretizationRecord("progressive", width, window=window)}
    if name == "symbols_to_bits":
        return symbols_to_bits(value), {"width": value.width}
    if name == "bits_to_symbols":
        width = int(p["width"])
        return bits_to_symbols(value, width), {"width": width}
    if name == "take_every_kth":
        k = int(p["k"])
        offset = int(p.get("offset", 0))
        return take_every_kth(value, k, offset), {"k": k, "offset": offset}
    if name == "duplicate_each_bit":
        k = int(p["k"])
        return duplicate_each_bit(value, k), {"k": k}
    raise DataError(f"unknown transform {name!r}")


def _fingerprint(value) -> str:
    kind = _kind(value)
    h = hashlib.sha256()
    h.update(kind.encode())
    if kind in ("prices", "returns"):
        h.update(np.ascontiguousarray(value.values, dtype=np.float64).tobytes())
    elif kind == "integers":
        h.update(np.ascontiguousarray(value.values, dtype=np.int64).tobytes())
    elif kind == "symbols":
        h.update(bytes([value.width]))
        h.update(symbols_to_packed_bytes(value))
    else:
        h.update(len(value).to_bytes(8, "big"))
        h.update(np.packbits(value.bits).tobytes() if len(value) else b"")
    return h.hexdigest()


def _as_symbol_series(value) -> Optional[SymbolSeries]:
    if isinstance(value, SymbolSeries):
        return value
    if isinstance(value, BitSequence):
        if len(value) == 0:
            return None
        return bits_to_symbols(value, 1)
    return None


@dataclass(frozen=True)
class StageReport:
    transform: str
    params: dict
    output_kind: str
    n: int
    fingerprint: str
    outcomes: tuple = ()
    tests: tuple = ()
    record: Optional[DiscretizationRecord] = None

    def to_json(self) -> dict:
        return {
            "transform": self.transform,
            "params": self.params,
            "output_kind": self.output_kind,
            "n": self.n,
            "fingerprint": self.fingerprint,
            "outcomes": [dict(o) for o in self.outcomes],
            "tests": [t.to_json() for t in self.tests],
        }


@dataclass(frozen=True)
class PipelineReport:
    input_info: dict
    stages: tuple
    verdict: str
    annotations: tuple
    seed: int
    trials: int
    coders: tuple
    significance: float
    regular_threshold: float
    version: str = _pkg_version

    def to_json(self) -> dict:
        return {
            "input": self.input_info,
            "stages": [s.to_json() for s in self.stages],
            "verdict": self.verdict,
            "annotations": list(self.annotations),
            "seed": self.seed,
            "trials": self.trials,
            "coders": list(self.coders),
            "significance": self.significance,
            "regular_threshold": self.regular_threshold,
            "version": self.version,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def run_pipeline(
    stage_specs: Sequence[StageSpec],
    data,
    coders: Sequence[str] = ALL_CODERS,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    significance: float = DEFAULT_SIGNIFICANCE,
    regular_threshold: float = DEFAULT_REGULAR_THRESHOLD,
    tests: Sequence[str] = (),
    source: str = "<memory>",
) -> PipelineReport:
    """Apply the stages in order, probing each discrete stage with the coders.

    ``trials=0`` skips Monte-Carlo significance (p-values omitted); the
    verdict then falls back to RANDOM-IN-PRACTICE unless a rate clears the
    regular threshold outright.
    """
    value = data
    reports: list[StageReport] = []

    def run_stage_tests(val) -> tuple:
        if not tests or not isinstance(val, ReturnSeries):
            return ()
        return tuple(run_test(name, val) for name in tests)

    reports.append(
        StageReport(
            transform="input",
            params={},
            output_kind=_kind(value),
            n=len(value),
            fingerprint=_fingerprint(value),
            tests=run_stage_tests(value),
        )
    )

    for spec in stage_specs:
        try:
            value, prov = _apply_stage(value, spec)
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(spec.transform, str(exc)) from exc
        record = prov.pop("record", None)
        outcomes: list[dict] = []
        probe = _as_symbol_series(value)
        if probe is not None and len(probe) > 0:
            for coder in coders:
                _, outcome = compress(probe, coder)
                entry = {
                    "coder": coder,
                    "original_bits": outcome.original_bits,
                    "compressed_bits": outcome.compressed_bits,
                    "rate": outcome.rate,
                    "p_value": None,
                }
                if trials:
                    null = cached_null_distribution(
                        coder, len(probe), probe.width, trials, seed
                    )
                    entry["p_value"] = empirical_p_value(outcome.rate, null)
                outcomes.append(entry)
        reports.append(
            StageReport(
                transform=spec.transform,
                params=dict(spec.params, **prov),
                output_kind=_kind(value),
                n=len(value),
                fingerprint=_fingerprint(value),
                outcomes=tuple(outcomes),
                tests=run_stage_tests(value),
                record=record,
            )
        )

    verdict, annotations = _verdict(reports, significance, regular_threshold)
    return PipelineReport(
        input_info={"source": source, "kind": _kind(data), "n": len(data)},
        stages=tuple(reports),
        verdict=verdict,
        annotations=annotations,
        seed=seed,
        trials=trials,
        coders=tuple(coders),
        significance=significance,
        regular_threshold=regular_threshold,
    )


def _verdict(reports: list[StageReport], significance: float, regular_threshold: float):
    final = next((r for r in reversed(reports) if r.outcomes), None)
    if final is None:
        return VERDICT_RANDOM_IN_PRACTICE, (
            "no discrete stage was probed; nothing to assess",
        )
    annotations: list[str] = []
    significant = [
        o for o in final.outcomes if o["p_value"] is not None and o["p_value"] <= significance
    ]
    best_significant = max((o["rate"] for o in significant), default=None)
    if best_significant is not None and best_significant >= regular_threshold:
        return VERDICT_REGULAR, tuple(
            [f"best significant rate {best_significant:.4f} >= {regular_threshold}"]
        )
    if significant:
        weak = max(o["rate"] for o in significant)
        annotations.append(
            f"weak structure detected: significant rate {weak:.4f} below the "
            f"regular threshold {regular_threshold}"
        )
    have_p = [o for o in final.outcomes if o["p_value"] is not None]
    if have_p and all(o["p_value"] >= 0.5 for o in have_p):
        annotations.append("consistent with incompressible (all coder p-values >= 0.5)")
    annotations.append(
        "verdict limited to practice: theoretical compressibility is undecidable"
    )
    return VERDICT_RANDOM_IN_PRACTICE, tuple(annotations)


def replay(report: PipelineReport, data) -> bool:
    """Re-run every stage from its stored record; True iff all fingerprints match."""
    value = data
    if report.stages[0].fingerprint != _fingerprint(value):
        return False
    for stage in report.stages[1:]:
        if stage.record is not None:
            value = stage.record.apply(value)
        else:
            params = {
                k: v
                for k, v in stage.params.items()
                if k in ("offset", "width", "window", "k")
            }
            value, _ = _apply_stage(value, StageSpec(stage.transform, params))
        if stage.fingerprint != _fingerprint(value):
            return False
    return True


def load_pipeline_config(path) -> dict:
    """Read the declarative pipeline config (JSON tree; see README)."""
    with open(path) as fh:
        try:
            tree = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid pipeline config: {exc}") from exc
    if "stages" not in tree or not isinstance(tree["stages"], list):
        raise DataError(f"{path}: pipeline config needs a 'stages' list")
    stages = []
    for i, node in enumerate(tree["stages"]):
        if not isinstance(node, dict) or "transform" not in node:
            raise DataError(f"{path}: stage {i} needs a 'transform' key")
        params = {k: v for k, v in node.items() if k != "transform"}
        stages.append(StageSpec(node["transform"], params))
    config = {
        "stages": stages,
        "coders": tuple(tree.get("coders", ALL_CODERS)),
        "trials": int(tree.get("trials", DEFAULT_TRIALS)),
        "seed": int(tree.get("seed", 0)),
        "significance": float(tree.get("significance", DEFAULT_SIGNIFICANCE)),
        "regular_threshold": float(tree.get("regular_threshold", DEFAULT_REGULAR_THRESHOLD)),
        "tests": tuple(tree.get("tests", ())),
    }
    return config


def counting_bound_audit(coder: str, n: int, k_max: int) -> list[dict]:
    """Exhaustive audit: fraction of n-bit inputs compressed by more than k bits.

    Injectivity forces the fraction to stay at or below 2^-k; the audit
    verifies that on every one of the 2^n inputs.
    """
    if n > 16:
        raise SizeError("exhaustive audit supports n <= 16")
    if n < 1 or k_max < 0:
        raise SizeError("need n >= 1 and k_max >= 0")
    savings = np.empty(1 << n, dtype=np.int64)
    for word in range(1 << n):
        bits = [(word >> (n - 1 - j)) & 1 for j in range(n)]
        series = SymbolSeries(bits, 1)
        _, outcome = compress(series, coder)
        savings[word] = n - outcome.compressed_bits
    rows = []
    total = 1 << n
    for k in range(0, k_max + 1):
        count = int(np.sum(savings > k))
        fraction = count / total
        rows.append(
            {
                "k": k,
                "count": count,
                "fraction": fraction,
                "bound": 2.0**-k,
                "ok": fraction <= 2.0**-k,
            }
        )
    return rows
