"""Seeded random ensembles of lattice operators run through the full pipeline.

Each instance draws from its own Philox stream keyed by ``(seed, index)``,
so results do not depend on evaluation order or on the number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ContractionFailure, InvalidSpec, LandscapeError
from .landscape import analyze, green_series
from .linalg import max_norm
from .operator import HoppingProfile, PotentialVector, Regime, assemble

HOPPING_LAWS = ("dense", "sparse", "nearest_neighbor")


@dataclass(frozen=True)
class HoppingLaw:
    """How hopping amplitudes are drawn.

    ``dense``: every ``a_i`` uniform on ``(0, a_max]``. ``sparse``: each
    ``a_i`` kept with probability ``keep_probability`` (at least one is
    always kept). ``nearest_neighbor``: ``a_1 = amplitude``, the rest zero.
    """

    kind: str = "dense"
    a_max: float = 1.0
    keep_probability: float = 0.5
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in HOPPING_LAWS:
            raise InvalidSpec(f"unknown hopping law {self.kind!r}; expected one of {HOPPING_LAWS}")
        if not self.a_max > 0:
            raise InvalidSpec("a_max must be positive")
        if not 0 < self.keep_probability <= 1:
            raise InvalidSpec("keep_probability must lie in (0, 1]")
        if not self.amplitude > 0:
            raise InvalidSpec("amplitude must be positive")


@dataclass(frozen=True)
class RegimeTarget:
    kind: Regime = Regime.STRICT
    margin_low: float = 0.1
    margin_high: float = 1.0
    deficit: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", Regime(self.kind))
        if self.kind is Regime.STRICT and not 0 < self.margin_low <= self.margin_high:
            raise InvalidSpec("strict target needs 0 < margin_low <= margin_high")
        if self.kind is Regime.VIOLATED and not self.deficit > 0:
            raise InvalidSpec("violated target needs a positive deficit")


@dataclass(frozen=True)
class EnsembleSpec:
    count: int
    size_range: tuple[int, int]
    hopping_law: HoppingLaw = field(default_factory=HoppingLaw)
    regime_target: RegimeTarget = field(default_factory=RegimeTarget)
    seed: int = 0

    def __post_init__(self):
        lo, hi = (int(x) for x in self.size_range)
        object.__setattr__(self, "size_range", (lo, hi))
        if self.count < 1:
            raise InvalidSpec("count must be >= 1")
        if lo < 1 or hi < lo:
            raise InvalidSpec(f"bad size_range {self.size_range}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed must be an unsigned 64-bit integer")
        if self.regime_target.kind is not Regime.STRICT and lo < 2:
            raise InvalidSpec("soft-boundary and violated targets need n_min >= 2 (some hopping > 0)")

    @classmethod
    def from_dict(cls, data: dict) -> "EnsembleSpec":
        try:
            law = HoppingLaw(**data.get("hopping_law", {}))
            target = RegimeTarget(**data.get("regime_target", {}))
            return cls(
                count=int(data["count"]),
                size_range=tuple(data["size_range"]),
                hopping_law=law,
                regime_target=target,
                seed=int(data.get("seed", 0)),
            )
        except InvalidSpec:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed ensemble spec: {exc!r}") from exc

    def to_dict(self) -> dict:
        out = asdict(self)
        out["size_range"] = list(self.size_range)
        out["regime_target"]["kind"] = self.regime_target.kind.value
        return out


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def _positive_uniform(rng: np.random.Generator, high: float, size) -> np.ndarray:
    # uniform on (0, high]
    return high * (1.0 - rng.random(size))


def _draw_hopping(law: HoppingLaw, n: int, rng: np.random.Generator) -> HoppingProfile:
    if n == 1:
        return HoppingProfile([], 1)
    if law.kind == "nearest_neighbor":
        return HoppingProfile.nearest_neighbor(n, law.amplitude)
    coeffs = _positive_uniform(rng, law.a_max, n - 1)
    if law.kind == "sparse":
        keep = rng.random(n - 1) < law.keep_probability
        if not keep.any():
            keep[rng.integers(n - 1)] = True
        coeffs = np.where(keep, coeffs, 0.0)
    return HoppingProfile(coeffs, n)


def generate_instance(spec: EnsembleSpec, index: int) -> tuple[PotentialVector, HoppingProfile]:
    if not 0 <= index < spec.count:
        raise InvalidSpec(f"index {index} outside [0, {spec.count})")
    rng = _rng(spec.seed, index)
    lo, hi = spec.size_range
    n = int(rng.integers(lo, hi + 1))
    profile = _draw_hopping(spec.hopping_law, n, rng)
    hop_sum = profile.hop_sum
    target = spec.regime_target

    if target.kind is Regime.STRICT:
        v = hop_sum + rng.uniform(target.margin_low, target.margin_high, n)
    elif target.kind is Regime.SOFT_BOUNDARY:
        v = np.full(n, hop_sum)
    else:
        floor = hop_sum - target.deficit
        if floor <= 0:
            raise InvalidSpec(f"deficit {target.deficit} leaves a nonpositive potential (2*sum(a) = {hop_sum})")
        v = floor + rng.uniform(0.0, target.deficit, n)
        v[rng.integers(n)] = floor
    return PotentialVector(v), profile


@dataclass(frozen=True)
class InstanceRecord:
    index: int
    n: int
    regime: str
    margin: float
    min_green_entry: float
    max_green_entry: float
    min_landscape: float
    min_bound_margin: float
    min_eigenvalue: float
    series_error: float
    series_error_bound: float
    series_slack: float
    positivity_ok: bool
    bound_ok: bool


CSV_COLUMNS = tuple(InstanceRecord.__dataclass_fields__)


@dataclass(frozen=True)
class EnsembleSummary:
    spec: EnsembleSpec
    records: tuple[InstanceRecord, ...]
    failures: tuple[tuple[int, str], ...]

    @property
    def positivity_ok_count(self) -> int:
        return sum(r.positivity_ok for r in self.records)

    @property
    def bound_ok_count(self) -> int:
        return sum(r.bound_ok for r in self.records)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "count": len(self.records),
            "positivity_ok": self.positivity_ok_count,
            "bound_ok": self.bound_ok_count,
            "passed": self.passed,
            "failures": [{"index": i, "reason": msg} for i, msg in self.failures],
            "records": [asdict(r) for r in self.records],
        }


def _failed_record(index: int, n: int) -> InstanceRecord:
    nan = math.nan
    return InstanceRecord(index, n, "error", nan, nan, nan, nan, nan, nan, nan, nan, nan, False, False)


def _run_one(spec: EnsembleSpec, index: int, series_order: int) -> tuple[InstanceRecord, str | None]:
    observe_only = spec.regime_target.kind is Regime.VIOLATED
    n = 0
    try:
        potential, profile = generate_instance(spec, index)
        n = len(potential)
        op = assemble(potential, profile)
        green, report = analyze(op, override=observe_only)
        try:
            series = green_series(op, series_order, override=observe_only)
            err = max_norm(series.g - green.g)
            bound = series.certificate.error_bound
        except ContractionFailure:
            err = bound = math.nan
        record = InstanceRecord(
            index=index,
            n=n,
            regime=op.regime.kind.value,
            margin=op.regime.margin,
            min_green_entry=green.min_entry,
            max_green_entry=green.max_abs_entry,
            min_landscape=float(report.u.min()),
            min_bound_margin=report.min_margin,
            min_eigenvalue=report.min_eigenvalue,
            series_error=err,
            series_error_bound=bound,
            series_slack=bound - err,
            positivity_ok=report.positivity_ok,
            bound_ok=report.bound_ok,
        )
    except LandscapeError as exc:
        return _failed_record(index, n), f"{type(exc).__name__}: {exc}"

    if observe_only:
        return record, None
    problems = []
    if not record.positivity_ok:
        problems.append("positivity")
    if not record.bound_ok:
        problems.append(f"landscape bound (min margin {record.min_bound_margin:.3e})")
    if record.regime != spec.regime_target.kind.value:
        problems.append(f"regime {record.regime} differs from target")
    return record, ("; ".join(problems) or None)


def run_ensemble(spec: EnsembleSpec, workers: int = 1, series_order: int = 20) -> EnsembleSummary:
    """Run every instance; errors are recorded per instance and never abort the batch."""
    def task(i):
        return _run_one(spec, i, series_order)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, range(spec.count)))
    else:
        results = [task(i) for i in range(spec.count)]
    records = tuple(r for r, _ in results)
    failures = tuple((r.index, msg) for r, msg in results if msg is not None)
    return EnsembleSummary(spec, records, failures)


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def records_to_csv(records) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        lines.append(",".join(format_number(getattr(r, c)) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"
