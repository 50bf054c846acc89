"""Experiment orchestration: scenes, trials, sweeps, comparisons and presets.

Every study funnels through :func:`run_trial`, so sweeps and comparisons use
exactly the same pipeline as a single run::

    patterns -> bucket_signal -> add_noise -> reconstruct -> normalize -> mse

Seeding: trial seed ``s`` drives the pattern draw directly
(``default_rng(s)``) and the detector noise through ``default_rng([s, 1])``,
so the two streams are independent and a trial is reproducible from ``s``.
"""
from __future__ import annotations

import csv
import json
import logging
import os
import statistics
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import imaging
from .exceptions import ConfigError, DimensionMismatchError, GhostImagingError
from .hadamard import factor_order
from .patterns import KINDS, PSEUDO_HADAMARD, SPECIAL_HADAMARD, make_patterns
from .pgm import read_pgm, write_pgm

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5
REPORT_COLUMNS = ("kind", "count", "sigma", "seed", "mse")
PRESETS = ("paper-fig2", "paper-fig4", "paper-fig5", "paper-fig6")


# ---------------------------------------------------------------- scenes

def target_object(shape: tuple[int, int]) -> np.ndarray:
    """Deterministic binary target: a ring crossed by a bar, plus a block.

    Used whenever a configuration names no scene file.
    """
    n1, n2 = shape
    y = (np.arange(n1) + 0.5 - n1 / 2) / (min(n1, n2) / 2)
    x = (np.arange(n2) + 0.5 - n2 / 2) / (min(n1, n2) / 2)
    yy, xx = np.meshgrid(y, x, indexing="ij")
    r = np.hypot(xx, yy)
    ring = (r > 0.45) & (r < 0.75)
    bar = (np.abs(yy) < 0.12) & (np.abs(xx) < 0.95 * x.max())
    block = (xx > 0.15) & (xx < 0.4) & (yy > -0.4) & (yy < -0.15)
    return (ring | bar | block).astype(np.float64)


def load_scene(path, threshold: float | None = None) -> imaging.Scene:
    """Read a graymap as a scene scaled to [0, 1].

    With ``threshold`` set, pixels ``>= threshold`` become 1 and the rest 0.
    """
    pixels, maxval = read_pgm(path)
    values = pixels / maxval
    if threshold is not None:
        if not 0 <= threshold <= 1:
            raise ConfigError(f"threshold must lie in [0, 1], got {threshold}")
        values = (values >= threshold).astype(np.float64)
    return imaging.Scene.from_image(values)


def save_image(g, shape: tuple[int, int], path, excluded_first: bool = False) -> str:
    """Write a normalized image as an 8-bit graymap, ``round(g * 255)``.

    If ``g`` is one pixel short of ``shape`` (first pixel excluded), pixel 0
    is rendered black and a header comment records the exclusion.
    """
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    n1, n2 = shape
    comment = None
    if g.size + 1 == n1 * n2:
        g = np.concatenate(([0.0], g))
        excluded_first = True
    if g.size != n1 * n2:
        raise DimensionMismatchError(f"{g.size} values do not fill shape {shape}")
    if excluded_first:
        comment = "first pixel excluded"
    pixels = np.round(np.clip(g, 0, 1) * 255).astype(np.uint8).reshape(n1, n2)
    return write_pgm(path, pixels, comment=comment)


# ---------------------------------------------------------------- config

@dataclass
class ExperimentConfig:
    """One experiment; round-trips through JSON via :meth:`from_dict`.

    When ``scene_path`` is absent the built-in :func:`target_object` of
    ``scene_shape`` is used.  ``exclude_first=None`` means "exclude pixel 0
    for pseudo-Hadamard patterns only".
    """

    pattern_kind: str = SPECIAL_HADAMARD
    count: int = 8192
    sigma: float = 0.0
    seeds: list[int] | None = None
    trials: int = 1
    base_seed: int = 0
    scene_path: str | None = None
    scene_shape: tuple[int, int] = (64, 64)
    threshold: float | None = DEFAULT_THRESHOLD
    output_dir: str | None = None
    label: str | None = None
    exclude_first: bool | None = None

    def __post_init__(self):
        if self.pattern_kind not in KINDS:
            raise ConfigError(f"pattern_kind must be one of {KINDS}, got {self.pattern_kind!r}")
        if self.sigma < 0:
            raise ConfigError(f"sigma must be non-negative, got {self.sigma}")
        if self.seeds is not None:
            self.seeds = [int(s) for s in self.seeds]
            if not self.seeds:
                raise ConfigError("seeds must not be empty")
            self.trials = len(self.seeds)
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        self.count = int(self.count)
        self.scene_shape = tuple(int(v) for v in self.scene_shape)
        if self.threshold is not None and not 0 <= self.threshold <= 1:
            raise ConfigError(f"threshold must lie in [0, 1], got {self.threshold}")

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> "ExperimentConfig":
        data = dict(data)
        for alias in ("K", "M"):
            if alias in data:
                data.setdefault("count", data.pop(alias))
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if base_dir is not None and data.get("scene_path"):
            data["scene_path"] = os.path.join(base_dir, data["scene_path"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))

    def seed_list(self) -> list[int]:
        if self.seeds is not None:
            return list(self.seeds)
        return list(range(self.base_seed, self.base_seed + self.trials))

    def resolved_label(self) -> str:
        if self.label:
            return self.label
        label = f"{self.pattern_kind}_{self.count}"
        if self.pattern_kind == PSEUDO_HADAMARD and self.exclude_first is False:
            label += "_raw"
        return label

    def excludes_first(self) -> bool:
        if self.exclude_first is None:
            return self.pattern_kind == PSEUDO_HADAMARD
        return bool(self.exclude_first)

    def load_scene(self) -> imaging.Scene:
        if self.scene_path:
            return load_scene(self.scene_path, self.threshold)
        return imaging.Scene.from_image(target_object(self.scene_shape))

    def validate(self, n_pixels: int) -> None:
        """Check counts against the scene size; raises before any output."""
        if self.pattern_kind == SPECIAL_HADAMARD:
            factor_order(self.count)
            if n_pixels > self.count - 1:
                raise ConfigError(
                    f"special_hadamard needs K > pixel count: K={self.count}, N={n_pixels}"
                )
        elif self.pattern_kind == PSEUDO_HADAMARD:
            factor_order(self.count)
            if self.count != n_pixels:
                raise ConfigError(
                    f"pseudo_hadamard needs count == pixel count: {self.count} != {n_pixels}"
                )
        elif self.count < 1:
            raise ConfigError(f"count must be >= 1, got {self.count}")

    def to_dict(self) -> dict:
        d = asdict(self)
        # outputs must not depend on where they are written
        d.pop("output_dir")
        d["scene_shape"] = list(self.scene_shape)
        d["seeds"] = self.seed_list()
        d["trials"] = len(d["seeds"])
        return d


# ---------------------------------------------------------------- reports

@dataclass(frozen=True)
class TrialResult:
    kind: str
    count: int
    sigma: float
    seed: int
    mse: float
    label: str


@dataclass
class ExperimentReport:
    """Per-trial MSEs plus summary statistics and emitted files."""

    config: dict
    trials: list[TrialResult] = field(default_factory=list)
    images: list[str] = field(default_factory=list)
    reconstruction: imaging.Reconstruction | None = field(default=None, repr=False)

    @property
    def mse_values(self) -> list[float]:
        return [t.mse for t in self.trials]

    @property
    def median_mse(self) -> float:
        return float(statistics.median(self.mse_values))

    @property
    def mean_mse(self) -> float:
        return float(statistics.fmean(self.mse_values))

    @property
    def seeds(self) -> list[int]:
        return [t.seed for t in self.trials]

    def summary(self) -> dict:
        return {
            "label": self.trials[0].label if self.trials else None,
            "median_mse": self.median_mse,
            "mean_mse": self.mean_mse,
            "mse": self.mse_values,
            "seeds": self.seeds,
            "images": [os.path.basename(p) for p in self.images],
            "config": self.config,
        }


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def write_report_csv(path, trials: list[TrialResult]) -> str:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for t in trials:
            w.writerow([t.kind, t.count, _fmt(t.sigma), t.seed, _fmt(t.mse)])
    return os.fspath(path)


def _write_manifest(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------- pipeline

def run_trial(config: ExperimentConfig, scene: imaging.Scene, seed: int, patterns=None):
    """Run the pipeline once; returns ``(TrialResult, Reconstruction)``.

    ``patterns`` may be passed in to reuse a deterministic pattern set.
    """
    if patterns is None:
        patterns = make_patterns(config.pattern_kind, scene.n_pixels, config.count, seed)
    bucket = imaging.bucket_signal(patterns, scene)
    bucket = imaging.add_noise(bucket, config.sigma, seed=[seed, 1])
    recon = imaging.reconstruct(patterns, bucket)
    recon = imaging.evaluate(recon, scene.values, config.excludes_first())
    result = TrialResult(
        config.pattern_kind, config.count, float(config.sigma), int(seed),
        recon.mse, config.resolved_label(),
    )
    return result, recon


def _with_context(exc: GhostImagingError, config: ExperimentConfig) -> GhostImagingError:
    new = type(exc)(f"[{config.resolved_label()} sigma={config.sigma}] {exc}")
    new.__cause__ = exc
    return new


def _run_trials(config: ExperimentConfig, scene: imaging.Scene, output_dir=None) -> ExperimentReport:
    report = ExperimentReport(config=config.to_dict())
    try:
        config.validate(scene.n_pixels)
        shared = None
        if config.pattern_kind == PSEUDO_HADAMARD:
            shared = make_patterns(PSEUDO_HADAMARD, scene.n_pixels, config.count)
        for i, seed in enumerate(config.seed_list()):
            result, recon = run_trial(config, scene, seed, patterns=shared)
            logger.info("%s seed=%d mse=%.6g", result.label, seed, result.mse)
            report.trials.append(result)
            if i == 0:
                report.reconstruction = recon
                if output_dir is not None:
                    path = os.path.join(output_dir, f"recon_{config.resolved_label()}.pgm")
                    report.images.append(
                        save_image(recon.normalized, scene.shape, path, recon.excluded_first)
                    )
    except GhostImagingError as exc:
        raise _with_context(exc, config) from exc
    return report


def _prepare(config: ExperimentConfig, scene):
    if scene is None:
        scene = config.load_scene()
    return scene


def run_single(config: ExperimentConfig, scene: imaging.Scene | None = None) -> ExperimentReport:
    """Run every seed of ``config``; writes outputs when ``output_dir`` is set.

    Outputs: ``report.csv`` (kind, count, sigma, seed, mse), one
    ``recon_<label>.pgm`` from the first seed, and ``manifest.json``.
    """
    scene = _prepare(config, scene)
    try:
        config.validate(scene.n_pixels)
    except GhostImagingError as exc:
        raise _with_context(exc, config) from exc
    out = config.output_dir
    if out is not None:
        os.makedirs(out, exist_ok=True)
    report = _run_trials(config, scene, out)
    if out is not None:
        write_report_csv(os.path.join(out, "report.csv"), report.trials)
        _write_manifest(os.path.join(out, "manifest.json"), {
            "study": "single",
            "scene": {"shape": list(scene.shape), "n_pixels": scene.n_pixels},
            **report.summary(),
        })
    return report


def sweep_k(config: ExperimentConfig, k_values, scene: imaging.Scene | None = None):
    """MSE versus Special-Hadamard measurement count.

    Returns:
        list of ``(K, median_mse)`` in the order of ``k_values``, plus the
        per-K reports as a second element.  Writes ``report.csv``,
        ``sweep.csv`` (K, median_mse, mean_mse) and one image per K.
    """
    scene = _prepare(config, scene)
    variants = [
        replace(config, pattern_kind=SPECIAL_HADAMARD, count=int(k), label=None)
        for k in k_values
    ]
    for v in variants:
        try:
            v.validate(scene.n_pixels)
        except GhostImagingError as exc:
            raise _with_context(exc, v) from exc
    out = config.output_dir
    if out is not None:
        os.makedirs(out, exist_ok=True)
    reports = [_run_trials(v, scene, out) for v in variants]
    curve = [(v.count, r.median_mse) for v, r in zip(variants, reports)]
    if out is not None:
        write_report_csv(os.path.join(out, "report.csv"), [t for r in reports for t in r.trials])
        with open(os.path.join(out, "sweep.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("K", "median_mse", "mean_mse"))
            for v, r in zip(variants, reports):
                w.writerow([v.count, _fmt(r.median_mse), _fmt(r.mean_mse)])
        _write_manifest(os.path.join(out, "manifest.json"), {
            "study": "sweep_k",
            "k_values": [int(k) for k in k_values],
            "scene": {"shape": list(scene.shape), "n_pixels": scene.n_pixels},
            "runs": [r.summary() for r in reports],
        })
    return curve, reports


def _variant(base: ExperimentConfig, spec) -> ExperimentConfig:
    kind, count, *rest = spec
    kwargs = {"pattern_kind": kind, "count": int(count), "label": None}
    if rest:
        kwargs["exclude_first"] = rest[0]
    return replace(base, **kwargs)


def compare_patterns(base: ExperimentConfig, variants, scene: imaging.Scene | None = None):
    """One row per ``(kind, count[, exclude_first])`` variant at fixed sigma/scene.

    Returns:
        ``(rows, reports)`` where each row is a dict with ``kind``, ``count``,
        ``label``, ``median_mse`` and ``image``.  Writes ``report.csv``,
        ``comparison.csv`` and one image per variant.
    """
    scene = _prepare(base, scene)
    configs = [_variant(base, v) for v in variants]
    for c in configs:
        try:
            c.validate(scene.n_pixels)
        except GhostImagingError as exc:
            raise _with_context(exc, c) from exc
    out = base.output_dir
    if out is not None:
        os.makedirs(out, exist_ok=True)
    reports = [_run_trials(c, scene, out) for c in configs]
    rows = [
        {
            "kind": c.pattern_kind,
            "count": c.count,
            "label": c.resolved_label(),
            "median_mse": r.median_mse,
            "image": os.path.basename(r.images[0]) if r.images else "",
        }
        for c, r in zip(configs, reports)
    ]
    if out is not None:
        write_report_csv(os.path.join(out, "report.csv"), [t for r in reports for t in r.trials])
        with open(os.path.join(out, "comparison.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("label", "kind", "count", "sigma", "median_mse", "image"))
            for row in rows:
                w.writerow([row["label"], row["kind"], row["count"], _fmt(base.sigma),
                            _fmt(row["median_mse"]), row["image"]])
        _write_manifest(os.path.join(out, "manifest.json"), {
            "study": "compare_patterns",
            "sigma": base.sigma,
            "scene": {"shape": list(scene.shape), "n_pixels": scene.n_pixels},
            "runs": [r.summary() for r in reports],
        })
    return rows, reports


# ---------------------------------------------------------------- presets

FIG2_SIGMA = 0.05
FIG5_SIGMA = 0.05
FIG6_SIGMA = 0.05


def run_preset(name: str, output_dir, seed: int = 0, trials: int | None = None) -> dict:
    """Reproduce one of the figure-level studies.

    ========== ======================================================= ======
    preset     study                                                    trials
    ========== ======================================================= ======
    paper-fig2 32x32 scene: pseudo-Hadamard@1024, random@1024,          20
               random@100000, sigma 0.05
    paper-fig4 100x300 scene, Special-Hadamard K=32768, noiseless       1
    paper-fig5 64x64 scene, Special-Hadamard K in {8192, 16384,         20
               32768}, sigma 0.05
    paper-fig6 64x64 scene, {HCGI raw, HCGI first pixel excluded,       1
               SHCGI 5120, SHCGI 32768} x {noiseless, sigma 0.05}
    ========== ======================================================= ======

    Seeds are ``seed, seed + 1, ...``.  Returns a JSON-ready summary.
    """
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    os.makedirs(output_dir, exist_ok=True)

    if name == "paper-fig2":
        cfg = ExperimentConfig(
            scene_shape=(32, 32), sigma=FIG2_SIGMA, trials=trials or 20,
            base_seed=seed, output_dir=output_dir,
        )
        rows, _ = compare_patterns(cfg, [
            (PSEUDO_HADAMARD, 1024), ("random_binary", 1024), ("random_binary", 100_000),
        ])
        return {"preset": name, "rows": rows}

    if name == "paper-fig4":
        cfg = ExperimentConfig(
            pattern_kind=SPECIAL_HADAMARD, count=32768, scene_shape=(100, 300),
            trials=trials or 1, base_seed=seed, output_dir=output_dir,
        )
        report = run_single(cfg)
        return {"preset": name, "median_mse": report.median_mse}

    if name == "paper-fig5":
        cfg = ExperimentConfig(
            scene_shape=(64, 64), sigma=FIG5_SIGMA, trials=trials or 20,
            base_seed=seed, output_dir=output_dir,
        )
        curve, _ = sweep_k(cfg, [8192, 16384, 32768])
        return {"preset": name, "curve": [list(c) for c in curve]}

    variants = [
        (PSEUDO_HADAMARD, 4096, False),
        (PSEUDO_HADAMARD, 4096, True),
        (SPECIAL_HADAMARD, 5120),
        (SPECIAL_HADAMARD, 32768),
    ]
    scene = imaging.Scene.from_image(target_object((64, 64)))
    result = {"preset": name}
    for env, sigma in (("noiseless", 0.0), ("noisy", FIG6_SIGMA)):
        cfg = ExperimentConfig(
            scene_shape=(64, 64), sigma=sigma, trials=trials or 1, base_seed=seed,
            output_dir=os.path.join(output_dir, env),
        )
        rows, _ = compare_patterns(cfg, variants, scene=scene)
        result[env] = rows
    return result
