"""Tracing configuration shared by every stage of the pipeline."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import UsageError

EPS_FLOOR = 1e-9


@dataclass(frozen=True)
class TraceConfig:
    grid_n: int = 512
    max_refine: int = 3
    refine_tol: float = 1e-10
    nbhd_candidates: tuple = (1.0, 0.75, 0.5, 0.25, 0.125)
    newton_max_iter: int = 50
    branch_tol: float = 1e-8
    merge_tol: float = 1e-6  # relative to the neighbourhood radius
    tau_x: float = 1e-12  # preorder tie tolerance, relative to the radius
    hull_tol: float = 1e-7  # relative to the curve diameter
    seed_fraction: float = 1.0 / 64.0
    polar_slices: int = 400
    stability_window: int = 3

    def __post_init__(self):
        if self.grid_n < 8 or self.grid_n % 2:
            raise UsageError("grid_n must be an even integer >= 8")
        if self.max_refine < 0:
            raise UsageError("max_refine must be >= 0")
        if not 0 < self.refine_tol < 1:
            raise UsageError("refine_tol must lie in (0, 1)")
        cands = tuple(float(r) for r in self.nbhd_candidates)
        if not cands or any(r <= 0 for r in cands):
            raise UsageError("nbhd_candidates must be positive radii")
        object.__setattr__(self, "nbhd_candidates", cands)

    def replace(self, **changes) -> "TraceConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["nbhd_candidates"] = list(self.nbhd_candidates)
        return d

    @classmethod
    def from_mapping(cls, values: dict) -> "TraceConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            default = known[key].default
            try:
                if key == "nbhd_candidates":
                    if isinstance(raw, str):
                        raw = [r for r in raw.split(",") if r.strip()]
                    kwargs[key] = tuple(float(r) for r in raw)
                elif isinstance(default, bool):
                    kwargs[key] = str(raw).lower() in ("1", "true", "yes")
                elif isinstance(default, int):
                    kwargs[key] = int(raw)
                else:
                    kwargs[key] = float(raw)
            except ValueError as exc:
                raise UsageError(f"bad value for {key!r}: {raw!r}") from exc
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "TraceConfig":
        """Read ``key = value`` lines; ``#`` starts a comment."""
        values = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key] = value
        return cls.from_mapping(values)
