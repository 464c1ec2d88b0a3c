"""Strict JSON run configuration.

Every block rejects unknown keys; defaults fill anything omitted.  All
physical quantities are in natural units unless ``units`` supplies the
constants explicitly.
"""
from __future__ import annotations

import json
from typing import Annotated, Literal, Optional, Union

from pydantic import (BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveFloat,
                      PositiveInt, ValidationError, model_validator)

from ..core import Grid1D, Harmonic, InfiniteWell, Tabulated, UnitSystem, make_grid
from ..eigensolver import (ALL_ONES, ClusterDegeneracy, DegeneracyPolicy, ExplicitDegeneracy)
from ..errors import ConfigError


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class UnitsBlock(_Strict):
    hbar: PositiveFloat
    k_B: PositiveFloat
    mass: PositiveFloat


class HarmonicBlock(_Strict):
    kind: Literal["harmonic"]
    mass: PositiveFloat = 1.0
    omega: PositiveFloat = 1.0
    offset: float = 0.0


class WellBlock(_Strict):
    kind: Literal["infinite_well"]
    width: PositiveFloat
    offset: float = 0.0


class TabulatedBlock(_Strict):
    kind: Literal["tabulated"]
    values: list[float]
    offset: float = 0.0


PotentialBlock = Annotated[Union[HarmonicBlock, WellBlock, TabulatedBlock],
                           Field(discriminator="kind")]


class GridBlock(_Strict):
    x_min: float
    x_max: float
    n_points: Annotated[int, Field(ge=3)] = 2001

    @model_validator(mode="after")
    def _interval(self):
        if self.x_max <= self.x_min:
            raise ValueError("degenerate interval: x_max must exceed x_min")
        return self


class DegeneracyBlock(_Strict):
    policy: Literal["all_ones", "explicit", "cluster"] = "all_ones"
    table: Optional[list[Annotated[int, Field(ge=1)]]] = None
    tolerance: Optional[PositiveFloat] = None

    @model_validator(mode="after")
    def _fields_match_policy(self):
        if self.policy == "explicit" and self.table is None:
            raise ValueError("explicit policy needs a 'table'")
        if self.policy == "cluster" and self.tolerance is None:
            raise ValueError("cluster policy needs a 'tolerance'")
        if self.policy != "explicit" and self.table is not None:
            raise ValueError("'table' is only valid with the explicit policy")
        if self.policy != "cluster" and self.tolerance is not None:
            raise ValueError("'tolerance' is only valid with the cluster policy")
        return self


class ComponentBlock(_Strict):
    level: Annotated[int, Field(ge=0)]
    re: float = 1.0
    im: float = 0.0


class TimeRange(_Strict):
    start: float = 0.0
    stop: float
    count: Annotated[int, Field(ge=1)]


class EvolutionBlock(_Strict):
    temperature: Optional[NonNegativeFloat] = None
    level: Optional[Annotated[int, Field(ge=0)]] = None
    components: Optional[list[ComponentBlock]] = None
    times: Union[list[float], TimeRange] = Field(default_factory=lambda: [0.0])
    x_stride: PositiveInt = 10

    @model_validator(mode="after")
    def _one_state(self):
        if (self.level is None) == (self.components is None):
            raise ValueError("give exactly one of 'level' or 'components'")
        if self.components is not None and not self.components:
            raise ValueError("'components' is empty")
        return self

    def time_samples(self) -> list[float]:
        if isinstance(self.times, TimeRange):
            if self.times.count == 1:
                return [self.times.start]
            step = (self.times.stop - self.times.start) / (self.times.count - 1)
            return [self.times.start + k * step for k in range(self.times.count)]
        return list(self.times)

    def max_level(self) -> int:
        if self.level is not None:
            return self.level
        return max(c.level for c in self.components)


class ParticleBlock(_Strict):
    kin: float
    pot: float
    g: Annotated[int, Field(ge=1)] = 1
    p: Annotated[float, Field(gt=0, le=1)] = 1.0


class StateBlock(_Strict):
    P: NonNegativeFloat
    particles: list[ParticleBlock]
    pair_energy: float = 0.0


class EnsembleBlock(_Strict):
    temperature: NonNegativeFloat
    states: list[StateBlock] = Field(min_length=1)


class TolerancesBlock(_Strict):
    tail: PositiveFloat = 1e-8
    fixed_point: PositiveFloat = 1e-12
    max_iter: PositiveInt = 500
    damping: Annotated[float, Field(gt=0, le=1)] = 1.0
    shift: PositiveFloat = 1e-10
    closure: PositiveFloat = 1e-12


class OutputBlock(_Strict):
    directory: Optional[str] = None
    format: Literal["csv", "report"] = "csv"


class RunConfig(_Strict):
    units: Union[Literal["natural"], UnitsBlock] = "natural"
    potential: PotentialBlock
    grid: Optional[GridBlock] = None
    levels: PositiveInt = 10
    solver: Literal["sturm", "lapack"] = "sturm"
    degeneracy: DegeneracyBlock = Field(default_factory=DegeneracyBlock)
    temperatures: list[NonNegativeFloat] = Field(default_factory=lambda: [1.0])
    transitions: list[tuple[Annotated[int, Field(ge=0)], Annotated[int, Field(ge=0)]]] = \
        Field(default_factory=lambda: [(1, 0)])
    shift_temperatures: Optional[list[tuple[PositiveFloat, PositiveFloat]]] = None
    evolution: Optional[EvolutionBlock] = None
    ensemble: Optional[EnsembleBlock] = None
    tolerances: TolerancesBlock = Field(default_factory=TolerancesBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)

    @model_validator(mode="after")
    def _cross_checks(self):
        for pair in self.transitions:
            if max(pair) >= self.levels:
                raise ValueError(f"transition {list(pair)} needs indices < levels={self.levels}")
        if self.degeneracy.policy == "explicit" and len(self.degeneracy.table) != self.levels:
            raise ValueError(f"degeneracy table has {len(self.degeneracy.table)} entries, "
                             f"levels is {self.levels}")
        if self.evolution is not None and self.evolution.max_level() >= self.levels:
            raise ValueError("evolution level index must be < levels")
        if isinstance(self.potential, TabulatedBlock):
            if self.grid is None:
                raise ValueError("a tabulated potential needs an explicit grid")
            if len(self.potential.values) != self.grid.n_points:
                raise ValueError("tabulated potential length differs from grid.n_points")
        return self

    # -- translation to library objects ------------------------------------

    def unit_system(self) -> UnitSystem:
        if self.units == "natural":
            return UnitSystem()
        return UnitSystem(hbar=self.units.hbar, k_B=self.units.k_B,
                          mass_default=self.units.mass)

    def potential_spec(self):
        p = self.potential
        if isinstance(p, HarmonicBlock):
            return Harmonic(mass=p.mass, omega=p.omega, offset=p.offset)
        if isinstance(p, WellBlock):
            return InfiniteWell(width=p.width, offset=p.offset)
        return Tabulated(values=p.values, offset=p.offset)

    def particle_mass(self) -> float:
        if isinstance(self.potential, HarmonicBlock):
            return self.potential.mass
        return self.unit_system().mass_default

    def make_grid(self) -> Grid1D:
        if self.grid is not None:
            return make_grid(self.grid.x_min, self.grid.x_max, self.grid.n_points)
        if isinstance(self.potential, WellBlock):
            return make_grid(0.0, self.potential.width, 2001)
        return make_grid(-10.0, 10.0, 2001)

    def degeneracy_policy(self) -> DegeneracyPolicy:
        d = self.degeneracy
        if d.policy == "explicit":
            return ExplicitDegeneracy(tuple(d.table))
        if d.policy == "cluster":
            return ClusterDegeneracy(d.tolerance)
        return ALL_ONES

    def shift_pairs(self) -> list[tuple[float, float]]:
        """Explicit (T1, T2) pairs, else consecutive positive temperatures."""
        if self.shift_temperatures is not None:
            return [tuple(p) for p in self.shift_temperatures]
        positive = [T for T in self.temperatures if T > 0]
        return [(b, a) for a, b in zip(positive, positive[1:])]


def _format_loc(loc) -> str:
    parts = []
    for item in loc:
        # pydantic inserts union branch tags; they are not user-facing keys
        if isinstance(item, str) and item in ("harmonic", "infinite_well", "tabulated",
                                              "UnitsBlock", "TimeRange", "list[float]",
                                              "literal['natural']"):
            continue
        parts.append(str(item))
    return ".".join(parts) or "<root>"


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON document; raise ``ConfigError`` on any problem."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}",
                          path="<document>") from exc
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", path="<root>")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        # within a union the deepest location is the branch the user meant
        err = max(exc.errors(), key=lambda e: len(e["loc"]))
        path = _format_loc(err["loc"])
        msg = err["msg"]
        if err["type"] == "extra_forbidden":
            msg = f"unknown key {err['loc'][-1]!r}"
        raise ConfigError(msg, path=path) from exc


def load_config(path) -> tuple[RunConfig, bytes]:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigError("config is not UTF-8", path="<document>") from exc
    return parse_config(text), raw
