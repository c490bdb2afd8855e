"""Materials, fluids and optimization scenarios.

Scenario files are plain text: ``#`` comments, ``[section]`` headers,
``key = value`` pairs and repeated ``[[material]]`` blocks. Every
dimensional value carries a unit token, e.g. ``t_d = 0.5 mm``::

    [scenario]
    name = my-case
    strategy = uniform_thickness_fouling
    eps_d = 0.791
    t_ref = 0.16 mm
    dP = 170 Pa
    dT = 80 K
    t_d = 0.5 mm
    D_min = 0.8 mm

    [fluid]
    rho = 1.060 kg/m3
    ...

    [[material]]
    name = copper            # reserved names pull k_w and t_min from the catalog
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from importlib import resources

from .thermal import DomainError, FluidProperties, MaterialSpec

__all__ = [
    "STRATEGIES",
    "PAPER_MATERIALS",
    "BUILTIN_SCENARIOS",
    "ScenarioError",
    "ScenarioSyntaxError",
    "BaselineGeometry",
    "ScenarioSpec",
    "normalize_name",
    "lookup_material",
    "builtin_paper_scenario",
    "load_scenario",
    "parse_scenario",
    "serialize_scenario",
]

STRATEGIES = (
    "gamma_linked",
    "uniform_thickness",
    "uniform_thickness_fouling",
    "material_specific_fouling",
    "am_reference",
)

# thermal conductivity [W/mK], minimum printable wall [m]; order is the reporting order
PAPER_MATERIALS: dict[str, MaterialSpec] = {
    m.name: m
    for m in (
        MaterialSpec("plastic", 0.2, 0.1e-3, note="structural, not AM resolution"),
        MaterialSpec("austenitic_steel", 20.0, 0.25e-3),
        MaterialSpec("al2o3", 27.0, 0.25e-3),
        MaterialSpec("aln", 180.0, 0.25e-3),
        MaterialSpec("aluminum", 237.0, 0.3e-3),
        MaterialSpec("copper", 398.0, 0.5e-3),
    )
}

BUILTIN_SCENARIOS = (
    "table2",
    "table3-uniform",
    "table3-uniform-fouling",
    "table3-material-specific",
    "table3-am-reference",
    "fig3-sweep",
    "fig4-sweep",
)

# unit token -> (quantity kind, factor to SI)
_UNITS: dict[str, tuple[str, Decimal]] = {
    "m": ("length", Decimal(1)),
    "mm": ("length", Decimal("1e-3")),
    "um": ("length", Decimal("1e-6")),
    "Pa": ("pressure", Decimal(1)),
    "kPa": ("pressure", Decimal("1e3")),
    "K": ("temperature_difference", Decimal(1)),
    "C": ("temperature_difference", Decimal(1)),
    "W/mK": ("conductivity", Decimal(1)),
    "mW/mK": ("conductivity", Decimal("1e-3")),
    "kg/m3": ("density", Decimal(1)),
    "J/kgK": ("specific_heat", Decimal(1)),
    "Pa.s": ("viscosity", Decimal(1)),
}
_SI_UNIT = {
    "length": "m",
    "pressure": "Pa",
    "temperature_difference": "K",
    "conductivity": "W/mK",
    "density": "kg/m3",
    "specific_heat": "J/kgK",
    "viscosity": "Pa.s",
}

_SECTION_RE = re.compile(r"^\[(\[?)\s*([A-Za-z_][\w-]*)\s*(\]?)\]$")
_PAIR_RE = re.compile(r"^([A-Za-z_][\w]*)\s*=\s*(.*)$")


class ScenarioError(ValueError):
    """Invalid scenario content; ``path`` names the offending field."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(path)
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class ScenarioSyntaxError(ScenarioError):
    pass


def normalize_name(name: str) -> str:
    """Case-insensitive material identifier: ``"Austenitic Steel"`` -> ``"austenitic_steel"``."""
    return re.sub(r"[\s\-]+", "_", name.strip().lower())


def lookup_material(name: str, materials=None) -> MaterialSpec:
    key = normalize_name(name)
    pool = {m.name: m for m in materials} if materials is not None else PAPER_MATERIALS
    try:
        return pool[key]
    except KeyError:
        raise KeyError(f"unknown material {name!r}; known: {', '.join(pool)}") from None


@dataclass(frozen=True)
class BaselineGeometry:
    """Reference exchanger: geometry [m], channel count and wall material."""

    material: MaterialSpec
    L: float
    D: float
    t: float
    W: float
    n: int


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    strategy: str
    eps_d: float
    fluid: FluidProperties
    delta_T: float
    dp: float
    t_ref: float
    baseline: BaselineGeometry
    materials: tuple[MaterialSpec, ...]
    gamma: float | None = None
    t_d: float | None = None
    D_min: float | None = None
    dp_ref: float | None = None
    eps_grid: tuple[float, ...] | None = None
    t_grid: tuple[float, ...] | None = None
    fluid_name: str = "fluid"

    @property
    def reference_dp(self) -> float:
        return self.dp if self.dp_ref is None else self.dp_ref

    def thickness_for(self, material: MaterialSpec, strategy: str | None = None) -> float:
        """Wall thickness [m] that ``strategy`` (default: the scenario's) assigns to ``material``."""
        if (strategy or self.strategy) in ("material_specific_fouling", "am_reference"):
            if material.min_thickness is None:
                raise ScenarioError(f"material {material.name!r} has no t_min", path=f"material.{material.name}.t_min")
            return material.min_thickness
        if self.t_d is None:
            raise ScenarioError("strategy requires t_d", path="scenario.t_d")
        return self.t_d

    def validate(self) -> "ScenarioSpec":
        if self.strategy not in STRATEGIES:
            raise ScenarioError(f"unknown strategy {self.strategy!r}; expected one of {', '.join(STRATEGIES)}", "scenario.strategy")
        if not (0.5 < self.eps_d < 1.0):
            raise ScenarioError(f"must lie in (0.5, 1), got {self.eps_d}", "scenario.eps_d")
        for key in ("delta_T", "dp", "t_ref"):
            if not getattr(self, key) > 0:
                raise ScenarioError("must be positive", f"scenario.{key}")
        if self.dp_ref is not None and not self.dp_ref > 0:
            raise ScenarioError("must be positive", "scenario.dP_ref")
        if self.strategy == "gamma_linked":
            if self.gamma is None or not self.gamma > 0:
                raise ScenarioError("gamma_linked requires a positive gamma", "scenario.gamma")
        if self.strategy in ("uniform_thickness", "uniform_thickness_fouling"):
            if self.t_d is None or not self.t_d > 0:
                raise ScenarioError(f"{self.strategy} requires a positive t_d", "scenario.t_d")
        if self.strategy in ("uniform_thickness_fouling", "material_specific_fouling"):
            if self.D_min is None or not self.D_min > 0:
                raise ScenarioError(f"{self.strategy} requires a positive D_min", "scenario.D_min")
        if self.strategy in ("material_specific_fouling", "am_reference"):
            for m in self.materials:
                if m.min_thickness is None:
                    raise ScenarioError(f"{self.strategy} requires t_min", f"material.{m.name}.t_min")
        if not self.materials:
            raise ScenarioError("at least one [[material]] block is required", "material")
        names = [m.name for m in self.materials]
        if len(set(names)) != len(names):
            raise ScenarioError("duplicate material names", "material")
        b = self.baseline
        for key in ("L", "D", "t", "W"):
            if not getattr(b, key) > 0:
                raise ScenarioError("must be positive", f"baseline.{key}")
        if not (isinstance(b.n, int) and b.n >= 1):
            raise ScenarioError("must be a positive integer", "baseline.n")
        for i, e in enumerate(self.eps_grid or ()):
            if not (0.5 < e < 1.0):
                raise ScenarioError(f"must lie in (0.5, 1), got {e}", f"scenario.eps_grid[{i}]")
        for i, t in enumerate(self.t_grid or ()):
            if not t > 0:
                raise ScenarioError("must be positive", f"scenario.t_grid[{i}]")
        return self


# --- parsing -----------------------------------------------------------------


def _split_comment(line: str) -> str:
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).strip()


def _parse_blocks(text: str):
    """Yield ``(section, is_array, {key: (raw, line)}, header_line)`` blocks."""
    blocks = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _split_comment(raw)
        if not line:
            continue
        if line.startswith("["):
            m = _SECTION_RE.match(line)
            if not m or (m.group(1) == "[") != (m.group(3) == "]"):
                raise ScenarioSyntaxError(f"malformed section header {line!r}", line=lineno)
            current = (m.group(2).lower(), m.group(1) == "[", {}, lineno)
            blocks.append(current)
            continue
        m = _PAIR_RE.match(line)
        if not m:
            raise ScenarioSyntaxError(f"expected 'key = value', got {line!r}", line=lineno)
        if current is None:
            raise ScenarioSyntaxError("key/value pair before any [section] header", line=lineno)
        key, value = m.group(1), m.group(2).strip()
        if not value:
            raise ScenarioSyntaxError(f"missing value for {key!r}", path=key, line=lineno)
        if key in current[2]:
            raise ScenarioSyntaxError(f"duplicate key {key!r}", path=f"{current[0]}.{key}", line=lineno)
        current[2][key] = (value, lineno)
    return blocks


def _to_float(token: str, path: str, line: int) -> Decimal:
    try:
        value = Decimal(token)
    except InvalidOperation:
        raise ScenarioSyntaxError(f"not a number: {token!r}", path, line) from None
    if not value.is_finite():
        raise ScenarioError(f"not a finite number: {token!r}", path, line)
    return value


def _quantity(entry, kind: str | None, path: str) -> float:
    """Number with a mandatory unit of ``kind`` (or no unit when ``kind`` is None), in SI."""
    raw, line = entry
    parts = raw.split()
    if kind is None:
        if len(parts) != 1:
            raise ScenarioError(f"expected a plain number, got {raw!r}", path, line)
        return float(_to_float(parts[0], path, line))
    if len(parts) != 2:
        raise ScenarioError(f"expected '<number> <unit>', got {raw!r}", path, line)
    value = _to_float(parts[0], path, line)
    return float(value * _unit_factor(parts[1], kind, path, line))


def _unit_factor(unit: str, kind: str, path: str, line: int) -> Decimal:
    if unit not in _UNITS:
        raise ScenarioError(f"unknown unit {unit!r}", path, line)
    unit_kind, factor = _UNITS[unit]
    if unit_kind != kind:
        raise ScenarioError(f"unit {unit!r} is a {unit_kind}, expected a {kind}", path, line)
    return factor


def _grid(entry, kind: str | None, path: str) -> tuple[float, ...]:
    """``a:b:step`` or a comma list; a trailing unit applies to every value."""
    raw, line = entry
    body, factor = raw, Decimal(1)
    if kind is not None:
        head, sep, unit = raw.rpartition(" ")
        if not sep:
            raise ScenarioError(f"expected values followed by a unit, got {raw!r}", path, line)
        body, factor = head, _unit_factor(unit.strip(), kind, path, line)
    return tuple(float(v * factor) for v in parse_grid(body, path, line))


def parse_grid(text: str, path: str = "grid", line: int | None = None) -> list[Decimal]:
    """Values from ``"a:b:step"`` (inclusive of ``b`` when it lands on the grid) or ``"x, y, z"``."""
    text = text.strip()
    if ":" in text:
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 3:
            raise ScenarioSyntaxError(f"range must be 'start:stop:step', got {text!r}", path, line)
        start, stop, step = (_to_float(p, path, line) for p in parts)
        if step <= 0 or stop < start:
            raise ScenarioError(f"empty or descending range {text!r}", path, line)
        count = int((stop - start) / step + Decimal("1e-9")) + 1
        return [start + i * step for i in range(count)]
    values = [_to_float(v.strip(), path, line) for v in text.split(",") if v.strip()]
    if not values:
        raise ScenarioError("empty list", path, line)
    return values


def _string(entry) -> str:
    raw = entry[0]
    if len(raw) >= 2 and raw[0] == raw[-1] == '"':
        return raw[1:-1]
    return raw


def _check_keys(section: str, entries: dict, allowed: set[str]) -> None:
    for key, (_, line) in entries.items():
        if key not in allowed:
            raise ScenarioError(f"unknown key {key!r}", f"{section}.{key}", line)


def _require(section: str, entries: dict, key: str, header_line: int):
    if key not in entries:
        raise ScenarioError("missing required field", f"{section}.{key}", header_line)
    return entries[key]


def _material(entries: dict, header_line: int, index: int) -> MaterialSpec:
    path = f"material[{index}]"
    _check_keys(path, entries, {"name", "k_w", "t_min", "note"})
    name = normalize_name(_string(_require(path, entries, "name", header_line)))
    reserved = PAPER_MATERIALS.get(name)
    if "k_w" in entries:
        k_w = _quantity(entries["k_w"], "conductivity", f"material.{name}.k_w")
    elif reserved is not None:
        k_w = reserved.wall_conductivity
    else:
        raise ScenarioError("missing required field", f"material.{name}.k_w", header_line)
    if reserved is not None and k_w != reserved.wall_conductivity:
        raise ScenarioError(
            f"{name!r} is a reserved material with k_w = {reserved.wall_conductivity} W/mK",
            f"material.{name}.k_w",
            entries["k_w"][1],
        )
    if "t_min" in entries:
        t_min = _quantity(entries["t_min"], "length", f"material.{name}.t_min")
    else:
        t_min = reserved.min_thickness if reserved is not None else None
    note = _string(entries["note"]) if "note" in entries else (reserved.note if reserved else "")
    try:
        return MaterialSpec(name, k_w, t_min, note=note)
    except DomainError as exc:
        raise ScenarioError(str(exc), f"material.{name}", header_line) from None


_SCENARIO_KEYS = {"name", "strategy", "eps_d", "gamma", "t_d", "D_min", "t_ref", "dP", "dP_ref", "dT", "eps_grid", "t_grid"}
_FLUID_KEYS = {"name", "rho", "cp", "mu", "k"}
_BASELINE_KEYS = {"material", "k_w", "L", "D", "t", "W", "n"}


def parse_scenario(text: str) -> ScenarioSpec:
    """Parse and validate scenario file content; all values are returned in SI units.

    Raises
    ------
    ScenarioSyntaxError
        Malformed lines, with the line number.
    ScenarioError
        Missing or out-of-range fields, with the field path.
    """
    blocks = _parse_blocks(text)
    singles: dict[str, tuple[dict, int]] = {}
    material_blocks = []
    for section, is_array, entries, line in blocks:
        if is_array:
            if section != "material":
                raise ScenarioSyntaxError(f"unknown array section [[{section}]]", line=line)
            material_blocks.append((entries, line))
        else:
            if section not in ("scenario", "fluid", "baseline"):
                raise ScenarioSyntaxError(f"unknown section [{section}]", line=line)
            if section in singles:
                raise ScenarioSyntaxError(f"duplicate section [{section}]", line=line)
            singles[section] = (entries, line)
    for section in ("scenario", "fluid", "baseline"):
        if section not in singles:
            raise ScenarioError(f"missing [{section}] section", section)

    sc, sc_line = singles["scenario"]
    _check_keys("scenario", sc, _SCENARIO_KEYS)
    fl, fl_line = singles["fluid"]
    _check_keys("fluid", fl, _FLUID_KEYS)
    bl, bl_line = singles["baseline"]
    _check_keys("baseline", bl, _BASELINE_KEYS)

    def opt(key, kind):
        return _quantity(sc[key], kind, f"scenario.{key}") if key in sc else None

    try:
        fluid = FluidProperties(
            density=_quantity(_require("fluid", fl, "rho", fl_line), "density", "fluid.rho"),
            specific_heat=_quantity(_require("fluid", fl, "cp", fl_line), "specific_heat", "fluid.cp"),
            dynamic_viscosity=_quantity(_require("fluid", fl, "mu", fl_line), "viscosity", "fluid.mu"),
            thermal_conductivity=_quantity(_require("fluid", fl, "k", fl_line), "conductivity", "fluid.k"),
        )
    except DomainError as exc:
        raise ScenarioError(str(exc), "fluid", fl_line) from None

    base_name = normalize_name(_string(_require("baseline", bl, "material", bl_line)))
    if "k_w" in bl:
        base_k = _quantity(bl["k_w"], "conductivity", "baseline.k_w")
    elif base_name in PAPER_MATERIALS:
        base_k = PAPER_MATERIALS[base_name].wall_conductivity
    else:
        raise ScenarioError("missing required field", "baseline.k_w", bl_line)
    n_raw, n_line = _require("baseline", bl, "n", bl_line)
    if not re.fullmatch(r"\d+", n_raw):
        raise ScenarioError(f"must be a positive integer, got {n_raw!r}", "baseline.n", n_line)
    try:
        base_material = MaterialSpec(base_name, base_k)
    except DomainError as exc:
        raise ScenarioError(str(exc), "baseline.k_w", bl_line) from None
    baseline = BaselineGeometry(
        material=base_material,
        L=_quantity(_require("baseline", bl, "L", bl_line), "length", "baseline.L"),
        D=_quantity(_require("baseline", bl, "D", bl_line), "length", "baseline.D"),
        t=_quantity(_require("baseline", bl, "t", bl_line), "length", "baseline.t"),
        W=_quantity(_require("baseline", bl, "W", bl_line), "length", "baseline.W"),
        n=int(n_raw),
    )

    materials = tuple(_material(entries, line, i) for i, (entries, line) in enumerate(material_blocks))

    spec = ScenarioSpec(
        name=_string(_require("scenario", sc, "name", sc_line)),
        strategy=_string(_require("scenario", sc, "strategy", sc_line)),
        eps_d=_quantity(_require("scenario", sc, "eps_d", sc_line), None, "scenario.eps_d"),
        fluid=fluid,
        delta_T=_quantity(_require("scenario", sc, "dT", sc_line), "temperature_difference", "scenario.dT"),
        dp=_quantity(_require("scenario", sc, "dP", sc_line), "pressure", "scenario.dP"),
        t_ref=_quantity(_require("scenario", sc, "t_ref", sc_line), "length", "scenario.t_ref"),
        baseline=baseline,
        materials=materials,
        gamma=opt("gamma", None),
        t_d=opt("t_d", "length"),
        D_min=opt("D_min", "length"),
        dp_ref=opt("dP_ref", "pressure"),
        eps_grid=_grid(sc["eps_grid"], None, "scenario.eps_grid") if "eps_grid" in sc else None,
        t_grid=_grid(sc["t_grid"], "length", "scenario.t_grid") if "t_grid" in sc else None,
        fluid_name=_string(fl["name"]) if "name" in fl else "fluid",
    )
    return spec.validate()


# --- serialization -----------------------------------------------------------


def _fmt(value: float, kind: str | None = None) -> str:
    text = repr(float(value))
    return text if kind is None else f"{text} {_SI_UNIT[kind]}"


def _fmt_grid(values, kind: str | None = None) -> str:
    body = ", ".join(repr(float(v)) for v in values)
    return body if kind is None else f"{body} {_SI_UNIT[kind]}"


def _quote(s: str) -> str:
    if '"' in s:
        raise ValueError(f"cannot serialize string containing a double quote: {s!r}")
    return f'"{s}"' if (not s or s != s.strip() or "#" in s or s.startswith("[")) else s


def serialize_scenario(spec: ScenarioSpec) -> str:
    """Render ``spec`` in SI units; :func:`parse_scenario` inverts this exactly."""
    lines = ["[scenario]", f"name = {_quote(spec.name)}", f"strategy = {spec.strategy}", f"eps_d = {_fmt(spec.eps_d)}"]
    if spec.gamma is not None:
        lines.append(f"gamma = {_fmt(spec.gamma)}")
    lines += [
        f"t_ref = {_fmt(spec.t_ref, 'length')}",
        f"dP = {_fmt(spec.dp, 'pressure')}",
    ]
    if spec.dp_ref is not None:
        lines.append(f"dP_ref = {_fmt(spec.dp_ref, 'pressure')}")
    lines.append(f"dT = {_fmt(spec.delta_T, 'temperature_difference')}")
    if spec.t_d is not None:
        lines.append(f"t_d = {_fmt(spec.t_d, 'length')}")
    if spec.D_min is not None:
        lines.append(f"D_min = {_fmt(spec.D_min, 'length')}")
    if spec.eps_grid is not None:
        lines.append(f"eps_grid = {_fmt_grid(spec.eps_grid)}")
    if spec.t_grid is not None:
        lines.append(f"t_grid = {_fmt_grid(spec.t_grid, 'length')}")
    f = spec.fluid
    lines += [
        "",
        "[fluid]",
        f"name = {_quote(spec.fluid_name)}",
        f"rho = {_fmt(f.density, 'density')}",
        f"cp = {_fmt(f.specific_heat, 'specific_heat')}",
        f"mu = {_fmt(f.dynamic_viscosity, 'viscosity')}",
        f"k = {_fmt(f.thermal_conductivity, 'conductivity')}",
    ]
    b = spec.baseline
    lines += [
        "",
        "[baseline]",
        f"material = {b.material.name}",
        f"k_w = {_fmt(b.material.wall_conductivity, 'conductivity')}",
        f"L = {_fmt(b.L, 'length')}",
        f"D = {_fmt(b.D, 'length')}",
        f"t = {_fmt(b.t, 'length')}",
        f"W = {_fmt(b.W, 'length')}",
        f"n = {b.n}",
    ]
    for m in spec.materials:
        lines += ["", "[[material]]", f"name = {m.name}", f"k_w = {_fmt(m.wall_conductivity, 'conductivity')}"]
        if m.min_thickness is not None:
            lines.append(f"t_min = {_fmt(m.min_thickness, 'length')}")
        if m.note:
            lines.append(f"note = {_quote(m.note)}")
    return "\n".join(lines) + "\n"


# --- builtins ----------------------------------------------------------------


def builtin_paper_scenario(name: str) -> ScenarioSpec:
    """Scenario reproducing one of the published tables or sweeps."""
    if name not in BUILTIN_SCENARIOS:
        raise KeyError(f"unknown builtin scenario {name!r}; expected one of {', '.join(BUILTIN_SCENARIOS)}")
    text = (resources.files("hexopt") / "scenarios" / f"{name}.scn").read_text(encoding="utf-8")
    return parse_scenario(text)


def load_scenario(ref: str) -> ScenarioSpec:
    """Builtin name or path to a scenario file."""
    if ref in BUILTIN_SCENARIOS:
        return builtin_paper_scenario(ref)
    with open(ref, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def with_overrides(spec: ScenarioSpec, **changes) -> ScenarioSpec:
    return dataclasses.replace(spec, **changes).validate()
