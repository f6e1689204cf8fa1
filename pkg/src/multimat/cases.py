"""Built-in test-case catalog and the text configuration format.

Each case carries the domain, resolution, two materials, and a list of
regions which tile the domain (later regions override earlier ones).  The
level set is assembled from the signed distances of the regions assigned to
material 1 (union/difference in evaluation order), so the interface starts
as a signed distance function; cell material ids follow its sign and cell
states come from the innermost matching region.

The file format is flat key-value text with one block per material or
region:

    name = my_case
    domain = 0 1 0 0          # x_lo x_hi y_lo y_hi (y_hi <= y_lo: 1D strip)
    nx = 400
    ny = 1
    cfl = 0.6
    t_end = 0.012
    order = 2
    bc = neumann neumann neumann neumann    # left right bottom top
    output_times = 0.006 0.012              # optional
    output_kinds = linecut                  # linecut | field | schlieren

    [material]                # first block: material 0, second: material 1
    name = air
    gamma = 1.4               # optional: a, b, p_inf, chi, rho0
                              # kind = mie_gruneisen adds rho_ref A1 A2 E1 E2
    [region]
    shape = all               # all | halfplane_x X0 | circle CX CY R
    material = 0              #     | rect XLO YLO XHI YHI
    rho = 1.0
    u1 = 0
    u2 = 0
    p = 1000
"""

from dataclasses import dataclass, field as dfield, replace

import numpy as np

from .errors import ParseError
from .materials import MaterialKind, MaterialParams
from .mesh import BC_NEUMANN, BC_REFLECTIVE, Field2D, Grid
from .levelset import material_of_sign
from .state import PrimState, prim_to_cons
from .materials import DefGrad


@dataclass(frozen=True)
class Region:
    shape: tuple           # ("all",) | ("halfplane_x", x0) | ("circle", cx, cy, r) | ("rect", xlo, ylo, xhi, yhi)
    material: int
    rho: float
    u1: float
    u2: float
    p: float


@dataclass(frozen=True)
class OutputSpec:
    times: tuple = ()
    kinds: tuple = ("linecut",)
    every: float = 0.0


@dataclass(frozen=True)
class CaseConfig:
    name: str
    domain: tuple          # (x_lo, x_hi, y_lo, y_hi); y_hi <= y_lo: 1D strip
    nx: int
    ny: int
    t_end: float
    materials: tuple
    regions: tuple
    cfl: float = 0.6
    order: int = 2
    bc: tuple = (BC_NEUMANN, BC_NEUMANN, BC_NEUMANN, BC_NEUMANN)
    outputs: OutputSpec = OutputSpec()
    description: str = ""

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def region_sdf(shape, x, y):
    """Signed distance (negative inside) of one region shape."""
    kind = shape[0]
    if kind == "all":
        far = np.hypot(np.ptp(x), np.ptp(y)) + 1.0
        return np.full(np.broadcast(x, y).shape, -far)
    if kind == "halfplane_x":
        return np.broadcast_to(x - shape[1], np.broadcast(x, y).shape).copy()
    if kind == "circle":
        cx, cy, r = shape[1:]
        return np.hypot(x - cx, y - cy) - r
    if kind == "rect":
        xlo, ylo, xhi, yhi = shape[1:]
        qx = np.maximum(xlo - x, x - xhi)
        qy = np.maximum(ylo - y, y - yhi)
        outside = np.hypot(np.maximum(qx, 0.0), np.maximum(qy, 0.0))
        inside = np.minimum(np.maximum(qx, qy), 0.0)
        return outside + inside
    raise ParseError(f"unknown region shape {kind!r}")


def build_field(cfg):
    """Instantiate the padded field of a case: level set, materials, states."""
    x_lo, x_hi, y_lo, y_hi = cfg.domain
    dx1 = (x_hi - x_lo) / cfg.nx
    dx2 = (y_hi - y_lo) / cfg.ny if y_hi > y_lo else dx1
    grid = Grid(nx=cfg.nx, ny=cfg.ny, dx1=dx1, dx2=dx2, x0=x_lo, y0=y_lo)
    field = Field2D(grid, cfg.materials)

    ng = grid.n_ghost
    xs = x_lo + (np.arange(grid.shape[0]) - ng + 0.5) * dx1
    ys = y_lo + (np.arange(grid.shape[1]) - ng + 0.5) * dx2
    xg, yg = np.meshgrid(xs, ys, indexing="ij")

    far = abs(x_hi - x_lo) + abs(y_hi - y_lo) + 1.0
    phi_b = np.full(grid.shape, far)   # signed distance of the material-1 set
    for region in cfg.regions:
        sdf = region_sdf(region.shape, xg, yg)
        if region.material == 1:
            phi_b = np.minimum(phi_b, sdf)
        else:
            phi_b = np.maximum(phi_b, -sdf)
    field.phi[:] = phi_b
    field.mat[:] = material_of_sign(field.phi)

    state_idx = np.full(grid.shape, -1, dtype=np.int64)
    for k, region in enumerate(cfg.regions):
        contains = region_sdf(region.shape, xg, yg) <= 0.0
        mask = contains & (field.mat == region.material)
        state_idx[mask] = k
    if (state_idx < 0).any():
        # interface-rounding leftovers: nearest region of the right material
        for m in (0, 1):
            hole = (state_idx < 0) & (field.mat == m)
            if not hole.any():
                continue
            dists = [region_sdf(r.shape, xg, yg) if r.material == m
                     else np.full(grid.shape, np.inf)
                     for r in cfg.regions]
            state_idx[hole] = np.argmin(np.stack(dists), axis=0)[hole]

    eye = DefGrad.identity()
    for k, region in enumerate(cfg.regions):
        mask = state_idx == k
        if not mask.any():
            continue
        w = PrimState(rho=region.rho, u1=region.u1, u2=region.u2, p=region.p,
                      g=eye)
        field.u[mask] = prim_to_cons(cfg.materials[region.material], w)
    return field


# ---------------------------------------------------------------------------
# Built-in catalog (1D shock tubes, shock-bubble interactions, impacts).
# ---------------------------------------------------------------------------

_AIR = MaterialParams.perfect_gas(1.4, name="air")
_COPPER = MaterialParams.neohookean(4.22, 3.42e10, 5e10, 8900.0, name="copper")


def _tube(name, mat_l, state_l, mat_r, state_r, x0, t_end, description,
          nx=1000):
    regions = (
        Region(("all",), 1, *state_r),
        Region(("halfplane_x", x0), 0, *state_l),
    )
    return CaseConfig(
        name=name, domain=(0.0, 1.0, 0.0, 0.0), nx=nx, ny=1, t_end=t_end,
        materials=(mat_l, mat_r), regions=regions,
        outputs=OutputSpec(times=(t_end,), kinds=("linecut",)),
        description=description)


def _builtin():
    gas_l = MaterialParams.perfect_gas(1.4, name="gas_left")
    gas_r16 = MaterialParams.perfect_gas(1.6, name="gas_right")
    water = MaterialParams.stiffened_gas(4.4, 6.8e8, name="water")
    mg = MaterialParams.mie_gruneisen(2.19, 1134.0, 0.819181e9, 1.50835e9,
                                      4.52969, 1.42144, name="mg_fluid")
    helium = MaterialParams.perfect_gas(1.648, name="helium")
    water9 = MaterialParams.stiffened_gas(4.4, 6e8, name="water")
    vdw = MaterialParams.van_der_waals(1.4, 5.0, 1e-3, name="vdw_air")

    cases = {}
    cases["tc1"] = _tube(
        "tc1", gas_l, (1.0, 0.0, 0.0, 1000.0),
        MaterialParams.perfect_gas(1.4, name="gas_right"),
        (1.0, 0.0, 0.0, 0.01), 0.5, 0.012,
        "gas-gas shock tube, pressure ratio 1e5")
    cases["tc2"] = _tube(
        "tc2", gas_l, (1.0, 0.0, 0.0, 500.0), gas_r16,
        (1.0, 0.0, 0.0, 0.2), 0.5, 0.01,
        "gas-gas shock tube, different adiabatic exponents")
    cases["tc3"] = _tube(
        "tc3", water, (1000.0, 0.0, 0.0, 1e9), _AIR,
        (50.0, 0.0, 0.0, 1e5), 0.7, 2.4e-4,
        "water-air shock tube, large density and pressure ratios")
    cases["tc4"] = _tube(
        "tc4", _COPPER, (8900.0, 0.0, 0.0, 1e9), _COPPER,
        (8900.0, 0.0, 100.0, 1e5), 0.5, 5e-5,
        "copper shock tube with a tangential velocity jump (five waves)")
    cases["tc5"] = _tube(
        "tc5", _COPPER, (8900.0, 1000.0, 100.0, 1e5), _AIR,
        (1.0, 1000.0, 0.0, 1e5), 0.5, 1.5e-4,
        "copper-air interface advected at uniform speed with slip", nx=100)
    cases["tc6"] = _tube(
        "tc6", _COPPER, (8900.0, 0.0, 0.0, 5e9), _AIR,
        (50.0, 0.0, 0.0, 1e5), 0.6, 8.7e-5,
        "copper-air shock tube, high pressure and density ratios")
    cases["tc7"] = _tube(
        "tc7", mg, (1134.0, 0.0, 0.0, 20e9),
        MaterialParams.mie_gruneisen(2.19, 1134.0, 0.819181e9, 1.50835e9,
                                     4.52969, 1.42144, name="mg_fluid_r"),
        (1200.0, 0.0, 0.0, 0.2e6), 0.6, 50e-6,
        "shock tube in a Mie-Gruneisen fluid")

    air_pre = (1.225, 0.0, 0.0, 101325.0)
    air_post = (1.6861, -113.534, 0.0, 159059.0)
    cases["tc8"] = CaseConfig(
        name="tc8", domain=(0.0, 0.445, 0.0, 0.089), nx=2000, ny=400,
        t_end=983e-6,
        materials=(_AIR, helium),
        regions=(
            Region(("all",), 0, *air_pre),
            Region(("rect", 0.225, -1.0, 1.0, 1.0), 0, *air_post),
            Region(("circle", 0.175, 0.0445, 0.025), 1, 0.2228, 0.0, 0.0, 101325.0),
        ),
        bc=(BC_NEUMANN, BC_NEUMANN, BC_REFLECTIVE, BC_REFLECTIVE),
        outputs=OutputSpec(times=tuple(t * 1e-6 for t in
                                       (23, 42, 53, 66, 75, 102, 260, 445,
                                        674, 983)),
                           kinds=("schlieren", "field")),
        description="Mach 1.22 air shock hitting a helium bubble")

    cases["tc9"] = CaseConfig(
        name="tc9", domain=(-0.2, 1.0, 0.0, 1.0), nx=480, ny=400,
        t_end=500e-6,
        materials=(water9, vdw),
        regions=(
            Region(("all",), 0, 1000.0, 0.0, 0.0, 1e5),
            Region(("rect", 0.7, -1.0, 2.0, 2.0), 0, 1230.0, -432.69, 0.0, 1e9),
            Region(("circle", 0.4, 0.5, 0.2), 1, 1.0, 0.0, 0.0, 1e5),
        ),
        bc=(BC_NEUMANN, BC_NEUMANN, BC_REFLECTIVE, BC_REFLECTIVE),
        outputs=OutputSpec(times=tuple(t * 1e-6 for t in
                                       (106, 204, 301, 358, 406, 500)),
                           kinds=("schlieren", "field", "linecut")),
        description="Mach 1.422 water shock hitting a gas bubble "
                    "(bubble constitutive set chosen here; qualitative case)")

    vdw12 = MaterialParams.van_der_waals(1.4, 5.0, 1e-3, name="vdw_air")
    cases["tc10"] = CaseConfig(
        name="tc10", domain=(-0.5, 0.5, -0.5, 0.5), nx=1000, ny=1000,
        t_end=710e-6,
        materials=(vdw12, _COPPER),
        regions=(
            Region(("all",), 0, 1.2, 0.0, 0.0, 1e5),
            Region(("rect", 0.0, -0.3, 0.1, 0.3), 1, 8900.0, 0.0, 0.0, 1e5),
            Region(("rect", -0.1, -0.05, 0.0, 0.05), 1, 8900.0, 800.0, 0.0, 1e5),
        ),
        outputs=OutputSpec(times=tuple(t * 1e-6 for t in (27, 140, 420, 710)),
                           kinds=("schlieren", "field")),
        description="copper projectile impacting a copper plate in air")

    liquid8900 = MaterialParams(gamma=4.22, p_inf=3.42e10, rho0=8900.0,
                                name="liquid")
    air11 = MaterialParams.perfect_gas(1.4, name="air")
    cases["tc11"] = CaseConfig(
        name="tc11", domain=(-0.5, 0.5, -0.5, 0.5), nx=1000, ny=1000,
        t_end=710e-6,
        materials=(air11, liquid8900),
        regions=(
            Region(("all",), 0, 1.0, 0.0, 0.0, 1e5),
            Region(("rect", 0.0, -0.3, 0.1, 0.3), 1, 8900.0, 0.0, 0.0, 1e5),
            Region(("rect", -0.1, -0.05, 0.0, 0.05), 1, 8900.0, 800.0, 0.0, 1e5),
        ),
        outputs=OutputSpec(times=tuple(t * 1e-6 for t in (38, 140, 420, 710)),
                           kinds=("schlieren", "field")),
        description="projectile/plate impact with the shear modulus dropped")
    return cases


_CATALOG = None


def case_names():
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _builtin()
    return sorted(_CATALOG)


def load_case(name_or_path, **overrides):
    """A built-in case by name, or a parsed configuration file."""
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _builtin()
    if name_or_path in _CATALOG:
        return _CATALOG[name_or_path].with_overrides(**overrides)
    return parse_case_file(name_or_path).with_overrides(**overrides)


# ---------------------------------------------------------------------------
# Configuration file parser.
# ---------------------------------------------------------------------------

_MAT_KEYS = {"kind", "gamma", "a", "b", "p_inf", "chi", "rho0", "rho_ref",
             "A1", "A2", "E1", "E2", "name"}
_REGION_KEYS = {"shape", "material", "rho", "u1", "u2", "p"}
_BC_NAMES = {BC_NEUMANN, BC_REFLECTIVE}


def parse_case_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read case file {path!r}: {exc}")

    top = {}
    materials = []
    regions = []
    section = None          # None | dict being filled
    section_kind = None

    def close_section(lineno):
        nonlocal section, section_kind
        if section is None:
            return
        if section_kind == "material":
            materials.append(_material_from(section, lineno))
        else:
            regions.append(_region_from(section, lineno))
        section = None
        section_kind = None

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", line=lineno)
            close_section(lineno)
            section_kind = line[1:-1].strip().lower()
            if section_kind not in ("material", "region"):
                raise ParseError(f"unknown section {section_kind!r}",
                                 line=lineno)
            section = {"__line__": lineno}
            continue
        if "=" not in line:
            raise ParseError("expected key = value", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if section is not None:
            allowed = _MAT_KEYS if section_kind == "material" else _REGION_KEYS
            if key not in allowed:
                raise ParseError(f"unknown {section_kind} key {key!r}",
                                 line=lineno, field=key)
            section[key] = (value, lineno)
        else:
            top[key] = (value, lineno)
    close_section(len(lines))

    def want(key, conv=str, default=None):
        if key not in top:
            if default is not None:
                return default
            raise ParseError(f"missing top-level key {key!r}", field=key)
        value, lineno = top[key]
        try:
            return conv(value)
        except ValueError:
            raise ParseError(f"bad value for {key!r}: {value!r}",
                             line=lineno, field=key)

    def floats(value):
        return tuple(float(v) for v in value.split())

    domain = want("domain", floats)
    if len(domain) != 4:
        raise ParseError("domain needs four numbers", field="domain")
    bc = tuple(want("bc", str, " ".join([BC_NEUMANN] * 4)).split())
    if len(bc) != 4 or any(b not in _BC_NAMES for b in bc):
        raise ParseError(f"bc must be four of {sorted(_BC_NAMES)}", field="bc")
    if len(materials) != 2:
        raise ParseError(f"exactly two materials required, got {len(materials)}")
    if not regions:
        raise ParseError("at least one region is required")
    times = want("output_times", floats, ())
    kinds = tuple(want("output_kinds", str, "linecut").split())
    for kind in kinds:
        if kind not in ("linecut", "field", "schlieren"):
            raise ParseError(f"unknown output kind {kind!r}",
                             field="output_kinds")
    return CaseConfig(
        name=want("name", str, "custom"),
        domain=domain,
        nx=want("nx", int),
        ny=want("ny", int, 1),
        t_end=want("t_end", float),
        cfl=want("cfl", float, 0.6),
        order=want("order", int, 2),
        bc=bc,
        materials=tuple(materials),
        regions=tuple(regions),
        outputs=OutputSpec(times=times, kinds=kinds,
                           every=want("output_every", float, 0.0)))


def _material_from(section, lineno):
    def num(key, default=0.0):
        if key not in section:
            return default
        value, ln = section[key]
        try:
            return float(value)
        except ValueError:
            raise ParseError(f"bad number for {key!r}: {value!r}", line=ln,
                             field=key)

    kind_val = section.get("kind", ("general", lineno))[0].lower()
    if kind_val not in ("general", "mie_gruneisen"):
        raise ParseError(f"unknown material kind {kind_val!r}",
                         line=section["__line__"], field="kind")
    try:
        if kind_val == "mie_gruneisen":
            return MaterialParams(
                kind=MaterialKind.MieGruneisen, gamma=num("gamma", 1.4),
                rho_ref=num("rho_ref"), A1=num("A1"), A2=num("A2"),
                E1=num("E1"), E2=num("E2"),
                rho0=num("rho0", num("rho_ref", 1.0)),
                name=section.get("name", ("", 0))[0])
        return MaterialParams(
            gamma=num("gamma", 1.4), a=num("a"), b=num("b"),
            p_inf=num("p_inf"), chi=num("chi"), rho0=num("rho0", 1.0),
            name=section.get("name", ("", 0))[0])
    except ValueError as exc:
        raise ParseError(str(exc), line=section["__line__"])


def _region_from(section, lineno):
    if "shape" not in section:
        raise ParseError("region needs a shape", line=section["__line__"],
                         field="shape")
    words = section["shape"][0].split()
    kind = words[0]
    try:
        if kind == "all":
            shape = ("all",)
        elif kind == "halfplane_x":
            shape = ("halfplane_x", float(words[1]))
        elif kind == "circle":
            shape = ("circle", float(words[1]), float(words[2]),
                     float(words[3]))
        elif kind == "rect":
            shape = ("rect", float(words[1]), float(words[2]),
                     float(words[3]), float(words[4]))
        else:
            raise ParseError(f"unknown shape {kind!r}",
                             line=section["shape"][1], field="shape")
    except (IndexError, ValueError):
        raise ParseError(f"bad shape spec {section['shape'][0]!r}",
                         line=section["shape"][1], field="shape")

    def num(key, default=None):
        if key not in section:
            if default is not None:
                return default
            raise ParseError(f"region needs {key!r}",
                             line=section["__line__"], field=key)
        value, ln = section[key]
        try:
            return float(value)
        except ValueError:
            raise ParseError(f"bad number for {key!r}: {value!r}", line=ln,
                             field=key)

    material = int(num("material"))
    if material not in (0, 1):
        raise ParseError("region material must be 0 or 1",
                         line=section["__line__"], field="material")
    return Region(shape=shape, material=material, rho=num("rho"),
                  u1=num("u1", 0.0), u2=num("u2", 0.0), p=num("p"))
