"""Bounded-displacement self-maps of a periodic cover: fixed points,
local indices, tameness verification and the bounded index class.

Two map models are supported.

* Analytic (Euclidean covers of flat tori over Z^n): the map is
  ``f(x) = x + d(x)`` with a Z^n-periodic closed-form displacement given by
  exact expressions.  Fixed points are located by damped Newton iteration
  from a deterministic grid, snapped to small-denominator rationals and
  verified symbolically; completeness at grid resolution is a documented
  heuristic, exact afterwards.  An override replaces the displacement on a
  single period cell ``w + [0,1)^n`` of the cover (finitely many
  translates); authors must keep the seam continuous.

* Simplicial (complexes realized with exact rational coordinates): the map
  sends a barycentric subdivision of the quotient simplicially into the
  quotient; fixed points of the affine realization are solved exactly in
  rationals, and solutions on simplex faces are rejected with a
  recommendation to subdivide once more.  Non-equivariant perturbations of
  simplicial maps are supported on trivial-deck covers, where they amount
  to replacing vertex images.

Local indices use the classical convention: the index of a fixed point is
the degree of ``x - f(x)``, i.e. ``sign det(I - Df)`` at nondegenerate
points.  The sign is certified by interval arithmetic for analytic models
and computed in exact rationals for affine pieces; degenerate affine
pieces fall back to an exact PL winding number.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exprs
from .chains import ClassFunction, lefschetz_number_quotient
from .complexes import PeriodicComplex, QuotientComplex, barycentric_subdivide, euler_characteristic
from .errors import InputError, InternalError, TamenessError
from .geometry import (
    barycentric_coordinates,
    det,
    pl_degree_on_diamond,
    point_in_simplex,
    simplex_boundary_squared_distance,
    solve_linear,
    sqrt_lower_bound,
    squared_distance_point_point,
)
from .groups import FiniteGroup, FreeAbelianGroup, group_from_document

NEWTON_GRID = 32
TAMENESS_GRID = 64


@dataclass
class FixedPointRecord:
    """An isolated fixed point (or field zero) with its certificates."""

    position: tuple            # exact rationals when `exact`, floats otherwise
    exact: bool
    host: tuple | None         # (deck element, top simplex index)
    on_face: bool
    index: int | None = None
    coset: object = None
    isolation: Fraction | None = None

    def to_document(self, group):
        return {
            "position": [str(c) for c in self.position],
            "exact": self.exact,
            "host": None if self.host is None else
            {"deck": group.format_element(self.host[0]), "cell": self.host[1]},
            "on_face": self.on_face,
            "index": self.index,
            "coset": None if self.coset is None else group.format_element(self.coset),
            "isolation": None if self.isolation is None else str(self.isolation),
        }


@dataclass
class TamenessReport:
    delta: Fraction | None
    epsilon: Fraction | None
    verdict: str               # "strongly tame" | "tame" | "not tame"
    strongly_fixed_point_free: bool = False
    witnesses: list = field(default_factory=list)

    @property
    def strongly_tame(self) -> bool:
        return self.verdict == "strongly tame"

    def to_document(self):
        return {
            "delta": None if self.delta is None else str(self.delta),
            "epsilon": None if self.epsilon is None else str(self.epsilon),
            "verdict": self.verdict,
            "strongly_fixed_point_free": self.strongly_fixed_point_free,
            "witnesses": self.witnesses,
        }


# ---------------------------------------------------------------------------
# Analytic models on flat-torus covers


class AnalyticModel:
    """Z^n-periodic closed-form displacement or field on a Euclidean cover.

    ``index_matrix_sign`` distinguishes the two uses: a fixed point of
    ``x + d(x)`` has index sign det(-Dd), a field zero has index
    sign det(Dv).
    """

    variant = "analytic"
    index_matrix_sign = -1

    def __init__(self, complex: QuotientComplex, components, bound,
                 overrides=None, grid: int = NEWTON_GRID):
        if not isinstance(complex.group, FreeAbelianGroup):
            raise InputError("analytic models need a free-abelian deck group")
        if complex.coordinates is None:
            raise InputError("analytic models need a realized complex")
        self.complex = complex
        self.group = complex.group
        self.dim = complex.dimension
        if self.group.rank != self.dim:
            raise InputError("deck rank must match the complex dimension")
        self.components = [exprs.parse_expression(c, self.dim) for c in components]
        if len(self.components) != self.dim:
            raise InputError("component count must match the dimension")
        self.bound = Fraction(bound)
        self.jac = exprs.jacobian(self.components, self.dim)
        self.grid = int(grid)
        self.overrides = []
        for ov in overrides or []:
            comps = [exprs.parse_expression(c, self.dim) for c in ov["components"]]
            translate = ov["translate"]
            if not isinstance(translate, tuple):
                translate = self.group.parse_word(translate)
            self.overrides.append({
                "translate": translate,
                "components": comps,
                "jacobian": exprs.jacobian(comps, self.dim),
            })
        self.validate_bound()

    @property
    def equivariant(self) -> bool:
        return not self.overrides

    def override_translates(self):
        return [ov["translate"] for ov in self.overrides]

    def has_override(self, window) -> bool:
        return any(ov["translate"] == window for ov in self.overrides)

    def components_for_window(self, window):
        for ov in self.overrides:
            if ov["translate"] == window:
                return ov["components"], ov["jacobian"]
        return self.components, self.jac

    def window_of(self, position):
        return tuple(int(math.floor(float(c))) for c in position)

    # -- numeric plumbing ----------------------------------------------------

    def _numeric(self, components):
        return exprs.lambdify_vector(components, self.dim)

    def _numeric_jac(self, jac):
        return exprs.lambdify_matrix(jac, self.dim)

    def validate_bound(self, samples: int = 33) -> None:
        axes = [np.linspace(0.0, 1.0, samples, endpoint=False)] * self.dim
        pts = np.array(list(itertools.product(*axes)))
        for comps in [self.components] + [ov["components"] for ov in self.overrides]:
            f = self._numeric(comps)
            worst = float(np.sqrt((f(pts) ** 2).sum(axis=1)).max())
            if worst > float(self.bound) * (1 + 1e-9):
                raise InputError(f"declared bound {self.bound} violated on the "
                                 f"validation grid (observed {worst:.6f})")

    # -- zero localization -----------------------------------------------------

    def zeros_in_window(self, window=None, plain: bool = False):
        """Zeros inside one period cell ``window + [0,1)^n``.

        Damped Newton from a 32^n grid of starts, deduplicated on the
        torus, snapped to small-denominator rationals and verified
        symbolically when possible.  With ``plain=True`` the unoverridden
        expressions are used regardless of the window.
        """
        if window is None:
            window = self.group.identity()
        if plain:
            components, jac = self.components, self.jac
        else:
            components, jac = self.components_for_window(window)
        f = self._numeric(components)
        jf = self._numeric_jac(jac)
        base = np.array([float(x) for x in window])
        axes = [np.linspace(0.0, 1.0, self.grid, endpoint=False)
                + 0.5 / self.grid] * self.dim
        starts = np.array(list(itertools.product(*axes))) + base
        values = f(starts)
        locals_found = []
        for start, v0 in zip(starts, values):
            x, fx = start.copy(), v0
            norm = float(np.abs(fx).max())
            for _ in range(60):
                if norm < 1e-13:
                    break
                try:
                    step = np.linalg.solve(jf(x), fx)
                except np.linalg.LinAlgError:
                    break
                lam, improved = 1.0, False
                for _ in range(20):
                    xn = x - lam * step
                    fn = f(xn[None, :])[0]
                    if float(np.abs(fn).max()) < norm:
                        x, fx = xn, fn
                        norm = float(np.abs(fx).max())
                        improved = True
                        break
                    lam /= 2
                if not improved:
                    break
            if norm >= 1e-13:
                continue
            local = np.mod(x - base, 1.0)
            local = np.where(local > 1.0 - 1e-9, 0.0, local)
            locals_found.append(tuple(local))
        unique = []
        for z in locals_found:
            if not any(max(min(abs(a - b), 1 - abs(a - b))
                           for a, b in zip(z, w)) < 1e-7 for w in unique):
                unique.append(z)
        if len(unique) > 4 * self.grid:
            raise TamenessError("zero set is not isolated at grid resolution "
                                "(Newton converges on a cluster)")
        out = []
        for z in sorted(unique):
            snapped = [exprs.snap_to_rational(c) for c in z]
            if all(s is not None for s in snapped):
                point = {v: s + Fraction(w) for v, s, w in
                         zip(exprs.variables(self.dim), snapped, window)}
                if exprs.is_exact_zero_vector(components, point):
                    out.append((tuple(s + Fraction(w) for s, w in
                                      zip(snapped, window)), True))
                    continue
            out.append((tuple(float(c) + float(w) for c, w in zip(z, window)),
                        False))
        return out

    def local_index_at(self, position, exact: bool, window=None,
                       plain: bool = False) -> int:
        """Index at a zero via the certified Jacobian determinant sign."""
        if window is None:
            window = self.window_of(position)
        if plain:
            _, jac = self.components, self.jac
        else:
            _, jac = self.components_for_window(window)
        if exact:
            import sympy
            m = sympy.Matrix(jac)
            if self.index_matrix_sign < 0:
                m = -m
            point = dict(zip(exprs.variables(self.dim), map(Fraction, position)))
            sign = exprs.certified_sign(m.det(), point)
            if sign == 0:
                raise InputError("degenerate analytic zero: the Jacobian "
                                 "determinant vanishes; demand a smaller "
                                 "isolation radius or simplify the model")
            return sign
        jf = self._numeric_jac(jac)
        m = jf(np.array([float(c) for c in position]))
        if self.index_matrix_sign < 0:
            m = -m
        d = float(np.linalg.det(m))
        if abs(d) < 1e-8:
            raise InputError("degree computation ambiguous at tolerance for a "
                             "non-exact zero; demand a smaller isolation radius")
        return 1 if d > 0 else -1

    def norms_at(self, points: np.ndarray) -> np.ndarray:
        """Displacement/field norms at float samples, override-aware."""
        out = np.empty(len(points))
        buckets: dict = {}
        for i, p in enumerate(points):
            w = tuple(int(math.floor(c)) for c in p)
            buckets.setdefault(w if self.has_override(w) else None, []).append(i)
        for w, idxs in buckets.items():
            comps = self.components if w is None else self.components_for_window(w)[0]
            f = self._numeric(comps)
            sel = np.array(idxs)
            out[sel] = np.sqrt((f(points[sel]) ** 2).sum(axis=1))
        return out


class AnalyticMapModel(AnalyticModel):
    index_matrix_sign = -1


# ---------------------------------------------------------------------------
# Simplicial models


class SimplicialMapModel:
    """Simplicial map from an iterated subdivision of the quotient into it."""

    variant = "simplicial"

    def __init__(self, complex: QuotientComplex, subdivision: int,
                 vertex_images: dict, overrides=None):
        if complex.coordinates is None:
            raise InputError("simplicial models need a realized complex")
        if isinstance(complex.group, FiniteGroup):
            if complex.group.order != 1:
                raise InputError("finite covers are realized for the trivial "
                                 "deck only")
        elif not isinstance(complex.group, FreeAbelianGroup):
            raise InputError("simplicial models need a Euclidean or trivial cover")
        self.complex = complex
        self.group = complex.group
        self.subdivision = int(subdivision)
        if self.subdivision == 0:
            self.source = complex
            self.chain_maps = None
        else:
            sub = barycentric_subdivide(complex, self.subdivision)
            self.source = sub.complex
            self.chain_maps = sub.chain_map
        ident = self.group.identity()
        self.vertex_images = {}
        for v, img in vertex_images.items():
            # images are either a bare target vertex id or an explicit
            # (deck element, target vertex id) pair
            if isinstance(img, tuple):
                deck, w = img
            else:
                deck, w = ident, img
            self.vertex_images[int(v)] = (deck, int(w))
        if set(self.vertex_images) != set(range(self.source.count(0))):
            raise InputError("vertex images must cover exactly the source vertices")
        self.perturbed = bool(overrides)
        if overrides:
            if not (isinstance(self.group, FiniteGroup) and self.group.order == 1):
                raise InputError("simplicial overrides are supported on "
                                 "trivial-deck covers; use analytic overrides "
                                 "for periodic perturbations")
            for v, img in overrides.items():
                self.vertex_images[int(v)] = (ident, int(img))
        self._check_simplicial()

    @property
    def equivariant(self) -> bool:
        # every map of a trivial-deck cover commutes with the (trivial) deck
        return not self.perturbed or \
            (isinstance(self.group, FiniteGroup) and self.group.order == 1)

    def _check_simplicial(self):
        q = self.complex
        for k in range(self.source.dimension + 1):
            for idx in self.source.cells(k):
                image = sorted({self.vertex_images[v][1]
                                for v in self.source.simplex(k, idx)})
                try:
                    q.index_of(len(image) - 1, tuple(image))
                except InputError:
                    raise InputError(
                        f"map is not simplicial: image of source cell "
                        f"{self.source.simplex(k, idx)} spans no simplex")

    def image_position(self, source_vid: int, lift_deck):
        deck_shift, w = self.vertex_images[source_vid]
        g = self.group.multiply(lift_deck, deck_shift)
        vec = self.complex.translation_vector(g)
        return tuple(Fraction(c) + t for c, t in
                     zip(self.complex.coordinates[w], vec))

    def quotient_chain_map(self):
        """Chain-image callable on the quotient for the classical trace."""
        model = self

        class _Composite:
            def chain_image(self, k, idx):
                src = model.source
                terms = model.chain_maps[k][idx] if model.chain_maps else [(idx, 1)]
                out: dict = {}
                for sidx, c in terms:
                    s = src.simplex(k, sidx)
                    image = [model.vertex_images[v][1] for v in s]
                    if len(set(image)) != len(image):
                        continue  # degenerate image carries no chain
                    sign = 1
                    for i in range(len(image)):
                        for j in range(i + 1, len(image)):
                            if image[i] > image[j]:
                                sign = -sign
                    tgt = model.complex.index_of(k, tuple(sorted(image)))
                    out[tgt] = out.get(tgt, 0) + c * sign
                return [(t, c) for t, c in sorted(out.items()) if c]

        return _Composite()


def vertex_permutation_map(complex: QuotientComplex, permutation: dict) -> SimplicialMapModel:
    """Simplicial automorphism of a realized complex from a vertex permutation."""
    images = {v: permutation.get(v, v) for v in range(complex.count(0))}
    return SimplicialMapModel(complex, 0, images)


def subdivided_automorphism(model: SimplicialMapModel) -> SimplicialMapModel:
    """The induced automorphism on the once-subdivided complex.

    The barycenter of a cell maps to the barycenter of the image cell;
    only level-0 automorphisms push forward this way.
    """
    if model.subdivision != 0 or model.perturbed:
        raise InputError("only level-0 automorphisms push to the subdivision")
    sub = barycentric_subdivide(model.complex, 1)
    q = model.complex
    images = {}
    for k in range(q.dimension + 1):
        for idx in q.cells(k):
            s = q.simplex(k, idx)
            image = tuple(sorted(model.vertex_images[v][1] for v in s))
            if len(set(image)) != len(s):
                raise InputError("not an automorphism: a cell image degenerates")
            images[sub.cell_vertex[k][idx]] = sub.cell_vertex[k][q.index_of(k, image)]
    return SimplicialMapModel(sub.complex, 0, images)


# ---------------------------------------------------------------------------
# Host cells


def locate_host_cells(q: QuotientComplex, position, exact: bool):
    """Cover top cells containing an exact Euclidean point.

    Returns ``(deck, top index, 'interior'|'boundary')`` triples.
    """
    if not exact:
        return []
    n = q.dimension
    group = q.group
    out = []
    if isinstance(group, FiniteGroup):
        for idx in q.cells(n):
            status = point_in_simplex(position, q.realize(n, idx))
            if status != "outside":
                out.append((group.identity(), idx, status))
        return out
    pos = [Fraction(c) for c in position]
    for idx in q.cells(n):
        verts = q.realize(n, idx)
        ranges = []
        for i in range(n):
            lo = min(v[i] for v in verts)
            hi = max(v[i] for v in verts)
            ranges.append(range(math.floor(pos[i] - hi), math.ceil(pos[i] - lo) + 1))
        for g in itertools.product(*ranges):
            shifted = tuple(p - Fraction(t) for p, t in zip(pos, g))
            status = point_in_simplex(shifted, verts)
            if status != "outside":
                out.append((tuple(g), idx, status))
    return out


def resolve_record(q: QuotientComplex, position, exact: bool) -> FixedPointRecord:
    hosts = locate_host_cells(q, position, exact)
    interior = [h for h in hosts if h[2] == "interior"]
    if len(interior) == 1:
        g, idx, _ = interior[0]
        depth2 = simplex_boundary_squared_distance(position, q.realize(q.dimension, idx, g))
        return FixedPointRecord(position=position, exact=exact, host=(g, idx),
                                on_face=False, isolation=sqrt_lower_bound(depth2))
    if hosts:
        g, idx, _ = min(hosts, key=lambda h: (q.group.sort_key(h[0]), h[1]))
        return FixedPointRecord(position=position, exact=exact, host=(g, idx),
                                on_face=True, isolation=None)
    return FixedPointRecord(position=position, exact=exact, host=None,
                            on_face=True, isolation=None)


# ---------------------------------------------------------------------------
# Fixed-point search


def find_fixed_points(model, radius: int = 0):
    """Fixed points over all translates with deck coordinate in ball(radius).

    Analytic models search one period cell and translate the result,
    re-solving overridden windows; simplicial models solve the affine
    fixed-point equation exactly in rationals per source top cell.
    Indices are attached separately by :func:`local_index`.
    """
    if isinstance(model, AnalyticModel):
        return _find_analytic(model, radius)
    if isinstance(model, SimplicialMapModel):
        return _find_simplicial(model, radius)
    raise InputError("unknown map model")


def _translate_zero(z, exact, g):
    if exact:
        return tuple(Fraction(c) + Fraction(t) for c, t in zip(z, g))
    return tuple(float(c) + float(t) for c, t in zip(z, g))


def _find_analytic(model: AnalyticModel, radius: int):
    q = model.complex
    group = model.group
    base = model.zeros_in_window(group.identity(), plain=True)
    records = []
    for g in sorted(group.ball(radius), key=group.sort_key):
        if model.has_override(g):
            zeros = model.zeros_in_window(g)
        else:
            zeros = [(_translate_zero(z, exact, g), exact) for z, exact in base]
        for position, exact in zeros:
            records.append(resolve_record(q, position, exact))
    return records


def _solve_affine_fixed_point(source_pos, image_pos):
    """Barycentric solution of sum(l_i (T_i - S_i)) = 0, sum l = 1."""
    k = len(source_pos)
    d = len(source_pos[0])
    matrix = [[image_pos[j][i] - source_pos[j][i] for j in range(k)]
              for i in range(d)]
    matrix.append([Fraction(1)] * k)
    rhs = [Fraction(0)] * d + [Fraction(1)]
    return solve_linear(matrix, rhs)


def _lifted_image_positions(model: SimplicialMapModel, idx: int, lift_deck):
    src = model.source
    s = src.simplex(src.dimension, idx)
    source_pos = src.realize(src.dimension, idx, lift_deck)
    image_pos = []
    for v in s:
        shift = src.group.identity() if v == s[0] else src.edge_label(s[0], v)
        image_pos.append(model.image_position(v, model.group.multiply(lift_deck, shift)))
    return s, source_pos, image_pos


def _find_simplicial(model: SimplicialMapModel, radius: int):
    src = model.source
    q = model.complex
    group = model.group
    n = src.dimension
    ident = group.identity()
    period = []
    for idx in src.cells(n):
        s, source_pos, image_pos = _lifted_image_positions(model, idx, ident)
        status, lam = _solve_affine_fixed_point(source_pos, image_pos)
        if status == "none":
            continue
        if status == "infinite":
            raise TamenessError(
                f"fixed-point set is not isolated: the affine equation on "
                f"source cell {s} is singular (identity-like map)")
        if any(c < 0 for c in lam):
            continue
        if any(c == 0 for c in lam):
            raise InputError(
                "fixed point lies on a simplex face: strong tameness is "
                "violated; apply one more barycentric subdivision of the map")
        position = tuple(sum(lam[j] * source_pos[j][i] for j in range(len(s)))
                         for i in range(len(source_pos[0])))
        period.append(position)
    records = []
    for g in sorted(group.ball(radius), key=group.sort_key):
        vec = q.translation_vector(g)
        for position in period:
            shifted = tuple(p + t for p, t in zip(position, vec))
            records.append(resolve_record(q, shifted, True))
    return records


def local_index(model, record: FixedPointRecord) -> int:
    """Local fixed-point index at an isolated, simplex-interior point."""
    if record.on_face or record.host is None:
        raise InputError("local index needs a strong-tameness witness "
                         "(simplex-interior fixed point)")
    if isinstance(model, AnalyticModel):
        return model.local_index_at(record.position, record.exact)
    if isinstance(model, SimplicialMapModel):
        return _simplicial_index(model, record)
    raise InputError("unknown map model")


def _simplicial_index(model: SimplicialMapModel, record: FixedPointRecord) -> int:
    src = model.source
    n = src.dimension
    interior = [h for h in locate_host_cells(src, record.position, True)
                if h[2] == "interior"]
    if not interior:
        raise InputError("fixed point is not interior to a source cell")
    g, idx, _ = interior[0]
    s, source_pos, image_pos = _lifted_image_positions(model, idx, g)
    d = len(source_pos[0])
    basis = [[source_pos[j + 1][i] - source_pos[0][i] for j in range(n)]
             for i in range(d)]
    chart_cols = []
    for j in range(1, n + 1):
        target = [image_pos[j][i] - image_pos[0][i] for i in range(d)]
        status, col = solve_linear(basis, target)
        if status != "unique":
            raise InternalError("image of the host cell leaves its plane at an "
                                "interior fixed point")
        chart_cols.append(col)
    a_matrix = [[chart_cols[j][i] for j in range(n)] for i in range(n)]
    i_minus_a = [[(1 if i == j else 0) - a_matrix[i][j] for j in range(n)]
                 for i in range(n)]
    d_val = det(i_minus_a)
    if d_val > 0:
        return 1
    if d_val < 0:
        return -1
    # degenerate affine piece: exact winding number of x - f(x) in the chart
    bary = barycentric_coordinates(record.position, source_pos)
    p_chart = tuple(bary[j + 1] for j in range(n))
    shift0 = [image_pos[0][i] - source_pos[0][i] for i in range(d)]
    status, b_chart = solve_linear(basis, shift0)
    if status != "unique":
        raise InternalError("degenerate chart for the PL fallback")

    def u_affine(chart_point):
        fx = [b_chart[i] + sum(a_matrix[i][j] * chart_point[j] for j in range(n))
              for i in range(n)]
        return tuple(chart_point[i] - fx[i] for i in range(n))

    margin = min(min(bary), Fraction(1, 4))
    return pl_degree_on_diamond(u_affine, p_chart, margin / 2)


# ---------------------------------------------------------------------------
# Tameness


def _materialized_zero_set(model, records):
    """Concrete zero positions near the sampled windows, as floats."""
    if not isinstance(model, AnalyticModel):
        return np.array([[float(c) for c in r.position] for r in records])
    group = model.group
    windows = {group.identity()} | set(model.override_translates())
    sampled = set(windows)
    for w in windows:
        for shift in itertools.product((-1, 0, 1), repeat=model.dim):
            sampled.add(tuple(a + b for a, b in zip(w, shift)))
    base = model.zeros_in_window(group.identity(), plain=True)
    pts = []
    for w in sorted(sampled):
        if model.has_override(w):
            zs = model.zeros_in_window(w)
        else:
            zs = [(_translate_zero(z, exact, w), exact) for z, exact in base]
        pts.extend([[float(c) for c in z] for z, _ in zs])
    return np.array(pts) if pts else np.empty((0, model.dim))


def _sample_displacement(model, grid: int):
    """Float positions and displacement norms on a deterministic grid."""
    if hasattr(model, "sample"):
        return model.sample(grid)
    if isinstance(model, AnalyticModel):
        axes = [np.linspace(0.0, 1.0, grid, endpoint=False) + 0.5 / grid] * model.dim
        pts = np.array(list(itertools.product(*axes)))
        windows = [model.group.identity()] + model.override_translates()
        all_pts = np.concatenate([pts + np.array([float(c) for c in w])
                                  for w in windows])
        return all_pts, model.norms_at(all_pts)
    src = model.source
    n = src.dimension
    pts, disp = [], []
    per_cell = max(3, int(round(grid / max(1.0, src.count(n) ** 0.5))))
    ident = model.group.identity()
    for idx in src.cells(n):
        s, source_pos, image_pos = _lifted_image_positions(model, idx, ident)
        for combo in itertools.product(range(1, per_cell), repeat=n):
            if sum(combo) >= per_cell:
                continue
            lam = [per_cell - sum(combo)] + list(combo)
            x = [float(sum(Fraction(lam[j], per_cell) * source_pos[j][i]
                           for j in range(len(s))))
                 for i in range(len(source_pos[0]))]
            fx = [float(sum(Fraction(lam[j], per_cell) * image_pos[j][i]
                            for j in range(len(s))))
                  for i in range(len(source_pos[0]))]
            pts.append(x)
            disp.append(math.dist(x, fx))
    return np.array(pts), np.array(disp)


def _round_down(x: float) -> Fraction:
    scale = 1 << 40
    return Fraction(max(0, math.floor(x * scale)), scale)


def tameness_check(model, records=None, grid: int = TAMENESS_GRID) -> TamenessReport:
    """Verify isolation, displacement gap and host containment.

    delta is the largest certified radius: half the minimum pairwise
    distance among fixed points (periodicity-aware), capped by every
    point's exact distance to its host-simplex boundary.  epsilon is the
    minimum sampled displacement outside the delta-balls, rounded down to
    a rational; the grid refines once when the minimum is suspiciously
    small.  Sampling is a documented heuristic; the zero set itself is
    exact wherever the model permits.
    """
    try:
        if records is None:
            records = find_fixed_points(model, 0)
            if isinstance(model, AnalyticModel):
                extra = [w for w in model.override_translates()
                         if w != model.group.identity()]
                for w in extra:
                    records.extend(resolve_record(model.complex, pos, exact)
                                   for pos, exact in model.zeros_in_window(w))
    except TamenessError as e:
        return TamenessReport(delta=None, epsilon=None, verdict="not tame",
                              witnesses=[str(e)])
    if not records:
        _, disp = _sample_displacement(model, grid)
        eps = _round_down(float(disp.min())) if len(disp) else Fraction(0)
        return TamenessReport(delta=None, epsilon=eps, verdict="strongly tame",
                              strongly_fixed_point_free=True)

    witnesses = []
    hosted = all(r.host is not None and not r.on_face and r.exact for r in records)
    if not hosted:
        witnesses.append("a fixed point lies on a simplex face or resists "
                         "exact containment")

    pair2 = None
    exact_pts = [r.position for r in records if r.exact]
    if len(exact_pts) == len(records):
        periodic = isinstance(model.group, FreeAbelianGroup)
        shifts = list(itertools.product((-1, 0, 1), repeat=len(exact_pts[0]))) \
            if periodic else [tuple(0 for _ in exact_pts[0])]
        for i, p in enumerate(exact_pts):
            for j, qpt in enumerate(exact_pts):
                for shift in shifts:
                    if i == j and all(x == 0 for x in shift):
                        continue
                    moved = tuple(c + Fraction(x) for c, x in zip(qpt, shift))
                    d2 = squared_distance_point_point(p, moved)
                    pair2 = d2 if pair2 is None else min(pair2, d2)
    if pair2 is not None and pair2 == 0:
        return TamenessReport(delta=None, epsilon=None, verdict="not tame",
                              witnesses=["coincident fixed points"])

    delta = None
    if pair2 is not None:
        delta = sqrt_lower_bound(pair2) / 2
    if hosted:
        for r in records:
            delta = r.isolation if delta is None else min(delta, r.isolation)
    if delta is None or delta <= 0:
        return TamenessReport(delta=None, epsilon=None, verdict="not tame",
                              witnesses=witnesses + ["no positive isolation radius"])

    zero_set = _materialized_zero_set(model, records)
    eps_float = None
    for attempt in (1, 2):
        pts, disp = _sample_displacement(model, grid * attempt)
        if len(zero_set):
            diff = pts[:, None, :] - zero_set[None, :, :]
            dist = np.sqrt((diff ** 2).sum(axis=2)).min(axis=1)
            keep = dist > float(delta)
        else:
            keep = np.ones(len(pts), dtype=bool)
        outside = disp[keep]
        if len(outside) == 0:
            return TamenessReport(delta=delta, epsilon=None, verdict="not tame",
                                  witnesses=["delta-balls swallow the sample grid"])
        eps_float = float(outside.min())
        bound_ref = float(getattr(model, "bound", 1)) or 1.0
        if eps_float > 0.1 * bound_ref:
            break
    if eps_float <= 1e-9:
        return TamenessReport(delta=delta, epsilon=Fraction(0), verdict="not tame",
                              witnesses=["sampled displacement vanishes outside "
                                         "the delta-balls"])
    verdict = "strongly tame" if hosted else "tame"
    return TamenessReport(delta=delta, epsilon=_round_down(eps_float),
                          verdict=verdict, witnesses=witnesses)


# ---------------------------------------------------------------------------
# The index class


def lefschetz_class(model, fd=None, report: TamenessReport | None = None) -> ClassFunction:
    """Per-coset fixed-point index sums as a bounded class function.

    Requires strong tameness.  The equivariant behaviour contributes the
    per-period index total to the constant part; overridden windows
    contribute their per-coset deviation to the finite part.  Deck
    coordinates of fixed points resolve to cosets through the fundamental
    domain, boundary ties broken toward the least coset (interior points
    never tie).
    """
    if report is None:
        report = tameness_check(model)
    if not report.strongly_tame:
        raise TamenessError("index class refused: the map is not strongly tame "
                            f"(verdict: {report.verdict}; witnesses: "
                            f"{report.witnesses})")
    group = model.group
    if fd is None:
        fd = PeriodicComplex(model.complex).fundamental_domain()
    if report.strongly_fixed_point_free:
        return ClassFunction(group, 0, {})
    n = model.complex.dimension

    def coset_of(record):
        return fd.coset_of_cell(record.host[0], n, record.host[1])

    if isinstance(group, FiniteGroup):
        finite: dict = {}
        for r in find_fixed_points(model, 0):
            r.index = local_index(model, r)
            r.coset = coset_of(r)
            finite[r.coset] = finite.get(r.coset, 0) + r.index
        return ClassFunction(group, 0, finite)

    if isinstance(model, SimplicialMapModel):
        constant = 0
        for r in find_fixed_points(model, 0):
            constant += local_index(model, r)
        return ClassFunction(group, constant, {})

    # analytic over Z^n
    base = model.zeros_in_window(group.identity(), plain=True)
    constant = 0
    for z, exact in base:
        rec = resolve_record(model.complex, z, exact)
        if rec.on_face or rec.host is None:
            raise TamenessError("equivariant zero lacks a strong-tameness witness")
        constant += model.local_index_at(rec.position, rec.exact, plain=True)
    finite: dict = {}
    for w in model.override_translates():
        for z, exact in [(_translate_zero(z, e, w), e) for z, e in base]:
            rec = resolve_record(model.complex, z, exact)
            idx = model.local_index_at(rec.position, rec.exact, plain=True)
            c = coset_of(rec)
            finite[c] = finite.get(c, 0) - idx
        for z, exact in model.zeros_in_window(w):
            rec = resolve_record(model.complex, z, exact)
            if rec.on_face or rec.host is None:
                raise TamenessError("override zero lacks a strong-tameness witness")
            idx = model.local_index_at(rec.position, rec.exact, window=w)
            c = coset_of(rec)
            finite[c] = finite.get(c, 0) + idx
    return ClassFunction(group, constant, finite)


def ingest_index_data(doc: dict):
    """Class function from externally supplied per-coset index sums."""
    try:
        group = group_from_document(doc["group"])
        f = ClassFunction.from_document(group, doc)
    except KeyError as e:
        raise InputError(f"malformed index-data document: missing {e}")
    note = "externally supplied index data (per-coset sums, not recomputed)"
    return f, note


def equivariant_oracle_check(model, report: TamenessReport | None = None) -> dict:
    """Compare the class constant with the classical alternating trace.

    Only equivariant models descend to the quotient.  A displacement-form
    analytic map is homotopic to the identity on the quotient, whose
    Lefschetz number is the Euler characteristic; a simplicial model is
    traced on rational homology through its subdivision chain equivalence.
    """
    if not model.equivariant:
        raise InputError("oracle comparison needs an equivariant map")
    cls = lefschetz_class(model, report=report)
    if isinstance(model.group, FiniteGroup):
        values = {cls.value(g) for g in model.group.elements()}
        if len(values) != 1:
            raise InternalError("equivariant class is not constant on the deck")
        constant = values.pop()
    else:
        constant = cls.constant
    if isinstance(model, AnalyticModel):
        oracle = euler_characteristic(model.complex)
        method = ("displacement form is homotopic to the identity on the "
                  "quotient; its Lefschetz number is the Euler characteristic")
    else:
        oracle = lefschetz_number_quotient(model.complex, model.quotient_chain_map())
        method = ("alternating trace on rational homology via the subdivision "
                  "chain equivalence")
    return {
        "class_constant": int(constant),
        "classical_lefschetz_number": int(oracle),
        "equal": int(constant) == int(oracle),
        "method": method,
    }


# ---------------------------------------------------------------------------
# Documents


def map_model_from_document(doc: dict, complex_resolver=None):
    """Build a map model from its JSON document.

    The quotient is given inline under "complex" or referenced by fixture
    name under "fixture".
    """
    q = resolve_complex_reference(doc, complex_resolver)
    variant = doc.get("variant")
    if variant == "analytic":
        overrides = [{"translate": ov["translate"], "components": ov["components"]}
                     for ov in doc.get("overrides", [])]
        return AnalyticMapModel(q, doc["components"], Fraction(str(doc["bound"])),
                                overrides=overrides,
                                grid=int(doc.get("grid", NEWTON_GRID)))
    if variant == "simplicial":
        vid = {name: i for i, name in enumerate(q.vertices)}

        def as_vid(x):
            return vid[x] if isinstance(x, str) else int(x)

        images = {}
        for k, v in doc["vertex_images"].items():
            key = as_vid(k)
            if isinstance(v, (list, tuple)):
                images[key] = (q.group.parse_word(v[0]), as_vid(v[1]))
            else:
                images[key] = as_vid(v)
        overrides = {as_vid(k): as_vid(v)
                     for k, v in (doc.get("overrides") or {}).items()}
        return SimplicialMapModel(q, int(doc.get("subdivision", 0)), images,
                                  overrides=overrides or None)
    raise InputError(f"unknown map variant {variant!r}")


def resolve_complex_reference(doc, complex_resolver=None):
    if "complex" in doc:
        return QuotientComplex.from_document(doc["complex"])
    if "fixture" in doc:
        if complex_resolver is None:
            from .fixtures import fixture_complex
            complex_resolver = fixture_complex
        return complex_resolver(doc["fixture"])
    raise InputError("document needs an inline 'complex' or a 'fixture' name")
