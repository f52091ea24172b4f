"""Periodic oriented simplicial pseudomanifolds given by finite quotient data.

A :class:`QuotientComplex` is a finite simplicial complex together with a
deck group, a group label on every oriented edge (the holonomy description
of a covering), an orientation sign on every top simplex and a spanning
tree on which labels are normalized to the identity.  The covering space is
never stored; cells of the cover are pairs ``(g, simplex)`` and adjacency
is resolved through the edge labels, so any finite region can be
materialized lazily.

Simplices are stored as ascending tuples of vertex ids.  With that
normalization the j-th face of a simplex is again ascending and the
boundary coefficient is exactly ``(-1)**j``, which keeps all chain-level
bookkeeping free of permutation parities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError, InternalError, OrientationError, ResourceError
from .groups import FreeAbelianGroup, FiniteGroup, group_from_document, group_to_document


@dataclass
class ValidationReport:
    """Diagnostics from :func:`validate_quotient`; empty means valid."""

    violations: list = field(default_factory=list)

    def add(self, kind: str, detail: str) -> None:
        self.violations.append({"kind": kind, "detail": detail})

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v["kind"] for v in self.violations}

    def to_document(self) -> dict:
        return {"valid": self.valid, "violations": self.violations}


class QuotientComplex:
    """Finite quotient datum of a periodic complex.

    Parameters
    ----------
    group : MarkedGroup
        The deck group of the encoded covering.
    vertices : list of str
        Vertex names; vertex ids are positions in this list.
    simplices_by_dim : list of list of tuple
        ``simplices_by_dim[k]`` lists the k-simplices as ascending tuples
        of vertex ids.  Dimension 0 must enumerate all vertices.
    orientation : dict
        Sign (+1/-1) per top-simplex index.
    labels : dict
        Deck label per edge index, for the ascending direction of the edge.
    tree : set
        Edge indices of the spanning tree used for label normalization.
        May be empty for derived complexes.
    coordinates : dict, optional
        Exact rational coordinates per vertex id, for complexes with a
        Euclidean model (flat torus covers, realized finite complexes).
    """

    def __init__(self, group, vertices, simplices_by_dim, orientation, labels,
                 tree=frozenset(), coordinates=None, name=""):
        self.group = group
        self.vertices = list(vertices)
        self.simplices = [list(map(tuple, dim_list)) for dim_list in simplices_by_dim]
        self.dimension = len(self.simplices) - 1
        self.orientation = dict(orientation)
        self.labels = dict(labels)
        self.tree = frozenset(tree)
        self.coordinates = dict(coordinates) if coordinates else None
        self.name = name
        self._index = [
            {s: i for i, s in enumerate(dim_list)} for dim_list in self.simplices
        ]
        self._check_basic_shape()

    # -- basic structure ----------------------------------------------------

    def _check_basic_shape(self):
        if not self.simplices or len(self.simplices[0]) != len(self.vertices):
            raise InputError("dimension 0 must enumerate all vertices")
        for k, dim_list in enumerate(self.simplices):
            for s in dim_list:
                if len(s) != k + 1:
                    raise InputError(f"simplex {s} listed in dimension {k}")
                if list(s) != sorted(set(s)):
                    raise InputError(f"simplex {s} is not an ascending vertex tuple")
        if len(set(map(tuple, self.simplices[0]))) != len(self.vertices):
            raise InputError("duplicate vertices in dimension 0")

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if 0 <= k <= self.dimension else 0

    def cells(self, k: int):
        return range(self.count(k))

    def index_of(self, k: int, simplex) -> int:
        try:
            return self._index[k][tuple(simplex)]
        except KeyError:
            raise InputError(f"simplex {simplex} of dimension {k} is not present")

    def simplex(self, k: int, idx: int):
        return self.simplices[k][idx]

    def vertex_name(self, vid: int) -> str:
        return self.vertices[vid]

    # -- labels ---------------------------------------------------------------

    def edge_label(self, u: int, v: int):
        """Deck label of the oriented edge u -> v."""
        if u == v:
            raise InternalError("degenerate edge")
        if u < v:
            idx = self.index_of(1, (u, v))
            return self.labels[idx]
        idx = self.index_of(1, (v, u))
        return self.group.inverse(self.labels[idx])

    def shift(self, simplex, face):
        """Deck shift from a simplex anchor to a face anchor.

        The lift of ``simplex`` with deck coordinate g has its face over
        ``face`` at deck coordinate ``g * shift(simplex, face)``.
        """
        if simplex[0] == face[0]:
            return self.group.identity()
        return self.edge_label(simplex[0], face[0])

    def face_data(self, k: int, idx: int):
        """Faces of a k-simplex: list of (face_index, sign, deck_shift)."""
        s = self.simplex(k, idx)
        out = []
        for j in range(k + 1):
            face = s[:j] + s[j + 1:]
            out.append((self.index_of(k - 1, face), (-1) ** j, self.shift(s, face)))
        return out

    def subface_shift(self, k: int, idx: int, positions):
        """Face of a simplex spanned by the given vertex positions.

        Returns ``(face_dim, face_index, deck_shift)`` for the sub-simplex
        on ``positions`` (ascending position tuple).
        """
        s = self.simplex(k, idx)
        face = tuple(s[p] for p in positions)
        fk = len(face) - 1
        return fk, self.index_of(fk, face), self.shift(s, face)

    # -- cover geometry --------------------------------------------------------

    def top_cofaces(self, k: int, idx: int):
        """Top-simplex indices containing a given k-simplex."""
        if not hasattr(self, "_cofaces"):
            cof = [dict() for _ in range(self.dimension + 1)]
            n = self.dimension
            for t, s in enumerate(self.simplices[n]):
                for k2 in range(n + 1):
                    for face in _subtuples(s, k2 + 1):
                        cof[k2].setdefault(self.index_of(k2, face), []).append(t)
            self._cofaces = cof
        return self._cofaces[k].get(idx, [])

    def translation_vector(self, g):
        """Euclidean translation of a deck element, for Euclidean models."""
        if isinstance(self.group, FreeAbelianGroup):
            return tuple(Fraction(x) for x in g)
        if isinstance(self.group, FiniteGroup):
            d = len(next(iter(self.coordinates.values()))) if self.coordinates else 0
            return (Fraction(0),) * d
        raise InputError("complex has no Euclidean model for this deck group")

    def realize(self, k: int, idx: int, g=None):
        """Exact vertex positions of the cover cell (g, simplex).

        Requires coordinates.  Vertex i of the lift sits at
        ``coord(v_i) + vec(g * shift)`` where the shift is the label from
        the simplex anchor to that vertex.
        """
        if self.coordinates is None:
            raise InputError("complex carries no coordinates")
        if g is None:
            g = self.group.identity()
        s = self.simplex(k, idx)
        out = []
        for v in s:
            shift = self.group.identity() if v == s[0] else self.edge_label(s[0], v)
            vec = self.translation_vector(self.group.multiply(g, shift))
            out.append(tuple(Fraction(c) + w for c, w in zip(self.coordinates[v], vec)))
        return out

    # -- documents ---------------------------------------------------------------

    def _skey(self, k, idx):
        return "|".join(self.vertices[v] for v in self.simplex(k, idx))

    def to_document(self) -> dict:
        n = self.dimension
        doc = {
            "dimension": n,
            "group": group_to_document(self.group),
            "vertices": list(self.vertices),
            "simplices": {
                str(k): [[self.vertices[v] for v in s] for s in self.simplices[k]]
                for k in range(n + 1)
            },
            "orientation": {self._skey(n, i): self.orientation[i]
                            for i in sorted(self.orientation)},
            "labels": {self._skey(1, i): self.group.format_element(lbl)
                       for i, lbl in sorted(self.labels.items())},
            "tree": sorted(self._skey(1, i) for i in self.tree),
        }
        if self.coordinates is not None:
            doc["coordinates"] = {
                self.vertices[v]: [_format_fraction(c) for c in cs]
                for v, cs in sorted(self.coordinates.items())
            }
        if self.name:
            doc["name"] = self.name
        return doc

    @classmethod
    def from_document(cls, doc: dict) -> "QuotientComplex":
        try:
            group = group_from_document(doc["group"])
            names = list(doc["vertices"])
            vid = {name: i for i, name in enumerate(names)}
            if len(vid) != len(names):
                raise InputError("duplicate vertex names")
            n = int(doc["dimension"])
            simplices = []
            for k in range(n + 1):
                rows = doc["simplices"].get(str(k), [])
                dim_list = []
                for row in rows:
                    ids = tuple(vid[x] for x in row)
                    if list(ids) != sorted(set(ids)):
                        raise InputError(f"simplex {row} must be ascending and repeat-free")
                    dim_list.append(ids)
                simplices.append(dim_list)
            c = cls(group, names, simplices, {}, {}, name=doc.get("name", ""))

            # keys referencing absent simplices are dropped here; the
            # validator reports the underlying missing faces/labels
            orientation = {}
            for key, sign in doc.get("orientation", {}).items():
                parts = tuple(vid[x] for x in key.split("|"))
                if parts in c._index[n]:
                    orientation[c._index[n][parts]] = int(sign)
            labels = {}
            for key, word in doc.get("labels", {}).items():
                a, b = (vid[x] for x in key.split("|"))
                lbl = group.parse_word(word)
                if a > b:
                    a, b = b, a
                    lbl = group.inverse(lbl)
                if (a, b) in c._index[1]:
                    labels[c._index[1][(a, b)]] = lbl
            tree = set()
            for key in doc.get("tree", []):
                a, b = sorted(vid[x] for x in key.split("|"))
                if (a, b) in c._index[1]:
                    tree.add(c._index[1][(a, b)])
            coords = None
            if "coordinates" in doc:
                coords = {vid[v]: tuple(_parse_fraction(x) for x in row)
                          for v, row in doc["coordinates"].items()}
            c.orientation = orientation
            c.labels = labels
            c.tree = frozenset(tree)
            c.coordinates = coords
            return c
        except (KeyError, ValueError, TypeError) as e:
            raise InputError(f"malformed complex document: {e}")


def _subtuples(s, size):
    if size == len(s):
        return [tuple(s)]
    out = []

    def rec(start, chosen):
        if len(chosen) == size:
            out.append(tuple(chosen))
            return
        for i in range(start, len(s)):
            rec(i + 1, chosen + [s[i]])

    rec(0, [])
    return out


def _format_fraction(f: Fraction) -> str:
    f = Fraction(f)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def _parse_fraction(text) -> Fraction:
    return Fraction(str(text))


# ---------------------------------------------------------------------------
# Validation


def validate_quotient(q: QuotientComplex) -> ValidationReport:
    """Check the pseudomanifold, orientation, cocycle and complex conditions."""
    report = ValidationReport()
    n = q.dimension

    # simplicial-complex condition: all faces present
    for k in range(1, n + 1):
        for idx, s in enumerate(q.simplices[k]):
            for j in range(k + 1):
                face = s[:j] + s[j + 1:]
                if face not in q._index[k - 1]:
                    report.add("simplicial-complex condition",
                               f"face {face} of {s} is missing")

    # labels present on every edge, tree normalized
    for idx in q.cells(1):
        if idx not in q.labels:
            report.add("label condition", f"edge {q.simplex(1, idx)} has no label")
    for idx in q.tree:
        if q.labels.get(idx) != q.group.identity():
            report.add("tree condition",
                       f"tree edge {q.simplex(1, idx)} has a non-identity label")
    if q.tree:
        if len(q.tree) != len(q.vertices) - 1:
            report.add("tree condition", "tree edge count is not |V| - 1")
        seen = {0}
        changed = True
        while changed:
            changed = False
            for idx in q.tree:
                u, v = q.simplex(1, idx)
                if (u in seen) != (v in seen):
                    seen |= {u, v}
                    changed = True
        if len(seen) != len(q.vertices):
            report.add("tree condition", "tree does not span the vertex set")

    # cocycle condition on 2-simplices
    if n >= 2 and not report.kinds() & {"label condition", "simplicial-complex condition"}:
        for idx in q.cells(2):
            a, b, c = q.simplex(2, idx)
            lhs = q.group.multiply(q.edge_label(a, b), q.edge_label(b, c))
            if lhs != q.edge_label(a, c):
                report.add("cocycle condition",
                           f"labels around 2-simplex {q.simplex(2, idx)} do not compose")

    # pseudomanifold + orientation coherence (faces keyed by vertex tuple,
    # no label lookups, so this also runs on otherwise-broken documents)
    if n >= 1:
        incidence = {}
        for idx in q.cells(n):
            sign = q.orientation.get(idx)
            if sign not in (1, -1):
                report.add("orientation data", f"top simplex {q.simplex(n, idx)} "
                                               "has no +1/-1 orientation sign")
                continue
            s = q.simplex(n, idx)
            for j in range(n + 1):
                face = s[:j] + s[j + 1:]
                incidence.setdefault(face, []).append(sign * (-1) ** j)
        for face in map(tuple, q.simplices[n - 1]):
            inc = incidence.get(face, [])
            if len(inc) != 2:
                report.add("pseudomanifold condition",
                           f"face {face} lies in {len(inc)} top simplices (expected 2)")
            elif sum(inc) != 0:
                report.add("orientation coherence",
                           f"induced orientations on face {face} agree "
                           "instead of being opposite")
    return report


def orient_pseudomanifold(q: QuotientComplex) -> dict:
    """Coherent orientation signs by dual propagation.

    Raises OrientationError when no coherent assignment exists.  The result
    is deterministic: top simplex 0 gets +1 and signs propagate across
    shared faces in index order.
    """
    n = q.dimension
    face_to_tops = {}
    for idx in q.cells(n):
        for fidx, fsign, _ in q.face_data(n, idx):
            face_to_tops.setdefault(fidx, []).append((idx, fsign))
    signs = {}
    for seed in q.cells(n):
        if seed in signs:
            continue
        signs[seed] = 1
        queue = [seed]
        while queue:
            queue.sort()
            idx = queue.pop(0)
            for fidx, fsign, _ in q.face_data(n, idx):
                inc = face_to_tops.get(fidx, [])
                if len(inc) != 2:
                    raise OrientationError("not a pseudomanifold: face "
                                           f"{q.simplex(n - 1, fidx)}")
                for other, osign in inc:
                    if other == idx and osign == fsign:
                        continue
                    needed = -signs[idx] * fsign * osign
                    if other in signs:
                        if signs[other] != needed:
                            raise OrientationError(
                                "no coherent orientation exists (first conflict at "
                                f"face {q.simplex(n - 1, fidx)})")
                    else:
                        signs[other] = needed
                        queue.append(other)
    return signs


def euler_characteristic(q: QuotientComplex) -> int:
    return sum((-1) ** k * q.count(k) for k in range(q.dimension + 1))


# ---------------------------------------------------------------------------
# Lazy cover materialization


class Region:
    """Materialized cover cells whose deck coordinate lies in a ball."""

    def __init__(self, pc: "PeriodicComplex", radius: int, ball):
        self.pc = pc
        self.radius = radius
        self.ball = frozenset(ball)

    def cells(self, k: int):
        q = self.pc.quotient
        return [(g, idx) for g in sorted(self.ball, key=q.group.sort_key)
                for idx in q.cells(k)]

    def cell_count(self) -> int:
        q = self.pc.quotient
        return len(self.ball) * sum(q.count(k) for k in range(q.dimension + 1))

    def __contains__(self, cell):
        return cell[0] in self.ball


class PeriodicComplex:
    """A quotient complex together with its lazily expanded cover."""

    def __init__(self, quotient: QuotientComplex):
        report = validate_quotient(quotient)
        if not report.valid:
            raise InputError("invalid quotient datum: "
                             + "; ".join(v["detail"] for v in report.violations[:3]))
        self.quotient = quotient
        self.group = quotient.group
        self._regions: dict[int, Region] = {}

    def expand(self, radius: int) -> Region:
        """Materialize all cover cells with deck coordinate in ball(radius).

        Idempotent and monotone.  Expansion is the only mutating operation
        on this object (single-writer discipline); regions themselves are
        frozen and safe to share across parallel readers.
        """
        if radius not in self._regions:
            ball = self.group.ball(radius)
            for r, reg in self._regions.items():
                if r <= radius and not reg.ball <= ball:
                    raise InternalError("expansion lost monotonicity")
            self._regions[radius] = Region(self, radius, ball)
        return self._regions[radius]

    def neighbor_across(self, g, top_idx: int, face_idx: int):
        """The other top cell sharing a face with (g, top_idx)."""
        q = self.quotient
        n = q.dimension
        tops = q.top_cofaces(n - 1, face_idx)
        if len(tops) != 2:
            raise InternalError("pseudomanifold violation in neighbor lookup")
        other = tops[0] if tops[1] == top_idx else tops[1]
        if top_idx not in tops:
            raise InputError("face does not bound the given top simplex")
        face = q.simplex(n - 1, face_idx)
        shift_here = q.shift(q.simplex(n, top_idx), face)
        shift_there = q.shift(q.simplex(n, other), face)
        deck = self.group.multiply(self.group.multiply(g, shift_here),
                                   self.group.inverse(shift_there))
        return deck, other

    def fundamental_domain(self) -> "FundamentalDomain":
        return FundamentalDomain(self)


class FundamentalDomain:
    """One chosen lift per quotient simplex, tiling the cover.

    The base top simplex (index 0, the lexicographically least) is lifted
    at the identity; the remaining top lifts are chosen by breadth-first
    search through shared faces, parents resolved in index order.  Every
    lower-dimensional simplex is lifted inside the closure of the lift of
    its least containing top simplex.
    """

    def __init__(self, pc: PeriodicComplex):
        self.pc = pc
        q = pc.quotient
        n = q.dimension
        group = pc.group
        deck_top = {0: group.identity()}
        frontier = [0]
        while frontier:
            nxt = []
            for idx in sorted(frontier):
                for fidx, _, _ in q.face_data(n, idx):
                    nbr_deck, nbr = pc.neighbor_across(deck_top[idx], idx, fidx)
                    if nbr not in deck_top:
                        deck_top[nbr] = nbr_deck
                        nxt.append(nbr)
            frontier = nxt
        if len(deck_top) != q.count(n):
            raise InputError("quotient top cells are not face-connected")
        self.deck = [dict() for _ in range(n + 1)]
        self.deck[n] = deck_top
        for k in range(n):
            for idx in q.cells(k):
                tops = q.top_cofaces(k, idx)
                if not tops:
                    raise InputError(f"simplex of dimension {k} lies in no top simplex")
                host = min(tops)
                shift = q.shift(q.simplex(n, host), q.simplex(k, idx))
                self.deck[k][idx] = q.group.multiply(deck_top[host], shift)

    def chosen_lift(self, k: int, idx: int):
        return self.deck[k][idx]

    def coset_of_cell(self, g, k: int, idx: int):
        """Deck element h with (g, simplex) lying in the translate h*K."""
        return self.pc.group.multiply(g, self.pc.group.inverse(self.deck[k][idx]))


# ---------------------------------------------------------------------------
# Barycentric subdivision


@dataclass
class Subdivision:
    """One barycentric subdivision with the induced chain map.

    ``complex`` is the subdivided quotient; ``cell_vertex[k][idx]`` is the
    new vertex id of the barycenter of the old cell; ``chain_map[k]`` sends
    an old k-simpleх index to its chain in the new complex as a list of
    ``(new_index, coefficient)`` pairs.
    """

    complex: QuotientComplex
    cell_vertex: list
    chain_map: list


def barycentric_subdivide(q: QuotientComplex, times: int = 1) -> Subdivision:
    """Iterated barycentric subdivision with label and orientation transport.

    New vertices are the barycenters of old cells.  An edge from the
    barycenter of a face to the barycenter of a containing cell inherits
    the inverse anchor shift, so cover adjacency is preserved.  The chain
    map is the standard cone-recursion subdivision operator; orientations
    are transported through it, which keeps the Euler characteristic and
    the pseudomanifold property intact.
    """
    if times < 1:
        raise InputError("subdivision count must be >= 1")
    if times > 3:
        raise ResourceError("subdivision count exceeds the budget 3; "
                            "deep subdivisions explode the cell count (--subdivide)")
    sub = _subdivide_once(q)
    for _ in range(times - 1):
        nxt = _subdivide_once(sub.complex)
        sub = Subdivision(nxt.complex, nxt.cell_vertex,
                          _compose_chain_maps(sub.chain_map, nxt.chain_map))
    return sub


def _compose_chain_maps(first, second):
    out = []
    for k in range(len(first)):
        table = {}
        for idx, terms in first[k].items():
            acc: dict[int, int] = {}
            for mid, c1 in terms:
                for new, c2 in second[k][mid]:
                    acc[new] = acc.get(new, 0) + c1 * c2
            table[idx] = [(i, c) for i, c in sorted(acc.items()) if c]
        out.append(table)
    return out


def _subdivide_once(q: QuotientComplex) -> Subdivision:
    n = q.dimension
    group = q.group

    cell_vertex = []
    names = []
    positions = {}
    counter = 0
    for k in range(n + 1):
        table = {}
        for idx in q.cells(k):
            s = q.simplex(k, idx)
            if k == 0:
                name = q.vertex_name(s[0])
            else:
                name = "(" + "+".join(q.vertex_name(v) for v in s) + ")"
            table[idx] = counter
            names.append(name)
            positions[counter] = (k, idx)
            counter += 1
        cell_vertex.append(table)

    # flags: strictly increasing chains of cells under the face relation,
    # extended downward so the first entry is always the smallest cell
    def proper_faces(k, idx):
        s = q.simplex(k, idx)
        out = []
        for fk in range(k):
            for face in _subtuples(s, fk + 1):
                out.append((fk, q.index_of(fk, face)))
        return out

    face_lists = {}
    for k in range(n + 1):
        for i in q.cells(k):
            face_lists[(k, i)] = proper_faces(k, i)
    chains_by_len = {1: [((k, i),) for k in range(n + 1) for i in q.cells(k)]}
    for length in range(2, n + 2):
        rows = []
        for chain in chains_by_len[length - 1]:
            for cell in face_lists[chain[0]]:
                rows.append((cell,) + chain)
        chains_by_len[length] = rows

    simplices_by_dim = []
    for length in range(1, n + 2):
        dim_list = sorted(tuple(cell_vertex[k][i] for k, i in chain)
                          for chain in chains_by_len[length])
        simplices_by_dim.append(dim_list)

    new = QuotientComplex(group, names, simplices_by_dim, {}, {},
                          name=(q.name + "^sd") if q.name else "")

    # labels: edge from barycenter of tau to barycenter of rho, tau < rho,
    # carries shift(rho, tau)^{-1}
    labels = {}
    for eidx, (a, b) in enumerate(new.simplices[1]):
        ka, ia = positions[a]
        kb, ib = positions[b]
        if ka > kb:
            (ka, ia), (kb, ib) = (kb, ib), (ka, ia)
            flip = True
        else:
            flip = False
        shift = q.shift(q.simplex(kb, ib), q.simplex(ka, ia))
        lbl = group.inverse(shift)  # direction: face barycenter -> cell barycenter
        if flip:
            lbl = group.inverse(lbl)
        labels[eidx] = lbl
    new.labels = labels

    # chain map by cone recursion: sd(s) = (-1)^k (sd(boundary s) * b_s)
    chain_map = [dict() for _ in range(n + 1)]
    memo = {}

    def sd(k, idx):
        if (k, idx) in memo:
            return memo[(k, idx)]
        if k == 0:
            res = {(cell_vertex[0][idx],): 1}
        else:
            b = cell_vertex[k][idx]
            res = {}
            for fidx, fsign, _ in q.face_data(k, idx):
                for tup, c in sd(k - 1, fidx).items():
                    cone = tup + (b,)
                    res[cone] = res.get(cone, 0) + fsign * c * (-1) ** k
            res = {t: c for t, c in res.items() if c}
        memo[(k, idx)] = res
        return res

    for k in range(n + 1):
        for idx in q.cells(k):
            terms = []
            for tup, c in sd(k, idx).items():
                terms.append((new.index_of(k, tup), c))
            chain_map[k][idx] = sorted(terms)

    orientation = {}
    for idx in q.cells(n):
        sign = q.orientation[idx]
        for new_idx, c in chain_map[n][idx]:
            orientation[new_idx] = sign * c
    new.orientation = orientation

    if q.coordinates is not None:
        coords = {}
        for k in range(n + 1):
            for idx in q.cells(k):
                pts = q.realize(k, idx)
                dim = len(pts[0])
                bary = tuple(sum(p[d] for p in pts) / Fraction(k + 1) for d in range(dim))
                coords[cell_vertex[k][idx]] = bary
        new.coordinates = coords

    new.tree = frozenset()
    return Subdivision(new, cell_vertex, chain_map)


def gauge_normalize(q: QuotientComplex) -> QuotientComplex:
    """Re-gauge labels so a BFS spanning tree carries identity labels.

    This re-parametrizes the cover (an isomorphic covering) and must not be
    applied to complexes whose coordinates encode labels as translations.
    """
    if q.coordinates is not None:
        raise InputError("gauge normalization would break the Euclidean model")
    group = q.group
    adj = {}
    for eidx, (u, v) in enumerate(q.simplices[1]):
        adj.setdefault(u, []).append((v, eidx))
        adj.setdefault(v, []).append((u, eidx))
    h = {0: group.identity()}
    tree = set()
    frontier = [0]
    while frontier:
        nxt = []
        for u in sorted(frontier):
            for v, eidx in sorted(adj.get(u, [])):
                if v not in h:
                    h[v] = group.multiply(h[u], q.edge_label(u, v))
                    tree.add(eidx)
                    nxt.append(v)
        frontier = nxt
    if len(h) != len(q.vertices):
        raise InputError("quotient 1-skeleton is not connected")
    labels = {}
    for eidx, (u, v) in enumerate(q.simplices[1]):
        labels[eidx] = group.multiply(
            group.multiply(h[u], q.labels[eidx]), group.inverse(h[v]))
    out = QuotientComplex(group, q.vertices, q.simplices, q.orientation,
                          labels, tree, None, name=q.name)
    return out
