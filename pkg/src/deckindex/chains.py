"""Periodic (co)chains, boundary, cap product and deck-group projection.

A periodic k-chain on the cover of a quotient complex is stored as an
equivariant part (one integer per quotient k-simplex, repeated over every
translate) plus a finitely supported exceptional part on cover cells
``(deck element, simplex index)``.  The value on a cover cell is the sum of
both parts, so every such chain is bounded by construction.  Cochains have
the same shape and are evaluated against cover cells.

Because simplices are stored ascending, the j-th face carries coefficient
``(-1)**j`` and the deck coordinate of a face follows from the edge labels
alone; no part of the chain algebra needs a materialized region.

Sign conventions
----------------
``boundary`` is the alternating face sum.  ``coboundary`` is defined by
``(du)(s) = (-1)**(p+1) u(boundary s)`` for a p-cochain u; with this sign
the chain-level cap product

    u cap c = (-1)**(p(q-p)) sum a_i u(back p-face) (front (q-p)-face)

satisfies the Leibniz identity  d(u cap c) = (du) cap c + (-1)**p u cap (dc)
exactly in every bidegree.  The pairing consequently satisfies
``<du, c> = (-1)**(p+1) <u, dc>``; the unsigned adjunction holds in odd
degrees only.  For finite deck groups all chains are normalized to a purely
exceptional form so that representations are unique.

All operations here are pure functions of immutable-by-convention inputs,
so they are safe to evaluate in parallel over disjoint translates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .complexes import PeriodicComplex, QuotientComplex, validate_quotient
from .errors import InputError, InternalError, OrientationError
from .groups import FiniteGroup, MarkedGroup


def _prune(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


class PeriodicChain:
    """Equivariant + finitely supported integer chain of fixed degree."""

    kind = "chain"

    def __init__(self, complex: QuotientComplex, degree: int,
                 equivariant=None, exceptional=None):
        if not (0 <= degree <= complex.dimension):
            raise InputError(f"degree {degree} out of range for an "
                             f"{complex.dimension}-complex")
        self.complex = complex
        self.degree = degree
        self.equivariant = _prune(dict(equivariant or {}))
        self.exceptional = _prune(dict(exceptional or {}))
        if isinstance(complex.group, FiniteGroup) and self.equivariant:
            for g in complex.group.elements():
                for idx, a in self.equivariant.items():
                    key = (g, idx)
                    self.exceptional[key] = self.exceptional.get(key, 0) + a
            self.equivariant = {}
            self.exceptional = _prune(self.exceptional)

    def value(self, g, idx: int) -> int:
        return self.equivariant.get(idx, 0) + self.exceptional.get((g, idx), 0)

    def support_bound(self) -> int:
        eq = max(map(abs, self.equivariant.values()), default=0)
        ex = max(map(abs, self.exceptional.values()), default=0)
        return eq + ex

    def _same_shape(self, other):
        if self.complex is not other.complex or self.degree != other.degree:
            raise InputError("chains live on different complexes or degrees")

    def __add__(self, other):
        self._same_shape(other)
        eq = dict(self.equivariant)
        for k, v in other.equivariant.items():
            eq[k] = eq.get(k, 0) + v
        ex = dict(self.exceptional)
        for k, v in other.exceptional.items():
            ex[k] = ex.get(k, 0) + v
        return type(self)(self.complex, self.degree, eq, ex)

    def __neg__(self):
        return type(self)(self.complex, self.degree,
                          {k: -v for k, v in self.equivariant.items()},
                          {k: -v for k, v in self.exceptional.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int):
        return type(self)(self.complex, self.degree,
                          {k: c * v for k, v in self.equivariant.items()},
                          {k: c * v for k, v in self.exceptional.items()})

    def is_zero(self) -> bool:
        return not self.equivariant and not self.exceptional

    def __eq__(self, other):
        return (isinstance(other, type(self)) and self.complex is other.complex
                and self.degree == other.degree
                and self.equivariant == other.equivariant
                and self.exceptional == other.exceptional)

    def __hash__(self):
        raise TypeError("periodic chains are mutable value objects")

    def __repr__(self):
        return (f"<{type(self).__name__} deg={self.degree} "
                f"eq={len(self.equivariant)} exc={len(self.exceptional)}>")

    # -- documents ---------------------------------------------------------

    def to_document(self) -> dict:
        q = self.complex
        g = q.group
        return {
            "degree": self.degree,
            "equivariant": {q._skey(self.degree, idx): v
                            for idx, v in sorted(self.equivariant.items())},
            "exceptional": sorted(
                [[g.format_element(gg), q._skey(self.degree, idx), v]
                 for (gg, idx), v in self.exceptional.items()],
                key=lambda row: (row[0], row[1])),
        }

    @classmethod
    def from_document(cls, complex: QuotientComplex, doc: dict):
        try:
            degree = int(doc["degree"])
            key_index = {complex._skey(degree, i): i for i in complex.cells(degree)}
            eq = {key_index[k]: int(v) for k, v in doc.get("equivariant", {}).items()}
            ex = {}
            for word, key, v in doc.get("exceptional", []):
                g = complex.group.parse_word(word)
                ex[(g, key_index[key])] = ex.get((g, key_index[key]), 0) + int(v)
            return cls(complex, degree, eq, ex)
        except KeyError as e:
            raise InputError(f"malformed chain document: unknown key {e}")


class PeriodicCochain(PeriodicChain):
    """Same storage as a chain, but evaluated against cover cells."""

    kind = "cochain"


# ---------------------------------------------------------------------------
# Boundary and coboundary


def boundary(c: PeriodicChain) -> PeriodicChain:
    """Alternating face sum; exact on both parts.

    The equivariant part maps through the quotient face maps (the deck
    shift of a face permutes translates, which leaves an equivariant
    coefficient unchanged); exceptional cells route through their exact
    cover faces, whose deck coordinates follow from the edge labels.
    """
    if c.degree < 1:
        raise InputError("boundary needs degree >= 1")
    q = c.complex
    group = q.group
    eq: dict = {}
    ex: dict = {}
    for idx, a in c.equivariant.items():
        for fidx, fsign, _ in q.face_data(c.degree, idx):
            eq[fidx] = eq.get(fidx, 0) + a * fsign
    for (g, idx), a in c.exceptional.items():
        for fidx, fsign, shift in q.face_data(c.degree, idx):
            key = (group.multiply(g, shift), fidx)
            ex[key] = ex.get(key, 0) + a * fsign
    return PeriodicChain(q, c.degree - 1, eq, ex)


def coboundary(u: PeriodicCochain) -> PeriodicCochain:
    """(du)(s) = (-1)**(p+1) u(boundary s), the transpose with a sign.

    The transpose of the face map sends the value on a face cell to every
    cofacet; for the equivariant part this is the transposed quotient
    matrix, for the exceptional part the deck coordinate of the cofacet is
    solved from the face shift.
    """
    q = u.complex
    p = u.degree
    if p + 1 > q.dimension:
        raise InputError("coboundary exceeds the complex dimension")
    group = q.group
    sign_global = (-1) ** (p + 1)
    eq: dict = {}
    ex: dict = {}
    for idx in q.cells(p + 1):
        for fidx, fsign, shift in q.face_data(p + 1, idx):
            a = u.equivariant.get(fidx, 0)
            if a:
                eq[idx] = eq.get(idx, 0) + sign_global * fsign * a
    for (g, fidx), a in u.exceptional.items():
        # cofacets s with face f: deck of the cofacet solves g = h * shift
        for idx in _cofacets(q, p, fidx):
            for fidx2, fsign, shift in q.face_data(p + 1, idx):
                if fidx2 != fidx:
                    continue
                h = group.multiply(g, group.inverse(shift))
                key = (h, idx)
                ex[key] = ex.get(key, 0) + sign_global * fsign * a
    return PeriodicCochain(q, p + 1, eq, ex)


def _cofacets(q: QuotientComplex, k: int, fidx: int):
    if not hasattr(q, "_cofacet_table"):
        q._cofacet_table = {}
    if k not in q._cofacet_table:
        table = {}
        for idx in q.cells(k + 1):
            for fidx2, _, _ in q.face_data(k + 1, idx):
                table.setdefault(fidx2, []).append(idx)
        q._cofacet_table[k] = table
    return q._cofacet_table[k].get(fidx, [])


def pair(u: PeriodicCochain, c: PeriodicChain) -> int:
    """Pairing <u, c> against a finitely supported chain."""
    if u.degree != c.degree:
        raise InputError("pairing needs equal degrees")
    if c.equivariant and not isinstance(c.complex.group, FiniteGroup):
        raise InputError("pairing against an infinite equivariant chain diverges")
    total = 0
    for (g, idx), a in c.exceptional.items():
        total += a * u.value(g, idx)
    if isinstance(c.complex.group, FiniteGroup):
        for idx, a in c.equivariant.items():
            for g in c.complex.group.elements():
                total += a * u.value(g, idx)
    return total


# ---------------------------------------------------------------------------
# Fundamental cycle and cap product


def fundamental_cycle(pc: PeriodicComplex) -> PeriodicChain:
    """Sum of all top simplices with their orientation signs.

    Raises OrientationError when the stored signs are not coherent (then
    no fundamental cycle exists, e.g. for non-orientable quotients).
    """
    q = pc.quotient
    report = validate_quotient(q)
    if not report.valid:
        kinds = report.kinds()
        if kinds & {"orientation coherence", "orientation data"}:
            raise OrientationError(
                "no fundamental cycle: " + report.violations[0]["detail"])
        raise InputError("invalid quotient: " + report.violations[0]["detail"])
    mu = PeriodicChain(q, q.dimension, dict(q.orientation), {})
    return mu


def cap(u: PeriodicCochain, c: PeriodicChain) -> PeriodicChain:
    """Chain-level cap product via back-face evaluation.

    For an ordered q-simplex the p-cochain is evaluated on the back face
    (last p+1 vertices) and the front face (first q-p+1 vertices) is kept,
    scaled by (-1)**(p(q-p)).  Both inputs may have equivariant and
    exceptional parts; all four products are formed exactly.
    """
    if u.complex is not c.complex:
        raise InputError("cap factors live on different complexes")
    p, qdeg = u.degree, c.degree
    if p > qdeg:
        raise InputError("cap needs cochain degree <= chain degree")
    q = c.complex
    group = q.group
    r = qdeg - p
    eps = (-1) ** (p * r)
    front_pos = tuple(range(r + 1))
    back_pos = tuple(range(r, qdeg + 1))

    # per q-simplex: front/back face indices and the deck shift of the back
    geom = []
    for idx in q.cells(qdeg):
        _, front_idx, front_shift = q.subface_shift(qdeg, idx, front_pos)
        _, back_idx, back_shift = q.subface_shift(qdeg, idx, back_pos)
        if front_shift != group.identity():
            raise InternalError("front face must share the anchor vertex")
        geom.append((front_idx, back_idx, back_shift))

    back_lookup: dict = {}
    for idx, (_, back_idx, back_shift) in enumerate(geom):
        back_lookup.setdefault(back_idx, []).append((idx, back_shift))

    eq: dict = {}
    ex: dict = {}
    finite_group = isinstance(group, FiniteGroup)

    for idx, a in c.equivariant.items():
        front_idx, back_idx, _ = geom[idx]
        ueq = u.equivariant.get(back_idx, 0)
        if ueq:
            eq[front_idx] = eq.get(front_idx, 0) + eps * a * ueq
    for (h, back_idx), uval in u.exceptional.items():
        for idx, back_shift in back_lookup.get(back_idx, []):
            a = c.equivariant.get(idx, 0)
            if a:
                g = group.multiply(h, group.inverse(back_shift))
                key = (g, geom[idx][0])
                ex[key] = ex.get(key, 0) + eps * a * uval
    for (g, idx), a in c.exceptional.items():
        front_idx, back_idx, back_shift = geom[idx]
        uval = u.equivariant.get(back_idx, 0) + \
            u.exceptional.get((group.multiply(g, back_shift), back_idx), 0)
        if uval:
            key = (g, front_idx)
            ex[key] = ex.get(key, 0) + eps * a * uval
    return PeriodicChain(q, r, eq, ex)


# ---------------------------------------------------------------------------
# Class functions and the deck projection


class ClassFunction:
    """Bounded integer function on the deck group: constant + finite part.

    These are the representatives of classes in the coinvariant quotient of
    bounded functions under g . f (x) = f(xg).  For finite groups the
    constant part is folded into the finite part so representations are
    unique.
    """

    def __init__(self, group: MarkedGroup, constant: int = 0, finite=None):
        self.group = group
        self.constant = int(constant)
        self.finite = _prune(dict(finite or {}))
        if isinstance(group, FiniteGroup) and self.constant:
            for g in group.elements():
                self.finite[g] = self.finite.get(g, 0) + self.constant
            self.constant = 0
            self.finite = _prune(self.finite)

    def value(self, g) -> int:
        return self.constant + self.finite.get(g, 0)

    def finite_mass(self) -> int:
        return sum(abs(v) for v in self.finite.values())

    def bound(self) -> int:
        return abs(self.constant) + max(map(abs, self.finite.values()), default=0)

    def translate(self, g) -> "ClassFunction":
        """The translated function x -> value(x * g)."""
        ginv = self.group.inverse(g)
        return ClassFunction(
            self.group, self.constant,
            {self.group.multiply(h, ginv): v for h, v in self.finite.items()})

    def __add__(self, other):
        if self.group != other.group:
            raise InputError("class functions on different groups")
        f = dict(self.finite)
        for k, v in other.finite.items():
            f[k] = f.get(k, 0) + v
        return ClassFunction(self.group, self.constant + other.constant, f)

    def __neg__(self):
        return ClassFunction(self.group, -self.constant,
                             {k: -v for k, v in self.finite.items()})

    def __sub__(self, other):
        return self + (-other)

    def is_zero_function(self) -> bool:
        return self.constant == 0 and not self.finite

    def __eq__(self, other):
        return (isinstance(other, ClassFunction) and self.group == other.group
                and self.constant == other.constant and self.finite == other.finite)

    def __repr__(self):
        return f"<ClassFunction c={self.constant} finite={len(self.finite)}>"

    def to_document(self) -> dict:
        return {
            "constant": self.constant,
            "finite": sorted(([self.group.format_element(g), v]
                              for g, v in self.finite.items()),
                             key=lambda row: row[0]),
        }

    @classmethod
    def from_document(cls, group: MarkedGroup, doc: dict) -> "ClassFunction":
        finite = {}
        for word, v in doc.get("finite", []) or []:
            g = group.parse_word(word)
            finite[g] = finite.get(g, 0) + int(v)
        return cls(group, int(doc.get("constant", 0)), finite)


def project_to_group(c: PeriodicChain, fd) -> ClassFunction:
    """Push a degree-0 chain to the deck group through a fundamental domain.

    The value at g is the coefficient sum over the 0-cells of the translate
    gK; the equivariant part contributes its total to the constant part and
    each exceptional vertex lands in the translate of its coset.
    """
    if c.degree != 0:
        raise InputError("projection to the group needs a degree-0 chain")
    group = c.complex.group
    constant = sum(c.equivariant.values())
    finite: dict = {}
    for (g, idx), a in c.exceptional.items():
        coset = fd.coset_of_cell(g, 0, idx)
        finite[coset] = finite.get(coset, 0) + a
    return ClassFunction(group, constant, finite)


# ---------------------------------------------------------------------------
# Classical homology of the quotient (exact rational oracle)


@dataclass
class HomologyData:
    betti: list
    boundary_matrices: list  # boundary_matrices[k]: rows (k-1)-cells x cols k-cells
    cycle_bases: list        # cycle_bases[k]: list of homology generator vectors


class _Span:
    """Incrementally maintained row-echelon basis of a rational span."""

    def __init__(self, dim):
        self.dim = dim
        self.rows = []  # (pivot_col, normalized_vector)

    def reduce(self, vec):
        v = [Fraction(x) for x in vec]
        for piv, row in self.rows:
            if v[piv]:
                f = v[piv]
                for i in range(piv, self.dim):
                    v[i] -= f * row[i]
        return v

    def add(self, vec) -> bool:
        """Insert a vector; True when the rank grew."""
        v = self.reduce(vec)
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return False
        inv = Fraction(1) / v[piv]
        v = [x * inv for x in v]
        self.rows.append((piv, v))
        self.rows.sort(key=lambda pr: pr[0])
        return True

    @property
    def rank(self):
        return len(self.rows)


def _solve_in_span(basis_vectors, target):
    """Coefficients expressing target in the rational span, or None."""
    if not basis_vectors:
        return None if any(target) else []
    rows = len(target)
    aug = [[Fraction(basis_vectors[j][i]) for j in range(len(basis_vectors))]
           + [Fraction(target[i])] for i in range(rows)]
    ncols = len(basis_vectors)
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for rr in range(r, rows):
            if aug[rr][col]:
                piv = rr
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = Fraction(1) / aug[r][col]
        aug[r] = [x * inv for x in aug[r]]
        for rr in range(rows):
            if rr != r and aug[rr][col]:
                f = aug[rr][col]
                aug[rr] = [a - f * b for a, b in zip(aug[rr], aug[r])]
        pivots.append(col)
        r += 1
    for rr in range(r, rows):
        if aug[rr][ncols]:
            return None
    coeffs = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        coeffs[col] = aug[i][ncols]
    return coeffs


def _nullspace(matrix, ncols):
    """Basis of the rational nullspace of a (rows x ncols) matrix."""
    if not matrix:
        basis = []
        for j in range(ncols):
            v = [Fraction(0)] * ncols
            v[j] = Fraction(1)
            basis.append(v)
        return basis
    m = [list(map(Fraction, r)) for r in matrix]
    rows = len(m)
    pivots = {}
    r = 0
    for col in range(ncols):
        piv = None
        for rr in range(r, rows):
            if m[rr][col]:
                piv = rr
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = Fraction(1) / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for rr in range(rows):
            if rr != r and m[rr][col]:
                f = m[rr][col]
                m[rr] = [a - f * b for a, b in zip(m[rr], m[r])]
        pivots[col] = r
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for col, rr in pivots.items():
            v[col] = -m[rr][fc]
        basis.append(v)
    return basis


def boundary_matrix(q: QuotientComplex, k: int):
    """Integer matrix of the k-th simplicial boundary of the quotient."""
    rows = q.count(k - 1)
    cols = q.count(k)
    mat = [[0] * cols for _ in range(rows)]
    for idx in q.cells(k):
        for fidx, fsign, _ in q.face_data(k, idx):
            mat[fidx][idx] += fsign
    return mat


def quotient_homology(q: QuotientComplex) -> HomologyData:
    """Rational homology of the quotient by exact row reduction."""
    n = q.dimension
    mats = [None] + [boundary_matrix(q, k) for k in range(1, n + 1)]
    betti = []
    bases = []
    for k in range(n + 1):
        ck = q.count(k)
        if k == 0:
            cycles = _nullspace([], ck)
        else:
            cycles = _nullspace(mats[k], ck)
        if k < n:
            bmat = mats[k + 1]
            boundaries = []
            for j in range(q.count(k + 1)):
                col = [Fraction(bmat[i][j]) for i in range(ck)]
                boundaries.append(col)
        else:
            boundaries = []
        # choose cycle representatives extending a basis of the boundaries
        chosen = []
        span = _Span(ck)
        for col in boundaries:
            span.add(col)
        for z in cycles:
            if span.add(z):
                chosen.append(z)
        betti.append(len(chosen))
        bases.append(chosen)
    return HomologyData(betti=betti, boundary_matrices=mats, cycle_bases=bases)


def homology_class_coordinates(q: QuotientComplex, hom: HomologyData, k: int, vector):
    """Coordinates of a k-cycle in the chosen homology basis."""
    ck = q.count(k)
    boundaries = []
    if k < q.dimension:
        bmat = hom.boundary_matrices[k + 1]
        for j in range(q.count(k + 1)):
            boundaries.append([Fraction(bmat[i][j]) for i in range(ck)])
    basis = boundaries + hom.cycle_bases[k]
    coeffs = _solve_in_span(basis, vector)
    if coeffs is None:
        raise InternalError("vector is not a cycle modulo boundaries")
    return coeffs[len(boundaries):]


def lefschetz_number_quotient(q: QuotientComplex, fbar) -> int:
    """Classical Lefschetz number of a simplicial self-map of the quotient.

    ``fbar`` is a chain-mappable simplicial model: an object exposing
    ``chain_image(k, idx) -> list[(target_idx, coeff)]`` on the chains of
    ``q`` (compositions with subdivision chain maps are handled by the
    caller).  The trace is taken on rational homology, degree by degree.
    """
    hom = quotient_homology(q)
    total = 0
    for k in range(q.dimension + 1):
        basis = hom.cycle_bases[k]
        if not basis:
            continue
        images = []
        for z in basis:
            img = [Fraction(0)] * q.count(k)
            for idx, coeff in enumerate(z):
                if not coeff:
                    continue
                for tgt, c in fbar.chain_image(k, idx):
                    img[tgt] += coeff * c
            images.append(img)
        trace = Fraction(0)
        for i, img in enumerate(images):
            coords = homology_class_coordinates(q, hom, k, img)
            trace += coords[i]
        if trace.denominator != 1:
            raise InternalError("non-integral homology trace")
        total += (-1) ** k * int(trace)
    return total


# ---------------------------------------------------------------------------
# Random instances for the property suites


def random_chain(rng, q: QuotientComplex, degree: int, radius: int = 2,
                 cochain: bool = False, max_terms: int = 4):
    cls = PeriodicCochain if cochain else PeriodicChain
    eq = {idx: rng.randint(-4, 4) for idx in q.cells(degree)
          if rng.random() < 0.5}
    ball = sorted(q.group.ball(radius), key=q.group.sort_key)
    ex = {}
    for _ in range(rng.randint(0, max_terms)):
        g = rng.choice(ball)
        idx = rng.randrange(q.count(degree))
        ex[(g, idx)] = rng.randint(-4, 4)
    return cls(q, degree, eq, ex)
