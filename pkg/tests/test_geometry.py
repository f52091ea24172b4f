from fractions import Fraction

import pytest

from deckindex.errors import InputError
from deckindex.geometry import (
    barycentric_coordinates,
    det,
    pl_degree_on_diamond,
    point_in_simplex,
    simplex_boundary_squared_distance,
    solve_linear,
    sqrt_lower_bound,
    squared_distance_point_segment,
    winding_number_2d,
)

F = Fraction


class TestLinearAlgebra:
    def test_unique_solution(self):
        status, x = solve_linear([[1, 1], [1, -1]], [3, 1])
        assert status == "unique"
        assert x == [F(2), F(1)]

    def test_inconsistent(self):
        status, x = solve_linear([[1, 1], [2, 2]], [1, 3])
        assert status == "none"

    def test_underdetermined(self):
        status, x = solve_linear([[1, 1]], [2])
        assert status == "infinite"
        assert x[0] + x[1] == 2

    def test_det(self):
        assert det([[2, 1], [1, 1]]) == 1
        assert det([[0, 1], [1, 0]]) == -1
        assert det([[1, 2], [2, 4]]) == 0


class TestSimplexGeometry:
    TRI = [(F(0), F(0)), (F(1), F(0)), (F(0), F(1))]

    def test_barycentric(self):
        lam = barycentric_coordinates((F(1, 3), F(1, 3)), self.TRI)
        assert lam == [F(1, 3), F(1, 3), F(1, 3)]

    def test_point_classification(self):
        assert point_in_simplex((F(1, 4), F(1, 4)), self.TRI) == "interior"
        assert point_in_simplex((F(1, 2), F(1, 2)), self.TRI) == "boundary"
        assert point_in_simplex((F(2), F(0)), self.TRI) == "outside"

    def test_point_off_plane_is_outside(self):
        tri3 = [(F(0), F(0), F(0)), (F(1), F(0), F(0)), (F(0), F(1), F(0))]
        assert point_in_simplex((F(0), F(0), F(1)), tri3) == "outside"

    def test_segment_distance(self):
        d2 = squared_distance_point_segment((F(0), F(1)), (F(-1), F(0)), (F(1), F(0)))
        assert d2 == 1
        d2 = squared_distance_point_segment((F(3), F(0)), (F(-1), F(0)), (F(1), F(0)))
        assert d2 == 4

    def test_boundary_distance_of_incenter_like_point(self):
        d2 = simplex_boundary_squared_distance((F(1, 4), F(1, 4)), self.TRI)
        assert d2 == F(1, 16)

    def test_sqrt_lower_bound(self):
        v = F(2)
        lb = sqrt_lower_bound(v)
        assert lb * lb <= v
        assert float(lb) > 1.41421356 - 1e-9


class TestWindingNumbers:
    def test_identity_displacement_has_degree_one(self):
        # constant map f = c near p = c: u(x) = x - c is the identity
        # displacement, degree +1
        deg = pl_degree_on_diamond(lambda p: p, (F(0), F(0)), F(1, 4))
        assert deg == 1

    def test_reflection_has_degree_minus_one(self):
        deg = pl_degree_on_diamond(lambda p: (p[0], -p[1]), (F(0), F(0)), F(1, 4))
        assert deg == -1

    def test_antipodal_plane_map_has_degree_one(self):
        deg = pl_degree_on_diamond(lambda p: (-p[0], -p[1]), (F(0), F(0)), F(1, 4))
        assert deg == 1

    def test_double_cover_angle_map(self):
        # (x, y) -> (x^2 - y^2, 2xy) winds twice; evaluate on the diamond
        def u(p):
            x, y = p
            return (x * x - y * y, 2 * x * y)
        deg = pl_degree_on_diamond(u, (F(0), F(0)), F(1, 2))
        assert deg == 2

    def test_winding_rejects_origin_hit(self):
        with pytest.raises(InputError):
            winding_number_2d([(F(1), F(0)), (F(0), F(0)), (F(0), F(1))])

    def test_degenerate_everywhere_zero_is_ambiguous(self):
        with pytest.raises(InputError, match="ambiguous"):
            pl_degree_on_diamond(lambda p: (F(0), F(0)), (F(0), F(0)), F(1, 4))
