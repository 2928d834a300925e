#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "tilesmith/geometry.hpp"

using namespace tilesmith;

namespace {

Polygon unit_square(Rat x = Rat(0), Rat y = Rat(0)) {
    return Polygon::checked({{x, y}, {x + 1, y}, {x + 1, y + 1}, {x, y + 1}});
}

// L-shaped octagon of three unit squares; two straight vertices.
Polygon chair_octagon() {
    return Polygon::checked(
        {{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(2), Rat(0)}, {Rat(2), Rat(1)},
         {Rat(1), Rat(1)}, {Rat(1), Rat(2)}, {Rat(0), Rat(2)}, {Rat(0), Rat(1)}});
}

// 45-degree parallelogram half a cell tall, one cell wide at the base.
Polygon slanted_parallelogram() {
    return Polygon::checked({{Rat(1), Rat(0)}, {Rat(2), Rat(0)}, {Rat(1), Rat(1)}, {Rat(0), Rat(1)}});
}

}  // namespace

TEST_CASE("polygon validation") {
    CHECK_NOTHROW(unit_square());
    CHECK_NOTHROW(chair_octagon());  // straight vertices are fine
    // Clockwise rejected.
    CHECK_THROWS_AS(Polygon::checked({{Rat(0), Rat(0)}, {Rat(0), Rat(1)}, {Rat(1), Rat(1)}, {Rat(1), Rat(0)}}),
                    InputError);
    // Bow tie rejected.
    CHECK_THROWS_AS(Polygon::checked({{Rat(0), Rat(0)}, {Rat(1), Rat(1)}, {Rat(1), Rat(0)}, {Rat(0), Rat(1)}}),
                    InputError);
    // Repeated vertex rejected.
    CHECK_THROWS_AS(Polygon::checked({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(0), Rat(0)}, {Rat(0), Rat(1)}}),
                    InputError);
    // Backtracking side rejected.
    CHECK_THROWS_AS(
        Polygon::checked({{Rat(0), Rat(0)}, {Rat(2), Rat(0)}, {Rat(1), Rat(0)}, {Rat(1), Rat(1)}}),
        InputError);
    // Pinch point (vertex touching a non-adjacent side) rejected.
    CHECK_THROWS_AS(Polygon::checked({{Rat(0), Rat(0)},
                                      {Rat(2), Rat(0)},
                                      {Rat(2), Rat(2)},
                                      {Rat(1), Rat(0)},
                                      {Rat(0), Rat(2)}}),
                    InputError);
    CHECK_THROWS_AS(Polygon::checked({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}}), InputError);
}

TEST_CASE("areas") {
    CHECK(unit_square().area() == Rat(1));
    CHECK(chair_octagon().area() == Rat(3));
    CHECK(slanted_parallelogram().area() == Rat(1));
    CHECK(chair_octagon().scaled(Rat(2)).area() == Rat(12));  // doubling scales area by 4
    Polygon tri = Polygon::checked({{Rat(0), Rat(0)}, {Rat(2), Rat(0)}, {Rat(0), Rat(2)}});
    CHECK(tri.area() == Rat(2));
}

TEST_CASE("point location") {
    Polygon chair = chair_octagon();
    CHECK(chair.locate({Rat(1, 2), Rat(1, 2)}) == PointLocation::Inside);
    CHECK(chair.locate({Rat(3, 2), Rat(1, 2)}) == PointLocation::Inside);
    CHECK(chair.locate({Rat(3, 2), Rat(3, 2)}) == PointLocation::Outside);
    CHECK(chair.locate({Rat(1), Rat(0)}) == PointLocation::Boundary);  // straight vertex
    CHECK(chair.locate({Rat(1), Rat(3, 2)}) == PointLocation::Boundary);
    CHECK(chair.locate({Rat(5), Rat(5)}) == PointLocation::Outside);
    CHECK(chair.locate({Rat(1), Rat(1)}) == PointLocation::Boundary);
}

TEST_CASE("triangulation covers the polygon exactly") {
    for (const Polygon& p : {unit_square(), chair_octagon(), slanted_parallelogram()}) {
        Rat sum(0);
        for (const auto& t : triangulate(p)) sum += cross(t[0], t[1], t[2]) / Rat(2);
        CHECK(sum == p.area());
    }
}

TEST_CASE("intersection area") {
    Polygon a = unit_square();
    CHECK(intersection_area(a, unit_square(Rat(1, 2), Rat(0))) == Rat(1, 2));
    CHECK(intersection_area(a, unit_square(Rat(1), Rat(0))) == Rat(0));   // touching only
    CHECK(intersection_area(a, unit_square(Rat(5), Rat(5))) == Rat(0));  // far away
    CHECK(intersection_area(a, a) == Rat(1));
    Polygon chair = chair_octagon();
    CHECK(intersection_area(chair, unit_square(Rat(1), Rat(1))) == Rat(0));  // notch
    CHECK(intersection_area(chair, unit_square(Rat(1), Rat(0))) == Rat(1));
    // The parallelogram sits inside the chair's bottom slab [0,2]x[0,1].
    CHECK(intersection_area(chair, slanted_parallelogram()) == Rat(1));
    Polygon high_parallelogram = slanted_parallelogram().translated({Rat(0), Rat(1)});
    CHECK(intersection_area(chair, high_parallelogram) == Rat(1, 2));
}

TEST_CASE("overlap and containment predicates") {
    Polygon chair = chair_octagon();
    CHECK(polygon_contains(chair, unit_square()));
    CHECK_FALSE(polygon_contains(chair, unit_square(Rat(1), Rat(1))));
    CHECK_FALSE(polygons_overlap(chair, unit_square(Rat(1), Rat(1))));
    CHECK(polygons_overlap(chair, unit_square(Rat(1, 2), Rat(1, 2))));
    CHECK(polygons_touch_along_side(unit_square(), unit_square(Rat(1), Rat(0))));
    CHECK_FALSE(polygons_touch_along_side(unit_square(), unit_square(Rat(1), Rat(1))));  // corner
}

TEST_CASE("side relations and lines") {
    Segment s({Rat(0), Rat(0)}, {Rat(2), Rat(0)});
    CHECK(relate_sides(s, Segment({Rat(2), Rat(0)}, {Rat(0), Rat(0)})) == SideRelation::Coincide);
    CHECK(relate_sides(s, Segment({Rat(1), Rat(0)}, {Rat(3), Rat(0)})) ==
          SideRelation::PartialOverlap);
    CHECK(relate_sides(s, Segment({Rat(2), Rat(0)}, {Rat(3), Rat(0)})) == SideRelation::Disjoint);
    CHECK(relate_sides(s, Segment({Rat(0), Rat(1)}, {Rat(2), Rat(1)})) == SideRelation::Disjoint);
    CHECK(relate_sides(s, Segment({Rat(1), Rat(-1)}, {Rat(1), Rat(1)})) == SideRelation::Disjoint);

    CHECK(line_of(s) == line_of(Segment({Rat(5), Rat(0)}, {Rat(7), Rat(0)})));
    CHECK_FALSE(line_of(s) == line_of(Segment({Rat(0), Rat(1)}, {Rat(2), Rat(1)})));
    Segment diag({Rat(2), Rat(0)}, {Rat(1), Rat(1)});
    Segment diag2({Rat(4), Rat(-2)}, {Rat(3), Rat(-1)});
    CHECK(line_of(diag) == line_of(diag2));

    // Ordering along a line follows the canonical (lexicographic) direction.
    LineKey vert = line_of(Segment({Rat(3), Rat(0)}, {Rat(3), Rat(5)}));
    CHECK(param_on_line(vert, {Rat(3), Rat(1)}) < param_on_line(vert, {Rat(3), Rat(4)}));
    LineKey anti = line_of(diag);
    CHECK(param_on_line(anti, {Rat(1), Rat(1)}) < param_on_line(anti, {Rat(2), Rat(0)}));

    CHECK(runs_canonically(Segment({Rat(0), Rat(0)}, {Rat(1), Rat(0)})));
    CHECK_FALSE(runs_canonically(Segment({Rat(1), Rat(0)}, {Rat(0), Rat(0)})));
    CHECK(runs_canonically(Segment({Rat(1), Rat(1)}, {Rat(2), Rat(0)})));
}

TEST_CASE("patch predicates on a 3x3 grid") {
    std::vector<Polygon> grid;
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) grid.push_back(unit_square(Rat(i), Rat(j)));
    }
    CHECK(tiles_interiors_disjoint(grid));
    CHECK(adjacent_pairs(grid).size() == 12);  // 6 horizontal + 6 vertical contacts
    CHECK(patch_is_side_to_side(grid));
    Polygon big = Polygon::checked({{Rat(0), Rat(0)}, {Rat(3), Rat(0)}, {Rat(3), Rat(3)}, {Rat(0), Rat(3)}});
    std::string why;
    CHECK(tiles_cover_region(grid, big, &why));

    // Shifting one square breaks exact coverage and side-to-side contact.
    std::vector<Polygon> shifted = {unit_square(), unit_square(Rat(1, 2), Rat(1))};
    std::string violation;
    CHECK_FALSE(patch_is_side_to_side(shifted, &violation));
    CHECK(!violation.empty());
    std::vector<Polygon> overlapping = {unit_square(), unit_square(Rat(1, 2), Rat(0))};
    CHECK_FALSE(tiles_interiors_disjoint(overlapping));
}

TEST_CASE("canonical translate classes") {
    Polygon a = unit_square(Rat(4), Rat(7));
    CHECK(a.congruent_by_translation(unit_square()));
    CHECK_FALSE(a.congruent_by_translation(chair_octagon()));
    auto canon = a.canonical_form();
    CHECK(canon.shape == unit_square());
    CHECK(canon.shape.translated(canon.offset) == a);
    // Rotation is not translation congruence.
    Polygon tri = Polygon::checked({{Rat(0), Rat(0)}, {Rat(2), Rat(0)}, {Rat(0), Rat(2)}});
    CHECK_FALSE(tri.congruent_by_translation(tri.rotated90()));
    CHECK(tri.rotated90().rotated270() == tri);
    CHECK(tri.rotated180().rotated180() == tri);
}
