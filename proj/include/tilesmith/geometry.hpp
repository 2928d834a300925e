#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tilesmith/rational.hpp"

namespace tilesmith {

struct Point {
    Rat x;
    Rat y;

    Point() = default;
    Point(Rat px, Rat py) : x(px), y(py) {}

    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    Point operator*(const Rat& s) const { return {x * s, y * s}; }
    bool operator==(const Point& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Point& o) const { return !(*this == o); }
    // Lexicographic order, x first. Used for canonical directions and map keys.
    bool operator<(const Point& o) const {
        if (x != o.x) return x < o.x;
        return y < o.y;
    }

    Point rotated90() const { return {-y, x}; }    // counterclockwise quarter turn
    Point rotated180() const { return {-x, -y}; }
    Point rotated270() const { return {y, -x}; }

    std::string str() const { return "(" + x.str() + "," + y.str() + ")"; }
};

// cross of (b-a) and (c-a); > 0 iff a,b,c make a left turn.
Rat cross(const Point& a, const Point& b, const Point& c);
Rat dot(const Point& u, const Point& v);

// Closed segment with distinct endpoints, order as given (a -> b).
struct Segment {
    Point a;
    Point b;

    Segment() = default;
    Segment(Point pa, Point pb) : a(pa), b(pb) {}

    bool operator==(const Segment& o) const { return a == o.a && b == o.b; }
    bool operator<(const Segment& o) const {
        if (!(a == o.a)) return a < o.a;
        return b < o.b;
    }

    Segment reversed() const { return {b, a}; }
    // Endpoints in lexicographic order; two segments are the same undirected
    // side iff their canonical forms are equal.
    Segment canonical() const { return a < b ? *this : reversed(); }
    bool same_undirected(const Segment& o) const { return canonical() == o.canonical(); }
    Point midpoint() const { return {(a.x + b.x) / Rat(2), (a.y + b.y) / Rat(2)}; }
    Segment translated(const Point& d) const { return {a + d, b + d}; }
    std::string str() const { return a.str() + "-" + b.str(); }
};

bool point_on_segment(const Point& p, const Segment& s);  // closed, endpoints included

// Canonical representation of the supporting line, usable as a map key so
// collinear sides land in the same bucket.
struct LineKey {
    Rat a, b, c;  // a*x + b*y = c with (a,b) normalized to (1,*) or (0,1)

    bool operator==(const LineKey& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const LineKey& o) const {
        if (!(a == o.a)) return a < o.a;
        if (!(b == o.b)) return b < o.b;
        return c < o.c;
    }
};

LineKey line_of(const Segment& s);

// Position of p along the canonical direction of its line: strictly increasing
// from the lexicographically smaller end. Only meaningful for points on one line.
Rat param_on_line(const LineKey& line, const Point& p);

// How two sides relate as point sets of their common line.
enum class SideRelation {
    Disjoint,        // share at most one point
    Coincide,        // equal as undirected segments
    PartialOverlap,  // collinear, share positive length, not equal
};

SideRelation relate_sides(const Segment& s, const Segment& t);

// True iff the closed segments share a subsegment of positive length.
bool segments_overlap(const Segment& s, const Segment& t);

// s runs in the canonical direction of its line (from the lexicographically
// smaller endpoint). A tile traversing a boundary side in canonical direction
// lies on the left of that line (counterclockwise orientation).
bool runs_canonically(const Segment& s);

enum class PointLocation { Outside, Boundary, Inside };

struct BBox {
    Rat xmin, ymin, xmax, ymax;
    bool intersects(const BBox& o) const {
        return !(xmax < o.xmin || o.xmax < xmin || ymax < o.ymin || o.ymax < ymin);
    }
    bool overlaps_positively(const BBox& o) const {
        return xmin < o.xmax && o.xmin < xmax && ymin < o.ymax && o.ymin < ymax;
    }
};

// Simple polygon, vertices counterclockwise. Straight (angle pi) vertices are
// permitted: they subdivide what would otherwise be one side, and the side
// structure they induce is meaningful everywhere in this library.
class Polygon {
public:
    Polygon() = default;
    explicit Polygon(std::vector<Point> vertices);

    // Throws InputError unless: >= 3 vertices, counterclockwise, simple
    // (no self-intersection, no repeated vertices, no zero-length or
    // backtracking sides). Straight vertices are allowed.
    static Polygon checked(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return verts_; }
    std::size_t size() const { return verts_.size(); }
    std::vector<Segment> sides() const;
    Segment side(std::size_t i) const;  // vertex i -> vertex i+1 (mod n)

    Rat area() const;  // positive for counterclockwise
    BBox bbox() const;
    PointLocation locate(const Point& p) const;

    Polygon translated(const Point& d) const;
    Polygon scaled(const Rat& s) const;
    Polygon rotated90() const;
    Polygon rotated180() const;
    Polygon rotated270() const;

    // Same vertex cycle starting at the lexicographically smallest vertex;
    // `offset` satisfies *this == canonical.translated(offset).
    struct Canonical;
    Canonical canonical_form() const;
    bool congruent_by_translation(const Polygon& o) const;

    bool operator==(const Polygon& o) const { return verts_ == o.verts_; }
    bool operator!=(const Polygon& o) const { return !(*this == o); }
    bool operator<(const Polygon& o) const { return verts_ < o.verts_; }

    std::string str() const;

private:
    std::vector<Point> verts_;
};

struct Polygon::Canonical {
    Polygon shape;
    Point offset;
};

// Fan-free exact triangulation by ear clipping; straight vertices are dropped
// first (they do not affect area or coverage).
std::vector<std::array<Point, 3>> triangulate(const Polygon& poly);

// Exact area of the intersection of two simple polygons.
Rat intersection_area(const Polygon& a, const Polygon& b);

// Interiors intersect.
bool polygons_overlap(const Polygon& a, const Polygon& b);

// Every point of `inner` lies in `outer` (closed containment).
bool polygon_contains(const Polygon& outer, const Polygon& inner);

// Boundaries share a subsegment of positive length.
bool polygons_touch_along_side(const Polygon& a, const Polygon& b);

// --- patches -----------------------------------------------------------------

// Pairwise interiors disjoint.
bool tiles_interiors_disjoint(const std::vector<Polygon>& tiles);

// Index pairs (i < j) of tiles sharing positive-length boundary.
std::vector<std::pair<std::size_t, std::size_t>> adjacent_pairs(const std::vector<Polygon>& tiles);

// Every positive-length contact between two different tiles is a full common
// side of both. Tiles must already have disjoint interiors.
bool patch_is_side_to_side(const std::vector<Polygon>& tiles,
                           std::string* first_violation = nullptr);

// Tiles cover `region` exactly: each tile inside, interiors disjoint, areas add up.
bool tiles_cover_region(const std::vector<Polygon>& tiles, const Polygon& region,
                        std::string* why_not = nullptr);

}  // namespace tilesmith
