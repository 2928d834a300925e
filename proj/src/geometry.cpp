#include "tilesmith/geometry.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace tilesmith {

Rat cross(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

Rat dot(const Point& u, const Point& v) { return u.x * v.x + u.y * v.y; }

bool point_on_segment(const Point& p, const Segment& s) {
    if (cross(s.a, s.b, p) != Rat(0)) return false;
    Rat xmin = std::min(s.a.x, s.b.x), xmax = std::max(s.a.x, s.b.x);
    Rat ymin = std::min(s.a.y, s.b.y), ymax = std::max(s.a.y, s.b.y);
    return xmin <= p.x && p.x <= xmax && ymin <= p.y && p.y <= ymax;
}

LineKey line_of(const Segment& s) {
    Rat a = s.b.y - s.a.y;
    Rat b = s.a.x - s.b.x;
    Rat c = a * s.a.x + b * s.a.y;
    if (a != Rat(0)) return {Rat(1), b / a, c / a};
    if (b == Rat(0)) throw InputError("degenerate segment has no line");
    return {Rat(0), Rat(1), c / b};
}

Rat param_on_line(const LineKey& line, const Point& p) {
    // x strictly increases along every non-vertical line; vertical lines
    // (key (1, 0, c)) are ordered by y.
    if (line.a == Rat(1) && line.b == Rat(0)) return p.y;
    return p.x;
}

bool runs_canonically(const Segment& s) { return s.a < s.b; }

SideRelation relate_sides(const Segment& s, const Segment& t) {
    LineKey ls = line_of(s);
    if (!(ls == line_of(t))) return SideRelation::Disjoint;
    Rat s_lo = param_on_line(ls, s.canonical().a), s_hi = param_on_line(ls, s.canonical().b);
    Rat t_lo = param_on_line(ls, t.canonical().a), t_hi = param_on_line(ls, t.canonical().b);
    if (s_lo == t_lo && s_hi == t_hi) return SideRelation::Coincide;
    Rat lo = std::max(s_lo, t_lo), hi = std::min(s_hi, t_hi);
    return lo < hi ? SideRelation::PartialOverlap : SideRelation::Disjoint;
}

bool segments_overlap(const Segment& s, const Segment& t) {
    return relate_sides(s, t) != SideRelation::Disjoint;
}

namespace {

// Do the two closed segments meet anywhere outside `allowed` (if given)?
// Collinear positive-length overlap always counts as a violation.
bool segments_conflict(const Segment& s, const Segment& t, const Point* allowed) {
    Rat o1 = cross(s.a, s.b, t.a);
    Rat o2 = cross(s.a, s.b, t.b);
    Rat o3 = cross(t.a, t.b, s.a);
    Rat o4 = cross(t.a, t.b, s.b);
    if (o1 == Rat(0) && o2 == Rat(0)) {
        // Collinear; conflict iff they overlap in length or touch at a
        // point other than `allowed`.
        if (relate_sides(s, t) != SideRelation::Disjoint) return true;
        for (const Point* p : {&t.a, &t.b}) {
            if (point_on_segment(*p, s) && !(allowed && *p == *allowed)) return true;
        }
        for (const Point* p : {&s.a, &s.b}) {
            if (point_on_segment(*p, t) && !(allowed && *p == *allowed)) return true;
        }
        return false;
    }
    if (o1.sign() * o2.sign() < 0 && o3.sign() * o4.sign() < 0) return true;  // proper crossing
    // Touching cases: some endpoint lies on the other segment.
    for (const Point* p : {&t.a, &t.b}) {
        if (point_on_segment(*p, s) && !(allowed && *p == *allowed)) return true;
    }
    for (const Point* p : {&s.a, &s.b}) {
        if (point_on_segment(*p, t) && !(allowed && *p == *allowed)) return true;
    }
    return false;
}

Rat shoelace_twice(const std::vector<Point>& v) {
    Rat s(0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return s;
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices) : verts_(std::move(vertices)) {}

Polygon Polygon::checked(std::vector<Point> vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) throw InputError("polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        if (vertices[i] == vertices[(i + 1) % n]) {
            throw InputError("polygon has a zero-length side at vertex " + vertices[i].str());
        }
    }
    Polygon poly(std::move(vertices));
    auto s = poly.sides();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point* shared = nullptr;
            if (j == i + 1) {
                shared = &poly.verts_[j];
            } else if (i == 0 && j == n - 1) {
                shared = &poly.verts_[0];
            }
            if (segments_conflict(s[i], s[j], shared)) {
                throw InputError("polygon is not simple: sides " + s[i].str() + " and " +
                                 s[j].str() + " conflict");
            }
        }
    }
    if (!(shoelace_twice(poly.verts_) > Rat(0))) {
        throw InputError("polygon is not counterclockwise");
    }
    return poly;
}

std::vector<Segment> Polygon::sides() const {
    std::vector<Segment> out;
    out.reserve(verts_.size());
    for (std::size_t i = 0; i < verts_.size(); ++i) out.push_back(side(i));
    return out;
}

Segment Polygon::side(std::size_t i) const {
    return {verts_[i], verts_[(i + 1) % verts_.size()]};
}

Rat Polygon::area() const { return shoelace_twice(verts_) / Rat(2); }

BBox Polygon::bbox() const {
    BBox b{verts_[0].x, verts_[0].y, verts_[0].x, verts_[0].y};
    for (const Point& p : verts_) {
        b.xmin = std::min(b.xmin, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.xmax = std::max(b.xmax, p.x);
        b.ymax = std::max(b.ymax, p.y);
    }
    return b;
}

PointLocation Polygon::locate(const Point& p) const {
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        if (point_on_segment(p, side(i))) return PointLocation::Boundary;
    }
    bool inside = false;
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        const Point& a = verts_[i];
        const Point& b = verts_[(i + 1) % verts_.size()];
        if ((a.y > p.y) != (b.y > p.y)) {
            // x coordinate where the side crosses the horizontal through p
            Rat t = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (t > p.x) inside = !inside;
        }
    }
    return inside ? PointLocation::Inside : PointLocation::Outside;
}

Polygon Polygon::translated(const Point& d) const {
    std::vector<Point> v;
    v.reserve(verts_.size());
    for (const Point& p : verts_) v.push_back(p + d);
    return Polygon(std::move(v));
}

Polygon Polygon::scaled(const Rat& s) const {
    std::vector<Point> v;
    v.reserve(verts_.size());
    for (const Point& p : verts_) v.push_back(p * s);
    return Polygon(std::move(v));
}

Polygon Polygon::rotated90() const {
    std::vector<Point> v;
    v.reserve(verts_.size());
    for (const Point& p : verts_) v.push_back(p.rotated90());
    return Polygon(std::move(v));
}

Polygon Polygon::rotated180() const {
    std::vector<Point> v;
    v.reserve(verts_.size());
    for (const Point& p : verts_) v.push_back(p.rotated180());
    return Polygon(std::move(v));
}

Polygon Polygon::rotated270() const {
    std::vector<Point> v;
    v.reserve(verts_.size());
    for (const Point& p : verts_) v.push_back(p.rotated270());
    return Polygon(std::move(v));
}

Polygon::Canonical Polygon::canonical_form() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < verts_.size(); ++i) {
        if (verts_[i] < verts_[best]) best = i;
    }
    Point offset = verts_[best];
    std::vector<Point> v;
    v.reserve(verts_.size());
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        v.push_back(verts_[(best + i) % verts_.size()] - offset);
    }
    return {Polygon(std::move(v)), offset};
}

bool Polygon::congruent_by_translation(const Polygon& o) const {
    if (verts_.size() != o.verts_.size()) return false;
    return canonical_form().shape == o.canonical_form().shape;
}

std::string Polygon::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        if (i) os << " ";
        os << verts_[i].str();
    }
    os << "]";
    return os.str();
}

std::vector<std::array<Point, 3>> triangulate(const Polygon& poly) {
    // Straight vertices do not change the region; drop them.
    std::vector<Point> v;
    {
        const auto& in = poly.vertices();
        const std::size_t n = in.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (cross(in[(i + n - 1) % n], in[i], in[(i + 1) % n]) != Rat(0)) {
                v.push_back(in[i]);
            }
        }
    }
    if (v.size() < 3) throw InputError("cannot triangulate a degenerate polygon");
    std::vector<std::array<Point, 3>> out;
    auto try_clip = [&](bool strict_only) {
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& a = v[(i + n - 1) % n];
            const Point& b = v[i];
            const Point& c = v[(i + 1) % n];
            if (!(cross(a, b, c) > Rat(0))) continue;  // reflex or straight
            Polygon tri({a, b, c});
            bool blocked = false;
            for (std::size_t j = 0; j < n && !blocked; ++j) {
                if (v[j] == a || v[j] == b || v[j] == c) continue;
                PointLocation loc = tri.locate(v[j]);
                if (loc == PointLocation::Inside ||
                    (!strict_only && loc == PointLocation::Boundary)) {
                    blocked = true;
                }
            }
            if (blocked) continue;
            out.push_back({a, b, c});
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
            return true;
        }
        return false;
    };
    while (v.size() > 3) {
        if (!try_clip(false) && !try_clip(true)) {
            throw InputError("ear clipping failed; polygon not simple?");
        }
    }
    out.push_back({v[0], v[1], v[2]});
    return out;
}

namespace {

// Area of the intersection of two counterclockwise triangles, by clipping the
// first against each half-plane of the second (Sutherland-Hodgman).
Rat triangle_intersection_area(const std::array<Point, 3>& t1, const std::array<Point, 3>& t2) {
    std::vector<Point> subject(t1.begin(), t1.end());
    for (int e = 0; e < 3 && !subject.empty(); ++e) {
        const Point& ca = t2[static_cast<std::size_t>(e)];
        const Point& cb = t2[static_cast<std::size_t>((e + 1) % 3)];
        std::vector<Point> next;
        const std::size_t n = subject.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& cur = subject[i];
            const Point& prv = subject[(i + n - 1) % n];
            Rat side_cur = cross(ca, cb, cur);
            Rat side_prv = cross(ca, cb, prv);
            bool in_cur = side_cur >= Rat(0);
            bool in_prv = side_prv >= Rat(0);
            if (in_cur != in_prv) {
                Rat t = side_prv / (side_prv - side_cur);
                next.push_back({prv.x + (cur.x - prv.x) * t, prv.y + (cur.y - prv.y) * t});
            }
            if (in_cur) next.push_back(cur);
        }
        subject = std::move(next);
    }
    if (subject.size() < 3) return Rat(0);
    return shoelace_twice(subject) / Rat(2);
}

}  // namespace

Rat intersection_area(const Polygon& a, const Polygon& b) {
    if (!a.bbox().overlaps_positively(b.bbox())) return Rat(0);
    Rat total(0);
    auto ta = triangulate(a);
    auto tb = triangulate(b);
    for (const auto& x : ta) {
        for (const auto& y : tb) {
            total += triangle_intersection_area(x, y);
        }
    }
    return total;
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
    return intersection_area(a, b) > Rat(0);
}

bool polygon_contains(const Polygon& outer, const Polygon& inner) {
    return intersection_area(outer, inner) == inner.area();
}

bool polygons_touch_along_side(const Polygon& a, const Polygon& b) {
    if (!a.bbox().intersects(b.bbox())) return false;
    for (const Segment& s : a.sides()) {
        for (const Segment& t : b.sides()) {
            if (segments_overlap(s, t)) return true;
        }
    }
    return false;
}

bool tiles_interiors_disjoint(const std::vector<Polygon>& tiles) {
    std::vector<BBox> boxes;
    boxes.reserve(tiles.size());
    for (const auto& t : tiles) boxes.push_back(t.bbox());
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        for (std::size_t j = i + 1; j < tiles.size(); ++j) {
            if (!boxes[i].overlaps_positively(boxes[j])) continue;
            if (polygons_overlap(tiles[i], tiles[j])) return false;
        }
    }
    return true;
}

std::vector<std::pair<std::size_t, std::size_t>> adjacent_pairs(const std::vector<Polygon>& tiles) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::vector<BBox> boxes;
    boxes.reserve(tiles.size());
    for (const auto& t : tiles) boxes.push_back(t.bbox());
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        for (std::size_t j = i + 1; j < tiles.size(); ++j) {
            if (!boxes[i].intersects(boxes[j])) continue;
            if (polygons_touch_along_side(tiles[i], tiles[j])) out.emplace_back(i, j);
        }
    }
    return out;
}

bool patch_is_side_to_side(const std::vector<Polygon>& tiles, std::string* first_violation) {
    std::map<LineKey, std::vector<std::pair<std::size_t, Segment>>> buckets;
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        for (const Segment& s : tiles[i].sides()) {
            buckets[line_of(s)].emplace_back(i, s);
        }
    }
    for (const auto& [line, group] : buckets) {
        (void)line;
        for (std::size_t a = 0; a < group.size(); ++a) {
            for (std::size_t b = a + 1; b < group.size(); ++b) {
                if (group[a].first == group[b].first) continue;
                if (relate_sides(group[a].second, group[b].second) ==
                    SideRelation::PartialOverlap) {
                    if (first_violation) {
                        *first_violation = "tile " + std::to_string(group[a].first) + " side " +
                                           group[a].second.str() + " partially overlaps tile " +
                                           std::to_string(group[b].first) + " side " +
                                           group[b].second.str();
                    }
                    return false;
                }
            }
        }
    }
    return true;
}

bool tiles_cover_region(const std::vector<Polygon>& tiles, const Polygon& region,
                        std::string* why_not) {
    Rat total(0);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        if (!polygon_contains(region, tiles[i])) {
            if (why_not) *why_not = "tile " + std::to_string(i) + " is not inside the region";
            return false;
        }
        total += tiles[i].area();
    }
    if (total != region.area()) {
        if (why_not) {
            *why_not = "tile areas sum to " + total.str() + ", region has " + region.area().str();
        }
        return false;
    }
    if (!tiles_interiors_disjoint(tiles)) {
        if (why_not) *why_not = "tiles overlap";
        return false;
    }
    return true;
}

}  // namespace tilesmith
