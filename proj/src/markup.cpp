#include "tilesmith/markup.hpp"

#include <algorithm>
#include <sstream>

namespace tilesmith {

namespace {

// Merge the param intervals of `pieces` on one line and test whether
// [lo, hi] is covered.
bool interval_covered(std::vector<std::pair<Rat, Rat>> pieces, const Rat& lo, const Rat& hi) {
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    Rat reach = lo;
    for (const auto& [a, b] : pieces) {
        if (a > reach) break;
        if (b > reach) reach = b;
        if (reach >= hi) return true;
    }
    return reach >= hi;
}

}  // namespace

SideClass classify_sides(const Substitution& s, std::size_t macrotile) {
    const Patch& patch = s.rule(macrotile);
    auto shapes = s.shapes_of(patch);
    std::string why;
    if (!patch_is_side_to_side(shapes, &why)) {
        throw InputError(s.key() + ": rule " + s.proto_name(macrotile) +
                         " is not side-to-side: " + why);
    }
    Polygon region = s.supertile_region(macrotile, 1);
    auto region_sides = region.sides();
    std::map<LineKey, std::vector<std::pair<std::size_t, std::pair<Rat, Rat>>>> boundary;
    for (std::size_t a = 0; a < region_sides.size(); ++a) {
        LineKey line = line_of(region_sides[a]);
        Segment c = region_sides[a].canonical();
        boundary[line].push_back({a, {param_on_line(line, c.a), param_on_line(line, c.b)}});
    }
    auto on_boundary = [&](const Point& p) {
        for (const Segment& rs : region_sides) {
            if (point_on_segment(p, rs)) return true;
        }
        return false;
    };

    SideClass out;
    out.kind.resize(shapes.size());
    out.macroside_of.resize(shapes.size());
    for (std::size_t t = 0; t < shapes.size(); ++t) {
        auto sides = shapes[t].sides();
        out.kind[t].assign(sides.size(), SideKind::Inner);
        out.macroside_of[t].assign(sides.size(), -1);
        for (std::size_t k = 0; k < sides.size(); ++k) {
            Segment seg = sides[k].canonical();
            LineKey line = line_of(seg);
            Rat lo = param_on_line(line, seg.a);
            Rat hi = param_on_line(line, seg.b);
            bool outer = false;
            auto it = boundary.find(line);
            if (it != boundary.end()) {
                std::vector<std::pair<Rat, Rat>> pieces;
                for (const auto& [a, iv] : it->second) pieces.push_back(iv);
                outer = interval_covered(pieces, lo, hi);
                if (outer) {
                    int home = -1;
                    for (const auto& [a, iv] : it->second) {
                        if (iv.first <= lo && hi <= iv.second) {
                            home = static_cast<int>(a);
                            break;
                        }
                    }
                    if (home < 0) {
                        throw InputError(s.key() + ": an outer side straddles two macrosides");
                    }
                    out.kind[t][k] = SideKind::Outer;
                    out.macroside_of[t][k] = home;
                }
            }
            if (!outer) {
                bool a_on = on_boundary(seg.a);
                bool b_on = on_boundary(seg.b);
                out.kind[t][k] = (a_on || b_on) ? SideKind::Border : SideKind::Inner;
            }
        }
    }
    return out;
}

bool admissible_pair(const Polygon& left_shape, std::size_t left_side, const Polygon& right_shape,
                     std::size_t right_side) {
    Segment a = left_shape.side(left_side);
    Segment b = right_shape.side(right_side);
    // The left tile lies left of the side iff its boundary traverses the side
    // in the canonical direction; translation preserves this.
    if (!runs_canonically(a)) return false;
    if (runs_canonically(b)) return false;
    Segment ca = a.canonical(), cb = b.canonical();
    Point off = ca.a - cb.a;
    if (!(cb.b + off == ca.b)) return false;  // different length or direction
    return !polygons_overlap(left_shape, right_shape.translated(off));
}

MarkupContext::MarkupContext(const Substitution& s, const Markup& m) : sub_(&s), markup_(m) {
    const std::size_t n = s.proto_count();
    if (m.names.size() != n || m.central.size() != n || m.nets.size() != n) {
        throw InputError(s.key() + ": markup arrays do not match the prototile count");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (m.names[i].size() != s.proto(i).size()) {
            throw InputError(s.key() + ": side name count mismatch on " + s.proto_name(i));
        }
        for (std::size_t a = 0; a < m.names[i].size(); ++a) {
            if (m.names[i][a].empty()) throw InputError(s.key() + ": empty side name");
            for (std::size_t b = a + 1; b < m.names[i].size(); ++b) {
                if (m.names[i][a] == m.names[i][b]) {
                    throw InputError(s.key() + ": prototile " + s.proto_name(i) +
                                     " repeats side name " + m.names[i][a]);
                }
            }
        }
    }
    views_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        MacroView& v = views_[i];
        v.patch = s.rule(i);
        v.shapes = s.shapes_of(v.patch);
        v.region = s.supertile_region(i, 1);
        v.cls = classify_sides(s, i);
        if (m.central[i] >= v.patch.size()) {
            throw InputError(s.key() + ": central tile index out of range for " + s.proto_name(i));
        }
        for (std::size_t t = 0; t < v.shapes.size(); ++t) {
            for (std::size_t k = 0; k < v.shapes[t].size(); ++k) {
                v.refs_by_segment[v.shapes[t].side(k).canonical()].push_back({t, k});
            }
            v.net.push_back(std::vector<bool>(v.shapes[t].size(), false));
            v.path_of.push_back(std::vector<int>(v.shapes[t].size(), -1));
        }
        if (m.nets[i].size() != s.proto(i).size()) {
            throw InputError(s.key() + ": net path count mismatch on " + s.proto_name(i));
        }
    }
    // Validate the paths and fill the net flags.
    for (std::size_t i = 0; i < n; ++i) {
        MacroView& v = views_[i];
        std::size_t central_form = v.patch[m.central[i]].proto;
        for (std::size_t a = 0; a < m.nets[i].size(); ++a) {
            const auto& path = m.nets[i][a].sides;
            const SideName& z = m.names[i][a];
            std::string where =
                s.key() + ": path for macroside " + z + " of " + s.proto_name(i);
            if (path.empty()) throw InputError(where + " is empty");
            std::set<Segment> seen;
            for (const SideRef& r : path) {
                if (r.tile >= v.shapes.size() || r.side >= v.shapes[r.tile].size()) {
                    throw InputError(where + " references a missing side");
                }
                if (!seen.insert(segment_of(i, r)).second) {
                    throw InputError(where + " repeats a side");
                }
            }
            const SideRef& first = path.front();
            if (v.cls.kind[first.tile][first.side] != SideKind::Outer ||
                v.cls.macroside_of[first.tile][first.side] != static_cast<int>(a)) {
                throw InputError(where + " does not start with an outer side on its macroside");
            }
            for (std::size_t q = 0; q + 1 < path.size(); ++q) {
                auto t1 = tiles_on_segment(i, segment_of(i, path[q]));
                auto t2 = tiles_on_segment(i, segment_of(i, path[q + 1]));
                bool share = false;
                for (std::size_t x : t1) {
                    for (std::size_t y : t2) {
                        if (x == y) share = true;
                    }
                }
                if (!share) {
                    throw InputError(where + ": consecutive sides " + path[q].str() + " and " +
                                     path[q + 1].str() + " do not share a tile");
                }
            }
            // The last side must be the central tile's z-named side.
            int zk = -1;
            for (std::size_t k = 0; k < m.names[central_form].size(); ++k) {
                if (m.names[central_form][k] == z) zk = static_cast<int>(k);
            }
            if (zk < 0) {
                throw InputError(where + ": central form " + s.proto_name(central_form) +
                                 " has no side named " + z);
            }
            Segment central_side =
                v.shapes[m.central[i]].side(static_cast<std::size_t>(zk)).canonical();
            if (!(segment_of(i, path.back()) == central_side)) {
                throw InputError(where + " does not end at the central tile's " + z + " side");
            }
            for (const SideRef& r : path) {
                for (const SideRef& twin : v.refs_by_segment[segment_of(i, r)]) {
                    v.net[twin.tile][twin.side] = true;
                    if (v.path_of[twin.tile][twin.side] < 0) {
                        v.path_of[twin.tile][twin.side] = static_cast<int>(a);
                    }
                }
            }
        }
        std::set<Segment> ports;
        for (std::size_t t = 0; t < v.shapes.size(); ++t) {
            for (std::size_t k = 0; k < v.shapes[t].size(); ++k) {
                if (v.net[t][k] && v.cls.kind[t][k] == SideKind::Outer) {
                    ports.insert(v.shapes[t].side(k).canonical());
                }
            }
        }
        v.port_segments.assign(ports.begin(), ports.end());
    }
}

Segment MarkupContext::segment_of(std::size_t macrotile, const SideRef& r) const {
    return views_.at(macrotile).shapes.at(r.tile).side(r.side).canonical();
}

std::vector<std::size_t> MarkupContext::tiles_on_segment(std::size_t macrotile,
                                                         const Segment& seg) const {
    std::vector<std::size_t> out;
    auto it = views_.at(macrotile).refs_by_segment.find(seg.canonical());
    if (it != views_.at(macrotile).refs_by_segment.end()) {
        for (const SideRef& r : it->second) {
            if (out.empty() || out.back() != r.tile) out.push_back(r.tile);
        }
    }
    return out;
}

std::size_t MarkupContext::central_form(std::size_t i) const {
    return views_.at(i).patch.at(markup_.central.at(i)).proto;
}

std::vector<std::size_t> MarkupContext::central_form_map() const {
    std::vector<std::size_t> c;
    c.reserve(views_.size());
    for (std::size_t i = 0; i < views_.size(); ++i) c.push_back(central_form(i));
    return c;
}

const RequirementReport* MarkupReport::find(const std::string& requirement) const {
    for (const auto& r : items) {
        if (r.requirement == requirement) return &r;
    }
    return nullptr;
}

std::string MarkupReport::str() const {
    std::ostringstream os;
    for (const auto& r : items) {
        os << r.requirement << ": " << (r.pass ? "pass" : "FAIL");
        if (!r.pass && !r.witness.empty()) os << " (" << r.witness << ")";
        os << "\n";
    }
    return os.str();
}

namespace {

RequirementReport check_R1(const MarkupContext& ctx) {
    RequirementReport rep{"R1", true, ""};
    for (std::size_t i = 0; i < ctx.macro_count(); ++i) {
        const auto& v = ctx.view(i);
        std::size_t c = ctx.markup().central[i];
        for (std::size_t k = 0; k < v.shapes[c].size(); ++k) {
            if (v.cls.kind[c][k] != SideKind::Inner) {
                rep.pass = false;
                rep.witness = "central tile of " + ctx.sub().proto_name(i) + " has a non-inner side " +
                              v.shapes[c].side(k).str();
                return rep;
            }
        }
    }
    return rep;
}

RequirementReport check_R2(const MarkupContext& ctx) {
    RequirementReport rep{"R2", true, ""};
    for (std::size_t i = 0; i < ctx.macro_count(); ++i) {
        std::map<Segment, int> owner;
        for (std::size_t a = 0; a < ctx.markup().nets[i].size(); ++a) {
            for (const SideRef& r : ctx.markup().nets[i][a].sides) {
                Segment seg = ctx.segment_of(i, r);
                auto [it, fresh] = owner.emplace(seg, static_cast<int>(a));
                if (!fresh && it->second != static_cast<int>(a)) {
                    rep.pass = false;
                    rep.witness = "paths " + ctx.markup().names[i][it->second] + " and " +
                                  ctx.markup().names[i][a] + " of " + ctx.sub().proto_name(i) +
                                  " share side " + seg.str();
                    return rep;
                }
            }
        }
    }
    return rep;
}

RequirementReport check_R3(const MarkupContext& ctx) {
    RequirementReport rep{"R3", true, ""};
    for (std::size_t i = 0; i < ctx.macro_count(); ++i) {
        const auto& v = ctx.view(i);
        std::vector<bool> has(ctx.sub().proto(i).size(), false);
        for (std::size_t t = 0; t < v.shapes.size(); ++t) {
            for (std::size_t k = 0; k < v.shapes[t].size(); ++k) {
                if (v.cls.kind[t][k] == SideKind::Outer && !v.net[t][k]) {
                    has[static_cast<std::size_t>(v.cls.macroside_of[t][k])] = true;
                }
            }
        }
        for (std::size_t a = 0; a < has.size(); ++a) {
            if (!has[a]) {
                rep.pass = false;
                rep.witness = "macroside " + ctx.markup().names[i][a] + " of " +
                              ctx.sub().proto_name(i) + " has no secondary port";
                return rep;
            }
        }
    }
    return rep;
}

RequirementReport check_R4(const MarkupContext& ctx) {
    RequirementReport rep{"R4", true, ""};
    for (std::size_t i = 0; i < ctx.macro_count(); ++i) {
        const auto& v = ctx.view(i);
        for (std::size_t t = 0; t < v.shapes.size(); ++t) {
            for (std::size_t k = 0; k < v.shapes[t].size(); ++k) {
                if (v.net[t][k] && v.cls.kind[t][k] == SideKind::Border) {
                    rep.pass = false;
                    rep.witness = "border side " + v.shapes[t].side(k).str() + " of " +
                                  ctx.sub().proto_name(i) + " belongs to the net";
                    return rep;
                }
            }
        }
    }
    return rep;
}

RequirementReport check_R5(const MarkupContext& ctx) {
    RequirementReport rep{"R5", true, ""};
    for (std::size_t i = 0; i < ctx.macro_count(); ++i) {
        const auto& ports = ctx.view(i).port_segments;
        for (std::size_t x = 0; x < ports.size(); ++x) {
            for (std::size_t y = x + 1; y < ports.size(); ++y) {
                for (const Point& p : {ports[x].a, ports[x].b}) {
                    if (p == ports[y].a || p == ports[y].b) {
                        rep.pass = false;
                        rep.witness = "main ports " + ports[x].str() + " and " + ports[y].str() +
                                      " of " + ctx.sub().proto_name(i) + " share vertex " + p.str();
                        return rep;
                    }
                }
            }
        }
    }
    return rep;
}

RequirementReport check_R6(const MarkupContext& ctx) {
    RequirementReport rep{"R6", true, ""};
    const Substitution& s = ctx.sub();
    for (std::size_t i = 0; i < ctx.macro_count(); ++i) {
        for (std::size_t j = 0; j < ctx.macro_count(); ++j) {
            const auto& vi = ctx.view(i);
            const auto& vj = ctx.view(j);
            std::set<Point> offsets;
            for (const Segment& g : vi.region.sides()) {
                for (const Segment& h : vj.region.sides()) {
                    Segment cg = g.canonical(),ch = h.canonical();
                    Point off = cg.a - ch.a;
                    if (!(ch.b + off == cg.b)) continue;
                    offsets.insert(off);
                }
            }
            for (const Point& off : offsets) {
                Polygon moved = vj.region.translated(off);
                if (intersection_area(vi.region, moved) > Rat(0)) continue;
                std::vector<Polygon> both = vi.shapes;
                for (const Polygon& p : vj.shapes) both.push_back(p.translated(off));
                if (!patch_is_side_to_side(both)) continue;
                // Qualifying connection: every main port on the contact must
                // coincide with a main port of the other macrotile.
                auto check_ports = [&](const std::vector<Segment>& mine,
                                       const std::vector<Segment>& theirs, const Polygon& other,
                                       const char* who) {
                    for (const Segment& p : mine) {
                        bool touches = false;
                        for (const Segment& os : other.sides()) {
                            if (segments_overlap(p, os)) touches = true;
                        }
                        if (!touches) continue;
                        bool matched = false;
                        for (const Segment& q : theirs) {
                            if (q == p) matched = true;
                        }
                        if (!matched) {
                            rep.pass = false;
                            rep.witness = std::string("connection of ") + s.proto_name(i) +
                                          " and " + s.proto_name(j) + " at offset " + off.str() +
                                          ": main port " + p.str() + " of " + who +
                                          " meets no main port";
                        }
                    }
                };
                std::vector<Segment> pj;
                for (const Segment& q : vj.port_segments) {
                    pj.push_back(Segment(q.a + off, q.b + off).canonical());
                }
                check_ports(vi.port_segments, pj, moved, s.proto_name(i).c_str());
                if (!rep.pass) return rep;
                check_ports(pj, vi.port_segments, vi.region, s.proto_name(j).c_str());
                if (!rep.pass) return rep;
            }
        }
    }
    return rep;
}

RequirementReport check_R7(const MarkupContext& ctx) {
    RequirementReport rep{"R7", true, ""};
    const Substitution& s = ctx.sub();
    const auto& names = ctx.markup().names;
    for (std::size_t fa = 0; fa < s.proto_count(); ++fa) {
        for (std::size_t a = 0; a < names[fa].size(); ++a) {
            for (std::size_t fb = 0; fb < s.proto_count(); ++fb) {
                for (std::size_t b = 0; b < names[fb].size(); ++b) {
                    if (names[fa][a] != names[fb][b]) continue;
                    if (admissible_pair(s.proto(fa), a, s.proto(fb), b)) {
                        rep.pass = false;
                        rep.witness = "admissible quadruple <" + s.proto_name(fa) + "," +
                                      names[fa][a] + "," + s.proto_name(fb) + "," + names[fb][b] +
                                      ">";
                        return rep;
                    }
                }
            }
        }
    }
    return rep;
}

RequirementReport check_R8(const MarkupContext& ctx) {
    RequirementReport rep{"R8", true, ""};
    for (std::size_t i = 0; i < ctx.macro_count(); ++i) {
        const auto& v = ctx.view(i);
        for (std::size_t t = 0; t < v.shapes.size(); ++t) {
            if (t == ctx.markup().central[i]) continue;
            int net_count = 0;
            for (std::size_t k = 0; k < v.shapes[t].size(); ++k) {
                if (v.net[t][k]) ++net_count;
            }
            int n = static_cast<int>(v.shapes[t].size());
            if (!(3 * net_count < 2 * n)) {
                rep.pass = false;
                rep.witness = "tile " + std::to_string(t) + " of " + ctx.sub().proto_name(i) +
                              " has " + std::to_string(net_count) + " net sides out of " +
                              std::to_string(n);
                return rep;
            }
        }
    }
    return rep;
}

}  // namespace

MarkupReport check_requirements(const Substitution& s, const Markup& m) {
    MarkupContext ctx(s, m);
    MarkupReport rep;
    rep.items.push_back(check_R1(ctx));
    rep.items.push_back(check_R2(ctx));
    rep.items.push_back(check_R3(ctx));
    rep.items.push_back(check_R4(ctx));
    rep.items.push_back(check_R5(ctx));
    rep.items.push_back(check_R6(ctx));
    rep.items.push_back(check_R7(ctx));
    rep.items.push_back(check_R8(ctx));
    for (const auto& r : rep.items) rep.all_pass = rep.all_pass && r.pass;
    return rep;
}

RequirementReport check_R8prime(const Substitution& s, const Markup& m) {
    MarkupContext ctx(s, m);
    RequirementReport rep{"R8'", true, ""};
    // Non-central types: (macrotile, tile) pairs.
    struct TypeInfo {
        std::size_t macrotile, tile, form;
        std::map<SideName, std::size_t> by_name;
        std::vector<bool> net;
        std::vector<int> path;
    };
    std::vector<TypeInfo> types;
    for (std::size_t i = 0; i < ctx.macro_count(); ++i) {
        const auto& v = ctx.view(i);
        for (std::size_t t = 0; t < v.shapes.size(); ++t) {
            if (t == m.central[i]) continue;
            TypeInfo info;
            info.macrotile = i;
            info.tile = t;
            info.form = v.patch[t].proto;
            for (std::size_t k = 0; k < v.shapes[t].size(); ++k) {
                info.by_name[m.names[info.form][k]] = k;
            }
            info.net.assign(v.net[t].begin(), v.net[t].end());
            info.path.assign(v.path_of[t].begin(), v.path_of[t].end());
            types.push_back(std::move(info));
        }
    }
    for (const TypeInfo& a : types) {
        for (const TypeInfo& b : types) {
            if (a.macrotile == b.macrotile && a.tile == b.tile) continue;
            // Clause 1: a has a side with no eponymous side in b.
            bool clause1 = false;
            for (const auto& [name, k] : a.by_name) {
                (void)k;
                if (!b.by_name.count(name)) clause1 = true;
            }
            if (clause1) continue;
            // Clause 2: b has a non-net side whose eponymous side in a is not a net side.
            bool clause2 = false;
            for (const auto& [name, k] : b.by_name) {
                if (b.net[k]) continue;
                auto it = a.by_name.find(name);
                if (it == a.by_name.end() || !a.net[it->second]) clause2 = true;
            }
            if (clause2) continue;
            // Clause 3: two sides of a on one net path whose eponymous sides in
            // b are both outside the net.
            bool clause3 = false;
            for (const auto& [n1, k1] : a.by_name) {
                for (const auto& [n2, k2] : a.by_name) {
                    if (k1 >= k2) continue;
                    if (!a.net[k1] || !a.net[k2] || a.path[k1] != a.path[k2]) continue;
                    auto i1 = b.by_name.find(n1);
                    auto i2 = b.by_name.find(n2);
                    if (i1 == b.by_name.end() || i2 == b.by_name.end()) continue;
                    if (!b.net[i1->second] && !b.net[i2->second]) clause3 = true;
                }
            }
            if (clause3) continue;
            rep.pass = false;
            rep.witness = "pair <tile " + std::to_string(a.tile) + " of " +
                          s.proto_name(a.macrotile) + ", tile " + std::to_string(b.tile) + " of " +
                          s.proto_name(b.macrotile) + "> (both of form " + s.proto_name(a.form) +
                          ") satisfies none of the three clauses";
            return rep;
        }
    }
    return rep;
}

RequirementReport check_cyclicity(const Substitution& s, const Markup& m) {
    MarkupContext ctx(s, m);
    auto c = ctx.central_form_map();
    RequirementReport rep{"Cyclicity", true, ""};
    std::ostringstream graph;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) graph << ", ";
        graph << s.proto_name(i) << "->" << s.proto_name(c[i]);
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[c[i]] != c[i]) {
            rep.pass = false;
            rep.witness = "central map not idempotent at " + s.proto_name(i) + " (" + graph.str() +
                          ")";
            return rep;
        }
    }
    rep.witness = graph.str();
    return rep;
}

RequirementReport check_outer_sides(const Substitution& s) {
    RequirementReport rep{"OuterSides", true, ""};
    for (std::size_t i = 0; i < s.proto_count(); ++i) {
        SideClass cls = classify_sides(s, i);
        auto shapes = s.shapes_of(s.rule(i));
        for (std::size_t t = 0; t < shapes.size(); ++t) {
            std::vector<std::pair<LineKey, bool>> outers;  // direction family, tile-on-left
            for (std::size_t k = 0; k < shapes[t].size(); ++k) {
                if (cls.kind[t][k] != SideKind::Outer) continue;
                Segment side = shapes[t].side(k);
                LineKey l = line_of(side);
                outers.push_back({l, runs_canonically(side)});
            }
            for (std::size_t x = 0; x < outers.size(); ++x) {
                for (std::size_t y = 0; y < outers.size(); ++y) {
                    if (outers[x].first.a == outers[y].first.a &&
                        outers[x].first.b == outers[y].first.b && outers[x].second &&
                        !outers[y].second) {
                        rep.pass = false;
                        rep.witness = "tile " + std::to_string(t) + " of " + s.proto_name(i) +
                                      " lies left of one outer side and right of a parallel one";
                        return rep;
                    }
                }
            }
        }
    }
    return rep;
}

namespace {

int side_index_on(const Polygon& shape, const Segment& seg) {
    Segment want = seg.canonical();
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (shape.side(k).canonical() == want) return static_cast<int>(k);
    }
    return -1;
}

// One lifting step: markup of sigma (a power of tau) -> markup of sigma*tau's
// decomposition, stitching base net paths through the tau-macrotile that
// replaces each rule tile.
std::pair<Substitution, Markup> lift_once(const Substitution& tau, const MarkupContext& base,
                                          const Substitution& sigma, const Markup& mu) {
    MarkupContext ctx(sigma, mu);
    std::vector<Patch> new_rules;
    for (std::size_t u = 0; u < sigma.proto_count(); ++u) {
        new_rules.push_back(tau.decompose_patch(sigma.rule(u)));
    }
    std::vector<Polygon> protos;
    std::vector<std::string> names;
    for (std::size_t u = 0; u < sigma.proto_count(); ++u) {
        protos.push_back(sigma.proto(u));
        names.push_back(sigma.proto_name(u));
    }
    Substitution next(sigma.key() + "*", names, protos, sigma.theta() * tau.theta(),
                      new_rules);

    Markup out;
    out.names = mu.names;
    out.central.resize(sigma.proto_count());
    out.nets.resize(sigma.proto_count());
    for (std::size_t u = 0; u < sigma.proto_count(); ++u) {
        // Block offset of each old tile's children inside the new rule.
        const Patch& old_rule = sigma.rule(u);
        std::vector<std::size_t> block(old_rule.size() + 1, 0);
        for (std::size_t t = 0; t < old_rule.size(); ++t) {
            block[t + 1] = block[t] + tau.rule(old_rule[t].proto).size();
        }
        std::size_t old_central = mu.central[u];
        std::size_t old_central_form = old_rule[old_central].proto;
        out.central[u] = block[old_central] + base.markup().central[old_central_form];

        auto new_shape = [&](std::size_t tile) {
            return next.proto(next.rule(u)[tile].proto).translated(next.rule(u)[tile].offset);
        };
        auto base_path_refs = [&](std::size_t old_tile, const Segment& entry_seg) {
            // The base net path of the tau-macrotile replacing old_tile, for
            // the macroside matching entry_seg, embedded into the new rule.
            std::size_t form = old_rule[old_tile].proto;
            int a = side_index_on(sigma.proto(form).translated(old_rule[old_tile].offset),
                                  entry_seg);
            if (a < 0) {
                throw InputError(sigma.key() + ": lifted path side is not a side of its carrier");
            }
            std::vector<SideRef> refs;
            for (const SideRef& r : base.markup().nets[form][static_cast<std::size_t>(a)].sides) {
                refs.push_back({block[old_tile] + r.tile, r.side});
            }
            return refs;
        };

        out.nets[u].resize(sigma.proto(u).size());
        for (std::size_t a = 0; a < sigma.proto(u).size(); ++a) {
            const auto& old_path = mu.nets[u][a].sides;
            // Collapse the old path into macrotile visits (carrier, entry side).
            std::vector<Segment> segs;
            for (const SideRef& r : old_path) segs.push_back(ctx.segment_of(u, r));
            struct Visit {
                std::size_t tile;
                Segment entry;
                Segment exit;
            };
            std::vector<Visit> visits;
            std::size_t cur = 0;
            bool have = false;
            for (std::size_t q = 0; q + 1 < segs.size(); ++q) {
                auto t1 = ctx.tiles_on_segment(u, segs[q]);
                auto t2 = ctx.tiles_on_segment(u, segs[q + 1]);
                std::size_t carrier = 0;
                bool found = false;
                for (std::size_t x : t1) {
                    for (std::size_t y : t2) {
                        if (x == y && !found) {
                            carrier = x;
                            found = true;
                        }
                    }
                }
                if (!found) throw InputError(sigma.key() + ": broken net path during lifting");
                if (!have) {
                    cur = carrier;
                    visits.push_back({carrier, segs[q], segs[q + 1]});
                    have = true;
                } else if (carrier == cur) {
                    visits.back().exit = segs[q + 1];
                } else {
                    cur = carrier;
                    visits.push_back({carrier, segs[q], segs[q + 1]});
                }
            }
            if (visits.empty()) {
                throw InputError(sigma.key() + ": net path with a single side cannot be lifted");
            }

            std::vector<SideRef> refs;
            auto append = [&](const std::vector<SideRef>& piece, bool expect_coincide_join) {
                std::size_t start = 0;
                if (!refs.empty() && !piece.empty()) {
                    Segment prev = new_shape(refs.back().tile).side(refs.back().side).canonical();
                    Segment head = new_shape(piece[0].tile).side(piece[0].side).canonical();
                    if (expect_coincide_join) {
                        if (!(prev == head)) {
                            throw InputError(sigma.key() +
                                             ": main ports on a shared superside do not coincide; "
                                             "lifting requires matching port positions");
                        }
                        start = 1;
                    }
                }
                for (std::size_t q = start; q < piece.size(); ++q) refs.push_back(piece[q]);
            };

            for (std::size_t vi = 0; vi < visits.size(); ++vi) {
                const Visit& visit = visits[vi];
                append(base_path_refs(visit.tile, visit.entry), vi > 0);
                bool last = vi + 1 == visits.size();
                if (last && visit.tile == old_central) {
                    // Already inside the central macrotile: step to the new
                    // central's correctly named side.
                    std::size_t cf = base.markup().central[old_central_form];
                    std::size_t new_central_form =
                        tau.rule(old_central_form)[cf].proto;
                    const SideName& z = mu.names[u][a];
                    int zk = -1;
                    for (std::size_t k = 0; k < mu.names[new_central_form].size(); ++k) {
                        if (mu.names[new_central_form][k] == z) zk = static_cast<int>(k);
                    }
                    if (zk < 0) {
                        throw InputError(sigma.key() + ": lifted central lacks a side named " +
                                         mu.names[u][a]);
                    }
                    SideRef target{block[old_central] + cf, static_cast<std::size_t>(zk)};
                    if (!(refs.back() == target)) refs.push_back(target);
                } else {
                    // Exit towards the next macrotile (or towards the central
                    // macrotile's entry superside).
                    std::vector<SideRef> exit_piece = base_path_refs(visit.tile, visit.exit);
                    std::reverse(exit_piece.begin(), exit_piece.end());
                    append(exit_piece, false);
                    if (last) append(base_path_refs(old_central, visit.exit), true);
                }
            }
            out.nets[u][a].sides = std::move(refs);
        }
    }
    return {std::move(next), std::move(out)};
}

}  // namespace

Markup lift_markup(const Substitution& s, const Markup& m, int n) {
    if (n < 1) throw InputError(s.key() + ": lift power must be positive");
    MarkupContext base(s, m);
    MarkupReport rep = check_requirements(s, m);
    for (const char* req : {"R1", "R2", "R3", "R4", "R5", "R6"}) {
        const RequirementReport* r = rep.find(req);
        if (r && !r->pass) {
            throw InputError(s.key() + ": lifting requires " + std::string(req) + ": " +
                             r->witness);
        }
    }
    R0Report r0 = check_R0(s, n);
    if (!r0.pass) throw InputError(s.key() + ": lifting requires side-to-side supertiles: " + r0.detail);
    if (n == 1) return m;
    Substitution sigma = s;
    Markup mu = m;
    for (int j = 2; j <= n; ++j) {
        auto [next_sub, next_mu] = lift_once(s, base, sigma, mu);
        sigma = std::move(next_sub);
        mu = std::move(next_mu);
    }
    // The lifted markup must itself be structurally valid over power(s, n).
    {
        Substitution p = s.power(n);
        MarkupContext verify(p, mu);
        (void)verify;
    }
    return mu;
}

std::pair<int, Markup> find_cyclic_power(const Substitution& s, const Markup& m) {
    MarkupContext ctx(s, m);
    std::vector<std::size_t> c = ctx.central_form_map();
    auto compose = [](const std::vector<std::size_t>& f, const std::vector<std::size_t>& g) {
        std::vector<std::size_t> h(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) h[i] = f[g[i]];
        return h;
    };
    std::vector<std::size_t> cm = c;
    for (int power = 1; power <= 64; ++power) {
        std::vector<std::size_t> c2m = cm;
        for (int k = 0; k < power; ++k) c2m = compose(c, c2m);
        if (c2m == cm) {
            return {power, lift_markup(s, m, power)};
        }
        cm = compose(c, cm);
    }
    throw InputError(s.key() + ": central map fails to stabilize (impossible for finite maps)");
}

}  // namespace tilesmith
