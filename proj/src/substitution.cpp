#include "tilesmith/substitution.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tilesmith {

Substitution::Substitution(std::string key, std::vector<std::string> proto_names,
                           std::vector<Polygon> protos, Rat theta, std::vector<Patch> rules)
    : key_(std::move(key)),
      names_(std::move(proto_names)),
      protos_(std::move(protos)),
      theta_(theta),
      rules_(std::move(rules)) {
    if (protos_.empty()) throw InputError(key_ + ": no prototiles");
    if (names_.size() != protos_.size() || rules_.size() != protos_.size()) {
        throw InputError(key_ + ": prototile, name and rule counts differ");
    }
    if (!(theta_ > Rat(1))) throw InputError(key_ + ": expansion factor must exceed 1");
    for (std::size_t i = 0; i < protos_.size(); ++i) {
        protos_[i] = Polygon::checked(protos_[i].vertices());
        for (std::size_t j = i + 1; j < protos_.size(); ++j) {
            if (names_[i] == names_[j]) throw InputError(key_ + ": duplicate prototile name");
        }
    }
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (rules_[i].empty()) throw InputError(key_ + ": empty rule");
        for (const PlacedTile& t : rules_[i]) {
            if (t.proto >= protos_.size()) throw InputError(key_ + ": rule uses unknown prototile");
        }
        std::string why;
        if (!tiles_cover_region(shapes_of(rules_[i]), protos_[i].scaled(theta_), &why)) {
            throw InputError(key_ + ": rule for " + names_[i] +
                             " does not tile the scaled prototile: " + why);
        }
    }
}

std::optional<std::size_t> Substitution::proto_index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Substitution::proto_of_shape(const Polygon& shape) const {
    for (std::size_t i = 0; i < protos_.size(); ++i) {
        if (protos_[i].congruent_by_translation(shape)) return i;
    }
    return std::nullopt;
}

Polygon Substitution::shape_of(const PlacedTile& t) const {
    return protos_.at(t.proto).translated(t.offset);
}

std::vector<Polygon> Substitution::shapes_of(const Patch& p) const {
    std::vector<Polygon> out;
    out.reserve(p.size());
    for (const PlacedTile& t : p) out.push_back(shape_of(t));
    return out;
}

Patch Substitution::decompose_tile(const PlacedTile& t) const {
    Patch out;
    const Patch& r = rules_.at(t.proto);
    out.reserve(r.size());
    Point base = t.offset * theta_;
    for (const PlacedTile& c : r) out.push_back({c.proto, base + c.offset});
    return out;
}

Patch Substitution::decompose_patch(const Patch& p) const {
    Patch out;
    for (const PlacedTile& t : p) {
        Patch kids = decompose_tile(t);
        out.insert(out.end(), kids.begin(), kids.end());
    }
    return out;
}

Patch Substitution::supertile_patch(std::size_t proto, int order) const {
    Patch cur{{proto, Point{}}};
    for (int k = 0; k < order; ++k) cur = decompose_patch(cur);
    return cur;
}

Rat Substitution::theta_power(int order) const {
    Rat r(1);
    for (int k = 0; k < order; ++k) r *= theta_;
    return r;
}

Polygon Substitution::supertile_region(std::size_t proto, int order) const {
    return protos_.at(proto).scaled(theta_power(order));
}

Substitution Substitution::power(int m) const {
    if (m < 1) throw InputError(key_ + ": power must be positive");
    if (m == 1) return *this;
    std::vector<Patch> rules;
    rules.reserve(protos_.size());
    for (std::size_t i = 0; i < protos_.size(); ++i) rules.push_back(supertile_patch(i, m));
    return Substitution(key_ + "^" + std::to_string(m), names_, protos_, theta_power(m),
                        std::move(rules));
}

R0Report check_R0(const Substitution& s, int max_order) {
    R0Report rep;
    rep.max_order_checked = max_order;
    for (int order = 1; order <= max_order; ++order) {
        for (std::size_t p = 0; p < s.proto_count(); ++p) {
            auto shapes = s.shapes_of(s.supertile_patch(p, order));
            std::string why;
            if (!tiles_cover_region(shapes, s.supertile_region(p, order), &why)) {
                rep.pass = false;
                rep.fail_order = order;
                rep.fail_proto = p;
                rep.detail = "supertile of " + s.proto_name(p) + " at order " +
                             std::to_string(order) + " is not an exact tiling: " + why;
                return rep;
            }
            if (!patch_is_side_to_side(shapes, &why)) {
                rep.pass = false;
                rep.fail_order = order;
                rep.fail_proto = p;
                rep.detail = "supertile of " + s.proto_name(p) + " at order " +
                             std::to_string(order) + " is not side-to-side: " + why;
                return rep;
            }
        }
    }
    return rep;
}

std::vector<Cover> find_covers(const Substitution& s, const Patch& f, int max_order) {
    std::vector<Cover> out;
    if (f.empty()) {
        for (int order = 0; order <= max_order; ++order) {
            for (std::size_t p = 0; p < s.proto_count(); ++p) out.push_back({p, order, Point{}});
        }
        return out;
    }
    const PlacedTile& anchor = f.front();
    for (int order = 0; order <= max_order; ++order) {
        for (std::size_t p = 0; p < s.proto_count(); ++p) {
            Patch dec = s.supertile_patch(p, order + 1);
            std::set<PlacedTile> have(dec.begin(), dec.end());
            std::set<Point> offsets_tried;
            for (const PlacedTile& u : dec) {
                if (u.proto != anchor.proto) continue;
                Point off = anchor.offset - u.offset;
                if (!offsets_tried.insert(off).second) continue;
                bool all = true;
                for (const PlacedTile& t : f) {
                    if (!have.count({t.proto, t.offset - off})) {
                        all = false;
                        break;
                    }
                }
                if (!all) continue;
                // Tightness: if every tile of f comes from a single first-level
                // child, the cover embeds into that child's supertile.
                bool refines = false;
                if (order >= 1) {
                    Rat scale = s.theta_power(order);
                    for (const PlacedTile& child : s.rule(p)) {
                        Patch sub = s.supertile_patch(child.proto, order);
                        std::set<PlacedTile> subset;
                        Point base = child.offset * scale;
                        for (const PlacedTile& t : sub) subset.insert({t.proto, base + t.offset});
                        bool contained = true;
                        for (const PlacedTile& t : f) {
                            if (!subset.count({t.proto, t.offset - off})) {
                                contained = false;
                                break;
                            }
                        }
                        if (contained) {
                            refines = true;
                            break;
                        }
                    }
                }
                if (!refines) out.push_back({p, order, off});
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Crown crown_at(const Substitution& s, const Patch& patch, const Point& v) {
    Crown c;
    for (const PlacedTile& t : patch) {
        Polygon shape = s.shape_of(t);
        BBox b = shape.bbox();
        if (v.x < b.xmin || b.xmax < v.x || v.y < b.ymin || b.ymax < v.y) continue;
        if (shape.locate(v) == PointLocation::Boundary) {
            c.tiles.push_back({t.proto, t.offset - v});
        }
    }
    std::sort(c.tiles.begin(), c.tiles.end());
    return c;
}

CrownSet enumerate_crowns(const Substitution& s, int max_order) {
    CrownSet result;
    result.max_order = max_order;
    std::set<Crown> seen;
    std::set<Crown> seen_before_last;
    for (int order = 1; order <= max_order; ++order) {
        if (order == max_order) seen_before_last = seen;
        for (std::size_t p = 0; p < s.proto_count(); ++p) {
            Patch patch = s.supertile_patch(p, order);
            Polygon region = s.supertile_region(p, order);
            std::set<Point> verts;
            for (const PlacedTile& t : patch) {
                for (const Point& q : s.proto(t.proto).vertices()) verts.insert(q + t.offset);
            }
            for (const Point& v : verts) {
                if (region.locate(v) != PointLocation::Inside) continue;
                Crown c = crown_at(s, patch, v);
                if (c.tiles.empty()) continue;
                if (!patch_is_side_to_side(s.shapes_of(c.tiles))) continue;
                seen.insert(c);
            }
        }
    }
    result.stabilized = max_order >= 2 && seen == seen_before_last;
    result.crowns.assign(seen.begin(), seen.end());
    return result;
}

}  // namespace tilesmith
