#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tilesmith/geometry.hpp"

namespace tilesmith {

// A translate of a prototile. Shapes live in the owning Substitution;
// rotations are never applied at runtime (rotated variants are distinct
// prototiles).
struct PlacedTile {
    std::size_t proto = 0;
    Point offset;

    bool operator==(const PlacedTile& o) const { return proto == o.proto && offset == o.offset; }
    bool operator!=(const PlacedTile& o) const { return !(*this == o); }
    bool operator<(const PlacedTile& o) const {
        if (proto != o.proto) return proto < o.proto;
        return offset < o.offset;
    }
};

using Patch = std::vector<PlacedTile>;

// An inflate-and-subdivide rule: prototile i, scaled by theta, is tiled by
// rule(i). Construction validates exact coverage of every rule.
class Substitution {
public:
    Substitution(std::string key, std::vector<std::string> proto_names, std::vector<Polygon> protos,
                 Rat theta, std::vector<Patch> rules);

    const std::string& key() const { return key_; }
    std::size_t proto_count() const { return protos_.size(); }
    const std::string& proto_name(std::size_t i) const { return names_.at(i); }
    const Polygon& proto(std::size_t i) const { return protos_.at(i); }
    const Rat& theta() const { return theta_; }
    const Patch& rule(std::size_t i) const { return rules_.at(i); }

    std::optional<std::size_t> proto_index(const std::string& name) const;
    // Prototile whose shape is a translate of `shape`, if any.
    std::optional<std::size_t> proto_of_shape(const Polygon& shape) const;

    Polygon shape_of(const PlacedTile& t) const;
    std::vector<Polygon> shapes_of(const Patch& p) const;

    // One decomposition step: the rule for t.proto, placed at theta * t.offset.
    Patch decompose_tile(const PlacedTile& t) const;
    Patch decompose_patch(const Patch& p) const;

    // n-fold decomposition of prototile `proto`; order 0 is the tile itself.
    Patch supertile_patch(std::size_t proto, int order) const;
    Polygon supertile_region(std::size_t proto, int order) const;
    Rat theta_power(int order) const;

    // Same prototiles, theta^m, m-fold rules.
    Substitution power(int m) const;

private:
    std::string key_;
    std::vector<std::string> names_;
    std::vector<Polygon> protos_;
    Rat theta_;
    std::vector<Patch> rules_;
};

struct R0Report {
    bool pass = true;
    int max_order_checked = 0;
    // Filled in on failure.
    int fail_order = -1;
    std::size_t fail_proto = 0;
    std::string detail;
};

// Bounded check that every supertile up to max_order is an exact, side-to-side
// tiling of its region.
R0Report check_R0(const Substitution& s, int max_order);

struct Cover {
    std::size_t proto = 0;
    int order = 0;
    Point offset;

    bool operator==(const Cover& o) const {
        return proto == o.proto && order == o.order && offset == o.offset;
    }
    bool operator<(const Cover& o) const {
        if (proto != o.proto) return proto < o.proto;
        if (order != o.order) return order < o.order;
        return offset < o.offset;
    }
};

// Supertiles S (order <= max_order, translated by offset) whose one-step
// decomposition contains every tile of `f`. Covers that embed into a child
// supertile are dropped, so each cover is reported at its tightest order.
// An empty patch is covered by every supertile; those are listed at offset 0.
std::vector<Cover> find_covers(const Substitution& s, const Patch& f, int max_order);

// Tiles of some tiling that share a boundary point, translated so that the
// shared vertex is the origin; tiles sorted for canonical comparison.
struct Crown {
    Patch tiles;

    bool operator==(const Crown& o) const { return tiles == o.tiles; }
    bool operator<(const Crown& o) const { return tiles < o.tiles; }
};

struct CrownSet {
    std::vector<Crown> crowns;  // sorted; index in this list is the crown number
    bool stabilized = false;    // orders max-1 and max produced the same set
    int max_order = 0;
};

// Harvest side-to-side crowns at interior vertices of all supertiles of order
// <= max_order.
CrownSet enumerate_crowns(const Substitution& s, int max_order);

// Crown of `patch` at vertex v (tiles whose boundary contains v), in canonical
// translated form.
Crown crown_at(const Substitution& s, const Patch& patch, const Point& v);

}  // namespace tilesmith
