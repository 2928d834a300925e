#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tilesmith/substitution.hpp"

namespace tilesmith {

using SideName = std::string;

// A side of a rule-patch tile: tile index within the rule, side index within
// the tile's polygon.
struct SideRef {
    std::size_t tile = 0;
    std::size_t side = 0;

    bool operator==(const SideRef& o) const { return tile == o.tile && side == o.side; }
    bool operator!=(const SideRef& o) const { return !(*this == o); }
    bool operator<(const SideRef& o) const {
        if (tile != o.tile) return tile < o.tile;
        return side < o.side;
    }
    std::string str() const {
        return "tile " + std::to_string(tile) + " side " + std::to_string(side);
    }
};

struct NetPath {
    std::vector<SideRef> sides;
};

// Side names, central tiles and net paths for every macrotile of a
// substitution. Macroside a of macrotile i is the scaled side a of prototile
// i and carries the name of that side.
struct Markup {
    std::vector<std::vector<SideName>> names;  // [prototile][side]
    std::vector<std::size_t> central;          // [macrotile] -> rule tile index
    std::vector<std::vector<NetPath>> nets;    // [macrotile][macroside index]
};

enum class SideKind { Inner, Outer, Border };

// inner: both endpoints off the macrotile boundary; outer: the side lies on
// the boundary; border: everything else.
struct SideClass {
    std::vector<std::vector<SideKind>> kind;      // [tile][side]
    std::vector<std::vector<int>> macroside_of;   // [tile][side], -1 unless outer
};

SideClass classify_sides(const Substitution& s, std::size_t macrotile);

// Can a copy of `left_shape` and a copy of `right_shape` be placed so that the
// given sides coincide, the left copy lies left of the shared side (in its
// canonical direction), the right copy right of it, and the copies do not
// overlap?
bool admissible_pair(const Polygon& left_shape, std::size_t left_side, const Polygon& right_shape,
                     std::size_t right_side);

// Validated, cached view of a markup over a substitution. Construction throws
// InputError when the markup is structurally invalid (bad sizes, duplicate
// names within a prototile, a path that does not run from an outer side on its
// macroside to the correctly named central side through tile-sharing steps).
class MarkupContext {
public:
    MarkupContext(const Substitution& s, const Markup& m);

    const Substitution& sub() const { return *sub_; }
    const Markup& markup() const { return markup_; }

    struct MacroView {
        Patch patch;
        std::vector<Polygon> shapes;
        Polygon region;
        SideClass cls;
        std::map<Segment, std::vector<SideRef>> refs_by_segment;  // canonical segment key
        std::vector<std::vector<bool>> net;                       // [tile][side]
        std::vector<std::vector<int>> path_of;                    // [tile][side], -1 if not net
        std::vector<Segment> port_segments;                       // outer net sides (deduped)
    };

    const MacroView& view(std::size_t macrotile) const { return views_.at(macrotile); }
    std::size_t macro_count() const { return views_.size(); }

    Segment segment_of(std::size_t macrotile, const SideRef& r) const;
    // All rule tiles one of whose sides coincides with the given side.
    std::vector<std::size_t> tiles_on_segment(std::size_t macrotile, const Segment& seg) const;
    // Form of the central tile of macrotile i.
    std::size_t central_form(std::size_t i) const;
    // c(i) = central form of macrotile i, as a self-map of prototile forms.
    std::vector<std::size_t> central_form_map() const;

private:
    const Substitution* sub_;
    Markup markup_;
    std::vector<MacroView> views_;
};

struct RequirementReport {
    std::string requirement;
    bool pass = true;
    std::string witness;
};

struct MarkupReport {
    bool all_pass = true;
    std::vector<RequirementReport> items;

    const RequirementReport* find(const std::string& requirement) const;
    std::string str() const;
};

// R1..R8 of the markup requirement list.
MarkupReport check_requirements(const Substitution& s, const Markup& m);

// Weaker replacement for the two-thirds rule: three escape clauses per ordered
// pair of distinct non-central types.
RequirementReport check_R8prime(const Substitution& s, const Markup& m);

// The central-form map must be idempotent.
RequirementReport check_cyclicity(const Substitution& s, const Markup& m);

// No rule tile may have parallel outer sides with the tile on the left of one
// and on the right of the other. Markup-independent.
RequirementReport check_outer_sides(const Substitution& s);

// Markup for power(s, n) built by stitching the base markup's net paths
// through the decomposed macrotiles; names are preserved and the new central
// is the central of the macrotile replacing the old central. Throws InputError
// when preconditions fail (base markup must pass R1-R6; supertiles up to n
// must be side-to-side; ports on shared supersides must coincide).
Markup lift_markup(const Substitution& s, const Markup& m, int n);

// Smallest m >= 1 with c^(2m) = c^m for the central-form map c, plus the
// lifted markup of power(s, m) (which then satisfies the idempotency check).
std::pair<int, Markup> find_cyclic_power(const Substitution& s, const Markup& m);

struct FindMarkupResult {
    std::optional<Markup> markup;
    bool proven_unsat = false;  // the complete central-candidate stage was empty
    long nodes = 0;
    std::string note;
};

// Staged backtracking search for a markup passing R1-R8 plus the idempotency
// check: choose central tiles (all sides inner, enough sides), derive naming
// by equivalence closure, fix one port position per macroside congruence
// class (making port matching structural), route side-disjoint net paths.
FindMarkupResult find_markup(const Substitution& s, long budget = 200000);

}  // namespace tilesmith
