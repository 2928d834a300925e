#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <tuple>

#include "tilesmith/markup.hpp"

namespace tilesmith {

namespace {

struct BudgetOut {};

// Thrown when one routing configuration exceeds its node allowance; the caller
// abandons that configuration and moves on instead of draining the whole
// budget on a single hopeless port/central combination.
struct RouteCapOut {};

struct MacroData {
    Patch patch;
    std::vector<Polygon> shapes;
    Polygon region;
    SideClass cls;
    std::map<Segment, std::vector<SideRef>> refs;
    // Per macroside: outer child sides as (relative interval, segment), sorted
    // by distance from the macroside's canonical start.
    std::vector<std::vector<std::pair<std::pair<Rat, Rat>, Segment>>> outer;
    std::vector<std::size_t> central_cands;
};

MacroData build_macro_data(const Substitution& s, std::size_t i) {
    MacroData md;
    md.patch = s.rule(i);
    md.shapes = s.shapes_of(md.patch);
    md.region = s.supertile_region(i, 1);
    md.cls = classify_sides(s, i);
    for (std::size_t t = 0; t < md.shapes.size(); ++t) {
        for (std::size_t k = 0; k < md.shapes[t].size(); ++k) {
            md.refs[md.shapes[t].side(k).canonical()].push_back({t, k});
        }
    }
    auto region_sides = md.region.sides();
    md.outer.resize(region_sides.size());
    for (std::size_t t = 0; t < md.shapes.size(); ++t) {
        for (std::size_t k = 0; k < md.shapes[t].size(); ++k) {
            if (md.cls.kind[t][k] != SideKind::Outer) continue;
            std::size_t a = static_cast<std::size_t>(md.cls.macroside_of[t][k]);
            Segment ms = region_sides[a].canonical();
            LineKey line = line_of(ms);
            Rat p0 = param_on_line(line, ms.a);
            Segment cs = md.shapes[t].side(k).canonical();
            Rat lo = param_on_line(line, cs.a) - p0;
            Rat hi = param_on_line(line, cs.b) - p0;
            md.outer[a].push_back({{lo, hi}, cs});
        }
    }
    for (auto& v : md.outer) {
        std::sort(v.begin(), v.end());
    }
    for (std::size_t t = 0; t < md.shapes.size(); ++t) {
        bool all_inner = true;
        for (std::size_t k = 0; k < md.shapes[t].size(); ++k) {
            if (md.cls.kind[t][k] != SideKind::Inner) all_inner = false;
        }
        if (all_inner && md.shapes[t].size() >= s.proto(i).size()) {
            md.central_cands.push_back(t);
        }
    }
    // Own-form candidates first (their end-side naming is forced to the
    // identity, collapsing the naming stage), then more sides, then index.
    std::stable_sort(md.central_cands.begin(), md.central_cands.end(),
                     [&](std::size_t x, std::size_t y) {
                         bool ox = md.patch[x].proto == i, oy = md.patch[y].proto == i;
                         if (ox != oy) return ox;
                         return md.shapes[x].size() > md.shapes[y].size();
                     });
    return md;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t x, std::size_t y) { parent[find(x)] = find(y); }
};

// Backtracking router: one side-disjoint path per macroside, from the chosen
// port to the required central side, inner sides in between.
struct Router {
    const MacroData& md;
    std::size_t central;
    const std::vector<Segment>& ports;             // per macroside
    const std::vector<std::size_t>& targets;       // per macroside: central side index
    long* budget;
    std::vector<Segment> central_sides;
    std::set<Segment> used;
    std::vector<int> netcnt;
    std::vector<std::vector<Segment>> paths;
    std::size_t max_len;

    // Per macroside: lower bound on the remaining path length from each
    // segment to the goal, through inner non-central sides only. Used both to
    // prune hopeless extensions and to start the length iteration tight.
    std::vector<std::map<Segment, std::size_t>> dist;

    long cap = 0;        // per-configuration node allowance (0 = unlimited)
    long local_nodes = 0;

    Router(const MacroData& md_, std::size_t central_, const std::vector<Segment>& ports_,
           const std::vector<std::size_t>& targets_, long* budget_, long cap_)
        : md(md_), central(central_), ports(ports_), targets(targets_), budget(budget_), cap(cap_) {
        for (std::size_t k = 0; k < md.shapes[central].size(); ++k) {
            central_sides.push_back(md.shapes[central].side(k).canonical());
        }
        netcnt.assign(md.shapes.size(), 0);
        paths.resize(ports.size());
        max_len = md.refs.size();
        dist.resize(ports.size());
        for (std::size_t a = 0; a < ports.size(); ++a) {
            const Segment goal = central_sides[targets[a]];
            auto& d = dist[a];
            d[goal] = 0;
            std::vector<Segment> frontier{goal};
            while (!frontier.empty()) {
                std::vector<Segment> next_frontier;
                for (const Segment& y : frontier) {
                    std::size_t dy = d.at(y);
                    for (const SideRef& r : md.refs.at(y)) {
                        for (std::size_t k = 0; k < md.shapes[r.tile].size(); ++k) {
                            Segment x = md.shapes[r.tile].side(k).canonical();
                            if (d.count(x)) continue;
                            d[x] = dy + 1;
                            bool traversable = md.cls.kind[r.tile][k] == SideKind::Inner &&
                                               !is_central_side(x);
                            if (traversable) next_frontier.push_back(x);
                        }
                    }
                }
                frontier = std::move(next_frontier);
            }
        }
    }

    std::size_t lower_bound_from(std::size_t a, const Segment& s) const {
        auto it = dist[a].find(s);
        return it == dist[a].end() ? max_len + 1 : it->second;
    }

    void tick() {
        if (--(*budget) < 0) throw BudgetOut{};
        if (cap > 0 && ++local_nodes > cap) throw RouteCapOut{};
    }

    bool is_central_side(const Segment& s) const {
        return std::find(central_sides.begin(), central_sides.end(), s) != central_sides.end();
    }

    // Mark a segment as part of the net; enforce the two-thirds bound on every
    // non-central tile it borders. Rolls back and reports failure if violated.
    bool mark(const Segment& s, std::vector<std::size_t>& bumped) {
        used.insert(s);
        for (const SideRef& r : md.refs.at(s)) {
            if (r.tile == central) continue;
            ++netcnt[r.tile];
            bumped.push_back(r.tile);
            if (3 * netcnt[r.tile] >= 2 * static_cast<int>(md.shapes[r.tile].size())) {
                return false;
            }
        }
        return true;
    }
    void unmark(const Segment& s, const std::vector<std::size_t>& bumped) {
        used.erase(s);
        for (std::size_t t : bumped) --netcnt[t];
    }

    // Deepen on the total path length over all ports: nets routable at all are
    // routable with little extra length over the per-port lower bounds, so the
    // cheap shallow levels are decided first and a stuck later port forces
    // earlier ports to be reconsidered instead of opening an unbounded search.
    bool solve() {
        for (std::size_t extra = 0; extra <= max_len; ++extra) {
            if (route_all(0, extra)) return true;
        }
        return false;
    }

    // Slack is a shared allowance for total path length beyond the sum of the
    // per-port lower bounds; drawing it down as ports stretch keeps one long
    // detour from opening an unbounded search for every later port.
    bool route_all(std::size_t a, std::size_t slack) {
        if (a == ports.size()) return true;
        std::size_t lb = lower_bound_from(a, ports[a]);
        if (lb + 1 > max_len) return false;
        std::vector<std::size_t> bumped;
        bool ok = mark(ports[a], bumped);
        if (ok) {
            std::vector<Segment> cur{ports[a]};
            std::size_t top = std::min(max_len, lb + 1 + slack);
            for (std::size_t len = lb + 1; len <= top; ++len) {
                if (extend(a, cur, len - 1, slack - (len - lb - 1))) return true;
            }
        }
        unmark(ports[a], bumped);
        return false;
    }

    bool extend(std::size_t a, std::vector<Segment>& cur, std::size_t remaining,
                std::size_t slack) {
        tick();
        const Segment goal = central_sides[targets[a]];
        const Segment s = cur.back();
        // Candidate continuations, nearest to the goal first.
        std::vector<std::pair<std::size_t, Segment>> cands;
        for (const SideRef& r : md.refs.at(s)) {
            for (std::size_t k = 0; k < md.shapes[r.tile].size(); ++k) {
                Segment nxt = md.shapes[r.tile].side(k).canonical();
                if (nxt == s || used.count(nxt)) continue;
                if (md.cls.kind[r.tile][k] != SideKind::Inner) continue;
                if (remaining == 1) {
                    if (!(nxt == goal)) continue;
                } else {
                    if (is_central_side(nxt)) continue;
                    if (lower_bound_from(a, nxt) > remaining - 1) continue;
                }
                cands.push_back({lower_bound_from(a, nxt), nxt});
            }
        }
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        for (const auto& [d, nxt] : cands) {
            (void)d;
            std::vector<std::size_t> bumped;
            bool ok = mark(nxt, bumped);
            if (ok) {
                cur.push_back(nxt);
                if (remaining == 1) {
                    paths[a] = cur;
                    if (route_all(a + 1, slack)) return true;
                } else {
                    if (extend(a, cur, remaining - 1, slack)) return true;
                }
                cur.pop_back();
            }
            unmark(nxt, bumped);
        }
        return false;
    }
};

// ---------------------------------------------------------------------------
// Child-side graph of one macrotile, on canonical segments. Two segments are
// adjacent when some tile has both on its boundary, which is exactly the
// condition for them to be consecutive in a net path.
struct SideGraph {
    std::vector<Segment> segs;
    std::map<Segment, std::size_t> id;
    std::vector<bool> inner;
    std::vector<std::vector<std::size_t>> seg_tiles;  // tiles sharing each segment
    std::vector<std::vector<std::size_t>> nbr;
};

SideGraph build_side_graph(const MacroData& md) {
    SideGraph g;
    for (const auto& [seg, refs] : md.refs) {
        g.id.emplace(seg, g.segs.size());
        g.segs.push_back(seg);
        std::vector<std::size_t> ts;
        for (const SideRef& r : refs) ts.push_back(r.tile);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        g.seg_tiles.push_back(ts);
        const SideRef& r0 = refs.front();
        g.inner.push_back(md.cls.kind[r0.tile][r0.side] == SideKind::Inner);
    }
    std::vector<std::vector<std::size_t>> tile_sides(md.shapes.size());
    for (std::size_t x = 0; x < g.segs.size(); ++x) {
        for (std::size_t t : g.seg_tiles[x]) tile_sides[t].push_back(x);
    }
    g.nbr.resize(g.segs.size());
    for (std::size_t x = 0; x < g.segs.size(); ++x) {
        for (std::size_t t : g.seg_tiles[x]) {
            for (std::size_t y : tile_sides[t]) {
                if (y != x) g.nbr[x].push_back(y);
            }
        }
        auto& v = g.nbr[x];
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return g;
}

using Mask = std::uint64_t;

// Maximum bipartite matching (Kuhn) between rows and up to 64 columns.
std::size_t max_matching(const std::vector<Mask>& rows, std::size_t n_cols) {
    std::vector<int> col_owner(n_cols, -1);
    std::size_t matched = 0;
    std::vector<char> seen;
    auto augment = [&](auto&& self, std::size_t a) -> bool {
        for (std::size_t v = 0; v < n_cols; ++v) {
            if (!((rows[a] >> v) & 1) || seen[v]) continue;
            seen[v] = 1;
            if (col_owner[v] < 0 || self(self, static_cast<std::size_t>(col_owner[v]))) {
                col_owner[v] = static_cast<int>(a);
                return true;
            }
        }
        return false;
    };
    for (std::size_t a = 0; a < rows.size(); ++a) {
        seen.assign(n_cols, 0);
        if (augment(augment, a)) ++matched;
    }
    return matched;
}

// Per-port reachability data for one rule, one candidate central tile and one
// selection of outer sides allowed to carry the net.
//
// Every net path starts at an outer net side of its macroside and ends at the
// side of the central tile carrying the path's name; consecutive sides share a
// tile. Intermediate sides can only be inner non-border sides or other
// selected outer sides, and when the central tile has exactly as many sides as
// the region, each of its sides is the endpoint of some path and hence
// unusable in the middle of another (paths may not share segments).
struct CandReach {
    // rows[a][s]: central-side indices reachable from the s-th selected slot
    // of macroside a.
    std::vector<std::vector<Mask>> rows;
    // cost[t][a][s]: minimum number of sides of tile t that a path from that
    // slot to any central side must carry (a certified lower bound).
    std::vector<std::vector<std::vector<int>>> cost;
    std::size_t n_central = 0;
};

constexpr int kUnreach = 1 << 20;

CandReach compute_reach(const MacroData& md, const SideGraph& sg, std::size_t cand,
                        const std::vector<std::vector<std::size_t>>& slot_ids) {
    CandReach cr;
    const std::size_t n_ms = md.outer.size();
    const std::size_t n_c = md.shapes[cand].size();
    cr.n_central = n_c;
    std::vector<std::size_t> central_ids(n_c);
    std::vector<char> is_central(sg.segs.size(), 0);
    for (std::size_t k = 0; k < n_c; ++k) {
        central_ids[k] = sg.id.at(md.shapes[cand].side(k).canonical());
        is_central[central_ids[k]] = 1;
    }
    const bool ban_central = (n_c == n_ms);
    std::vector<char> sel(sg.segs.size(), 0);
    for (const auto& ids : slot_ids) {
        for (std::size_t x : ids) sel[x] = 1;
    }
    std::vector<char> trav(sg.segs.size(), 0);
    for (std::size_t x = 0; x < sg.segs.size(); ++x) {
        if (is_central[x]) {
            trav[x] = !ban_central;
        } else if (sg.inner[x]) {
            trav[x] = 1;
        } else {
            trav[x] = sel[x];
        }
    }
    cr.rows.resize(n_ms);
    cr.cost.assign(md.shapes.size(),
                   std::vector<std::vector<int>>(n_ms));
    std::vector<int> dist(sg.segs.size());
    for (std::size_t a = 0; a < n_ms; ++a) {
        cr.rows[a].resize(slot_ids[a].size());
        for (std::size_t t = 0; t < md.shapes.size(); ++t) {
            // The candidate central tile is exempt from the net-side bound, so
            // its row never contributes to an overload.
            cr.cost[t][a].assign(slot_ids[a].size(), t == cand ? 0 : kUnreach);
        }
        for (std::size_t s = 0; s < slot_ids[a].size(); ++s) {
            const std::size_t start = slot_ids[a][s];
            // Plain reachability for the Hall test.
            {
                std::vector<char> vis(sg.segs.size(), 0);
                std::deque<std::size_t> q{start};
                vis[start] = 1;
                while (!q.empty()) {
                    std::size_t x = q.front();
                    q.pop_front();
                    if (!trav[x] && x != start) continue;
                    for (std::size_t y : sg.nbr[x]) {
                        if (!vis[y] && (trav[y] || is_central[y])) {
                            vis[y] = 1;
                            q.push_back(y);
                        }
                    }
                }
                Mask row = 0;
                for (std::size_t k = 0; k < n_c && k < 64; ++k) {
                    if (vis[central_ids[k]]) row |= Mask(1) << k;
                }
                cr.rows[a][s] = row;
            }
            // Weighted minima: fewest sides of each tile on any usable path.
            for (std::size_t t = 0; t < md.shapes.size(); ++t) {
                if (t == cand) continue;
                auto weight = [&](std::size_t x) {
                    const auto& ts = sg.seg_tiles[x];
                    return std::binary_search(ts.begin(), ts.end(), t) ? 1 : 0;
                };
                std::fill(dist.begin(), dist.end(), kUnreach);
                std::deque<std::size_t> dq;
                dist[start] = weight(start);
                dq.push_back(start);
                while (!dq.empty()) {
                    std::size_t x = dq.front();
                    dq.pop_front();
                    if (!trav[x] && x != start) continue;
                    for (std::size_t y : sg.nbr[x]) {
                        if (!trav[y] && !is_central[y]) continue;
                        int nd = dist[x] + weight(y);
                        if (nd < dist[y]) {
                            dist[y] = nd;
                            if (nd == dist[x]) {
                                dq.push_front(y);
                            } else {
                                dq.push_back(y);
                            }
                        }
                    }
                }
                int best = kUnreach;
                for (std::size_t k = 0; k < n_c; ++k) {
                    best = std::min(best, dist[central_ids[k]]);
                }
                cr.cost[t][a][s] = best;
            }
        }
    }
    return cr;
}

// Largest net-side count a tile with n sides may carry.
int net_cap(std::size_t n) { return (2 * static_cast<int>(n) - 1) / 3; }

// Can the candidate central tile be ruled out for every choice of main port
// among the selected slots? Sound refutations only: either the macrosides
// cannot all reach distinct central sides (paths end at distinct sides because
// macroside names never repeat), or the side-disjoint paths would together
// force more net sides onto some tile than its bound allows.
bool cand_refuted(const MacroData& md, const CandReach& cr,
                  const std::vector<std::vector<std::size_t>>& slot_ids) {
    const std::size_t n_ms = md.outer.size();
    if (cr.n_central > 64) return false;
    // Union rows: if even the union of all slots cannot be matched, no choice
    // of mains can.
    std::vector<Mask> rows_u(n_ms, 0);
    for (std::size_t a = 0; a < n_ms; ++a) {
        for (Mask r : cr.rows[a]) rows_u[a] |= r;
    }
    if (max_matching(rows_u, cr.n_central) < n_ms) return true;
    // Per-tile minima over slots: if even the cheapest choices overload a
    // tile, every choice does.
    for (std::size_t t = 0; t < md.shapes.size(); ++t) {
        long total = 0;
        for (std::size_t a = 0; a < n_ms; ++a) {
            int best = kUnreach;
            for (int c : cr.cost[t][a]) best = std::min(best, c);
            total += best;
        }
        if (total > net_cap(md.shapes[t].size())) return true;
    }
    // Otherwise decide main choices one by one (bounded).
    long combos = 1;
    for (std::size_t a = 0; a < n_ms; ++a) {
        combos *= static_cast<long>(slot_ids[a].size());
        if (combos > 4096) return false;
    }
    std::vector<std::size_t> pickv(n_ms, 0);
    for (;;) {
        std::vector<Mask> rows(n_ms);
        for (std::size_t a = 0; a < n_ms; ++a) rows[a] = cr.rows[a][pickv[a]];
        bool alive = max_matching(rows, cr.n_central) == n_ms;
        if (alive) {
            for (std::size_t t = 0; t < md.shapes.size() && alive; ++t) {
                long total = 0;
                for (std::size_t a = 0; a < n_ms; ++a) {
                    total += cr.cost[t][a][pickv[a]];
                }
                if (total > net_cap(md.shapes[t].size())) alive = false;
            }
        }
        if (alive) return false;
        std::size_t a = 0;
        for (; a < n_ms; ++a) {
            if (++pickv[a] < slot_ids[a].size()) break;
            pickv[a] = 0;
        }
        if (a == n_ms) break;
    }
    return true;
}

// Injective end-side assignments e with e(a) drawn from allowed[a].
std::vector<std::vector<std::size_t>> filtered_injections(const std::vector<Mask>& allowed,
                                                          std::size_t n_cols,
                                                          std::size_t cap_count) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> pick;
    std::vector<bool> taken(n_cols, false);
    auto rec = [&](auto&& self) -> void {
        if (out.size() >= cap_count) return;
        std::size_t a = pick.size();
        if (a == allowed.size()) {
            out.push_back(pick);
            return;
        }
        for (std::size_t v = 0; v < n_cols; ++v) {
            if (taken[v] || !((allowed[a] >> v) & 1)) continue;
            taken[v] = true;
            pick.push_back(v);
            self(self);
            pick.pop_back();
            taken[v] = false;
        }
    };
    rec(rec);
    return out;
}

}  // namespace

FindMarkupResult find_markup(const Substitution& s, long budget) {
    FindMarkupResult res;
    long remaining = budget;
    const std::size_t n = s.proto_count();

    std::vector<MacroData> macro;
    macro.reserve(n);
    for (std::size_t i = 0; i < n; ++i) macro.push_back(build_macro_data(s, i));

    for (std::size_t i = 0; i < n; ++i) {
        if (macro[i].central_cands.empty()) {
            res.proven_unsat = true;
            res.note = "rule " + s.proto_name(i) +
                       " has no tile whose sides are all inner with enough sides to host every "
                       "macroside name; no markup exists";
            res.nodes = budget - remaining;
            return res;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < macro[i].outer.size(); ++a) {
            if (macro[i].outer[a].size() < 2) {
                res.proven_unsat = true;
                res.note = "macroside " + std::to_string(a) + " of " + s.proto_name(i) +
                           " has fewer than two outer child sides, but a markup needs both a "
                           "port and an untouched outer side there; no markup exists";
                res.nodes = budget - remaining;
                return res;
            }
        }
    }

    auto tick = [&]() {
        if (--remaining < 0) throw BudgetOut{};
    };
    // Allowance per routing attempt: enough to settle realistic nets, small
    // enough that a hopeless attempt cannot drain the budget.
    const long route_cap = std::max<long>(50000, budget / 256);

    // Node ids for (form, side) pairs, for the naming equivalence classes.
    std::vector<std::size_t> form_offset(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) form_offset[i + 1] = form_offset[i] + s.proto(i).size();
    const std::size_t total_sides = form_offset[n];

    // Routing is independent per rule once the central tile, the end-side
    // assignment and the port slots are fixed, so each attempt is cached.
    std::map<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>,
                        std::vector<std::size_t>>,
             std::optional<std::vector<std::vector<Segment>>>>
        route_memo;

    try {
        // -------------------------------------------------------------------
        // Macroside port classes. Whenever two supertiles can meet in a legal
        // patch with a pair of their sides coinciding exactly, the outer net
        // sides on those two macrosides must appear at identical offsets (a
        // net side on the contact has to coincide with a net side of the
        // neighbour). The meeting placements enumerated here are exactly the
        // ones the port-matching requirement inspects, so the induced classes
        // constrain every markup.
        std::vector<std::size_t> ms_off(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ms_off[i + 1] = ms_off[i] + macro[i].outer.size();
        }
        UnionFind guf(ms_off[n]);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                auto gi = macro[i].region.sides();
                auto gj = macro[j].region.sides();
                std::set<Point> offsets;
                for (const Segment& g : gi) {
                    for (const Segment& h : gj) {
                        tick();
                        Segment cg = g.canonical(), ch = h.canonical();
                        Point off = cg.a - ch.a;
                        if (!(ch.b + off == cg.b)) continue;
                        offsets.insert(off);
                    }
                }
                for (const Point& off : offsets) {
                    tick();
                    Polygon moved = macro[j].region.translated(off);
                    if (intersection_area(macro[i].region, moved) > Rat(0)) continue;
                    std::vector<Polygon> both = macro[i].shapes;
                    for (const Polygon& p : macro[j].shapes) both.push_back(p.translated(off));
                    if (!patch_is_side_to_side(both)) continue;
                    for (std::size_t a = 0; a < gi.size(); ++a) {
                        Segment ca = gi[a].canonical();
                        for (std::size_t b = 0; b < gj.size(); ++b) {
                            Segment cb = gj[b].canonical().translated(off).canonical();
                            if (ca == cb) guf.unite(ms_off[i] + a, ms_off[j] + b);
                        }
                    }
                }
            }
        }
        std::map<std::size_t, std::size_t> root_to_class;
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> class_members;
        std::vector<std::size_t> class_of(ms_off[n]);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t a = 0; a < macro[i].outer.size(); ++a) {
                std::size_t root = guf.find(ms_off[i] + a);
                auto [it, fresh] = root_to_class.emplace(root, class_members.size());
                if (fresh) class_members.push_back({});
                class_of[ms_off[i] + a] = it->second;
                class_members[it->second].push_back({i, a});
            }
        }
        // Shared port positions per class and the most ports a class can hold
        // while every member macroside keeps one outer side out of the net.
        std::vector<std::vector<std::pair<Rat, Rat>>> class_slots;
        std::vector<std::size_t> class_max(class_members.size());
        for (std::size_t cl = 0; cl < class_members.size(); ++cl) {
            std::set<std::pair<Rat, Rat>> common;
            std::size_t min_outer = SIZE_MAX;
            for (std::size_t m = 0; m < class_members[cl].size(); ++m) {
                auto [i, a] = class_members[cl][m];
                min_outer = std::min(min_outer, macro[i].outer[a].size());
                std::set<std::pair<Rat, Rat>> here;
                for (const auto& [iv, seg] : macro[i].outer[a]) here.insert(iv);
                if (m == 0) {
                    common = here;
                } else {
                    std::set<std::pair<Rat, Rat>> inter;
                    for (const auto& iv : common) {
                        if (here.count(iv)) inter.insert(iv);
                    }
                    common = inter;
                }
            }
            if (common.empty()) {
                res.proven_unsat = true;
                res.note = "no markup exists: supertile sides that can meet in an assembled "
                           "patch share no common outer-side position to host matching ports";
                res.nodes = budget - remaining;
                return res;
            }
            class_slots.push_back({common.begin(), common.end()});
            class_max[cl] = min_outer - 1;
        }

        std::vector<SideGraph> graphs;
        graphs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) graphs.push_back(build_side_graph(macro[i]));

        // Materialize one port-set choice: per rule and macroside, the segment
        // ids of the selected slots.
        auto materialize = [&](const std::vector<std::vector<std::pair<Rat, Rat>>>& sel)
            -> std::vector<std::vector<std::vector<std::size_t>>> {
            std::vector<std::vector<std::vector<std::size_t>>> ids(n);
            for (std::size_t i = 0; i < n; ++i) {
                ids[i].resize(macro[i].outer.size());
                for (std::size_t a = 0; a < macro[i].outer.size(); ++a) {
                    for (const auto& iv : sel[class_of[ms_off[i] + a]]) {
                        for (const auto& [cand, seg] : macro[i].outer[a]) {
                            if (cand == iv) ids[i][a].push_back(graphs[i].id.at(seg));
                        }
                    }
                }
            }
            return ids;
        };

        // Screen one port-set choice. Refuted means no markup can use it; a
        // surviving choice reports, per rule, the central candidates that
        // could not be ruled out (with their reach rows for later filtering).
        struct ScreenResult {
            bool refuted = false;
            std::vector<std::vector<std::size_t>> survivors;
            std::vector<std::map<std::size_t, CandReach>> reach;
        };
        auto screen = [&](const std::vector<std::vector<std::pair<Rat, Rat>>>& sel)
            -> ScreenResult {
            ScreenResult out;
            tick();
            auto ids = materialize(sel);
            // Every member macroside must keep an outer side free of the net.
            for (std::size_t i = 0; i < n && !out.refuted; ++i) {
                for (std::size_t a = 0; a < macro[i].outer.size(); ++a) {
                    if (ids[i][a].size() >= macro[i].outer[a].size()) {
                        out.refuted = true;
                        break;
                    }
                }
            }
            // No two selected outer sides of one macrotile may share a vertex.
            for (std::size_t i = 0; i < n && !out.refuted; ++i) {
                std::vector<Segment> ports;
                for (const auto& v : ids[i]) {
                    for (std::size_t x : v) ports.push_back(graphs[i].segs[x]);
                }
                for (std::size_t x = 0; x < ports.size() && !out.refuted; ++x) {
                    for (std::size_t y = x + 1; y < ports.size() && !out.refuted; ++y) {
                        for (const Point& p : {ports[x].a, ports[x].b}) {
                            if (p == ports[y].a || p == ports[y].b) out.refuted = true;
                        }
                    }
                }
            }
            if (out.refuted) return out;
            out.survivors.resize(n);
            out.reach.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t t : macro[i].central_cands) {
                    tick();
                    CandReach cr = compute_reach(macro[i], graphs[i], t, ids[i]);
                    if (!cand_refuted(macro[i], cr, ids[i])) {
                        out.survivors[i].push_back(t);
                        out.reach[i].emplace(t, std::move(cr));
                    }
                }
                if (out.survivors[i].empty()) {
                    out.refuted = true;
                    return out;
                }
            }
            return out;
        };

        bool all_refuted = true;

        // Positive attempt on a single-port choice that survived screening.
        auto attempt = [&](const ScreenResult& sr, const std::vector<std::size_t>& spick,
                           const std::vector<std::vector<Segment>>& ports)
            -> std::optional<Markup> {
            // Central forms available per rule, own form first.
            std::vector<std::vector<std::size_t>> form_opts(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t t : sr.survivors[i]) {
                    std::size_t f = macro[i].patch[t].proto;
                    if (std::find(form_opts[i].begin(), form_opts[i].end(), f) ==
                        form_opts[i].end()) {
                        form_opts[i].push_back(f);
                    }
                }
            }
            std::vector<std::size_t> pick(n, 0);
            for (;;) {
                tick();
                std::vector<std::size_t> c(n);
                for (std::size_t i = 0; i < n; ++i) c[i] = form_opts[i][pick[i]];
                bool idem = true;
                for (std::size_t i = 0; i < n; ++i) {
                    if (c[c[i]] != c[i]) idem = false;
                }
                if (idem) {
                    // End-side assignments: own-form centrals force the
                    // identity; cross-form ones range over injective maps into
                    // reachable central sides.
                    std::vector<std::vector<std::vector<std::size_t>>> options(n);
                    bool feasible = true;
                    for (std::size_t i = 0; i < n && feasible; ++i) {
                        if (c[i] == i) {
                            std::vector<std::size_t> id(s.proto(i).size());
                            std::iota(id.begin(), id.end(), 0);
                            options[i] = {id};
                        } else {
                            std::vector<Mask> allowed(macro[i].outer.size(), 0);
                            for (std::size_t t : sr.survivors[i]) {
                                if (macro[i].patch[t].proto != c[i]) continue;
                                const CandReach& cr = sr.reach[i].at(t);
                                for (std::size_t a = 0; a < allowed.size(); ++a) {
                                    allowed[a] |= cr.rows[a][0];
                                }
                            }
                            options[i] =
                                filtered_injections(allowed, s.proto(c[i]).size(), 20000);
                            if (options[i].empty()) feasible = false;
                        }
                    }
                    std::vector<std::size_t> epick(n, 0);
                    for (bool more = feasible; more;) {
                        tick();
                        UnionFind uf(total_sides);
                        for (std::size_t i = 0; i < n; ++i) {
                            const auto& e = options[i][epick[i]];
                            for (std::size_t a = 0; a < e.size(); ++a) {
                                uf.unite(form_offset[i] + a, form_offset[c[i]] + e[a]);
                            }
                        }
                        // A name may not repeat within one prototile, and no
                        // eponymous side pair may admit a legal placement.
                        std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>
                            cls;
                        for (std::size_t f = 0; f < n; ++f) {
                            for (std::size_t k = 0; k < s.proto(f).size(); ++k) {
                                cls[uf.find(form_offset[f] + k)].push_back({f, k});
                            }
                        }
                        bool ok = true;
                        for (const auto& [root, members] : cls) {
                            (void)root;
                            for (std::size_t x = 0; x < members.size() && ok; ++x) {
                                for (std::size_t y = 0; y < members.size() && ok; ++y) {
                                    if (x == y) continue;
                                    if (members[x].first == members[y].first) ok = false;
                                    else if (admissible_pair(s.proto(members[x].first),
                                                             members[x].second,
                                                             s.proto(members[y].first),
                                                             members[y].second)) {
                                        ok = false;
                                    }
                                }
                            }
                            if (!ok) break;
                        }
                        if (ok) {
                            std::vector<std::vector<std::size_t>> targets(n);
                            for (std::size_t i = 0; i < n; ++i) {
                                targets[i] = options[i][epick[i]];
                            }
                            // Route the nets rule by rule over the surviving
                            // candidate centrals of the chosen form.
                            std::vector<std::size_t> central(n);
                            std::vector<std::vector<std::vector<Segment>>> got(n);
                            bool routed = true;
                            for (std::size_t i = 0; i < n && routed; ++i) {
                                bool found_one = false;
                                for (std::size_t t : sr.survivors[i]) {
                                    if (macro[i].patch[t].proto != c[i]) continue;
                                    auto memo_key = std::make_tuple(i, t, targets[i], spick);
                                    auto it = route_memo.find(memo_key);
                                    if (it == route_memo.end()) {
                                        Router router(macro[i], t, ports[i], targets[i],
                                                      &remaining, route_cap);
                                        std::optional<std::vector<std::vector<Segment>>>
                                            outcome;
                                        try {
                                            if (router.solve()) {
                                                outcome = router.paths;
                                            }
                                        } catch (const RouteCapOut&) {
                                        }
                                        it = route_memo.emplace(memo_key, outcome).first;
                                    }
                                    if (it->second) {
                                        central[i] = t;
                                        got[i] = *it->second;
                                        found_one = true;
                                        break;
                                    }
                                }
                                if (!found_one) routed = false;
                            }
                            if (routed) {
                                Markup m;
                                m.names.resize(n);
                                std::map<std::size_t, std::string> name_of;
                                for (std::size_t f = 0; f < n; ++f) {
                                    m.names[f].resize(s.proto(f).size());
                                    for (std::size_t k = 0; k < s.proto(f).size(); ++k) {
                                        std::size_t root = uf.find(form_offset[f] + k);
                                        auto [it, fresh] = name_of.emplace(
                                            root, "z" + std::to_string(name_of.size()));
                                        m.names[f][k] = it->second;
                                    }
                                }
                                m.central = central;
                                m.nets.resize(n);
                                for (std::size_t i = 0; i < n; ++i) {
                                    m.nets[i].resize(ports[i].size());
                                    for (std::size_t a = 0; a < ports[i].size(); ++a) {
                                        for (const Segment& seg : got[i][a]) {
                                            m.nets[i][a].sides.push_back(
                                                macro[i].refs.at(seg).front());
                                        }
                                    }
                                }
                                MarkupReport rep = check_requirements(s, m);
                                RequirementReport cyc = check_cyclicity(s, m);
                                if (rep.all_pass && cyc.pass) return m;
                            }
                        }
                        more = false;
                        for (std::size_t i = 0; i < n; ++i) {
                            if (++epick[i] < options[i].size()) {
                                more = true;
                                break;
                            }
                            epick[i] = 0;
                        }
                    }
                }
                bool carried = false;
                for (std::size_t i = 0; i < n; ++i) {
                    if (++pick[i] < form_opts[i].size()) {
                        carried = true;
                        break;
                    }
                    pick[i] = 0;
                }
                if (!carried) return std::nullopt;
            }
        };

        // Pass 1: one port per macroside. This covers every markup whose net
        // touches each macroside in a single outer side, and doubles as the
        // single-port part of the refutation sweep.
        {
            std::vector<std::size_t> spick(class_members.size(), 0);
            for (bool smore = true; smore;) {
                std::vector<std::vector<std::pair<Rat, Rat>>> sel(class_members.size());
                for (std::size_t cl = 0; cl < sel.size(); ++cl) {
                    sel[cl] = {class_slots[cl][spick[cl]]};
                }
                ScreenResult sr = screen(sel);
                if (!sr.refuted) {
                    all_refuted = false;
                    std::vector<std::vector<Segment>> ports(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        ports[i].resize(macro[i].outer.size());
                        for (std::size_t a = 0; a < macro[i].outer.size(); ++a) {
                            for (const auto& [iv, seg] : macro[i].outer[a]) {
                                if (iv == class_slots[class_of[ms_off[i] + a]][
                                        spick[class_of[ms_off[i] + a]]]) {
                                    ports[i][a] = seg;
                                }
                            }
                        }
                    }
                    if (auto m = attempt(sr, spick, ports)) {
                        res.markup = *m;
                        res.nodes = budget - remaining;
                        return res;
                    }
                }
                smore = false;
                for (std::size_t cl = 0; cl < spick.size(); ++cl) {
                    if (++spick[cl] < class_slots[cl].size()) {
                        smore = true;
                        break;
                    }
                    spick[cl] = 0;
                }
            }
        }

        // Pass 2: several ports per macroside. Only needed to complete the
        // refutation, so it runs only while every choice so far was refuted.
        if (all_refuted) {
            // Subsets per class, smallest first, capped by the free-outer-side
            // bound of the class.
            std::vector<std::vector<std::vector<std::pair<Rat, Rat>>>> class_subsets(
                class_members.size());
            bool enumerable = true;
            long combos = 1;
            for (std::size_t cl = 0; cl < class_members.size() && enumerable; ++cl) {
                const auto& slots = class_slots[cl];
                if (slots.size() > 20) {
                    enumerable = false;
                    break;
                }
                for (std::size_t bits = 1; bits < (std::size_t(1) << slots.size()); ++bits) {
                    std::size_t cnt = static_cast<std::size_t>(__builtin_popcountll(bits));
                    if (cnt < 1 || cnt > class_max[cl]) continue;
                    std::vector<std::pair<Rat, Rat>> sub;
                    for (std::size_t b = 0; b < slots.size(); ++b) {
                        if ((bits >> b) & 1) sub.push_back(slots[b]);
                    }
                    class_subsets[cl].push_back(std::move(sub));
                }
                std::stable_sort(class_subsets[cl].begin(), class_subsets[cl].end(),
                                 [](const auto& x, const auto& y) {
                                     return x.size() < y.size();
                                 });
                combos *= static_cast<long>(class_subsets[cl].size());
                if (combos > 200000) enumerable = false;
            }
            if (!enumerable) {
                all_refuted = false;
            } else {
                std::vector<std::size_t> spick(class_members.size(), 0);
                for (bool smore = true; smore && all_refuted;) {
                    bool single = true;
                    std::vector<std::vector<std::pair<Rat, Rat>>> sel(class_members.size());
                    for (std::size_t cl = 0; cl < sel.size(); ++cl) {
                        sel[cl] = class_subsets[cl][spick[cl]];
                        if (sel[cl].size() > 1) single = false;
                    }
                    if (!single) {
                        ScreenResult sr = screen(sel);
                        if (!sr.refuted) all_refuted = false;
                    }
                    smore = false;
                    for (std::size_t cl = 0; cl < spick.size(); ++cl) {
                        if (++spick[cl] < class_subsets[cl].size()) {
                            smore = true;
                            break;
                        }
                        spick[cl] = 0;
                    }
                }
            }
        }

        if (all_refuted) {
            res.proven_unsat = true;
            res.note = "no markup exists: every admissible port arrangement fails — ports must "
                       "sit at matching positions on supertile sides that can meet in an "
                       "assembled patch, and each arrangement either makes two net sides share "
                       "a vertex, leaves some rule unable to reach distinct central sides, or "
                       "forces a tile beyond its net-side bound";
        } else {
            res.note = "search space exhausted for single-port configurations (port positions "
                       "matched across meetable supertile sides); no markup found, and not "
                       "every multi-port configuration could be ruled out";
        }
    } catch (const BudgetOut&) {
        res.note = "search budget exhausted before completion";
        remaining = 0;
    }
    res.nodes = budget - remaining;
    return res;
}

}  // namespace tilesmith
