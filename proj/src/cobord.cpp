#include "obstrukt/cobord.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>

#include "obstrukt/error.hpp"
#include "obstrukt/textio.hpp"

namespace obstrukt {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Matrix of a coordinate permutation: (P t)_{perm[i]} = t_i.
RealMatrix permutation_matrix(const std::vector<std::size_t>& perm) {
    RealMatrix m(perm.size(), perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) m(perm[i], i) = 1.0;
    return m;
}

std::size_t generator_count(GroupKind group) {
    switch (group) {
        case GroupKind::Sigma2: return 1;
        case GroupKind::Sigma3: return 2;
        case GroupKind::Free: return kNone;
    }
    return 0;
}

bool near_identity(const RealMatrix& m) {
    const RealMatrix id = RealMatrix::identity(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j) - id(i, j)) > 1e-9) return false;
    return true;
}

void check_shapes(const SignRepresentation& rep) {
    const std::size_t want = generator_count(rep.group);
    if (want != kNone && rep.generators.size() != want) {
        throw InputError("representation of " + to_string(rep.group) + " needs " + std::to_string(want) +
                         " generator matrices");
    }
    for (const auto& g : rep.generators) {
        if (!g.square() || g.rows() != rep.dimension() || g.rows() == 0) {
            throw ShapeError("representation generators must be square matrices of one common size");
        }
    }
}

int sign_of(const RealMatrix& m, const char* what) {
    const int s = det_sign(m);
    if (s == 0) throw DegenerateRepresentationError(std::string("singular matrix for ") + what);
    return s;
}

int parse_sign(const std::string& token, const std::string& context) {
    if (token == "+" || token == "+1" || token == "1") return 1;
    if (token == "-" || token == "-1") return -1;
    throw InputError(context + ": sign must be one of + - +1 -1, got '" + token + "'");
}

struct SpanningForest {
    std::vector<std::size_t> component;    // component index per vertex
    std::vector<std::size_t> parent_edge;  // kNone at roots
    std::vector<std::size_t> parent;
    std::vector<std::size_t> depth;
    std::vector<int> eps_xi;               // product of w_xi along the tree path from the root
    std::vector<int> eps_eta;
    std::vector<char> tree_edge;
    std::vector<std::vector<std::size_t>> components;

    int twist(std::size_t v) const { return eps_xi[v] * eps_eta[v]; }
};

SpanningForest spanning_forest(const CobConfig& c) {
    const std::size_t n = c.vertex_count;
    SpanningForest f;
    f.component.assign(n, kNone);
    f.parent_edge.assign(n, kNone);
    f.parent.assign(n, kNone);
    f.depth.assign(n, 0);
    f.eps_xi.assign(n, 1);
    f.eps_eta.assign(n, 1);
    f.tree_edge.assign(c.edges.size(), 0);
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
        incident[c.edges[e].u].push_back(e);
        if (c.edges[e].v != c.edges[e].u) incident[c.edges[e].v].push_back(e);
    }
    for (std::size_t root = 0; root < n; ++root) {
        if (f.component[root] != kNone) continue;
        const std::size_t id = f.components.size();
        f.components.emplace_back();
        std::queue<std::size_t> q;
        q.push(root);
        f.component[root] = id;
        while (!q.empty()) {
            const std::size_t x = q.front();
            q.pop();
            f.components[id].push_back(x);
            for (std::size_t e : incident[x]) {
                const CobEdge& edge = c.edges[e];
                const std::size_t y = edge.u == x ? edge.v : edge.u;
                if (f.component[y] != kNone) continue;
                f.component[y] = id;
                f.parent_edge[y] = e;
                f.parent[y] = x;
                f.depth[y] = f.depth[x] + 1;
                f.eps_xi[y] = f.eps_xi[x] * edge.w_xi;
                f.eps_eta[y] = f.eps_eta[x] * edge.w_eta;
                f.tree_edge[e] = 1;
                q.push(y);
            }
        }
        std::sort(f.components[id].begin(), f.components[id].end());
    }
    return f;
}

int cycle_value_xi(const SpanningForest& f, const CobEdge& e) { return f.eps_xi[e.u] * f.eps_xi[e.v] * e.w_xi; }
int cycle_value_eta(const SpanningForest& f, const CobEdge& e) { return f.eps_eta[e.u] * f.eps_eta[e.v] * e.w_eta; }

// Edges of the tree path from a to b, in walking order.
std::vector<std::size_t> tree_path(const SpanningForest& f, std::size_t a, std::size_t b) {
    std::vector<std::size_t> up, down;
    while (f.depth[a] > f.depth[b]) {
        up.push_back(f.parent_edge[a]);
        a = f.parent[a];
    }
    while (f.depth[b] > f.depth[a]) {
        down.push_back(f.parent_edge[b]);
        b = f.parent[b];
    }
    while (a != b) {
        up.push_back(f.parent_edge[a]);
        a = f.parent[a];
        down.push_back(f.parent_edge[b]);
        b = f.parent[b];
    }
    up.insert(up.end(), down.rbegin(), down.rend());
    return up;
}

}  // namespace

std::string to_string(GroupKind kind) {
    switch (kind) {
        case GroupKind::Sigma2: return "Sigma2";
        case GroupKind::Sigma3: return "Sigma3";
        case GroupKind::Free: return "free";
    }
    return "?";
}

std::string to_string(GroupTag tag) { return tag == GroupTag::Z ? "Z" : "Z2"; }

void validate_representation(const SignRepresentation& rep) {
    check_shapes(rep);
    if (rep.group == GroupKind::Free) return;
    for (const auto& g : rep.generators) {
        if (!near_identity(g * g)) throw InputError("representation: a transposition does not square to the identity");
    }
    if (rep.group == GroupKind::Sigma3) {
        const RealMatrix r = rep.generators[0] * rep.generators[1];
        if (!near_identity(r * r * r)) throw InputError("representation: (s1 s2)^3 is not the identity");
    }
}

SignRepresentation rep_P(std::size_t copies) {
    if (copies == 0) throw InputError("rep_P needs at least one copy");
    // Coordinates of t in the basis b1 = (1,-1,0), b2 = (1,0,-1) are (-t2, -t3).
    const RealVector b1{1.0, -1.0, 0.0};
    const RealVector b2{1.0, 0.0, -1.0};
    auto plane_matrix = [&](const std::vector<std::size_t>& perm) {
        const RealMatrix p = permutation_matrix(perm);
        RealMatrix m(2, 2);
        const RealVector basis[] = {b1, b2};
        for (std::size_t j = 0; j < 2; ++j) {
            const RealVector t = p * basis[j];
            m(0, j) = -t[1];
            m(1, j) = -t[2];
        }
        return m;
    };
    const RealMatrix s1 = plane_matrix({1, 0, 2});
    const RealMatrix s2 = plane_matrix({0, 2, 1});
    SignRepresentation rep;
    rep.group = GroupKind::Sigma3;
    rep.generators = {block_diagonal(std::vector<RealMatrix>(copies, s1)),
                      block_diagonal(std::vector<RealMatrix>(copies, s2))};
    return rep;
}

SignRepresentation rep_L(std::size_t copies) {
    if (copies == 0) throw InputError("rep_L needs at least one copy");
    RealMatrix m = RealMatrix::identity(copies);
    for (std::size_t i = 0; i < copies; ++i) m(i, i) = -1.0;
    return {GroupKind::Sigma2, {m}};
}

SignRepresentation trivial_rep(GroupKind group, std::size_t dim) {
    if (dim == 0) throw InputError("trivial_rep needs a positive dimension");
    const std::size_t count = group == GroupKind::Free ? 1 : generator_count(group);
    return {group, std::vector<RealMatrix>(count, RealMatrix::identity(dim))};
}

SignRepresentation direct_sum(const SignRepresentation& a, const SignRepresentation& b) {
    if (a.group != b.group || a.generators.size() != b.generators.size()) {
        throw InputError("direct_sum: representations of different groups");
    }
    SignRepresentation out{a.group, {}};
    for (std::size_t g = 0; g < a.generators.size(); ++g) {
        const RealMatrix blocks[] = {a.generators[g], b.generators[g]};
        out.generators.push_back(block_diagonal(blocks));
    }
    return out;
}

OrientationCharacter orientation_character(const SignRepresentation& rep) {
    check_shapes(rep);
    OrientationCharacter out{rep.group, {}};
    for (const auto& g : rep.generators) out.values.push_back(sign_of(g, "a generator"));
    if (rep.group == GroupKind::Sigma3) {
        const RealMatrix s121 = rep.generators[0] * rep.generators[1] * rep.generators[0];
        const int third = sign_of(s121, "s1 s2 s1");
        if (out.values[0] != out.values[1] || out.values[0] != third) {
            throw NotACharacterError("transpositions of Sigma3 act with different orientation signs");
        }
    }
    return out;
}

OrientationCharacter tangent_block_character(std::size_t m, std::size_t points) {
    if (m == 0) throw InputError("tangent_block_character: block dimension must be positive");
    if (points != 2 && points != 3) throw InputError("tangent_block_character: points must be 2 or 3");
    auto block_swap = [&](std::size_t a, std::size_t b) {
        std::vector<std::size_t> perm(points * m);
        for (std::size_t blk = 0; blk < points; ++blk) {
            const std::size_t to = blk == a ? b : blk == b ? a : blk;
            for (std::size_t i = 0; i < m; ++i) perm[blk * m + i] = to * m + i;
        }
        return permutation_matrix(perm);
    };
    SignRepresentation rep;
    if (points == 2) {
        rep = {GroupKind::Sigma2, {block_swap(0, 1)}};
    } else {
        rep = {GroupKind::Sigma3, {block_swap(0, 1), block_swap(1, 2)}};
    }
    return orientation_character(rep);
}

OrientationCharacter character_product(const OrientationCharacter& a, const OrientationCharacter& b) {
    if (a.group != b.group || a.values.size() != b.values.size()) {
        throw InputError("character_product: characters of different groups");
    }
    OrientationCharacter out{a.group, a.values};
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
    return out;
}

GroupTag classify_pi0(const OrientationCharacter& w_xi, const OrientationCharacter& w_eta) {
    if (w_xi.group != w_eta.group || w_xi.values.size() != w_eta.values.size()) {
        throw InputError("classify_pi0: characters of different groups");
    }
    return w_xi.values == w_eta.values ? GroupTag::Z : GroupTag::Z2;
}

GroupTag knotting_group(std::size_t k, const RepresentationHook& hook) {
    return knotting_table(k, hook).back().group;
}

std::vector<KnottingRow> knotting_table(std::size_t kmax, const RepresentationHook& hook) {
    if (kmax == 0) throw InputError("knotting table needs k >= 1");
    std::vector<KnottingRow> rows;
    for (std::size_t k = 1; k <= kmax; ++k) {
        SignRepresentation plane = rep_P(3 * k + 2);
        if (hook) hook(plane);
        const OrientationCharacter w_plane = orientation_character(plane);
        const OrientationCharacter w_tangent = tangent_block_character(2 * k + 1, 3);
        rows.push_back({k, w_plane.values[0], w_tangent.values[0], classify_pi0(w_plane, w_tangent)});
    }
    return rows;
}

void validate_config(const CobConfig& c) {
    if (c.vertex_count == 0) throw InputError("configuration needs at least one vertex");
    for (const auto& e : c.edges) {
        if (e.u >= c.vertex_count || e.v >= c.vertex_count) throw InputError("edge endpoint out of range");
        if (std::abs(e.w_xi) != 1 || std::abs(e.w_eta) != 1) throw InputError("edge signs must be +1 or -1");
    }
    for (const auto& p : c.points) {
        if (p.vertex >= c.vertex_count) throw InputError("point placed at a non-existent vertex");
        if (std::abs(p.sign) != 1) throw InputError("point signs must be +1 or -1");
    }
}

std::vector<SignedPoint> canonical_points(const CobConfig& c) {
    std::vector<SignedPoint> out = c.points;
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::size_t>> graph_components(const CobConfig& c) {
    validate_config(c);
    return spanning_forest(c).components;
}

std::pair<OrientationCharacter, OrientationCharacter> cycle_characters(const CobConfig& c) {
    validate_config(c);
    const SpanningForest f = spanning_forest(c);
    if (f.components.size() != 1) throw InputError("cycle_characters: graph is disconnected");
    OrientationCharacter xi{GroupKind::Free, {}};
    OrientationCharacter eta{GroupKind::Free, {}};
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
        if (f.tree_edge[e]) continue;
        xi.values.push_back(cycle_value_xi(f, c.edges[e]));
        eta.values.push_back(cycle_value_eta(f, c.edges[e]));
    }
    return {xi, eta};
}

std::vector<ClassValue> normalize_components(const CobConfig& c) {
    validate_config(c);
    const SpanningForest f = spanning_forest(c);
    std::vector<ClassValue> out(f.components.size());
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
        if (f.tree_edge[e]) continue;
        const CobEdge& edge = c.edges[e];
        if (cycle_value_xi(f, edge) != cycle_value_eta(f, edge)) out[f.component[edge.u]].twisted = true;
    }
    for (const auto& p : c.points) {
        ClassValue& cls = out[f.component[p.vertex]];
        cls.value += cls.twisted ? 1 : p.sign * f.twist(p.vertex);
    }
    for (auto& cls : out) {
        if (cls.twisted) cls.value %= 2;
    }
    return out;
}

ClassValue normalize_config(const CobConfig& c) {
    const auto parts = normalize_components(c);
    if (parts.size() != 1) throw InputError("normalize_config: graph is disconnected");
    return parts.front();
}

CobConfig apply_move(const CobConfig& c, const Move& move) {
    CobConfig out = c;
    switch (move.kind) {
        case MoveKind::Create:
            if (move.vertex >= c.vertex_count) throw InvalidMoveError("create: vertex out of range");
            out.points.push_back({move.vertex, 1});
            out.points.push_back({move.vertex, -1});
            return out;
        case MoveKind::Annihilate: {
            if (move.vertex >= c.vertex_count) throw InvalidMoveError("annihilate: vertex out of range");
            auto find = [&](int sign) {
                return std::find(out.points.begin(), out.points.end(), SignedPoint{move.vertex, sign});
            };
            auto plus = find(1);
            auto minus = find(-1);
            if (plus == out.points.end() || minus == out.points.end()) {
                throw InvalidMoveError("annihilate: no (+, -) pair at vertex " + std::to_string(move.vertex));
            }
            const auto first = std::min(plus, minus);
            const auto second = std::max(plus, minus);
            out.points.erase(second);
            out.points.erase(first);
            return out;
        }
        case MoveKind::Transport: {
            if (move.point >= c.points.size()) throw InvalidMoveError("transport: point index out of range");
            if (move.edge >= c.edges.size()) throw InvalidMoveError("transport: edge index out of range");
            const CobEdge& e = c.edges[move.edge];
            SignedPoint& p = out.points[move.point];
            if (p.vertex != e.u && p.vertex != e.v) throw InvalidMoveError("transport: edge is not incident to the point");
            p.vertex = p.vertex == e.u ? e.v : e.u;
            p.sign *= e.twist();
            return out;
        }
    }
    throw InvalidMoveError("unknown move");
}

std::optional<std::vector<Move>> flip_witness(const CobConfig& c, std::size_t point) {
    validate_config(c);
    if (point >= c.points.size()) throw InputError("flip_witness: point index out of range");
    const SpanningForest f = spanning_forest(c);
    const std::size_t x = c.points[point].vertex;
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
        const CobEdge& edge = c.edges[e];
        if (f.tree_edge[e] || f.component[edge.u] != f.component[x]) continue;
        if (cycle_value_xi(f, edge) == cycle_value_eta(f, edge)) continue;
        // x -> u along the tree, across e to v, back to x along the tree.
        std::vector<Move> moves;
        for (std::size_t t : tree_path(f, x, edge.u)) moves.push_back(Move::transport(point, t));
        moves.push_back(Move::transport(point, e));
        for (std::size_t t : tree_path(f, edge.v, x)) moves.push_back(Move::transport(point, t));
        return moves;
    }
    return std::nullopt;
}

CobConfig read_cob_config(std::istream& in) {
    const KeyedText text = KeyedText::parse(in);
    text.allow_only({"vertices", "edges", "points"});
    CobConfig c;
    c.vertex_count = parse_count(text.require("vertices").value, "vertices");
    if (const auto* edges = text.find("edges")) {
        if (!edges->value.empty()) throw InputError("edges: list entries go on the following lines");
        for (const auto& item : edges->items) {
            const auto w = split_words(item);
            if (w.size() != 4) throw InputError("edges: expected 'u v w_xi w_eta', got '" + item + "'");
            c.edges.push_back({parse_count(w[0], "edge endpoint"), parse_count(w[1], "edge endpoint"),
                               parse_sign(w[2], "edge w_xi"), parse_sign(w[3], "edge w_eta")});
        }
    }
    if (const auto* points = text.find("points")) {
        if (!points->value.empty()) throw InputError("points: list entries go on the following lines");
        for (const auto& item : points->items) {
            const auto w = split_words(item);
            if (w.size() != 2) throw InputError("points: expected 'vertex sign', got '" + item + "'");
            c.points.push_back({parse_count(w[0], "point vertex"), parse_sign(w[1], "point sign")});
        }
    }
    validate_config(c);
    return c;
}

CobConfig read_cob_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open configuration file: " + path);
    return read_cob_config(in);
}

void write_cob_config(std::ostream& out, const CobConfig& c) {
    auto sign = [](int s) { return s > 0 ? "+1" : "-1"; };
    out << "vertices: " << c.vertex_count << "\nedges:\n";
    for (const auto& e : c.edges) out << "  " << e.u << ' ' << e.v << ' ' << sign(e.w_xi) << ' ' << sign(e.w_eta) << '\n';
    out << "points:\n";
    for (const auto& p : c.points) out << "  " << p.vertex << ' ' << (p.sign > 0 ? '+' : '-') << '\n';
}

}  // namespace obstrukt
