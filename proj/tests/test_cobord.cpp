#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <queue>
#include <set>
#include <sstream>

#include "obstrukt/cobord.hpp"
#include "obstrukt/error.hpp"
#include "test_support.hpp"

using namespace obstrukt;
using testing_support::Gen;

namespace {

RealMatrix orthogonal(Gen& g, std::size_t n) {
    RealMatrix q(n, n);
    std::vector<RealVector> cols;
    while (cols.size() < n) {
        RealVector c = g.gaussian(n);
        for (const auto& b : cols) {
            double d = 0.0;
            for (std::size_t k = 0; k < n; ++k) d += c[k] * b[k];
            for (std::size_t k = 0; k < n; ++k) c[k] -= d * b[k];
        }
        const double len = norm2(c);
        if (len < 1e-3) continue;
        for (auto& x : c) x /= len;
        cols.push_back(c);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = cols[j][i];
    return q;
}

SignRepresentation conjugate(const SignRepresentation& rep, const RealMatrix& q) {
    SignRepresentation out{rep.group, {}};
    for (const auto& m : rep.generators) out.generators.push_back(q * m * q.transposed());
    return out;
}

// A random representation of the group assembled from the basic pieces.
SignRepresentation random_rep(Gen& g, GroupKind group) {
    auto piece = [&]() {
        const std::size_t k = 1 + g.index(3);
        if (group == GroupKind::Sigma3) return g.coin() ? rep_P(k) : trivial_rep(group, k);
        return g.coin() ? rep_L(k) : trivial_rep(group, k);
    };
    SignRepresentation rep = piece();
    const std::size_t extra = g.index(3);
    for (std::size_t i = 0; i < extra; ++i) rep = direct_sum(rep, piece());
    return conjugate(rep, orthogonal(g, rep.dimension()));
}

// Determinant sign of a 2x2 matrix, expanded directly.
int det2(const RealMatrix& m) {
    const double d = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return d > 0 ? 1 : -1;
}

CobConfig random_config(Gen& g) {
    CobConfig c;
    c.vertex_count = 1 + g.index(5);
    for (std::size_t v = 1; v < c.vertex_count; ++v) c.edges.push_back({g.index(v), v, g.sign(), g.sign()});
    const std::size_t extra = g.index(4);
    for (std::size_t e = 0; e < extra; ++e)
        c.edges.push_back({g.index(c.vertex_count), g.index(c.vertex_count), g.sign(), g.sign()});
    const std::size_t points = g.index(6);
    for (std::size_t p = 0; p < points; ++p) c.points.push_back({g.index(c.vertex_count), g.sign()});
    return c;
}

std::optional<CobConfig> try_move(const CobConfig& c, const Move& m) {
    try {
        return apply_move(c, m);
    } catch (const InvalidMoveError&) {
        return std::nullopt;
    }
}

Move random_move(Gen& g, const CobConfig& c) {
    switch (g.index(3)) {
        case 0: return Move::create(g.index(c.vertex_count));
        case 1: return Move::annihilate(g.index(c.vertex_count));
        default:
            return Move::transport(c.points.empty() ? 0 : g.index(c.points.size()),
                                   c.edges.empty() ? 0 : g.index(c.edges.size()));
    }
}

// Breadth-first search over configurations with at most max_points points.
bool reachable(const CobConfig& from, const CobConfig& to, std::size_t max_points, std::size_t max_depth) {
    const auto target = canonical_points(to);
    std::set<std::vector<SignedPoint>> seen{canonical_points(from)};
    std::queue<std::pair<CobConfig, std::size_t>> queue;
    queue.push({from, 0});
    while (!queue.empty()) {
        auto [c, depth] = queue.front();
        queue.pop();
        if (canonical_points(c) == target) return true;
        if (depth == max_depth) continue;
        std::vector<Move> moves;
        for (std::size_t v = 0; v < c.vertex_count; ++v) {
            moves.push_back(Move::create(v));
            moves.push_back(Move::annihilate(v));
        }
        for (std::size_t p = 0; p < c.points.size(); ++p)
            for (std::size_t e = 0; e < c.edges.size(); ++e) moves.push_back(Move::transport(p, e));
        for (const Move& m : moves) {
            auto next = try_move(c, m);
            if (!next || next->points.size() > max_points) continue;
            if (seen.insert(canonical_points(*next)).second) queue.push({*next, depth + 1});
        }
    }
    return false;
}

CobConfig loop_config(int w_xi, int w_eta, std::vector<int> signs) {
    CobConfig c;
    c.vertex_count = 1;
    c.edges.push_back({0, 0, w_xi, w_eta});
    for (int s : signs) c.points.push_back({0, s});
    return c;
}

}  // namespace

TEST_CASE("rep_P examples") {
    const SignRepresentation p = rep_P(1);
    CHECK(p.group == GroupKind::Sigma3);
    CHECK(p.dimension() == 2);
    CHECK_NOTHROW(validate_representation(p));
    // The transposition (2 3) swaps the basis vectors (1,-1,0) and (1,0,-1).
    CHECK(max_abs_diff(std::span(p.generators[1].data()), RealVector{0, 1, 1, 0}) == 0.0);
    CHECK(det2(p.generators[1]) == -1);
    CHECK(det_sign(p.generators[0]) == -1);
    CHECK(det_sign(p.generators[0] * p.generators[1]) == 1);  // a 3-cycle
    const SignRepresentation p8 = rep_P(8);
    CHECK(p8.dimension() == 16);
    CHECK(det_sign(p8.generators[0]) == 1);
    CHECK_THROWS_AS(rep_P(0), InputError);
}

TEST_CASE("orientation_character examples") {
    CHECK(orientation_character(rep_P(1)).values == std::vector<int>{-1, -1});
    CHECK(orientation_character(rep_L()).values == std::vector<int>{-1});
    CHECK(orientation_character(trivial_rep(GroupKind::Sigma2)).values == std::vector<int>{1});
    CHECK(orientation_character(trivial_rep(GroupKind::Sigma3, 4)).values == std::vector<int>{1, 1});
    const SignRepresentation singular{GroupKind::Sigma2, {RealMatrix(1, 1, {0.0})}};
    CHECK_THROWS_AS(orientation_character(singular), DegenerateRepresentationError);
    // s1 odd, s2 even cannot come from a character of Sigma3.
    const SignRepresentation bad{GroupKind::Sigma3, {RealMatrix(1, 1, {-1.0}), RealMatrix(1, 1, {1.0})}};
    CHECK_THROWS_AS(orientation_character(bad), NotACharacterError);
}

TEST_CASE("validate_representation rejects broken relations") {
    CHECK_THROWS_AS(validate_representation({GroupKind::Sigma2, {RealMatrix(1, 1, {2.0})}}), InputError);
    CHECK_THROWS_AS(validate_representation({GroupKind::Sigma2, {}}), InputError);
    const RealMatrix s(2, 2, {0, 1, 1, 0});
    CHECK_THROWS_AS(validate_representation({GroupKind::Sigma3, {s, RealMatrix(2, 2, {1, 0, 0, -1})}}), InputError);
    CHECK_THROWS_AS(validate_representation({GroupKind::Sigma3, {s, RealMatrix::identity(3)}}), InputError);
}

TEST_CASE("tangent_block_character examples") {
    CHECK(tangent_block_character(3).values == std::vector<int>{-1, -1});
    CHECK(tangent_block_character(2).values == std::vector<int>{1, 1});
    CHECK(tangent_block_character(1).values == std::vector<int>{-1, -1});
    CHECK(tangent_block_character(5, 2).values == std::vector<int>{-1});
    CHECK(tangent_block_character(4, 2).values == std::vector<int>{1});
    for (std::size_t m = 1; m <= 9; ++m) CHECK(tangent_block_character(m).values[0] == (m % 2 ? -1 : 1));
    CHECK_THROWS_AS(tangent_block_character(0), InputError);
}

TEST_CASE("classify_pi0 examples") {
    const OrientationCharacter minus{GroupKind::Sigma2, {-1}}, plus{GroupKind::Sigma2, {1}};
    CHECK(classify_pi0(minus, minus) == GroupTag::Z);
    CHECK(classify_pi0(plus, minus) == GroupTag::Z2);
    CHECK(classify_pi0(plus, plus) == GroupTag::Z);
    const OrientationCharacter s3{GroupKind::Sigma3, {-1, -1}};
    CHECK_THROWS_AS(classify_pi0(minus, s3), InputError);
}

TEST_CASE("classify_pi0 depends only on the product character") {
    for (GroupKind group : {GroupKind::Sigma2, GroupKind::Sigma3}) {
        const std::size_t gens = group == GroupKind::Sigma2 ? 1 : 2;
        for (int w : {1, -1})
            for (int u : {1, -1})
                for (int v : {1, -1}) {
                    const OrientationCharacter cw{group, std::vector<int>(gens, w)};
                    const OrientationCharacter cu{group, std::vector<int>(gens, u)};
                    const OrientationCharacter cv{group, std::vector<int>(gens, v)};
                    CHECK(classify_pi0(cw, cu) ==
                          classify_pi0(character_product(cw, cv), character_product(cu, cv)));
                }
    }
}

TEST_CASE("characters of direct sums multiply") {
    Gen g(91);
    for (int t = 0; t < 200; ++t) {
        const GroupKind group = g.coin() ? GroupKind::Sigma2 : GroupKind::Sigma3;
        const SignRepresentation a = random_rep(g, group), b = random_rep(g, group);
        CHECK_NOTHROW(validate_representation(a));
        CHECK(orientation_character(direct_sum(a, b)) ==
              character_product(orientation_character(a), orientation_character(b)));
    }
}

TEST_CASE("knotting group alternates with the parity of k") {
    CHECK(knotting_group(1) == GroupTag::Z);
    CHECK(knotting_group(2) == GroupTag::Z2);
    CHECK(knotting_group(3) == GroupTag::Z);
    const auto table = knotting_table(12);
    REQUIRE(table.size() == 12);
    for (const auto& row : table) {
        CHECK(row.w_plane == (row.k % 2 ? -1 : 1));
        CHECK(row.w_tangent == -1);
        CHECK(row.group == (row.k % 2 ? GroupTag::Z : GroupTag::Z2));
    }
    CHECK_THROWS_AS(knotting_group(0), InputError);
}

TEST_CASE("tampering with the plane representation flips the table") {
    const RepresentationHook hook = [](SignRepresentation& rep) {
        for (auto& m : rep.generators)
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) m(i, j) = i == j ? 1.0 : 0.0;
    };
    const auto honest = knotting_table(12);
    const auto tampered = knotting_table(12, hook);
    for (std::size_t i = 0; i < honest.size(); ++i) {
        CHECK(tampered[i].w_plane == -honest[i].w_plane);
        CHECK(tampered[i].group != honest[i].group);
    }
}

TEST_CASE("normalize_config examples") {
    CobConfig single;
    single.vertex_count = 1;
    single.points = {{0, 1}, {0, 1}, {0, -1}};
    CHECK(normalize_config(single) == ClassValue{false, 1});
    const ClassValue twisted = normalize_config(loop_config(-1, 1, {1}));
    CHECK(twisted == ClassValue{true, 1});
    CHECK(twisted.tag() == GroupTag::Z2);
    CHECK(normalize_config(loop_config(-1, -1, {1, -1})) == ClassValue{false, 0});

    CobConfig split;
    split.vertex_count = 2;
    CHECK_THROWS_AS(normalize_config(split), InputError);
    CHECK(normalize_components(split).size() == 2);
}

TEST_CASE("validate_config") {
    CobConfig c;
    CHECK_THROWS_AS(validate_config(c), InputError);
    c.vertex_count = 2;
    c.edges.push_back({0, 2, 1, 1});
    CHECK_THROWS_AS(validate_config(c), InputError);
    c.edges = {{0, 1, 1, 0}};
    CHECK_THROWS_AS(validate_config(c), InputError);
    c.edges = {{0, 1, 1, 1}};
    c.points = {{1, 2}};
    CHECK_THROWS_AS(validate_config(c), InputError);
    c.points = {{1, -1}};
    CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("apply_move examples") {
    const CobConfig base = loop_config(-1, 1, {1});
    SUBCASE("create then annihilate") {
        const CobConfig created = apply_move(base, Move::create(0));
        CHECK(created.points.size() == 3);
        CHECK(canonical_points(apply_move(created, Move::annihilate(0))) == canonical_points(base));
    }
    SUBCASE("transport around a twisted loop") {
        const CobConfig moved = apply_move(base, Move::transport(0, 0));
        CHECK(moved.points == std::vector<SignedPoint>{{0, -1}});
    }
    SUBCASE("transport along an untwisted edge") {
        CobConfig c;
        c.vertex_count = 2;
        c.edges = {{0, 1, -1, -1}};
        c.points = {{0, 1}};
        CHECK(apply_move(c, Move::transport(0, 0)).points == std::vector<SignedPoint>{{1, 1}});
    }
    SUBCASE("invalid moves") {
        CHECK_THROWS_AS(apply_move(base, Move::annihilate(0)), InvalidMoveError);
        CHECK_THROWS_AS(apply_move(base, Move::transport(3, 0)), InvalidMoveError);
        CHECK_THROWS_AS(apply_move(base, Move::transport(0, 4)), InvalidMoveError);
        CHECK_THROWS_AS(apply_move(base, Move::create(5)), InvalidMoveError);
        CobConfig c;
        c.vertex_count = 3;
        c.edges = {{1, 2, 1, 1}};
        c.points = {{0, 1}};
        CHECK_THROWS_AS(apply_move(c, Move::transport(0, 0)), InvalidMoveError);
    }
}

TEST_CASE("class values are invariant under moves") {
    Gen g(97);
    for (int t = 0; t < 1000; ++t) {
        CobConfig c = random_config(g);
        const ClassValue before = normalize_config(c);
        const std::size_t steps = g.index(51);
        for (std::size_t s = 0; s < steps; ++s) {
            if (auto next = try_move(c, random_move(g, c))) c = *next;
            CHECK(normalize_config(c) == before);
        }
    }
}

TEST_CASE("sign reversal: witness when twisted, unreachable when untwisted") {
    SUBCASE("twisted loop") {
        const CobConfig start = loop_config(-1, 1, {1});
        const auto witness = flip_witness(start, 0);
        REQUIRE(witness.has_value());
        CobConfig c = start;
        for (const Move& m : *witness) c = apply_move(c, m);
        CHECK(canonical_points(c) == canonical_points(loop_config(-1, 1, {-1})));
        CHECK(reachable(start, loop_config(-1, 1, {-1}), 3, 6));
    }
    SUBCASE("untwisted loop") {
        const CobConfig start = loop_config(-1, -1, {1});
        CHECK_FALSE(flip_witness(start, 0).has_value());
        for (std::size_t depth : {2u, 4u, 8u}) CHECK_FALSE(reachable(start, loop_config(-1, -1, {-1}), 5, depth));
    }
    SUBCASE("random graphs") {
        Gen g(101);
        for (int t = 0; t < 200; ++t) {
            CobConfig c = random_config(g);
            c.points = {{g.index(c.vertex_count), g.sign()}};
            CobConfig flipped = c;
            flipped.points[0].sign = -c.points[0].sign;
            const bool twisted = normalize_config(c).twisted;
            const auto witness = flip_witness(c, 0);
            CHECK(witness.has_value() == twisted);
            if (witness) {
                CobConfig d = c;
                for (const Move& m : *witness) d = apply_move(d, m);
                CHECK(canonical_points(d) == canonical_points(flipped));
            } else {
                CHECK(normalize_config(c) != normalize_config(flipped));
                CHECK_FALSE(reachable(c, flipped, 3, 5));
            }
        }
    }
}

TEST_CASE("cycle characters") {
    const CobConfig c = read_cob_config_file(std::string(OBSTRUKT_TEST_DATA) + "/untwisted_graph.cob");
    const auto [xi, eta] = cycle_characters(c);
    CHECK(xi.group == GroupKind::Free);
    CHECK(xi.values == std::vector<int>{1});
    CHECK(classify_pi0(xi, eta) == GroupTag::Z);
    CHECK(normalize_config(c).twisted == false);
    CHECK(graph_components(c).size() == 1);
}

TEST_CASE("configuration files") {
    const std::string dir = OBSTRUKT_TEST_DATA;
    const CobConfig twisted = read_cob_config_file(dir + "/twisted_loop.cob");
    CHECK(normalize_config(twisted) == ClassValue{true, 1});
    const CobConfig two = read_cob_config_file(dir + "/two_components.cob");
    const auto comps = graph_components(two);
    REQUIRE(comps.size() == 2);
    CHECK(comps[1] == std::vector<std::size_t>{1, 2});
    const auto values = normalize_components(two);
    CHECK(values[0] == ClassValue{true, 1});
    CHECK(values[1] == ClassValue{false, 0});

    std::stringstream ss;
    write_cob_config(ss, two);
    const CobConfig back = read_cob_config(ss);
    CHECK(back.vertex_count == two.vertex_count);
    CHECK(back.points == two.points);
    REQUIRE(back.edges.size() == two.edges.size());
    for (std::size_t i = 0; i < back.edges.size(); ++i) {
        CHECK(back.edges[i].u == two.edges[i].u);
        CHECK(back.edges[i].w_xi == two.edges[i].w_xi);
        CHECK(back.edges[i].w_eta == two.edges[i].w_eta);
    }

    std::istringstream signs("vertices: 1\npoints:\n  0 +1\n  0 -1\n  0 -\n");
    CHECK(normalize_config(read_cob_config(signs)) == ClassValue{false, -1});
    std::istringstream bad_sign("vertices: 1\npoints:\n  0 2\n");
    CHECK_THROWS_AS(read_cob_config(bad_sign), InputError);
    std::istringstream no_vertices("points:\n  0 +\n");
    CHECK_THROWS_AS(read_cob_config(no_vertices), InputError);
    std::istringstream unknown("vertices: 1\ncolour: red\n");
    CHECK_THROWS_AS(read_cob_config(unknown), InputError);
}
