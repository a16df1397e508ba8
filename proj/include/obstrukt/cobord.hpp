#pragma once

// Sign characters of small permutation representations and the pi_0
// classification of twisted 0-dimensional cobordism, with a combinatorial
// model: signed points on a graph whose edges carry two sign labels.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "obstrukt/numkit.hpp"

namespace obstrukt {

// Sigma2 has one generator (the swap); Sigma3 has s1 = (1 2) and s2 = (2 3);
// Free is a free group of the given rank (cycle basis of a graph).
enum class GroupKind { Sigma2, Sigma3, Free };

std::string to_string(GroupKind kind);

struct SignRepresentation {
    GroupKind group = GroupKind::Sigma2;
    std::vector<RealMatrix> generators;

    std::size_t dimension() const { return generators.empty() ? 0 : generators.front().rows(); }
};

// Throws InputError when the generator count, shapes or group relations
// (s^2 = I, (s1 s2)^3 = I for Sigma3) fail within 1e-9.
void validate_representation(const SignRepresentation& rep);

// Sigma3 on k copies of {t1 + t2 + t3 = 0}, basis (1,-1,0), (1,0,-1) per copy.
SignRepresentation rep_P(std::size_t copies);

// Sigma2 acting by -1 on R^copies.
SignRepresentation rep_L(std::size_t copies = 1);

SignRepresentation trivial_rep(GroupKind group, std::size_t dim = 1);

SignRepresentation direct_sum(const SignRepresentation& a, const SignRepresentation& b);

struct OrientationCharacter {
    GroupKind group = GroupKind::Sigma2;
    std::vector<int> values;  // +1 or -1 per generator

    bool operator==(const OrientationCharacter&) const = default;
};

// Sign of the determinant on each generator. For Sigma3 the three
// transpositions s1, s2, s1 s2 s1 must agree. Throws
// DegenerateRepresentationError on a singular generator and
// NotACharacterError on inconsistent signs.
OrientationCharacter orientation_character(const SignRepresentation& rep);

// Sign of the block swap of a transposition acting on (R^m)^points, points in {2, 3}.
OrientationCharacter tangent_block_character(std::size_t m, std::size_t points = 3);

OrientationCharacter character_product(const OrientationCharacter& a, const OrientationCharacter& b);

enum class GroupTag { Z, Z2 };

std::string to_string(GroupTag tag);

// Z when the characters agree on every generator, Z2 otherwise. Throws
// InputError when the groups differ.
GroupTag classify_pi0(const OrientationCharacter& w_xi, const OrientationCharacter& w_eta);

// Optional hook that may alter rep_P(3k+2) before its character is taken.
using RepresentationHook = std::function<void(SignRepresentation&)>;

// classify_pi0 of w(rep_P(3k+2)) against the tangent block character of
// 2k+1 dimensional blocks on three points.
GroupTag knotting_group(std::size_t k, const RepresentationHook& hook = {});

struct KnottingRow {
    std::size_t k = 0;
    int w_plane = 0;    // character of (3k+2) P on a transposition
    int w_tangent = 0;  // character of the tangent blocks on a transposition
    GroupTag group = GroupTag::Z;
};

std::vector<KnottingRow> knotting_table(std::size_t kmax, const RepresentationHook& hook = {});

// Combinatorial model of 0-dimensional twisted cobordism over a graph.

struct CobEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    int w_xi = 1;
    int w_eta = 1;

    int twist() const { return w_xi * w_eta; }
};

struct SignedPoint {
    std::size_t vertex = 0;
    int sign = 1;

    auto operator<=>(const SignedPoint&) const = default;
};

struct CobConfig {
    std::size_t vertex_count = 0;
    std::vector<CobEdge> edges;
    std::vector<SignedPoint> points;
};

// Throws InputError for out-of-range vertices, signs outside {+1, -1} or an
// empty vertex set. Connectivity is not required here.
void validate_config(const CobConfig& c);

// Points sorted; two configurations are the same element iff these agree.
std::vector<SignedPoint> canonical_points(const CobConfig& c);

// Connected components as sorted vertex lists, ordered by smallest vertex.
std::vector<std::vector<std::size_t>> graph_components(const CobConfig& c);

// Characters of w_xi and w_eta on the fundamental cycles of a BFS spanning
// tree (free group, one generator per non-tree edge). Requires a connected graph.
std::pair<OrientationCharacter, OrientationCharacter> cycle_characters(const CobConfig& c);

struct ClassValue {
    bool twisted = false;  // the product character is non-trivial on some cycle
    long value = 0;        // signed count, or total count mod 2 when twisted

    GroupTag tag() const { return twisted ? GroupTag::Z2 : GroupTag::Z; }
    bool operator==(const ClassValue&) const = default;
};

// Complete invariant of the configuration. Throws InputError when the graph
// is disconnected.
ClassValue normalize_config(const CobConfig& c);

// One class per connected component, in graph_components order.
std::vector<ClassValue> normalize_components(const CobConfig& c);

enum class MoveKind { Create, Annihilate, Transport };

struct Move {
    MoveKind kind = MoveKind::Create;
    std::size_t vertex = 0;  // Create, Annihilate
    std::size_t point = 0;   // Transport: index into points
    std::size_t edge = 0;    // Transport: index into edges

    static Move create(std::size_t vertex) { return {MoveKind::Create, vertex, 0, 0}; }
    static Move annihilate(std::size_t vertex) { return {MoveKind::Annihilate, vertex, 0, 0}; }
    static Move transport(std::size_t point, std::size_t edge) { return {MoveKind::Transport, 0, point, edge}; }
};

// Create appends (+, -) at the vertex; Annihilate removes the first + and the
// first - at the vertex; Transport moves a point across an incident edge and
// flips its sign iff w_xi(e) != w_eta(e). Throws InvalidMoveError.
CobConfig apply_move(const CobConfig& c, const Move& move);

// Moves that carry points[point] once around a cycle with non-trivial product
// character, returning it to its vertex with the opposite sign. Empty when the
// component of that point is untwisted.
std::optional<std::vector<Move>> flip_witness(const CobConfig& c, std::size_t point);

// Structured text: `vertices: N`, then `edges:` lines `u v w_xi w_eta`, then
// `points:` lines `vertex sign` with sign one of + - +1 -1.
CobConfig read_cob_config(std::istream& in);
CobConfig read_cob_config_file(const std::string& path);
void write_cob_config(std::ostream& out, const CobConfig& c);

}  // namespace obstrukt
