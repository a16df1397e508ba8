#pragma once

// Triple-point obstruction of an isovariant pair map F and the double-point
// set of an immersed circle.
//
// For labels (x1, x2, x3) and positive weights a12, a31 the raw triple map is
//   F'(x, a) = (F(x2,x3) - a31 F(x3,x1), F(x2,x3) - a12 F(x1,x2)) = (f, g)
// and the symmetrized map is (f + g, f - g). Its zeros are the triples where
// the three pair vectors are positively parallel. Zeros are located on a
// grid in (s, log a12, log a31), refined by damped Newton, certified by the
// Jacobian rank in (s, a12, a31), and grouped into label-permutation orbits.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obstrukt/numkit.hpp"
#include "obstrukt/pairmaps.hpp"

namespace obstrukt {

// Positions of the three labels: labels[0] plays x1, labels[1] x2, labels[2] x3.
using LabelOrdering = std::array<std::size_t, 3>;
using Permutation3 = std::array<std::size_t, 3>;

struct TripleDomainPoint {
    LabelOrdering labels{0, 1, 2};
    double a12 = 1.0;
    double a31 = 1.0;
    RealVector s;  // family parameter, empty for a single map
};

// Throws DomainError for coincident or out-of-range labels and non-positive weights.
void validate_domain_point(const PairMapSpec& spec, const TripleDomainPoint& p);

// (f, g) concatenated, length 2n.
RealVector triple_map_raw(const PairMapSpec& spec, const TripleDomainPoint& p);

// (f + g, f - g) from a concatenated (f, g).
RealVector triple_map_sym(std::span<const double> raw);

RealVector triple_map(const PairMapSpec& spec, const TripleDomainPoint& p);

// The symmetrized map for one label ordering as a rule on (s, a12, a31).
VectorMap triple_system(const PairMapSpec& spec, const LabelOrdering& labels);

std::vector<double> domain_coordinates(const TripleDomainPoint& p);
TripleDomainPoint from_coordinates(const LabelOrdering& labels, std::span<const double> coords);

// Image of p under relabeling: position k of the result holds p.labels[tau[k]].
// The weights transform so that zeros map to zeros.
TripleDomainPoint relabel(const TripleDomainPoint& p, const Permutation3& tau);

// The transposition of x2 and x3.
TripleDomainPoint swap23(const TripleDomainPoint& p);

struct ZeroCertificate {
    TripleDomainPoint location;
    double residual = 0.0;
    std::size_t jacobian_rank = 0;
    double min_pivot = 0.0;
    bool converged = false;
    bool transversal = false;  // converged and rank == 2n
};

struct SuspectZero {
    TripleDomainPoint location;  // grid seed
    double grid_residual = 0.0;
    std::string reason;
};

struct CertifyOptions {
    double res_tol = 1e-10;
    double rel_pivot_tol = kDefaultRelativePivotTol;
    double fd_step = kDefaultFdStep;
};

ZeroCertificate certify_zero(const PairMapSpec& spec, const TripleDomainPoint& p,
                             const CertifyOptions& options = {});

struct TripleSearchOptions {
    double a_min = 1e-3;
    double a_max = 1e3;
    std::size_t grid = 7;      // nodes per axis
    double seed_tol = 1e-3;
    double res_tol = 1e-10;
    double rel_pivot_tol = kDefaultRelativePivotTol;
    double dedup_radius = 1e-6;
    std::size_t max_iter = 100;
    double fd_step = kDefaultFdStep;
    unsigned threads = 1;
};

struct TripleSearchResult {
    std::vector<ZeroCertificate> zeros;  // sorted by (labels, s, a12, a31)
    std::vector<SuspectZero> suspects;
    bool boundary_hit = false;           // a zero within 2 pitches of the a-box boundary
    std::size_t out_of_domain = 0;       // Newton limits outside the parameter domain or a-box
    std::size_t candidates = 0;
};

// All ordered triples of distinct labels are searched. Throws InputError when
// the system has more unknowns than equations.
TripleSearchResult find_triple_zeros(const PairMapSpec& spec, const TripleSearchOptions& options = {});

struct OrbitPartition {
    std::vector<std::vector<std::size_t>> sigma2_orbits;  // orbits of the x2 <-> x3 swap
    std::vector<std::vector<std::size_t>> sigma3_orbits;  // orbits of all relabelings
    std::size_t quotient_size() const { return sigma3_orbits.size(); }
};

// Throws ConsistencyError when a relabeled image of some zero is missing.
OrbitPartition symmetry_orbits(std::span<const ZeroCertificate> zeros, double tol = 1e-6);

enum class OrientationConvention { None, JacobianDeterminant };

struct ZeroDimClass {
    std::size_t count = 0;  // |Z|
    int mod2 = 0;
    std::optional<long> signed_count;
};

struct ObstructionReport {
    std::string map_name;
    std::size_t target_dim = 0;
    std::size_t manifold_dim = 0;
    std::size_t param_dim = 0;
    int expected_dimension = 0;  // 3m - 2n + 2
    int total_dimension = 0;     // plus the family parameter dimension
    TripleSearchResult search;
    OrbitPartition orbits;
    std::vector<std::size_t> representatives;  // one zero index per quotient point
    std::optional<ZeroDimClass> zero_dim_class;
    std::optional<std::string> consistency_error;
};

ObstructionReport compute_obstruction(const PairMapSpec& spec, const TripleSearchOptions& options = {},
                                      OrientationConvention convention = OrientationConvention::None);

struct DoublePoint {
    double x = 0.0;  // x < y, both in [0, period)
    double y = 0.0;
    double residual = 0.0;
    std::size_t jacobian_rank = 0;
    double min_pivot = 0.0;
    bool converged = false;
    bool transversal = false;  // rank == min(2, n): an isolated, transverse crossing
};

struct SuspectDoublePoint {
    double x = 0.0;
    double y = 0.0;
    double residual = 0.0;
    std::string reason;
};

struct DoublePointOptions {
    double margin = 0.0;  // excluded diagonal band; 0 selects period / 50
    std::size_t grid = 96;
    double seed_tol = 1e-3;
    double res_tol = 1e-10;
    double rel_pivot_tol = kDefaultRelativePivotTol;
    double dedup_radius = 1e-6;
    std::size_t max_iter = 100;
    double fd_step = kDefaultFdStep;
    unsigned threads = 1;
};

struct DoublePointResult {
    std::vector<DoublePoint> points;  // unordered pairs, sorted by (x, y)
    std::vector<SuspectDoublePoint> suspects;
    std::size_t diagonal_hits = 0;    // Newton limits on the diagonal itself
    int expected_dimension = 0;       // 2m - n
};

DoublePointResult double_point_zeros(const Chart& chart, const DoublePointOptions& options = {});

// Pairs i < j of a finite configuration whose images coincide within tol.
std::vector<std::pair<std::size_t, std::size_t>> double_points_finite(
    std::span<const RealVector> images, double tol = 1e-12);

// 2m - n for order 2, 3m - 2n + 2 for order 3. Requires n > m.
int expected_dimension(int m, int n, int order);

// Cyclic distance between two parameters on a circle of the given period.
double cyclic_distance(double a, double b, double period);

}  // namespace obstrukt
