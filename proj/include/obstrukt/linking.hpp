#pragma once

// Closed polygonal curves, preimage tracing on S^3, stereographic projection
// and two independent linking-number computations in R^3.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obstrukt/numkit.hpp"

namespace obstrukt {

inline constexpr double kProximityTol = 1e-6;
inline constexpr double kPoleClearance = 1e-3;

// Vertices in R^3 or R^4. Closed curves have an implicit edge from the last
// vertex back to the first; the first vertex is not repeated.
class PolyCurve {
public:
    PolyCurve(std::vector<RealVector> vertices, bool closed = true);

    std::size_t dimension() const { return vertices_.front().size(); }
    std::size_t size() const { return vertices_.size(); }
    std::size_t segment_count() const { return closed_ ? vertices_.size() : vertices_.size() - 1; }
    bool closed() const { return closed_; }
    const RealVector& vertex(std::size_t i) const { return vertices_[i]; }
    const std::vector<RealVector>& vertices() const { return vertices_; }
    double length() const;

    PolyCurve reversed() const;
    // Inserts the midpoint of every segment.
    PolyCurve refined() const;

private:
    std::vector<RealVector> vertices_;
    bool closed_;
};

struct TraceOptions {
    double step = 0.02;           // arc length per continuation step
    double tol = 1e-10;           // bound on ||map(vertex) - y|| and on | |x|^2 - 1 |
    std::size_t max_steps = 100000;
    std::size_t seed_grid = 9;    // grid nodes per axis over [-1, 1]^4
    double seed_tol = 1e-2;
};

// Traces the component of {x in S^3 : map(x) = y} through the best grid seed.
// map: R^4 -> R^3. Throws NotAttainedError when no seed refines onto the
// preimage and OpenCurveError when continuation does not close.
PolyCurve trace_preimage_curve(const VectorMap& map, std::span<const double> y,
                               const TraceOptions& options = {});

// Stereographic projection from pole p in S^3 onto the hyperplane orthogonal
// to p, in the orthonormal frame obtained from e1..e4 by Gram-Schmidt (the
// usual (x1, x2, x3) / (1 - x4) for p = e4). Throws PoleError, carrying a
// suggested pole, when p is within kPoleClearance of a vertex.
PolyCurve stereo_project(const PolyCurve& curve, std::span<const double> pole);

// A pole far from all the given curves, chosen from a fixed candidate list.
RealVector suggest_pole(std::span<const PolyCurve> curves);

// Minimum distance between the vertices of one curve and the segments of the other.
double curve_distance(const PolyCurve& a, const PolyCurve& b);

struct GaussOptions {
    double refine_tol = 1e-3;        // stop when successive estimates differ by less
    std::size_t max_subdivision = 64;
    unsigned threads = 1;
};

struct GaussResult {
    double value = 0.0;
    std::size_t subdivision = 1;     // midpoint nodes per segment at the accepted level
    double last_change = 0.0;
};

// Gauss double integral over closed curves in R^3. Throws ProximityError when
// the curves come within kProximityTol of each other.
GaussResult gauss_linking_detail(const PolyCurve& a, const PolyCurve& b, const GaussOptions& options = {});
double gauss_linking(const PolyCurve& a, const PolyCurve& b, const GaussOptions& options = {});

struct CrossingResult {
    int linking = 0;
    int signed_crossings = 0;         // sum over A-over-B and B-over-A crossings
    std::size_t crossings = 0;
    std::size_t perturbations = 0;    // direction changes needed for a generic diagram
    std::array<double, 3> direction{};
};

// Half the signed crossing count of the diagram seen from +direction. A
// crossing is positive when (over tangent x under tangent) . direction > 0.
// Throws ProjectionError when no generic direction is found in 100 perturbations.
CrossingResult crossing_linking_detail(const PolyCurve& a, const PolyCurve& b,
                                       std::span<const double> direction);
int crossing_linking(const PolyCurve& a, const PolyCurve& b, std::span<const double> direction);

// Largest vertex distance from the least-squares plane of a curve in R^3.
double plane_fit_residual(const PolyCurve& curve);

// One vertex per line, coordinates separated by whitespace; '#' starts a comment.
PolyCurve read_curve(std::istream& in, bool closed = true);
PolyCurve read_curve_file(const std::string& path, bool closed = true);
void write_curve(std::ostream& out, const PolyCurve& curve);

// The sphere alpha map for n = 3 as a map R^4 -> R^3, x = (v1, v2, w1, w2).
VectorMap alpha_map_n3();

inline constexpr std::array<double, 3> kDefaultProjectionDirection{0.31, -0.47, 0.83};

struct AlphaLinkingResult {
    PolyCurve upper;       // preimage of (0, 0, 1) on S^3
    PolyCurve lower;       // preimage of (0, 0, -1) on S^3
    RealVector pole;
    PolyCurve upper_r3;
    PolyCurve lower_r3;
    GaussResult gauss;
    CrossingResult crossing;
};

// Traces both preimages, projects them from a generic pole and links them.
AlphaLinkingResult alpha_preimage_linking(const TraceOptions& trace = {}, const GaussOptions& gauss = {});

}  // namespace obstrukt
