#pragma once

// Isovariant pair maps: antisymmetric rules (x, y) -> F(x, y) in R^n on pairs
// of distinct points of a finite configuration, optionally depending on a
// family parameter s. Also the alpha maps S^{2n-3} -> R^n used to build the
// generator family, and immersion charts of the circle.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obstrukt/numkit.hpp"

namespace obstrukt {

enum class AlphaVariant {
    Sphere,   // (|v|^2 w + |w|^2 v, |v|^2 - |w|^2) on the unit sphere
    Half,     // (w + |w|^2 (v - w), 1 - 2|w|^2) on the closed disk
    NegHalf,  // (v + |v|^2 (w - v), 2|v|^2 - 1) on the closed disk
};

inline constexpr double kDomainSlack = 1e-12;
inline constexpr double kDefaultAntisymmetryTol = 1e-9;

std::string to_string(AlphaVariant variant);

// Unchecked closed-form value; v and w must have equal length n - 1.
RealVector alpha_value(AlphaVariant variant, std::span<const double> v, std::span<const double> w);

// Checked evaluation. The sphere variant requires ||v|^2 + |w|^2 - 1| <= 1e-12;
// the disk variants require |v|^2 + |w|^2 <= 1 + 1e-12. Throws DomainError.
RealVector eval_alpha(AlphaVariant variant, std::span<const double> v, std::span<const double> w);

// Labeled points in R^m, pairwise distinct.
class PointConfig {
public:
    PointConfig(std::size_t ambient_dim, std::vector<RealVector> points);

    std::size_t ambient_dim() const { return ambient_dim_; }
    std::size_t size() const { return points_.size(); }
    const RealVector& point(std::size_t i) const { return points_[i]; }
    const std::vector<RealVector>& points() const { return points_; }
    double min_distance() const;

private:
    std::size_t ambient_dim_;
    std::vector<RealVector> points_;
};

enum class PairMapKind { Generator, Difference, Custom };

// Evaluation rule on ordered pairs of labels (0-based) and a family parameter.
using PairRule = std::function<RealVector(std::size_t i, std::size_t j, std::span<const double> s)>;

struct PairMapSpec {
    std::string name;
    PairMapKind kind = PairMapKind::Custom;
    std::size_t manifold_dim = 0;  // dimension of M; 0 for finite configurations
    std::size_t target_dim = 0;    // n
    std::size_t label_count = 0;   // number of configuration points
    std::size_t param_dim = 0;     // dimension of the family parameter s (0 = single map)
    Box param_box;                 // sampling/search box for s when param_dim > 0
    std::function<bool(std::span<const double>)> param_domain;  // null = whole box
    PairRule rule;

    // Checked evaluation: distinct in-range labels, parameter of the right size.
    RealVector evaluate(std::size_t i, std::size_t j, std::span<const double> s = {}) const;
    bool in_param_domain(std::span<const double> s) const;
};

// F_s on three labels for s = (v, w) in the disk D^{2n-2}:
//   F(x1, x2) = alpha_{1/2}(v, w) - (0, 1/2)
//   F(x2, x3) = (0, 1)
//   F(x3, x1) = (0, -1/2) - alpha_{-1/2}(v, w)
// reversed pairs by antisymmetry.
PairMapSpec generator_family(std::size_t n);

// The generator family frozen at one parameter value.
PairMapSpec generator_at(std::size_t n, std::span<const double> s);

// F(x_i, x_j) = p_i - p_j with the configuration padded by zeros into R^n.
PairMapSpec difference_map(const PointConfig& config, std::size_t target_dim);

PairMapSpec custom_pair_map(std::string name, std::size_t target_dim, std::size_t label_count,
                            PairRule rule);

// Checked generator evaluation with 0-based labels in {0, 1, 2}.
RealVector eval_generator(std::size_t n, std::span<const double> s, std::size_t i, std::size_t j);

struct IsovarianceReport {
    double max_antisymmetry_defect = 0.0;  // max ||F(x,y) + F(y,x)||
    double min_norm = 0.0;                 // min ||F(x,y)|| over distinct sampled pairs
    std::size_t pairs_checked = 0;
    bool passed = false;
};

IsovarianceReport check_isovariance(const PairMapSpec& spec, std::size_t sample_count,
                                    double tol = kDefaultAntisymmetryTol);

// Immersion of the circle R / period -> R^n.
struct Chart {
    std::string name;
    std::size_t target_dim = 0;
    double period = 0.0;
    std::function<RealVector(double)> eval;
};

// circle, figure_eight, limacon; target_dim >= 2 (extra coordinates are zero).
Chart named_chart(const std::string& name, std::size_t target_dim = 2);

// Antisymmetry and non-vanishing of the difference map of a chart.
IsovarianceReport check_isovariance(const Chart& chart, std::size_t sample_count,
                                    double tol = kDefaultAntisymmetryTol);

// Deterministic Halton sequence over [0, 1)^dim (index starts at 1).
class HaltonSequence {
public:
    explicit HaltonSequence(std::size_t dim);
    RealVector next();
    std::size_t dimension() const { return bases_.size(); }

private:
    std::vector<unsigned> bases_;
    std::size_t index_ = 1;
};

// Up to `count` Halton samples of a parameter box restricted to a domain.
std::vector<RealVector> sample_parameters(const PairMapSpec& spec, std::size_t count);

// Minimum of ||alpha(x) - target|| over a low-discrepancy sample of the
// variant's domain (sphere or disk in R^{2n-2}), tightened by a local
// least-squares descent from the best samples. Requires sample_count >= 1000.
double sample_min_distance(AlphaVariant variant, std::size_t n, std::span<const double> target,
                           std::size_t sample_count);

}  // namespace obstrukt
