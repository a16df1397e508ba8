#include "obstrukt/pairmaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "obstrukt/error.hpp"

namespace obstrukt {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void require_blocks(std::span<const double> v, std::span<const double> w) {
    if (v.size() != w.size() || v.empty()) {
        throw ShapeError("alpha: v and w must be non-empty and of equal length");
    }
}

// Last-coordinate basis vector scaled by c, in R^n.
RealVector axis_point(std::size_t n, double c) {
    RealVector p(n, 0.0);
    p.back() = c;
    return p;
}

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

}  // namespace

std::string to_string(AlphaVariant variant) {
    switch (variant) {
        case AlphaVariant::Sphere: return "sphere";
        case AlphaVariant::Half: return "half";
        case AlphaVariant::NegHalf: return "neg_half";
    }
    return "?";
}

RealVector alpha_value(AlphaVariant variant, std::span<const double> v, std::span<const double> w) {
    require_blocks(v, w);
    const std::size_t k = v.size();
    const double vv = dot(v, v);
    const double ww = dot(w, w);
    RealVector out(k + 1);
    switch (variant) {
        case AlphaVariant::Sphere:
            for (std::size_t i = 0; i < k; ++i) out[i] = vv * w[i] + ww * v[i];
            out[k] = vv - ww;
            break;
        case AlphaVariant::Half:
            for (std::size_t i = 0; i < k; ++i) out[i] = w[i] + ww * (v[i] - w[i]);
            out[k] = 1.0 - 2.0 * ww;
            break;
        case AlphaVariant::NegHalf:
            for (std::size_t i = 0; i < k; ++i) out[i] = v[i] + vv * (w[i] - v[i]);
            out[k] = 2.0 * vv - 1.0;
            break;
    }
    return out;
}

RealVector eval_alpha(AlphaVariant variant, std::span<const double> v, std::span<const double> w) {
    require_blocks(v, w);
    if (!all_finite(v) || !all_finite(w)) throw DomainError("alpha: non-finite argument");
    const double r2 = dot(v, v) + dot(w, w);
    if (variant == AlphaVariant::Sphere) {
        if (std::abs(r2 - 1.0) > kDomainSlack) {
            throw DomainError("alpha: (v, w) is not on the unit sphere");
        }
    } else if (r2 > 1.0 + kDomainSlack) {
        throw DomainError("alpha: (v, w) lies outside the closed unit disk");
    }
    return alpha_value(variant, v, w);
}

PointConfig::PointConfig(std::size_t ambient_dim, std::vector<RealVector> points)
    : ambient_dim_(ambient_dim), points_(std::move(points)) {
    for (const auto& p : points_) {
        if (p.size() != ambient_dim_) throw ShapeError("point dimension differs from ambient dimension");
        if (!all_finite(p)) throw DomainError("configuration points must be finite");
    }
    if (points_.size() >= 2 && !(min_distance() > 0.0)) {
        throw DomainError("configuration points must be pairwise distinct");
    }
}

double PointConfig::min_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i)
        for (std::size_t j = i + 1; j < points_.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < ambient_dim_; ++k) {
                const double d = points_[i][k] - points_[j][k];
                s += d * d;
            }
            best = std::min(best, std::sqrt(s));
        }
    return best;
}

RealVector PairMapSpec::evaluate(std::size_t i, std::size_t j, std::span<const double> s) const {
    if (i >= label_count || j >= label_count) throw DomainError("pair map: label out of range");
    if (i == j) throw DomainError("pair map: labels must be distinct");
    if (s.size() != param_dim) throw ShapeError("pair map: wrong parameter size");
    return rule(i, j, s);
}

bool PairMapSpec::in_param_domain(std::span<const double> s) const {
    if (s.size() != param_dim) return false;
    if (param_dim == 0) return true;
    for (std::size_t k = 0; k < param_dim; ++k) {
        const auto& ax = param_box.axis(k);
        if (s[k] < ax.lo - kDomainSlack || s[k] > ax.hi + kDomainSlack) return false;
    }
    return !param_domain || param_domain(s);
}

namespace {

RealVector generator_rule(std::size_t n, std::size_t i, std::size_t j, std::span<const double> s) {
    const std::size_t k = n - 1;
    const auto v = s.subspan(0, k);
    const auto w = s.subspan(k, k);
    // Canonical cyclic pairs (0,1), (1,2), (2,0); the rest by antisymmetry.
    auto forward = [&](std::size_t a) -> RealVector {
        switch (a) {
            case 0: {
                RealVector out = alpha_value(AlphaVariant::Half, v, w);
                out.back() -= 0.5;
                return out;
            }
            case 1: return axis_point(n, 1.0);
            default: {
                RealVector out = alpha_value(AlphaVariant::NegHalf, v, w);
                for (double& x : out) x = -x;
                out.back() -= 0.5;
                return out;
            }
        }
    };
    if (j == (i + 1) % 3) return forward(i);
    RealVector out = forward(j);
    for (double& x : out) x = -x;
    return out;
}

bool in_unit_disk(std::span<const double> s) {
    return dot(s, s) <= 1.0 + kDomainSlack;
}

}  // namespace

PairMapSpec generator_family(std::size_t n) {
    if (n < 2) throw InputError("generator family needs n >= 2");
    PairMapSpec spec;
    spec.name = "builtin:generator";
    spec.kind = PairMapKind::Generator;
    spec.manifold_dim = 0;
    spec.target_dim = n;
    spec.label_count = 3;
    spec.param_dim = 2 * n - 2;
    spec.param_box = Box(std::vector<Interval>(spec.param_dim, Interval{-1.0, 1.0}));
    spec.param_domain = in_unit_disk;
    spec.rule = [n](std::size_t i, std::size_t j, std::span<const double> s) {
        return generator_rule(n, i, j, s);
    };
    return spec;
}

PairMapSpec generator_at(std::size_t n, std::span<const double> s) {
    if (n < 2) throw InputError("generator family needs n >= 2");
    if (s.size() != 2 * n - 2) throw ShapeError("generator parameter must have 2n - 2 entries");
    if (!all_finite(s) || !in_unit_disk(s)) throw DomainError("generator parameter outside the disk");
    PairMapSpec spec;
    spec.name = "builtin:generator";
    spec.kind = PairMapKind::Generator;
    spec.target_dim = n;
    spec.label_count = 3;
    spec.rule = [n, fixed = RealVector(s.begin(), s.end())](std::size_t i, std::size_t j,
                                                            std::span<const double>) {
        return generator_rule(n, i, j, fixed);
    };
    return spec;
}

PairMapSpec difference_map(const PointConfig& config, std::size_t target_dim) {
    if (config.ambient_dim() > target_dim) {
        throw InputError("difference map: point dimension exceeds target dimension");
    }
    PairMapSpec spec;
    spec.name = "builtin:difference";
    spec.kind = PairMapKind::Difference;
    spec.target_dim = target_dim;
    spec.label_count = config.size();
    spec.rule = [config, target_dim](std::size_t i, std::size_t j, std::span<const double>) {
        RealVector out(target_dim, 0.0);
        for (std::size_t k = 0; k < config.ambient_dim(); ++k) {
            out[k] = config.point(i)[k] - config.point(j)[k];
        }
        return out;
    };
    return spec;
}

PairMapSpec custom_pair_map(std::string name, std::size_t target_dim, std::size_t label_count,
                            PairRule rule) {
    PairMapSpec spec;
    spec.name = std::move(name);
    spec.kind = PairMapKind::Custom;
    spec.target_dim = target_dim;
    spec.label_count = label_count;
    spec.rule = std::move(rule);
    return spec;
}

RealVector eval_generator(std::size_t n, std::span<const double> s, std::size_t i, std::size_t j) {
    if (n < 2) throw InputError("generator family needs n >= 2");
    if (s.size() != 2 * n - 2) throw ShapeError("generator parameter must have 2n - 2 entries");
    if (!all_finite(s) || !in_unit_disk(s)) throw DomainError("generator parameter outside the disk");
    if (i > 2 || j > 2) throw DomainError("generator labels must lie in {0, 1, 2}");
    if (i == j) throw DomainError("generator labels must be distinct");
    return generator_rule(n, i, j, s);
}

HaltonSequence::HaltonSequence(std::size_t dim) {
    if (dim == 0 || dim > std::size(kPrimes)) throw InputError("Halton dimension out of range");
    bases_.assign(std::begin(kPrimes), std::begin(kPrimes) + static_cast<std::ptrdiff_t>(dim));
}

RealVector HaltonSequence::next() {
    RealVector out(bases_.size());
    for (std::size_t d = 0; d < bases_.size(); ++d) {
        const double base = bases_[d];
        double f = 1.0;
        double r = 0.0;
        std::size_t i = index_;
        while (i > 0) {
            f /= base;
            r += f * static_cast<double>(i % bases_[d]);
            i /= bases_[d];
        }
        out[d] = r;
    }
    ++index_;
    return out;
}

std::vector<RealVector> sample_parameters(const PairMapSpec& spec, std::size_t count) {
    std::vector<RealVector> out;
    if (spec.param_dim == 0) return out;
    HaltonSequence seq(spec.param_dim);
    const std::size_t max_tries = 1000 * count + 1000;
    for (std::size_t t = 0; t < max_tries && out.size() < count; ++t) {
        RealVector u = seq.next();
        for (std::size_t k = 0; k < spec.param_dim; ++k) {
            const auto& ax = spec.param_box.axis(k);
            u[k] = ax.lo + u[k] * (ax.hi - ax.lo);
        }
        if (spec.in_param_domain(u)) out.push_back(std::move(u));
    }
    return out;
}

IsovarianceReport check_isovariance(const PairMapSpec& spec, std::size_t sample_count, double tol) {
    if (sample_count < 1) throw InputError("check_isovariance: sample_count must be >= 1");
    std::vector<RealVector> params;
    if (spec.param_dim == 0) {
        params.emplace_back();
    } else {
        params = sample_parameters(spec, sample_count);
    }
    IsovarianceReport rep;
    rep.min_norm = std::numeric_limits<double>::infinity();
    for (const auto& s : params) {
        for (std::size_t i = 0; i < spec.label_count; ++i)
            for (std::size_t j = i + 1; j < spec.label_count; ++j) {
                const RealVector fij = spec.evaluate(i, j, s);
                const RealVector fji = spec.evaluate(j, i, s);
                RealVector sum(fij.size());
                for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = fij[k] + fji[k];
                rep.max_antisymmetry_defect = std::max(rep.max_antisymmetry_defect, norm2(sum));
                rep.min_norm = std::min({rep.min_norm, norm2(fij), norm2(fji)});
                rep.pairs_checked += 2;
            }
    }
    if (rep.pairs_checked == 0) rep.min_norm = 0.0;
    rep.passed = rep.pairs_checked > 0 && rep.max_antisymmetry_defect <= tol && rep.min_norm > 0.0;
    return rep;
}

Chart named_chart(const std::string& name, std::size_t target_dim) {
    if (target_dim < 2) throw InputError("chart target dimension must be >= 2");
    Chart chart;
    chart.name = name;
    chart.target_dim = target_dim;
    chart.period = 2.0 * std::numbers::pi;
    std::function<std::pair<double, double>(double)> planar;
    if (name == "circle") {
        planar = [](double t) { return std::pair{std::cos(t), std::sin(t)}; };
    } else if (name == "figure_eight") {
        planar = [](double t) { return std::pair{std::sin(2.0 * t), std::sin(t)}; };
    } else if (name == "limacon") {
        planar = [](double t) {
            const double r = 0.5 + std::cos(t);
            return std::pair{r * std::cos(t), r * std::sin(t)};
        };
    } else {
        throw InputError("unknown chart '" + name + "' (expected circle, figure_eight, limacon)");
    }
    chart.eval = [planar, target_dim](double t) {
        RealVector out(target_dim, 0.0);
        const auto [x, y] = planar(t);
        out[0] = x;
        out[1] = y;
        return out;
    };
    return chart;
}

IsovarianceReport check_isovariance(const Chart& chart, std::size_t sample_count, double tol) {
    if (sample_count < 1) throw InputError("check_isovariance: sample_count must be >= 1");
    HaltonSequence seq(2);
    IsovarianceReport rep;
    rep.min_norm = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < sample_count; ++t) {
        const RealVector u = seq.next();
        const double x = u[0] * chart.period;
        const double y = u[1] * chart.period;
        const double gap = std::abs(x - y);
        if (std::min(gap, chart.period - gap) < 1e-9 * chart.period) continue;
        const RealVector gx = chart.eval(x);
        const RealVector gy = chart.eval(y);
        RealVector fxy(gx.size());
        RealVector fyx(gx.size());
        for (std::size_t k = 0; k < gx.size(); ++k) {
            fxy[k] = gx[k] - gy[k];
            fyx[k] = gy[k] - gx[k];
        }
        RealVector sum(gx.size());
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = fxy[k] + fyx[k];
        rep.max_antisymmetry_defect = std::max(rep.max_antisymmetry_defect, norm2(sum));
        rep.min_norm = std::min(rep.min_norm, norm2(fxy));
        rep.pairs_checked += 2;
    }
    if (rep.pairs_checked == 0) rep.min_norm = 0.0;
    rep.passed = rep.pairs_checked > 0 && rep.max_antisymmetry_defect <= tol && rep.min_norm > 0.0;
    return rep;
}

namespace {

// Maps a Halton point to the unit sphere (Box-Muller directions) or, with one
// extra coordinate for the radius, to the closed disk.
RealVector halton_to_domain(std::span<const double> u, std::size_t dim, bool disk) {
    RealVector x(dim);
    for (std::size_t k = 0; k < dim; k += 2) {
        const double r = std::sqrt(-2.0 * std::log(u[k]));
        const double phi = 2.0 * std::numbers::pi * u[k + 1];
        x[k] = r * std::cos(phi);
        if (k + 1 < dim) x[k + 1] = r * std::sin(phi);
    }
    const double len = norm2(x);
    const double radius = disk ? std::pow(u[dim], 1.0 / static_cast<double>(dim)) : 1.0;
    for (double& c : x) c *= radius / len;
    return x;
}

RealVector project_to_domain(std::span<const double> u, bool disk) {
    RealVector x(u.begin(), u.end());
    const double len = norm2(x);
    if (len == 0.0) {
        if (!disk) x[0] = 1.0;
        return x;
    }
    if (!disk || len > 1.0) {
        for (double& c : x) c /= len;
    }
    return x;
}

double distance_at(AlphaVariant variant, std::span<const double> x, std::span<const double> target) {
    const std::size_t k = x.size() / 2;
    const RealVector a = alpha_value(variant, x.subspan(0, k), x.subspan(k, k));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - target[i]) * (a[i] - target[i]);
    return std::sqrt(s);
}

// Levenberg-Marquardt descent of ||alpha(P(u)) - target||, P the projection onto the domain.
double refine_distance(AlphaVariant variant, RealVector u, std::span<const double> target, bool disk) {
    const std::size_t k = u.size() / 2;
    const VectorMap residual = [&](std::span<const double> z) {
        const RealVector x = project_to_domain(z, disk);
        RealVector a = alpha_value(variant, std::span(x).subspan(0, k), std::span(x).subspan(k, k));
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= target[i];
        return a;
    };
    RealVector r = residual(u);
    double best = norm2(r);
    double mu = 1e-3;
    for (int it = 0; it < 200 && best > 1e-15; ++it) {
        const RealMatrix jac = jacobian_fd(residual, u, 1e-7);
        const std::size_t rows = jac.rows();
        const std::size_t cols = jac.cols();
        RealMatrix aug(rows + cols, cols);
        RealVector rhs(rows + cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) aug(i, j) = jac(i, j);
            rhs[i] = -r[i];
        }
        for (std::size_t j = 0; j < cols; ++j) aug(rows + j, j) = std::sqrt(mu);
        const auto step = solve_least_squares(aug, rhs);
        if (!step) break;
        RealVector trial = u;
        for (std::size_t j = 0; j < cols; ++j) trial[j] += (*step)[j];
        const RealVector rt = residual(trial);
        const double nt = norm2(rt);
        if (nt < best) {
            u = project_to_domain(trial, disk);
            r = residual(u);
            best = norm2(r);
            mu = std::max(mu * 0.3, 1e-12);
        } else {
            mu *= 10.0;
            if (mu > 1e8) break;
        }
    }
    return distance_at(variant, project_to_domain(u, disk), target);
}

}  // namespace

double sample_min_distance(AlphaVariant variant, std::size_t n, std::span<const double> target,
                           std::size_t sample_count) {
    if (n < 2) throw InputError("sample_min_distance: n must be >= 2");
    if (target.size() != n) throw ShapeError("sample_min_distance: target must lie in R^n");
    if (sample_count < 1000) throw InputError("sample_min_distance: sample_count must be >= 1000");
    const std::size_t dim = 2 * n - 2;
    const bool disk = variant != AlphaVariant::Sphere;
    HaltonSequence seq(disk ? dim + 1 : dim);

    constexpr std::size_t kRefined = 8;
    std::vector<std::pair<double, RealVector>> best;  // ascending by distance
    for (std::size_t t = 0; t < sample_count; ++t) {
        const RealVector u = seq.next();
        RealVector x = halton_to_domain(u, dim, disk);
        const double d = distance_at(variant, x, target);
        if (best.size() < kRefined || d < best.back().first) {
            best.emplace_back(d, std::move(x));
            std::sort(best.begin(), best.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (best.size() > kRefined) best.pop_back();
        }
    }
    double result = best.front().first;
    for (const auto& [d, x] : best) {
        result = std::min(result, refine_distance(variant, x, target, disk));
    }
    return result;
}

}  // namespace obstrukt
