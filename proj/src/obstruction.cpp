#include "obstrukt/obstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "obstrukt/error.hpp"
#include "obstrukt/parallel.hpp"

namespace obstrukt {

namespace {

constexpr std::array<Permutation3, 6> kAllPermutations{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

bool coords_less(const TripleDomainPoint& a, const TripleDomainPoint& b) {
    if (a.labels != b.labels) return a.labels < b.labels;
    const auto ca = domain_coordinates(a);
    const auto cb = domain_coordinates(b);
    return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
}

}  // namespace

void validate_domain_point(const PairMapSpec& spec, const TripleDomainPoint& p) {
    for (std::size_t k = 0; k < 3; ++k) {
        if (p.labels[k] >= spec.label_count) throw DomainError("triple map: label out of range");
    }
    if (p.labels[0] == p.labels[1] || p.labels[1] == p.labels[2] || p.labels[0] == p.labels[2]) {
        throw DomainError("triple map: labels must be pairwise distinct");
    }
    if (!(p.a12 > 0.0) || !(p.a31 > 0.0) || !std::isfinite(p.a12) || !std::isfinite(p.a31)) {
        throw DomainError("triple map: weights a12, a31 must be positive and finite");
    }
    if (p.s.size() != spec.param_dim) throw ShapeError("triple map: wrong parameter size");
}

namespace {

RealVector raw_unchecked(const PairMapSpec& spec, const TripleDomainPoint& p) {
    const auto [x1, x2, x3] = p.labels;
    const RealVector f23 = spec.rule(x2, x3, p.s);
    const RealVector f31 = spec.rule(x3, x1, p.s);
    const RealVector f12 = spec.rule(x1, x2, p.s);
    const std::size_t n = f23.size();
    RealVector out(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = f23[k] - p.a31 * f31[k];
        out[n + k] = f23[k] - p.a12 * f12[k];
    }
    return out;
}

}  // namespace

RealVector triple_map_raw(const PairMapSpec& spec, const TripleDomainPoint& p) {
    validate_domain_point(spec, p);
    return raw_unchecked(spec, p);
}

RealVector triple_map_sym(std::span<const double> raw) {
    if (raw.size() % 2 != 0) throw ShapeError("triple_map_sym: odd-length input");
    const std::size_t n = raw.size() / 2;
    RealVector out(raw.size());
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = raw[k] + raw[n + k];
        out[n + k] = raw[k] - raw[n + k];
    }
    return out;
}

RealVector triple_map(const PairMapSpec& spec, const TripleDomainPoint& p) {
    return triple_map_sym(triple_map_raw(spec, p));
}

std::vector<double> domain_coordinates(const TripleDomainPoint& p) {
    std::vector<double> c(p.s.begin(), p.s.end());
    c.push_back(p.a12);
    c.push_back(p.a31);
    return c;
}

TripleDomainPoint from_coordinates(const LabelOrdering& labels, std::span<const double> coords) {
    if (coords.size() < 2) throw ShapeError("triple coordinates need at least (a12, a31)");
    TripleDomainPoint p;
    p.labels = labels;
    p.s.assign(coords.begin(), coords.end() - 2);
    p.a12 = coords[coords.size() - 2];
    p.a31 = coords[coords.size() - 1];
    return p;
}

VectorMap triple_system(const PairMapSpec& spec, const LabelOrdering& labels) {
    TripleDomainPoint probe;
    probe.labels = labels;
    probe.s.assign(spec.param_dim, 0.0);
    validate_domain_point(spec, probe);
    return [&spec, labels](std::span<const double> coords) {
        // Finite differences may step to non-positive weights near the boundary;
        // the formula is polynomial in a, so evaluate it unchecked.
        return triple_map_sym(raw_unchecked(spec, from_coordinates(labels, coords)));
    };
}

TripleDomainPoint relabel(const TripleDomainPoint& p, const Permutation3& tau) {
    // Weight of the unordered position pair {i, j}: the common direction equals
    // weight * F(x_i, x_j) along the cyclic order 1 -> 2 -> 3 -> 1.
    auto weight = [&](std::size_t i, std::size_t j) {
        const std::size_t lo = std::min(i, j);
        const std::size_t hi = std::max(i, j);
        if (lo == 1 && hi == 2) return 1.0;
        if (lo == 0 && hi == 2) return p.a31;
        return p.a12;
    };
    TripleDomainPoint q;
    for (std::size_t k = 0; k < 3; ++k) q.labels[k] = p.labels[tau[k]];
    const double base = weight(tau[1], tau[2]);
    q.a31 = weight(tau[2], tau[0]) / base;
    q.a12 = weight(tau[0], tau[1]) / base;
    q.s = p.s;
    return q;
}

TripleDomainPoint swap23(const TripleDomainPoint& p) { return relabel(p, {0, 2, 1}); }

ZeroCertificate certify_zero(const PairMapSpec& spec, const TripleDomainPoint& p,
                             const CertifyOptions& options) {
    validate_domain_point(spec, p);
    ZeroCertificate cert;
    cert.location = p;
    const VectorMap system = triple_system(spec, p.labels);
    const auto coords = domain_coordinates(p);
    const RealVector value = system(coords);
    cert.residual = norm2(value);
    const RealMatrix jac = jacobian_fd(system, coords, options.fd_step);
    const RankResult rank = matrix_rank(jac, relative_pivot_tol(jac, options.rel_pivot_tol));
    cert.jacobian_rank = rank.rank;
    cert.min_pivot = rank.min_pivot;
    cert.converged = cert.residual <= options.res_tol;
    cert.transversal = cert.converged && cert.jacobian_rank == 2 * spec.target_dim;
    return cert;
}

namespace {

enum class Outcome { Dropped, Zero, OutOfDomain, Suspect };

struct CandidateResult {
    Outcome outcome = Outcome::Dropped;
    ZeroCertificate cert;
    SuspectZero suspect;
};

std::vector<LabelOrdering> all_orderings(std::size_t labels) {
    std::vector<LabelOrdering> out;
    for (std::size_t i = 0; i < labels; ++i)
        for (std::size_t j = 0; j < labels; ++j)
            for (std::size_t k = 0; k < labels; ++k)
                if (i != j && j != k && i != k) out.push_back({i, j, k});
    return out;
}

}  // namespace

TripleSearchResult find_triple_zeros(const PairMapSpec& spec, const TripleSearchOptions& options) {
    if (!(options.a_min > 0.0) || !(options.a_max > options.a_min)) {
        throw InputError("a-box must satisfy 0 < a_min < a_max");
    }
    if (spec.label_count < 3) return {};
    const std::size_t unknowns = spec.param_dim + 2;
    const std::size_t equations = 2 * spec.target_dim;
    if (unknowns > equations) {
        throw InputError("triple system has more unknowns than equations; positive-dimensional "
                         "zero sets are not supported");
    }

    std::vector<Interval> axes;
    for (std::size_t k = 0; k < spec.param_dim; ++k) axes.push_back(spec.param_box.axis(k));
    const Interval log_a{std::log(options.a_min), std::log(options.a_max)};
    axes.push_back(log_a);
    axes.push_back(log_a);
    const Box box(axes);
    const double log_pitch = grid_pitch(log_a, options.grid);
    std::vector<double> pitch;
    for (const auto& ax : axes) pitch.push_back(grid_pitch(ax, options.grid));

    GridScanOptions scan;
    scan.threads = options.threads;
    if (spec.param_dim > 0) {
        scan.domain = [&spec](std::span<const double> u) { return spec.in_param_domain(u); };
        scan.domain_axes = spec.param_dim;
    }
    CertifyOptions cert_opts{options.res_tol, options.rel_pivot_tol, options.fd_step};

    auto to_natural = [&](std::span<const double> u) {
        RealVector c(u.begin(), u.end());
        c[spec.param_dim] = std::exp(u[spec.param_dim]);
        c[spec.param_dim + 1] = std::exp(u[spec.param_dim + 1]);
        return c;
    };

    TripleSearchResult result;
    for (const auto& labels : all_orderings(spec.label_count)) {
        const VectorMap natural = triple_system(spec, labels);
        const VectorMap chart = [&](std::span<const double> u) { return natural(to_natural(u)); };
        const auto seeds = grid_scan(chart, box, options.grid, options.seed_tol, scan);
        result.candidates += seeds.size();

        std::vector<CandidateResult> outcomes(seeds.size());
        parallel_for(seeds.size(), options.threads, [&](std::size_t c) {
            const auto& seed = seeds[c];
            const NewtonResult nr =
                newton_refine(chart, seed.point, options.max_iter, options.res_tol, options.fd_step);
            CandidateResult& out = outcomes[c];
            if (nr.converged) {
                const RealVector coords = to_natural(nr.x);
                const TripleDomainPoint p = from_coordinates(labels, coords);
                const bool in_box = nr.x[spec.param_dim] >= log_a.lo - 1e-12 &&
                                    nr.x[spec.param_dim] <= log_a.hi + 1e-12 &&
                                    nr.x[spec.param_dim + 1] >= log_a.lo - 1e-12 &&
                                    nr.x[spec.param_dim + 1] <= log_a.hi + 1e-12;
                if (!in_box || !spec.in_param_domain(p.s)) {
                    out.outcome = Outcome::OutOfDomain;
                    return;
                }
                out.outcome = Outcome::Zero;
                out.cert = certify_zero(spec, p, cert_opts);
            } else if (seed.residual <= options.seed_tol) {
                out.outcome = Outcome::Suspect;
                out.suspect.location = from_coordinates(labels, to_natural(seed.point));
                out.suspect.grid_residual = seed.residual;
                out.suspect.reason = "Newton failed from a near-zero grid node: " + nr.diagnostic;
            }
        });

        std::vector<ZeroCertificate> zeros;
        std::vector<std::pair<RealVector, SuspectZero>> suspects;
        for (std::size_t c = 0; c < outcomes.size(); ++c) {
            switch (outcomes[c].outcome) {
                case Outcome::Zero: zeros.push_back(outcomes[c].cert); break;
                case Outcome::OutOfDomain: ++result.out_of_domain; break;
                case Outcome::Suspect: suspects.emplace_back(seeds[c].point, outcomes[c].suspect); break;
                case Outcome::Dropped: break;
            }
        }
        std::sort(zeros.begin(), zeros.end(), [](const auto& a, const auto& b) {
            return coords_less(a.location, b.location);
        });
        std::vector<ZeroCertificate> unique;
        for (auto& z : zeros) {
            const auto cz = domain_coordinates(z.location);
            const bool dup = std::any_of(unique.begin(), unique.end(), [&](const ZeroCertificate& u) {
                return max_abs_diff(cz, domain_coordinates(u.location)) <= options.dedup_radius;
            });
            if (!dup) unique.push_back(std::move(z));
        }
        // A suspect seed next to a certified zero, or to an earlier suspect, adds nothing.
        std::vector<RealVector> kept_seeds;
        for (auto& [seed, sus] : suspects) {
            auto near = [&](std::span<const double> u) {
                for (std::size_t k = 0; k < u.size(); ++k)
                    if (std::abs(u[k] - seed[k]) > 2.0 * pitch[k]) return false;
                return true;
            };
            bool covered = std::any_of(kept_seeds.begin(), kept_seeds.end(),
                                       [&](const RealVector& u) { return near(u); });
            for (const auto& z : unique) {
                RealVector u = domain_coordinates(z.location);
                u[spec.param_dim] = std::log(u[spec.param_dim]);
                u[spec.param_dim + 1] = std::log(u[spec.param_dim + 1]);
                if (near(u)) covered = true;
            }
            if (covered) continue;
            kept_seeds.push_back(seed);
            result.suspects.push_back(std::move(sus));
        }
        for (const auto& z : unique) {
            for (double a : {z.location.a12, z.location.a31}) {
                const double la = std::log(a);
                if (la - log_a.lo <= 2.0 * log_pitch || log_a.hi - la <= 2.0 * log_pitch) {
                    result.boundary_hit = true;
                }
            }
        }
        result.zeros.insert(result.zeros.end(), unique.begin(), unique.end());
    }
    return result;
}

namespace {

bool same_zero(const TripleDomainPoint& a, const TripleDomainPoint& b, double tol) {
    if (a.labels != b.labels || a.s.size() != b.s.size()) return false;
    if (!a.s.empty() && max_abs_diff(a.s, b.s) > tol) return false;
    return std::abs(a.a12 - b.a12) <= tol * std::max(1.0, std::abs(a.a12)) &&
           std::abs(a.a31 - b.a31) <= tol * std::max(1.0, std::abs(a.a31));
}

std::size_t find_zero(std::span<const ZeroCertificate> zeros, const TripleDomainPoint& p, double tol) {
    for (std::size_t i = 0; i < zeros.size(); ++i)
        if (same_zero(zeros[i].location, p, tol)) return i;
    return zeros.size();
}

std::string describe(const TripleDomainPoint& p) {
    std::string out = "labels (";
    for (std::size_t k = 0; k < 3; ++k) out += (k ? " " : "") + std::to_string(p.labels[k] + 1);
    out += ") a12=" + std::to_string(p.a12) + " a31=" + std::to_string(p.a31);
    return out;
}

}  // namespace

OrbitPartition symmetry_orbits(std::span<const ZeroCertificate> zeros, double tol) {
    OrbitPartition out;
    std::vector<char> seen2(zeros.size(), 0);
    std::vector<char> seen3(zeros.size(), 0);
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        std::array<std::size_t, 6> images{};
        for (std::size_t t = 0; t < kAllPermutations.size(); ++t) {
            const TripleDomainPoint img = relabel(zeros[i].location, kAllPermutations[t]);
            const std::size_t j = find_zero(zeros, img, tol);
            if (j == zeros.size()) {
                throw ConsistencyError("zero list not closed under relabeling: image of " +
                                       describe(zeros[i].location) + " is missing (" +
                                       describe(img) + ")");
            }
            images[t] = j;
        }
        if (!seen2[i]) {
            std::vector<std::size_t> orbit{i};
            const std::size_t mirror = images[1];  // the x2 <-> x3 swap
            if (mirror != i) orbit.push_back(mirror);
            std::sort(orbit.begin(), orbit.end());
            for (auto k : orbit) seen2[k] = 1;
            out.sigma2_orbits.push_back(std::move(orbit));
        }
        if (!seen3[i]) {
            std::vector<std::size_t> orbit(images.begin(), images.end());
            std::sort(orbit.begin(), orbit.end());
            orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
            for (auto k : orbit) seen3[k] = 1;
            out.sigma3_orbits.push_back(std::move(orbit));
        }
    }
    return out;
}

ObstructionReport compute_obstruction(const PairMapSpec& spec, const TripleSearchOptions& options,
                                      OrientationConvention convention) {
    ObstructionReport rep;
    rep.map_name = spec.name;
    rep.target_dim = spec.target_dim;
    rep.manifold_dim = spec.manifold_dim;
    rep.param_dim = spec.param_dim;
    rep.expected_dimension = expected_dimension(static_cast<int>(spec.manifold_dim),
                                                static_cast<int>(spec.target_dim), 3);
    rep.total_dimension = rep.expected_dimension + static_cast<int>(spec.param_dim);
    rep.search = find_triple_zeros(spec, options);
    try {
        rep.orbits = symmetry_orbits(rep.search.zeros, options.dedup_radius * 10.0);
    } catch (const ConsistencyError& e) {
        rep.consistency_error = e.what();
        return rep;
    }
    for (const auto& orbit : rep.orbits.sigma3_orbits) rep.representatives.push_back(orbit.front());
    if (rep.total_dimension == 0) {
        ZeroDimClass cls;
        cls.count = rep.orbits.quotient_size();
        cls.mod2 = static_cast<int>(cls.count % 2);
        if (convention == OrientationConvention::JacobianDeterminant) {
            long total = 0;
            bool defined = true;
            for (auto idx : rep.representatives) {
                const auto& z = rep.search.zeros[idx];
                const VectorMap system = triple_system(spec, z.location.labels);
                const RealMatrix jac = jacobian_fd(system, domain_coordinates(z.location), options.fd_step);
                if (!jac.square()) {
                    defined = false;
                    break;
                }
                const int sign = det_sign(jac);
                if (sign == 0) {
                    defined = false;
                    break;
                }
                total += sign;
            }
            if (defined) cls.signed_count = total;
        }
        rep.zero_dim_class = cls;
    }
    return rep;
}

double cyclic_distance(double a, double b, double period) {
    double d = std::fmod(std::abs(a - b), period);
    return std::min(d, period - d);
}

namespace {

double canonical_angle(double t, double period) {
    double r = std::fmod(t, period);
    if (r < 0.0) r += period;
    if (period - r < 1e-12 * period) r = 0.0;
    return r;
}

}  // namespace

DoublePointResult double_point_zeros(const Chart& chart, const DoublePointOptions& options) {
    if (!(chart.period > 0.0)) throw InputError("chart period must be positive");
    const double period = chart.period;
    const double margin = options.margin > 0.0 ? options.margin : period / 50.0;
    if (margin >= period / 2.0) throw InputError("diagonal margin must be below half the period");
    const std::size_t n = chart.target_dim;

    DoublePointResult result;
    result.expected_dimension = expected_dimension(1, static_cast<int>(n), 2);

    const VectorMap diff = [&chart](std::span<const double> u) {
        RealVector gx = chart.eval(u[0]);
        const RealVector gy = chart.eval(u[1]);
        for (std::size_t k = 0; k < gx.size(); ++k) gx[k] -= gy[k];
        return gx;
    };
    const Box box({{0.0, period}, {0.0, period}});
    GridScanOptions scan;
    scan.threads = options.threads;
    scan.domain = [period, margin](std::span<const double> u) {
        return u[1] > u[0] && cyclic_distance(u[0], u[1], period) >= margin;
    };
    const auto seeds = grid_scan(diff, box, options.grid, options.seed_tol, scan);

    struct Outcome {
        int kind = 0;  // 0 dropped, 1 zero, 2 diagonal, 3 suspect
        DoublePoint point;
        SuspectDoublePoint suspect;
    };
    std::vector<Outcome> outcomes(seeds.size());
    parallel_for(seeds.size(), options.threads, [&](std::size_t c) {
        const auto& seed = seeds[c];
        const NewtonResult nr =
            newton_refine(diff, seed.point, options.max_iter, options.res_tol, options.fd_step);
        Outcome& out = outcomes[c];
        if (!nr.converged) {
            if (seed.residual <= options.seed_tol) {
                out.kind = 3;
                out.suspect = {seed.point[0], seed.point[1], seed.residual,
                               "Newton failed from a near-zero grid node: " + nr.diagnostic};
            }
            return;
        }
        double x = canonical_angle(nr.x[0], period);
        double y = canonical_angle(nr.x[1], period);
        if (x > y) std::swap(x, y);
        const double gap = cyclic_distance(x, y, period);
        if (gap < 1e-6 * period) {
            out.kind = 2;
            return;
        }
        if (gap < margin) {
            out.kind = 3;
            out.suspect = {x, y, nr.residual, "zero inside the diagonal margin"};
            return;
        }
        out.kind = 1;
        DoublePoint& dp = out.point;
        dp.x = x;
        dp.y = y;
        const std::array<double, 2> at{x, y};
        dp.residual = norm2(diff(at));
        const RealMatrix jac = jacobian_fd(diff, at, options.fd_step);
        const RankResult rank = matrix_rank(jac, relative_pivot_tol(jac, options.rel_pivot_tol));
        dp.jacobian_rank = rank.rank;
        dp.min_pivot = rank.min_pivot;
        dp.converged = dp.residual <= options.res_tol;
        dp.transversal = dp.converged && dp.jacobian_rank == std::min<std::size_t>(2, n);
    });

    std::vector<DoublePoint> found;
    for (const auto& o : outcomes) {
        if (o.kind == 1) found.push_back(o.point);
        if (o.kind == 2) ++result.diagonal_hits;
        if (o.kind == 3) result.suspects.push_back(o.suspect);
    }
    std::sort(found.begin(), found.end(),
              [](const DoublePoint& a, const DoublePoint& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    for (const auto& p : found) {
        const bool dup = std::any_of(result.points.begin(), result.points.end(), [&](const DoublePoint& q) {
            return cyclic_distance(p.x, q.x, period) <= options.dedup_radius &&
                   cyclic_distance(p.y, q.y, period) <= options.dedup_radius;
        });
        if (!dup) result.points.push_back(p);
    }
    // Suspects near a certified double point are artefacts of coarse seeding.
    std::erase_if(result.suspects, [&](const SuspectDoublePoint& s) {
        return std::any_of(result.points.begin(), result.points.end(), [&](const DoublePoint& p) {
            return std::min(cyclic_distance(s.x, p.x, period) + cyclic_distance(s.y, p.y, period),
                            cyclic_distance(s.x, p.y, period) + cyclic_distance(s.y, p.x, period)) <=
                   4.0 * grid_pitch({0.0, period}, options.grid);
        });
    });
    return result;
}

std::vector<std::pair<std::size_t, std::size_t>> double_points_finite(std::span<const RealVector> images,
                                                                      double tol) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j)
            if (max_abs_diff(images[i], images[j]) <= tol) out.emplace_back(i, j);
    return out;
}

int expected_dimension(int m, int n, int order) {
    if (m < 0 || n <= m) throw InputError("expected_dimension requires 0 <= m < n");
    switch (order) {
        case 2: return 2 * m - n;
        case 3: return 3 * m - 2 * n + 2;
        default: throw InputError("expected_dimension: order must be 2 or 3");
    }
}

}  // namespace obstrukt
