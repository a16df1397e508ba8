#include "obstrukt/linking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "obstrukt/error.hpp"
#include "obstrukt/pairmaps.hpp"
#include "obstrukt/parallel.hpp"

namespace obstrukt {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

RealVector sub(std::span<const double> a, std::span<const double> b) {
    RealVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

std::array<double, 3> to3(std::span<const double> v) { return {v[0], v[1], v[2]}; }

double point_segment_distance(std::span<const double> x, std::span<const double> p, std::span<const double> q) {
    const RealVector d = sub(q, p);
    const RealVector r = sub(x, p);
    const double dd = dot(d, d);
    const double t = dd > 0.0 ? std::clamp(dot(r, d) / dd, 0.0, 1.0) : 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = r[i] - t * d[i];
        s += e * e;
    }
    return std::sqrt(s);
}

void require_closed_r3(const PolyCurve& c, const char* what) {
    if (c.dimension() != 3) throw ShapeError(std::string(what) + ": curves must lie in R^3");
    if (!c.closed()) throw InputError(std::string(what) + ": curves must be closed");
}

}  // namespace

PolyCurve::PolyCurve(std::vector<RealVector> vertices, bool closed)
    : vertices_(std::move(vertices)), closed_(closed) {
    if (vertices_.size() < 8) throw InputError("curve needs at least 8 vertices");
    const std::size_t dim = vertices_.front().size();
    if (dim != 3 && dim != 4) throw ShapeError("curve vertices must lie in R^3 or R^4");
    for (const auto& v : vertices_) {
        if (v.size() != dim) throw ShapeError("curve vertices have mixed dimensions");
        if (!all_finite(v)) throw InputError("curve vertex is not finite");
    }
    for (std::size_t i = 0; i < segment_count(); ++i) {
        const auto& a = vertices_[i];
        const auto& b = vertices_[(i + 1) % vertices_.size()];
        if (max_abs_diff(a, b) == 0.0) {
            throw InputError(closed_ && i + 1 == vertices_.size()
                                 ? "closed curve repeats its first vertex at the end"
                                 : "consecutive curve vertices coincide");
        }
    }
}

double PolyCurve::length() const {
    double total = 0.0;
    for (std::size_t i = 0; i < segment_count(); ++i) {
        total += norm2(sub(vertices_[(i + 1) % size()], vertices_[i]));
    }
    return total;
}

PolyCurve PolyCurve::reversed() const {
    std::vector<RealVector> v(vertices_.rbegin(), vertices_.rend());
    return PolyCurve(std::move(v), closed_);
}

PolyCurve PolyCurve::refined() const {
    std::vector<RealVector> v;
    v.reserve(2 * size());
    for (std::size_t i = 0; i < size(); ++i) {
        v.push_back(vertices_[i]);
        if (i < segment_count()) {
            const auto& b = vertices_[(i + 1) % size()];
            RealVector m(dimension());
            for (std::size_t k = 0; k < m.size(); ++k) m[k] = 0.5 * (vertices_[i][k] + b[k]);
            v.push_back(std::move(m));
        }
    }
    return PolyCurve(std::move(v), closed_);
}

namespace {

struct Corrected {
    RealVector x;
    double residual = 0.0;
};

// Min-norm Gauss-Newton onto {H = 0}; stays close to the predictor.
Corrected correct(const VectorMap& h, RealVector x, double tol) {
    double res = norm2(h(x));
    for (int it = 0; it < 30 && res > 0.01 * tol; ++it) {
        const RealMatrix j = jacobian_fd(h, x);
        RealVector rhs = h(x);
        for (auto& r : rhs) r = -r;
        const RealVector dx = solve_min_norm(j, rhs);
        RealVector next(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) next[k] = x[k] + dx[k];
        const double next_res = norm2(h(next));
        if (!std::isfinite(next_res) || next_res >= res) break;
        x = std::move(next);
        res = next_res;
    }
    return {std::move(x), res};
}

struct Tangent {
    RealVector t;
    double gap = 0.0;  // second-smallest over largest eigenvalue of J^T J
};

Tangent tangent_at(const VectorMap& h, std::span<const double> x) {
    const RealMatrix j = jacobian_fd(h, x);
    const SymmetricEigen eig = symmetric_eigen(j.transposed() * j);
    Tangent out;
    out.t.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out.t[k] = eig.vectors(k, 0);
    const double n = norm2(out.t);
    for (auto& v : out.t) v /= n;
    out.gap = eig.values.back() > 0.0 ? eig.values[1] / eig.values.back() : 0.0;
    return out;
}

}  // namespace

PolyCurve trace_preimage_curve(const VectorMap& map, std::span<const double> y, const TraceOptions& options) {
    if (!(options.step > 0.0) || !(options.tol > 0.0)) throw InputError("trace: step and tol must be positive");
    const RealVector target(y.begin(), y.end());
    const VectorMap h = [&map, target](std::span<const double> x) {
        RealVector out = map(x);
        if (out.size() != target.size()) throw ShapeError("trace: map output does not match y");
        for (std::size_t k = 0; k < out.size(); ++k) out[k] -= target[k];
        out.push_back(dot(x, x) - 1.0);
        return out;
    };

    const Box box({{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}});
    auto seeds = grid_scan(h, box, options.seed_grid, options.seed_tol);
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const GridCandidate& a, const GridCandidate& b) { return a.residual < b.residual; });
    std::optional<RealVector> start;
    for (std::size_t i = 0; i < std::min<std::size_t>(seeds.size(), 16); ++i) {
        Corrected c = correct(h, seeds[i].point, options.tol);
        if (c.residual <= options.tol) {
            start = std::move(c.x);
            break;
        }
    }
    if (!start) throw NotAttainedError("trace: no point of the sphere maps onto the requested value");

    Tangent tan = tangent_at(h, *start);
    if (tan.gap < 1e-8) throw DomainError("trace: requested value is not regular at the seed");
    const auto lead = std::max_element(tan.t.begin(), tan.t.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*lead < 0.0) {
        for (auto& v : tan.t) v = -v;
    }

    const RealVector& x0 = *start;
    std::vector<RealVector> vertices{x0};
    RealVector x = x0;
    RealVector t = tan.t;
    double travelled = 0.0;
    for (std::size_t step = 0; step < options.max_steps; ++step) {
        const RealVector to_start = sub(x0, x);
        if (travelled > 2.0 * options.step && norm2(to_start) <= 1.5 * options.step && dot(to_start, t) > 0.0) {
            return PolyCurve(std::move(vertices), true);
        }
        double hstep = options.step;
        std::optional<Corrected> next;
        for (int halving = 0; halving < 10 && !next; ++halving, hstep *= 0.5) {
            RealVector pred(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) pred[k] = x[k] + hstep * t[k];
            Corrected c = correct(h, std::move(pred), options.tol);
            const RealVector moved = sub(c.x, x);
            if (c.residual <= options.tol && norm2(moved) <= 2.0 * hstep && dot(moved, t) > 0.0) {
                next = std::move(c);
            }
        }
        if (!next) throw OpenCurveError("trace: corrector failed to return to the preimage");
        Tangent nt = tangent_at(h, next->x);
        if (dot(nt.t, t) < 0.0) {
            for (auto& v : nt.t) v = -v;
        }
        travelled += norm2(sub(next->x, x));
        x = std::move(next->x);
        t = std::move(nt.t);
        vertices.push_back(x);
    }
    throw OpenCurveError("trace: continuation did not close within the step budget");
}

namespace {

// Orthonormal frame of the hyperplane orthogonal to p, positively oriented
// together with p.
std::array<RealVector, 3> tangent_frame(std::span<const double> p) {
    std::vector<RealVector> basis{RealVector(p.begin(), p.end())};
    for (std::size_t e = 0; e < 4 && basis.size() < 4; ++e) {
        RealVector v(4, 0.0);
        v[e] = 1.0;
        for (const auto& b : basis) {
            const double c = dot(v, b);
            for (std::size_t k = 0; k < 4; ++k) v[k] -= c * b[k];
        }
        const double n = norm2(v);
        if (n < 1e-6) continue;
        for (auto& c : v) c /= n;
        basis.push_back(std::move(v));
    }
    std::array<RealVector, 3> frame{basis[1], basis[2], basis[3]};
    RealMatrix m(4, 4);
    for (std::size_t k = 0; k < 4; ++k) {
        m(k, 0) = frame[0][k];
        m(k, 1) = frame[1][k];
        m(k, 2) = frame[2][k];
        m(k, 3) = p[k];
    }
    if (det_sign(m) < 0) {
        for (auto& c : frame[2]) c = -c;
    }
    return frame;
}

double min_vertex_distance(const PolyCurve& c, std::span<const double> p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : c.vertices()) best = std::min(best, norm2(sub(v, p)));
    return best;
}

}  // namespace

RealVector suggest_pole(std::span<const PolyCurve> curves) {
    std::vector<RealVector> candidates{{0.4, 0.3, -0.5, 0.7}, {-0.6, 0.2, 0.5, 0.3}, {0.1, -0.7, 0.2, -0.6},
                                       {0.5, 0.5, 0.5, 0.5},  {0.5, -0.5, 0.5, -0.5}};
    for (std::size_t e = 0; e < 4; ++e) {
        for (double s : {1.0, -1.0}) {
            RealVector v(4, 0.0);
            v[e] = s;
            candidates.push_back(std::move(v));
        }
    }
    RealVector best;
    double best_dist = -1.0;
    for (auto& c : candidates) {
        const double n = norm2(c);
        for (auto& x : c) x /= n;
        double d = std::numeric_limits<double>::infinity();
        for (const auto& curve : curves) d = std::min(d, min_vertex_distance(curve, c));
        if (d > best_dist) {
            best_dist = d;
            best = c;
        }
    }
    return best;
}

PolyCurve stereo_project(const PolyCurve& curve, std::span<const double> pole) {
    if (curve.dimension() != 4 || pole.size() != 4) throw ShapeError("stereo_project: curve and pole must lie in R^4");
    if (std::abs(norm2(pole) - 1.0) > 1e-9) throw DomainError("stereo_project: pole must lie on the unit sphere");
    if (min_vertex_distance(curve, pole) <= kPoleClearance) {
        const PolyCurve single[] = {curve};
        throw PoleError("stereo_project: pole lies on or too close to the curve", suggest_pole(single));
    }
    const auto frame = tangent_frame(pole);
    std::vector<RealVector> out;
    out.reserve(curve.size());
    for (const auto& x : curve.vertices()) {
        const double scale = 1.0 / (1.0 - dot(x, pole));
        out.push_back({scale * dot(x, frame[0]), scale * dot(x, frame[1]), scale * dot(x, frame[2])});
    }
    return PolyCurve(std::move(out), curve.closed());
}

double curve_distance(const PolyCurve& a, const PolyCurve& b) {
    if (a.dimension() != b.dimension()) throw ShapeError("curve_distance: dimension mismatch");
    double best = std::numeric_limits<double>::infinity();
    auto sweep = [&](const PolyCurve& p, const PolyCurve& q) {
        for (const auto& v : p.vertices()) {
            for (std::size_t j = 0; j < q.segment_count(); ++j) {
                best = std::min(best, point_segment_distance(v, q.vertex(j), q.vertex((j + 1) % q.size())));
            }
        }
    };
    sweep(a, b);
    sweep(b, a);
    return best;
}

namespace {

double gauss_sum(const PolyCurve& a, const PolyCurve& b, std::size_t sub_n, unsigned threads) {
    const std::size_t na = a.segment_count();
    const std::size_t nb = b.segment_count();
    std::vector<double> partial(na, 0.0);
    const double inv = 1.0 / static_cast<double>(sub_n);
    parallel_for(na, threads, [&](std::size_t i) {
        const auto pa = to3(a.vertex(i));
        const auto qa = to3(a.vertex((i + 1) % a.size()));
        const std::array<double, 3> da{(qa[0] - pa[0]) * inv, (qa[1] - pa[1]) * inv, (qa[2] - pa[2]) * inv};
        double acc = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            const auto pb = to3(b.vertex(j));
            const auto qb = to3(b.vertex((j + 1) % b.size()));
            const std::array<double, 3> db{(qb[0] - pb[0]) * inv, (qb[1] - pb[1]) * inv, (qb[2] - pb[2]) * inv};
            const auto c = cross(da, db);
            for (std::size_t k = 0; k < sub_n; ++k) {
                const double sa = (static_cast<double>(k) + 0.5);
                for (std::size_t l = 0; l < sub_n; ++l) {
                    const double sb = (static_cast<double>(l) + 0.5);
                    double r[3];
                    for (int m = 0; m < 3; ++m) r[m] = (pa[m] + sa * da[m]) - (pb[m] + sb * db[m]);
                    const double d2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
                    acc += (r[0] * c[0] + r[1] * c[1] + r[2] * c[2]) / (d2 * std::sqrt(d2));
                }
            }
        }
        partial[i] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total / (4.0 * std::numbers::pi);
}

}  // namespace

GaussResult gauss_linking_detail(const PolyCurve& a, const PolyCurve& b, const GaussOptions& options) {
    require_closed_r3(a, "gauss_linking");
    require_closed_r3(b, "gauss_linking");
    const double dist = curve_distance(a, b);
    if (dist <= kProximityTol) {
        throw ProximityError("gauss_linking: curves come within " + std::to_string(dist) + " of each other");
    }
    GaussResult out;
    out.value = gauss_sum(a, b, 1, options.threads);
    for (std::size_t s = 2; s <= options.max_subdivision; s *= 2) {
        const double next = gauss_sum(a, b, s, options.threads);
        out.last_change = std::abs(next - out.value);
        out.value = next;
        out.subdivision = s;
        if (out.last_change < options.refine_tol) break;
    }
    return out;
}

double gauss_linking(const PolyCurve& a, const PolyCurve& b, const GaussOptions& options) {
    return gauss_linking_detail(a, b, options).value;
}

namespace {

struct Diagram {
    bool generic = true;
    int signed_sum = 0;
    std::size_t crossings = 0;
};

Diagram diagram(const PolyCurve& a, const PolyCurve& b, const std::array<double, 3>& d) {
    std::array<double, 3> helper{1.0, 0.0, 0.0};
    if (std::abs(d[0]) > 0.6) helper = {0.0, 1.0, 0.0};
    const double hd = helper[0] * d[0] + helper[1] * d[1] + helper[2] * d[2];
    std::array<double, 3> e1{helper[0] - hd * d[0], helper[1] - hd * d[1], helper[2] - hd * d[2]};
    const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (auto& c : e1) c /= n1;
    const auto e2 = cross(d, e1);

    auto project = [&](std::span<const double> v) {
        return std::array<double, 3>{v[0] * e1[0] + v[1] * e1[1] + v[2] * e1[2],
                                     v[0] * e2[0] + v[1] * e2[1] + v[2] * e2[2],
                                     v[0] * d[0] + v[1] * d[1] + v[2] * d[2]};
    };
    std::vector<std::array<double, 3>> pa, pb;
    for (const auto& v : a.vertices()) pa.push_back(project(v));
    for (const auto& v : b.vertices()) pb.push_back(project(v));

    constexpr double eps = 1e-9;
    Diagram out;
    for (std::size_t i = 0; i < a.segment_count(); ++i) {
        const auto& p = pa[i];
        const auto& q = pa[(i + 1) % pa.size()];
        const double ax = q[0] - p[0], ay = q[1] - p[1];
        const double la = std::hypot(ax, ay);
        if (la < 1e-12) return {false, 0, 0};
        for (std::size_t j = 0; j < b.segment_count(); ++j) {
            const auto& r = pb[j];
            const auto& s = pb[(j + 1) % pb.size()];
            const double bx = s[0] - r[0], by = s[1] - r[1];
            const double lb = std::hypot(bx, by);
            if (lb < 1e-12) return {false, 0, 0};
            const double denom = ax * by - ay * bx;
            const double rx = r[0] - p[0], ry = r[1] - p[1];
            if (std::abs(denom) <= 1e-12 * la * lb) {
                // Parallel in the diagram: degenerate only if the lines overlap.
                if (std::abs(rx * ay - ry * ax) / la <= eps) return {false, 0, 0};
                continue;
            }
            const double t = (rx * by - ry * bx) / denom;
            const double u = (rx * ay - ry * ax) / denom;
            if (t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps) continue;
            if (t < eps || t > 1.0 - eps || u < eps || u > 1.0 - eps) return {false, 0, 0};
            const double ha = p[2] + t * (q[2] - p[2]);
            const double hb = r[2] + u * (s[2] - r[2]);
            if (std::abs(ha - hb) < 1e-12) return {false, 0, 0};
            // (T_A x T_B) . d equals the planar cross product because (e1, e2, d) is right-handed.
            const int orient = denom > 0.0 ? 1 : -1;
            out.signed_sum += ha > hb ? orient : -orient;
            ++out.crossings;
        }
    }
    if (out.signed_sum % 2 != 0) out.generic = false;
    return out;
}

}  // namespace

CrossingResult crossing_linking_detail(const PolyCurve& a, const PolyCurve& b, std::span<const double> direction) {
    require_closed_r3(a, "crossing_linking");
    require_closed_r3(b, "crossing_linking");
    if (direction.size() != 3) throw ShapeError("crossing_linking: direction must lie in R^3");
    const std::array<double, 3> base = to3(direction);
    if (norm2(base) == 0.0 || !all_finite(base)) throw InputError("crossing_linking: direction must be non-zero");
    for (std::size_t k = 0; k <= 100; ++k) {
        std::array<double, 3> d = base;
        if (k > 0) {
            const double kk = static_cast<double>(k);
            const std::array<double, 3> g{std::sin(1.1 * kk), std::cos(2.3 * kk), std::sin(3.7 * kk + 0.5)};
            for (int m = 0; m < 3; ++m) d[m] += 1e-3 * kk * g[m] * norm2(base);
        }
        const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        for (auto& c : d) c /= n;
        const Diagram dg = diagram(a, b, d);
        if (!dg.generic) continue;
        CrossingResult out;
        out.linking = dg.signed_sum / 2;
        out.signed_crossings = dg.signed_sum;
        out.crossings = dg.crossings;
        out.perturbations = k;
        out.direction = d;
        return out;
    }
    throw ProjectionError("crossing_linking: no generic projection found after 100 perturbations");
}

int crossing_linking(const PolyCurve& a, const PolyCurve& b, std::span<const double> direction) {
    return crossing_linking_detail(a, b, direction).linking;
}

double plane_fit_residual(const PolyCurve& curve) {
    if (curve.dimension() != 3) throw ShapeError("plane_fit_residual: curve must lie in R^3");
    RealVector c(3, 0.0);
    for (const auto& v : curve.vertices())
        for (std::size_t k = 0; k < 3; ++k) c[k] += v[k];
    for (auto& x : c) x /= static_cast<double>(curve.size());
    RealMatrix cov(3, 3);
    for (const auto& v : curve.vertices())
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) cov(i, j) += (v[i] - c[i]) * (v[j] - c[j]);
    const SymmetricEigen eig = symmetric_eigen(cov);
    const RealVector normal{eig.vectors(0, 0), eig.vectors(1, 0), eig.vectors(2, 0)};
    double worst = 0.0;
    for (const auto& v : curve.vertices()) worst = std::max(worst, std::abs(dot(sub(v, c), normal)));
    return worst;
}

PolyCurve read_curve(std::istream& in, bool closed) {
    std::vector<RealVector> vertices;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        RealVector v;
        std::string token;
        while (ss >> token) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(token, &used));
                if (used != token.size()) throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw InputError("curve line " + std::to_string(line_no) + ": not a number: " + token);
            }
        }
        if (!v.empty()) vertices.push_back(std::move(v));
    }
    return PolyCurve(std::move(vertices), closed);
}

PolyCurve read_curve_file(const std::string& path, bool closed) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open curve file: " + path);
    return read_curve(in, closed);
}

void write_curve(std::ostream& out, const PolyCurve& curve) {
    std::ostringstream line;
    line.precision(17);
    for (const auto& v : curve.vertices()) {
        line.str("");
        for (std::size_t k = 0; k < v.size(); ++k) line << (k ? " " : "") << v[k];
        out << line.str() << '\n';
    }
}

VectorMap alpha_map_n3() {
    return [](std::span<const double> x) {
        if (x.size() != 4) throw ShapeError("alpha (n = 3) expects a point of R^4");
        return alpha_value(AlphaVariant::Sphere, x.subspan(0, 2), x.subspan(2, 2));
    };
}

AlphaLinkingResult alpha_preimage_linking(const TraceOptions& trace, const GaussOptions& gauss) {
    const VectorMap alpha = alpha_map_n3();
    const RealVector up{0.0, 0.0, 1.0};
    const RealVector down{0.0, 0.0, -1.0};
    PolyCurve upper = trace_preimage_curve(alpha, up, trace);
    PolyCurve lower = trace_preimage_curve(alpha, down, trace);
    const PolyCurve both[] = {upper, lower};
    RealVector pole = suggest_pole(both);
    PolyCurve upper_r3 = stereo_project(upper, pole);
    PolyCurve lower_r3 = stereo_project(lower, pole);
    GaussResult g = gauss_linking_detail(upper_r3, lower_r3, gauss);
    CrossingResult c = crossing_linking_detail(upper_r3, lower_r3, kDefaultProjectionDirection);
    return {std::move(upper), std::move(lower), std::move(pole), std::move(upper_r3), std::move(lower_r3), g, c};
}

}  // namespace obstrukt
