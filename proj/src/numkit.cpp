#include "obstrukt/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "obstrukt/error.hpp"
#include "obstrukt/parallel.hpp"

namespace obstrukt {

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix entry count does not equal rows * cols");
    }
    if (!all_finite(data_)) throw DomainError("matrix entries must be finite");
}

RealMatrix RealMatrix::identity(std::size_t n) {
    RealMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

RealMatrix RealMatrix::transposed() const {
    RealMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

RealMatrix RealMatrix::operator*(const RealMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw ShapeError("matrix product: inner dimensions differ");
    RealMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

RealVector RealMatrix::operator*(std::span<const double> v) const {
    if (cols_ != v.size()) throw ShapeError("matrix-vector product: size mismatch");
    RealVector out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

double RealMatrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double RealMatrix::max_row_norm() const {
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) m = std::max(m, norm2(row(r)));
    return m;
}

RealMatrix block_diagonal(std::span<const RealMatrix> blocks) {
    std::size_t n = 0;
    for (const auto& b : blocks) {
        if (!b.square()) throw ShapeError("block_diagonal: blocks must be square");
        n += b.rows();
    }
    RealMatrix out(n, n);
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) out(offset + i, offset + j) = b(i, j);
        offset += b.rows();
    }
    return out;
}

Box::Box(std::vector<Interval> axes) : axes_(std::move(axes)) {
    for (const auto& a : axes_) {
        if (!(std::isfinite(a.lo) && std::isfinite(a.hi) && a.lo < a.hi)) {
            throw InputError("box axis needs finite lo < hi");
        }
    }
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double max_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("max_abs_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

RealMatrix jacobian_fd(const VectorMap& f, std::span<const double> x, double h) {
    if (!(h > 0.0)) throw InputError("finite-difference step must be positive");
    if (!all_finite(x)) throw DomainError("jacobian_fd: non-finite evaluation point");
    RealVector probe(x.begin(), x.end());
    RealMatrix jac;
    for (std::size_t j = 0; j < x.size(); ++j) {
        probe[j] = x[j] + h;
        const double up = probe[j];
        const RealVector fp = f(probe);
        probe[j] = x[j] - h;
        const double down = probe[j];
        const RealVector fm = f(probe);
        probe[j] = x[j];
        if (j == 0) jac = RealMatrix(fp.size(), x.size());
        if (fp.size() != jac.rows() || fm.size() != jac.rows()) {
            throw ShapeError("jacobian_fd: evaluation rule changed output size");
        }
        const double step = up - down;
        for (std::size_t i = 0; i < fp.size(); ++i) jac(i, j) = (fp[i] - fm[i]) / step;
    }
    return jac;
}

RankResult matrix_rank(const RealMatrix& a, double pivot_tol) {
    if (!(pivot_tol > 0.0)) throw InputError("pivot tolerance must be positive");
    RealMatrix w = a;
    const std::size_t rows = w.rows();
    const std::size_t cols = w.cols();
    RankResult out;
    out.min_pivot = std::numeric_limits<double>::infinity();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t best = r;
        for (std::size_t i = r + 1; i < rows; ++i)
            if (std::abs(w(i, c)) > std::abs(w(best, c))) best = i;
        const double pivot = w(best, c);
        if (std::abs(pivot) < pivot_tol) continue;
        if (best != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(w(best, j), w(r, j));
        for (std::size_t i = r + 1; i < rows; ++i) {
            const double factor = w(i, c) / pivot;
            if (factor == 0.0) continue;
            for (std::size_t j = c; j < cols; ++j) w(i, j) -= factor * w(r, j);
        }
        out.min_pivot = std::min(out.min_pivot, std::abs(pivot));
        ++r;
    }
    out.rank = r;
    if (r == 0) out.min_pivot = 0.0;
    return out;
}

double relative_pivot_tol(const RealMatrix& a, double rel) {
    const double scale = a.max_row_norm();
    return scale > 0.0 ? rel * scale : rel;
}

int det_sign(const RealMatrix& a) {
    if (!a.square()) throw ShapeError("det_sign needs a square matrix");
    const std::size_t n = a.rows();
    if (n == 0) return 1;
    const double threshold = 1e-12 * std::max(a.max_row_norm(), std::numeric_limits<double>::min());
    RealMatrix w = a;
    int sign = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(w(i, c)) > std::abs(w(best, c))) best = i;
        const double pivot = w(best, c);
        if (std::abs(pivot) < threshold) return 0;
        if (best != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w(best, j), w(c, j));
            sign = -sign;
        }
        if (pivot < 0.0) sign = -sign;
        for (std::size_t i = c + 1; i < n; ++i) {
            const double factor = w(i, c) / pivot;
            for (std::size_t j = c; j < n; ++j) w(i, j) -= factor * w(c, j);
        }
    }
    return sign;
}

std::optional<RealVector> solve_least_squares(const RealMatrix& a, std::span<const double> b,
                                              double rel_tol) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m < n) throw ShapeError("solve_least_squares: fewer equations than unknowns");
    if (b.size() != m) throw ShapeError("solve_least_squares: right-hand side size mismatch");
    RealMatrix r = a;
    RealVector y(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        double alpha = 0.0;
        for (std::size_t i = k; i < m; ++i) alpha += r(i, k) * r(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (r(k, k) > 0.0) alpha = -alpha;
        RealVector v(m - k);
        for (std::size_t i = k; i < m; ++i) v[i - k] = r(i, k);
        v[0] -= alpha;
        const double vnorm2 = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
        if (vnorm2 == 0.0) continue;
        for (std::size_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * r(i, j);
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < m; ++i) r(i, j) -= f * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i - k] * y[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < m; ++i) y[i] -= f * v[i - k];
    }
    double rmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) rmax = std::max(rmax, std::abs(r(k, k)));
    if (rmax == 0.0) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(r(k, k)) <= rel_tol * rmax) return std::nullopt;
    RealVector x(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double acc = y[k];
        for (std::size_t j = k + 1; j < n; ++j) acc -= r(k, j) * x[j];
        x[k] = acc / r(k, k);
    }
    return x;
}

SymmetricEigen symmetric_eigen(const RealMatrix& a) {
    if (!a.square()) throw ShapeError("symmetric_eigen needs a square matrix");
    const std::size_t n = a.rows();
    RealMatrix w = a;
    RealMatrix v = RealMatrix::identity(n);
    const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += w(p, q) * w(p, q);
        if (std::sqrt(off) <= 1e-15 * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (w(p, q) == 0.0) continue;
                const double theta = (w(q, q) - w(p, p)) / (2.0 * w(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double wkp = w(k, p);
                    const double wkq = w(k, q);
                    w(k, p) = c * wkp - s * wkq;
                    w(k, q) = s * wkp + c * wkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double wpk = w(p, k);
                    const double wqk = w(q, k);
                    w(p, k) = c * wpk - s * wqk;
                    w(q, k) = s * wpk + c * wqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return w(i, i) < w(j, j); });
    SymmetricEigen out{RealVector(n), RealMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = w(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

RealVector solve_min_norm(const RealMatrix& a, std::span<const double> b, double rel_tol) {
    if (b.size() != a.rows()) throw ShapeError("solve_min_norm: right-hand side size mismatch");
    const RealMatrix at = a.transposed();
    const SymmetricEigen eig = symmetric_eigen(at * a);
    const RealVector atb = at * b;
    const std::size_t n = a.cols();
    const double top = eig.values.empty() ? 0.0 : eig.values.back();
    const double cutoff = rel_tol * rel_tol * top;
    RealVector x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = eig.values[k];
        if (lambda <= cutoff || lambda <= 0.0) continue;
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += eig.vectors(i, k) * atb[i];
        const double coef = proj / lambda;
        for (std::size_t i = 0; i < n; ++i) x[i] += coef * eig.vectors(i, k);
    }
    return x;
}

NewtonResult newton_refine(const VectorMap& f, std::span<const double> x0, std::size_t max_iter,
                           double res_tol, double fd_step) {
    if (!(res_tol > 0.0)) throw InputError("residual tolerance must be positive");
    NewtonResult out;
    out.x.assign(x0.begin(), x0.end());
    RealVector fx = f(out.x);
    double r = all_finite(fx) ? norm2(fx) : std::numeric_limits<double>::infinity();
    if (!std::isfinite(r)) {
        out.residual = r;
        out.diagnostic = "non-finite residual at start point";
        return out;
    }
    for (; out.iterations < max_iter && r > res_tol; ++out.iterations) {
        const RealMatrix jac = jacobian_fd(f, out.x, fd_step);
        if (jac.rows() < jac.cols()) throw ShapeError("newton_refine: underdetermined system");
        RealVector rhs(fx.size());
        for (std::size_t i = 0; i < fx.size(); ++i) rhs[i] = -fx[i];
        const auto step = solve_least_squares(jac, rhs);
        if (!step) {
            out.diagnostic = "singular Jacobian";
            break;
        }
        double lambda = 1.0;
        bool accepted = false;
        RealVector trial(out.x.size());
        for (std::size_t k = 0; k <= kMaxDampingHalvings; ++k, lambda *= 0.5) {
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = out.x[i] + lambda * (*step)[i];
            RealVector ft;
            try {
                ft = f(trial);
            } catch (const Error&) {
                continue;
            }
            if (!all_finite(ft)) continue;
            const double rt = norm2(ft);
            if (rt < r) {
                out.x = trial;
                fx = std::move(ft);
                r = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.diagnostic = "residual did not decrease after damping";
            break;
        }
    }
    out.residual = r;
    out.converged = r <= res_tol;
    if (!out.converged && out.diagnostic.empty()) out.diagnostic = "iteration limit reached";
    return out;
}

double grid_pitch(const Interval& axis, std::size_t resolution) {
    return (axis.hi - axis.lo) / static_cast<double>(resolution - 1);
}

namespace {

double node_coordinate(const Interval& axis, std::size_t resolution, std::size_t i) {
    if (i + 1 == resolution) return axis.hi;
    return axis.lo + static_cast<double>(i) * grid_pitch(axis, resolution);
}

}  // namespace

std::vector<GridCandidate> grid_scan(const VectorMap& f, const Box& box,
                                     std::span<const std::size_t> resolution, double seed_tol,
                                     const GridScanOptions& options) {
    const std::size_t dim = box.dimension();
    if (dim == 0) throw InputError("grid_scan: empty box");
    if (resolution.size() != dim) throw InputError("grid_scan: one resolution per axis required");
    std::vector<std::size_t> stride(dim, 1);
    std::size_t total = 1;
    for (std::size_t k = dim; k-- > 0;) {
        if (resolution[k] < 2) throw InputError("grid_scan: resolution must be >= 2 per axis");
        stride[k] = total;
        if (total > (std::size_t{1} << 40) / resolution[k]) {
            throw InputError("grid_scan: grid too large");
        }
        total *= resolution[k];
    }

    // Phase 1: residual norms at in-domain nodes. When the domain depends only
    // on the leading axes it is evaluated once per prefix node.
    const unsigned threads = std::max(1u, options.threads);
    const std::size_t prefix_axes =
        (options.domain && options.domain_axes > 0 && options.domain_axes < dim) ? options.domain_axes : dim;
    const std::size_t suffix_count = prefix_axes < dim ? stride[prefix_axes - 1] : 1;
    const std::size_t prefix_total = total / suffix_count;

    std::vector<std::size_t> prefixes;
    {
        std::vector<std::size_t> idx(prefix_axes, 0);
        RealVector point(prefix_axes);
        for (std::size_t k = 0; k < prefix_axes; ++k) point[k] = node_coordinate(box.axis(k), resolution[k], 0);
        for (std::size_t pre = 0; pre < prefix_total; ++pre) {
            if (prefix_axes == dim || options.domain(point)) prefixes.push_back(pre);
            for (std::size_t k = prefix_axes; k-- > 0;) {
                if (++idx[k] < resolution[k]) {
                    point[k] = node_coordinate(box.axis(k), resolution[k], idx[k]);
                    break;
                }
                idx[k] = 0;
                point[k] = node_coordinate(box.axis(k), resolution[k], 0);
            }
        }
    }

    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads, prefixes.size()));
    std::vector<std::vector<std::pair<std::size_t, double>>> partial(chunks);
    const std::size_t chunk_len = (prefixes.size() + chunks - 1) / chunks;
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::size_t begin = c * chunk_len;
        const std::size_t end = std::min(prefixes.size(), begin + chunk_len);
        RealVector point(dim);
        auto& out = partial[c];
        for (std::size_t p = begin; p < end; ++p) {
            const std::size_t base = prefixes[p] * suffix_count;
            for (std::size_t off = 0; off < suffix_count; ++off) {
                const std::size_t lin = base + off;
                std::size_t rem = lin;
                for (std::size_t k = 0; k < dim; ++k) {
                    point[k] = node_coordinate(box.axis(k), resolution[k], rem / stride[k]);
                    rem %= stride[k];
                }
                if (prefix_axes == dim && options.domain && !options.domain(point)) continue;
                const RealVector value = f(point);
                const double n = all_finite(value) ? norm2(value) : std::numeric_limits<double>::infinity();
                out.emplace_back(lin, n);
            }
        }
    });
    std::vector<std::pair<std::size_t, double>> nodes;
    for (auto& p : partial) nodes.insert(nodes.end(), p.begin(), p.end());
    partial.clear();

    auto lookup = [&](std::size_t lin) -> const std::pair<std::size_t, double>* {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), lin,
                                   [](const auto& e, std::size_t v) { return e.first < v; });
        return (it != nodes.end() && it->first == lin) ? &*it : nullptr;
    };

    // Phase 2: select seeds and axis-wise strict local minima.
    std::vector<char> keep(nodes.size(), 0);
    parallel_for(nodes.size(), threads, [&](std::size_t n) {
        const auto [lin, value] = nodes[n];
        if (!std::isfinite(value)) return;
        if (value <= seed_tol) {
            keep[n] = 1;
            return;
        }
        bool any_neighbour = false;
        std::size_t rem = lin;
        for (std::size_t k = 0; k < dim; ++k) {
            const std::size_t i = rem / stride[k];
            rem %= stride[k];
            if (i > 0) {
                if (const auto* nb = lookup(lin - stride[k])) {
                    any_neighbour = true;
                    if (nb->second <= value) return;
                }
            }
            if (i + 1 < resolution[k]) {
                if (const auto* nb = lookup(lin + stride[k])) {
                    any_neighbour = true;
                    if (nb->second <= value) return;
                }
            }
        }
        if (any_neighbour) keep[n] = 1;
    });

    std::vector<GridCandidate> out;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (!keep[n]) continue;
        GridCandidate cand;
        cand.point.resize(dim);
        std::size_t rem = nodes[n].first;
        for (std::size_t k = 0; k < dim; ++k) {
            cand.point[k] = node_coordinate(box.axis(k), resolution[k], rem / stride[k]);
            rem %= stride[k];
        }
        cand.residual = nodes[n].second;
        out.push_back(std::move(cand));
    }
    return out;
}

std::vector<GridCandidate> grid_scan(const VectorMap& f, const Box& box, std::size_t resolution,
                                     double seed_tol, const GridScanOptions& options) {
    const std::vector<std::size_t> res(box.dimension(), resolution);
    return grid_scan(f, box, res, seed_tol, options);
}

}  // namespace obstrukt
