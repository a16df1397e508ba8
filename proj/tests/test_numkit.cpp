#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "obstrukt/error.hpp"
#include "obstrukt/numkit.hpp"
#include "obstrukt/pairmaps.hpp"
#include "obstrukt/parallel.hpp"
#include "test_support.hpp"

using namespace obstrukt;
using testing_support::Gen;

namespace {

// Hand-differentiated Jacobian of the sphere alpha map for n = 3 at x = (v, w).
RealMatrix alpha_jacobian_oracle(const RealVector& x) {
    const double v1 = x[0], v2 = x[1], w1 = x[2], w2 = x[3];
    const double vv = v1 * v1 + v2 * v2;
    const double ww = w1 * w1 + w2 * w2;
    RealMatrix j(3, 4);
    // First block: |v|^2 w + |w|^2 v.
    j(0, 0) = 2 * v1 * w1 + ww;
    j(0, 1) = 2 * v2 * w1;
    j(0, 2) = vv + 2 * w1 * v1;
    j(0, 3) = 2 * w2 * v1;
    j(1, 0) = 2 * v1 * w2;
    j(1, 1) = 2 * v2 * w2 + ww;
    j(1, 2) = 2 * w1 * v2;
    j(1, 3) = vv + 2 * w2 * v2;
    // Last coordinate: |v|^2 - |w|^2.
    j(2, 0) = 2 * v1;
    j(2, 1) = 2 * v2;
    j(2, 2) = -2 * w1;
    j(2, 3) = -2 * w2;
    return j;
}

double max_entry_diff(const RealMatrix& a, const RealMatrix& b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

RealMatrix permute_rows(const RealMatrix& a, const std::vector<std::size_t>& perm) {
    RealMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(perm[i], j);
    return out;
}

// Determinant by cofactor expansion, used only as an oracle on small matrices.
double det_oracle(const RealMatrix& a) {
    const std::size_t n = a.rows();
    if (n == 1) return a(0, 0);
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        RealMatrix minor(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i) {
            std::size_t cc = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == c) continue;
                minor(i - 1, cc++) = a(i, j);
            }
        }
        total += ((c % 2 == 0) ? 1.0 : -1.0) * a(0, c) * det_oracle(minor);
    }
    return total;
}

}  // namespace

TEST_CASE("matrix basics") {
    const RealMatrix a(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(a.transposed()(2, 1) == 6);
    const RealMatrix p = a * a.transposed();
    CHECK(p(0, 0) == 14);
    CHECK(p(0, 1) == 32);
    CHECK(p(1, 1) == 77);
    const RealVector v{1, 1, 1};
    CHECK(a * v == RealVector{6, 15});
    CHECK(a.max_abs() == 6);
    CHECK_THROWS_AS(RealMatrix(2, 2, {1, 2, 3}), ShapeError);
    const RealMatrix blocks[] = {RealMatrix::identity(1), RealMatrix(2, 2, {1, 2, 3, 4})};
    const RealMatrix d = block_diagonal(blocks);
    CHECK(d.rows() == 3);
    CHECK(d(0, 0) == 1);
    CHECK(d(2, 1) == 3);
    CHECK(d(0, 2) == 0);
}

TEST_CASE("box requires lo < hi") {
    CHECK_NOTHROW(Box({{0.0, 1.0}}));
    CHECK_THROWS_AS(Box({{1.0, 1.0}}), InputError);
    CHECK_THROWS_AS(Box({{0.0, 1.0}, {2.0, -1.0}}), InputError);
}

TEST_CASE("jacobian_fd examples") {
    SUBCASE("square function") {
        const VectorMap f = [](std::span<const double> x) { return RealVector{x[0] * x[0]}; };
        const RealVector x{3.0};
        CHECK(std::abs(jacobian_fd(f, x, 1e-6)(0, 0) - 6.0) <= 1e-6);
    }
    SUBCASE("alpha against its hand derivative") {
        Gen g(11);
        const VectorMap alpha = [](std::span<const double> x) {
            return alpha_value(AlphaVariant::Sphere, x.subspan(0, 2), x.subspan(2, 2));
        };
        for (int t = 0; t < 50; ++t) {
            const RealVector x = g.on_sphere(4);
            CHECK(max_entry_diff(jacobian_fd(alpha, x), alpha_jacobian_oracle(x)) <= 1e-5);
        }
    }
    SUBCASE("evaluation errors propagate") {
        const VectorMap bad = [](std::span<const double>) -> RealVector { throw DomainError("outside"); };
        const RealVector x{0.0};
        CHECK_THROWS_AS(jacobian_fd(bad, x), DomainError);
    }
    SUBCASE("non-positive step is rejected") {
        const VectorMap f = [](std::span<const double> x) { return RealVector(x.begin(), x.end()); };
        const RealVector x{1.0};
        CHECK_THROWS_AS(jacobian_fd(f, x, 0.0), InputError);
    }
}

TEST_CASE("jacobian_fd reproduces linear maps") {
    Gen g(5);
    SUBCASE("exact for integer matrices, dyadic points and power-of-two steps") {
        for (int t = 0; t < 100; ++t) {
            const std::size_t rows = 1 + g.index(5), cols = 1 + g.index(5);
            RealMatrix a(rows, cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) a(i, j) = static_cast<double>(static_cast<int>(g.index(21)) - 10);
            RealVector x(cols);
            for (auto& c : x) c = static_cast<double>(static_cast<int>(g.index(65)) - 32) / 16.0;
            const double h = std::ldexp(1.0, -static_cast<int>(10 + g.index(17)));
            const VectorMap f = [&a](std::span<const double> y) { return a * y; };
            CHECK(max_entry_diff(jacobian_fd(f, x, h), a) <= 1e-12);
        }
    }
    SUBCASE("general matrices at the default step") {
        for (int t = 0; t < 100; ++t) {
            const RealMatrix a = g.matrix(1 + g.index(5), 1 + g.index(5));
            const RealVector x = g.gaussian(a.cols());
            const VectorMap f = [&a](std::span<const double> y) { return a * y; };
            CHECK(max_entry_diff(jacobian_fd(f, x, 1e-6), a) <= 1e-8);
        }
    }
}

TEST_CASE("matrix_rank examples") {
    const RankResult id = matrix_rank(RealMatrix::identity(4), 1e-8);
    CHECK(id.rank == 4);
    CHECK(id.min_pivot == 1.0);
    const RankResult zero = matrix_rank(RealMatrix(3, 5), 1e-8);
    CHECK(zero.rank == 0);
    CHECK(zero.min_pivot == 0.0);
    const RealMatrix deficient(3, 3, {1, 2, 3, 2, 4, 6, 0, 1, 1});
    CHECK(matrix_rank(deficient, 1e-10).rank == 2);
    CHECK_THROWS_AS(matrix_rank(RealMatrix::identity(2), 0.0), InputError);
}

TEST_CASE("matrix_rank is invariant under row permutations") {
    Gen g(17);
    for (int t = 0; t < 200; ++t) {
        const std::size_t rows = 2 + g.index(5), cols = 2 + g.index(5);
        RealMatrix a = g.matrix(rows, cols);
        if (g.coin()) {
            // Force a dependent row.
            for (std::size_t j = 0; j < cols; ++j) a(rows - 1, j) = 2.0 * a(0, j) - a(1, j);
        }
        std::vector<std::size_t> perm(rows);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), g.engine());
        const double tol = relative_pivot_tol(a);
        CHECK(matrix_rank(a, tol).rank == matrix_rank(permute_rows(a, perm), tol).rank);
    }
}

TEST_CASE("det_sign examples") {
    CHECK(det_sign(RealMatrix::identity(2)) == 1);
    // Transposition (2 3) and the 3-cycle (1 2 3) on {t1 + t2 + t3 = 0} in the
    // basis (1,-1,0), (1,0,-1): written out by hand.
    CHECK(det_sign(RealMatrix(2, 2, {0, 1, 1, 0})) == -1);
    CHECK(det_sign(RealMatrix(2, 2, {-1, -1, 1, 0})) == 1);
    CHECK(det_sign(RealMatrix(2, 2, {1, 2, 2, 4})) == 0);
    CHECK_THROWS_AS(det_sign(RealMatrix(2, 3)), ShapeError);
}

TEST_CASE("det_sign agrees with cofactor expansion and is multiplicative") {
    Gen g(23);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + g.index(5);
        const RealMatrix a = g.well_conditioned(n);
        const RealMatrix b = g.well_conditioned(n);
        CHECK(det_sign(a) == (det_oracle(a) > 0 ? 1 : -1));
        CHECK(det_sign(a * b) == det_sign(a) * det_sign(b));
    }
}

TEST_CASE("linear solvers") {
    const RealMatrix a(3, 2, {1, 0, 0, 1, 1, 1});
    const RealVector b{1, 2, 3};
    const auto x = solve_least_squares(a, b);
    REQUIRE(x.has_value());
    CHECK((*x)[0] == doctest::Approx(1.0));
    CHECK((*x)[1] == doctest::Approx(2.0));
    CHECK_FALSE(solve_least_squares(RealMatrix(2, 2, {1, 2, 2, 4}), RealVector{1, 1}).has_value());

    const SymmetricEigen e = symmetric_eigen(RealMatrix(2, 2, {2, 1, 1, 2}));
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(3.0));
    CHECK(std::abs(e.vectors(0, 0) + e.vectors(1, 0)) == doctest::Approx(0.0));

    // Underdetermined: the minimum-norm solution of x + y = 2 is (1, 1).
    const RealVector m = solve_min_norm(RealMatrix(1, 2, {1, 1}), RealVector{2});
    CHECK(m[0] == doctest::Approx(1.0));
    CHECK(m[1] == doctest::Approx(1.0));
}

TEST_CASE("newton_refine examples") {
    SUBCASE("quadratic root") {
        const VectorMap f = [](std::span<const double> x) { return RealVector{x[0] * x[0] - 4.0}; };
        const RealVector x0{3.0};
        const NewtonResult r = newton_refine(f, x0, 50, 1e-14);
        CHECK(r.converged);
        CHECK(std::abs(r.x[0] - 2.0) <= 1e-12);
    }
    SUBCASE("no real root") {
        const VectorMap f = [](std::span<const double> x) { return RealVector{x[0] * x[0] + 1.0}; };
        const RealVector x0{1.0};
        const NewtonResult r = newton_refine(f, x0, 50, 1e-10);
        CHECK_FALSE(r.converged);
        CHECK_FALSE(r.diagnostic.empty());
    }
    SUBCASE("singular Jacobian does not abort") {
        const VectorMap f = [](std::span<const double>) { return RealVector{1.0, 1.0}; };
        const RealVector x0{0.0, 0.0};
        const NewtonResult r = newton_refine(f, x0, 10, 1e-10);
        CHECK_FALSE(r.converged);
    }
    SUBCASE("underdetermined systems are rejected") {
        const VectorMap f = [](std::span<const double> x) { return RealVector{x[0] + x[1]}; };
        const RealVector x0{1.0, 0.0};
        CHECK_THROWS_AS(newton_refine(f, x0, 10, 1e-10), ShapeError);
    }
}

TEST_CASE("newton_refine: converged implies residual within tolerance") {
    Gen g(31);
    for (int t = 0; t < 200; ++t) {
        const RealMatrix a = g.well_conditioned(3);
        const RealVector c = g.gaussian(3);
        const VectorMap f = [&](std::span<const double> x) {
            RealVector y = a * x;
            for (std::size_t i = 0; i < 3; ++i) y[i] += 0.2 * std::sin(x[i]) - c[i];
            return y;
        };
        const RealVector x0 = g.gaussian(3);
        const double tol = 1e-11;
        const NewtonResult r = newton_refine(f, x0, 60, tol);
        if (r.converged) {
            CHECK(r.residual <= tol);
            CHECK(norm2(f(r.x)) <= tol);
        }
    }
}

TEST_CASE("grid_scan examples") {
    const Box square({{-1.0, 1.0}, {-1.0, 1.0}});
    SUBCASE("identity map contains the origin") {
        const VectorMap f = [](std::span<const double> x) { return RealVector(x.begin(), x.end()); };
        const auto c = grid_scan(f, square, 21, 1e-9);
        REQUIRE(c.size() == 1);
        CHECK(max_norm(c[0].point) <= 1e-15);
    }
    SUBCASE("constant map gives nothing") {
        const VectorMap f = [](std::span<const double>) { return RealVector{1.0, 1.0}; };
        CHECK(grid_scan(f, square, 21, 1e-3).empty());
    }
    SUBCASE("axis minima survive a coarse grid") {
        const VectorMap f = [](std::span<const double> x) { return RealVector{x[0] - 0.31, x[1] + 0.17}; };
        const auto c = grid_scan(f, square, 5, 1e-6);
        REQUIRE(c.size() == 1);
        CHECK(c[0].point == RealVector{0.5, 0.0});
    }
    SUBCASE("resolution below 2 is rejected") {
        const VectorMap f = [](std::span<const double> x) { return RealVector(x.begin(), x.end()); };
        CHECK_THROWS_AS(grid_scan(f, square, 1, 1e-3), InputError);
    }
}

TEST_CASE("grid_scan is lexicographic and independent of the worker count") {
    const Box box({{-2.0, 2.0}, {-2.0, 2.0}, {0.0, 1.0}});
    const VectorMap f = [](std::span<const double> x) {
        return RealVector{std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]), x[2] - 0.5 + 0.1 * x[0]};
    };
    GridScanOptions one;
    const auto base = grid_scan(f, box, 15, 0.05, one);
    REQUIRE(base.size() > 3);
    for (std::size_t i = 1; i < base.size(); ++i) {
        CHECK(std::lexicographical_compare(base[i - 1].point.begin(), base[i - 1].point.end(), base[i].point.begin(),
                                           base[i].point.end()));
    }
    for (unsigned threads : {2u, 3u, 8u}) {
        GridScanOptions many;
        many.threads = threads;
        const auto other = grid_scan(f, box, 15, 0.05, many);
        REQUIRE(other.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(other[i].point == base[i].point);
            CHECK(other[i].residual == base[i].residual);
        }
    }
}

TEST_CASE("grid_scan domain restriction on leading axes") {
    const Box box({{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}});
    const VectorMap f = [](std::span<const double> x) { return RealVector{x[0] - 0.9, x[1] - 0.9, x[2]}; };
    auto disk = [](std::span<const double> s) { return s[0] * s[0] + s[1] * s[1] <= 1.0; };
    GridScanOptions full;
    full.domain = [&](std::span<const double> x) { return disk(x.subspan(0, 2)); };
    GridScanOptions prefix;
    prefix.domain = disk;
    prefix.domain_axes = 2;
    const auto a = grid_scan(f, box, 11, 1e-3, full);
    const auto b = grid_scan(f, box, 11, 1e-3, prefix);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].point == b[i].point);
    for (const auto& c : a) CHECK(c.point[0] * c.point[0] + c.point[1] * c.point[1] <= 1.0);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] = 1; });
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 100);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
}
