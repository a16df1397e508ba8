#pragma once

// Dense numeric kernels shared by the obstruction, linking and cobordism code.
// Everything here is a pure function of its arguments and safe to call from
// several threads at once.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace obstrukt {

using RealVector = std::vector<double>;

// Evaluation rule R^p -> R^q. Must be pure and reentrant.
using VectorMap = std::function<RealVector(std::span<const double>)>;

inline constexpr double kDefaultFdStep = 1e-6;
inline constexpr double kDefaultRelativePivotTol = 1e-8;
inline constexpr std::size_t kMaxDampingHalvings = 20;

class RealMatrix {
public:
    RealMatrix() = default;
    RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

    static RealMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    const std::vector<double>& data() const { return data_; }

    RealMatrix transposed() const;
    RealMatrix operator*(const RealMatrix& rhs) const;
    RealVector operator*(std::span<const double> v) const;

    double max_abs() const;
    double max_row_norm() const;

    bool operator==(const RealMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Block-diagonal sum of square matrices.
RealMatrix block_diagonal(std::span<const RealMatrix> blocks);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Axis-aligned search box; lo < hi on every axis.
class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> axes);

    std::size_t dimension() const { return axes_.size(); }
    const Interval& axis(std::size_t i) const { return axes_[i]; }
    const std::vector<Interval>& axes() const { return axes_; }

private:
    std::vector<Interval> axes_;
};

double norm2(std::span<const double> v);
double max_norm(std::span<const double> v);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> v);

// Central-difference Jacobian; entry (i, j) = (f_i(x + h e_j) - f_i(x - h e_j)) / (2h).
// The divisor uses the step actually representable at x_j.
RealMatrix jacobian_fd(const VectorMap& f, std::span<const double> x, double h = kDefaultFdStep);

struct RankResult {
    std::size_t rank = 0;
    double min_pivot = 0.0;  // smallest accepted pivot magnitude, 0 when rank is 0
};

// Partial-pivot elimination; a pivot counts when its magnitude is >= pivot_tol.
RankResult matrix_rank(const RealMatrix& a, double pivot_tol);

// Absolute pivot threshold `rel` times the largest row norm of `a`.
double relative_pivot_tol(const RealMatrix& a, double rel = kDefaultRelativePivotTol);

// Sign of the determinant: +1, -1, or 0 when a pivot falls below 1e-12 of the
// largest row norm. Throws ShapeError for non-square input.
int det_sign(const RealMatrix& a);

// Least-squares solution of a x = b by Householder QR (rows >= cols).
// Empty when a column is numerically dependent (|R_ii| <= rel_tol * max|R_jj|).
std::optional<RealVector> solve_least_squares(const RealMatrix& a, std::span<const double> b,
                                              double rel_tol = 1e-12);

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues ascending; column k of `vectors` belongs to values[k].
struct SymmetricEigen {
    RealVector values;
    RealMatrix vectors;
};
SymmetricEigen symmetric_eigen(const RealMatrix& a);

// Minimum-norm solution of a x = b via the pseudo-inverse, discarding
// singular directions below rel_tol of the largest singular value.
RealVector solve_min_norm(const RealMatrix& a, std::span<const double> b, double rel_tol = 1e-10);

struct NewtonResult {
    RealVector x;
    double residual = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    std::string diagnostic;
};

// Damped Newton iteration. Square systems take the Newton step; systems with
// more equations than unknowns take the Gauss-Newton step. The step is halved
// up to kMaxDampingHalvings times until the residual decreases. Never throws on
// a singular Jacobian; the result is then flagged not converged.
NewtonResult newton_refine(const VectorMap& f, std::span<const double> x0, std::size_t max_iter,
                           double res_tol, double fd_step = kDefaultFdStep);

struct GridCandidate {
    RealVector point;
    double residual = 0.0;  // ||f(point)||
};

struct GridScanOptions {
    // Nodes where this returns false are skipped and treated as absent neighbours.
    std::function<bool(std::span<const double>)> domain;
    // When positive, the domain reads only the first domain_axes coordinates
    // and receives a span of that length.
    std::size_t domain_axes = 0;
    unsigned threads = 1;
};

// Nodes with ||f|| <= seed_tol plus nodes that are strict minima of ||f|| along
// every coordinate axis, in lexicographic order. Output is identical for any
// thread count.
std::vector<GridCandidate> grid_scan(const VectorMap& f, const Box& box,
                                     std::span<const std::size_t> resolution, double seed_tol,
                                     const GridScanOptions& options = {});

std::vector<GridCandidate> grid_scan(const VectorMap& f, const Box& box, std::size_t resolution,
                                     double seed_tol, const GridScanOptions& options = {});

// Grid pitch along one axis for a given resolution.
double grid_pitch(const Interval& axis, std::size_t resolution);

}  // namespace obstrukt
