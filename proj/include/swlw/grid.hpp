#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "swlw/errors.hpp"

namespace swlw {

using complex = std::complex<double>;

/// Uniform mesh x_j = j*h, j = 0..J+1, on [0, L] with h = L/(J+1).
///
/// Nodes 0, 1, J, J+1 form the two-layer Dirichlet ghost band; the active
/// unknowns are j = 2..J-1, which is why J >= 6 is required (the five-point
/// third-difference stencil must have somewhere to live).
class Grid {
public:
    static constexpr int min_divisions = 6;

    Grid(int J, double L) : J_(J), L_(L), h_(L / (J + 1)) {
        if (J < min_divisions) {
            throw InvalidParameter("J must be >= " + std::to_string(min_divisions) + ", got " +
                                   std::to_string(J));
        }
        if (!(L > 0.0) || !std::isfinite(L)) {
            throw InvalidParameter("L must be positive and finite");
        }
    }

    int J() const { return J_; }
    double L() const { return L_; }
    double h() const { return h_; }
    std::size_t size() const { return static_cast<std::size_t>(J_) + 2; }

    int first_active() const { return 2; }
    int last_active() const { return J_ - 1; }
    std::size_t active_count() const { return static_cast<std::size_t>(J_) - 2; }

    double x(int j) const { return j == J_ + 1 ? L_ : j * h_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int J_;
    double L_;
    double h_;
};

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
T conj_of(const T& z) {
    if constexpr (is_complex<T>::value) {
        return std::conj(z);
    } else {
        return z;
    }
}

template <class T>
bool is_finite(const T& z) {
    if constexpr (is_complex<T>::value) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    } else {
        return std::isfinite(z);
    }
}

inline void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) {
        throw DimensionError("grid functions live on different grids (J = " + std::to_string(a.J()) +
                             " vs " + std::to_string(b.J()) + ")");
    }
}

}  // namespace detail

/// Unconstrained node samples on a grid. Difference operators return these,
/// since e.g. D+ z is nonzero at j = 1 even for z in X_J.
template <class T>
class NodeArray {
public:
    using value_type = T;

    explicit NodeArray(const Grid& grid) : grid_(grid), values_(grid.size(), T{}) {}

    NodeArray(const Grid& grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw DimensionError("expected " + std::to_string(grid_.size()) + " node values, got " +
                                 std::to_string(values_.size()));
        }
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    T& operator[](int j) { return values_[static_cast<std::size_t>(j)]; }
    const T& operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }

    std::span<T> values() { return values_; }
    std::span<const T> values() const { return values_; }

private:
    Grid grid_;
    std::vector<T> values_;
};

/// Grid function in X_J: entries 0, 1, J, J+1 are zero, always.
template <class T>
class GridFn {
public:
    using value_type = T;

    explicit GridFn(const Grid& grid) : nodes_(grid) {}

    GridFn(const Grid& grid, std::vector<T> values) : nodes_(grid, std::move(values)) { zero_ghosts(); }

    explicit GridFn(NodeArray<T> nodes) : nodes_(std::move(nodes)) { zero_ghosts(); }

    const Grid& grid() const { return nodes_.grid(); }
    std::size_t size() const { return nodes_.size(); }
    const T& operator[](int j) const { return nodes_[j]; }
    std::span<const T> values() const { return nodes_.values(); }
    const NodeArray<T>& nodes() const { return nodes_; }

    // Writes to a ghost index are discarded.
    void set(int j, const T& value) {
        nodes_[j] = value;
        zero_ghosts();
    }

    /// Mutates all J+2 entries through `fn(std::span<T>)`, then restores the ghost band.
    template <class Fn>
    void update(Fn&& fn) {
        std::forward<Fn>(fn)(nodes_.values());
        zero_ghosts();
    }

    GridFn& operator+=(const GridFn& other) {
        detail::require_same_grid(grid(), other.grid());
        auto dst = nodes_.values();
        auto src = other.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        return *this;
    }

    GridFn& operator-=(const GridFn& other) {
        detail::require_same_grid(grid(), other.grid());
        auto dst = nodes_.values();
        auto src = other.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
        return *this;
    }

    template <class S>
    GridFn& operator*=(const S& scale) {
        for (auto& z : nodes_.values()) z *= scale;
        return *this;
    }

    friend GridFn operator+(GridFn a, const GridFn& b) { return a += b; }
    friend GridFn operator-(GridFn a, const GridFn& b) { return a -= b; }
    template <class S>
    friend GridFn operator*(const S& scale, GridFn a) {
        return a *= scale;
    }

    friend bool operator==(const GridFn& a, const GridFn& b) {
        return a.grid() == b.grid() && std::ranges::equal(a.values(), b.values());
    }

private:
    void zero_ghosts() {
        const int J = grid().J();
        nodes_[0] = T{};
        nodes_[1] = T{};
        nodes_[J] = T{};
        nodes_[J + 1] = T{};
    }

    NodeArray<T> nodes_;
};

using RealGridFn = GridFn<double>;
using ComplexGridFn = GridFn<complex>;

// ---------------------------------------------------------------------------
// Difference operators. Outputs outside each operator's stencil range are 0.
// ---------------------------------------------------------------------------

/// (z_{j+1} - z_j)/h for j = 0..J; entry J+1 is 0.
template <class T>
NodeArray<T> d_plus(const NodeArray<T>& z) {
    const int J = z.grid().J();
    const double h = z.grid().h();
    NodeArray<T> out(z.grid());
    for (int j = 0; j <= J; ++j) out[j] = (z[j + 1] - z[j]) / h;
    return out;
}

/// (z_j - z_{j-1})/h for j = 1..J+1; entry 0 is 0.
template <class T>
NodeArray<T> d_minus(const NodeArray<T>& z) {
    const int J = z.grid().J();
    const double h = z.grid().h();
    NodeArray<T> out(z.grid());
    for (int j = 1; j <= J + 1; ++j) out[j] = (z[j] - z[j - 1]) / h;
    return out;
}

/// (z_{j+1} - z_{j-1})/(2h) for j = 1..J.
template <class T>
NodeArray<T> d_zero(const NodeArray<T>& z) {
    const int J = z.grid().J();
    const double h = z.grid().h();
    NodeArray<T> out(z.grid());
    for (int j = 1; j <= J; ++j) out[j] = (z[j + 1] - z[j - 1]) / (2.0 * h);
    return out;
}

/// (z_{j+1} - 2 z_j + z_{j-1})/h^2 for j = 1..J.
template <class T>
NodeArray<T> laplacian_h(const NodeArray<T>& z) {
    const int J = z.grid().J();
    const double h = z.grid().h();
    const double inv_h2 = 1.0 / (h * h);
    NodeArray<T> out(z.grid());
    for (int j = 1; j <= J; ++j) out[j] = (z[j + 1] - 2.0 * z[j] + z[j - 1]) * inv_h2;
    return out;
}

/// Five-point D0 D- D+ for j = 2..J-1.
template <class T>
NodeArray<T> d_cubed(const NodeArray<T>& z) {
    const int J = z.grid().J();
    const double h = z.grid().h();
    const double scale = 1.0 / (2.0 * h * h * h);
    NodeArray<T> out(z.grid());
    for (int j = 2; j <= J - 1; ++j) {
        out[j] = (z[j + 2] - 2.0 * z[j + 1] + 2.0 * z[j - 1] - z[j - 2]) * scale;
    }
    return out;
}

template <class T>
NodeArray<T> d_plus(const GridFn<T>& z) {
    return d_plus(z.nodes());
}
template <class T>
NodeArray<T> d_minus(const GridFn<T>& z) {
    return d_minus(z.nodes());
}
template <class T>
NodeArray<T> d_zero(const GridFn<T>& z) {
    return d_zero(z.nodes());
}
template <class T>
NodeArray<T> laplacian_h(const GridFn<T>& z) {
    return laplacian_h(z.nodes());
}
template <class T>
NodeArray<T> d_cubed(const GridFn<T>& z) {
    return d_cubed(z.nodes());
}

// ---------------------------------------------------------------------------
// Discrete inner products and norms.
// ---------------------------------------------------------------------------

/// Index range of a discrete sum.
///   active:      j = 2..J-1, the range of the X_J inner product and norms.
///   differences: j = 1..J-1, used for norms of D+ z with z in X_J, so every
///                difference between neighbouring active entries (including
///                the jumps to the zero band) is counted exactly once.
enum class SumRange { active, differences };

namespace detail {
inline std::pair<int, int> bounds(const Grid& g, SumRange range) {
    return range == SumRange::active ? std::pair{2, g.J() - 1} : std::pair{1, g.J() - 1};
}
}  // namespace detail

/// (z, w) = sum_j h z_j conj(w_j) over the active range.
template <class T>
complex inner(const NodeArray<T>& z, const NodeArray<T>& w, SumRange range = SumRange::active) {
    detail::require_same_grid(z.grid(), w.grid());
    const auto [lo, hi] = detail::bounds(z.grid(), range);
    complex sum{};
    for (int j = lo; j <= hi; ++j) sum += complex(z[j] * detail::conj_of(w[j]));
    return z.grid().h() * sum;
}

template <class T>
complex inner(const GridFn<T>& z, const GridFn<T>& w) {
    return inner(z.nodes(), w.nodes());
}

inline constexpr double infinity_norm = std::numeric_limits<double>::infinity();

/// Discrete p-norm, 1 <= p <= infinity_norm.
template <class T>
double norm_p(const NodeArray<T>& z, double p, SumRange range = SumRange::active) {
    if (!(p >= 1.0)) {
        throw InvalidParameter("norm order p must be >= 1, got " + std::to_string(p));
    }
    const auto [lo, hi] = detail::bounds(z.grid(), range);
    if (p == infinity_norm) {
        double m = 0.0;
        for (int j = lo; j <= hi; ++j) m = std::max(m, std::abs(z[j]));
        return m;
    }
    double sum = 0.0;
    if (p == 2.0) {
        for (int j = lo; j <= hi; ++j) sum += std::norm(complex(z[j]));
        return std::sqrt(z.grid().h() * sum);
    }
    for (int j = lo; j <= hi; ++j) sum += std::pow(std::abs(z[j]), p);
    return std::pow(z.grid().h() * sum, 1.0 / p);
}

template <class T>
double norm_p(const GridFn<T>& z, double p) {
    return norm_p(z.nodes(), p);
}

/// ||D+ z||_p summed over j = 1..J-1.
template <class T>
double d_plus_norm(const GridFn<T>& z, double p) {
    return norm_p(d_plus(z), p, SumRange::differences);
}

// ---------------------------------------------------------------------------
// Piecewise reconstructions on [0, L].
// ---------------------------------------------------------------------------

/// A function that is linear on each cell (x_j, x_{j+1}), j = 0..J, stored by
/// its one-sided limits at the cell ends. Covers both interpolators: P0 is
/// the special case left == right.
template <class T>
class CellwiseLinear {
public:
    CellwiseLinear(const Grid& grid, std::vector<T> left, std::vector<T> right)
        : grid_(grid), left_(std::move(left)), right_(std::move(right)) {
        const std::size_t cells = static_cast<std::size_t>(grid_.J()) + 1;
        if (left_.size() != cells || right_.size() != cells) {
            throw DimensionError("cellwise function needs J+1 cells");
        }
    }

    const Grid& grid() const { return grid_; }
    std::size_t cells() const { return left_.size(); }
    const T& left(std::size_t cell) const { return left_[cell]; }
    const T& right(std::size_t cell) const { return right_[cell]; }

    /// Value at x in [0, L]; at interior nodes the right cell is used.
    T operator()(double x) const {
        const double h = grid_.h();
        auto cell = static_cast<std::size_t>(std::clamp(std::floor(x / h), 0.0, static_cast<double>(cells() - 1)));
        const double s = (x - grid_.x(static_cast<int>(cell))) / h;
        return left_[cell] + s * (right_[cell] - left_[cell]);
    }

    /// Slope on a cell.
    T slope(std::size_t cell) const { return (right_[cell] - left_[cell]) / grid_.h(); }

    /// Exact L2(0, L) norm: each cell contributes h/3 (|a|^2 + Re(a conj b) + |b|^2).
    double l2_norm() const {
        double sum = 0.0;
        for (std::size_t c = 0; c < cells(); ++c) {
            const complex a(left_[c]);
            const complex b(right_[c]);
            sum += std::norm(a) + (a * std::conj(b)).real() + std::norm(b);
        }
        return std::sqrt(grid_.h() / 3.0 * sum);
    }

    friend CellwiseLinear operator-(const CellwiseLinear& a, const CellwiseLinear& b) {
        detail::require_same_grid(a.grid_, b.grid_);
        std::vector<T> l(a.cells()), r(a.cells());
        for (std::size_t c = 0; c < a.cells(); ++c) {
            l[c] = a.left_[c] - b.left_[c];
            r[c] = a.right_[c] - b.right_[c];
        }
        return CellwiseLinear(a.grid_, std::move(l), std::move(r));
    }

private:
    Grid grid_;
    std::vector<T> left_;
    std::vector<T> right_;
};

/// Continuous piecewise-linear interpolant through the node values.
template <class T>
CellwiseLinear<T> interp_p1(const GridFn<T>& z) {
    const std::size_t cells = static_cast<std::size_t>(z.grid().J()) + 1;
    std::vector<T> l(cells), r(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        l[c] = z[static_cast<int>(c)];
        r[c] = z[static_cast<int>(c) + 1];
    }
    return CellwiseLinear<T>(z.grid(), std::move(l), std::move(r));
}

/// Piecewise-constant interpolant, z_j on (x_j, x_{j+1}).
template <class T>
CellwiseLinear<T> interp_p0(const GridFn<T>& z) {
    const std::size_t cells = static_cast<std::size_t>(z.grid().J()) + 1;
    std::vector<T> l(cells);
    for (std::size_t c = 0; c < cells; ++c) l[c] = z[static_cast<int>(c)];
    auto r = l;
    return CellwiseLinear<T>(z.grid(), std::move(l), std::move(r));
}

/// Samples f at the active nodes j = 2..J-1; the ghost band stays zero.
template <class F>
auto sample(F&& f, const Grid& grid) {
    using R = std::decay_t<std::invoke_result_t<F&, double>>;
    GridFn<R> out(grid);
    out.update([&](std::span<R> values) {
        for (int j = grid.first_active(); j <= grid.last_active(); ++j) {
            const R value = f(grid.x(j));
            if (!detail::is_finite(value)) {
                throw InputError("non-finite sample at node j = " + std::to_string(j) +
                                 " (x = " + std::to_string(grid.x(j)) + ")");
            }
            values[static_cast<std::size_t>(j)] = value;
        }
    });
    return out;
}

}  // namespace swlw
