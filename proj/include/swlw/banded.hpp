#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "swlw/errors.hpp"

namespace swlw {

/// Complex tridiagonal matrix. Row i is
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]
/// with lower[0] and upper[n-1] ignored.
struct Tridiag {
    std::vector<std::complex<double>> lower;
    std::vector<std::complex<double>> diag;
    std::vector<std::complex<double>> upper;

    explicit Tridiag(std::size_t n = 0) : lower(n), diag(n), upper(n) {}
    std::size_t size() const { return diag.size(); }
};

inline constexpr double pivot_tolerance = 1e-14;

/// Thomas algorithm, no pivoting. Throws SingularSystem when a pivot falls
/// below pivot_tolerance times the row's magnitude.
inline std::vector<std::complex<double>> solve_tridiag(const Tridiag& a, std::span<const std::complex<double>> rhs) {
    using C = std::complex<double>;
    const std::size_t n = a.size();
    if (a.lower.size() != n || a.upper.size() != n || rhs.size() != n) {
        throw DimensionError("tridiagonal system and right-hand side sizes differ");
    }
    std::vector<C> c_star(n);
    std::vector<C> x(n);
    if (n == 0) return x;

    auto row_scale = [&](std::size_t i) {
        return (i > 0 ? std::abs(a.lower[i]) : 0.0) + std::abs(a.diag[i]) + (i + 1 < n ? std::abs(a.upper[i]) : 0.0);
    };

    auto bad_pivot = [&](const C& pivot, std::size_t i) {
        return !(std::abs(pivot) > 0.0 && std::abs(pivot) >= pivot_tolerance * row_scale(i));
    };

    C pivot = a.diag[0];
    if (bad_pivot(pivot, 0)) throw SingularSystem(0, "zero pivot in tridiagonal solve");
    c_star[0] = n > 1 ? a.upper[0] / pivot : C{};
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = a.diag[i] - a.lower[i] * c_star[i - 1];
        if (bad_pivot(pivot, i)) {
            throw SingularSystem(i, "zero pivot in tridiagonal solve");
        }
        c_star[i] = i + 1 < n ? a.upper[i] / pivot : C{};
        x[i] = (rhs[i] - a.lower[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c_star[i] * x[i + 1];
    return x;
}

/// Real matrix with bandwidth 2 stored by diagonals: band(k)[i] = A(i, i + k - 2)
/// for k = 0..4. After lu_penta the same storage holds the unit-lower factor
/// below the diagonal and the upper factor on and above it.
class Pentadiag {
public:
    enum class Form { raw, factored };

    explicit Pentadiag(std::size_t n = 0) : n_(n) {
        for (auto& b : bands_) b.assign(n, 0.0);
    }

    std::size_t size() const { return n_; }
    Form form() const { return form_; }

    std::vector<double>& band(int offset) { return bands_[static_cast<std::size_t>(offset + 2)]; }
    const std::vector<double>& band(int offset) const { return bands_[static_cast<std::size_t>(offset + 2)]; }

    /// A(i, j); zero outside the band.
    double entry(std::size_t i, std::size_t j) const {
        const auto off = static_cast<long>(j) - static_cast<long>(i);
        if (off < -2 || off > 2) return 0.0;
        return bands_[static_cast<std::size_t>(off + 2)][i];
    }

    double& at(std::size_t i, std::size_t j) {
        const auto off = static_cast<long>(j) - static_cast<long>(i);
        return bands_[static_cast<std::size_t>(off + 2)][i];
    }

    void mark_factored() { form_ = Form::factored; }

private:
    std::size_t n_;
    std::array<std::vector<double>, 5> bands_;
    Form form_ = Form::raw;
};

/// In-band LU without pivoting (Doolittle). The caller is responsible for
/// the matrix being safely factorizable, e.g. a dominant I/tau shift.
inline Pentadiag lu_penta(Pentadiag a) {
    if (a.form() == Pentadiag::Form::factored) return a;
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double pivot = a.entry(k, k);
        double scale = 0.0;
        for (std::size_t j = (k >= 2 ? k - 2 : 0); j < std::min(n, k + 3); ++j) scale += std::abs(a.entry(k, j));
        if (!(std::abs(pivot) >= pivot_tolerance * scale) || pivot == 0.0) {
            throw SingularSystem(k, "zero pivot in pentadiagonal LU");
        }
        for (std::size_t i = k + 1; i < std::min(n, k + 3); ++i) {
            const double l = a.entry(i, k) / pivot;
            a.at(i, k) = l;
            for (std::size_t j = k + 1; j < std::min(n, k + 3); ++j) a.at(i, j) -= l * a.entry(k, j);
        }
    }
    a.mark_factored();
    return a;
}

inline std::vector<double> solve_penta(const Pentadiag& lu, std::span<const double> rhs) {
    if (lu.form() != Pentadiag::Form::factored) throw InvalidParameter("solve_penta needs a factored matrix");
    const std::size_t n = lu.size();
    if (rhs.size() != n) throw DimensionError("pentadiagonal system and right-hand side sizes differ");
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = (i >= 2 ? i - 2 : 0); j < i; ++j) x[i] -= lu.entry(i, j) * x[j];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < std::min(n, i + 3); ++j) x[i] -= lu.entry(i, j) * x[j];
        x[i] /= lu.entry(i, i);
    }
    return x;
}

}  // namespace swlw
