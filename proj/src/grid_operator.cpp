#include "qpesim/grid_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <lapacke.h>

#include "qpesim/errors.hpp"

namespace qpesim {

GridSpec build_grid(int n_points) {
    if (n_points < 2) {
        throw std::invalid_argument("build_grid: n_points must be >= 2, got " +
                                    std::to_string(n_points));
    }
    GridSpec grid;
    grid.n_points = n_points;
    grid.spacing = 1.0 / (n_points + 1);
    grid.points.resize(static_cast<std::size_t>(n_points));
    for (int j = 0; j < n_points; ++j) {
        grid.points[static_cast<std::size_t>(j)] = (j + 1) * grid.spacing;
    }
    return grid;
}

PotentialSpec PotentialSpec::zero() { return PotentialSpec(Kind::Zero, 0.0); }

PotentialSpec PotentialSpec::quadratic_well(double strength) {
    if (!(strength >= 0.0)) {
        throw std::invalid_argument("quadratic_well: strength must be >= 0");
    }
    return PotentialSpec(Kind::QuadraticWell, strength);
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> xs, std::vector<double> values) {
    if (xs.size() != values.size() || xs.empty()) {
        throw std::invalid_argument("tabulated: xs and values must be nonempty and equal length");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0)) {
            throw std::invalid_argument("tabulated: negative potential value at x = " +
                                        std::to_string(xs[i]));
        }
    }
    PotentialSpec p(Kind::Tabulated, 0.0);
    p.xs_ = std::move(xs);
    p.values_ = std::move(values);
    return p;
}

std::vector<double> PotentialSpec::evaluate_on(const GridSpec& grid) const {
    const auto n = static_cast<std::size_t>(grid.n_points);
    std::vector<double> v(n, 0.0);
    switch (kind_) {
        case Kind::Zero:
            break;
        case Kind::QuadraticWell:
            for (std::size_t j = 0; j < n; ++j) {
                const double dx = grid.points[j] - 0.5;
                v[j] = strength_ * dx * dx;
            }
            break;
        case Kind::Tabulated: {
            if (xs_.size() != n) {
                throw std::invalid_argument(
                    "tabulated potential has " + std::to_string(xs_.size()) +
                    " samples but the grid has " + std::to_string(n) + " points");
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (std::abs(xs_[j] - grid.points[j]) > 1e-9) {
                    throw std::invalid_argument("tabulated potential abscissa " +
                                                std::to_string(xs_[j]) +
                                                " does not match grid node " +
                                                std::to_string(grid.points[j]));
                }
                v[j] = values_[j];
            }
            break;
        }
    }
    return v;
}

DiscreteHamiltonian discretize(const PotentialSpec& potential, const GridSpec& grid) {
    const std::vector<double> v = potential.evaluate_on(grid);
    const auto n = static_cast<std::size_t>(grid.n_points);
    const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);

    DiscreteHamiltonian h;
    h.grid = grid;
    h.diagonal.resize(n);
    h.off_diagonal.assign(n - 1, -inv_h2);
    for (std::size_t j = 0; j < n; ++j) {
        if (!(v[j] >= 0.0)) {
            throw std::invalid_argument("discretize: negative potential value at x = " +
                                        std::to_string(grid.points[j]));
        }
        h.diagonal[j] = 2.0 * inv_h2 + v[j];
    }
    return h;
}

Eigen::VectorXd apply(const DiscreteHamiltonian& h, const Eigen::VectorXd& x) {
    const auto n = static_cast<Eigen::Index>(h.diagonal.size());
    if (x.size() != n) throw std::invalid_argument("apply: size mismatch");
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = h.diagonal[static_cast<std::size_t>(i)] * x(i);
        if (i > 0) acc += h.off_diagonal[static_cast<std::size_t>(i - 1)] * x(i - 1);
        if (i + 1 < n) acc += h.off_diagonal[static_cast<std::size_t>(i)] * x(i + 1);
        y(i) = acc;
    }
    return y;
}

double gershgorin_lower_bound(const DiscreteHamiltonian& h) {
    const std::size_t n = h.diagonal.size();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(h.off_diagonal[i - 1]);
        if (i + 1 < n) radius += std::abs(h.off_diagonal[i]);
        lo = std::min(lo, h.diagonal[i] - radius);
    }
    return lo;
}

double gershgorin_upper_bound(const DiscreteHamiltonian& h) {
    const std::size_t n = h.diagonal.size();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(h.off_diagonal[i - 1]);
        if (i + 1 < n) radius += std::abs(h.off_diagonal[i]);
        hi = std::max(hi, h.diagonal[i] + radius);
    }
    return hi;
}

namespace {

// Largest-magnitude coordinate positive; ties resolved to the lowest index.
void fix_sign(Eigen::VectorXd& v) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best) {
            best = mag;
            arg = i;
        }
    }
    if (v(arg) < 0.0) v = -v;
}

} // namespace

std::vector<EigenPair> eigensolve(const DiscreteHamiltonian& h, int count) {
    const int n = h.grid.n_points;
    if (count < 1 || count > n) {
        throw std::invalid_argument("eigensolve: count must be in [1, " + std::to_string(n) +
                                    "], got " + std::to_string(count));
    }

    // dstevr destroys its inputs; hand it copies.
    std::vector<double> diag = h.diagonal;
    std::vector<double> off = h.off_diagonal;
    std::vector<double> values(static_cast<std::size_t>(n));
    std::vector<double> vectors(static_cast<std::size_t>(n) * static_cast<std::size_t>(count));
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(count));
    lapack_int found = 0;

    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(),
        /*vl=*/0.0, /*vu=*/0.0, /*il=*/1, /*iu=*/count, /*abstol=*/0.0,
        &found, values.data(), vectors.data(), n, isuppz.data());
    if (info != 0 || found != count) {
        std::ostringstream msg;
        msg << "eigensolve: dstevr failed (info=" << info << ", requested=" << count
            << ", converged=" << found << ", n=" << n << ")";
        throw NumericFailure(msg.str());
    }

    const double matrix_scale = gershgorin_upper_bound(h);
    std::vector<EigenPair> pairs(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        EigenPair& p = pairs[static_cast<std::size_t>(k)];
        p.value = values[static_cast<std::size_t>(k)];
        p.index = k;
        p.vector = Eigen::Map<const Eigen::VectorXd>(
            vectors.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(n), n);
        p.vector.normalize();
        fix_sign(p.vector);

        // Backward-stable solvers guarantee residuals of order eps * ||H||,
        // not eps * lambda; gating on the eigenvalue would spuriously fail
        // for the low end of a spectrum whose top is ~4/h^2.
        const double residual = (apply(h, p.vector) - p.value * p.vector).norm();
        if (residual > 1e-10 * matrix_scale) {
            std::ostringstream msg;
            msg << "eigensolve: residual " << residual << " exceeds 1e-10 * ||H|| for k=" << k
                << " (lambda=" << p.value << ", ||H||~" << matrix_scale << ", n=" << n << ")";
            throw NumericFailure(msg.str());
        }
    }
    return pairs;
}

bool has_near_degeneracy(std::span<const EigenPair> pairs, double rel_tol) {
    for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
        const double gap = pairs[i + 1].value - pairs[i].value;
        if (gap < rel_tol * std::abs(pairs[i].value)) return true;
    }
    return false;
}

SampledFunction sample_eigenfunction(const std::function<double(double)>& fn,
                                     const GridSpec& grid) {
    Eigen::VectorXd raw(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        raw(j) = fn(grid.points[static_cast<std::size_t>(j)]);
    }
    SampledFunction out;
    out.raw_norm = raw.norm();
    if (out.raw_norm == 0.0) {
        throw std::invalid_argument("sample_eigenfunction: function vanishes on every grid node");
    }
    out.normalized = raw / out.raw_norm;
    return out;
}

} // namespace qpesim
