// Grid and operator construction against closed forms.
//
// The zero-potential operator is the Dirichlet Laplacian on a uniform grid,
// whose eigenstructure is known exactly:
//   lambda_k = (2/h^2) (1 - cos(k pi h)),   v_k(x_j) ~ sin(k pi x_j)
// for k = 1..N, h = 1/(N+1), x_j = (j+1) h. That closed form (plus a dense
// brute-force eigensolve at small N) is the oracle here; the quadratic well
// provides a genuinely second-order convergence case.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qpesim/grid_operator.hpp"
#include "qpesim/state_prep.hpp"

using namespace qpesim;

namespace {

constexpr double kPi = std::numbers::pi;

double dirichlet_eigenvalue(int n, int mode_k) { // mode_k = 1..N
    const double h = 1.0 / (n + 1);
    return 2.0 / (h * h) * (1.0 - std::cos(mode_k * kPi * h));
}

Eigen::VectorXd dirichlet_eigenvector(const GridSpec& grid, int mode_k) {
    Eigen::VectorXd v(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        v(j) = std::sin(mode_k * kPi * grid.points[static_cast<std::size_t>(j)]);
    }
    v.normalize();
    return v;
}

Eigen::MatrixXd dense_matrix(const DiscreteHamiltonian& h) {
    const int n = h.grid.n_points;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        m(j, j) = h.diagonal[static_cast<std::size_t>(j)];
        if (j + 1 < n) {
            m(j, j + 1) = h.off_diagonal[static_cast<std::size_t>(j)];
            m(j + 1, j) = h.off_diagonal[static_cast<std::size_t>(j)];
        }
    }
    return m;
}

// least-squares slope of log(y) vs log(x)
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("build_grid: spacing and interior points") {
    CHECK_THROWS_AS(build_grid(1), std::invalid_argument);

    const GridSpec g3 = build_grid(3);
    CHECK(g3.n_points == 3);
    CHECK(g3.spacing == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g3.points[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g3.points[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g3.points[2] == doctest::Approx(0.75).epsilon(1e-15));

    const GridSpec g15 = build_grid(15);
    CHECK(g15.spacing == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(g15.points.front() == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(g15.points.back() == doctest::Approx(15.0 / 16.0).epsilon(1e-15));

    // strict interior, uniform spacing up to ulp scale
    const GridSpec g100 = build_grid(100);
    CHECK(g100.points.front() > 0.0);
    CHECK(g100.points.back() < 1.0);
    for (std::size_t j = 0; j + 1 < g100.points.size(); ++j) {
        CHECK(std::abs(g100.points[j + 1] - g100.points[j] - g100.spacing) < 1e-15);
    }
}

TEST_CASE("discretize: stencil entries") {
    const GridSpec g3 = build_grid(3);
    const DiscreteHamiltonian h = discretize(PotentialSpec::zero(), g3);
    // h = 1/4, so 1/h^2 = 16: diagonal 32, off-diagonal -16
    REQUIRE(h.diagonal.size() == 3);
    REQUIRE(h.off_diagonal.size() == 2);
    for (double d : h.diagonal) CHECK(d == doctest::Approx(32.0).epsilon(1e-15));
    for (double e : h.off_diagonal) CHECK(e == doctest::Approx(-16.0).epsilon(1e-15));

    // zero-strength well is the zero potential
    const DiscreteHamiltonian h0 = discretize(PotentialSpec::quadratic_well(0.0), g3);
    for (int j = 0; j < 3; ++j) {
        CHECK(h0.diagonal[static_cast<std::size_t>(j)] ==
              h.diagonal[static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("discretize: quadratic well entries recomputed independently") {
    const GridSpec grid = build_grid(31);
    const double c = 100.0;
    const DiscreteHamiltonian h = discretize(PotentialSpec::quadratic_well(c), grid);
    const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);
    for (int j = 0; j < 31; ++j) {
        const double x = (j + 1) / 32.0;
        const double expected = 2.0 * inv_h2 + c * (x - 0.5) * (x - 0.5);
        CHECK(h.diagonal[static_cast<std::size_t>(j)] ==
              doctest::Approx(expected).epsilon(1e-14));
        CHECK(h.diagonal[static_cast<std::size_t>(j)] >= 2.0 * inv_h2);
    }
}

TEST_CASE("negative potentials rejected") {
    const GridSpec grid = build_grid(3);
    CHECK_THROWS_AS(
        PotentialSpec::tabulated(std::vector<double>(grid.points), {1.0, -0.5, 1.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec::quadratic_well(-1.0), std::invalid_argument);
}

TEST_CASE("tabulated potential must match the grid") {
    const GridSpec grid = build_grid(4);
    // right values on the right nodes works
    const PotentialSpec ok = PotentialSpec::tabulated(grid.points, {1.0, 2.0, 3.0, 4.0});
    CHECK(ok.evaluate_on(grid) == std::vector<double>{1.0, 2.0, 3.0, 4.0});

    // wrong length
    const PotentialSpec short_table = PotentialSpec::tabulated({0.25, 0.5}, {1.0, 1.0});
    CHECK_THROWS_AS(short_table.evaluate_on(grid), std::invalid_argument);

    // shifted abscissas
    std::vector<double> shifted(grid.points);
    shifted[2] += 1e-6;
    const PotentialSpec off_grid = PotentialSpec::tabulated(shifted, {1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS(off_grid.evaluate_on(grid), std::invalid_argument);
}

TEST_CASE("eigensolve: 2x2 closed form") {
    // N=2: h = 1/3, 1/h^2 = 9, matrix [[18,-9],[-9,18]] -> eigenvalues 9, 27
    const auto pairs = eigensolve(discretize(PotentialSpec::zero(), build_grid(2)), 2);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].value == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(pairs[1].value == doctest::Approx(27.0).epsilon(1e-12));
    CHECK(pairs[0].index == 0);
    CHECK(pairs[1].index == 1);
}

TEST_CASE("eigensolve: matches the Dirichlet Laplacian closed form") {
    for (int n : {8, 64}) {
        const GridSpec grid = build_grid(n);
        const auto pairs = eigensolve(discretize(PotentialSpec::zero(), grid), n);
        REQUIRE(static_cast<int>(pairs.size()) == n);
        for (int k = 0; k < n; ++k) {
            const double analytic = dirichlet_eigenvalue(n, k + 1);
            CHECK(std::abs(pairs[static_cast<std::size_t>(k)].value - analytic) <=
                  1e-10 * analytic);
            const Eigen::VectorXd wave = dirichlet_eigenvector(grid, k + 1);
            const double overlap =
                std::abs(wave.dot(pairs[static_cast<std::size_t>(k)].vector));
            CHECK(overlap >= 1.0 - 1e-10);
        }
    }
}

TEST_CASE("eigensolve: agrees with a dense brute-force solve") {
    // independent path: Eigen's dense symmetric eigensolver on the full matrix
    for (const PotentialSpec& potential :
         {PotentialSpec::zero(), PotentialSpec::quadratic_well(100.0)}) {
        const GridSpec grid = build_grid(48);
        const DiscreteHamiltonian h = discretize(potential, grid);
        const auto pairs = eigensolve(h, 48);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(dense_matrix(h));
        REQUIRE(dense.info() == Eigen::Success);
        for (int k = 0; k < 48; ++k) {
            CHECK(pairs[static_cast<std::size_t>(k)].value ==
                  doctest::Approx(dense.eigenvalues()(k)).epsilon(1e-12));
            const double overlap = std::abs(
                dense.eigenvectors().col(k).dot(pairs[static_cast<std::size_t>(k)].vector));
            CHECK(overlap >= 1.0 - 1e-11);
        }
    }
}

TEST_CASE("eigensolve: invariants of the returned pairs") {
    const GridSpec grid = build_grid(31);
    const DiscreteHamiltonian h = discretize(PotentialSpec::quadratic_well(100.0), grid);
    const auto pairs = eigensolve(h, 10);
    REQUIRE(pairs.size() == 10);

    const double lo = gershgorin_lower_bound(h);
    const double hi = gershgorin_upper_bound(h);
    double previous = -1.0;
    for (const EigenPair& pair : pairs) {
        CHECK(std::abs(pair.vector.norm() - 1.0) <= 1e-12);
        CHECK(pair.value > 0.0); // positive definite for V >= 0
        CHECK(pair.value > previous);
        previous = pair.value;
        CHECK(pair.value >= lo);
        CHECK(pair.value <= hi);
        // sign convention: largest-magnitude coordinate positive
        Eigen::Index arg_max = 0;
        pair.vector.cwiseAbs().maxCoeff(&arg_max);
        CHECK(pair.vector(arg_max) > 0.0);
        // residual within the solver contract (1e-10 * ||H|| by Gershgorin)
        CHECK((apply(h, pair.vector) - pair.value * pair.vector).norm() <=
              1e-10 * gershgorin_upper_bound(h));
    }

    CHECK_THROWS_AS(eigensolve(h, 0), std::invalid_argument);
    CHECK_THROWS_AS(eigensolve(h, 32), std::invalid_argument);
}

TEST_CASE("near-degeneracy flag") {
    const auto pairs = eigensolve(discretize(PotentialSpec::zero(), build_grid(16)), 16);
    CHECK_FALSE(has_near_degeneracy(pairs));

    std::vector<EigenPair> clustered(2);
    clustered[0].value = 100.0;
    clustered[1].value = 100.0 * (1.0 + 1e-12);
    CHECK(has_near_degeneracy(clustered));
}

TEST_CASE("sample_eigenfunction: direct evaluation and constant case") {
    const GridSpec g3 = build_grid(3);
    const SampledFunction sine =
        sample_eigenfunction([](double x) { return std::sqrt(2.0) * std::sin(kPi * x); }, g3);
    // pre-normalization coordinates are sqrt(2) sin(pi x_j)
    for (int j = 0; j < 3; ++j) {
        const double expected =
            std::sqrt(2.0) * std::sin(kPi * g3.points[static_cast<std::size_t>(j)]);
        CHECK(sine.normalized(j) * sine.raw_norm ==
              doctest::Approx(expected).epsilon(1e-14));
    }

    const SampledFunction flat = sample_eigenfunction([](double) { return 1.0; }, build_grid(9));
    for (int j = 0; j < 9; ++j) {
        CHECK(flat.normalized(j) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
}

TEST_CASE("sample_eigenfunction: norm approaches sqrt(N) at first order") {
    // for sqrt(2) sin(pi x), |raw_norm|^2 = N + 1 exactly, so the relative
    // deviation of raw_norm / sqrt(N) from 1 decays like 1/(2N)
    std::vector<double> sizes;
    std::vector<double> deviations;
    for (int n = 8; n <= 1024; n *= 2) {
        const SampledFunction f = sample_eigenfunction(
            [](double x) { return std::sqrt(2.0) * std::sin(kPi * x); }, build_grid(n));
        sizes.push_back(static_cast<double>(n));
        deviations.push_back(std::abs(f.raw_norm / std::sqrt(static_cast<double>(n)) - 1.0));
    }
    const double slope = loglog_slope(sizes, deviations);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("sampled sines are exactly the discrete eigenvectors for zero potential") {
    const int n = 64;
    const GridSpec grid = build_grid(n);
    const auto pairs = eigensolve(discretize(PotentialSpec::zero(), grid), 4);
    for (int k = 0; k < 4; ++k) {
        const int mode = k + 1;
        const SampledFunction sampled = sample_eigenfunction(
            [mode](double x) { return std::sqrt(2.0) * std::sin(mode * kPi * x); }, grid);
        const double err =
            (pairs[static_cast<std::size_t>(k)].vector - sampled.normalized).norm();
        CHECK(err <= 1e-10);
    }
}

TEST_CASE("quadratic well eigenvectors converge at second order") {
    // No closed form here, so the continuous eigenfunction is stood in for
    // by a fine reference solve at N_ref = 4095 restricted to nested grids
    // ((N+1) divides 4096 for N in {15,31,63,127}); the restriction error
    // is O(h_ref^2) ~ 6e-8, far below the coarsest measured error.
    const int n_ref = 4095;
    const GridSpec ref_grid = build_grid(n_ref);
    const auto ref =
        eigensolve(discretize(PotentialSpec::quadratic_well(100.0), ref_grid), 1).front();

    std::vector<double> sizes;
    std::vector<double> errors;
    for (int n : {15, 31, 63, 127}) {
        const GridSpec grid = build_grid(n);
        const auto pair =
            eigensolve(discretize(PotentialSpec::quadratic_well(100.0), grid), 1).front();

        const int stride = (n_ref + 1) / (n + 1);
        Eigen::VectorXd restricted(n);
        for (int j = 0; j < n; ++j) restricted(j) = ref.vector((j + 1) * stride - 1);
        restricted.normalize();
        if (restricted.dot(pair.vector) < 0.0) restricted = -restricted;

        sizes.push_back(static_cast<double>(n));
        errors.push_back((pair.vector - restricted).norm());
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) CHECK(errors[i + 1] < errors[i]);
    const double q = -loglog_slope(sizes, errors);
    CHECK(q >= 1.7);
}
