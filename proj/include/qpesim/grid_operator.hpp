#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace qpesim {

/// Uniform interior grid of [0,1] with homogeneous Dirichlet endpoints.
/// N interior points x_j = (j+1)h, j = 0..N-1, spacing h = 1/(N+1);
/// the endpoints 0 and 1 themselves carry no unknowns.
struct GridSpec {
    int n_points = 0;
    double spacing = 0.0;
    std::vector<double> points;
};

/// Build the grid for a given interior point count. Throws
/// std::invalid_argument for n_points < 2.
GridSpec build_grid(int n_points);

/// Potential term of the operator -d^2/dx^2 + V(x) in the hbar = 2m = 1
/// convention. V must be nonnegative everywhere it is evaluated so the
/// discretized operator stays positive definite.
class PotentialSpec {
public:
    enum class Kind { Zero, QuadraticWell, Tabulated };

    static PotentialSpec zero();

    /// V(x) = strength * (x - 1/2)^2, strength >= 0.
    static PotentialSpec quadratic_well(double strength);

    /// Values tabulated at explicit abscissas; these must coincide with the
    /// nodes of whatever grid the potential is later evaluated on.
    static PotentialSpec tabulated(std::vector<double> xs, std::vector<double> values);

    Kind kind() const { return kind_; }
    double strength() const { return strength_; }
    const std::vector<double>& table_xs() const { return xs_; }
    const std::vector<double>& table_values() const { return values_; }

    /// Evaluate V at every grid node. Tabulated data must match the grid
    /// point-for-point (same N, abscissas within 1e-9); mismatch or a
    /// negative value throws std::invalid_argument.
    std::vector<double> evaluate_on(const GridSpec& grid) const;

private:
    PotentialSpec(Kind kind, double strength) : kind_(kind), strength_(strength) {}

    Kind kind_;
    double strength_ = 0.0;
    std::vector<double> xs_;
    std::vector<double> values_;
};

/// Real symmetric tridiagonal H_N from the 3-point central stencil for
/// -d^2/dx^2 with Dirichlet boundaries, plus the potential on the diagonal:
/// d_j = 2/h^2 + V(x_j), e_j = -1/h^2.
struct DiscreteHamiltonian {
    GridSpec grid;
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;
};

DiscreteHamiltonian discretize(const PotentialSpec& potential, const GridSpec& grid);

/// y = H x (tridiagonal multiply).
Eigen::VectorXd apply(const DiscreteHamiltonian& h, const Eigen::VectorXd& x);

/// Gershgorin enclosure of the spectrum: every eigenvalue lies in
/// [gershgorin_lower_bound, gershgorin_upper_bound].
double gershgorin_lower_bound(const DiscreteHamiltonian& h);
double gershgorin_upper_bound(const DiscreteHamiltonian& h);

/// One eigenvalue/eigenvector of H_N. The vector is unit norm with the
/// largest-magnitude coordinate positive (deterministic phase fixing);
/// `index` is the 0-based position in ascending eigenvalue order.
struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;
    int index = 0;
};

/// The `count` lowest eigenpairs of H_N in ascending order. This is the
/// classical solver for the coarse problem and the oracle for the fine one.
/// Throws std::invalid_argument unless 1 <= count <= N, NumericFailure if
/// the solver does not converge or a residual exceeds 1e-10 * ||H||
/// (Gershgorin bound), the scale a backward-stable solver must meet.
std::vector<EigenPair> eigensolve(const DiscreteHamiltonian& h, int count);

/// True if any two consecutive eigenvalues in `pairs` are separated by less
/// than rel_tol * lambda. Results carrying such pairs should be flagged,
/// since "the k-th eigenvector" is then numerically ill-defined.
bool has_near_degeneracy(std::span<const EigenPair> pairs, double rel_tol = 1e-9);

/// A continuous function sampled on the grid nodes and normalized.
/// raw_norm is the 2-norm before normalization (scales like sqrt(N) for an
/// L2-normalized function).
struct SampledFunction {
    Eigen::VectorXd normalized;
    double raw_norm = 0.0;
};

SampledFunction sample_eigenfunction(const std::function<double(double)>& fn,
                                     const GridSpec& grid);

} // namespace qpesim
