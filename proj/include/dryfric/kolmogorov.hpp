#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "dryfric/flow.hpp"
#include "dryfric/linear_solver.hpp"
#include "dryfric/model.hpp"

namespace dryfric::kolmogorov {

using linalg::SolveReport;
using linalg::SpMat;
using linalg::Vec;

/// Tensor grid G_p: every eta lattice point times the velocities j*delta/p,
/// |j| <= N p. Node numbering is row-major in v: node = (j + Np) * I + (i + N).
class Grid {
 public:
  Grid(const Model& model, int p);

  const Model& model() const noexcept { return model_; }
  int p() const noexcept { return p_; }
  int N() const noexcept { return N_; }
  int k() const noexcept { return k_; }
  int I() const noexcept { return I_; }
  int J() const noexcept { return J_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(I_) * static_cast<std::size_t>(J_); }

  /// i in [-N, N], j in [-Np, Np].
  int node(int i, int j) const noexcept { return (j + N_ * p_) * I_ + (i + N_); }
  int eta_index(int node) const noexcept { return node % I_ - N_; }
  int v_index(int node) const noexcept { return node / I_ - N_ * p_; }
  double eta(int i) const noexcept { return i * delta_; }
  double v(int j) const noexcept { return j * delta_ / p_; }

  /// Static phase D0: the v = 0 row inside the band |i| <= k.
  bool is_static(int node) const noexcept {
    const int i = eta_index(node);
    return v_index(node) == 0 && i >= -k_ && i <= k_;
  }
  Mode mode(int node) const noexcept;

  int s_plus() const noexcept { return node(k_ + 1, 0); }
  int s_minus() const noexcept { return node(-k_ - 1, 0); }

  /// f evaluated at every node.
  Vec sample(flow::Functional f) const;
  Vec sample(const std::function<double(double eta, Mode nu, double v)>& f) const;

 private:
  Model model_;
  int p_, N_, k_, I_, J_;
  double delta_;
};

/// Generator matrix of the discretized process. With `absorbing` set, two
/// extra states s'+ (index size()) and s'- (size()+1) with zero rows receive
/// the jumps out of the static band.
struct OperatorMatrix {
  Grid grid;
  SpMat M;
  bool absorbing = false;

  int s_prime_plus() const noexcept { return static_cast<int>(grid.size()); }
  int s_prime_minus() const noexcept { return static_cast<int>(grid.size()) + 1; }
};

struct AssembleOptions {
  double memory_budget_bytes = 4.0 * 1024 * 1024 * 1024;
};

/// Rough peak memory of a factorization: nnz * 12 bytes * 30 (fill-in).
double estimated_bytes(std::size_t nnz) noexcept;
std::size_t estimated_nnz(const Grid& grid) noexcept;

/// Upwind transport in v plus the eta jump part. Throws ResourceError when
/// the estimate exceeds the memory budget.
OperatorMatrix assemble(const Model& model, int p, const AssembleOptions& options = {});
OperatorMatrix modified_assemble(const Model& model, int p, const AssembleOptions& options = {});

/// Factorized lambda I - M with reuse across right-hand sides.
class Resolvent {
 public:
  Resolvent(const OperatorMatrix& op, double lambda);
  Vec solve(const Vec& f);
  double lambda() const noexcept { return lambda_; }
  const SolveReport& report() const noexcept { return lu_.report(); }

 private:
  double lambda_;
  linalg::RealLU lu_;
};

struct ResolventSolution {
  Vec u;
  SolveReport report;
};
ResolventSolution resolvent_solve(const OperatorMatrix& op, double lambda, const Vec& f);

/// S1..S4 as lambda * u_lambda(f) at s+ (and at s- for the ergodicity check).
struct DetStatistics {
  std::array<double, 4> at_s_plus{};
  std::array<double, 4> at_s_minus{};
  SolveReport report;
  std::size_t nodes = 0;
};
DetStatistics stationary_statistics_det(const OperatorMatrix& op, double lambda = 1e-6);
DetStatistics stationary_statistics_det(const Model& model, int p, double lambda = 1e-6,
                                        const AssembleOptions& options = {});

/// Probability vector with M^T pi = 0, by shifted inverse iteration.
Vec stationary_measure_grid(const OperatorMatrix& op, int max_iterations = 50, double tol = 1e-12);

/// Solves (lambda - M)_AA u_A = f_A + M_AF g_F where F is the set of nodes
/// with fixed[n] true, and returns u with u_F = g_F.
class DirichletProblem {
 public:
  DirichletProblem(const SpMat& M, double lambda, std::vector<char> fixed);
  Vec solve(const Vec& f, const Vec& g);
  /// Row `node` of (lambda - M)_AA^{-1} M_AF, i.e. the value at `node` of the
  /// solutions with g = unit vector, one entry per fixed node (in index order).
  Vec boundary_weights_at(int node);
  const std::vector<int>& fixed_nodes() const noexcept { return fixed_list_; }
  const SolveReport& report() const noexcept { return lu_->report(); }

 private:
  SpMat M_AF_;
  SpMat A_;
  std::vector<int> free_of_;  // node -> free index or -1
  std::vector<int> free_list_;
  std::vector<int> fixed_list_;
  std::size_t n_;
  std::optional<linalg::RealLU> lu_;
  std::optional<linalg::RealLU> lu_transposed_;
};

/// h+, h- and w(.; f) for the absorbing chain, indexed like the modified
/// matrix (grid nodes followed by s'+ and s'-).
class ModifiedSolver {
 public:
  ModifiedSolver(const OperatorMatrix& modified, double lambda);
  const Vec& h_plus() const noexcept { return h_plus_; }
  const Vec& h_minus() const noexcept { return h_minus_; }
  /// f holds one value per grid node.
  Vec w(const Vec& f);
  double lambda() const noexcept { return lambda_; }
  const SolveReport& report() const noexcept { return lu_->report(); }

 private:
  std::size_t n_;
  double lambda_;
  std::optional<linalg::RealLU> lu_;
  Vec h_plus_, h_minus_;
};

struct HW {
  Vec h_plus, h_minus, w;
};
HW solve_h_w(const OperatorMatrix& modified, double lambda, const Vec& f);

/// pi_lambda(f) and mu_lambda(f) of the representation formula.
double pi_lambda(const Grid& grid, const Vec& w_f, const Vec& w_one);
double mu_lambda(const Grid& grid, const Vec& w_f, const Vec& h_plus, const Vec& h_minus);

/// u_lambda on the grid nodes from the absorbing-chain quantities.
Vec representation_u_lambda(const Grid& grid, const Vec& h_plus, const Vec& h_minus, const Vec& w_f,
                            const Vec& w_one, double lambda);

/// pi(f) = (w0(s+; f) + w0(s-; f)) / (2 w0(s+; 1)).
double stationary_average_w0(const Grid& grid, ModifiedSolver& lambda_zero, const Vec& f);

/// Generator of the forcing chain restricted to the static strip |i| <= k;
/// exits to +-(k+1) are absorbing and not represented.
Eigen::MatrixXd strip_generator(const Model& model);

struct PStickSystems {
  Vec W_hat;        ///< mean time to reach D0
  Vec W_check;      ///< mean time to reach (+-k, 0, 0)
  Vec W_strip;      ///< mean exit time of the static strip, index i + k
  double expected_tau_hat1 = 0.0;
  double expected_tau1 = 0.0;
  double p_stick = 0.0;
};
PStickSystems p_stick_systems(const OperatorMatrix& op);

/// Laplace transform of the strip exit time from each i in [-k, k].
Vec strip_laplace(const Model& model, double lambda);

/// Harmonic measure of D0 seen from a node: entry k + m is the probability
/// that the first static state is (m, 0, 0), m in [-k, k].
Vec harmonic_measure_at(const OperatorMatrix& op, int node);

/// All harmonic measures as functions of the start node (one column per m).
Eigen::MatrixXd harmonic_measures(const OperatorMatrix& op);

/// Stick-duration transform built from a precomputed harmonic measure.
class StickLaplace {
 public:
  explicit StickLaplace(const OperatorMatrix& op);
  double operator()(double lambda) const;
  const Vec& harmonic_measure() const noexcept { return P_hat_; }
  /// Exact density at 0+: Lambda (alpha_k P_k + (1 - alpha_-k) P_-k).
  double density_at_zero() const;

 private:
  Model model_;
  Vec P_hat_;
};

double laplace_stick(const OperatorMatrix& op, double lambda);

struct SlidLaplace {
  double via_G = 0.0;
  double via_w = 0.0;
};
/// Slide-duration transform by the Dirichlet route G and the w identity.
SlidLaplace laplace_slid(const OperatorMatrix& op, const OperatorMatrix& modified, double lambda);
double laplace_slid_G(const OperatorMatrix& op, double lambda);

struct F0Result {
  double value = 0.0;
  bool monotone_tail = true;
  std::vector<double> lambda;
  std::vector<double> lambda_F;
};

/// f(0+) = lim lambda F(lambda) as lambda -> infinity, by polynomial
/// extrapolation in 1/lambda to 0 through all grid points.
F0Result f0_from_laplace(const std::function<double(double)>& F, const std::vector<double>& lambda_grid);

/// Geometric grid base * 2^e for e in [e_lo, e_hi].
std::vector<double> geometric_grid(double base, int e_lo, int e_hi);

/// S_v(omega) = 2 Re sum_n pi_n v_n phi_n with (i omega - M) phi = v.
std::vector<double> psd(const OperatorMatrix& op, const Vec& pi, const std::vector<double>& omega);

/// Empirical order log2(|u^p - u^{p/2}| / |u^{2p} - u^p|) in the max norm.
double kappa(const Vec& u_half, const Vec& u, const Vec& u_double);
double kappa(double u_half, double u, double u_double);

/// kappa(p) of S1..S4 for each p in `ps`, from lambda u on the grids p/2, p
/// and 2p compared on the nodes of the p/2 grid. Each grid is solved once.
std::map<int, std::array<double, 4>> kappa_statistics(const Model& model, const std::vector<int>& ps,
                                                      double lambda = 1e-6,
                                                      const AssembleOptions& options = {});

/// Values of a fine-grid function at the nodes of a coarser grid (same eta
/// lattice, p_coarse dividing p_fine).
Vec restrict_to(const Grid& fine, const Vec& u, const Grid& coarse);

}  // namespace dryfric::kolmogorov
