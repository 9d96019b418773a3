#include "dryfric/kolmogorov.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <sstream>

#include "dryfric/error.hpp"

namespace dryfric::kolmogorov {

namespace {

using Triplet = Eigen::Triplet<double, int>;

SpMat identity(std::size_t n) {
  SpMat I(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  I.setIdentity();
  return I;
}

SpMat shifted(const SpMat& M, double lambda) {
  SpMat A = lambda * identity(static_cast<std::size_t>(M.rows())) - M;
  A.makeCompressed();
  return A;
}

// Upper-left n x n block, and the columns n.. restricted to the first n rows.
SpMat leading_block(const SpMat& M, Eigen::Index n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(M.nonZeros()));
  for (Eigen::Index c = 0; c < n; ++c)
    for (SpMat::InnerIterator it(M, c); it; ++it)
      if (it.row() < n) t.emplace_back(static_cast<int>(it.row()), static_cast<int>(c), it.value());
  SpMat B(n, n);
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

Vec column_head(const SpMat& M, Eigen::Index col, Eigen::Index n) {
  Vec out = Vec::Zero(n);
  for (SpMat::InnerIterator it(M, col); it; ++it)
    if (it.row() < n) out[it.row()] = it.value();
  return out;
}

std::vector<char> static_mask(const Grid& g) {
  std::vector<char> fixed(g.size(), 0);
  for (int i = -g.k(); i <= g.k(); ++i) fixed[static_cast<std::size_t>(g.node(i, 0))] = 1;
  return fixed;
}

constexpr std::array<flow::Functional, 4> kStatFunctionals = {
    flow::Functional::stick_indicator, flow::Functional::v_squared,
    flow::Functional::band_indicator, flow::Functional::eta_squared};

void require_plain(const OperatorMatrix& op, const char* what) {
  if (op.absorbing) throw InvalidArgument(std::string(what) + " needs the unmodified operator");
}

OperatorMatrix assemble_impl(const Model& model, int p, const AssembleOptions& options,
                             bool absorbing) {
  Grid grid(model, p);
  const double need = estimated_bytes(estimated_nnz(grid));
  if (need > options.memory_budget_bytes) {
    std::ostringstream os;
    os << "grid with N_p = " << grid.size() << " nodes needs an estimated " << need
       << " bytes, above the memory budget of " << options.memory_budget_bytes << " bytes";
    throw ResourceError(os.str());
  }

  const Params& prm = model.params();
  const int N = grid.N(), k = grid.k(), Np = grid.N() * p;
  const double Lambda = model.jump_rate();
  const double c = p / prm.delta;
  const auto n = static_cast<int>(grid.size());
  const int s_prime_plus = n, s_prime_minus = n + 1;

  std::vector<Triplet> t;
  t.reserve(5 * grid.size());
  for (int j = -Np; j <= Np; ++j) {
    for (int i = -N; i <= N; ++i) {
      const int r = grid.node(i, j);
      const bool is_static = j == 0 && i >= -k && i <= k;
      if (!is_static) {
        const double B = drift(grid.eta(i), grid.mode(r), grid.v(j), prm);
        if (B > 0.0) {
          if (j == Np) throw NumericError("upwind stencil leaves the grid at v = +v_max");
          t.emplace_back(r, grid.node(i, j + 1), c * B);
          t.emplace_back(r, r, -c * B);
        } else if (B < 0.0) {
          if (j == -Np) throw NumericError("upwind stencil leaves the grid at v = -v_max");
          t.emplace_back(r, grid.node(i, j - 1), -c * B);
          t.emplace_back(r, r, c * B);
        }
      }
      // On the v = 0 row only the static band sees the forcing jumps; the
      // rest of that row is pure transport.
      if (j != 0 || is_static) {
        const double a = model.alpha(i);
        if (a > 0.0) {
          const int east = (absorbing && is_static && i == k) ? s_prime_plus : grid.node(i + 1, j);
          t.emplace_back(r, east, Lambda * a);
        }
        if (a < 1.0) {
          const int west = (absorbing && is_static && i == -k) ? s_prime_minus : grid.node(i - 1, j);
          t.emplace_back(r, west, Lambda * (1.0 - a));
        }
        t.emplace_back(r, r, -Lambda);
      }
    }
  }
  const int size = absorbing ? n + 2 : n;
  SpMat M(size, size);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  return OperatorMatrix{std::move(grid), std::move(M), absorbing};
}

}  // namespace

Grid::Grid(const Model& model, int p) : model_(model), p_(p) {
  if (p < 1) throw InvalidArgument("grid refinement p must be >= 1");
  N_ = model.N();
  k_ = model.k_mu_s();
  delta_ = model.delta();
  I_ = 2 * N_ + 1;
  const long long J = 2LL * N_ * p + 1;
  if (J * I_ + 2 > std::numeric_limits<int>::max())
    throw ResourceError("grid too large for 32-bit node indices");
  J_ = static_cast<int>(J);
}

Mode Grid::mode(int node) const noexcept {
  const int j = v_index(node);
  if (j > 0) return Mode::positive;
  if (j < 0) return Mode::negative;
  const int i = eta_index(node);
  if (i >= -k_ && i <= k_) return Mode::stuck;
  return i > 0 ? Mode::positive : Mode::negative;
}

Vec Grid::sample(flow::Functional f) const {
  Vec out(static_cast<Eigen::Index>(size()));
  for (int n = 0; n < static_cast<int>(size()); ++n) {
    const int i = eta_index(n);
    const double e = eta(i), vv = v(v_index(n));
    double x = 0.0;
    switch (f) {
      case flow::Functional::one: x = 1.0; break;
      case flow::Functional::v_squared: x = vv * vv; break;
      case flow::Functional::eta_squared: x = e * e; break;
      case flow::Functional::stick_indicator: x = is_static(n) ? 1.0 : 0.0; break;
      case flow::Functional::band_indicator: x = (i >= -k_ && i <= k_) ? 1.0 : 0.0; break;
      case flow::Functional::velocity: x = vv; break;
      case flow::Functional::eta: x = e; break;
    }
    out[n] = x;
  }
  return out;
}

Vec Grid::sample(const std::function<double(double, Mode, double)>& f) const {
  Vec out(static_cast<Eigen::Index>(size()));
  for (int n = 0; n < static_cast<int>(size()); ++n)
    out[n] = f(eta(eta_index(n)), mode(n), v(v_index(n)));
  return out;
}

double estimated_bytes(std::size_t nnz) noexcept {
  return static_cast<double>(nnz) * 12.0 * 30.0;
}

std::size_t estimated_nnz(const Grid& grid) noexcept { return 5 * grid.size(); }

OperatorMatrix assemble(const Model& model, int p, const AssembleOptions& options) {
  return assemble_impl(model, p, options, false);
}

OperatorMatrix modified_assemble(const Model& model, int p, const AssembleOptions& options) {
  return assemble_impl(model, p, options, true);
}

Resolvent::Resolvent(const OperatorMatrix& op, double lambda)
    : lambda_(lambda), lu_((require_plain(op, "Resolvent"), shifted(op.M, lambda))) {
  if (!(lambda > 0.0)) throw InvalidArgument("resolvent needs lambda > 0");
  lu_.report().lambda = lambda;
}

Vec Resolvent::solve(const Vec& f) { return lu_.solve(f); }

ResolventSolution resolvent_solve(const OperatorMatrix& op, double lambda, const Vec& f) {
  Resolvent R(op, lambda);
  Vec u = R.solve(f);
  return {std::move(u), R.report()};
}

DetStatistics stationary_statistics_det(const OperatorMatrix& op, double lambda) {
  Resolvent R(op, lambda);
  DetStatistics out;
  const Grid& g = op.grid;
  for (std::size_t s = 0; s < kStatFunctionals.size(); ++s) {
    const Vec u = R.solve(g.sample(kStatFunctionals[s]));
    out.at_s_plus[s] = lambda * u[g.s_plus()];
    out.at_s_minus[s] = lambda * u[g.s_minus()];
  }
  out.report = R.report();
  out.nodes = g.size();
  return out;
}

DetStatistics stationary_statistics_det(const Model& model, int p, double lambda,
                                        const AssembleOptions& options) {
  return stationary_statistics_det(assemble(model, p, options), lambda);
}

Vec stationary_measure_grid(const OperatorMatrix& op, int max_iterations, double tol) {
  require_plain(op, "stationary_measure_grid");
  const auto n = op.M.rows();
  // Shifted inverse iteration on the adjoint: the eigenvalue 0 dominates
  // (eps - M^T)^{-1} by a factor |lambda_2| / eps.
  const double eps = 1e-8;
  SpMat Mt = op.M.transpose();
  linalg::RealLU lu(shifted(Mt, eps), 1e-8);
  Vec x = Vec::Constant(n, 1.0 / static_cast<double>(n));
  bool converged = false;
  for (int it = 0; it < max_iterations; ++it) {
    Vec y = lu.solve(x);
    y /= y.sum();
    const double change = (y - x).lpNorm<1>();
    x = std::move(y);
    if (change < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericError("stationary measure: inverse iteration did not converge");
  x = x.cwiseMax(0.0);
  x /= x.sum();
  return x;
}

DirichletProblem::DirichletProblem(const SpMat& M, double lambda, std::vector<char> fixed)
    : n_(static_cast<std::size_t>(M.rows())) {
  if (fixed.size() != n_) throw InvalidArgument("DirichletProblem: mask size mismatch");
  free_of_.assign(n_, -1);
  std::vector<int> fixed_of(n_, -1);
  for (std::size_t r = 0; r < n_; ++r) {
    if (fixed[r]) {
      fixed_of[r] = static_cast<int>(fixed_list_.size());
      fixed_list_.push_back(static_cast<int>(r));
    } else {
      free_of_[r] = static_cast<int>(free_list_.size());
      free_list_.push_back(static_cast<int>(r));
    }
  }
  if (free_list_.empty()) throw InvalidArgument("DirichletProblem: no free nodes");
  std::vector<Triplet> ta, tf;
  ta.reserve(static_cast<std::size_t>(M.nonZeros()));
  for (Eigen::Index c = 0; c < M.outerSize(); ++c) {
    for (SpMat::InnerIterator it(M, c); it; ++it) {
      const int fr = free_of_[static_cast<std::size_t>(it.row())];
      if (fr < 0) continue;
      const int fc = free_of_[static_cast<std::size_t>(c)];
      if (fc >= 0)
        ta.emplace_back(fr, fc, -it.value());
      else
        tf.emplace_back(fr, fixed_of[static_cast<std::size_t>(c)], it.value());
    }
  }
  const auto nf = static_cast<int>(free_list_.size());
  for (int r = 0; r < nf; ++r) ta.emplace_back(r, r, lambda);
  A_.resize(nf, nf);
  A_.setFromTriplets(ta.begin(), ta.end());
  A_.makeCompressed();
  M_AF_.resize(nf, static_cast<int>(fixed_list_.size()));
  M_AF_.setFromTriplets(tf.begin(), tf.end());
  lu_.emplace(A_);
  lu_->report().lambda = lambda;
}

Vec DirichletProblem::solve(const Vec& f, const Vec& g) {
  if (static_cast<std::size_t>(f.size()) != n_ || static_cast<std::size_t>(g.size()) != n_)
    throw InvalidArgument("DirichletProblem::solve: size mismatch");
  const auto nf = static_cast<Eigen::Index>(free_list_.size());
  Vec gF(static_cast<Eigen::Index>(fixed_list_.size()));
  for (std::size_t q = 0; q < fixed_list_.size(); ++q) gF[static_cast<Eigen::Index>(q)] = g[fixed_list_[q]];
  Vec rhs(nf);
  for (Eigen::Index r = 0; r < nf; ++r) rhs[r] = f[free_list_[static_cast<std::size_t>(r)]];
  if (gF.size() > 0) rhs += M_AF_ * gF;
  const Vec uA = lu_->solve(rhs);
  Vec u(static_cast<Eigen::Index>(n_));
  for (Eigen::Index r = 0; r < nf; ++r) u[free_list_[static_cast<std::size_t>(r)]] = uA[r];
  for (int q : fixed_list_) u[q] = g[q];
  return u;
}

Vec DirichletProblem::boundary_weights_at(int node) {
  if (node < 0 || static_cast<std::size_t>(node) >= n_ || free_of_[static_cast<std::size_t>(node)] < 0)
    throw InvalidArgument("boundary_weights_at: node must be a free node");
  if (!lu_transposed_) {
    SpMat At = A_.transpose();
    lu_transposed_.emplace(std::move(At));
  }
  Vec e = Vec::Zero(A_.rows());
  e[free_of_[static_cast<std::size_t>(node)]] = 1.0;
  const Vec y = lu_transposed_->solve(e);
  return M_AF_.transpose() * y;
}

ModifiedSolver::ModifiedSolver(const OperatorMatrix& modified, double lambda)
    : n_(modified.grid.size()), lambda_(lambda) {
  if (!modified.absorbing) throw InvalidArgument("ModifiedSolver needs the modified operator");
  if (lambda < 0.0) throw InvalidArgument("ModifiedSolver needs lambda >= 0");
  const auto n = static_cast<Eigen::Index>(n_);
  lu_.emplace(shifted(leading_block(modified.M, n), lambda));
  lu_->report().lambda = lambda;
  const Vec to_plus = column_head(modified.M, modified.s_prime_plus(), n);
  const Vec to_minus = column_head(modified.M, modified.s_prime_minus(), n);
  h_plus_.resize(n + 2);
  h_minus_.resize(n + 2);
  h_plus_.head(n) = lu_->solve(to_plus);
  h_minus_.head(n) = lu_->solve(to_minus);
  h_plus_[n] = 1.0;
  h_plus_[n + 1] = 0.0;
  h_minus_[n] = 0.0;
  h_minus_[n + 1] = 1.0;
}

Vec ModifiedSolver::w(const Vec& f) {
  const auto n = static_cast<Eigen::Index>(n_);
  if (f.size() != n) throw InvalidArgument("ModifiedSolver::w: f must have one value per grid node");
  Vec out = Vec::Zero(n + 2);
  out.head(n) = lu_->solve(f);
  return out;
}

HW solve_h_w(const OperatorMatrix& modified, double lambda, const Vec& f) {
  ModifiedSolver s(modified, lambda);
  Vec w = s.w(f);
  return {s.h_plus(), s.h_minus(), std::move(w)};
}

double pi_lambda(const Grid& g, const Vec& w_f, const Vec& w_one) {
  return (w_f[g.s_plus()] + w_f[g.s_minus()]) / (2.0 * w_one[g.s_plus()]);
}

double mu_lambda(const Grid& g, const Vec& w_f, const Vec& h_plus, const Vec& h_minus) {
  return (w_f[g.s_plus()] - w_f[g.s_minus()]) /
         (2.0 * (1.0 - h_plus[g.s_plus()] + h_minus[g.s_plus()]));
}

Vec representation_u_lambda(const Grid& g, const Vec& h_plus, const Vec& h_minus, const Vec& w_f,
                            const Vec& w_one, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("representation formula needs lambda > 0");
  const auto n = static_cast<Eigen::Index>(g.size());
  const double pl = pi_lambda(g, w_f, w_one);
  const double ml = mu_lambda(g, w_f, h_plus, h_minus);
  Vec u = w_f.head(n) - pl * w_one.head(n) + ml * (h_plus.head(n) - h_minus.head(n));
  u.array() += pl / lambda;
  return u;
}

double stationary_average_w0(const Grid& g, ModifiedSolver& s, const Vec& f) {
  if (s.lambda() != 0.0) throw InvalidArgument("stationary_average_w0 needs the lambda = 0 solver");
  const Vec wf = s.w(f);
  const Vec w1 = s.w(Vec::Ones(f.size()));
  return pi_lambda(g, wf, w1);
}

Eigen::MatrixXd strip_generator(const Model& model) {
  const int k = model.k_mu_s();
  const int m = 2 * k + 1;
  const double Lambda = model.jump_rate();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  for (int i = -k; i <= k; ++i) {
    const int r = i + k;
    const double a = model.alpha(i);
    Q(r, r) = -Lambda;
    if (i + 1 <= k) Q(r, r + 1) = Lambda * a;
    if (i - 1 >= -k) Q(r, r - 1) = Lambda * (1.0 - a);
  }
  return Q;
}

PStickSystems p_stick_systems(const OperatorMatrix& op) {
  require_plain(op, "p_stick_systems");
  const Grid& g = op.grid;
  const Model& model = g.model();
  const auto n = static_cast<Eigen::Index>(g.size());
  const Vec ones = Vec::Ones(n), zeros = Vec::Zero(n);
  PStickSystems out;

  DirichletProblem to_static(op.M, 0.0, static_mask(g));
  out.W_hat = to_static.solve(ones, zeros);

  std::vector<char> edges(g.size(), 0);
  edges[static_cast<std::size_t>(g.node(g.k(), 0))] = 1;
  edges[static_cast<std::size_t>(g.node(-g.k(), 0))] = 1;
  DirichletProblem to_edges(op.M, 0.0, std::move(edges));
  out.W_check = to_edges.solve(ones, zeros);

  const Eigen::MatrixXd Q = strip_generator(model);
  out.W_strip = (-Q).partialPivLu().solve(Vec::Ones(Q.rows()));

  out.expected_tau_hat1 = out.W_hat[g.s_plus()];
  out.expected_tau1 = out.W_check[g.s_plus()] + out.W_strip[2 * g.k()];
  out.p_stick = 1.0 - out.expected_tau_hat1 / out.expected_tau1;
  return out;
}

Vec strip_laplace(const Model& model, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("strip_laplace needs lambda > 0");
  const int k = model.k_mu_s();
  const Eigen::MatrixXd Q = strip_generator(model);
  const auto m = Q.rows();
  Eigen::MatrixXd A = -Q;
  A.diagonal().array() += lambda;
  Vec b = Vec::Zero(m);
  b[m - 1] += model.jump_rate() * model.alpha(k);
  b[0] += model.jump_rate() * (1.0 - model.alpha(-k));
  return A.partialPivLu().solve(b);
}

Vec harmonic_measure_at(const OperatorMatrix& op, int node) {
  require_plain(op, "harmonic_measure_at");
  DirichletProblem d(op.M, 0.0, static_mask(op.grid));
  return d.boundary_weights_at(node);
}

Eigen::MatrixXd harmonic_measures(const OperatorMatrix& op) {
  require_plain(op, "harmonic_measures");
  const Grid& g = op.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  DirichletProblem d(op.M, 0.0, static_mask(g));
  Eigen::MatrixXd out(n, 2 * g.k() + 1);
  const Vec zeros = Vec::Zero(n);
  for (int m = -g.k(); m <= g.k(); ++m) {
    Vec e = Vec::Zero(n);
    e[g.node(m, 0)] = 1.0;
    out.col(m + g.k()) = d.solve(zeros, e);
  }
  return out;
}

StickLaplace::StickLaplace(const OperatorMatrix& op)
    : model_(op.grid.model()), P_hat_(harmonic_measure_at(op, op.grid.s_plus())) {}

double StickLaplace::operator()(double lambda) const {
  return strip_laplace(model_, lambda).dot(P_hat_);
}

double StickLaplace::density_at_zero() const {
  const int k = model_.k_mu_s();
  return model_.jump_rate() *
         (model_.alpha(k) * P_hat_[2 * k] + (1.0 - model_.alpha(-k)) * P_hat_[0]);
}

double laplace_stick(const OperatorMatrix& op, double lambda) { return StickLaplace(op)(lambda); }

double laplace_slid_G(const OperatorMatrix& op, double lambda) {
  require_plain(op, "laplace_slid_G");
  if (!(lambda > 0.0)) throw InvalidArgument("laplace_slid needs lambda > 0");
  const Grid& g = op.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  DirichletProblem d(op.M, lambda, static_mask(g));
  return d.solve(Vec::Zero(n), Vec::Ones(n))[g.s_plus()];
}

SlidLaplace laplace_slid(const OperatorMatrix& op, const OperatorMatrix& modified, double lambda) {
  SlidLaplace out;
  out.via_G = laplace_slid_G(op, lambda);
  ModifiedSolver s(modified, lambda);
  const Vec dynamic = Vec::Ones(static_cast<Eigen::Index>(op.grid.size())) -
                      op.grid.sample(flow::Functional::stick_indicator);
  out.via_w = 1.0 - lambda * s.w(dynamic)[op.grid.s_plus()];
  return out;
}

F0Result f0_from_laplace(const std::function<double(double)>& F, const std::vector<double>& lambda_grid) {
  if (lambda_grid.size() < 3) throw InvalidArgument("f0_from_laplace needs at least three lambdas");
  F0Result out;
  out.lambda = lambda_grid;
  std::sort(out.lambda.begin(), out.lambda.end());
  if (!(out.lambda.front() > 0.0)) throw InvalidArgument("f0_from_laplace needs positive lambdas");
  for (double l : out.lambda) out.lambda_F.push_back(l * F(l));

  bool up = true, down = true;
  for (std::size_t q = 1; q < out.lambda_F.size(); ++q) {
    up = up && out.lambda_F[q] >= out.lambda_F[q - 1];
    down = down && out.lambda_F[q] <= out.lambda_F[q - 1];
  }
  out.monotone_tail = up || down;

  // Neville's scheme evaluated at x = 1/lambda = 0.
  const std::size_t m = out.lambda.size();
  std::vector<double> x(m), p(out.lambda_F);
  for (std::size_t q = 0; q < m; ++q) x[q] = 1.0 / out.lambda[q];
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t q = 0; q + level < m; ++q)
      p[q] = (-x[q + level] * p[q] + x[q] * p[q + 1]) / (x[q] - x[q + level]);
  out.value = p[0];
  return out;
}

std::vector<double> geometric_grid(double base, int e_lo, int e_hi) {
  std::vector<double> out;
  for (int e = e_lo; e <= e_hi; ++e) out.push_back(std::ldexp(base, e));
  return out;
}

std::vector<double> psd(const OperatorMatrix& op, const Vec& pi, const std::vector<double>& omega) {
  require_plain(op, "psd");
  const Grid& g = op.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  if (pi.size() != n) throw InvalidArgument("psd: stationary measure has the wrong size");
  const Vec v = g.sample(flow::Functional::velocity);
  const Vec piv = pi.cwiseProduct(v);
  std::vector<double> out;
  out.reserve(omega.size());
  for (double w : omega) {
    if (w == 0.0) {
      // The zero-frequency problem is singular along constants; shift by a
      // tiny eps and remove the constant component afterwards.
      linalg::RealLU lu(shifted(op.M, 1e-8), 1e-8);
      Vec phi = lu.solve(v);
      phi.array() -= pi.dot(phi);
      out.push_back(2.0 * piv.dot(phi));
      continue;
    }
    linalg::SpMatC A = op.M.cast<std::complex<double>>();
    A = -A;
    linalg::SpMatC D(n, n);
    D.setIdentity();
    A += std::complex<double>(0.0, w) * D;
    linalg::ComplexLU lu(std::move(A));
    const linalg::VecC phi = lu.solve(v.cast<std::complex<double>>());
    out.push_back(2.0 * (piv.cast<std::complex<double>>().dot(phi)).real());
  }
  return out;
}

double kappa(const Vec& u_half, const Vec& u, const Vec& u_double) {
  if (u_half.size() != u.size() || u.size() != u_double.size())
    throw InvalidArgument("kappa: inputs must live on common nodes");
  const double coarse = (u - u_half).lpNorm<Eigen::Infinity>();
  const double fine = (u_double - u).lpNorm<Eigen::Infinity>();
  if (fine == 0.0) throw NumericError("kappa: zero denominator");
  return std::log2(coarse / fine);
}

double kappa(double u_half, double u, double u_double) {
  Vec a(1), b(1), c(1);
  a << u_half;
  b << u;
  c << u_double;
  return kappa(a, b, c);
}

Vec restrict_to(const Grid& fine, const Vec& u, const Grid& coarse) {
  if (fine.N() != coarse.N() || fine.p() % coarse.p() != 0)
    throw InvalidArgument("restrict_to: grids are not nested");
  if (u.size() != static_cast<Eigen::Index>(fine.size()))
    throw InvalidArgument("restrict_to: vector does not match the fine grid");
  const int r = fine.p() / coarse.p();
  Vec out(static_cast<Eigen::Index>(coarse.size()));
  for (int n = 0; n < static_cast<int>(coarse.size()); ++n)
    out[n] = u[fine.node(coarse.eta_index(n), coarse.v_index(n) * r)];
  return out;
}

std::map<int, std::array<double, 4>> kappa_statistics(const Model& model, const std::vector<int>& ps,
                                                      double lambda, const AssembleOptions& options) {
  struct Solved {
    Grid grid;
    std::array<Vec, 4> lambda_u;
  };
  std::map<int, Solved> solved;
  for (int p : ps) {
    if (p < 2 || p % 2 != 0) throw InvalidArgument("kappa_statistics: p must be even and >= 2");
    for (int q : {p / 2, p, 2 * p}) {
      if (solved.count(q)) continue;
      const auto op = assemble(model, q, options);
      Resolvent R(op, lambda);
      Solved s{op.grid, {}};
      for (std::size_t k = 0; k < kStatFunctionals.size(); ++k)
        s.lambda_u[k] = lambda * R.solve(op.grid.sample(kStatFunctionals[k]));
      solved.emplace(q, std::move(s));
    }
  }
  std::map<int, std::array<double, 4>> out;
  for (int p : ps) {
    const Solved &a = solved.at(p / 2), &b = solved.at(p), &c = solved.at(2 * p);
    for (std::size_t k = 0; k < 4; ++k)
      out[p][k] = kappa(a.lambda_u[k], restrict_to(b.grid, b.lambda_u[k], a.grid),
                        restrict_to(c.grid, c.lambda_u[k], a.grid));
  }
  return out;
}

}  // namespace dryfric::kolmogorov
