#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "dryfric/model.hpp"
#include "dryfric/rng.hpp"

namespace dryfric::noise_chain {

/// Up-jump probability at a lattice point. Throws InvalidArgument when eta is
/// off the lattice or outside [-N delta, N delta].
double alpha(double eta, const Params& params);

/// Tridiagonal generator of the forcing chain, rows/cols indexed by i + N.
struct ChainGenerator {
  Eigen::SparseMatrix<double> Q;
  double rate = 0.0;
  int N = 0;
};

ChainGenerator chain_generator(const Model& model);

/// Exact invariant law of the chain, indexed by i + N. Detailed balance
/// g(i+1)/g(i) = alpha(i)/(1-alpha(i+1)), accumulated in log space.
std::vector<double> invariant_measure(const Model& model);

/// Invariant mass of the static band |eta| <= mu_s.
double band_mass(const Model& model);

/// One jump from index i: i+1 with probability alpha(i), else i-1.
inline int sample_jump(const Model& model, int i, Rng& rng) {
  return uniform01(rng) < model.alpha(i) ? i + 1 : i - 1;
}

}  // namespace dryfric::noise_chain
