#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tenscert/rankone.hpp"
#include "tenscert/tensor.hpp"

namespace tenscert {

// Candidate nonnegative rank-r approximation: r rank-one terms with
// entrywise-nonnegative mode vectors, plus the cached composite sum.
struct NNFactors {
  int r = 0;
  // terms[p][i] = u_{i,p}; every entry >= 0, no term identically zero after
  // finalization
  std::vector<std::vector<std::vector<double>>> terms;
  DenseTensor<double> composite;

  static NNFactors from_terms(const Index& shape,
                              std::vector<std::vector<std::vector<double>>> terms);
};

struct KKTWitness {
  int mode = -1;
  int term = -1;
  int coord = -1;
};

// Stationarity report for the nonnegative problem: inequality defects over all
// coordinate directions and equality defects over support directions.
struct KKTReport {
  double max_equality_violation = 0;
  double max_inequality_violation = 0;
  KKTWitness witness;  // location of the largest violation, if any
  bool has_witness = false;
};

struct AnlsRestartResult {
  NNFactors factors;
  double residual = 0;
  bool converged = false;
  bool monotone = true;  // residual nonincreasing across block updates
  int sweeps = 0;
};

struct AnlsResult {
  NNFactors best;
  double residual = 0;
  int best_restart = 0;
  bool converged = false;
  std::vector<AnlsRestartResult> restarts;
};

// Alternating nonnegative least squares: one mode slab at a time via projected
// coordinate descent; restarts in parallel with a deterministic merge
// (smallest residual wins, ties to the lowest restart index).
AnlsResult anls(const NonnegTensor<double>& t, int r, int restarts, std::uint64_t seed,
                double tol = 1e-12, int max_iters = 500);

// Same algorithm without the sign requirement on T (the factors stay
// nonnegative); used for fitting residual tensors in the deflation study.
AnlsResult anls_general(const DenseTensor<double>& t, int r, int restarts, std::uint64_t seed,
                        double tol = 1e-12, int max_iters = 500);

// Checks the first-order conditions of the nonnegative approximation problem:
// <T - X, u_{1,p} x..x e_j x..x u_{d,p}> <= 0 for every coordinate direction,
// with equality on the support of u_{i,p}. Entries <= tol count as
// off-support.
KKTReport kkt_verify(const DenseTensor<double>& t, const NNFactors& f, double tol = 0.0);

struct ResidualWitness {
  Index index;
  double value = 0;
};

// Coordinate with (T - X) entry > threshold, if any (largest entry returned).
std::optional<ResidualWitness> residual_positive_witness(const DenseTensor<double>& t,
                                                         const NNFactors& f,
                                                         double threshold = 0.0);

// Operational check that F genuinely uses r terms: no term is numerically zero
// and patching an (r-1)-term truncation with the single-coordinate improvement
// step cannot beat F by more than tol.
bool exact_rank_check(const DenseTensor<double>& t, const NNFactors& f, double tol);

struct DeflationReport {
  double sequential_residual = 0;            // greedy: rank-one, clip, rank-one
  double sequential_residual_unclipped = 0;  // second step fit on the raw residual
  double joint_residual = 0;                 // anls with r = 2
  double gap = 0;                            // sequential - joint
  double overlap = 0;                        // <outer(u), outer(v)> of the two greedy terms
  int restarts = 0;
  std::uint64_t seed = 0;
};

// Deflation-versus-joint experiment for a strictly positive tensor whose
// nonnegative rank exceeds 2 (the caller asserts the rank condition).
DeflationReport compare_deflation(const DenseTensor<double>& t, int restarts, std::uint64_t seed);

// Distinct factor classes across the r = 1 restart results (dedup tolerance as
// in the rank-one module).
int count_rank_one_classes(const std::vector<AnlsRestartResult>& restarts, double tol = 1e-6);

}  // namespace tenscert
