#pragma once

#include <Eigen/Dense>

#include "evcrp/codec.hpp"
#include "evcrp/instance.hpp"
#include "evcrp/solution.hpp"

namespace evcrp::postproc {

// Candidate ordering inside a cell; gain is the default, utility keeps the
// literal sort of the routine's pseudocode available.
enum class SortKey { Gain, Utility };

struct PostprocParams {
  SortKey sort = SortKey::Gain;
};

struct ExtractStats {
  int negative_clamped = 0; // cells whose prediction was < 0
  int nan_clamped = 0;      // cells whose prediction was NaN
};

// Turns a predicted label vector into a feasible schedule: floors the
// predictions to per-cell budgets, then sweeps cells station by station
// (highest-gain band first, lowest-demand band first), admitting sorted
// candidates through incremental feasibility checks. A user admitted in
// one cell is skipped everywhere else. Feasible for arbitrary real-valued
// predictions. Throws evcrp::codec_mismatch_error when y_hat's length
// does not match the instance under `params`.
Solution extract_solution(const Instance& instance,
                          const Eigen::VectorXd& y_hat,
                          const codec::CodecParams& params,
                          const PostprocParams& postproc = {},
                          ExtractStats* stats = nullptr);

}  // namespace evcrp::postproc
