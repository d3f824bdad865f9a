#pragma once

#include <functional>
#include <string>
#include <vector>

#include "disenlink/model.hpp"
#include "disenlink/split.hpp"

namespace disenlink {

struct EpochTrace {
  int epoch = 0;
  double train_loss = 0.0;
  double valid_auc = 0.0;
  double elapsed_ms = 0.0;
};

/// Per-epoch view handed to the inspection hook (used by invariant checks).
struct EpochInspection {
  int epoch = 0;
  const Tape* tape = nullptr;
  const Forward* forward = nullptr;
  const DirectedAdj* adj = nullptr;
};

struct TrainResult {
  ModelState state;  // parameters of the best validation epoch
  std::vector<EpochTrace> trace;
  double best_valid_auc = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
  std::string stop_reason;  // early_stop | max_epochs | diverged
  int64_t clamp_saturations = 0;
  int64_t skipped_negative_sources = 0;
};

using EpochHook = std::function<void(const EpochInspection&)>;

/// Full-batch training on the split's training edges. Each epoch rebuilds
/// the forward pass (importance and selection recomputed from the current
/// projections), resamples the per-positive training negatives, evaluates
/// validation AUC, and applies one Adam update. Message passing and the
/// loss only ever see training edges. Early-stops when validation AUC has
/// not improved for hp.patience consecutive evaluations (every
/// hp.eval_every epochs). Divergence (non-finite loss) aborts with the
/// trace accumulated so far.
TrainResult train(const AttributedGraph& graph, const EdgeSplit& split, const Hyperparams& hp,
                  const EpochHook& hook = nullptr);

/// Trace CSV: header epoch,train_loss,valid_auc,elapsed_ms.
void save_trace_csv(const std::vector<EpochTrace>& trace, const std::string& path);

}  // namespace disenlink
