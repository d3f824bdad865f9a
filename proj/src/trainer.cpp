#include "disenlink/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "disenlink/errors.hpp"
#include "disenlink/metrics.hpp"

namespace disenlink {

TrainResult train(const AttributedGraph& graph, const EdgeSplit& split, const Hyperparams& hp_in,
                  const EpochHook& hook) {
  Hyperparams hp = hp_in;
  hp.hidden = hp.resolved_hidden();
  hp.validate();

  TrainResult result;
  result.state = ModelState::init(graph.feature_dim(), hp);

  const DirectedAdj adj = DirectedAdj::from_undirected(split.train_pos, graph.num_nodes);
  const std::vector<std::vector<int32_t>> train_nbrs = adj.neighbor_lists();
  const FeatureSet features = FeatureSet::prepare(graph.features, hp);

  // Validation pairs are scored on every epoch's forward pass; they carry no
  // loss term, so the model never trains on them.
  PairList valid_pairs;
  for (const Edge& e : split.valid_pos) {
    valid_pairs.src.push_back(e.first);
    valid_pairs.dst.push_back(e.second);
  }
  for (const Edge& e : split.valid_neg) {
    valid_pairs.src.push_back(e.first);
    valid_pairs.dst.push_back(e.second);
  }
  const bool has_valid = !split.valid_pos.empty() && !split.valid_neg.empty();

  std::vector<Tensor> best_params = result.state.param_copy();
  double best_auc = -std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int evals_since_improvement = 0;

  for (int epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    int64_t skipped = 0;
    const auto negatives = sample_training_negatives(train_nbrs, graph.num_nodes, adj.src,
                                                     hp.train_negatives, hp.seed, epoch, &skipped);
    result.skipped_negative_sources += skipped;

    Tape tape;
    Forward fwd = run_forward(tape, features.input(), adj, result.state);

    PairList pos_pairs;
    pos_pairs.src = adj.src;
    pos_pairs.dst = adj.dst;
    PairList neg_pairs;
    std::vector<int32_t> negatives_per_positive;
    negatives_per_positive.reserve(negatives.size());
    for (size_t i = 0; i < negatives.size(); ++i) {
      for (int32_t m : negatives[i]) {
        neg_pairs.src.push_back(adj.src[i]);
        neg_pairs.dst.push_back(m);
      }
      negatives_per_positive.push_back(static_cast<int32_t>(negatives[i].size()));
    }

    NodeId pos_scores = score_pairs(tape, fwd.z, fwd.h, pos_pairs, hp.tau, hp.variant);
    NodeId neg_scores = score_pairs(tape, fwd.z, fwd.h, neg_pairs, hp.tau, hp.variant);
    NodeId loss = training_loss(tape, pos_scores, neg_scores, negatives_per_positive);
    const double loss_value = tape.value(loss)[0];

    double valid_auc = 0.0;
    if (has_valid) {
      NodeId vscores = score_pairs(tape, fwd.z, fwd.h, valid_pairs, hp.tau, hp.variant);
      const Tensor& sv = tape.value(vscores);
      std::vector<double> vpos(sv.data.begin(),
                               sv.data.begin() + static_cast<int64_t>(split.valid_pos.size()));
      std::vector<double> vneg(sv.data.begin() + static_cast<int64_t>(split.valid_pos.size()),
                               sv.data.end());
      if (sv.all_finite()) valid_auc = auc_score(vpos, vneg);
    }

    if (hook) {
      EpochInspection inspection;
      inspection.epoch = epoch;
      inspection.tape = &tape;
      inspection.forward = &fwd;
      inspection.adj = &adj;
      hook(inspection);
    }

    if (!std::isfinite(loss_value)) {
      result.epochs_run = epoch;
      result.stop_reason = "diverged";
      result.clamp_saturations += tape.clamp_saturations();
      EpochTrace row{epoch, loss_value, valid_auc, 0.0};
      row.elapsed_ms = std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t0).count();
      result.trace.push_back(row);
      break;
    }

    const bool eval_epoch = (epoch % hp.eval_every == 0) || epoch == hp.max_epochs;
    if (eval_epoch && has_valid) {
      if (valid_auc > best_auc) {
        best_auc = valid_auc;
        best_epoch = epoch;
        best_params = result.state.param_copy();
        evals_since_improvement = 0;
      } else {
        ++evals_since_improvement;
      }
    }

    tape.backward(loss);
    std::vector<Tensor> grads;
    grads.reserve(fwd.params.w1.size() * 2);
    auto collect = [&](const std::vector<NodeId>& ids, size_t k) {
      grads.push_back(tape.grad(ids[k]));
    };
    for (size_t k = 0; k < fwd.params.w1.size(); ++k) {
      collect(fwd.params.w1, k);
      collect(fwd.params.w2, k);
      if (hp.use_bias) {
        collect(fwd.params.b1, k);
        collect(fwd.params.b2, k);
      }
    }
    std::vector<Tensor> params = result.state.param_copy();
    adam_step(result.state.opt, params, grads);
    result.state.set_params(params);

    result.clamp_saturations += tape.clamp_saturations();
    EpochTrace row{epoch, loss_value, valid_auc, 0.0};
    row.elapsed_ms = std::chrono::duration<double, std::milli>(
        std::chrono::steady_clock::now() - t0).count();
    result.trace.push_back(row);
    result.epochs_run = epoch;

    if (eval_epoch && has_valid && evals_since_improvement >= hp.patience) {
      result.stop_reason = "early_stop";
      break;
    }
  }

  if (result.stop_reason.empty()) result.stop_reason = "max_epochs";
  if (has_valid && best_epoch > 0) {
    result.state.set_params(best_params);
    result.best_valid_auc = best_auc;
    result.best_epoch = best_epoch;
  } else {
    result.best_valid_auc = result.trace.empty() ? 0.0 : result.trace.back().valid_auc;
    result.best_epoch = result.epochs_run;
  }
  return result;
}

void save_trace_csv(const std::vector<EpochTrace>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write trace csv: " + path);
  out << "epoch,train_loss,valid_auc,elapsed_ms\n";
  for (const EpochTrace& row : trace) {
    out << row.epoch << "," << format_double(row.train_loss) << ","
        << format_double(row.valid_auc) << "," << format_double(row.elapsed_ms) << "\n";
  }
}

}  // namespace disenlink
