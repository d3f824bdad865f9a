#include "disenlink/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "disenlink/errors.hpp"
#include "disenlink/metrics.hpp"

namespace disenlink {

namespace {

constexpr const char* kMagic = "disenlink-checkpoint v1";

}  // namespace

void save_checkpoint(const ModelState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write checkpoint: " + path);
  const Hyperparams& hp = state.hp;
  out << kMagic << "\n";
  out << "factors " << hp.factors << "\n";
  out << "embed_dim " << hp.embed_dim << "\n";
  out << "hidden " << hp.resolved_hidden() << "\n";
  out << "feature_dim " << state.feature_dim << "\n";
  out << "seed " << hp.seed << "\n";
  out << "tau " << format_double(hp.tau) << "\n";
  out << "beta " << format_double(hp.beta) << "\n";
  out << "train_negatives " << hp.train_negatives << "\n";
  out << "lr " << format_double(hp.lr) << "\n";
  out << "weight_decay " << format_double(hp.weight_decay) << "\n";
  out << "max_epochs " << hp.max_epochs << "\n";
  out << "eval_every " << hp.eval_every << "\n";
  out << "patience " << hp.patience << "\n";
  out << "variant " << variant_name(hp.variant) << "\n";
  out << "normalize_features " << (hp.normalize_features ? 1 : 0) << "\n";
  out << "use_bias " << (hp.use_bias ? 1 : 0) << "\n";

  const std::vector<std::string> names = state.param_names();
  std::vector<const Tensor*> tensors;
  for (int k = 0; k < hp.factors; ++k) {
    tensors.push_back(&state.w1[static_cast<size_t>(k)]);
    tensors.push_back(&state.w2[static_cast<size_t>(k)]);
    if (hp.use_bias) {
      tensors.push_back(&state.b1[static_cast<size_t>(k)]);
      tensors.push_back(&state.b2[static_cast<size_t>(k)]);
    }
  }
  out << "params " << tensors.size() << "\n";
  for (size_t i = 0; i < tensors.size(); ++i) {
    const Tensor& t = *tensors[i];
    out << "tensor " << names[i];
    for (int64_t dim : t.shape) out << " " << dim;
    out << "\n";
    for (size_t j = 0; j < t.data.size(); ++j) {
      out << format_double(t.data[j]) << (j + 1 == t.data.size() ? "" : " ");
    }
    out << "\n";
  }
}

ModelState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_error", "cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    fail("checkpoint_error", path + ": not a checkpoint file");
  }

  Hyperparams hp;
  int64_t feature_dim = 0;
  size_t num_params = 0;
  auto expect = [&](const std::string& key) -> std::istringstream {
    if (!std::getline(in, line)) fail("checkpoint_error", path + ": truncated header");
    std::istringstream ls(line);
    std::string got;
    ls >> got;
    if (got != key) fail("checkpoint_error", path + ": expected '" + key + "', got '" + got + "'");
    return ls;
  };
  expect("factors") >> hp.factors;
  expect("embed_dim") >> hp.embed_dim;
  expect("hidden") >> hp.hidden;
  expect("feature_dim") >> feature_dim;
  expect("seed") >> hp.seed;
  expect("tau") >> hp.tau;
  expect("beta") >> hp.beta;
  expect("train_negatives") >> hp.train_negatives;
  expect("lr") >> hp.lr;
  expect("weight_decay") >> hp.weight_decay;
  expect("max_epochs") >> hp.max_epochs;
  expect("eval_every") >> hp.eval_every;
  expect("patience") >> hp.patience;
  std::string variant;
  expect("variant") >> variant;
  hp.variant = parse_variant(variant);
  int flag = 0;
  expect("normalize_features") >> flag;
  hp.normalize_features = flag != 0;
  expect("use_bias") >> flag;
  hp.use_bias = flag != 0;
  expect("params") >> num_params;

  ModelState state = ModelState::init(feature_dim, hp);
  const std::vector<std::string> names = state.param_names();
  const std::vector<Tensor> expected_shapes = state.param_copy();
  if (num_params != names.size()) {
    fail("checkpoint_error", path + ": parameter count does not match hyperparameters");
  }
  std::vector<Tensor> params;
  params.reserve(num_params);
  for (size_t i = 0; i < num_params; ++i) {
    if (!std::getline(in, line)) fail("checkpoint_error", path + ": truncated tensor header");
    std::istringstream hs(line);
    std::string tag, name;
    hs >> tag >> name;
    if (tag != "tensor" || name != names[i]) {
      fail("checkpoint_error", path + ": expected tensor " + names[i]);
    }
    std::vector<int64_t> shape;
    int64_t dim;
    while (hs >> dim) shape.push_back(dim);
    if (shape != expected_shapes[i].shape) {
      fail("checkpoint_error", path + ": tensor " + names[i] + " shape mismatch");
    }
    Tensor t = Tensor::zeros(shape);
    if (!std::getline(in, line)) fail("checkpoint_error", path + ": truncated tensor values");
    std::istringstream vs(line);
    for (size_t j = 0; j < t.data.size(); ++j) {
      if (!(vs >> t.data[j])) fail("checkpoint_error", path + ": too few values for " + names[i]);
    }
    params.push_back(std::move(t));
  }
  state.set_params(params);
  return state;
}

}  // namespace disenlink
