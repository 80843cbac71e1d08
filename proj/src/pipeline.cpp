#include "pst/pipeline.hpp"

#include <chrono>
#include <exception>

namespace pst {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<std::size_t> Recipe::widths() const {
  std::vector<std::size_t> w = body_widths;
  w.push_back(output_width);
  return w;
}

Recipe default_recipe() {
  Recipe r;
  r.ternary.loss = LossKind::kMse;
  r.ternary.learning_rate = 0.01;
  r.binary.loss = LossKind::kCrossEntropy;
  r.binary.learning_rate = 0.01;
  r.binary.lambda_max = 0.0;
  return r;
}

PreparedData prepare_data(const Recipe& recipe, EncodingMode mode) {
  GenParams gp;
  gp.kind = recipe.kind;
  gp.n = recipe.n_train + recipe.n_test;
  gp.noise = recipe.noise;
  gp.separation = recipe.separation;
  gp.seed = recipe.data_seed;
  PreparedData d;
  d.split = split_dataset(gen_dataset(gp), recipe.n_test);
  d.encoder = fit_encoder(d.split.train, recipe.thresholds, recipe.delta, mode, recipe.placement);
  d.train = encode_dataset(d.split.train, d.encoder);
  d.test = encode_dataset(d.split.test, d.encoder);
  return d;
}

TernaryRun run_ternary(const Recipe& recipe, const PreparedData& data) {
  TernaryRun run;
  const auto widths = recipe.widths();
  run.net = init_network(widths, data.train.dim, recipe.readout, recipe.net_seed);
  TrainConfig cfg = recipe.ternary;
  const auto start = Clock::now();
  run.history = train(run.net, data.train, cfg);
  run.train_seconds = seconds_since(start);
  run.circuit = harden_network(run.net);
  run.gap = gap_report(run.net, run.circuit, data.test);
  run.predictions = predict_all(run.circuit, data.test);
  run.encoder_unknown_share = unknown_input_share(data.test);
  return run;
}

TernaryRun run_ternary(const Recipe& recipe) {
  return run_ternary(recipe, prepare_data(recipe, EncodingMode::kTernary));
}

BinaryRun run_binary(const Recipe& recipe, const PreparedData& data) {
  BinaryRun run;
  const auto widths = recipe.widths();
  run.net = init_binary_network(widths, data.train.dim, recipe.readout, recipe.net_seed);
  const auto start = Clock::now();
  run.history = train_binary(run.net, data.train, recipe.binary);
  run.train_seconds = seconds_since(start);
  run.circuit = harden_binary(run.net);
  run.gap = gap_report(run.net, run.circuit, data.test);
  run.predictions = predict_all(run.circuit, data.test);
  return run;
}

BinaryRun run_binary(const Recipe& recipe) {
  return run_binary(recipe, prepare_data(recipe, EncodingMode::kBinaryThermometer));
}

std::vector<SeparationRow> separation_sweep(const std::vector<double>& seps, const Recipe& recipe,
                                            bool with_binary) {
  std::vector<SeparationRow> rows;
  for (double sep : seps) {
    SeparationRow row;
    row.separation = sep;
    row.bayes_accuracy = bayes_accuracy_gaussians(sep);
    try {
      Recipe r = recipe;
      r.kind = DatasetKind::kGaussians;
      r.separation = sep;
      const auto t = run_ternary(r);
      row.ternary_accuracy = t.gap.circuit_accuracy;
      row.unknown_fraction = t.gap.unknown_fraction;
      if (with_binary) row.binary_accuracy = run_binary(r).gap.circuit_accuracy;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<DeltaRow> delta_sweep(const std::vector<double>& deltas, const Recipe& recipe,
                                  const std::vector<std::uint64_t>& seeds) {
  std::vector<DeltaRow> rows;
  for (double delta : deltas) {
    DeltaRow row;
    row.delta = delta;
    try {
      Recipe r = recipe;
      r.delta = delta;
      const auto data = prepare_data(r, EncodingMode::kTernary);
      row.encoder_unknown_share = unknown_input_share(data.test);
      double acc = 0.0, unk = 0.0;
      for (auto seed : seeds) {
        r.net_seed = seed;
        r.ternary.seed = seed;
        const auto t = run_ternary(r, data);
        row.accuracies.push_back(t.gap.circuit_accuracy);
        acc += t.gap.circuit_accuracy;
        unk += t.gap.unknown_fraction;
      }
      if (!seeds.empty()) {
        row.mean_accuracy = acc / static_cast<double>(seeds.size());
        row.unknown_fraction = unk / static_cast<double>(seeds.size());
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::size_t> resolution_body_widths(std::size_t resolution) {
  return std::vector<std::size_t>(3, 64 * resolution);
}

std::vector<ResolutionRow> resolution_sweep(const std::vector<std::size_t>& resolutions, const Recipe& recipe) {
  std::vector<ResolutionRow> rows;
  for (std::size_t res : resolutions) {
    ResolutionRow row;
    row.resolution = res;
    try {
      if (res < 2) throw std::invalid_argument("resolution must be >= 2");
      Recipe r = recipe;
      r.thresholds = res - 1;
      r.body_widths = resolution_body_widths(res);
      row.thresholds = r.thresholds;
      row.body_widths = r.body_widths;
      const auto data = prepare_data(r, EncodingMode::kTernary);
      row.input_dim = data.train.dim;
      row.encoder_unknown_share = unknown_input_share(data.test);
      const auto t = run_ternary(r, data);
      row.accuracy = t.gap.circuit_accuracy;
      row.unknown_fraction = t.gap.unknown_fraction;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

BenchResult bench_step_time(const Recipe& recipe, std::size_t steps, std::size_t warmup) {
  if (steps == 0) throw std::invalid_argument("bench needs at least one timed step");
  BenchResult res;
  res.steps = steps;
  res.warmup = warmup;
  res.high_variance = steps < 50;

  const auto widths = recipe.widths();
  {
    const auto data = prepare_data(recipe, EncodingMode::kTernary);
    auto net = init_network(widths, data.train.dim, recipe.readout, recipe.net_seed);
    TrainConfig cfg = recipe.ternary;
    cfg.steps = warmup;
    if (warmup > 0) train(net, data.train, cfg);
    cfg.steps = steps;
    const auto start = Clock::now();
    train(net, data.train, cfg);
    res.ternary_seconds_per_step = seconds_since(start) / static_cast<double>(steps);
  }
  {
    const auto data = prepare_data(recipe, EncodingMode::kBinaryThermometer);
    auto net = init_binary_network(widths, data.train.dim, recipe.readout, recipe.net_seed);
    TrainConfig cfg = recipe.binary;
    cfg.steps = warmup;
    if (warmup > 0) train_binary(net, data.train, cfg);
    cfg.steps = steps;
    const auto start = Clock::now();
    train_binary(net, data.train, cfg);
    res.binary_seconds_per_step = seconds_since(start) / static_cast<double>(steps);
  }
  res.ratio = res.binary_seconds_per_step / res.ternary_seconds_per_step;
  return res;
}

}  // namespace pst
