#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "pst/analysis.hpp"
#include "pst/io.hpp"
#include "pst/pipeline.hpp"

namespace pst {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "pst_out";
}

void guard_outputs(const fs::path& dir, const std::vector<std::string>& names, bool force) {
  if (force) return;
  for (const auto& n : names) {
    if (fs::exists(dir / n)) throw UsageError("output " + (dir / n).string() + " exists; pass --force to overwrite");
  }
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

json decision_flags() {
  return {{"argmax_tie_break", "lowest index"},
          {"groupsum", "contiguous groups, sum divided by tau"},
          {"lambda_update", "per step, lambda(step + 1)"},
          {"clip_boundary_subgradient", 1},
          {"dist_breakpoint_derivative", "left"},
          {"fourier_sign_at_zero", 0},
          {"unknown_fraction", "per output neuron per sample"},
          {"auc", "mean accuracy over coverage grid 5%..100%, printed negated"},
          {"gini", "over vocabulary-wide gate counts"},
          {"execution", "serial"}};
}

struct Manifest {
  std::string command;
  json config = json::object();
  json artifacts = json::object();
  json timings = json::object();
  json extra = json::object();

  void add_artifact(const fs::path& p) { artifacts[p.filename().string()] = sha256_file(p); }

  void write(const fs::path& dir, const std::string& effective_config) const {
    json j;
    j["format"] = "pst-manifest";
    j["version"] = 1;
    j["command"] = command;
    j["config"] = config;
    j["effective_config"] = effective_config;
    j["decisions"] = decision_flags();
    j["artifacts"] = artifacts;
    j["timings_seconds"] = timings;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    write_text_file(dir / "manifest.json", j.dump(2) + "\n");
  }
};

std::string render(const Table& t) {
  std::ostringstream os;
  t.write(os);
  return os.str();
}

EncoderConfig load_encoder(const std::string& explicit_path, const fs::path& sibling_of) {
  const fs::path p = explicit_path.empty() ? sibling_of.parent_path() / "encoder.json" : fs::path(explicit_path);
  if (!fs::exists(p)) throw DataError("encoder config not found: " + p.string());
  try {
    return encoder_from_json(json::parse(read_text_file(p)));
  } catch (const json::parse_error& e) {
    throw DataError("encoder config " + p.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

struct GenDataOpts {
  std::string kind = "moons";
  std::size_t n = 2500;
  std::size_t test = 500;
  double noise = 0.5;
  double separation = 3.0;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

struct TrainOpts {
  std::string train;
  std::string test;
  std::string arch = "ternary";
  std::vector<std::size_t> widths{512, 512, 512};
  std::size_t output_width = 200;
  int k = 2;
  double tau = 10.0;
  std::size_t thresholds = 3;
  double delta = 1.0;
  std::string placement = "uniform";
  std::size_t steps = 5000;
  std::size_t batch = 100;
  double lr = 0.01;
  double lambda_max = 0.1;
  double gamma = 2.0;
  double fourier_weight = 0.0;
  std::string loss;
  std::uint64_t seed = 0;
  std::size_t eval_every = 0;
  std::string out;
  bool force = false;
};

struct HardenOpts {
  std::string checkpoint;
  std::string data;
  std::string encoder;
  std::string out;
  bool force = false;
};

struct EvalOpts {
  std::string circuit;
  std::string data;
  std::string encoder;
  bool selective = false;
  bool diversity = false;
  bool spectral = false;
  std::string out;
  bool force = false;
};

struct SweepOpts {
  std::string kind;
  std::vector<double> values;
  std::vector<std::size_t> resolutions{2, 4, 8, 16};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::size_t steps = 5000;
  std::vector<std::size_t> widths{512, 512, 512};
  std::size_t n = 2500;
  double noise = 0.5;
  std::uint64_t data_seed = 0;
  bool no_binary = false;
  std::string out;
  bool force = false;
};

struct BenchOpts {
  std::vector<std::size_t> widths{512, 512, 512};
  std::size_t output_width = 200;
  std::size_t steps = 200;
  std::size_t warmup = 20;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

// ---------------------------------------------------------------------------

int cmd_gen_data(const GenDataOpts& o, const std::string& effective, std::ostream& out) {
  GenParams gp;
  gp.kind = parse_dataset_kind(o.kind);
  gp.n = o.n;
  gp.noise = o.noise;
  gp.separation = o.separation;
  gp.seed = o.seed;
  if (o.test >= o.n) throw UsageError("--test must be smaller than --n");
  const fs::path dir = o.out.empty() ? default_out_dir() : o.out;
  guard_outputs(dir, {"train.csv", "test.csv", "manifest.json"}, o.force);

  const auto t0 = Clock::now();
  auto split = split_dataset(gen_dataset(gp), o.test);
  save_csv(dir / "train.csv", split.train);
  save_csv(dir / "test.csv", split.test);

  Manifest m;
  m.command = "gen-data";
  m.config = {{"kind", o.kind}, {"n", o.n},         {"test", o.test},
              {"noise", o.noise}, {"separation", o.separation}, {"seed", o.seed}};
  m.add_artifact(dir / "train.csv");
  m.add_artifact(dir / "test.csv");
  m.timings["generate"] = seconds_since(t0);
  m.write(dir, effective);
  out << "wrote " << split.train.size() << " train and " << split.test.size() << " test rows to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_train(const TrainOpts& o, const std::string& effective, std::ostream& out) {
  const bool ternary = o.arch == "ternary";
  if (!ternary && o.arch != "binary") throw UsageError("--arch must be ternary or binary");
  GroupSumConfig readout{o.k, o.tau};
  try {
    readout.validate(o.output_width);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<std::size_t> widths = o.widths;
  widths.push_back(o.output_width);
  if (std::find(widths.begin(), widths.end(), std::size_t{0}) != widths.end()) throw UsageError("widths must be positive");

  TrainConfig cfg;
  cfg.steps = o.steps;
  cfg.batch_size = o.batch;
  cfg.learning_rate = o.lr;
  cfg.lambda_max = ternary ? o.lambda_max : 0.0;
  cfg.gamma = o.gamma;
  cfg.fourier_weight = ternary ? o.fourier_weight : 0.0;
  cfg.loss = o.loss.empty() ? (ternary ? LossKind::kMse : LossKind::kCrossEntropy) : parse_loss_kind(o.loss);
  cfg.seed = o.seed;
  cfg.eval_every = o.eval_every;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const fs::path dir = o.out.empty() ? default_out_dir() : o.out;
  guard_outputs(dir, {"checkpoint.txt", "encoder.json", "history.jsonl", "manifest.json"}, o.force);

  Manifest m;
  m.command = "train";
  auto t0 = Clock::now();
  const Dataset train_ds = load_csv(o.train);
  const auto placement = o.placement == "quantile" ? ThresholdPlacement::kQuantile : ThresholdPlacement::kUniform;
  if (o.placement != "uniform" && o.placement != "quantile") throw UsageError("--placement must be uniform or quantile");
  const auto mode = ternary ? EncodingMode::kTernary : EncodingMode::kBinaryThermometer;
  const EncoderConfig enc = fit_encoder(train_ds, o.thresholds, o.delta, mode, placement);
  const EncodedSet train_enc = encode_dataset(train_ds, enc);
  std::optional<EncodedSet> test_enc;
  if (!o.test.empty()) test_enc = encode_dataset(load_csv(o.test), enc);
  if (train_enc.num_classes > o.k) throw DataError("dataset has more classes than --k");
  m.timings["load_encode"] = seconds_since(t0);

  t0 = Clock::now();
  History history;
  Checkpoint ckpt;
  const EncodedSet* eval_set = test_enc ? &*test_enc : nullptr;
  double final_soft = -1.0;
  if (ternary) {
    auto net = init_network(widths, train_enc.dim, readout, o.seed);
    history = pst::train(net, train_enc, cfg, eval_set);
    if (eval_set) final_soft = soft_accuracy(net, *eval_set);
    ckpt = std::move(net);
  } else {
    auto net = init_binary_network(widths, train_enc.dim, readout, o.seed);
    history = train_binary(net, train_enc, cfg, eval_set);
    if (eval_set) final_soft = soft_accuracy(net, *eval_set);
    ckpt = std::move(net);
  }
  m.timings["train"] = seconds_since(t0);

  save_checkpoint(dir / "checkpoint.txt", ckpt);
  write_text_file(dir / "encoder.json", to_json(enc).dump(2) + "\n");
  std::ostringstream hist;
  write_history(hist, history);
  write_text_file(dir / "history.jsonl", hist.str());

  m.config = {{"arch", o.arch},
              {"train", o.train},
              {"test", o.test},
              {"widths", widths},
              {"groupsum", {{"k", o.k}, {"tau", o.tau}}},
              {"encoder", {{"thresholds", o.thresholds}, {"resolution", o.thresholds + 1}, {"delta", o.delta},
                           {"placement", o.placement}}},
              {"training", to_json(cfg)}};
  m.extra["seeds"] = {{"connectivity", o.seed}, {"parameters", o.seed}, {"minibatch", o.seed}};
  m.add_artifact(dir / "checkpoint.txt");
  m.add_artifact(dir / "encoder.json");
  m.add_artifact(dir / "history.jsonl");
  if (final_soft >= 0.0) m.extra["test_soft_accuracy"] = final_soft;
  m.write(dir, effective);

  out << "trained " << o.arch << " network (" << history.records.size() << " steps, resolution "
      << o.thresholds + 1 << ")";
  if (!history.records.empty()) out << ", final task loss " << format_double(history.records.back().task_loss);
  if (final_soft >= 0.0) out << ", test soft accuracy " << pct(final_soft) << "%";
  out << '\n';
  return kExitOk;
}

Table gap_table(const GapReport& r) {
  Table t;
  t.columns = {"samples", "soft_acc_pct", "circuit_acc_pct", "gap_pp", "unk_pct", "hardening_error"};
  std::ostringstream gap;
  gap.setf(std::ios::fixed);
  gap.precision(2);
  gap << r.gap_pp;
  t.rows.push_back({std::to_string(r.samples), pct(r.soft_accuracy), pct(r.circuit_accuracy), gap.str(),
                    pct(r.unknown_fraction), r.hardening_error ? format_double(*r.hardening_error) : "-"});
  return t;
}

int cmd_harden(const HardenOpts& o, const std::string& effective, std::ostream& out) {
  const fs::path dir = o.out.empty() ? default_out_dir() : o.out;
  std::vector<std::string> outputs{"circuit.txt", "manifest.json"};
  if (!o.data.empty()) outputs.push_back("gap.tsv");
  guard_outputs(dir, outputs, o.force);

  Manifest m;
  m.command = "harden";
  auto t0 = Clock::now();
  const auto ckpt = load_checkpoint(o.checkpoint);
  Circuit circuit = std::visit(
      [](const auto& net) {
        if constexpr (std::is_same_v<std::decay_t<decltype(net)>, PstNetwork>) return harden_network(net);
        else return harden_binary(net);
      },
      ckpt);
  circuit.provenance.source_hash = sha256_file(o.checkpoint);
  circuit.provenance.hardened_at = utc_timestamp();
  save_circuit(dir / "circuit.txt", circuit);
  m.timings["harden"] = seconds_since(t0);
  m.add_artifact(dir / "circuit.txt");
  m.config = {{"checkpoint", o.checkpoint}, {"data", o.data}, {"encoder", o.encoder}};

  const fs::path enc_src = o.encoder.empty() ? fs::path(o.checkpoint).parent_path() / "encoder.json" : fs::path(o.encoder);
  if (fs::exists(enc_src) && fs::absolute(enc_src) != fs::absolute(dir / "encoder.json")) {
    fs::create_directories(dir);
    fs::copy_file(enc_src, dir / "encoder.json", fs::copy_options::overwrite_existing);
  }

  if (!o.data.empty()) {
    t0 = Clock::now();
    const auto enc = load_encoder(o.encoder, o.checkpoint);
    const auto set = encode_dataset(load_csv(o.data), enc);
    const GapReport r = std::visit([&](const auto& net) { return gap_report(net, circuit, set); }, ckpt);
    const Table t = gap_table(r);
    write_text_file(dir / "gap.tsv", render(t));
    m.add_artifact(dir / "gap.tsv");
    m.extra["gap_report"] = to_json(r);
    m.timings["gap_report"] = seconds_since(t0);
    t.write(out);
  }
  m.write(dir, effective);
  out << "wrote circuit with " << circuit.neuron_count() << " gates to " << (dir / "circuit.txt").string() << '\n';
  return kExitOk;
}

int cmd_eval(const EvalOpts& o, const std::string& effective, std::ostream& out) {
  if (!fs::exists(o.circuit)) throw UsageError("circuit not found: " + o.circuit);
  if (o.selective && o.data.empty()) throw UsageError("--selective needs --data");
  const fs::path dir = o.out.empty() ? default_out_dir() : o.out;
  std::vector<std::string> outputs{"manifest.json"};
  if (!o.data.empty()) outputs.push_back("metrics.tsv");
  if (o.selective) outputs.push_back("selective.tsv");
  if (o.diversity) outputs.push_back("diversity.tsv");
  if (o.spectral) {
    outputs.push_back("spectral.tsv");
    outputs.push_back("gates.tsv");
  }
  guard_outputs(dir, outputs, o.force);

  Manifest m;
  m.command = "eval";
  m.config = {{"circuit", o.circuit}, {"data", o.data}, {"selective", o.selective},
              {"diversity", o.diversity}, {"spectral", o.spectral}};
  const Circuit circuit = load_circuit(o.circuit);

  if (!o.data.empty()) {
    auto t0 = Clock::now();
    const auto enc = load_encoder(o.encoder, o.circuit);
    const auto set = encode_dataset(load_csv(o.data), enc);
    const auto preds = predict_all(circuit, set);
    Table metrics;
    metrics.columns = {"samples", "circuit_acc_pct", "unk_pct"};
    metrics.rows.push_back({std::to_string(set.size()), pct(preds.accuracy()), pct(preds.unknown_fraction())});
    write_text_file(dir / "metrics.tsv", render(metrics));
    m.add_artifact(dir / "metrics.tsv");
    metrics.write(out);
    if (o.selective) {
      const auto grid = default_retention_grid();
      const auto curve = selective_curve(preds, grid);
      Table t;
      t.comments = {"AUC = mean accuracy over coverage 5%..100%, printed negated",
                    "raw_acc " + pct(preds.accuracy()) + " unk " + pct(preds.unknown_fraction()) + " acc@75 " +
                        pct(accuracy_at(preds, 0.75)) + " acc@50 " + pct(accuracy_at(preds, 0.5)) + " auc " +
                        format_double(-curve.auc)};
      t.columns = {"coverage_pct", "retained", "accuracy_pct"};
      for (const auto& p : curve.points) t.rows.push_back({pct(p.coverage, 0), std::to_string(p.retained), pct(p.accuracy)});
      write_text_file(dir / "selective.tsv", render(t));
      m.add_artifact(dir / "selective.tsv");
      out << "# " << t.comments[1] << '\n';
    }
    m.timings["evaluate"] = seconds_since(t0);
  }
  if (o.diversity) {
    const std::size_t vocab = circuit.provenance.source_arch == "binary" ? kNumBooleanGates : kNumGates;
    const auto d = diversity_report(circuit, vocab);
    Table t;
    t.comments = {"gini over " + std::to_string(vocab) + " possible gates"};
    t.columns = {"neurons", "unique", "eff_div", "gini_pct", "redund_pct", "max_copies", "singletons"};
    t.rows.push_back({std::to_string(d.neurons), std::to_string(d.unique), format_double(d.effective_diversity),
                      pct(d.gini, 1), pct(d.redundancy, 1), std::to_string(d.max_copies), std::to_string(d.singletons)});
    write_text_file(dir / "diversity.tsv", render(t));
    m.add_artifact(dir / "diversity.tsv");
    t.write(out);
  }
  if (o.spectral) {
    const auto p = spectral_profile(circuit);
    Table t;
    if (p.bands.zero_energy) t.comments.push_back("zero total energy");
    t.columns = {"unique_gates", "const_pct", "linear_pct", "quad_pct", "cubic_pct", "quartic_pct", "ternary_pct",
                 "linear", "bilinear", "quadratic", "full"};
    auto cls = [&](SpectralClass c) {
      const auto it = p.classes.find(c);
      return std::to_string(it == p.classes.end() ? 0 : it->second);
    };
    t.rows.push_back({std::to_string(p.unique_gates), pct(p.bands.constant, 1), pct(p.bands.linear, 1),
                      pct(p.bands.quadratic, 1), pct(p.bands.cubic, 1), pct(p.bands.quartic, 1), pct(p.ternary_share, 1),
                      cls(SpectralClass::kLinear), cls(SpectralClass::kBilinear), cls(SpectralClass::kQuadratic),
                      cls(SpectralClass::kFull)});
    write_text_file(dir / "spectral.tsv", render(t));
    m.add_artifact(dir / "spectral.tsv");
    t.write(out);

    Table g;
    g.columns = {"gate_id", "count", "class", "l1", "const", "linear", "quad", "cubic", "quartic"};
    const auto d = diversity_report(circuit);
    for (const auto& [id, count] : d.counts) {
      const auto fhat = fourier_transform(decode(id).as_reals());
      const auto b = spectral_energy_bands(fhat);
      g.rows.push_back({std::to_string(id.value), std::to_string(count),
                        std::string(to_string(spectral_class(fhat, kExactTableTolerance))), format_double(fourier_l1(fhat)),
                        format_double(b.constant), format_double(b.linear), format_double(b.quadratic),
                        format_double(b.cubic), format_double(b.quartic)});
    }
    write_text_file(dir / "gates.tsv", render(g));
    m.add_artifact(dir / "gates.tsv");
  }
  m.write(dir, effective);
  return kExitOk;
}

std::string opt_error(const std::optional<std::string>& e) { return e ? *e : ""; }

int cmd_sweep(const SweepOpts& o, const std::string& effective, std::ostream& out) {
  Recipe r = default_recipe();
  r.ternary.steps = o.steps;
  r.binary.steps = o.steps;
  r.body_widths = o.widths;
  r.n_train = o.n - 500;
  r.noise = o.noise;
  r.data_seed = o.data_seed;
  if (o.n <= 500) throw UsageError("--n must exceed the 500-sample test split");

  const fs::path dir = o.out.empty() ? default_out_dir() : o.out;
  const std::string file = "sweep_" + o.kind + ".tsv";
  guard_outputs(dir, {file, "manifest.json"}, o.force);

  Manifest m;
  m.command = "sweep";
  m.config = {{"kind", o.kind}, {"steps", o.steps}, {"widths", o.widths}, {"n", o.n}, {"noise", o.noise}};
  const auto t0 = Clock::now();
  Table t;
  if (o.kind == "separation") {
    const std::vector<double> seps = o.values.empty() ? std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5, 3.0} : o.values;
    m.config["values"] = seps;
    const auto rows = separation_sweep(seps, r, !o.no_binary);
    t.comments = {"two unit-variance Gaussians, means separation sigmas apart; bayes = Phi(sep / 2)"};
    t.columns = {"sep", "ternary_acc_pct", "unk_pct", "binary_acc_pct", "bayes_pct", "error"};
    for (const auto& row : rows) {
      t.rows.push_back({format_double(row.separation), pct(row.ternary_accuracy), pct(row.unknown_fraction),
                        o.no_binary ? "-" : pct(row.binary_accuracy), pct(row.bayes_accuracy), opt_error(row.error)});
    }
  } else if (o.kind == "delta") {
    const std::vector<double> deltas = o.values.empty() ? std::vector<double>{1.0, 0.5, 0.25, 0.0} : o.values;
    m.config["values"] = deltas;
    m.config["seeds"] = o.seeds;
    const auto rows = delta_sweep(deltas, r, o.seeds);
    t.columns = {"delta", "test_acc_pct", "unk_pct", "encoder_unk_pct", "per_seed_acc_pct", "error"};
    for (const auto& row : rows) {
      std::string per;
      for (double a : row.accuracies) per += (per.empty() ? "" : ",") + pct(a);
      t.rows.push_back({format_double(row.delta), pct(row.mean_accuracy), pct(row.unknown_fraction),
                        pct(row.encoder_unknown_share), per, opt_error(row.error)});
    }
  } else if (o.kind == "resolution") {
    m.config["resolutions"] = o.resolutions;
    const auto rows = resolution_sweep(o.resolutions, r);
    t.comments = {"K = resolution (bins per feature); thresholds per feature = K - 1"};
    t.columns = {"K", "input_dim", "body_widths", "test_acc_pct", "unk_pct", "encoder_unk_pct", "error"};
    for (const auto& row : rows) {
      const std::string widths = row.body_widths.empty() ? "-" : "[" + std::to_string(row.body_widths[0]) + "]^3";
      t.rows.push_back({std::to_string(row.resolution), std::to_string(row.input_dim), widths, pct(row.accuracy),
                        pct(row.unknown_fraction), pct(row.encoder_unknown_share), opt_error(row.error)});
    }
  } else {
    throw UsageError("--kind must be separation, delta, or resolution");
  }
  m.timings["sweep"] = seconds_since(t0);
  write_text_file(dir / file, render(t));
  m.add_artifact(dir / file);
  m.write(dir, effective);
  t.write(out);
  return kExitOk;
}

int cmd_bench(const BenchOpts& o, const std::string& effective, std::ostream& out) {
  if (o.steps == 0) throw UsageError("--steps must be positive");
  Recipe r = default_recipe();
  r.body_widths = o.widths;
  r.output_width = o.output_width;
  r.net_seed = r.ternary.seed = r.binary.seed = o.seed;
  const fs::path dir = o.out.empty() ? default_out_dir() : o.out;
  guard_outputs(dir, {"bench.tsv", "manifest.json"}, o.force);

  const auto res = bench_step_time(r, o.steps, o.warmup);
  Table t;
  if (res.high_variance) t.comments.push_back("warning: fewer than 50 timed steps; timings have wide variance");
  t.columns = {"timed_steps", "warmup_steps", "ternary_ms_per_step", "binary_ms_per_step", "binary_over_ternary"};
  t.rows.push_back({std::to_string(res.steps), std::to_string(res.warmup),
                    format_double(1e3 * res.ternary_seconds_per_step), format_double(1e3 * res.binary_seconds_per_step),
                    format_double(res.ratio)});
  write_text_file(dir / "bench.tsv", render(t));

  Manifest m;
  m.command = "bench";
  m.config = {{"widths", r.widths()}, {"steps", o.steps}, {"warmup", o.warmup}, {"seed", o.seed}};
  m.extra["warmup_steps_excluded"] = o.warmup;
  m.timings["ternary_per_step"] = res.ternary_seconds_per_step;
  m.timings["binary_per_step"] = res.binary_seconds_per_step;
  m.add_artifact(dir / "bench.tsv");
  m.write(dir, effective);
  t.write(out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polynomial surrogate training for ternary logic gate networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; flags override it");

  GenDataOpts g;
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset split");
  gen->add_option("--kind", g.kind, "moons, circles, spirals, gaussians, ring_sector")
      ->check(CLI::IsMember({"moons", "circles", "spirals", "gaussians", "ring_sector"}))
      ->capture_default_str();
  gen->add_option("--n", g.n, "Total samples")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))->capture_default_str();
  gen->add_option("--test", g.test, "Test split size")->capture_default_str();
  gen->add_option("--noise", g.noise, "Gaussian noise sigma")->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->add_option("--separation", g.separation, "Gaussians: mean distance in sigmas")->capture_default_str();
  gen->add_option("--seed", g.seed)->capture_default_str();
  gen->add_option("--out", g.out, "Output directory");
  gen->add_flag("--force", g.force, "Overwrite existing outputs");

  TrainOpts t;
  auto* tr = app.add_subcommand("train", "Train a ternary or binary network");
  tr->add_option("--train", t.train, "Training CSV")->required();
  tr->add_option("--test", t.test, "Optional evaluation CSV");
  tr->add_option("--arch", t.arch)->check(CLI::IsMember({"ternary", "binary"}))->capture_default_str();
  tr->add_option("--widths", t.widths, "Body layer widths")->delimiter(',')->capture_default_str();
  tr->add_option("--output-width", t.output_width)->capture_default_str();
  tr->add_option("--k", t.k, "GroupSum classes")->capture_default_str();
  tr->add_option("--tau", t.tau, "GroupSum temperature")->capture_default_str();
  tr->add_option("--thresholds", t.thresholds, "Thresholds per feature (resolution - 1)")->capture_default_str();
  tr->add_option("--delta", t.delta, "UNKNOWN band width")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  tr->add_option("--placement", t.placement)->check(CLI::IsMember({"uniform", "quantile"}))->capture_default_str();
  tr->add_option("--steps", t.steps)->capture_default_str();
  tr->add_option("--batch-size", t.batch)->capture_default_str();
  tr->add_option("--lr", t.lr)->capture_default_str();
  tr->add_option("--lambda-max", t.lambda_max)->capture_default_str();
  tr->add_option("--gamma", t.gamma)->capture_default_str();
  tr->add_option("--fourier-weight", t.fourier_weight)->capture_default_str();
  tr->add_option("--loss", t.loss, "mse or cross_entropy (default by arch)")->check(CLI::IsMember({"mse", "cross_entropy"}));
  tr->add_option("--seed", t.seed)->capture_default_str();
  tr->add_option("--eval-every", t.eval_every)->capture_default_str();
  tr->add_option("--out", t.out);
  tr->add_flag("--force", t.force);

  HardenOpts h;
  auto* hd = app.add_subcommand("harden", "Harden a checkpoint into a circuit");
  hd->add_option("--checkpoint", h.checkpoint)->required();
  hd->add_option("--data", h.data, "CSV for the gap report");
  hd->add_option("--encoder", h.encoder, "Encoder config (default: next to checkpoint)");
  hd->add_option("--out", h.out);
  hd->add_flag("--force", h.force);

  EvalOpts e;
  auto* ev = app.add_subcommand("eval", "Evaluate and analyze a circuit");
  ev->add_option("--circuit", e.circuit)->required();
  ev->add_option("--data", e.data);
  ev->add_option("--encoder", e.encoder, "Encoder config (default: next to circuit)");
  ev->add_flag("--selective", e.selective, "Coverage curve");
  ev->add_flag("--diversity", e.diversity, "Gate diversity");
  ev->add_flag("--spectral", e.spectral, "Spectral profile");
  ev->add_option("--out", e.out);
  ev->add_flag("--force", e.force);

  SweepOpts s;
  auto* sw = app.add_subcommand("sweep", "Separation, delta, or resolution sweep");
  sw->add_option("--kind", s.kind)->required()->check(CLI::IsMember({"separation", "delta", "resolution"}));
  sw->add_option("--values,--seps", s.values, "Separations or deltas")->delimiter(',');
  sw->add_option("--K", s.resolutions, "Resolutions (bins per feature)")->delimiter(',')->capture_default_str();
  sw->add_option("--seeds", s.seeds)->delimiter(',')->capture_default_str();
  sw->add_option("--steps", s.steps)->capture_default_str();
  sw->add_option("--widths", s.widths)->delimiter(',')->capture_default_str();
  sw->add_option("--n", s.n)->capture_default_str();
  sw->add_option("--noise", s.noise)->capture_default_str();
  sw->add_option("--data-seed", s.data_seed)->capture_default_str();
  sw->add_flag("--no-binary", s.no_binary, "Skip the binary baseline in separation sweeps");
  sw->add_option("--out", s.out);
  sw->add_flag("--force", s.force);

  BenchOpts b;
  auto* bn = app.add_subcommand("bench", "Per-step training time of both architectures");
  bn->add_option("--widths", b.widths)->delimiter(',')->capture_default_str();
  bn->add_option("--output-width", b.output_width)->capture_default_str();
  bn->add_option("--steps", b.steps)->capture_default_str();
  bn->add_option("--warmup", b.warmup)->capture_default_str();
  bn->add_option("--seed", b.seed)->capture_default_str();
  bn->add_option("--out", b.out);
  bn->add_flag("--force", b.force);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string effective = app.config_to_str(true, false);
  try {
    if (*gen) return cmd_gen_data(g, effective, out);
    if (*tr) return cmd_train(t, effective, out);
    if (*hd) return cmd_harden(h, effective, out);
    if (*ev) return cmd_eval(e, effective, out);
    if (*sw) return cmd_sweep(s, effective, out);
    if (*bn) return cmd_bench(b, effective, out);
  } catch (const UsageError& ue) {
    err << "error: " << ue.what() << '\n';
    return kExitUsage;
  } catch (const NumericalFailure& nf) {
    err << "numerical failure: " << nf.what() << '\n';
    return kExitNumerical;
  } catch (const DataError& de) {
    err << "data error: " << de.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& ia) {
    err << "error: " << ia.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace pst
