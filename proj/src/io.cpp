#include "pst/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pst {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-empty line split on whitespace; throws at end of input.
  std::vector<std::string> next(const std::string& expecting) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      std::istringstream ss(line);
      std::vector<std::string> tok;
      for (std::string t; ss >> t;) tok.push_back(t);
      if (!tok.empty()) return tok;
    }
    fail(expecting, "unexpected end of file");
  }

  std::vector<std::string> expect(const std::string& key, std::size_t min_values) {
    auto tok = next(key);
    if (tok[0] != key) fail(key, "found '" + tok[0] + "'");
    if (tok.size() < min_values + 1) fail(key, "missing values");
    return tok;
  }

  [[noreturn]] void fail(const std::string& field, const std::string& why) const {
    throw FormatError("line " + std::to_string(line_no_) + ": field '" + field + "': " + why);
  }

  std::uint64_t to_u64(const std::string& s, const std::string& field) const {
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) fail(field, "not an unsigned integer: '" + s + "'");
    return v;
  }

  double to_double(const std::string& s, const std::string& field) const {
    double v = 0.0;
    if (!parse_double(s, v)) fail(field, "not a number: '" + s + "'");
    return v;
  }

 private:
  std::istream& is_;
  std::size_t line_no_ = 0;
};

void write_header(std::ostream& os, const ConnectivityMap& w, const GroupSumConfig& g) {
  os << "input_dim " << w.input_dim << '\n';
  os << "widths";
  for (auto n : w.widths()) os << ' ' << n;
  os << '\n';
  os << "seed " << w.seed << '\n';
  os << "groupsum " << g.k << ' ' << format_double(g.tau) << " contiguous divide\n";
}

struct Header {
  ConnectivityMap wiring;
  GroupSumConfig readout;
  std::vector<std::size_t> widths;
};

Header read_header(LineReader& r) {
  Header h;
  h.wiring.input_dim = r.to_u64(r.expect("input_dim", 1)[1], "input_dim");
  const auto wt = r.expect("widths", 1);
  for (std::size_t i = 1; i < wt.size(); ++i) h.widths.push_back(r.to_u64(wt[i], "widths"));
  h.wiring.seed = r.to_u64(r.expect("seed", 1)[1], "seed");
  const auto gs = r.expect("groupsum", 2);
  h.readout.k = static_cast<int>(r.to_u64(gs[1], "groupsum"));
  h.readout.tau = r.to_double(gs[2], "groupsum");
  if (gs.size() >= 4 && (gs[3] != "contiguous" || (gs.size() >= 5 && gs[4] != "divide"))) {
    r.fail("groupsum", "unsupported convention");
  }
  h.wiring.layers.resize(h.widths.size());
  return h;
}

void check_version(LineReader& r, const std::string& magic, int supported) {
  const auto tok = r.next("magic");
  if (tok[0] != magic || tok.size() < 2) r.fail("magic", "not a " + magic + " file");
  const auto v = r.to_u64(tok[1], "version");
  if (v > static_cast<std::uint64_t>(supported)) {
    r.fail("version", "file version " + tok[1] + " is newer than supported " + std::to_string(supported));
  }
}

// Layer body: per neuron "a b v0 ... v{n-1}".
template <typename Store>
void read_layer_rows(LineReader& r, Header& h, std::size_t l, std::size_t values, const std::string& field,
                     Store&& store) {
  const auto lt = r.expect("layer", 1);
  if (r.to_u64(lt[1], "layer") != l) r.fail("layer", "expected layer " + std::to_string(l));
  auto& w = h.wiring.layers[l];
  for (std::size_t j = 0; j < h.widths[l]; ++j) {
    const auto tok = r.next(field);
    if (tok.size() != 2 + values) r.fail(field, "expected " + std::to_string(2 + values) + " values");
    w.src_a.push_back(static_cast<std::uint32_t>(r.to_u64(tok[0], "src_a")));
    w.src_b.push_back(static_cast<std::uint32_t>(r.to_u64(tok[1], "src_b")));
    for (std::size_t k = 0; k < values; ++k) store(j, k, tok[2 + k]);
  }
}

template <typename Net>
void validate_loaded(LineReader& r, const Net& net) {
  try {
    net.validate();
  } catch (const std::invalid_argument& e) {
    r.fail("structure", e.what());
  }
}

}  // namespace

void write_checkpoint(std::ostream& os, const PstNetwork& net) {
  net.validate();
  os << "pst-checkpoint " << kCheckpointVersion << '\n' << "arch ternary\n";
  write_header(os, net.wiring, net.readout);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    os << "layer " << l << '\n';
    const auto& w = net.wiring.layers[l];
    for (std::size_t j = 0; j < w.width(); ++j) {
      os << w.src_a[j] << ' ' << w.src_b[j];
      for (double c : net.weights(l, j)) os << ' ' << format_double(c);
      os << '\n';
    }
  }
}

void write_checkpoint(std::ostream& os, const BinaryDlgnNetwork& net) {
  net.validate();
  os << "pst-checkpoint " << kCheckpointVersion << '\n' << "arch binary\n";
  write_header(os, net.wiring, net.readout);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    os << "layer " << l << '\n';
    const auto& w = net.wiring.layers[l];
    for (std::size_t j = 0; j < w.width(); ++j) {
      os << w.src_a[j] << ' ' << w.src_b[j];
      for (double c : net.gate_logits(l, j)) os << ' ' << format_double(c);
      os << '\n';
    }
  }
}

Checkpoint read_checkpoint(std::istream& is) {
  LineReader r(is);
  check_version(r, "pst-checkpoint", kCheckpointVersion);
  const auto arch = r.expect("arch", 1)[1];
  if (arch != "ternary" && arch != "binary") r.fail("arch", "unknown architecture '" + arch + "'");
  Header h = read_header(r);
  const std::size_t per = arch == "ternary" ? 9 : kNumBooleanGates;
  const std::string field = arch == "ternary" ? "coeffs" : "logits";
  std::vector<std::vector<double>> params(h.widths.size());
  for (std::size_t l = 0; l < h.widths.size(); ++l) {
    params[l].assign(per * h.widths[l], 0.0);
    read_layer_rows(r, h, l, per, field, [&](std::size_t j, std::size_t k, const std::string& s) {
      params[l][per * j + k] = r.to_double(s, field);
    });
  }
  if (arch == "ternary") {
    PstNetwork net{h.wiring, h.readout, std::move(params)};
    validate_loaded(r, net);
    return net;
  }
  BinaryDlgnNetwork net{h.wiring, h.readout, std::move(params)};
  validate_loaded(r, net);
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ostringstream os;
  std::visit([&](const auto& net) { write_checkpoint(os, net); }, ckpt);
  write_text_file(path, os.str());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open checkpoint " + path.string());
  try {
    return read_checkpoint(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_circuit(std::ostream& os, const Circuit& c) {
  c.validate();
  os << "pst-circuit " << kCircuitVersion << '\n';
  os << "source_arch " << (c.provenance.source_arch.empty() ? "-" : c.provenance.source_arch) << '\n';
  os << "source_hash " << (c.provenance.source_hash.empty() ? "-" : c.provenance.source_hash) << '\n';
  os << "hardened_at " << (c.provenance.hardened_at.empty() ? "-" : c.provenance.hardened_at) << '\n';
  write_header(os, c.wiring, c.readout);
  for (std::size_t l = 0; l < c.depth(); ++l) {
    os << "layer " << l << '\n';
    const auto& w = c.wiring.layers[l];
    for (std::size_t j = 0; j < w.width(); ++j) {
      os << w.src_a[j] << ' ' << w.src_b[j] << ' ' << c.gates[l][j].value << '\n';
    }
  }
}

Circuit read_circuit(std::istream& is) {
  LineReader r(is);
  check_version(r, "pst-circuit", kCircuitVersion);
  auto opt = [](const std::string& s) { return s == "-" ? std::string() : s; };
  Circuit c;
  c.provenance.source_arch = opt(r.expect("source_arch", 1)[1]);
  c.provenance.source_hash = opt(r.expect("source_hash", 1)[1]);
  c.provenance.hardened_at = opt(r.expect("hardened_at", 1)[1]);
  Header h = read_header(r);
  c.gates.resize(h.widths.size());
  for (std::size_t l = 0; l < h.widths.size(); ++l) {
    c.gates[l].resize(h.widths[l]);
    read_layer_rows(r, h, l, 1, "gate", [&](std::size_t j, std::size_t, const std::string& s) {
      const auto v = r.to_u64(s, "gate");
      if (v >= kNumGates) r.fail("gate", "gate id out of range: " + s);
      c.gates[l][j] = GateId{static_cast<std::uint16_t>(v)};
    });
  }
  c.wiring = std::move(h.wiring);
  c.readout = h.readout;
  validate_loaded(r, c);
  return c;
}

void save_circuit(const std::filesystem::path& path, const Circuit& circuit) {
  std::ostringstream os;
  write_circuit(os, circuit);
  write_text_file(path, os.str());
}

Circuit load_circuit(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open circuit " + path.string());
  try {
    return read_circuit(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

nlohmann::json to_json(const EncoderConfig& cfg) {
  nlohmann::json j;
  j["thresholds"] = cfg.thresholds;
  j["resolution"] = cfg.thresholds + 1;
  j["delta"] = cfg.delta;
  j["mode"] = cfg.mode == EncodingMode::kTernary ? "ternary" : "binary_thermometer";
  j["placement"] = cfg.placement == ThresholdPlacement::kUniform ? "uniform" : "quantile";
  j["ranges"] = nlohmann::json::array();
  for (const auto& r : cfg.ranges) j["ranges"].push_back({r.lo, r.hi});
  j["theta"] = cfg.theta;
  j["half_band"] = cfg.half_band;
  return j;
}

EncoderConfig encoder_from_json(const nlohmann::json& j) {
  try {
    EncoderConfig cfg;
    cfg.thresholds = j.at("thresholds").get<std::size_t>();
    cfg.delta = j.at("delta").get<double>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "ternary") cfg.mode = EncodingMode::kTernary;
    else if (mode == "binary_thermometer") cfg.mode = EncodingMode::kBinaryThermometer;
    else throw DataError("encoder: unknown mode '" + mode + "'");
    cfg.placement = j.at("placement").get<std::string>() == "quantile" ? ThresholdPlacement::kQuantile
                                                                        : ThresholdPlacement::kUniform;
    for (const auto& r : j.at("ranges")) cfg.ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    cfg.theta = j.at("theta").get<std::vector<std::vector<double>>>();
    cfg.half_band = j.at("half_band").get<std::vector<std::vector<double>>>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("encoder: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("encoder: ") + e.what());
  }
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"steps", cfg.steps},
          {"batch_size", cfg.batch_size},
          {"learning_rate", cfg.learning_rate},
          {"lambda_max", cfg.lambda_max},
          {"gamma", cfg.gamma},
          {"fourier_weight", cfg.fourier_weight},
          {"loss", to_string(cfg.loss)},
          {"seed", cfg.seed},
          {"eval_every", cfg.eval_every}};
}

nlohmann::json to_json(const GapReport& r) {
  nlohmann::json j{{"samples", r.samples},
                   {"soft_accuracy", r.soft_accuracy},
                   {"circuit_accuracy", r.circuit_accuracy},
                   {"gap_pp", r.gap_pp},
                   {"unknown_fraction", r.unknown_fraction}};
  j["hardening_error"] = r.hardening_error ? nlohmann::json(*r.hardening_error) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const StepRecord& r) {
  nlohmann::json j{{"step", r.step},
                   {"task_loss", r.task_loss},
                   {"commit_loss", r.commit_loss},
                   {"lambda", r.lambda},
                   {"total_loss", r.total_loss}};
  if (r.eval_accuracy) j["eval_accuracy"] = *r.eval_accuracy;
  return j;
}

void write_history(std::ostream& os, const History& h) {
  for (const auto& rec : h.records) os << to_json(rec).dump() << '\n';
}

History read_history(std::istream& is) {
  History h;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      StepRecord r;
      r.step = j.at("step").get<std::size_t>();
      r.task_loss = j.at("task_loss").get<double>();
      r.commit_loss = j.at("commit_loss").get<double>();
      r.lambda = j.at("lambda").get<double>();
      r.total_loss = j.at("total_loss").get<double>();
      if (j.contains("eval_accuracy")) r.eval_accuracy = j["eval_accuracy"].get<double>();
      h.records.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("history line " + std::to_string(n) + ": " + e.what());
    }
  }
  return h;
}

void Table::write(std::ostream& os) const {
  for (const auto& c : comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "\t" : "") << columns[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "\t" : "") << row[i];
    os << '\n';
  }
}

std::string pct(double fraction, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << 100.0 * fraction;
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write " + path.string());
  os << contents;
  if (!os) throw DataError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace pst
