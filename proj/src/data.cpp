#include "pst/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace pst {

namespace {

using std::numbers::pi;

double arc_distance(double x, double y, double cx, double cy, bool upper) {
  const double dx = x - cx;
  const double dy = y - cy;
  const bool on_side = upper ? dy >= 0.0 : dy <= 0.0;
  if (on_side) return std::abs(std::hypot(dx, dy) - 1.0);
  return std::min(std::hypot(dx - 1.0, dy), std::hypot(dx + 1.0, dy));
}

std::pair<double, double> spiral_point(int cls, double t) {
  const double theta = t * 3.0 * pi;
  const double phase = cls == 0 ? 0.0 : pi;
  return {t * std::cos(theta + phase), t * std::sin(theta + phase)};
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kMoons: return "moons";
    case DatasetKind::kCircles: return "circles";
    case DatasetKind::kSpirals: return "spirals";
    case DatasetKind::kGaussians: return "gaussians";
    case DatasetKind::kRingSector: return "ring_sector";
  }
  return "?";
}

DatasetKind parse_dataset_kind(const std::string& name) {
  for (auto k : {DatasetKind::kMoons, DatasetKind::kCircles, DatasetKind::kSpirals,
                 DatasetKind::kGaussians, DatasetKind::kRingSector}) {
    if (to_string(k) == name) return k;
  }
  if (name == "ring-sector") return DatasetKind::kRingSector;
  throw std::invalid_argument("unknown dataset kind: " + name);
}

void Dataset::validate() const {
  if (size() == 0) throw DataError("dataset is empty");
  if (features.size() != size() * dim) throw DataError("feature matrix shape mismatch");
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw DataError("label out of range: " + std::to_string(y));
  }
}

Dataset gen_dataset(const GenParams& params) {
  if (params.n < 2) throw std::invalid_argument("need n >= 2");
  if (!(params.noise >= 0.0)) throw std::invalid_argument("noise must be >= 0");
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset ds;
  ds.dim = 2;
  ds.num_classes = 2;
  ds.features.reserve(2 * params.n);
  ds.labels.reserve(params.n);

  for (std::size_t i = 0; i < params.n; ++i) {
    const int cls = i < (params.n + 1) / 2 ? 0 : 1;
    double x = 0.0;
    double y = 0.0;
    switch (params.kind) {
      case DatasetKind::kMoons: {
        const double t = pi * unit(rng);
        if (cls == 0) {
          x = std::cos(t);
          y = std::sin(t);
        } else {
          x = 1.0 - std::cos(t);
          y = 0.5 - std::sin(t);
        }
        break;
      }
      case DatasetKind::kCircles: {
        const double t = 2.0 * pi * unit(rng);
        const double r = cls == 0 ? 1.0 : 0.5;
        x = r * std::cos(t);
        y = r * std::sin(t);
        break;
      }
      case DatasetKind::kSpirals: {
        std::tie(x, y) = spiral_point(cls, unit(rng));
        break;
      }
      case DatasetKind::kGaussians: {
        const double mean = cls == 0 ? -params.separation / 2.0 : params.separation / 2.0;
        x = mean + gauss(rng);
        y = gauss(rng);
        break;
      }
      case DatasetKind::kRingSector: {
        const double r = 0.5 + 0.5 * unit(rng);
        const int quadrant = cls + 2 * (unit(rng) < 0.5 ? 0 : 1);
        const double t = (quadrant + unit(rng)) * pi / 2.0;
        x = r * std::cos(t);
        y = r * std::sin(t);
        break;
      }
    }
    if (params.kind != DatasetKind::kGaussians && params.noise > 0.0) {
      x += params.noise * gauss(rng);
      y += params.noise * gauss(rng);
    }
    ds.features.push_back(x);
    ds.features.push_back(y);
    ds.labels.push_back(cls);
  }

  std::vector<std::size_t> order(params.n);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  Dataset shuffled = ds;
  for (std::size_t i = 0; i < order.size(); ++i) {
    shuffled.features[2 * i] = ds.features[2 * order[i]];
    shuffled.features[2 * i + 1] = ds.features[2 * order[i] + 1];
    shuffled.labels[i] = ds.labels[order[i]];
  }
  shuffled.meta = {{"generator", to_string(params.kind)},
                   {"n", std::to_string(params.n)},
                   {"noise", format_double(params.noise)},
                   {"seed", std::to_string(params.seed)}};
  if (params.kind == DatasetKind::kGaussians) shuffled.meta["separation"] = format_double(params.separation);
  return shuffled;
}

int generating_rule_label(DatasetKind kind, double x, double y, double separation) {
  switch (kind) {
    case DatasetKind::kMoons:
      return arc_distance(x, y, 0.0, 0.0, true) <= arc_distance(x, y, 1.0, 0.5, false) ? 0 : 1;
    case DatasetKind::kCircles:
      return std::hypot(x, y) > 0.75 ? 0 : 1;
    case DatasetKind::kGaussians:
      (void)separation;
      return x < 0.0 ? 0 : 1;
    case DatasetKind::kRingSector: {
      double t = std::atan2(y, x);
      if (t < 0) t += 2.0 * pi;
      return static_cast<int>(std::floor(t / (pi / 2.0))) % 2;
    }
    case DatasetKind::kSpirals: {
      double best[2] = {1e300, 1e300};
      for (int cls = 0; cls < 2; ++cls) {
        for (int s = 0; s <= 4000; ++s) {
          const auto [px, py] = spiral_point(cls, s / 4000.0);
          best[cls] = std::min(best[cls], std::hypot(x - px, y - py));
        }
      }
      return best[0] <= best[1] ? 0 : 1;
    }
  }
  return 0;
}

SplitDataset split_dataset(const Dataset& ds, std::size_t n_test) {
  if (n_test >= ds.size()) throw std::invalid_argument("test split must leave training rows");
  const std::size_t n_train = ds.size() - n_test;
  SplitDataset out;
  for (Dataset* part : {&out.train, &out.test}) {
    part->dim = ds.dim;
    part->num_classes = ds.num_classes;
    part->meta = ds.meta;
  }
  out.train.meta["split"] = "train";
  out.test.meta["split"] = "test";
  const auto mid = static_cast<std::ptrdiff_t>(n_train * ds.dim);
  out.train.features.assign(ds.features.begin(), ds.features.begin() + mid);
  out.test.features.assign(ds.features.begin() + mid, ds.features.end());
  out.train.labels.assign(ds.labels.begin(), ds.labels.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.labels.assign(ds.labels.begin() + static_cast<std::ptrdiff_t>(n_train), ds.labels.end());
  return out;
}

void EncoderConfig::validate() const {
  if (thresholds < 1) throw std::invalid_argument("need at least one threshold per feature");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  if (ranges.empty()) throw std::invalid_argument("encoder ranges not fitted");
  if (theta.size() != ranges.size() || half_band.size() != ranges.size()) {
    throw std::invalid_argument("encoder thresholds not fitted");
  }
}

EncoderConfig fit_encoder(const Dataset& train, std::size_t thresholds, double delta,
                          EncodingMode mode, ThresholdPlacement placement) {
  train.validate();
  EncoderConfig cfg;
  cfg.thresholds = thresholds;
  cfg.delta = delta;
  cfg.mode = mode;
  cfg.placement = placement;
  if (thresholds < 1) throw std::invalid_argument("need at least one threshold per feature");
  for (std::size_t d = 0; d < train.dim; ++d) {
    std::vector<double> col(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) col[i] = train.features[i * train.dim + d];
    std::sort(col.begin(), col.end());
    FeatureRange r{col.front(), col.back()};
    if (!(r.hi > r.lo)) r.hi = r.lo + 1.0;
    cfg.ranges.push_back(r);

    std::vector<double> theta(thresholds);
    const double step = (r.hi - r.lo) / static_cast<double>(thresholds + 1);
    for (std::size_t i = 0; i < thresholds; ++i) {
      if (placement == ThresholdPlacement::kUniform) {
        theta[i] = r.lo + static_cast<double>(i + 1) * step;
      } else {
        const double q = static_cast<double>(i + 1) / static_cast<double>(thresholds + 1);
        theta[i] = col[static_cast<std::size_t>(q * static_cast<double>(col.size() - 1))];
      }
    }
    std::vector<double> half(thresholds);
    for (std::size_t i = 0; i < thresholds; ++i) {
      const double left = i == 0 ? r.lo : theta[i - 1];
      const double right = i + 1 == thresholds ? r.hi : theta[i + 1];
      // Equals delta * spacing / 2 for uniform placement.
      half[i] = delta * (right - left) / 4.0;
    }
    cfg.theta.push_back(std::move(theta));
    cfg.half_band.push_back(std::move(half));
  }
  return cfg;
}

std::vector<Trit> encode_ternary(std::span<const double> x, const EncoderConfig& cfg) {
  if (x.size() != cfg.ranges.size()) throw std::invalid_argument("feature count mismatch");
  std::vector<Trit> out;
  out.reserve(cfg.encoded_dim());
  for (std::size_t d = 0; d < x.size(); ++d) {
    for (std::size_t i = 0; i < cfg.thresholds; ++i) {
      const double th = cfg.theta[d][i];
      const double band = cfg.half_band[d][i];
      if (x[d] > th + band) {
        out.push_back(Trit::kTrue);
      } else if (x[d] < th - band) {
        out.push_back(Trit::kFalse);
      } else {
        out.push_back(Trit::kUnknown);
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_binary(std::span<const double> x, const EncoderConfig& cfg) {
  if (x.size() != cfg.ranges.size()) throw std::invalid_argument("feature count mismatch");
  std::vector<std::uint8_t> out;
  out.reserve(cfg.encoded_dim());
  for (std::size_t d = 0; d < x.size(); ++d) {
    for (std::size_t i = 0; i < cfg.thresholds; ++i) out.push_back(x[d] > cfg.theta[d][i] ? 1 : 0);
  }
  return out;
}

std::vector<Trit> EncodedSet::trits(std::size_t i) const {
  const auto r = row(i);
  std::vector<Trit> out(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    out[d] = mode == EncodingMode::kTernary ? trit_from_int(static_cast<int>(r[d]))
                                            : (r[d] > 0.5 ? Trit::kTrue : Trit::kFalse);
  }
  return out;
}

EncodedSet encode_dataset(const Dataset& ds, const EncoderConfig& cfg) {
  cfg.validate();
  EncodedSet out;
  out.dim = cfg.encoded_dim();
  out.num_classes = ds.num_classes;
  out.mode = cfg.mode;
  out.y = ds.labels;
  out.x.reserve(ds.size() * out.dim);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (cfg.mode == EncodingMode::kTernary) {
      for (Trit t : encode_ternary(ds.row(i), cfg)) out.x.push_back(to_real(t));
    } else {
      for (auto b : encode_binary(ds.row(i), cfg)) out.x.push_back(b);
    }
  }
  return out;
}

double unknown_input_share(const EncodedSet& set) {
  if (set.x.empty() || set.mode != EncodingMode::kTernary) return 0.0;
  const auto zeros = std::count(set.x.begin(), set.x.end(), 0.0);
  return static_cast<double>(zeros) / static_cast<double>(set.x.size());
}

double bayes_accuracy_gaussians(double separation) {
  if (std::isinf(separation)) return 1.0;
  return 0.5 * std::erfc(-(separation / 2.0) / std::numbers::sqrt2);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header line");
  const auto header = split_line(line, schema.delimiter);
  std::ptrdiff_t label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (trim(header[c]) == schema.label_column) label_col = static_cast<std::ptrdiff_t>(c);
  }
  if (label_col < 0) throw DataError(path.string() + ": no label column '" + schema.label_column + "'");

  Dataset ds;
  ds.dim = header.size() - 1;
  int max_label = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line, schema.delimiter);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      double v = 0.0;
      if (!parse_double(cell, v) || !std::isfinite(v)) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": column " +
                        std::to_string(c + 1) + " ('" + trim(header[c]) + "') is not numeric: '" +
                        cell + "'");
      }
      if (static_cast<std::ptrdiff_t>(c) == label_col) {
        if (v < 0 || v != std::floor(v)) {
          throw DataError(path.string() + ":" + std::to_string(line_no) + ": column " +
                          std::to_string(c + 1) + " label must be a nonnegative integer");
        }
        ds.labels.push_back(static_cast<int>(v));
        max_label = std::max(max_label, static_cast<int>(v));
      } else {
        ds.features.push_back(v);
      }
    }
  }
  ds.num_classes = std::max(2, max_label + 1);
  ds.meta["source"] = path.string();
  ds.validate();
  return ds;
}

void save_csv(const std::filesystem::path& path, const Dataset& ds, const CsvSchema& schema) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file: " + path.string());
  for (std::size_t d = 0; d < ds.dim; ++d) out << 'x' << d << schema.delimiter;
  out << schema.label_column << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.row(i)) out << format_double(v) << schema.delimiter;
    out << ds.labels[i] << '\n';
  }
}

}  // namespace pst
