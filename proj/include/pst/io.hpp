// Versioned text formats for checkpoints and circuits, encoder and history
// serialization, hashing, and delimited report tables.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pst/circuit.hpp"
#include "pst/data.hpp"
#include "pst/network.hpp"
#include "pst/training.hpp"

namespace pst {

inline constexpr int kCheckpointVersion = 1;
inline constexpr int kCircuitVersion = 1;

/// A malformed artifact file; the message names the line and field.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

using Checkpoint = std::variant<PstNetwork, BinaryDlgnNetwork>;

void write_checkpoint(std::ostream& os, const PstNetwork& net);
void write_checkpoint(std::ostream& os, const BinaryDlgnNetwork& net);
Checkpoint read_checkpoint(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

void write_circuit(std::ostream& os, const Circuit& circuit);
Circuit read_circuit(std::istream& is);
void save_circuit(const std::filesystem::path& path, const Circuit& circuit);
Circuit load_circuit(const std::filesystem::path& path);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Current UTC time as ISO-8601, or SOURCE_DATE_EPOCH when set.
std::string utc_timestamp();

nlohmann::json to_json(const EncoderConfig& cfg);
EncoderConfig encoder_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& cfg);
nlohmann::json to_json(const GapReport& r);
nlohmann::json to_json(const StepRecord& r);

void write_history(std::ostream& os, const History& h);
History read_history(std::istream& is);

/// Tab-separated table with optional leading '#' comment lines.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os) const;
};

/// Fixed-point percentage text, e.g. 85.80.
std::string pct(double fraction, int digits = 2);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace pst
