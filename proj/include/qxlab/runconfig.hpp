#pragma once

// CLI plumbing: list parsing, deterministic record emission (newline-delimited
// JSON or RFC-4180 CSV), and the bounded worker pool for (n, seed) sweeps.

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace qxlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNotQE = 3;
inline constexpr int kExitUncertified = 4;

/// "64,128" and "1..5" (inclusive ranges), mixed: "8,16..18".
std::vector<long long> parse_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// RFC-4180 field quoting.
std::string csv_escape(const std::string& field);

enum class Format { json, csv };
Format format_from_string(const std::string& s);

using Record = nlohmann::ordered_json;

/// Emits records as NDJSON or as CSV with a header taken from the first
/// record's keys; adds a timestamp field unless deterministic.
class RecordWriter {
 public:
  RecordWriter(std::ostream& out, Format format, bool deterministic);
  void write(Record record);

 private:
  std::ostream& out_;
  Format format_;
  bool deterministic_;
  bool header_written_ = false;
  std::vector<std::string> columns_;
};

/// Runs fn(0..count-1) on `jobs` workers; call sites collect results by index
/// so output order stays deterministic.
void run_indexed(int count, int jobs, const std::function<void(int)>& fn);

/// QXLAB_JOBS env var, else 1.
int default_jobs();

}  // namespace qxlab::cli
