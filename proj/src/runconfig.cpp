#include "qxlab/runconfig.hpp"

#include <atomic>
#include <chrono>
#include <climits>
#include <cstdlib>
#include <ctime>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qxlab::cli {

std::vector<long long> parse_list(const std::string& text) {
  std::vector<long long> out;
  std::size_t i = 0;
  auto read_ll = [&]() -> long long {
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      neg = text[i] == '-';
      ++i;
    }
    const std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
      ++i;
    if (i == start)
      throw std::invalid_argument("bad list '" + text + "'");
    const long long v = std::stoll(text.substr(start, i - start));
    return neg ? -v : v;
  };
  while (i < text.size()) {
    const long long a = read_ll();
    if (i + 1 < text.size() && text[i] == '.' && text[i + 1] == '.') {
      i += 2;
      const long long b = read_ll();
      if (b < a || b - a > 1'000'000)
        throw std::invalid_argument("bad range in '" + text + "'");
      for (long long v = a; v <= b; ++v) out.push_back(v);
    } else {
      out.push_back(a);
    }
    if (i < text.size()) {
      if (text[i] != ',') throw std::invalid_argument("bad list '" + text + "'");
      ++i;
    }
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (long long v : parse_list(text)) {
    if (v < INT_MIN || v > INT_MAX)
      throw std::invalid_argument("value out of range in '" + text + "'");
    out.push_back(int(v));
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (long long v : parse_list(text)) {
    if (v < 0) throw std::invalid_argument("negative seed in '" + text + "'");
    out.push_back(std::uint64_t(v));
  }
  return out;
}

std::string csv_escape(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Format format_from_string(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw std::invalid_argument("unknown format '" + s + "'");
}

RecordWriter::RecordWriter(std::ostream& out, Format format, bool deterministic)
    : out_(out), format_(format), deterministic_(deterministic) {}

namespace {

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%FT%TZ", &tm);
  return buf;
}

std::string scalar_to_csv(const nlohmann::ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

void RecordWriter::write(Record record) {
  if (!deterministic_) record["timestamp"] = iso_timestamp();
  if (format_ == Format::json) {
    out_ << record.dump() << '\n';
    return;
  }
  if (!header_written_) {
    for (auto it = record.begin(); it != record.end(); ++it)
      columns_.push_back(it.key());
    for (std::size_t i = 0; i < columns_.size(); ++i)
      out_ << (i ? "," : "") << csv_escape(columns_[i]);
    out_ << "\r\n";
    header_written_ = true;
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto it = record.find(columns_[i]);
    out_ << (i ? "," : "")
         << csv_escape(it == record.end() ? "" : scalar_to_csv(*it));
  }
  out_ << "\r\n";
}

void run_indexed(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int default_jobs() {
  const char* env = std::getenv("QXLAB_JOBS");
  if (!env) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

}  // namespace qxlab::cli
