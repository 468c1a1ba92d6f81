#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace euler2c::cli {

/// Shortest text that reads back to the same double at 17 significant
/// digits, independent of the locale.
std::string format_double(double v);

/// CSV table assembled in memory and written atomically.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void row(std::initializer_list<double> values);
  /// Mixed row: numbers are formatted, strings copied verbatim.
  void row_cells(const std::vector<std::string>& cells);
  std::size_t rows() const { return rows_; }
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

/// Writes `content` to `path` through a temporary file in the same directory
/// and a rename. Creates parent directories. Throws std::runtime_error.
void write_atomic(const std::filesystem::path& path, const std::string& content);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Thread cap from EULER_LIB_THREADS (default: hardware concurrency, at least 1).
unsigned thread_limit();

/// Runs body(i) for i in [0, n) on up to thread_limit() threads. The first
/// exception thrown by any body is rethrown after all threads finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace euler2c::cli
