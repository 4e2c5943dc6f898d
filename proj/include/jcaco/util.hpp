#pragma once

// Small shared utilities: a dense row-major grid, shortest round-trip float
// formatting, atomic file writes, and a bounded parallel-for used by the
// experiment harness.

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jcaco {

template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// Writes content to a sibling temp file and renames it into place, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Worker budget: min(JCACO_WORKERS if set, hardware_concurrency, njobs).
std::size_t worker_count(std::size_t njobs);

// Runs fn(0..n-1) on the worker budget. Exceptions from workers are rethrown
// on the calling thread (first one wins). Deterministic work must not depend
// on scheduling; callers index into preallocated result slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// log2(sum_i 2^e_i), stable for widely spread exponents.
double log2_sum_exp2(std::span<const double> exponents);

}  // namespace jcaco
