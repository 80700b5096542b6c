#pragma once

// Counting kernels shared by the metrics, proxy and mitigation modules.
//
// Each kernel has a plain serial reference (`*_serial`) and a default entry
// point that runs OpenMP-parallel when the library is built with OpenMP.
// All kernels produce integer counts, so the parallel and serial results are
// identical bit for bit; tests/kernels_test.cpp holds them to that.

#include <cstdint>
#include <span>
#include <vector>

namespace rai::kernels {

struct ConfusionCells {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  friend bool operator==(const ConfusionCells&, const ConfusionCells&) = default;
};

/// Confusion cells per group code in [0, n_groups).
std::vector<ConfusionCells> confusion_counts(std::span<const std::uint8_t> labels,
                                             std::span<const std::uint8_t> predictions,
                                             std::span<const std::int32_t> groups,
                                             std::size_t n_groups);
std::vector<ConfusionCells> confusion_counts_serial(std::span<const std::uint8_t> labels,
                                                    std::span<const std::uint8_t> predictions,
                                                    std::span<const std::int32_t> groups,
                                                    std::size_t n_groups);

/// Row-major r x c table of joint counts. Codes must already be shifted
/// into [0, rows) and [0, cols).
std::vector<std::int64_t> contingency(std::span<const std::int32_t> a, std::size_t rows,
                                      std::span<const std::int32_t> b, std::size_t cols);
std::vector<std::int64_t> contingency_serial(std::span<const std::int32_t> a, std::size_t rows,
                                             std::span<const std::int32_t> b, std::size_t cols);

/// For every group g and grid index j: the number of label-1 rows (tp) and
/// label-0 rows (fp) in g with score >= grid[j]. Indexed [g * grid.size() + j].
struct ThresholdCounts {
  std::size_t n_groups = 0;
  std::size_t n_grid = 0;
  std::vector<std::int64_t> tp;
  std::vector<std::int64_t> fp;
  std::vector<std::int64_t> positives;  // per group
  std::vector<std::int64_t> negatives;  // per group

  std::int64_t tp_at(std::size_t g, std::size_t j) const { return tp[g * n_grid + j]; }
  std::int64_t fp_at(std::size_t g, std::size_t j) const { return fp[g * n_grid + j]; }

  friend bool operator==(const ThresholdCounts&, const ThresholdCounts&) = default;
};

ThresholdCounts threshold_counts(std::span<const double> scores,
                                 std::span<const std::uint8_t> labels,
                                 std::span<const std::int32_t> groups, std::size_t n_groups,
                                 std::span<const double> grid);
ThresholdCounts threshold_counts_serial(std::span<const double> scores,
                                        std::span<const std::uint8_t> labels,
                                        std::span<const std::int32_t> groups,
                                        std::size_t n_groups, std::span<const double> grid);

/// Number of threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace rai::kernels
