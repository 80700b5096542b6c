#include "rai/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rai/error.hpp"

namespace rai::kernels {

namespace {

// Below this many rows the thread start-up costs more than the loop.
constexpr std::size_t kParallelMinRows = 1 << 14;

void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw Error(ErrorKind::argument, "kernel inputs differ in length");
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<ConfusionCells> confusion_counts_serial(std::span<const std::uint8_t> labels,
                                                    std::span<const std::uint8_t> predictions,
                                                    std::span<const std::int32_t> groups,
                                                    std::size_t n_groups) {
  check_lengths(labels.size(), predictions.size(), groups.size());
  std::vector<ConfusionCells> cells(n_groups);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& c = cells[static_cast<std::size_t>(groups[i])];
    if (labels[i]) {
      (predictions[i] ? c.tp : c.fn) += 1;
    } else {
      (predictions[i] ? c.fp : c.tn) += 1;
    }
  }
  return cells;
}

std::vector<ConfusionCells> confusion_counts(std::span<const std::uint8_t> labels,
                                             std::span<const std::uint8_t> predictions,
                                             std::span<const std::int32_t> groups,
                                             std::size_t n_groups) {
#ifdef _OPENMP
  check_lengths(labels.size(), predictions.size(), groups.size());
  const auto n = static_cast<std::int64_t>(labels.size());
  if (static_cast<std::size_t>(n) < kParallelMinRows || max_threads() == 1) {
    return confusion_counts_serial(labels, predictions, groups, n_groups);
  }
  // Flat layout [g * 4 + cell] so the array-section reduction applies.
  std::vector<std::int64_t> flat(n_groups * 4, 0);
  std::int64_t* acc = flat.data();
  const std::size_t width = flat.size();
#pragma omp parallel for reduction(+ : acc[:width]) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(groups[i]) * 4;
    const int cell = labels[i] ? (predictions[i] ? 0 : 3) : (predictions[i] ? 1 : 2);
    acc[g + cell] += 1;
  }
  std::vector<ConfusionCells> cells(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) {
    cells[g] = {flat[g * 4], flat[g * 4 + 1], flat[g * 4 + 2], flat[g * 4 + 3]};
  }
  return cells;
#else
  return confusion_counts_serial(labels, predictions, groups, n_groups);
#endif
}

std::vector<std::int64_t> contingency_serial(std::span<const std::int32_t> a, std::size_t rows,
                                             std::span<const std::int32_t> b, std::size_t cols) {
  if (a.size() != b.size()) throw Error(ErrorKind::argument, "kernel inputs differ in length");
  std::vector<std::int64_t> table(rows * cols, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[static_cast<std::size_t>(a[i]) * cols + static_cast<std::size_t>(b[i])] += 1;
  }
  return table;
}

std::vector<std::int64_t> contingency(std::span<const std::int32_t> a, std::size_t rows,
                                      std::span<const std::int32_t> b, std::size_t cols) {
#ifdef _OPENMP
  if (a.size() != b.size()) throw Error(ErrorKind::argument, "kernel inputs differ in length");
  const auto n = static_cast<std::int64_t>(a.size());
  if (static_cast<std::size_t>(n) < kParallelMinRows || max_threads() == 1) {
    return contingency_serial(a, rows, b, cols);
  }
  std::vector<std::int64_t> table(rows * cols, 0);
  std::int64_t* acc = table.data();
  const std::size_t width = table.size();
#pragma omp parallel for reduction(+ : acc[:width]) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    acc[static_cast<std::size_t>(a[i]) * cols + static_cast<std::size_t>(b[i])] += 1;
  }
  return table;
#else
  return contingency_serial(a, rows, b, cols);
#endif
}

namespace {

ThresholdCounts empty_counts(std::span<const double> scores, std::span<const std::uint8_t> labels,
                             std::span<const std::int32_t> groups, std::size_t n_groups,
                             std::size_t n_grid) {
  check_lengths(scores.size(), labels.size(), groups.size());
  ThresholdCounts out;
  out.n_groups = n_groups;
  out.n_grid = n_grid;
  out.tp.assign(n_groups * n_grid, 0);
  out.fp.assign(n_groups * n_grid, 0);
  out.positives.assign(n_groups, 0);
  out.negatives.assign(n_groups, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto g = static_cast<std::size_t>(groups[i]);
    (labels[i] ? out.positives[g] : out.negatives[g]) += 1;
  }
  return out;
}

}  // namespace

ThresholdCounts threshold_counts_serial(std::span<const double> scores,
                                        std::span<const std::uint8_t> labels,
                                        std::span<const std::int32_t> groups,
                                        std::size_t n_groups, std::span<const double> grid) {
  ThresholdCounts out = empty_counts(scores, labels, groups, n_groups, grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] < grid[j]) continue;
      const std::size_t at = static_cast<std::size_t>(groups[i]) * grid.size() + j;
      (labels[i] ? out.tp[at] : out.fp[at]) += 1;
    }
  }
  return out;
}

ThresholdCounts threshold_counts(std::span<const double> scores,
                                 std::span<const std::uint8_t> labels,
                                 std::span<const std::int32_t> groups, std::size_t n_groups,
                                 std::span<const double> grid) {
#ifdef _OPENMP
  ThresholdCounts out = empty_counts(scores, labels, groups, n_groups, grid.size());
  const auto m = static_cast<std::int64_t>(grid.size());
  const std::size_t n = scores.size();
  // Each grid point owns a disjoint slice of the output, so no reduction is needed.
#pragma omp parallel for schedule(static) if (n * grid.size() >= kParallelMinRows)
  for (std::int64_t j = 0; j < m; ++j) {
    const double theta = grid[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < n; ++i) {
      if (scores[i] < theta) continue;
      const std::size_t at =
          static_cast<std::size_t>(groups[i]) * grid.size() + static_cast<std::size_t>(j);
      (labels[i] ? out.tp[at] : out.fp[at]) += 1;
    }
  }
  return out;
#else
  return threshold_counts_serial(scores, labels, groups, n_groups, grid);
#endif
}

}  // namespace rai::kernels
