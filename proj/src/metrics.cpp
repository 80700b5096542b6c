#include "rai/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rai/error.hpp"

namespace rai {

namespace {

Maybe ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

Maybe diff(const Maybe& a, const Maybe& b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

// Picks the signed value of the group whose disparity magnitude is largest.
template <typename Magnitude>
Maybe worst(const std::vector<GroupDisparity>& groups, Maybe GroupDisparity::*field,
            Magnitude magnitude) {
  Maybe best;
  double best_mag = -1.0;
  for (const auto& g : groups) {
    const Maybe& v = g.*field;
    if (!v) return std::nullopt;
    const double m = magnitude(*v);
    if (m > best_mag) {
      best_mag = m;
      best = v;
    }
  }
  return best;
}

Verdict judge(const std::vector<Maybe>& gaps, double epsilon) {
  double worst_gap = 0.0;
  for (const auto& g : gaps) {
    if (!g) return Verdict::undefined;
    worst_gap = std::max(worst_gap, std::fabs(*g));
  }
  return within(worst_gap, epsilon) ? Verdict::pass : Verdict::fail;
}

}  // namespace

GroupConfusion GroupConfusion::from_cells(std::string group, const kernels::ConfusionCells& c) {
  GroupConfusion out;
  out.group = std::move(group);
  out.tp = c.tp;
  out.fp = c.fp;
  out.tn = c.tn;
  out.fn = c.fn;
  out.n = c.tp + c.fp + c.tn + c.fn;
  if (out.n > 0) {
    out.base_rate = static_cast<double>(c.tp + c.fn) / static_cast<double>(out.n);
    out.selection_rate = static_cast<double>(c.tp + c.fp) / static_cast<double>(out.n);
  }
  out.tpr = ratio(c.tp, c.tp + c.fn);
  out.fpr = ratio(c.fp, c.fp + c.tn);
  out.ppv = ratio(c.tp, c.tp + c.fp);
  return out;
}

ConfusionMap confusion_by_group(std::span<const std::uint8_t> labels,
                                std::span<const std::uint8_t> predictions,
                                const Column& sensitive) {
  if (sensitive.type != ColumnType::categorical) {
    throw Error(ErrorKind::argument, "sensitive column '" + sensitive.name + "' is not categorical");
  }
  std::vector<std::int32_t> codes;
  const std::size_t k = compact_codes(sensitive.codes, codes);
  auto cells = kernels::confusion_counts(labels, predictions, codes, k);

  // compact_codes maps -1 to 0 when present; recover labels per compacted code.
  std::vector<std::string> names(k);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    names[static_cast<std::size_t>(codes[i])] = std::string(sensitive.category(i));
  }
  ConfusionMap out;
  for (std::size_t g = 0; g < k; ++g) {
    out.emplace(names[g], GroupConfusion::from_cells(names[g], cells[g]));
  }
  return out;
}

ConfusionMap confusion_by_group(const AuditTable& table, const std::string& sensitive) {
  if (!table.has_column(sensitive) || table.role(sensitive) != ColumnRole::sensitive) {
    throw Error(ErrorKind::schema, "unknown sensitive column '" + sensitive + "'");
  }
  const auto labels = table.labels();
  const auto predictions = table.predictions();
  return confusion_by_group(labels, predictions, table.column(sensitive));
}

void MetricConfig::validate() const {
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::argument, "epsilon must be >= 0");
  if (!(alpha >= 0.0)) throw Error(ErrorKind::argument, "alpha must be >= 0");
  if (!(di_band.low > 0.0 && di_band.low <= 1.0 && di_band.high >= 1.0)) {
    throw Error(ErrorKind::argument, "disparate-impact band must satisfy 0 < low <= 1 <= high");
  }
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::undefined: return "undefined";
  }
  return "undefined";
}

FairnessReport fairness_report(const ConfusionMap& confusions, const std::string& privileged,
                               const MetricConfig& config) {
  config.validate();
  auto pit = confusions.find(privileged);
  if (pit == confusions.end()) {
    throw Error(ErrorKind::argument, "privileged group '" + privileged + "' is absent");
  }
  const GroupConfusion& priv = pit->second;
  if (priv.n == 0) {
    throw Error(ErrorKind::argument, "privileged group '" + privileged + "' has no rows");
  }

  FairnessReport report;
  report.privileged = privileged;
  report.epsilon = config.epsilon;

  std::vector<Maybe> spd_gaps, sep_gaps, ppd_gaps;
  for (const auto& [name, g] : confusions) {
    if (name == privileged) continue;
    GroupDisparity d;
    d.group = name;
    d.spd = g.selection_rate - priv.selection_rate;
    if (priv.selection_rate > 0.0) d.di = g.selection_rate / priv.selection_rate;
    d.eod = diff(g.tpr, priv.tpr);
    d.fpr_diff = diff(g.fpr, priv.fpr);
    if (d.eod && d.fpr_diff) d.aod = 0.5 * (*d.fpr_diff + *d.eod);
    d.ppd = diff(g.ppv, priv.ppv);

    spd_gaps.push_back(d.spd);
    sep_gaps.push_back(d.eod);
    sep_gaps.push_back(d.fpr_diff);
    ppd_gaps.push_back(d.ppd);
    report.groups.push_back(std::move(d));
  }

  report.independence = judge(spd_gaps, config.epsilon);
  report.separation = judge(sep_gaps, config.epsilon);
  report.sufficiency = judge(ppd_gaps, config.epsilon);

  auto abs_mag = [](double v) { return std::fabs(v); };
  auto log_mag = [](double v) {
    return v > 0.0 ? std::fabs(std::log(v)) : std::numeric_limits<double>::infinity();
  };
  report.summary.spd = worst(report.groups, &GroupDisparity::spd, abs_mag);
  report.summary.di = worst(report.groups, &GroupDisparity::di, log_mag);
  report.summary.eod = worst(report.groups, &GroupDisparity::eod, abs_mag);
  report.summary.aod = worst(report.groups, &GroupDisparity::aod, abs_mag);
  report.summary.ppd = worst(report.groups, &GroupDisparity::ppd, abs_mag);
  return report;
}

std::vector<double> benefits(std::span<const std::uint8_t> labels,
                             std::span<const std::uint8_t> predictions) {
  if (labels.size() != predictions.size()) {
    throw Error(ErrorKind::argument, "labels and predictions differ in length");
  }
  std::vector<double> b(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    b[i] = static_cast<double>(predictions[i]) - static_cast<double>(labels[i]) + 1.0;
  }
  return b;
}

Maybe generalized_entropy(std::span<const double> benefit, double alpha) {
  if (benefit.empty()) throw Error(ErrorKind::argument, "generalized entropy of an empty vector");
  if (!(alpha >= 0.0)) throw Error(ErrorKind::argument, "alpha must be >= 0");
  const double n = static_cast<double>(benefit.size());
  double total = 0.0;
  for (double b : benefit) total += b;
  const double mu = total / n;
  if (mu <= 0.0) return std::nullopt;

  double acc = 0.0;
  if (alpha == 1.0) {
    for (double b : benefit) {
      const double r = b / mu;
      if (r > 0.0) acc += r * std::log(r);
    }
    acc /= n;
  } else if (alpha == 0.0) {
    for (double b : benefit) {
      if (b <= 0.0) return std::nullopt;
      acc -= std::log(b / mu);
    }
    acc /= n;
  } else {
    for (double b : benefit) acc += std::pow(b / mu, alpha) - 1.0;
    acc /= n * alpha * (alpha - 1.0);
  }
  return std::max(0.0, acc);
}

Maybe theil_index(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions,
                  const MetricConfig& config) {
  const auto b = benefits(labels, predictions);
  return generalized_entropy(b, config.alpha);
}

std::size_t compact_codes(std::span<const std::int32_t> codes, std::vector<std::int32_t>& out) {
  std::int32_t max_code = -1;
  bool has_missing = false;
  for (auto c : codes) {
    max_code = std::max(max_code, c);
    has_missing |= c < 0;
  }
  const std::size_t span_size = static_cast<std::size_t>(max_code + 1) + (has_missing ? 1 : 0);
  std::vector<std::int32_t> remap(span_size, -1);
  const std::int32_t shift = has_missing ? 1 : 0;
  out.resize(codes.size());
  std::int32_t next = 0;
  // First pass fixes the mapping in code order so results do not depend on row order.
  std::vector<bool> seen(span_size, false);
  for (auto c : codes) seen[static_cast<std::size_t>(c + shift)] = true;
  for (std::size_t i = 0; i < span_size; ++i) {
    if (seen[i]) remap[i] = next++;
  }
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out[i] = remap[static_cast<std::size_t>(codes[i] + shift)];
  }
  return static_cast<std::size_t>(next);
}

std::vector<std::int32_t> as_codes(std::span<const std::uint8_t> values) {
  return std::vector<std::int32_t>(values.begin(), values.end());
}

double mutual_information(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::argument, "mutual information: length mismatch");
  if (a.empty()) throw Error(ErrorKind::argument, "mutual information of empty columns");
  std::vector<std::int32_t> ca, cb;
  const std::size_t ka = compact_codes(a, ca);
  const std::size_t kb = compact_codes(b, cb);
  const auto joint = kernels::contingency(ca, ka, cb, kb);

  std::vector<std::int64_t> row(ka, 0), col(kb, 0);
  for (std::size_t i = 0; i < ka; ++i) {
    for (std::size_t j = 0; j < kb; ++j) {
      row[i] += joint[i * kb + j];
      col[j] += joint[i * kb + j];
    }
  }
  const double n = static_cast<double>(a.size());
  double mi = 0.0;
  for (std::size_t i = 0; i < ka; ++i) {
    for (std::size_t j = 0; j < kb; ++j) {
      const auto nij = joint[i * kb + j];
      if (nij == 0) continue;
      const double p = static_cast<double>(nij) / n;
      mi += p * std::log(static_cast<double>(nij) * n /
                         (static_cast<double>(row[i]) * static_cast<double>(col[j])));
    }
  }
  return std::max(0.0, mi);
}

double weighted_mutual_information(std::span<const std::int32_t> a,
                                   std::span<const std::int32_t> b,
                                   std::span<const double> weights) {
  if (a.size() != b.size() || a.size() != weights.size()) {
    throw Error(ErrorKind::argument, "weighted mutual information: length mismatch");
  }
  std::vector<std::int32_t> ca, cb;
  const std::size_t ka = compact_codes(a, ca);
  const std::size_t kb = compact_codes(b, cb);
  std::vector<double> joint(ka * kb, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[static_cast<std::size_t>(ca[i]) * kb + static_cast<std::size_t>(cb[i])] += weights[i];
    total += weights[i];
  }
  if (total <= 0.0) throw Error(ErrorKind::argument, "weights sum to zero");
  std::vector<double> row(ka, 0.0), col(kb, 0.0);
  for (std::size_t i = 0; i < ka; ++i) {
    for (std::size_t j = 0; j < kb; ++j) {
      row[i] += joint[i * kb + j];
      col[j] += joint[i * kb + j];
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < ka; ++i) {
    for (std::size_t j = 0; j < kb; ++j) {
      const double w = joint[i * kb + j];
      if (w <= 0.0) continue;
      mi += (w / total) * std::log(w * total / (row[i] * col[j]));
    }
  }
  return std::max(0.0, mi);
}

}  // namespace rai
