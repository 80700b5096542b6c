// Independent brute-force recomputations used as test oracles. Nothing here
// calls into the library's counting code; everything is recounted row by row.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rai/dataset.hpp"

namespace oracle {

struct Cells {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long n() const { return tp + fp + tn + fn; }
};

inline std::map<std::string, Cells> recount(const std::vector<int>& y, const std::vector<int>& yhat,
                                            const std::vector<std::string>& group) {
  std::map<std::string, Cells> out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    Cells& c = out[group[i]];
    if (y[i] == 1 && yhat[i] == 1) ++c.tp;
    if (y[i] == 0 && yhat[i] == 1) ++c.fp;
    if (y[i] == 0 && yhat[i] == 0) ++c.tn;
    if (y[i] == 1 && yhat[i] == 0) ++c.fn;
  }
  return out;
}

inline std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

inline std::optional<double> tpr(const Cells& c) { return ratio(c.tp, c.tp + c.fn); }
inline std::optional<double> fpr(const Cells& c) { return ratio(c.fp, c.fp + c.tn); }
inline std::optional<double> ppv(const Cells& c) { return ratio(c.tp, c.tp + c.fp); }
inline double selection(const Cells& c) { return double(c.tp + c.fp) / double(c.n()); }
inline double base_rate(const Cells& c) { return double(c.tp + c.fn) / double(c.n()); }

inline std::optional<double> diff(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

struct Disparity {
  std::optional<double> spd, di, eod, aod, ppd;
};

inline Disparity disparity(const Cells& g, const Cells& priv) {
  Disparity d;
  d.spd = selection(g) - selection(priv);
  d.di = ratio(selection(g), selection(priv));
  d.eod = diff(tpr(g), tpr(priv));
  const auto fd = diff(fpr(g), fpr(priv));
  if (d.eod && fd) d.aod = 0.5 * (*d.eod + *fd);
  d.ppd = diff(ppv(g), ppv(priv));
  return d;
}

/// GE(1) written as the textbook sum (1/n) sum (b/mu) ln(b/mu), 0 ln 0 = 0.
inline std::optional<double> theil(const std::vector<int>& y, const std::vector<int>& yhat) {
  const double n = double(y.size());
  double mu = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) mu += yhat[i] - y[i] + 1;
  mu /= n;
  if (mu == 0.0) return std::nullopt;
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = (yhat[i] - y[i] + 1) / mu;
    if (r > 0.0) s += r * std::log(r);
  }
  return std::max(0.0, s / n);
}

/// Weighted plug-in mutual information in nats over arbitrary keys.
template <typename A, typename B>
double mutual_information(const std::vector<A>& a, const std::vector<B>& b,
                          const std::vector<double>* w = nullptr) {
  std::map<A, double> pa;
  std::map<B, double> pb;
  std::map<std::pair<A, B>, double> pab;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    pa[a[i]] += wi;
    pb[b[i]] += wi;
    pab[{a[i], b[i]}] += wi;
    total += wi;
  }
  double mi = 0.0;
  for (const auto& [k, c] : pab) {
    if (c <= 0.0) continue;
    const double p = c / total;
    mi += p * std::log(p / ((pa[k.first] / total) * (pb[k.second] / total)));
  }
  return std::max(0.0, mi);
}

template <typename A, typename B>
std::optional<double> cramers_v(const std::vector<A>& a, const std::vector<B>& b) {
  std::map<A, double> ra;
  std::map<B, double> cb;
  std::map<std::pair<A, B>, double> obs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ra[a[i]] += 1;
    cb[b[i]] += 1;
    obs[{a[i], b[i]}] += 1;
  }
  const double n = double(a.size());
  const std::size_t m = std::min(ra.size(), cb.size());
  if (m < 2) return std::nullopt;
  double chi2 = 0.0;
  for (const auto& [x, nx] : ra) {
    for (const auto& [y, ny] : cb) {
      const double e = nx * ny / n;
      const auto it = obs.find({x, y});
      const double o = it == obs.end() ? 0.0 : it->second;
      chi2 += (o - e) * (o - e) / e;
    }
  }
  return std::min(1.0, std::sqrt(chi2 / (n * double(m - 1))));
}

template <typename B>
std::optional<double> correlation_ratio(const std::vector<double>& x, const std::vector<B>& cat) {
  std::map<B, std::pair<double, double>> by;  // sum, count
  double sum = 0.0, count = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i])) continue;
    by[cat[i]].first += x[i];
    by[cat[i]].second += 1;
    sum += x[i];
    count += 1;
  }
  if (by.size() < 2) return std::nullopt;
  const double mean = sum / count;
  double sst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isnan(x[i])) sst += (x[i] - mean) * (x[i] - mean);
  }
  if (sst == 0.0) return std::nullopt;
  double ssb = 0.0;
  for (const auto& [k, sc] : by) {
    const double m = sc.first / sc.second;
    ssb += sc.second * (m - mean) * (m - mean);
  }
  return std::min(1.0, std::sqrt(ssb / sst));
}

/// Brute-force enumeration of the full grid product for 1 to 3 groups.
struct PolicyOptimum {
  long best_correct = -1;  // accuracy numerator
  bool feasible = false;
};

inline PolicyOptimum best_policy(const std::vector<double>& scores, const std::vector<int>& y,
                                 const std::vector<int>& group, int n_groups,
                                 const std::vector<double>& grid, double epsilon) {
  // per group, per threshold: tp count and correct count, recounted directly
  std::vector<std::vector<long>> tp(n_groups, std::vector<long>(grid.size())),
      correct(n_groups, std::vector<long>(grid.size()));
  std::vector<long> pos(n_groups, 0);
  for (std::size_t i = 0; i < y.size(); ++i) pos[group[i]] += y[i];
  for (int g = 0; g < n_groups; ++g) {
    for (std::size_t t = 0; t < grid.size(); ++t) {
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (group[i] != g) continue;
        const int p = scores[i] >= grid[t] ? 1 : 0;
        tp[g][t] += (p == 1 && y[i] == 1);
        correct[g][t] += (p == y[i]);
      }
    }
  }
  PolicyOptimum best;
  std::vector<std::size_t> idx(n_groups, 0);
  const std::size_t m = grid.size();
  std::size_t total = 1;
  for (int g = 0; g < n_groups; ++g) total *= m;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    double lo = 2.0, hi = -1.0;
    long acc = 0;
    for (int g = 0; g < n_groups; ++g) {
      idx[g] = c % m;
      c /= m;
      const double r = double(tp[g][idx[g]]) / double(pos[g]);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      acc += correct[g][idx[g]];
    }
    if (hi - lo <= epsilon + 1e-12 && acc > best.best_correct) {
      best.best_correct = acc;
      best.feasible = true;
    }
  }
  return best;
}

/// Group-by over already binned key strings.
inline std::map<std::vector<std::string>, std::vector<std::size_t>> group_by(
    const std::vector<std::vector<std::string>>& keys) {
  std::map<std::vector<std::string>, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < keys.size(); ++i) out[keys[i]].push_back(i);
  return out;
}

/// Seeded random audit table: label, prediction, score, one sensitive
/// column with `groups` categories (g0 privileged), a categorical and a
/// numeric feature. Needs n >= 2 * groups.
struct RandomTable {
  std::vector<int> y, yhat;
  std::vector<double> score, feature_num;
  std::vector<std::string> group, feature_cat;
  rai::AuditTable table;
};

inline RandomTable random_table(std::mt19937_64& rng, std::size_t n, int groups) {
  RandomTable t;
  std::uniform_int_distribution<int> g(0, groups - 1), bit(0, 1), cat(0, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    // the first 2 * groups rows put both labels in every group
    const bool seed_row = i < 2 * std::size_t(groups);
    const int gi = seed_row ? int(i % groups) : g(rng);
    t.group.push_back("g" + std::to_string(gi));
    t.y.push_back(seed_row ? int(i / groups) : bit(rng));
    t.yhat.push_back(u(rng) < 0.3 + 0.1 * gi ? 1 : 0);
    t.score.push_back(std::round(u(rng) * 1000.0) / 1000.0);
    t.feature_num.push_back(std::round(u(rng) * 50.0) + gi);
    t.feature_cat.push_back("c" + std::to_string(cat(rng)));
  }
  std::vector<std::optional<std::string>> gs(t.group.begin(), t.group.end());
  std::vector<std::optional<std::string>> cs(t.feature_cat.begin(), t.feature_cat.end());
  std::vector<rai::Column> cols{
      rai::Column::numeric("y", std::vector<double>(t.y.begin(), t.y.end())),
      rai::Column::numeric("yhat", std::vector<double>(t.yhat.begin(), t.yhat.end())),
      rai::Column::numeric("score", t.score),
      rai::Column::categorical("group", gs),
      rai::Column::categorical("colour", cs),
      rai::Column::numeric("amount", t.feature_num),
  };
  t.table = rai::build_table(
      std::move(cols),
      {rai::ColumnRole::label, rai::ColumnRole::prediction, rai::ColumnRole::score,
       rai::ColumnRole::sensitive, rai::ColumnRole::feature, rai::ColumnRole::feature},
      {{"group", "g0"}});
  return t;
}

inline bool close(std::optional<double> a, std::optional<double> b, double tol) {
  if (!a || !b) return !a && !b;
  return std::fabs(*a - *b) <= tol;
}

}  // namespace oracle
