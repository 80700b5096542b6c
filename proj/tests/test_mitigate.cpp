#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rai/error.hpp"
#include "rai/metrics.hpp"
#include "rai/mitigate.hpp"
#include "support.hpp"

using namespace rai;
using doctest::Approx;

namespace {

struct ScoreSet {
  std::vector<double> s;
  std::vector<std::uint8_t> y;
  std::vector<int> yi;
  std::vector<std::int32_t> g;
  std::vector<int> gi;
  std::vector<std::string> names;
};

ScoreSet synthetic_scores(std::mt19937_64& rng, std::size_t n, int groups, bool same_dist) {
  ScoreSet d;
  std::normal_distribution<double> noise(0.0, 0.15);
  for (int k = 0; k < groups; ++k) d.names.push_back("g" + std::to_string(k));
  for (std::size_t i = 0; i < n; ++i) {
    const int g = i < std::size_t(groups) * 2 ? int(i % groups) : int(rng() % groups);
    // first 2*groups rows guarantee at least one positive per group
    const int y = i < std::size_t(groups) ? 1 : int(rng() % 2);
    const double shift = same_dist ? 0.0 : 0.08 * g;
    double s = 0.35 + 0.3 * y - shift + noise(rng);
    s = std::round(std::clamp(s, 0.0, 1.0) * 1000.0) / 1000.0;
    d.s.push_back(s);
    d.y.push_back(std::uint8_t(y));
    d.yi.push_back(y);
    d.g.push_back(g);
    d.gi.push_back(g);
  }
  return d;
}

}  // namespace

TEST_SUITE("mitigate") {
  TEST_CASE("hand-computed reweighing weights") {
    const auto t = support::table_from_cells(
        {{"a", 1, 1, 4}, {"a", 0, 0, 2}, {"b", 1, 1, 1}, {"b", 0, 0, 3}}, "a");
    const auto w = reweigh(t, "group");
    CHECK(w.weight("a", 1) == Approx(0.75));
    CHECK(w.weight("a", 0) == Approx(1.5));
    CHECK(w.weight("b", 1) == Approx(2.0));
    CHECK(w.weight("b", 0) == Approx(2.0 / 3.0));
    CHECK(std::accumulate(w.row_weights.begin(), w.row_weights.end(), 0.0) == Approx(10.0));
  }

  TEST_CASE("independent data keeps unit weights") {
    const auto t = support::table_from_cells(
        {{"a", 1, 1, 2}, {"a", 0, 0, 4}, {"b", 1, 1, 1}, {"b", 0, 0, 2}}, "a");
    for (double v : reweigh(t, "group").row_weights) CHECK(v == Approx(1.0));
  }

  TEST_CASE("duplicating the data keeps the cell weights") {
    const std::vector<support::Cell> cells{{"a", 1, 1, 4}, {"a", 0, 0, 2}, {"b", 1, 1, 1}, {"b", 0, 0, 3}};
    std::vector<support::Cell> twice;
    for (auto c : cells) {
      c.count *= 2;
      twice.push_back(c);
    }
    const auto w1 = reweigh(support::table_from_cells(cells, "a"), "group");
    const auto w2 = reweigh(support::table_from_cells(twice, "a"), "group");
    REQUIRE(w1.cells.size() == w2.cells.size());
    for (std::size_t i = 0; i < w1.cells.size(); ++i) {
      CHECK(w1.cells[i].weight == Approx(w2.cells[i].weight).epsilon(1e-15));
    }
  }

  TEST_CASE("reweighing makes group and label independent") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 100; ++trial) {
      const auto rt = oracle::random_table(rng, 10 + rng() % 300, 2 + int(rng() % 3));
      const auto w = reweigh(rt.table, "group");
      for (double v : w.row_weights) REQUIRE(v > 0.0);
      const double sum = std::accumulate(w.row_weights.begin(), w.row_weights.end(), 0.0);
      CHECK(std::fabs(sum - double(rt.table.n_rows())) <= 1e-9);
      CHECK(oracle::mutual_information(rt.group, rt.y, &w.row_weights) <= 1e-9);
      // weighted positive rate is the same in every group
      std::map<std::string, std::pair<double, double>> rate;
      for (std::size_t i = 0; i < rt.y.size(); ++i) {
        rate[rt.group[i]].first += w.row_weights[i] * rt.y[i];
        rate[rt.group[i]].second += w.row_weights[i];
      }
      const double r0 = rate.begin()->second.first / rate.begin()->second.second;
      for (const auto& [g, r] : rate) CHECK(r.first / r.second == Approx(r0).epsilon(1e-12));
    }
  }

  TEST_CASE("weights land in the table") {
    const auto t = support::table_from_cells({{"a", 1, 1, 2}, {"a", 0, 0, 1}, {"b", 0, 0, 2}, {"b", 1, 1, 1}}, "a");
    const auto w = reweigh(t, "group");
    const auto tw = with_weights(t, w);
    REQUIRE(tw.columns_with_role(ColumnRole::weight).size() == 1);
    CHECK(tw.column(tw.columns_with_role(ColumnRole::weight)[0]).numbers == w.row_weights);
  }

  TEST_CASE("shifted-score fixture") {
    const auto t = support::shifted_scores();
    const auto uniform = fairness_report(confusion_by_group(binarize(t, 0.5), "group"), "a");
    CHECK(std::fabs(*uniform.groups[0].eod) == Approx(0.25));

    OptimizerConfig cfg;
    cfg.epsilon = 0.0;
    const auto p = optimize_thresholds(t, "group", cfg);
    const double ta = p.threshold_for("a"), tb = p.threshold_for("b");
    CHECK(ta > 0.4);
    CHECK(ta <= 0.6);
    CHECK(tb > 0.3);
    CHECK(tb <= 0.4);
    CHECK(p.accuracy == 1.0);
    CHECK(p.max_tpr_gap == 0.0);
    const auto after = apply_policy(t, p);
    const auto cm = confusion_by_group(after, "group");
    CHECK(*cm.at("a").tpr == 1.0);
    CHECK(*cm.at("b").tpr == 1.0);
  }

  TEST_CASE("single group takes the accuracy optimum") {
    const std::vector<double> s{0.1, 0.35, 0.4, 0.8, 0.9};
    const std::vector<std::uint8_t> y{0, 0, 1, 1, 1};
    const std::vector<std::int32_t> g(5, 0);
    OptimizerConfig cfg;
    const auto p = optimize_thresholds(s, y, g, {"only"}, cfg);
    CHECK(p.groups[0].correct == 5);
    CHECK(p.groups[0].threshold > 0.35);
    CHECK(p.groups[0].threshold <= 0.4);
  }

  TEST_CASE("identically distributed groups share the uniform optimum") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 5; ++trial) {
      auto d = synthetic_scores(rng, 400, 2, true);
      // same scores and labels in both groups
      const std::size_t half = d.s.size();
      for (std::size_t i = 0; i < half; ++i) {
        d.s.push_back(d.s[i]);
        d.y.push_back(d.y[i]);
        d.g[i] = 0;
        d.g.push_back(1);
      }
      OptimizerConfig cfg;
      const auto p = optimize_thresholds(d.s, d.y, d.g, {"a", "b"}, cfg);
      CHECK(p.groups[0].threshold == p.groups[1].threshold);
      // the uniform optimum over the grid on one copy
      std::size_t best = 0;
      long best_correct = -1;
      for (std::size_t j = 0; j < cfg.grid.size(); ++j) {
        long c = 0;
        for (std::size_t i = 0; i < half; ++i) c += (d.s[i] >= cfg.grid[j]) == (d.y[i] == 1);
        if (c > best_correct) {
          best_correct = c;
          best = j;
        }
      }
      CHECK(p.groups[0].correct == best_correct);
      CHECK(p.groups[0].grid_index == best);
    }
  }

  TEST_CASE("matches brute-force enumeration and meets the gap") {
    std::mt19937_64 rng(90);
    for (int trial = 0; trial < 12; ++trial) {
      const int groups = 2 + trial % 2;
      const auto d = synthetic_scores(rng, 100 + rng() % 300, groups, false);
      OptimizerConfig cfg;
      cfg.grid = uniform_grid(groups == 3 ? 41 : 101);
      cfg.epsilon = trial % 3 == 0 ? 0.0 : 0.05;
      const auto want = oracle::best_policy(d.s, d.yi, d.gi, groups, cfg.grid, cfg.epsilon);
      REQUIRE(want.feasible);
      const auto p = optimize_thresholds(d.s, d.y, d.g, d.names, cfg);
      long correct = 0;
      for (const auto& gt : p.groups) correct += gt.correct;
      CHECK(correct == want.best_correct);
      CHECK(p.max_tpr_gap <= cfg.epsilon + 1e-12);
    }
  }

  TEST_CASE("balanced accuracy objective beats every feasible grid point") {
    std::mt19937_64 rng(5);
    const auto d = synthetic_scores(rng, 200, 2, false);
    OptimizerConfig cfg;
    cfg.grid = uniform_grid(26);
    cfg.performance = PerformanceMetric::balanced_accuracy;
    const auto p = optimize_thresholds(d.s, d.y, d.g, d.names, cfg);
    double best = -1.0;
    double pos = 0, neg = 0;
    for (auto v : d.y) (v ? pos : neg) += 1;
    for (double ta : cfg.grid) {
      for (double tb : cfg.grid) {
        double tp[2] = {0, 0}, p2[2] = {0, 0}, tp_all = 0, tn_all = 0;
        for (std::size_t i = 0; i < d.s.size(); ++i) {
          const bool hit = d.s[i] >= (d.g[i] == 0 ? ta : tb);
          if (d.y[i]) {
            p2[d.g[i]] += 1;
            tp[d.g[i]] += hit;
            tp_all += hit;
          } else {
            tn_all += !hit;
          }
        }
        if (std::fabs(tp[0] / p2[0] - tp[1] / p2[1]) > cfg.epsilon + 1e-12) continue;
        best = std::max(best, 0.5 * (tp_all / pos + tn_all / neg));
      }
    }
    CHECK(p.balanced_accuracy == Approx(best).epsilon(1e-12));
  }

  TEST_CASE("policy is deterministic and round-trips") {
    std::mt19937_64 rng(13);
    const auto d = synthetic_scores(rng, 500, 3, false);
    OptimizerConfig cfg;
    const auto p1 = optimize_thresholds(d.s, d.y, d.g, d.names, cfg);
    const auto p2 = optimize_thresholds(d.s, d.y, d.g, d.names, cfg);
    CHECK(policy_document(p1) == policy_document(p2));
    const auto back = parse_policy_document(policy_document(p1));
    for (const auto& g : p1.groups) CHECK(back.threshold_for(g.group) == g.threshold);
  }

  TEST_CASE("apply_policy rules") {
    const auto t = support::table_of({1, 0, 1}, {}, {"a", "b", "b"}, "a", {0.45, 0.42, 0.39});
    ThresholdPolicy p;
    p.sensitive = "group";
    p.groups = {{"a", 0.5}, {"b", 0.4}};
    CHECK(apply_policy(t, p).predictions() == std::vector<std::uint8_t>{0, 1, 0});
    p.groups = {{"a", 0.5}, {"b", 0.5}};
    CHECK(apply_policy(t, p).predictions() == binarize(t, 0.5).predictions());
    p.groups = {{"a", 0.5}};
    CHECK_THROWS_AS(apply_policy(t, p), Error);
  }

  TEST_CASE("error cases") {
    const std::vector<double> s{0.2, 0.9, 0.4, 0.7};
    const std::vector<std::uint8_t> y{0, 1, 0, 1};
    const std::vector<std::int32_t> g{0, 0, 1, 1};
    OptimizerConfig cfg;
    cfg.grid = {0.5};
    cfg.epsilon = 0.0;
    // TPRs 1 and 1 are feasible with a single threshold
    CHECK_NOTHROW(optimize_thresholds(s, y, g, {"a", "b"}, cfg));
    cfg.grid = {0.8};
    try {
      optimize_thresholds(s, y, g, {"a", "b"}, cfg);
      FAIL("expected infeasible");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::infeasible);
    }
    const std::vector<std::uint8_t> no_pos{0, 1, 0, 0};
    CHECK_THROWS_AS(optimize_thresholds(s, no_pos, g, {"a", "b"}, OptimizerConfig{}), Error);
    cfg.epsilon = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
}
