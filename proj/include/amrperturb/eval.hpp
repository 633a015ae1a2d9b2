// Copyright 2026 The amrperturb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Balanced-accuracy evaluation of factuality metrics.
//
// Scores are oriented so that higher means "more likely inconsistent"; the
// positive class is `inconsistent`. A threshold is tuned per origin (cnn,
// xsum) on the validation split and applied to the test split of the same
// origin. The headline number is the mean of the per-origin accuracies.

#ifndef AMRPERTURB_EVAL_HPP
#define AMRPERTURB_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "amrperturb/error.hpp"
#include "amrperturb/random.hpp"
#include "amrperturb/text.hpp"
#include "json.hpp"

namespace amrperturb::eval {

enum class Origin { kCnn, kXsum };
enum class Split { kVal, kTest };

inline std::string_view ToString(Origin origin) { return origin == Origin::kCnn ? "cnn" : "xsum"; }
inline std::string_view ToString(Split split) { return split == Split::kVal ? "val" : "test"; }

struct EvalRecord {
  std::string dataset_name;
  Origin origin = Origin::kCnn;
  Split split = Split::kTest;
  double score = 0.0;
  bool inconsistent = false;  // gold label, true = positive class
};

// {dataset_name, origin, split, score, gold}. `gold` is "consistent" /
// "inconsistent" or an integer with 1 = inconsistent.
inline EvalRecord ParseEvalLine(std::string_view line, bool invert_scores = false) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  auto fail = [&](const std::string& why) -> EvalRecord {
    throw DataError("malformed eval record (" + why + "): " + std::string(line));
  };
  if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
  EvalRecord r;
  if (!j.contains("dataset_name") || !j["dataset_name"].is_string()) return fail("dataset_name");
  r.dataset_name = j["dataset_name"].get<std::string>();

  if (!j.contains("origin") || !j["origin"].is_string()) return fail("origin");
  const std::string origin = j["origin"].get<std::string>();
  if (origin == "cnn") r.origin = Origin::kCnn;
  else if (origin == "xsum") r.origin = Origin::kXsum;
  else return fail("origin must be cnn or xsum");

  if (!j.contains("split") || !j["split"].is_string()) return fail("split");
  const std::string split = j["split"].get<std::string>();
  if (split == "val") r.split = Split::kVal;
  else if (split == "test") r.split = Split::kTest;
  else return fail("split must be val or test");

  if (!j.contains("score") || !j["score"].is_number()) return fail("score");
  r.score = j["score"].get<double>();
  if (!std::isfinite(r.score)) return fail("score must be finite");
  if (invert_scores) r.score = -r.score;

  if (!j.contains("gold")) return fail("gold");
  const auto& gold = j["gold"];
  if (gold.is_string() && gold == "inconsistent") r.inconsistent = true;
  else if (gold.is_string() && gold == "consistent") r.inconsistent = false;
  else if (gold.is_number_integer() && (gold == 0 || gold == 1)) r.inconsistent = gold == 1;
  else return fail("gold must be consistent/inconsistent or 0/1");
  return r;
}

inline std::vector<EvalRecord> ReadEvalFile(const std::string& path, bool invert_scores = false) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read eval file '" + path + "'");
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (text::Trim(line).empty()) continue;
    try {
      records.push_back(ParseEvalLine(line, invert_scores));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Balanced accuracy

inline double BalancedAccuracy(std::span<const bool> predictions, std::span<const bool> golds) {
  if (predictions.size() != golds.size()) throw MetricError("predictions and golds differ in length");
  if (golds.empty()) throw MetricError("balanced accuracy of an empty set");
  std::size_t tp = 0, tn = 0, positives = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (golds[i]) {
      ++positives;
      tp += predictions[i];
    } else {
      tn += !predictions[i];
    }
  }
  const std::size_t negatives = golds.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw MetricError("balanced accuracy needs both classes in the gold labels");
  }
  return 0.5 * (static_cast<double>(tp) / static_cast<double>(positives) +
                static_cast<double>(tn) / static_cast<double>(negatives));
}

// ---------------------------------------------------------------------------
// Threshold tuning

// A tuned decision rule. `value` is the midpoint between two adjacent
// validation scores (or +/-inf). `lower` and `upper` are those two scores.
//
// Predictions use `upper`: a score is inconsistent iff it is >= the smallest
// validation score above the cut. On validation data this is identical to
// comparing against the midpoint, and it keeps predictions unchanged under
// any strictly increasing rescaling of the scores.
struct Threshold {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double balanced_accuracy = std::numeric_limits<double>::quiet_NaN();

  static Threshold Fixed(double value) {
    return {value, value, value, std::numeric_limits<double>::quiet_NaN()};
  }

  bool Predict(double score) const { return score >= upper; }
};

// Candidate thresholds: -inf, every midpoint between consecutive distinct
// scores, +inf. Returns the one with the highest balanced accuracy, the
// smallest one on ties.
inline Threshold TuneThreshold(std::span<const double> scores, std::span<const bool> golds) {
  if (scores.size() != golds.size()) throw MetricError("scores and golds differ in length");
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (bool g : golds) positives += g;
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw MetricError("threshold tuning needs both classes in the gold labels");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Balanced accuracy is proportional to tp * N + tn * P, compared exactly
  // in integers to make the tie rule well defined.
  auto objective = [&](std::size_t tp, std::size_t tn) {
    return static_cast<std::uint64_t>(tp) * negatives + static_cast<std::uint64_t>(tn) * positives;
  };
  auto accuracy = [&](std::size_t tp, std::size_t tn) {
    return 0.5 * (static_cast<double>(tp) / static_cast<double>(positives) +
                  static_cast<double>(tn) / static_cast<double>(negatives));
  };

  // -inf: everything predicted inconsistent.
  std::size_t tp = positives, tn = 0;
  Threshold best{-kInf, -kInf, -kInf, accuracy(tp, tn)};
  std::uint64_t best_objective = objective(tp, tn);

  std::size_t i = 0;
  while (i < n) {
    const double value = scores[order[i]];
    while (i < n && scores[order[i]] == value) {
      if (golds[order[i]]) --tp; else ++tn;
      ++i;
    }
    const bool last = i == n;
    const double next = last ? kInf : scores[order[i]];
    const std::uint64_t obj = objective(tp, tn);
    if (obj > best_objective) {
      best_objective = obj;
      if (last) {
        best = {kInf, kInf, kInf, accuracy(tp, tn)};
      } else {
        best = {value + (next - value) / 2.0, value, next, accuracy(tp, tn)};
      }
    }
  }
  return best;
}

namespace detail {

// std::vector<bool> has no contiguous storage to span over.
struct Flags {
  explicit Flags(std::size_t n) : data(new bool[n]()), size(n) {}
  std::unique_ptr<bool[]> data;
  std::size_t size;
  std::span<const bool> view() const { return {data.get(), size}; }
};

inline Flags Golds(std::span<const EvalRecord> records) {
  Flags flags(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) flags.data[i] = records[i].inconsistent;
  return flags;
}

inline Flags Predictions(std::span<const EvalRecord> records, const Threshold& threshold) {
  Flags flags(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) flags.data[i] = threshold.Predict(records[i].score);
  return flags;
}

}  // namespace detail

inline Threshold TuneThreshold(std::span<const EvalRecord> records) {
  std::vector<double> scores;
  for (const auto& r : records) scores.push_back(r.score);
  return TuneThreshold(scores, detail::Golds(records).view());
}

inline double BalancedAccuracy(std::span<const EvalRecord> records, const Threshold& threshold) {
  return BalancedAccuracy(detail::Predictions(records, threshold).view(), detail::Golds(records).view());
}

// ---------------------------------------------------------------------------
// Bootstrap confidence intervals

// Linear interpolation between order statistics.
inline double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw MetricError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double position = q * static_cast<double>(values.size() - 1);
  const std::size_t below = static_cast<std::size_t>(std::floor(position));
  const std::size_t above = std::min(below + 1, values.size() - 1);
  const double fraction = position - static_cast<double>(below);
  return values[below] + fraction * (values[above] - values[below]);
}

struct BootstrapOptions {
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  double level = 0.95;
  std::size_t jobs = 1;
};

// Half-width of the central `level` percentile interval of balanced accuracy
// over record resamples drawn with replacement. Resamples that miss a class
// are redrawn. Resample r uses its own generator keyed on (seed, r), so the
// result does not depend on `jobs`.
inline double BootstrapHalfWidth(std::span<const EvalRecord> records, const Threshold& threshold,
                                 const BootstrapOptions& options) {
  if (options.resamples < 100) throw MetricError("bootstrap needs at least 100 resamples");
  if (!(options.level > 0.0 && options.level < 1.0)) throw MetricError("level must lie in (0, 1)");
  const std::size_t n = records.size();
  std::size_t positives = 0;
  for (const auto& r : records) positives += r.inconsistent;
  if (n < 2 || positives == 0 || positives == n) {
    throw MetricError("bootstrap needs records of both classes");
  }
  const detail::Flags predictions = detail::Predictions(records, threshold);

  std::vector<double> accuracies(options.resamples);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      KeyedRng rng(options.seed, "bootstrap", r);
      std::size_t tp, tn, pos;
      do {
        tp = tn = pos = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t i = rng.Index(n);
          if (records[i].inconsistent) {
            ++pos;
            tp += predictions.data[i];
          } else {
            tn += !predictions.data[i];
          }
        }
      } while (pos == 0 || pos == n);
      accuracies[r] = 0.5 * (static_cast<double>(tp) / static_cast<double>(pos) +
                             static_cast<double>(tn) / static_cast<double>(n - pos));
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, options.resamples));
  if (jobs == 1) {
    run(0, options.resamples);
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (options.resamples + jobs - 1) / jobs;
    for (std::size_t j = 0; j < jobs; ++j) {
      const std::size_t begin = j * chunk;
      const std::size_t end = std::min(options.resamples, begin + chunk);
      if (begin < end) workers.emplace_back(run, begin, end);
    }
    for (auto& w : workers) w.join();
  }
  const double alpha = (1.0 - options.level) / 2.0;
  const double lo = Quantile(accuracies, alpha);
  const double hi = Quantile(accuracies, 1.0 - alpha);
  return (hi - lo) / 2.0;
}

// ---------------------------------------------------------------------------
// Reports

struct OriginResult {
  Origin origin = Origin::kCnn;
  Threshold threshold;
  std::size_t count = 0;
  double balanced_accuracy = 0.0;
  std::optional<double> ci_half_width;
};

struct DatasetResult {
  Origin origin = Origin::kCnn;
  std::string dataset_name;
  std::size_t count = 0;
  std::optional<double> balanced_accuracy;  // unset when one class is missing
};

struct EvalReport {
  std::vector<OriginResult> origins;  // cnn before xsum
  double average = 0.0;
  bool partial = false;  // fewer than two origins evaluated
  std::vector<DatasetResult> datasets;
};

inline std::vector<EvalRecord> Select(std::span<const EvalRecord> records, Origin origin) {
  std::vector<EvalRecord> out;
  for (const auto& r : records) {
    if (r.origin == origin) out.push_back(r);
  }
  return out;
}

// Applies the per-origin thresholds to `test`. Every origin present in the
// test data needs a threshold.
inline EvalReport Evaluate(std::span<const EvalRecord> test,
                           const std::map<Origin, Threshold>& thresholds) {
  if (test.empty()) throw DataError("no test records");
  EvalReport report;
  for (Origin origin : {Origin::kCnn, Origin::kXsum}) {
    const auto subset = Select(test, origin);
    if (subset.empty()) continue;
    auto it = thresholds.find(origin);
    if (it == thresholds.end()) {
      throw DataError("no threshold for origin '" + std::string(ToString(origin)) + "'");
    }
    OriginResult result;
    result.origin = origin;
    result.threshold = it->second;
    result.count = subset.size();
    result.balanced_accuracy = BalancedAccuracy(subset, it->second);
    report.origins.push_back(result);

    std::map<std::string, std::vector<EvalRecord>> by_dataset;
    for (const auto& r : subset) by_dataset[r.dataset_name].push_back(r);
    for (const auto& [name, records] : by_dataset) {
      DatasetResult d{origin, name, records.size(), std::nullopt};
      try {
        d.balanced_accuracy = BalancedAccuracy(records, it->second);
      } catch (const MetricError&) {
      }
      report.datasets.push_back(std::move(d));
    }
  }
  double sum = 0.0;
  for (const auto& o : report.origins) sum += o.balanced_accuracy;
  report.average = sum / static_cast<double>(report.origins.size());
  report.partial = report.origins.size() < 2;
  return report;
}

struct EvaluationOptions {
  std::size_t ci_resamples = 1000;  // 0 disables intervals
  std::uint64_t seed = 0;
  double level = 0.95;
  std::size_t jobs = 1;
};

// Tunes a threshold per origin on `val`, evaluates `test`, and attaches
// bootstrap intervals per origin.
inline EvalReport RunEvaluation(std::span<const EvalRecord> val, std::span<const EvalRecord> test,
                                const EvaluationOptions& options) {
  std::map<Origin, Threshold> thresholds;
  for (Origin origin : {Origin::kCnn, Origin::kXsum}) {
    if (Select(test, origin).empty()) continue;
    const auto tuning = Select(val, origin);
    if (tuning.empty()) {
      throw DataError("no validation records for origin '" + std::string(ToString(origin)) + "'");
    }
    thresholds[origin] = TuneThreshold(tuning);
  }
  EvalReport report = Evaluate(test, thresholds);
  if (options.ci_resamples > 0) {
    for (auto& o : report.origins) {
      o.ci_half_width = BootstrapHalfWidth(
          Select(test, o.origin), o.threshold,
          {options.ci_resamples, options.seed, options.level, options.jobs});
    }
  }
  return report;
}

inline nlohmann::ordered_json ThresholdJson(double value) {
  if (std::isinf(value)) return value > 0 ? "+inf" : "-inf";
  return value;
}

inline nlohmann::ordered_json ToJson(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["origins"] = nlohmann::ordered_json::array();
  for (const auto& o : report.origins) {
    nlohmann::ordered_json item;
    item["origin"] = ToString(o.origin);
    item["threshold"] = ThresholdJson(o.threshold.value);
    item["count"] = o.count;
    item["balanced_accuracy"] = o.balanced_accuracy;
    item["ci_half_width"] = o.ci_half_width ? nlohmann::ordered_json(*o.ci_half_width) : nullptr;
    j["origins"].push_back(item);
  }
  j["average"] = report.average;
  j["partial"] = report.partial;
  j["datasets"] = nlohmann::ordered_json::array();
  for (const auto& d : report.datasets) {
    nlohmann::ordered_json item;
    item["origin"] = ToString(d.origin);
    item["dataset_name"] = d.dataset_name;
    item["count"] = d.count;
    item["balanced_accuracy"] =
        d.balanced_accuracy ? nlohmann::ordered_json(*d.balanced_accuracy) : nullptr;
    j["datasets"].push_back(item);
  }
  return j;
}

inline EvalReport ReportFromJson(const nlohmann::json& j) {
  EvalReport report;
  try {
    for (const auto& item : j.at("origins")) {
      OriginResult o;
      o.origin = item.at("origin") == "cnn" ? Origin::kCnn : Origin::kXsum;
      o.count = item.at("count").get<std::size_t>();
      o.balanced_accuracy = item.at("balanced_accuracy").get<double>();
      if (item.contains("ci_half_width") && item["ci_half_width"].is_number()) {
        o.ci_half_width = item["ci_half_width"].get<double>();
      }
      const auto& t = item.at("threshold");
      o.threshold = Threshold::Fixed(t.is_number() ? t.get<double>()
                                     : t == "+inf" ? std::numeric_limits<double>::infinity()
                                                   : -std::numeric_limits<double>::infinity());
      report.origins.push_back(o);
    }
    report.average = j.at("average").get<double>();
    report.partial = j.at("partial").get<bool>();
    for (const auto& item : j.at("datasets")) {
      DatasetResult d;
      d.origin = item.at("origin") == "cnn" ? Origin::kCnn : Origin::kXsum;
      d.dataset_name = item.at("dataset_name").get<std::string>();
      d.count = item.at("count").get<std::size_t>();
      if (item.at("balanced_accuracy").is_number()) d.balanced_accuracy = item["balanced_accuracy"].get<double>();
      report.datasets.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed evaluation report: ") + e.what());
  }
  return report;
}

namespace detail {

inline std::string Percent(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << value * 100.0;
  return out.str();
}

inline const OriginResult* FindOrigin(const EvalReport& report, Origin origin) {
  for (const auto& o : report.origins) {
    if (o.origin == origin) return &o;
  }
  return nullptr;
}

inline std::string Cell(const EvalReport& report, Origin origin) {
  const OriginResult* o = FindOrigin(report, origin);
  if (!o) return "-";
  std::string cell = Percent(o->balanced_accuracy);
  if (o->ci_half_width) cell += " +/- " + Percent(*o->ci_half_width);
  return cell;
}

inline std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

// Balanced accuracy table in percent, one row per named report. Rows after
// the first also show the change of the average against the first row.
inline std::string FormatComparison(
    const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::ostringstream out;
  std::size_t name_width = 6;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size() + 2);
  out << detail::Pad("system", name_width) << detail::Pad("cnn", 18) << detail::Pad("xsum", 18)
      << "avg\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [name, report] = rows[i];
    out << detail::Pad(name, name_width) << detail::Pad(detail::Cell(report, Origin::kCnn), 18)
        << detail::Pad(detail::Cell(report, Origin::kXsum), 18) << detail::Percent(report.average);
    if (report.partial) out << " (partial)";
    if (i > 0) {
      const double delta = (report.average - rows.front().second.average) * 100.0;
      std::ostringstream d;
      d << std::showpos << std::fixed << std::setprecision(1) << delta;
      out << "  [" << d.str() << "]";
    }
    out << '\n';
  }
  return out.str();
}

inline std::string FormatReport(const EvalReport& report) {
  std::ostringstream out;
  for (const auto& o : report.origins) {
    out << ToString(o.origin) << ": threshold ";
    if (std::isinf(o.threshold.value)) out << (o.threshold.value > 0 ? "+inf" : "-inf");
    else out << o.threshold.value;
    out << ", balanced accuracy " << detail::Cell(report, o.origin) << " (n=" << o.count << ")\n";
  }
  out << "average: " << detail::Percent(report.average) << (report.partial ? " (partial)" : "")
      << "\n\nper dataset:\n";
  for (const auto& d : report.datasets) {
    out << "  " << detail::Pad(std::string(ToString(d.origin)), 6) << detail::Pad(d.dataset_name, 16)
        << (d.balanced_accuracy ? detail::Percent(*d.balanced_accuracy) : std::string("n/a"))
        << " (n=" << d.count << ")\n";
  }
  return out.str();
}

}  // namespace amrperturb::eval

#endif  // AMRPERTURB_EVAL_HPP
