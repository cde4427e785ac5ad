#include "salt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "salt/errors.hpp"

namespace salt {

namespace {

int classify_pair(const ToyTransformer& model, const std::string& sentence_a,
                  const std::string& sentence_b) {
  const auto& tokenizer = model.tokenizer();
  const auto a = tokenizer.encode(sentence_a);
  const auto b = tokenizer.encode(sentence_b);
  if (a.size() == 0 || b.size() == 0) {
    throw DataError("test sentence tokenizes to an empty sequence");
  }
  const auto pair = model.encode_pair(a.ids, b.ids);
  const nn::Matrix rows = model.lookup_rows(pair.ids);
  const nn::Matrix logits = model.classify(rows, pair.segments, nullptr);
  Eigen::Index best = 0;
  logits.row(0).maxCoeff(&best);
  return static_cast<int>(best);
}

double sample_mean(std::span<const double> xs) {
  double sum = 0.0;
  for (const double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
  double sum = 0.0;
  for (const double x : xs) sum += (x - mean) * (x - mean);
  return sum / static_cast<double>(xs.size() - 1);
}

double two_sided_p(double t, double df) {
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

int predict_label(const ToyTransformer& model, const TaskExample& example) {
  return classify_pair(model, example.sentence_a, example.sentence_b);
}

double accuracy(const ToyTransformer& model, std::span<const TaskExample> examples) {
  if (examples.empty()) throw InputError("empty evaluation set");
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    if (predict_label(model, ex) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

EvaluationReport evaluate(const ToyTransformer& model,
                          const std::map<std::string, std::vector<TaskExample>>& test_sets,
                          const std::string& source_language) {
  if (test_sets.empty()) throw InputError("no test sets given");
  EvaluationReport report;
  report.source_language = source_language;

  double sum_all = 0.0, sum_excl = 0.0;
  std::size_t count_excl = 0;
  for (const auto& [language, examples] : test_sets) {
    const double acc = accuracy(model, examples);
    report.per_language_accuracy[language] = acc;
    sum_all += acc;
    if (language != source_language) {
      sum_excl += acc;
      ++count_excl;
    }
  }
  report.avg_incl_source = sum_all / static_cast<double>(test_sets.size());
  report.avg_excl_source =
      count_excl == 0 ? report.avg_incl_source
                      : sum_excl / static_cast<double>(count_excl);
  return report;
}

GeneralizedReport evaluate_generalized(
    const ToyTransformer& model,
    const std::map<std::string, std::vector<TaskExample>>& test_sets) {
  if (test_sets.empty()) throw InputError("no test sets given");

  GeneralizedReport report;
  for (const auto& [language, examples] : test_sets) report.languages.push_back(language);

  // The pairing is only meaningful over aligned translations: every language
  // must present the same examples in the same order with the same labels.
  const auto& reference = test_sets.begin()->second;
  for (const auto& [language, examples] : test_sets) {
    if (examples.size() != reference.size()) {
      throw DataError("test sets are not aligned: '" + language + "' has " +
                      std::to_string(examples.size()) + " examples, expected " +
                      std::to_string(reference.size()));
    }
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (examples[i].index != reference[i].index ||
          examples[i].label != reference[i].label) {
        throw DataError("test sets disagree at example " + std::to_string(i) +
                        " for language '" + language + "'");
      }
    }
  }

  const auto n_langs = static_cast<Eigen::Index>(report.languages.size());
  report.matrix.setZero(n_langs, n_langs);
  for (Eigen::Index i = 0; i < n_langs; ++i) {
    const auto& premises = test_sets.at(report.languages[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n_langs; ++j) {
      const auto& hypotheses = test_sets.at(report.languages[static_cast<std::size_t>(j)]);
      std::size_t correct = 0;
      for (std::size_t k = 0; k < premises.size(); ++k) {
        const int predicted =
            classify_pair(model, premises[k].sentence_a, hypotheses[k].sentence_b);
        if (predicted == premises[k].label) ++correct;
      }
      report.matrix(i, j) =
          static_cast<double>(correct) / static_cast<double>(premises.size());
    }
  }
  report.average = report.matrix.mean();
  return report;
}

TTestResult significance(std::span<const double> samples_a,
                         std::span<const double> samples_b, TTestKind kind) {
  if (samples_a.size() < 2 || samples_b.size() < 2) {
    throw InputError("t-test requires at least two samples per side");
  }

  TTestResult result;
  double denom = 0.0;
  if (kind == TTestKind::kPaired) {
    if (samples_a.size() != samples_b.size()) {
      throw InputError("paired t-test requires equal sample counts");
    }
    std::vector<double> diffs(samples_a.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) diffs[i] = samples_a[i] - samples_b[i];
    const double mean = sample_mean(diffs);
    const double var = sample_variance(diffs, mean);
    const auto n = static_cast<double>(diffs.size());
    denom = std::sqrt(var / n);
    result.degrees_of_freedom = n - 1.0;
    result.t = denom == 0.0 ? 0.0 : mean / denom;
    if (denom == 0.0) {
      result.p_value = mean == 0.0 ? 1.0 : 0.0;
      result.significant = result.p_value <= 0.05;
      return result;
    }
  } else {
    const double mean_a = sample_mean(samples_a);
    const double mean_b = sample_mean(samples_b);
    const double var_a = sample_variance(samples_a, mean_a);
    const double var_b = sample_variance(samples_b, mean_b);
    const auto n_a = static_cast<double>(samples_a.size());
    const auto n_b = static_cast<double>(samples_b.size());

    if (kind == TTestKind::kStudent) {
      const double pooled =
          ((n_a - 1.0) * var_a + (n_b - 1.0) * var_b) / (n_a + n_b - 2.0);
      denom = std::sqrt(pooled * (1.0 / n_a + 1.0 / n_b));
      result.degrees_of_freedom = n_a + n_b - 2.0;
    } else {
      const double se2 = var_a / n_a + var_b / n_b;
      denom = std::sqrt(se2);
      result.degrees_of_freedom =
          se2 == 0.0 ? n_a + n_b - 2.0
                     : se2 * se2 /
                           (var_a * var_a / (n_a * n_a * (n_a - 1.0)) +
                            var_b * var_b / (n_b * n_b * (n_b - 1.0)));
    }
    if (denom == 0.0) {
      result.t = 0.0;
      result.p_value = mean_a == mean_b ? 1.0 : 0.0;
      result.significant = result.p_value <= 0.05;
      return result;
    }
    result.t = (mean_a - mean_b) / denom;
  }

  result.p_value = two_sided_p(result.t, result.degrees_of_freedom);
  result.significant = result.p_value <= 0.05;
  return result;
}

std::string evaluation_report_to_json(const EvaluationReport& report) {
  nlohmann::json j;
  j["source_language"] = report.source_language;
  j["per_language_accuracy"] = report.per_language_accuracy;
  j["avg_excl_source"] = report.avg_excl_source;
  j["avg_incl_source"] = report.avg_incl_source;
  return j.dump(2);
}

std::string generalized_report_to_json(const GeneralizedReport& report) {
  nlohmann::json j;
  j["languages"] = report.languages;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < report.matrix.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < report.matrix.cols(); ++k) row.push_back(report.matrix(i, k));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  j["average"] = report.average;
  return j.dump(2);
}

std::string render_evaluation_table(const EvaluationReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "language" << std::right << std::setw(10)
      << "accuracy" << '\n';
  for (const auto& [language, acc] : report.per_language_accuracy) {
    out << std::left << std::setw(10) << language << std::right << std::setw(10)
        << std::fixed << std::setprecision(4) << acc << '\n';
  }
  out << std::left << std::setw(10) << "avg" << std::right << std::setw(10)
      << std::fixed << std::setprecision(4) << report.avg_excl_source << '\n';
  out << std::left << std::setw(10) << ("avg w/ " + report.source_language)
      << std::right << std::setw(10) << std::fixed << std::setprecision(4)
      << report.avg_incl_source << '\n';
  return out.str();
}

std::string render_generalized_table(const GeneralizedReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "";
  for (const auto& language : report.languages) {
    out << std::right << std::setw(8) << language;
  }
  out << std::right << std::setw(8) << "avg" << '\n';
  for (Eigen::Index i = 0; i < report.matrix.rows(); ++i) {
    out << std::left << std::setw(8) << report.languages[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < report.matrix.cols(); ++j) {
      out << std::right << std::setw(8) << std::fixed << std::setprecision(3)
          << report.matrix(i, j);
    }
    out << std::right << std::setw(8) << std::fixed << std::setprecision(3)
        << report.matrix.row(i).mean() << '\n';
  }
  out << std::left << std::setw(8) << "avg";
  for (Eigen::Index j = 0; j < report.matrix.cols(); ++j) {
    out << std::right << std::setw(8) << std::fixed << std::setprecision(3)
        << report.matrix.col(j).mean();
  }
  out << std::right << std::setw(8) << std::fixed << std::setprecision(3)
      << report.average << '\n';
  return out.str();
}

}  // namespace salt
