#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "salt/data.hpp"
#include "salt/model.hpp"

namespace salt {

int predict_label(const ToyTransformer& model, const TaskExample& example);
double accuracy(const ToyTransformer& model, std::span<const TaskExample> examples);

// Zero-shot report: accuracy per language with averages excluding and
// including the source language.
struct EvaluationReport {
  std::string source_language;
  std::map<std::string, double> per_language_accuracy;
  double avg_excl_source = 0.0;
  double avg_incl_source = 0.0;
};

EvaluationReport evaluate(const ToyTransformer& model,
                          const std::map<std::string, std::vector<TaskExample>>& test_sets,
                          const std::string& source_language);

// Cross-language pairing: cell (i, j) evaluates premises from language i
// against hypotheses from language j, over test sets that are translations
// of the same examples (validated by index and label agreement). L languages
// produce an L x L matrix whose diagonal equals the standard evaluation.
struct GeneralizedReport {
  std::vector<std::string> languages;
  Eigen::MatrixXd matrix;
  double average = 0.0;
};

GeneralizedReport evaluate_generalized(
    const ToyTransformer& model,
    const std::map<std::string, std::vector<TaskExample>>& test_sets);

enum class TTestKind { kStudent, kWelch, kPaired };

struct TTestResult {
  double t = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  bool significant = false;  // at p <= 0.05
};

// Two-sample t-test p-value; Student (unpaired, pooled variance) by default.
// Zero-variance degenerate inputs resolve to p = 1 when the means agree and
// p = 0 otherwise.
TTestResult significance(std::span<const double> samples_a,
                         std::span<const double> samples_b,
                         TTestKind kind = TTestKind::kStudent);

std::string evaluation_report_to_json(const EvaluationReport& report);
std::string generalized_report_to_json(const GeneralizedReport& report);
// Aligned-column text rendering of the per-language accuracies.
std::string render_evaluation_table(const EvaluationReport& report);
std::string render_generalized_table(const GeneralizedReport& report);

}  // namespace salt
