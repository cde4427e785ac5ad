#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "salt/config.hpp"
#include "salt/eval.hpp"

namespace salt {

// One training configuration measured across every seed.
struct VariantSummary {
  std::string name;  // baseline | salt | no_mixup | en_only
  std::vector<double> per_seed_target_avg;       // zero-shot avg excl. source
  std::vector<double> per_seed_generalized_avg;  // grand average of the matrix
  double mean_target_avg = 0.0;
  double mean_generalized_avg = 0.0;
  std::map<std::string, double> mean_per_language;
};

struct E2eReport {
  std::vector<std::uint64_t> seeds;
  std::string source_language;
  std::vector<VariantSummary> variants;
  TTestResult salt_vs_baseline;              // paired over seeds
  TTestResult salt_vs_baseline_generalized;  // paired over seeds
  bool ordering_mixup_ok = false;    // salt >= no_mixup >= baseline (means)
  bool ordering_en_only_ok = false;  // salt >= en_only >= baseline (means)

  const VariantSummary& variant(const std::string& name) const;
};

// Full testbed pipeline: generate a corpus, pretrain the toy encoder once,
// build vocabularies through the standard pipeline, augment the training
// data offline, then fine-tune baseline/salt/no_mixup/en_only per seed and
// aggregate zero-shot results. All artifacts land under out_dir.
E2eReport run_synth_e2e(const RunConfig& config, const std::string& out_dir,
                        std::ostream* progress = nullptr);

std::string e2e_report_to_json(const E2eReport& report);
std::string render_e2e_table(const E2eReport& report);

}  // namespace salt
