#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace salt {

// One labeled sentence pair. `index` is a stable id; augmented copies link
// back to it. Labels are class indices (3 for NLI-style, 2 for paraphrase).
struct TaskExample {
  int index = 0;
  std::string language;
  std::string sentence_a;
  std::string sentence_b;
  int label = 0;
};

std::vector<TaskExample> load_task_examples(const std::string& path);
void save_task_examples(std::span<const TaskExample> examples, const std::string& path);

// Test sets keyed by language, e.g. from files named test_<lang>.jsonl.
std::map<std::string, std::vector<TaskExample>> load_test_sets(const std::string& dir,
                                                               const std::string& prefix = "test_");

// Generic JSONL helpers.
std::vector<std::string> read_lines(const std::string& path);
void write_lines(std::span<const std::string> lines, const std::string& path);

}  // namespace salt
