#include "salt/data.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "salt/errors.hpp"

namespace salt {

namespace fs = std::filesystem;

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw InputError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void write_lines(std::span<const std::string> lines, const std::string& path) {
  std::ofstream out(path);
  if (!out.is_open()) throw InputError("cannot write '" + path + "'");
  for (const auto& line : lines) out << line << '\n';
}

std::vector<TaskExample> load_task_examples(const std::string& path) {
  std::vector<TaskExample> examples;
  std::unordered_set<int> indices;
  for (const auto& line : read_lines(path)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("malformed JSONL in '" + path + "': " + e.what());
    }
    TaskExample ex;
    ex.index = j.at("index").get<int>();
    ex.language = j.at("language").get<std::string>();
    ex.sentence_a = j.at("sentence_a").get<std::string>();
    ex.sentence_b = j.at("sentence_b").get<std::string>();
    ex.label = j.at("label").get<int>();
    if (ex.label < 0) throw DataError("negative label in '" + path + "'");
    if (!indices.insert(ex.index).second) {
      throw DataError("duplicate example index " + std::to_string(ex.index) + " in '" + path + "'");
    }
    examples.push_back(std::move(ex));
  }
  if (examples.empty()) throw InputError("dataset '" + path + "' is empty");
  return examples;
}

void save_task_examples(std::span<const TaskExample> examples, const std::string& path) {
  std::ofstream out(path);
  if (!out.is_open()) throw InputError("cannot write '" + path + "'");
  for (const auto& ex : examples) {
    nlohmann::json j;
    j["index"] = ex.index;
    j["language"] = ex.language;
    j["sentence_a"] = ex.sentence_a;
    j["sentence_b"] = ex.sentence_b;
    j["label"] = ex.label;
    out << j.dump() << '\n';
  }
}

std::map<std::string, std::vector<TaskExample>> load_test_sets(const std::string& dir,
                                                               const std::string& prefix) {
  std::map<std::string, std::vector<TaskExample>> sets;
  if (!fs::is_directory(dir)) throw InputError("'" + dir + "' is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix, 0) != 0) continue;
    if (entry.path().extension() != ".jsonl") continue;
    const std::string lang = entry.path().stem().string().substr(prefix.size());
    if (lang.empty()) continue;
    sets[lang] = load_task_examples(entry.path().string());
  }
  if (sets.empty()) {
    throw InputError("no '" + prefix + "<lang>.jsonl' files found in '" + dir + "'");
  }
  return sets;
}

}  // namespace salt
