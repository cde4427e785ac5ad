#include "salt/tokenizer.hpp"

#include <cctype>
#include <sstream>

#include <nlohmann/json.hpp>

#include "salt/errors.hpp"

namespace salt {

namespace {

std::vector<std::string> split_whitespace(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream stream(text);
  std::string word;
  while (stream >> word) words.push_back(word);
  return words;
}

// One UTF-8 code point per piece; malformed bytes degrade to single bytes.
std::vector<std::string> utf8_characters(const std::string& word) {
  std::vector<std::string> chars;
  for (std::size_t i = 0; i < word.size();) {
    const auto byte = static_cast<unsigned char>(word[i]);
    std::size_t len = 1;
    if ((byte & 0xE0) == 0xC0) len = 2;
    else if ((byte & 0xF0) == 0xE0) len = 3;
    else if ((byte & 0xF8) == 0xF0) len = 4;
    if (i + len > word.size()) len = 1;
    chars.push_back(word.substr(i, len));
    i += len;
  }
  return chars;
}

}  // namespace

Tokenizer Tokenizer::from_vocabulary(const std::vector<std::string>& tokens) {
  Tokenizer t;
  const std::vector<std::string> specials = {kPad, kUnk, kCls, kSep, kMask};
  for (const auto& s : specials) {
    const int id = static_cast<int>(t.id_to_token_.size());
    t.id_to_token_.push_back(s);
    t.token_to_id_.emplace(s, id);
    t.special_ids_.push_back(id);
  }
  t.pad_id_ = 0;
  t.unk_id_ = 1;
  t.cls_id_ = 2;
  t.sep_id_ = 3;
  t.mask_id_ = 4;
  for (const auto& token : tokens) {
    if (token.empty()) throw InputError("tokenizer vocabulary contains an empty token");
    if (t.token_to_id_.count(token)) {
      throw InputError("tokenizer vocabulary contains duplicate token '" + token + "'");
    }
    const int id = static_cast<int>(t.id_to_token_.size());
    t.id_to_token_.push_back(token);
    t.token_to_id_.emplace(token, id);
  }
  return t;
}

int Tokenizer::token_to_id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? -1 : it->second;
}

const std::string& Tokenizer::id_to_token(int id) const {
  if (id < 0 || id >= static_cast<int>(id_to_token_.size())) {
    throw InputError("token id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

bool Tokenizer::is_special(int id) const {
  return id >= 0 && id <= mask_id_;
}

std::vector<int> Tokenizer::encode_word(const std::string& word) const {
  if (word.empty()) return {};
  const int id = token_to_id(word);
  if (id >= 0) return {id};
  std::vector<int> pieces;
  for (const auto& ch : utf8_characters(word)) {
    const int cid = token_to_id(ch);
    pieces.push_back(cid >= 0 ? cid : unk_id_);
  }
  return pieces;
}

TokenizedText Tokenizer::encode(const std::string& text) const {
  TokenizedText out;
  for (const auto& word : split_whitespace(text)) {
    const auto pieces = encode_word(word);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      out.ids.push_back(pieces[i]);
      out.continuation.push_back(i > 0);
    }
  }
  return out;
}

std::string Tokenizer::decode(std::span<const int> ids) const {
  std::string text;
  for (const int id : ids) {
    if (!text.empty()) text += ' ';
    text += id_to_token(id);
  }
  return text;
}

std::string Tokenizer::to_json() const {
  nlohmann::json j;
  j["tokens"] = std::vector<std::string>(id_to_token_.begin() + special_ids_.size(),
                                         id_to_token_.end());
  return j.dump(2);
}

Tokenizer Tokenizer::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  return from_vocabulary(j.at("tokens").get<std::vector<std::string>>());
}

std::string Tokenizer::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (const char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const auto& token : id_to_token_) mix(token);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

bool is_punctuation_token(const std::string& token) {
  if (token.empty()) return false;
  for (const char c : token) {
    if (!std::ispunct(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string ascii_fold(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace salt
