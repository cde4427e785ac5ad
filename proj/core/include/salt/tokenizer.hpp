#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace salt {

// One tokenized text. `continuation[i]` is true when piece i continues the
// word started by an earlier piece (word-internal pieces are never
// substitution sites).
struct TokenizedText {
  std::vector<int> ids;
  std::vector<bool> continuation;

  std::size_t size() const { return ids.size(); }
};

// Whitespace word tokenizer with character fallback: a word present in the
// vocabulary maps to a single id; an unknown word is split into per-character
// pieces (unknown characters map to [UNK]). The fallback mirrors how subword
// tokenizers degrade on scripts they were not trained for, which is what the
// vocabulary coverage machinery keys off.
class Tokenizer {
 public:
  // Empty tokenizer; assign one built by from_vocabulary() before use.
  Tokenizer() = default;

  static constexpr const char* kPad = "[PAD]";
  static constexpr const char* kUnk = "[UNK]";
  static constexpr const char* kCls = "[CLS]";
  static constexpr const char* kSep = "[SEP]";
  static constexpr const char* kMask = "[MASK]";

  // Builds a tokenizer whose vocabulary is the five special tokens followed
  // by `tokens` in the given order. Duplicate or special-colliding entries
  // are input errors.
  static Tokenizer from_vocabulary(const std::vector<std::string>& tokens);

  std::size_t vocab_size() const { return id_to_token_.size(); }

  // -1 when the token string is not in the vocabulary.
  int token_to_id(const std::string& token) const;
  const std::string& id_to_token(int id) const;
  bool has_token(const std::string& token) const { return token_to_id(token) >= 0; }

  int pad_id() const { return pad_id_; }
  int unk_id() const { return unk_id_; }
  int cls_id() const { return cls_id_; }
  int sep_id() const { return sep_id_; }
  int mask_id() const { return mask_id_; }

  bool is_special(int id) const;
  const std::vector<int>& special_ids() const { return special_ids_; }

  // Pieces for one standalone word (no whitespace inside).
  std::vector<int> encode_word(const std::string& word) const;

  // Whitespace-split encoding of a full text. No special tokens are added.
  TokenizedText encode(const std::string& text) const;

  // Space-joined surface forms.
  std::string decode(std::span<const int> ids) const;

  // Serialization of the vocabulary (specials first), for embedding in
  // checkpoints and corpus directories.
  std::vector<std::string> vocabulary() const { return id_to_token_; }
  std::string to_json() const;
  static Tokenizer from_json(const std::string& json_text);

  // FNV-1a over the vocabulary; identifies the tokenizer in checkpoints.
  std::string fingerprint() const;

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<int> special_ids_;
  int pad_id_ = -1, unk_id_ = -1, cls_id_ = -1, sep_id_ = -1, mask_id_ = -1;
};

// True when every character of the token is ASCII punctuation.
bool is_punctuation_token(const std::string& token);

// ASCII lowercase fold; bytes outside A-Z pass through.
std::string ascii_fold(const std::string& s);

}  // namespace salt
