#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "salt/model.hpp"

namespace salt {

// Sidecar facts recorded with the weights. `extra` is free-form JSON for
// pipeline bookkeeping (dev accuracy, epoch, ...).
struct CheckpointMeta {
  std::string kind;  // "encoder" | "classifier"
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string source_language;
  std::string extra;  // JSON object as text, may be empty
};

// Single-file binary checkpoint: magic, JSON header (model config, tokenizer
// vocabulary, metadata, parameter manifest), then row-major float64 blobs in
// manifest order. Little-endian throughout.
void save_checkpoint(ToyTransformer& model, const CheckpointMeta& meta,
                     const std::string& path);

struct LoadedCheckpoint {
  std::unique_ptr<ToyTransformer> model;
  CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace salt
