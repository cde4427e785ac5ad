#include "salt/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "salt/errors.hpp"

namespace salt {

namespace {

constexpr char kMagic[8] = {'S', 'A', 'L', 'T', 'C', 'K', 'P', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

std::uint64_t read_u64(std::ifstream& in) {
  char buf[8];
  in.read(buf, 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return v;
}

nlohmann::json config_to_json(const ToyTransformer::Config& c) {
  return nlohmann::json{{"dim", c.dim},
                        {"num_heads", c.num_heads},
                        {"num_layers", c.num_layers},
                        {"ffn_dim", c.ffn_dim},
                        {"max_sequence_length", c.max_sequence_length},
                        {"num_segments", c.num_segments},
                        {"num_classes", c.num_classes},
                        {"init_seed", c.init_seed}};
}

ToyTransformer::Config config_from_json(const nlohmann::json& j) {
  ToyTransformer::Config c;
  c.dim = j.at("dim").get<std::size_t>();
  c.num_heads = j.at("num_heads").get<std::size_t>();
  c.num_layers = j.at("num_layers").get<std::size_t>();
  c.ffn_dim = j.at("ffn_dim").get<std::size_t>();
  c.max_sequence_length = j.at("max_sequence_length").get<std::size_t>();
  c.num_segments = j.at("num_segments").get<std::size_t>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.init_seed = j.at("init_seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_checkpoint(ToyTransformer& model, const CheckpointMeta& meta,
                     const std::string& path) {
  auto params = model.named_parameters();

  nlohmann::json header;
  header["format_version"] = 1;
  header["kind"] = meta.kind;
  header["seed"] = meta.seed;
  header["config_hash"] = meta.config_hash;
  header["source_language"] = meta.source_language;
  header["tokenizer_fingerprint"] = model.tokenizer().fingerprint();
  header["extra"] = meta.extra.empty() ? nlohmann::json::object()
                                       : nlohmann::json::parse(meta.extra);
  header["model"] = config_to_json(model.config());
  header["tokenizer"] = nlohmann::json::parse(model.tokenizer().to_json());
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& [name, param] : params) {
    manifest.push_back({{"name", name},
                        {"rows", param->value.rows()},
                        {"cols", param->value.cols()}});
  }
  header["parameters"] = manifest;

  std::ofstream out(path, std::ios::binary);
  if (!out.is_open()) throw InputError("cannot write checkpoint '" + path + "'");
  out.write(kMagic, sizeof(kMagic));
  const std::string header_text = header.dump();
  write_u64(out, header_text.size());
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& [name, param] : params) {
    for (Eigen::Index r = 0; r < param->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < param->value.cols(); ++c) {
        const double v = param->value(r, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof(double));
      }
    }
  }
  if (!out.good()) throw InputError("failed writing checkpoint '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) throw InputError("cannot open checkpoint '" + path + "'");

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in.good() || std::string(magic, 8) != std::string(kMagic, 8)) {
    throw DataError("'" + path + "' is not a checkpoint file");
  }
  const std::uint64_t header_len = read_u64(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in.good()) throw DataError("truncated checkpoint header in '" + path + "'");

  nlohmann::json header = nlohmann::json::parse(header_text);
  if (header.at("format_version").get<int>() != 1) {
    throw DataError("unsupported checkpoint format version in '" + path + "'");
  }

  Tokenizer tokenizer = Tokenizer::from_json(header.at("tokenizer").dump());
  ToyTransformer::Config config = config_from_json(header.at("model"));

  LoadedCheckpoint loaded;
  loaded.model = std::make_unique<ToyTransformer>(std::move(tokenizer), config);
  loaded.meta.kind = header.at("kind").get<std::string>();
  loaded.meta.seed = header.at("seed").get<std::uint64_t>();
  loaded.meta.config_hash = header.at("config_hash").get<std::string>();
  loaded.meta.source_language = header.at("source_language").get<std::string>();
  loaded.meta.extra = header.at("extra").dump();

  auto params = loaded.model->named_parameters();
  const auto& manifest = header.at("parameters");
  if (manifest.size() != params.size()) {
    throw DataError("checkpoint parameter manifest mismatch in '" + path + "'");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& [name, param] = params[i];
    const auto& entry = manifest[i];
    if (entry.at("name").get<std::string>() != name ||
        entry.at("rows").get<Eigen::Index>() != param->value.rows() ||
        entry.at("cols").get<Eigen::Index>() != param->value.cols()) {
      throw DataError("checkpoint parameter '" + name + "' shape mismatch in '" + path + "'");
    }
    for (Eigen::Index r = 0; r < param->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < param->value.cols(); ++c) {
        double v = 0.0;
        in.read(reinterpret_cast<char*>(&v), sizeof(double));
        param->value(r, c) = v;
      }
    }
  }
  if (!in.good()) throw DataError("truncated checkpoint data in '" + path + "'");
  return loaded;
}

}  // namespace salt
