#include "patcls/checkpoint.h"

#include <bit>
#include <cstring>

#include "json.hpp"
#include "patcls/error.h"
#include "patcls/io.h"

namespace patcls {

namespace {

constexpr std::string_view kMagic = "PATCLS-CHECKPOINT\n";

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void AppendU64(std::string& out, uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

}  // namespace

std::string SerializeCheckpoint(const Model& model) {
  const Architecture& arch = model.architecture();
  nlohmann::json header;
  header["format_version"] = kCheckpointVersion;
  header["kind"] = ModelKindName(arch.kind);
  header["features"] = FeatureKindName(arch.features);
  header["wiring"] = WiringName(arch.wiring);
  header["embed_dim"] = arch.embed_dim;
  header["feature_dim"] = arch.feature_dim;
  header["hidden_dim"] = arch.hidden_dim;
  header["head_dim"] = arch.head_dim;
  header["max_len"] = arch.max_len;
  header["classes"] = arch.class_codes;
  header["parents"] = arch.parents;
  header["vocabulary"] = model.vocabulary().tokens();
  nlohmann::json groups = nlohmann::json::array();
  const auto param_groups = model.params().Groups();
  for (const auto& g : param_groups) {
    groups.push_back({{"name", g.name}, {"size", g.values.size()}});
  }
  header["groups"] = groups;
  const std::string header_text = header.dump();

  std::string out(kMagic);
  AppendU64(out, header_text.size());
  out += header_text;
  for (const auto& g : param_groups) {
    out.append(reinterpret_cast<const char*>(g.values.data()),
               g.values.size() * sizeof(double));
  }
  return out;
}

Model DeserializeCheckpoint(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw DataError("not a patcls checkpoint (bad magic)");
  }
  size_t pos = kMagic.size();
  if (bytes.size() < pos + 8) throw DataError("truncated checkpoint header");
  uint64_t header_len;
  std::memcpy(&header_len, bytes.data() + pos, 8);
  pos += 8;
  if (bytes.size() - pos < header_len) throw DataError("truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(pos, header_len));
  } catch (const nlohmann::json::parse_error&) {
    throw DataError("corrupt checkpoint header");
  }
  pos += header_len;
  if (header.value("format_version", 0) != kCheckpointVersion) {
    throw DataError("unsupported checkpoint format version " +
                    header.value("format_version", nlohmann::json(0)).dump());
  }
  Architecture arch;
  Vocabulary vocab;
  try {
    arch.kind = ParseModelKind(header.at("kind").get<std::string>());
    arch.features = ParseFeatureKind(header.at("features").get<std::string>());
    arch.wiring = ParseWiring(header.at("wiring").get<std::string>());
    arch.embed_dim = header.at("embed_dim").get<size_t>();
    arch.feature_dim = header.at("feature_dim").get<size_t>();
    arch.hidden_dim = header.at("hidden_dim").get<size_t>();
    arch.head_dim = header.at("head_dim").get<size_t>();
    arch.max_len = header.at("max_len").get<size_t>();
    arch.class_codes = header.at("classes").get<std::vector<std::string>>();
    arch.parents = header.at("parents").get<std::vector<int>>();
    auto tokens = header.at("vocabulary").get<std::vector<std::string>>();
    if (arch.features == FeatureKind::kToyEncoder) {
      vocab = Vocabulary::FromTokens(std::move(tokens));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt checkpoint header: ") + e.what());
  } catch (const Error& e) {
    throw DataError(std::string("corrupt checkpoint header: ") + e.what());
  }
  ModelParams params = AllocateParams(arch, vocab.size());
  auto groups = params.Groups();
  const auto& described = header.at("groups");
  if (described.size() != groups.size()) {
    throw DataError("checkpoint parameter groups do not match its architecture");
  }
  for (size_t i = 0; i < groups.size(); ++i) {
    if (described[i].value("name", "") != groups[i].name ||
        described[i].value("size", size_t{0}) != groups[i].values.size()) {
      throw DataError("checkpoint group " + std::to_string(i) + " ('" +
                      described[i].value("name", "") + "') has an unexpected shape");
    }
    const size_t len = groups[i].values.size() * sizeof(double);
    if (bytes.size() - pos < len) throw DataError("truncated checkpoint data");
    std::memcpy(groups[i].values.data(), bytes.data() + pos, len);
    pos += len;
  }
  if (pos != bytes.size()) throw DataError("trailing bytes after checkpoint data");
  return Model::FromParts(std::move(arch), std::move(vocab), std::move(params));
}

void SaveCheckpoint(const Model& model, const std::filesystem::path& path) {
  WriteTextFile(path, SerializeCheckpoint(model));
}

Model LoadCheckpoint(const std::filesystem::path& path) {
  return DeserializeCheckpoint(ReadTextFile(path));
}

}  // namespace patcls
