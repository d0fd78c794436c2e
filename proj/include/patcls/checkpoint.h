#ifndef PATCLS_CHECKPOINT_H_
#define PATCLS_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "patcls/model.h"

namespace patcls {

inline constexpr int kCheckpointVersion = 1;

// Layout:
//   "PATCLS-CHECKPOINT\n"
//   uint64 little-endian length of the JSON header
//   JSON header: format_version, architecture, class list, vocabulary and
//                the name and length of every parameter group
//   raw little-endian IEEE-754 doubles, groups in header order
std::string SerializeCheckpoint(const Model& model);
Model DeserializeCheckpoint(std::string_view bytes);

void SaveCheckpoint(const Model& model, const std::filesystem::path& path);
// Throws DataError on a bad magic, unsupported version or truncated data.
Model LoadCheckpoint(const std::filesystem::path& path);

}  // namespace patcls

#endif  // PATCLS_CHECKPOINT_H_
