#ifndef PATCLS_IO_H_
#define PATCLS_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace patcls {

// Both throw DataError on failure. WriteTextFile creates parent directories.
std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

std::string FormatFixed(double value, int decimals);

}  // namespace patcls

#endif  // PATCLS_IO_H_
