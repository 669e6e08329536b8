#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace scalelaw {

/// Called after the temporary file is complete and before it is renamed
/// into place. Tests use it to inject failures.
using BeforeRenameHook = std::function<void(const std::filesystem::path& temp)>;

/// Write `content` to `target` via a sibling temporary file and a rename, so
/// readers never observe a partial file. On any failure the temporary is
/// removed and `target` is left untouched.
void write_file_atomic(const std::filesystem::path& target, std::string_view content,
                       const BeforeRenameHook& before_rename = {});

std::string read_file(const std::filesystem::path& path);

}  // namespace scalelaw
