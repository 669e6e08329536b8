#include "scalelaw/atomic_file.hpp"

#include "scalelaw/error.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace scalelaw {

void write_file_atomic(const std::filesystem::path& target, std::string_view content,
                       const BeforeRenameHook& before_rename) {
    namespace fs = std::filesystem;
    const fs::path temp = target.parent_path() / (target.filename().string() + ".tmp");
    try {
        {
            std::ofstream out(temp, std::ios::binary | std::ios::trunc);
            if (!out) throw InputError(fmt::format("cannot open '{}' for writing", temp.string()));
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            out.flush();
            if (!out) throw InputError(fmt::format("failed writing '{}'", temp.string()));
        }
        if (before_rename) before_rename(temp);
        fs::rename(temp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(temp, ec);
        throw;
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot read '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace scalelaw
