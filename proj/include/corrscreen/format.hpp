#pragma once

#include <filesystem>
#include <string>

namespace corrscreen {

// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

// Opens `path` for writing, throwing IoError if that fails, writes `text`.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace corrscreen
