#pragma once

#include <iosfwd>
#include <string>

#include "gigp/frequency_table.hpp"

namespace gigp::cli {

// Exit status of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Entry point of the gigp tool. Reports go to the file named by --out
// (resolved under $GIGP_OUTPUT_DIR when relative) or to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Frequency table CSV: optional leading '#' lines, then the header `j,count`
// and one integer row per support point. Throws IoError when the file cannot
// be read and ValidationError on malformed content.
FrequencyTable read_table_csv(const std::string& path);
FrequencyTable parse_table_csv(const std::string& text);

}  // namespace gigp::cli
