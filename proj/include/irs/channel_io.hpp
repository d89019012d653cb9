#pragma once

// Plain-text channel matrix files, for evaluating externally produced
// (e.g. ray-traced) channels:
//
//   # optional comment lines, anywhere
//   IRSCHANNELS 1 <M> <N>
//   H_r
//   <M rows, each with N "re im" pairs>
//   h_v
//   <1 row with N "re im" pairs>
//   h_d
//   <1 row with M "re im" pairs>
//
// Values are written with 17 significant digits so binary64 entries round-trip exactly.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "irs/channel.hpp"

namespace irs {

inline constexpr int kChannelFileVersion = 1;

class ChannelFileError : public std::runtime_error
{
public:
    ChannelFileError(std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

void write_channels(std::ostream& os, const ChannelSet& channels);
std::string format_channels(const ChannelSet& channels);

// Throws ChannelFileError carrying the 1-based line number of the problem.
ChannelSet parse_channels(std::string_view text);

ChannelSet load_channels(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void save_channels(const std::filesystem::path& path, const ChannelSet& channels);

// Shared by every writer that must not leave partial files behind.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

} // namespace irs
