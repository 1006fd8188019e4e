#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "symdisc/optical.hpp"
#include "symdisc/sim.hpp"

namespace symdisc {

using ordered_json = nlohmann::ordered_json;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Line-oriented netlist: a header line
///   netlist dim=<N> state=<l> perm=<p0,p1,...>
/// followed by one element per line, e.g.
///   II HWP angle=1.9106332362490186 path=2
/// Parsing the emitted text reproduces the netlist exactly.
std::string netlist_to_text(const OpticalNetlist& netlist);
OpticalNetlist netlist_from_text(std::string_view text);

ordered_json netlist_to_json(const OpticalNetlist& netlist);
OpticalNetlist netlist_from_json(const ordered_json& j);

ordered_json report_to_json(const SimReport& report, const SimConfig& config,
                            const AngleVector& angles);

/// One row per prepared index: conclusive detector counts, then the
/// inconclusive and discarded tallies.
std::string report_to_csv(const SimReport& report);

/// Writes via a temporary file and rename so failures leave no partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace symdisc
