#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "navfuse/pipeline.hpp"
#include "navfuse/scenario.hpp"

namespace navfuse {

// Canonical on-disk formats. All writers are byte-deterministic: doubles are
// rendered shortest-round-trip, '#' header lines carry provenance (config,
// seed, input hashes) and never timestamps.
//
// Sensor stream, JSON lines:
//   {"t":<s>,"type":"imu","f":[fx,fy,fz],"w":[wx,wy,wz]}
//   {"t":<s>,"type":"odo","v":<m/s>}
//   {"t":<s>,"type":"5g","bs":<id>,"rtt_range_m":<m>,"aod_rad":<rad>,"pwr_range_m":<m>}
// Truth CSV columns: t,lat,lon,h,ve,vn,vu,p,r,a (radians, meters, m/s).
// Estimates CSV columns: t, the 15 states, the 15 covariance diagonals, mode.

/// Shortest decimal string that parses back to exactly v.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view data);

std::string read_text_file(const std::string& path);        // DataError if unreadable
void write_text_file(const std::string& path, const std::string& content);
std::uint64_t fnv1a64_file(const std::string& path);

std::string serialize_streams(const SensorStreams& s, const std::vector<std::string>& header);
SensorStreams parse_streams(const std::string& text);

std::string serialize_truth(const std::vector<TruthSample>& truth,
                            const std::vector<std::string>& header);
std::vector<TruthSample> parse_truth(const std::string& text);

std::string serialize_estimates(const std::vector<EstimateRow>& rows,
                                const std::vector<std::string>& header);
std::vector<EstimateRow> parse_estimates(const std::string& text);

std::string serialize_bs(const std::vector<BaseStation>& bss,
                         const std::vector<std::string>& header);
std::vector<BaseStation> parse_bs(const std::string& text);

/// 5G LOS/NLOS truth labels: t,bs,los CSV (for detector audits).
std::string serialize_labels(const std::vector<FivegRecord>& recs,
                             const std::vector<std::string>& header);

std::string serialize_scenario(const Scenario& sc);
/// Throws ConfigError naming the missing/invalid field.
Scenario parse_scenario(const std::string& text);

/// Estimate rows -> NavState stream (position, velocity, attitude slices).
std::vector<NavState> nav_from_rows(const std::vector<EstimateRow>& rows);

/// CDF as a two-column CSV (value, cumulative fraction).
std::string serialize_cdf(const std::vector<std::pair<double, double>>& cdf,
                          const std::vector<std::string>& header);

}  // namespace navfuse
