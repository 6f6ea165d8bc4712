#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "occorbit/control.hpp"
#include "occorbit/env.hpp"
#include "occorbit/orbit.hpp"
#include "occorbit/sim.hpp"
#include "occorbit/visibility.hpp"

namespace occorbit {

// Malformed or unreadable input; the message carries file and location.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kFormatVersion = 1;

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

// FNV-1a 64-bit, printed as 16 hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Environment environment_from_json(const nlohmann::json& j);
nlohmann::json environment_to_json(const Environment& env);
RoadGraph road_graph_from_json(const nlohmann::json& j);
nlohmann::json road_graph_to_json(const RoadGraph& g);

nlohmann::ordered_json schedule_to_json(const OrbitSchedule& s, const std::string& scenario_hash);
OrbitSchedule schedule_from_json(const nlohmann::json& j);

// CSV writers; the first line is "# occorbit-<kind> v<version> scenario=<hash>".
void write_trace_csv(std::ostream& os, const SimTrace& trace, const std::string& scenario_hash);
SimTrace read_trace_csv(std::istream& is);
void write_discretization_csv(std::ostream& os, const DiscretizationResult& d,
                              const std::string& scenario_hash);
void write_field_csv_header(std::ostream& os, const std::string& scenario_hash);
void write_field_csv_row(std::ostream& os, const Vec2& xi, const FieldSample& f);

// Text grid: key/value header lines then run-length-encoded occupancy
// tokens "v:n" in x-fastest order.
void write_vv_grid(std::ostream& os, const VisibilityVolumeGrid& grid);
VisibilityVolumeGrid read_vv_grid(std::istream& is);

nlohmann::ordered_json metrics_to_json(const Metrics& m, const std::string& scenario_hash);

}  // namespace occorbit
