#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ampcon/beamforming.hpp"
#include "ampcon/constellation.hpp"
#include "ampcon/simulate.hpp"

namespace ampcon {

// Insertion-ordered JSON keeps the documented field order stable.
using Json = nlohmann::ordered_json;

/// Locale-independent shortest round-trip decimal form; the basis of
/// byte-identical replay for every CSV/JSON emitted here.
std::string format_double(double v);

Json constellation_to_json(const Constellation& c);
Constellation constellation_from_json(const Json& j);

Json beam_vector_to_json(const BeamVector& f);
BeamVector beam_vector_from_json(const Json& j);

Json range_to_json(const AngularRange& r);
AngularRange range_from_json(const Json& j);

Json metrics_to_json(const PatternMetrics& m);

std::string ber_curve_csv(const BerCurve& curve);
std::string cdf_csv(const std::vector<std::pair<double, double>>& cdf);
std::string diagnostics_csv(const CmpimDiagnostics& d);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

}  // namespace ampcon
