#pragma once

#include <json.hpp>
#include <string>

#include "geonet/dtn.hpp"
#include "geonet/network.hpp"
#include "geonet/spectral.hpp"

namespace geonet {

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

nlohmann::json spectrum_to_json(const Network& net, const Spectrum& spec);

nlohmann::json partition_to_json(const Partition& part);
Partition partition_from_json(const Network& parent, const nlohmann::json& j);

nlohmann::json dtn_to_json(const DtnMap& map);

nlohmann::json verification_to_json(const VerificationReport& rep);

// Serializes with sorted keys and writes through a temp file + rename, so a
// reader never sees a partial file.
void write_json_atomic(const std::string& path, const nlohmann::json& j);

}  // namespace geonet
