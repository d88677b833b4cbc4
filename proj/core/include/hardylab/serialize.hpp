#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "hardylab/hardy.hpp"
#include "hardylab/kedlaya.hpp"
#include "hardylab/properties.hpp"
#include "hardylab/rho.hpp"

namespace hardylab {

// Insertion-ordered documents keep report bytes reproducible run to run.
using ordered_json = nlohmann::ordered_json;

// JSON has no infinities: they serialize as the strings "+inf"/"-inf".
ordered_json json_number(double x);

ordered_json to_json(const QuadratureResult& r);
ordered_json to_json(const HarmonicTail& t);
ordered_json to_json(const HardyBracket& b);
ordered_json to_json(const AuditReport& r);
ordered_json to_json(const kedlaya::Violation& v);
ordered_json to_json(const kedlaya::MixingCheck& c);
ordered_json to_json(const kedlaya::KedlayaMatrix& m);

// Matrix files are plain comma-separated integer rows with LF endings.
std::string matrix_to_csv(const kedlaya::KedlayaMatrix& m);
kedlaya::KedlayaMatrix matrix_from_csv(const std::string& text);

}  // namespace hardylab
