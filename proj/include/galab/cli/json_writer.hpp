#pragma once

#include <complex>
#include <string>

#include <json.hpp>

namespace galab::cli {

using Json = nlohmann::ordered_json;

/// Indented JSON with every floating value printed as %.17g, so equal
/// inputs give byte-identical text. Non-finite numbers become null.
std::string dump_json(const Json& value);

/// {"re": ..., "im": ...}
Json complex_json(std::complex<double> v);

}  // namespace galab::cli
