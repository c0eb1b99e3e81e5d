#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "utpada/analyzer.hpp"

namespace utpada {

nlohmann::json to_json(const ValidationReport& report);
std::string render_text(const ValidationReport& report);

// Exit code contract of `validate`: 0 clean, 1 violations present.
int validation_exit_code(const ValidationReport& report);

}  // namespace utpada
