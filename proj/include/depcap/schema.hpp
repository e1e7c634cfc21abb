#pragma once

#include <string>

namespace depcap {

// Structural check of a CLI JSON document (estimate, channel capacity, or
// axiom report). Throws validation_error naming the offending path. The CLI
// runs every JSON payload through this before printing; tests reuse it to
// hold the output contract in place.
void validate_output_json(const std::string& text);

}  // namespace depcap
