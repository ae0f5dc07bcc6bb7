#pragma once

#include <string>
#include <string_view>

namespace yarbus {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// trim + lowercase; applied to every slot, value and act label read from disk
// so that logs, labels and the ontology match regardless of casing.
std::string canon(std::string_view s);

}  // namespace yarbus
