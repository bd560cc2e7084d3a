#pragma once

#include <json.hpp>

namespace smartml {

// nlohmann::json keeps object keys sorted, which makes dump() a canonical
// form; rollback-exactness tests compare those bytes directly.
using json = nlohmann::json;

}  // namespace smartml
