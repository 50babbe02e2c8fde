#pragma once

#include "ceg/tree.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ceg::testing {

inline std::string fixture_path(const std::string& name) { return std::string(CEG_FIXTURE_DIR) + "/" + name; }

inline std::string fixture_text(const std::string& name) {
    std::ifstream in(fixture_path(name));
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline ProbabilityTree fixture_tree(const std::string& name, Bindings policy = Bindings::required) {
    return parse_tree(fixture_text(name), policy);
}

}  // namespace ceg::testing
