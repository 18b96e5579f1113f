#include "namesim/errors.hpp"

namespace namesim {

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += "; ";
        out += v[i];
    }
    return out;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join(violations)), violations_(std::move(violations)) {}

ConfigError::ConfigError(const std::string& message) : Error(message), violations_{message} {}

} // namespace namesim
