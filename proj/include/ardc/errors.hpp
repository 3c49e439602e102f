#ifndef ARDC_ERRORS_HPP
#define ARDC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ardc {

// Exit-code mapping lives in the CLI; the library only distinguishes categories.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Physical/geometric preconditions violated (bad wavelength, degenerate
// geometry, nonphysical surface, out-of-hull query, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ardc

#endif
