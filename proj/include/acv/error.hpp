#pragma once

#include <stdexcept>
#include <string>

namespace acv {

// Parse and semantic errors carry a source position when one is known.
class Error : public std::runtime_error {
public:
    Error(std::string msg, int line = 0, int col = 0)
        : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(col) +
                                            ": " + msg
                                      : msg),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

// Raised when a configured instance bound is exceeded (grounding, action
// splitting, or state-space exploration).
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace acv
