#pragma once

#include <stdexcept>
#include <string>

namespace sdclf {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Smooth feedback undefined at this state: the drive term vanishes and the
/// drift derivative is not negative. Callers fall back to a bracket schedule.
struct NotApplicable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WrongBranch : std::logic_error {
    using std::logic_error::logic_error;
};

struct SearchExhausted : std::runtime_error {
    SearchExhausted(const std::string& what, double best)
        : std::runtime_error(what), best_margin(best) {}
    double best_margin;  // least (most negative is best) scaled derivative found
};

struct NoDecrease : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BlowUp : std::runtime_error {
    BlowUp(const std::string& what, double t) : std::runtime_error(what), time(t) {}
    double time;
};

struct StepUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ControllerFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(int line_, int col_, const std::string& msg)
        : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
    int line;
    int col;
};

}  // namespace sdclf
