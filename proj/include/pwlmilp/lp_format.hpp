#ifndef PWLMILP_LP_FORMAT_HPP
#define PWLMILP_LP_FORMAT_HPP

#include <string>

#include "pwlmilp/milp.hpp"

namespace pwlmilp::milp {

/// CPLEX-LP-format text with deterministic ordering and coefficients
/// printed to 17 significant digits. An empty objective is written as
/// "0 <first variable>".
std::string write_lp(const MilpModel& m);
void write_lp_file(const MilpModel& m, const std::string& path);

/// Reader for the dialect produced by write_lp (plus harmless layout
/// variations). Used for round-trip checks and the CLI verify path.
MilpModel parse_lp(const std::string& text);
MilpModel load_lp_file(const std::string& path);

}  // namespace pwlmilp::milp

#endif  // PWLMILP_LP_FORMAT_HPP
