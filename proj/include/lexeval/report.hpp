#pragma once

#include <string>

#include "lexeval/stats.hpp"

namespace lexeval {

// Tables with the columns: # Eval., Mean, Var., Std. Dev., Pearson r (p),
// Spearman r (p), Kendall r (p), Lin CCC, MAE. Undefined cells render as "--".
std::string render_markdown(const AnalysisReport& report);

// Same cells, RFC 4180 quoting.
std::string render_csv(const AnalysisReport& report);

}  // namespace lexeval
