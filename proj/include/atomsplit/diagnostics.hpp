// Automatic error taxonomy for aligned predicted/gold atom pairs.
#ifndef ATOMSPLIT_DIAGNOSTICS_HPP
#define ATOMSPLIT_DIAGNOSTICS_HPP

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "atomsplit/depgraph.hpp"
#include "atomsplit/metrics.hpp"

namespace atomsplit {

enum class ErrorLabel {
  Correct,
  MissingSubject,
  MissingObject,
  CoordinationError,
  RelativeClauseError,
  AdverbialClauseError,
  AppositiveError,
  Truncated,
  Other,
};

inline constexpr std::array<ErrorLabel, 9> kAllErrorLabels = {
    ErrorLabel::Correct,           ErrorLabel::MissingSubject,       ErrorLabel::MissingObject,
    ErrorLabel::CoordinationError, ErrorLabel::RelativeClauseError, ErrorLabel::AdverbialClauseError,
    ErrorLabel::AppositiveError,   ErrorLabel::Truncated,            ErrorLabel::Other,
};

std::string_view to_string(ErrorLabel label);
ErrorLabel error_label_from_string(std::string_view name);

/// Conditions that fired for a pair, in enum order. Empty means no specific
/// defect was found. Throws Error when the pair has no gold side.
std::vector<ErrorLabel> error_conditions(const AlignedPair& pair, const DepTree& source);

/// Single label per pair:
///  - Correct when ROUGE-1 F1 >= 0.9 and no gold token is missing;
///  - the one fired condition, if exactly one fired;
///  - Other when several fired, or none fired and F1 < 0.9.
/// A strict-prefix prediction counts as Truncated and then suppresses the
/// clause-structure conditions (the lost tail explains them), unless the
/// clause's object is what went missing. Clause-structure conditions only
/// look at maximal missing subtrees. A pair with no predicted atom is Other.
ErrorLabel classify_error(const AlignedPair& pair, const DepTree& source);

struct ErrorDistribution {
  std::map<ErrorLabel, std::size_t> counts;  // every label, zeros included
  std::map<ErrorLabel, double> proportions;  // non-Correct labels with count > 0
  std::size_t total = 0;
  std::size_t errors = 0;
};

ErrorDistribution error_distribution(std::span<const ErrorLabel> labels);

}  // namespace atomsplit

#endif  // ATOMSPLIT_DIAGNOSTICS_HPP
