#pragma once

#include <string>
#include <string_view>

#include "langcheck/types.hpp"

namespace langcheck {

// Reads a fact-prediction completion of the shape
//   [The claim mentions that] <summary>. [Related] [<category>] Fact: <fact>
// The category is whatever sits between an optional "Related" and "fact:"
// (case-insensitive). Without a fact line the result is degraded: the whole
// completion becomes the fact and the category is None.
GroundingResult parse_fact_prediction(std::string_view completion);

// Explicit-no rule. Skips leading whitespace, quotes, markdown emphasis and an
// optional "Answer:" label, then looks at the first word of the first
// sentence: "no" is Unacceptable, "yes" is Acceptable, anything else is an
// Acceptable non-answer. Total over arbitrary input.
Verdict parse_yes_no(std::string_view completion);

// First non-blank line, trimmed. Used to clean step outputs of the
// document-grounded chain, where models sometimes keep generating.
std::string first_line(std::string_view completion);

}  // namespace langcheck
