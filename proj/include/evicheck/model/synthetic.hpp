#pragma once
// Generated corpora with a known decision rule and a known rationale. Used
// to train the toy models and to check that the two-phase pipeline learns
// what it is supposed to.

#include <cstdint>
#include <string_view>
#include <vector>

#include "evicheck/model/types.hpp"

namespace evicheck::model::synthetic {

// REFUTES iff the document contains the cue "not"; SUPPORTS documents carry
// the cue "indeed" instead. The cue token is the only rationale token.
std::vector<TrainingInstance> keyword_corpus(std::size_t n, std::uint64_t seed);

// "<org> is a <nationality> company" against an article lead that states the
// organisation's nationality. SUPPORTS iff the nationalities match; the
// rationale is the document's nationality token.
std::vector<TrainingInstance> nationality_corpus(std::size_t n, std::uint64_t seed);

// "<person> was born in <year>" / "<person> was killed in <year>" against a
// biography lead "( born <day> <month> <year> )". Birth claims are SUPPORTS
// iff the years match; death claims are REFUTES (the subject is described as
// living). The rationale is the parenthesised birth date.
std::vector<TrainingInstance> birthdate_corpus(std::size_t n, std::uint64_t seed);

// Keyword-style documents whose cue is "certainly" and whose label is
// SUPPORTS. A model trained only on keyword_corpus has never seen the cue and
// tends to read the missing "indeed" as REFUTES.
std::vector<TrainingInstance> novel_cue_corpus(std::size_t n, std::uint64_t seed);

// Dispatches on "keyword" | "nationality" | "birthdate" | "novel".
std::vector<TrainingInstance> generate(std::string_view kind, std::size_t n, std::uint64_t seed);

}  // namespace evicheck::model::synthetic
