#include "evicheck/model/synthetic.hpp"

#include <array>
#include <random>
#include <string>

#include "evicheck/error.hpp"

namespace evicheck::model::synthetic {
namespace {

using Words = std::vector<std::string>;

const Words kFiller = {
    "the",     "report",   "says",     "that",    "a",        "city",     "council",
    "met",     "on",       "monday",   "and",     "discussed", "plans",   "for",
    "new",     "roads",    "while",    "local",   "residents", "asked",   "about",
    "schools", "parks",    "budget",   "its",     "members",  "voted",    "after",
    "long",    "debate",   "over",     "several", "weeks",    "in",       "early",
    "spring",  "officials", "said",    "project", "would",    "start",    "soon",
    "river",   "bridge",   "market",   "museum",  "library",  "station",  "team",
    "season",  "history",  "region",   "people",  "music",    "film",     "book"};

const Words kClaimWords = {"the", "statement", "about", "plans", "council", "claim",
                           "report", "is", "accurate", "true", "story", "city"};

const Words kNationalities = {"american", "chinese", "german",   "french",
                              "british",  "japanese", "korean", "indian"};
const Words kSyllables = {"zen", "tor", "lum", "ora", "vex", "ix", "qua", "dra",
                          "mel", "sol", "bri", "tan", "kor", "vel", "nex", "pal"};
const Words kSectors = {"technology", "software", "automotive", "retail",
                        "banking",    "media",    "energy",     "electronics"};
const Words kOrgTypes = {"company", "corporation", "conglomerate", "firm"};
const Words kCities = {"redmond", "beijing", "munich", "paris", "london", "tokyo",
                       "seoul",   "mumbai",  "austin", "lyon",  "osaka", "busan"};
const Words kProducts = {"phones", "laptops", "cars", "games", "chips", "servers",
                         "cameras", "tablets"};

const Words kFirstNames = {"emma",  "daniel", "rupert", "maria", "john", "alice",
                           "peter", "sofia",  "lucas",  "nina",  "omar", "clara"};
const Words kMiddleNames = {"charlotte", "jacob", "james", "louise", "paul", "rose"};
const Words kLastNames = {"watson", "radcliffe", "grint", "lopez", "smith", "meyer",
                          "rossi",  "novak",     "khan",  "berg",  "silva", "moreau"};
const Words kMonths = {"january", "february", "march",     "april",   "may",      "june",
                       "july",    "august",   "september", "october", "november", "december"};
const Words kOccupations = {"actress", "actor", "singer", "writer", "painter", "activist",
                            "model",   "director"};
const Words kDeathVerbs = {"killed", "died"};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  const std::string& pick(const Words& words) { return words[index(words.size())]; }
  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return index(2) == 1; }

  void filler(Words& out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(pick(kFiller));
  }

  std::string org_name() { return pick(kSyllables) + pick(kSyllables); }

 private:
  std::mt19937_64 rng_;
};

struct Builder {
  Words tokens;
  std::vector<std::uint8_t> bits;

  void add(const std::string& t, bool evidence = false) {
    tokens.push_back(t);
    bits.push_back(evidence ? 1 : 0);
  }
  void add_all(const Words& ts) {
    for (const auto& t : ts) add(t);
  }
};

TrainingInstance make(Words claim, Builder doc, Label label) {
  TrainingInstance inst{TokenSequence(std::move(claim)), TokenSequence(std::move(doc.tokens)), label,
                        RationaleMask(std::move(doc.bits))};
  inst.validate();
  return inst;
}

Words keyword_claim(Gen& g) {
  Words claim;
  const std::size_t len = 3 + g.index(4);
  for (std::size_t i = 0; i < len; ++i) claim.push_back(g.pick(kClaimWords));
  return claim;
}

TrainingInstance keyword_instance(Gen& g, const std::string& cue, Label label) {
  Builder doc;
  const std::size_t len = 6 + g.index(10);
  const std::size_t cue_at = g.index(len + 1);
  Words words;
  g.filler(words, len);
  for (std::size_t i = 0; i <= len; ++i) {
    if (i == cue_at) doc.add(cue, true);
    if (i < len) doc.add(words[i]);
  }
  return make(keyword_claim(g), std::move(doc), label);
}

}  // namespace

std::vector<TrainingInstance> keyword_corpus(std::size_t n, std::uint64_t seed) {
  Gen g(seed);
  std::vector<TrainingInstance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool refutes = g.coin();
    out.push_back(keyword_instance(g, refutes ? "not" : "indeed",
                                   refutes ? Label::kRefutes : Label::kSupports));
  }
  return out;
}

std::vector<TrainingInstance> novel_cue_corpus(std::size_t n, std::uint64_t seed) {
  Gen g(seed);
  std::vector<TrainingInstance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(keyword_instance(g, "certainly", Label::kSupports));
  return out;
}

std::vector<TrainingInstance> nationality_corpus(std::size_t n, std::uint64_t seed) {
  Gen g(seed);
  std::vector<TrainingInstance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string org = g.org_name();
    const std::string& claimed = g.pick(kNationalities);
    const bool supports = g.coin();
    std::string actual = claimed;
    while (!supports && actual == claimed) actual = g.pick(kNationalities);

    Words claim = {org, "is", "a", claimed, g.coin() ? "company" : g.pick(kOrgTypes)};

    Builder doc;
    doc.add_all({org, g.coin() ? "corporation" : "inc", "is", g.coin() ? "an" : "a"});
    doc.add(actual, true);
    doc.add_all({"multinational", g.pick(kSectors), g.pick(kOrgTypes), "headquartered", "in",
                 g.pick(kCities), "."});
    const std::size_t extra = g.index(4);
    for (std::size_t s = 0; s < extra; ++s) {
      switch (g.index(3)) {
        case 0:
          doc.add_all({"its", "best-known", "products", "are", g.pick(kProducts), "and",
                       g.pick(kProducts), "."});
          break;
        case 1:
          doc.add_all({"it", "was", "founded", "in", std::to_string(g.between(1900, 2015)), "by",
                       g.pick(kFirstNames), g.pick(kLastNames), "."});
          break;
        default: {
          Words f;
          g.filler(f, 5 + g.index(6));
          doc.add_all(f);
          doc.add(".");
        }
      }
    }
    out.push_back(make(std::move(claim), std::move(doc),
                       supports ? Label::kSupports : Label::kRefutes));
  }
  return out;
}

std::vector<TrainingInstance> birthdate_corpus(std::size_t n, std::uint64_t seed) {
  Gen g(seed);
  std::vector<TrainingInstance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& first = g.pick(kFirstNames);
    const std::string& last = g.pick(kLastNames);
    const int year = g.between(1980, 1999);
    const int kind = g.between(0, 2);  // 0 birth-match, 1 birth-mismatch, 2 death

    int claimed = year;
    while (kind == 1 && claimed == year) claimed = g.between(1980, 1999);
    Words claim = {first, last, "was", kind == 2 ? g.pick(kDeathVerbs) : "born", "in",
                   std::to_string(claimed)};
    const Label label = kind == 0 ? Label::kSupports : Label::kRefutes;

    Builder doc;
    doc.add(first);
    if (g.coin()) doc.add(g.pick(kMiddleNames));
    doc.add_all({last, "("});
    doc.add("born", true);
    doc.add(std::to_string(g.between(1, 28)), true);
    doc.add(g.pick(kMonths), true);
    doc.add(std::to_string(year), true);
    doc.add_all({")", "is", "a", g.pick(kNationalities), g.pick(kOccupations), ",",
                 g.pick(kOccupations), ",", "and", g.pick(kOccupations), "."});
    const std::size_t extra = g.index(3);
    for (std::size_t s = 0; s < extra; ++s) {
      if (g.coin()) {
        doc.add_all({"born", "in", g.pick(kCities), ",", first, "grew", "up", "in",
                     g.pick(kCities), "."});
      } else {
        Words f;
        g.filler(f, 5 + g.index(6));
        doc.add_all(f);
        doc.add(".");
      }
    }
    out.push_back(make(std::move(claim), std::move(doc), label));
  }
  return out;
}

std::vector<TrainingInstance> generate(std::string_view kind, std::size_t n, std::uint64_t seed) {
  if (kind == "keyword") return keyword_corpus(n, seed);
  if (kind == "nationality") return nationality_corpus(n, seed);
  if (kind == "birthdate") return birthdate_corpus(n, seed);
  if (kind == "novel") return novel_cue_corpus(n, seed);
  throw Error(ErrorCode::kInvalidInput, "unknown synthetic corpus '" + std::string(kind) + "'");
}

}  // namespace evicheck::model::synthetic
