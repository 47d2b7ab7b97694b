#pragma once

// Builds respondent text with controlled LSDE features. Used by the scripted
// simulant and the synthetic corpus generator. Every fragment is chosen so
// that it moves exactly one LSDE dimension; the filler vocabulary carries no
// sentiment, no pronouns and no specificity cues (checked in the tests).

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "engage/rng.hpp"
#include "engage/text.hpp"

namespace engage {

struct ResponseFeatures {
    std::size_t words = 1;     // target word count
    std::size_t pronouns = 0;  // first-person pronoun tokens, at most 4
    int emotion = 0;           // 0 neutral .. 3 strong
    bool negative = false;     // emotion polarity
    bool entity = false;
    bool temporal = false;
    bool spatial = false;
};

namespace compose_detail {

struct Fragment {
    std::string_view text;
    std::size_t words;
};

inline constexpr std::array<Fragment, 4> kPronounFragments = {
    {{"I think", 2}, {"for me", 2}, {"my notes", 2}, {"we tried", 2}}};

inline constexpr std::array<Fragment, 3> kPositive = {
    {{"it was good", 3}, {"it was really great", 4}, {"it was absolutely wonderful and amazing", 6}}};
inline constexpr std::array<Fragment, 3> kNegative = {
    {{"it was annoying", 3}, {"it was really bad", 4}, {"it was awful and really terrible", 6}}};

inline constexpr Fragment kEntity{"with Professor Lee", 3};
inline constexpr Fragment kTemporal{"last semester", 2};
inline constexpr Fragment kSpatial{"at the library", 3};

inline constexpr std::array<std::string_view, 40> kFiller = {
    "the",    "classes", "were",   "mostly", "about",   "normal",   "stuff",    "and",
    "then",   "some",    "work",   "in",     "groups",  "with",     "readings", "plus",
    "notes",  "for",     "each",   "topic",  "also",    "just",     "things",   "to",
    "do",     "on",      "assignments", "around", "labs", "projects", "papers", "exams",
    "usually", "fairly", "routine", "overall", "as",    "far",      "that",     "goes"};

}  // namespace compose_detail

inline std::span<const std::string_view> neutral_filler_words() { return compose_detail::kFiller; }

// Fragments are added in priority order (pronouns, emotion, specificity) only
// while they fit the word budget; filler pads to exactly `words` tokens.
// The RNG only picks the filler offset, so features fully determine the LSDE
// measurements.
inline std::string compose_response(const ResponseFeatures& f, Rng& rng) {
    using namespace compose_detail;
    const std::size_t target = std::max<std::size_t>(f.words, 1);
    std::size_t budget = target;
    std::vector<std::string> parts;
    auto take = [&](const Fragment& frag) {
        if (frag.words > budget) return;
        parts.emplace_back(frag.text);
        budget -= frag.words;
    };

    for (std::size_t i = 0; i < std::min(f.pronouns, kPronounFragments.size()); ++i) take(kPronounFragments[i]);
    if (f.emotion > 0) {
        const auto level = static_cast<std::size_t>(std::clamp(f.emotion, 1, 3) - 1);
        take(f.negative ? kNegative[level] : kPositive[level]);
    }
    if (f.entity) take(kEntity);
    if (f.temporal) take(kTemporal);
    if (f.spatial) take(kSpatial);

    std::size_t offset = rng.uniform_index(kFiller.size());
    std::string filler;
    for (std::size_t i = 0; i < budget; ++i) {
        if (i) filler += ' ';
        filler += kFiller[(offset + i) % kFiller.size()];
    }
    // Filler goes second so the first pronoun fragment ("I think") can open.
    if (!filler.empty()) parts.insert(parts.begin() + (parts.empty() ? 0 : 1), filler);

    std::string out = text::join(parts, " ");
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
    out += '.';
    return out;
}

}  // namespace engage
