#pragma once

// Response quality on four dimensions (length, self-disclosure, emotion,
// specificity), each normalised to [0, 1], and their weighted composite.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "engage/error.hpp"
#include "engage/sentiment.hpp"
#include "engage/specificity.hpp"
#include "engage/text.hpp"

namespace engage {

namespace lsde {

// 75th-percentile caps of the historical response distribution.
inline constexpr double kLengthCap = 29.0;
inline constexpr double kPronounCap = 3.0;

inline constexpr double kLengthWeight = 0.20;
inline constexpr double kDisclosureWeight = 0.20;
inline constexpr double kEmotionWeight = 0.35;
inline constexpr double kSpecificityWeight = 0.25;

inline constexpr std::array<std::string_view, 10> kFirstPersonPronouns = {
    "i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves"};

}  // namespace lsde

struct LsdeComponents {
    std::size_t word_count = 0;
    std::size_t pronoun_count = 0;
    double sentiment_compound = 0.0;
    SpecificityLabels specificity;
    double l_norm = 0.0;
    double d_norm = 0.0;
    double e_norm = 0.0;
    double s_norm = 0.0;

    friend bool operator==(const LsdeComponents&, const LsdeComponents&) = default;
};

struct QualityScore {
    double composite = 0.0;
    LsdeComponents components;

    friend bool operator==(const QualityScore&, const QualityScore&) = default;
};

inline double normalize_length(std::size_t word_count) {
    return std::min(static_cast<double>(word_count) / lsde::kLengthCap, 1.0);
}

inline double normalize_disclosure(std::size_t pronoun_count) {
    return std::min(static_cast<double>(pronoun_count) / lsde::kPronounCap, 1.0);
}

inline double normalize_emotion(double compound) {
    if (!(compound >= -1.0 && compound <= 1.0)) throw DomainError("sentiment compound outside [-1, 1]");
    return std::abs(compound);
}

// Case-insensitive count of first-person pronoun tokens. Contractions such as
// "I'm" are not pronoun tokens.
inline std::size_t count_first_person_pronouns(std::span<const std::string> words) {
    std::size_t n = 0;
    for (const auto& w : words) {
        const auto lw = text::to_lower_ascii(w);
        if (std::find(lsde::kFirstPersonPronouns.begin(), lsde::kFirstPersonPronouns.end(), lw) !=
            lsde::kFirstPersonPronouns.end())
            ++n;
    }
    return n;
}

// Weighted sum in the fixed order L, D, E, S.
inline double weighted_composite(double l, double d, double e, double s) {
    return lsde::kLengthWeight * l + lsde::kDisclosureWeight * d + lsde::kEmotionWeight * e +
           lsde::kSpecificityWeight * s;
}

inline QualityScore composite_score(const LsdeComponents& c) {
    for (double v : {c.l_norm, c.d_norm, c.e_norm, c.s_norm})
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("LSDE component outside [0, 1]");
    return {weighted_composite(c.l_norm, c.d_norm, c.e_norm, c.s_norm), c};
}

// Builds the normalised components from raw measurements.
inline LsdeComponents make_components(std::size_t word_count, std::size_t pronoun_count, double compound,
                                      SpecificityLabels spec) {
    LsdeComponents c;
    c.word_count = word_count;
    c.pronoun_count = pronoun_count;
    c.sentiment_compound = compound;
    c.specificity = spec;
    c.l_norm = normalize_length(word_count);
    c.d_norm = normalize_disclosure(pronoun_count);
    c.e_norm = normalize_emotion(compound);
    c.s_norm = spec.normalized();
    return c;
}

// Scores raw response text. Thread-safe when the classifier is.
class ResponseScorer {
public:
    ResponseScorer(std::shared_ptr<const SentimentAnalyzer> sentiment,
                   std::shared_ptr<const SpecificityClassifier> specificity)
        : sentiment_(std::move(sentiment)), specificity_(std::move(specificity)) {
        if (!sentiment_ || !specificity_) throw Error("ResponseScorer requires both backends");
    }

    LsdeComponents components(std::string_view response) const {
        const auto words = text::tokenize(response);
        if (words.empty()) return make_components(0, 0, 0.0, {});
        return make_components(words.size(), count_first_person_pronouns(words), sentiment_->compound(response),
                               specificity_->classify(response));
    }

    QualityScore score(std::string_view response) const { return composite_score(components(response)); }

    const SentimentAnalyzer& sentiment() const noexcept { return *sentiment_; }
    const SpecificityClassifier& specificity() const noexcept { return *specificity_; }

private:
    std::shared_ptr<const SentimentAnalyzer> sentiment_;
    std::shared_ptr<const SpecificityClassifier> specificity_;
};

}  // namespace engage
