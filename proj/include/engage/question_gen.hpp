#pragma once

// Turns a chosen action into question text. The template backend is
// deterministic and keeps sessions alive when the remote model is down.

#include <algorithm>
#include <array>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "engage/action.hpp"
#include "engage/error.hpp"
#include "engage/llm.hpp"
#include "engage/text.hpp"

namespace engage {

struct Turn {
    std::string question;
    std::string response;
};

class QuestionGenerator {
public:
    virtual ~QuestionGenerator() = default;
    // `history` is oldest-first. Throws BackendUnavailable on failure.
    virtual std::string generate(ActionType action, std::span<const Turn> history) const = 0;
};

namespace question_detail {

inline const std::set<std::string>& topic_stopwords() {
    static const std::set<std::string> words = {
        "a",       "an",     "the",     "and",    "or",      "but",    "so",      "to",     "of",     "in",
        "on",      "at",     "for",     "with",   "about",   "from",   "by",      "as",     "it",     "its",
        "it's",    "is",     "was",     "were",   "be",      "been",   "am",      "are",    "i",      "me",
        "my",      "mine",   "myself",  "we",     "us",      "our",    "ours",    "you",    "your",   "they",
        "them",    "their",  "he",      "she",    "his",     "her",    "this",    "that",   "these",  "those",
        "there",   "here",   "then",    "than",   "just",    "really", "very",    "also",   "too",    "not",
        "no",      "yes",    "do",      "did",    "does",    "have",   "has",     "had",    "can",    "could",
        "would",   "should", "will",    "think",  "feel",    "felt",   "like",    "some",   "any",    "all",
        "more",    "most",   "much",    "many",   "lot",     "lots",   "things",  "thing",  "stuff",  "kind",
        "sort",    "pretty", "quite",   "mostly", "usually", "always", "never",   "often",  "get",    "got",
        "good",    "great",  "bad",     "okay",   "ok",      "fine",   "nice",    "hard",   "tried",  "when",
        "what",    "which",  "who",     "how",    "why",     "where",  "because", "if",     "i'm",    "i've",
        "don't",   "didn't", "wasn't",  "being",  "each",    "plus",   "overall", "honestly"};
    return words;
}

// Campus-life aspects used when probing a new topic.
inline constexpr std::array<std::string_view, 6> kProbeTopics = {
    "housing and where you live",      "your classes and professors", "clubs and student organizations",
    "feeling like you belong on campus", "campus dining",               "support services like advising"};

}  // namespace question_detail

// Last run of up to two content words in the most recent response, e.g.
// "greek life". Empty when nothing qualifies.
inline std::string extract_topic(std::string_view response) {
    const auto words = text::tokenize(response);
    const auto& stop = question_detail::topic_stopwords();
    std::vector<std::string> run, best;
    for (const auto& w : words) {
        const auto lw = text::to_lower_ascii(w);
        const bool content = lw.size() > 2 && !stop.count(lw) &&
                             std::all_of(lw.begin(), lw.end(), [](char c) { return (c >= 'a' && c <= 'z') || c == '-'; });
        if (content) {
            run.push_back(lw);
            if (run.size() > 2) run.erase(run.begin());
            best = run;
        } else {
            run.clear();
        }
    }
    return text::join(best, " ");
}

// Fills one template per action. Variants rotate with the history length so a
// session does not repeat itself verbatim.
class TemplateQuestionGenerator final : public QuestionGenerator {
public:
    std::string generate(ActionType action, std::span<const Turn> history) const override {
        std::string topic = history.empty() ? std::string() : extract_topic(history.back().response);
        const std::size_t v = history.size();
        const bool have_topic = !topic.empty();
        switch (action) {
            case ActionType::specification:
                return have_topic ? "Could you give a specific example of " + topic + "?"
                                  : std::string("Could you give a specific example from your own experience?");
            case ActionType::elaboration:
                return have_topic ? "Could you share more about " + topic + "?"
                                  : std::string("Could you share more about that experience?");
            case ActionType::topic_probe: {
                const auto& t = question_detail::kProbeTopics[v % question_detail::kProbeTopics.size()];
                return "How would you describe " + std::string(t) + "?";
            }
            case ActionType::validation:
                return have_topic ? "Thank you for sharing that about " + topic + ", your perspective is valuable."
                                  : std::string("Thank you for sharing that, your perspective is valuable.");
            case ActionType::continuation: {
                static constexpr std::array<std::string_view, 2> variants = {
                    "Is there anything else you'd like to share?", "What else would you like to add?"};
                return std::string(variants[v % variants.size()]);
            }
        }
        return "Could you tell me more?";
    }
};

// Prompts a chat model with the last `window` exchanges and an
// action-specific directive.
class LlmQuestionGenerator final : public QuestionGenerator {
public:
    LlmQuestionGenerator(std::shared_ptr<const llm::ChatClient> client, double temperature = 0.7,
                         std::size_t window = 3)
        : client_(std::move(client)), temperature_(temperature), window_(window) {}

    static std::string directive(ActionType action) {
        switch (action) {
            case ActionType::specification:
                return "Ask for a concrete example or particular case related to what the student just said.";
            case ActionType::elaboration: return "Ask the student to expand on the topic they just described.";
            case ActionType::topic_probe: return "Introduce a new aspect of campus life related to the conversation so far.";
            case ActionType::validation:
                return "Briefly acknowledge the student's contribution (under 20 words). Do not ask for information.";
            case ActionType::continuation:
                return "Invite the student to continue sharing with an open question of 5 to 10 words.";
        }
        return {};
    }

    std::string generate(ActionType action, std::span<const Turn> history) const override {
        const std::size_t start = history.size() > window_ ? history.size() - window_ : 0;
        std::string transcript;
        for (std::size_t i = start; i < history.size(); ++i)
            transcript += "Interviewer: " + history[i].question + "\nStudent: " + history[i].response + "\n";
        llm::Request req;
        req.temperature = temperature_;
        req.messages = {{"system",
                         "You are a friendly campus-climate survey interviewer talking with a university student. "
                         "Reply with the next interviewer turn only."},
                        {"user", (transcript.empty() ? std::string("(no conversation yet)\n") : transcript) +
                                     "\nInstruction: " + directive(action)}};
        auto reply = text::trim(client_->complete(req));
        if (reply.empty()) throw BackendUnavailable("question generator returned empty text");
        return reply;
    }

private:
    std::shared_ptr<const llm::ChatClient> client_;
    double temperature_;
    std::size_t window_;
};

}  // namespace engage
