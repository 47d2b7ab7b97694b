#include <catch_amalgamated.hpp>

#include "engage/text.hpp"

using engage::text::tokenize;

TEST_CASE("tokenize splits on whitespace and strips edge punctuation", "[text]") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("I felt excluded.") == std::vector<std::string>{"I", "felt", "excluded"});
    CHECK(tokenize("  two   spaces ").size() == 2);
}

TEST_CASE("tokenize keeps internal apostrophes and drops punctuation-only runs", "[text]") {
    CHECK(tokenize("I'm fine - really...") == std::vector<std::string>{"I'm", "fine", "really"});
    CHECK(tokenize("\"quoted\" (parens)") == std::vector<std::string>{"quoted", "parens"});
}

TEST_CASE("tokenize treats unicode whitespace and typographic quotes", "[text]") {
    // U+00A0 no-break space and U+3000 ideographic space separate words.
    CHECK(tokenize("a\xC2\xA0" "b\xE3\x80\x80" "c").size() == 3);
    // Curly quotes and an ellipsis are stripped from the edges.
    CHECK(tokenize("\xE2\x80\x9Chello\xE2\x80\x9D wait\xE2\x80\xA6") ==
          std::vector<std::string>{"hello", "wait"});
}

TEST_CASE("malformed utf-8 is never dropped", "[text]") {
    const std::string bad = "ab\xFF\xFE cd";
    auto words = tokenize(bad);
    REQUIRE(words.size() == 2);
    CHECK(words[0] == "ab\xFF\xFE");
}
