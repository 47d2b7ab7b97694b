#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <unistd.h>

#include "engage/lsde.hpp"
#include "engage/policy.hpp"
#include "engage/sentiment.hpp"
#include "engage/specificity.hpp"

namespace engage::testing {

inline std::filesystem::path data_dir() { return ENGAGE_DATA_DIR; }

inline std::shared_ptr<const SentimentAnalyzer> analyzer_ptr() {
    static const auto a = std::make_shared<const SentimentAnalyzer>(SentimentAnalyzer::from_directory(data_dir() / "lexicon"));
    return a;
}

inline const SentimentAnalyzer& shared_analyzer() { return *analyzer_ptr(); }

inline std::shared_ptr<const RuleSpecificityClassifier> shared_specificity() {
    static const auto c = std::make_shared<const RuleSpecificityClassifier>(
        SpecificityGazetteers::from_directory(data_dir() / "gazetteers"));
    return c;
}

inline std::shared_ptr<const ResponseScorer> shared_scorer() {
    static const auto s = std::make_shared<const ResponseScorer>(analyzer_ptr(), shared_specificity());
    return s;
}

inline std::shared_ptr<const EvTable> historical_priors() {
    static const auto t = std::make_shared<const EvTable>(load_priors(data_dir() / "priors" / "historical.json"));
    return t;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Scratch directory removed when the guard goes out of scope.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("engage_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace engage::testing
