#pragma once

// Corpus-level diagnostics for LSDE scores: Pearson correlations between the
// four normalised dimensions and a banded histogram of composite scores.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/error.hpp"
#include "engage/lsde.hpp"

namespace engage {

inline constexpr std::array<const char*, 4> kDimensionNames = {"length", "disclosure", "emotion", "specificity"};
inline constexpr std::array<const char*, 5> kBandLabels = {"0.0-0.2", "0.2-0.4", "0.4-0.6", "0.6-0.8", "0.8-1.0"};

// Pearson r; nullopt when either series has zero variance.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InsufficientData("pearson needs two equal series of length >= 2");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

// Bands [0,.2) [.2,.4) [.4,.6) [.6,.8) [.8,1]. Comparisons rather than
// division keep 0.6 out of the band below it.
inline std::size_t quality_band(double composite) {
    if (composite < 0.2) return 0;
    if (composite < 0.4) return 1;
    if (composite < 0.6) return 2;
    if (composite < 0.8) return 3;
    return 4;
}

struct CorpusReport {
    std::size_t responses = 0;
    std::array<std::array<std::optional<double>, 4>, 4> correlation{};
    std::array<std::size_t, 5> band_counts{};
    double mean_composite = 0.0;
    double sd_composite = 0.0;
};

inline CorpusReport corpus_report(std::span<const QualityScore> scores) {
    if (scores.size() < 2) throw InsufficientData("corpus report needs at least 2 scored responses");
    std::array<std::vector<double>, 4> dims;
    CorpusReport r;
    r.responses = scores.size();
    double sum = 0;
    for (const auto& s : scores) {
        dims[0].push_back(s.components.l_norm);
        dims[1].push_back(s.components.d_norm);
        dims[2].push_back(s.components.e_norm);
        dims[3].push_back(s.components.s_norm);
        ++r.band_counts[quality_band(s.composite)];
        sum += s.composite;
    }
    r.mean_composite = sum / static_cast<double>(scores.size());
    double ss = 0;
    for (const auto& s : scores) ss += (s.composite - r.mean_composite) * (s.composite - r.mean_composite);
    r.sd_composite = std::sqrt(ss / static_cast<double>(scores.size() - 1));
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) r.correlation[a][b] = pearson(dims[a], dims[b]);
    return r;
}

inline nlohmann::json to_json(const CorpusReport& r) {
    nlohmann::json corr = nlohmann::json::object();
    for (std::size_t a = 0; a < 4; ++a) {
        nlohmann::json row = nlohmann::json::object();
        for (std::size_t b = 0; b < 4; ++b) {
            const auto& v = r.correlation[a][b];
            row[kDimensionNames[b]] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
        }
        corr[kDimensionNames[a]] = row;
    }
    nlohmann::json bands = nlohmann::json::array();
    for (std::size_t i = 0; i < 5; ++i) {
        bands.push_back({{"range", kBandLabels[i]},
                         {"count", r.band_counts[i]},
                         {"percent", 100.0 * static_cast<double>(r.band_counts[i]) / static_cast<double>(r.responses)}});
    }
    return {{"responses", r.responses},
            {"composite_mean", r.mean_composite},
            {"composite_sd", r.sd_composite},
            {"correlation", corr},
            {"bands", bands}};
}

}  // namespace engage
