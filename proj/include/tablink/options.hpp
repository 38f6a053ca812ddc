#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tablink {

struct DetectionSettings {
    std::size_t max_ngram = 6;
    // Numbers with at most this many tokens between them and a cue phrase
    // are derived values.
    std::size_t derived_window = 4;
    std::vector<std::string> cue_phrases;
};

struct ResolutionSettings {
    double approximate_tolerance = 0.02;
    double equality_tolerance = 1e-9;
};

struct ScopeSettings {
    double promotion_threshold = 0.5;
};

struct RemoteSettings {
    std::string endpoint;  // empty: no remote backend
    std::string token;
    int max_attempts = 3;
    int max_in_flight = 4;
    int timeout_ms = 30000;
    bool send_paragraph = true;
};

struct PipelineOptions {
    PipelineOptions();

    std::vector<std::string> abbreviations;
    DetectionSettings detection;
    ResolutionSettings resolution;
    ScopeSettings scope;
    RemoteSettings remote;

    // Canonical JSON of every setting that changes pipeline output. The
    // auth token is left out.
    std::string canonical_json() const;
    std::string fingerprint() const;
};

std::vector<std::string> default_cue_phrases();

/// Reads a JSON config file. Recognized keys (all optional):
///   abbreviations, abbreviations_file, cue_phrases, cue_lexicon_file,
///   max_ngram, derived_window, approximate_tolerance, equality_tolerance,
///   promotion_threshold, and a "remote" object with endpoint,
///   max_attempts, max_in_flight, timeout_ms, send_paragraph.
/// Relative file paths resolve against the config file's directory.
PipelineOptions load_options(const std::filesystem::path& path);
PipelineOptions options_from_json(std::string_view text, const std::filesystem::path& base_dir = {});

// Overrides the remote endpoint and token from TABLINK_INFERENCE_URL and
// TABLINK_INFERENCE_TOKEN when they are set.
void apply_environment(PipelineOptions& options);

}  // namespace tablink
