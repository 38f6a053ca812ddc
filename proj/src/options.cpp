#include "tablink/options.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tablink/document.hpp"
#include "tablink/segmentation.hpp"

namespace tablink {

using nlohmann::json;

std::vector<std::string> default_cue_phrases() {
    return {"improves by", "improved by", "improvement of", "improvements of", "outperforms", "outperform",
            "outperformed", "gain of", "gains of", "drop of", "drops of", "decrease of", "increase of",
            "reduction of", "improves", "improvement", "gain", "drop", "higher", "lower", "increase",
            "decrease", "reduction", "margin", "by", "relative", "absolute", "+", "\xE2\x88\x92"};
}

PipelineOptions::PipelineOptions() : abbreviations(default_abbreviations()) {
    detection.cue_phrases = default_cue_phrases();
}

std::string PipelineOptions::canonical_json() const {
    json j;
    j["abbreviations"] = abbreviations;
    j["cue_phrases"] = detection.cue_phrases;
    j["max_ngram"] = detection.max_ngram;
    j["derived_window"] = detection.derived_window;
    j["approximate_tolerance"] = resolution.approximate_tolerance;
    j["equality_tolerance"] = resolution.equality_tolerance;
    j["promotion_threshold"] = scope.promotion_threshold;
    j["remote"] = {{"endpoint", remote.endpoint}, {"send_paragraph", remote.send_paragraph}};
    return j.dump();
}

std::string PipelineOptions::fingerprint() const { return sha256_tag(canonical_json()); }

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
void read_if(const json& j, const char* key, T& dst) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) dst = it->get<T>();
}

}  // namespace

PipelineOptions options_from_json(std::string_view text, const std::filesystem::path& base_dir) {
    PipelineOptions o;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
    try {
        if (j.contains("abbreviations_file")) {
            o.abbreviations = load_word_list(resolve(base_dir, j["abbreviations_file"].get<std::string>()));
        }
        read_if(j, "abbreviations", o.abbreviations);
        if (j.contains("cue_lexicon_file")) {
            o.detection.cue_phrases = load_word_list(resolve(base_dir, j["cue_lexicon_file"].get<std::string>()));
        }
        read_if(j, "cue_phrases", o.detection.cue_phrases);
        read_if(j, "max_ngram", o.detection.max_ngram);
        read_if(j, "derived_window", o.detection.derived_window);
        read_if(j, "approximate_tolerance", o.resolution.approximate_tolerance);
        read_if(j, "equality_tolerance", o.resolution.equality_tolerance);
        read_if(j, "promotion_threshold", o.scope.promotion_threshold);
        if (auto r = j.find("remote"); r != j.end() && r->is_object()) {
            read_if(*r, "endpoint", o.remote.endpoint);
            read_if(*r, "max_attempts", o.remote.max_attempts);
            read_if(*r, "max_in_flight", o.remote.max_in_flight);
            read_if(*r, "timeout_ms", o.remote.timeout_ms);
            read_if(*r, "send_paragraph", o.remote.send_paragraph);
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad config value: ") + e.what());
    }
    if (o.detection.max_ngram < 1) throw std::runtime_error("max_ngram must be at least 1");
    if (o.remote.max_attempts < 1) throw std::runtime_error("remote.max_attempts must be at least 1");
    if (o.remote.max_in_flight < 1) throw std::runtime_error("remote.max_in_flight must be at least 1");
    return o;
}

PipelineOptions load_options(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return options_from_json(ss.str(), path.parent_path());
}

void apply_environment(PipelineOptions& options) {
    if (const char* url = std::getenv("TABLINK_INFERENCE_URL"); url && *url) options.remote.endpoint = url;
    if (const char* token = std::getenv("TABLINK_INFERENCE_TOKEN"); token && *token) options.remote.token = token;
}

}  // namespace tablink
