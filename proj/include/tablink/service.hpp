#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tablink/document.hpp"
#include "tablink/inference.hpp"
#include "tablink/options.hpp"

namespace tablink {

enum class JobState { Pending, Running, Done, Failed };

std::string_view to_string(JobState s);

struct JobRecord {
    std::string job_id;
    std::string doc_id;
    JobState state = JobState::Pending;
    std::string schema_key;  // set once Done
    std::string error;       // set once Failed
};

std::string job_json(const JobRecord& job);

struct FetchResult {
    int status = 404;  // 200, 202, or 404
    std::string body;
    std::string etag;
    std::optional<JobRecord> job;
};

// Content hash plus options fingerprint, as a hex digest.
std::string cache_key(std::string_view content_hash, const PipelineOptions& options);

// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Builds schemas in the background and serves them from a directory of
/// schema files (<data_dir>/schemas/<key>.json). Equal bundles share one
/// build; a cached file answers a resubmission without rebuilding.
class SchemaService {
public:
    SchemaService(std::filesystem::path data_dir, PipelineOptions options,
                  std::shared_ptr<InferenceClient> client = nullptr, unsigned workers = 1);
    ~SchemaService();

    SchemaService(const SchemaService&) = delete;
    SchemaService& operator=(const SchemaService&) = delete;

    // Throws ValidationError for a bundle that does not ingest.
    JobRecord submit(std::string_view bundle);

    std::optional<JobRecord> status(const std::string& doc_id) const;
    FetchResult fetch_schema(const std::string& doc_id) const;

    // Grid and normalized cell boxes of one table; nullopt when unknown.
    std::optional<std::string> table_json(const std::string& doc_id, const std::string& table_id) const;

    // Blocks until no job is pending or running.
    void wait_idle();

    const std::filesystem::path& data_dir() const { return data_dir_; }

private:
    struct Job {
        JobRecord record;
        std::shared_ptr<const ParsedDocument> doc;
    };

    void worker_loop();
    void run_job(const std::string& job_id);
    std::filesystem::path schema_path(const std::string& key) const;

    std::filesystem::path data_dir_;
    PipelineOptions options_;
    std::shared_ptr<InferenceClient> client_;

    mutable std::mutex mutex_;
    std::condition_variable work_cv_;
    std::condition_variable idle_cv_;
    std::map<std::string, Job> jobs_;                  // by job id
    std::map<std::string, std::string> latest_;        // doc id -> job id
    std::map<std::string, std::string> building_;      // cache key -> job id
    std::map<std::string, std::shared_ptr<const ParsedDocument>> documents_;
    std::deque<std::string> queue_;
    std::size_t active_ = 0;
    std::uint64_t next_job_ = 1;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

// Serves POST /documents and GET /documents/{id}/schema|status|tables/{tid}
// until `stop` is requested (or forever with the default token).
void run_http_server(SchemaService& service, const std::string& host, int port, std::stop_token stop = {});

}  // namespace tablink
