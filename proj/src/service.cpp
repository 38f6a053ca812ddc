#include "tablink/service.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "tablink/schema.hpp"

namespace tablink {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view to_string(JobState s) {
    switch (s) {
        case JobState::Pending: return "pending";
        case JobState::Running: return "running";
        case JobState::Done: return "done";
        case JobState::Failed: return "failed";
    }
    return "pending";
}

std::string job_json(const JobRecord& job) {
    ordered_json j;
    j["job_id"] = job.job_id;
    j["doc_id"] = job.doc_id;
    j["state"] = std::string(to_string(job.state));
    if (job.state == JobState::Done) j["schema_id"] = job.schema_key;
    if (job.state == JobState::Failed) j["error"] = job.error;
    return j.dump();
}

std::string cache_key(std::string_view content_hash, const PipelineOptions& options) {
    const std::string tag = sha256_tag(std::string(content_hash) + "\n" + options.fingerprint());
    return tag.substr(tag.find(':') + 1);
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp-" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

SchemaService::SchemaService(fs::path data_dir, PipelineOptions options, std::shared_ptr<InferenceClient> client,
                             unsigned workers)
    : data_dir_(std::move(data_dir)), options_(std::move(options)), client_(std::move(client)) {
    fs::create_directories(data_dir_ / "schemas");
    if (workers == 0) workers = 1;
    for (unsigned i = 0; i < workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

SchemaService::~SchemaService() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    work_cv_.notify_all();
    for (std::thread& t : workers_) t.join();
}

fs::path SchemaService::schema_path(const std::string& key) const { return data_dir_ / "schemas" / (key + ".json"); }

JobRecord SchemaService::submit(std::string_view bundle) {
    auto doc = std::make_shared<const ParsedDocument>(ingest_document(bundle));
    const std::string key = cache_key(doc->content_hash, options_);

    std::lock_guard lock(mutex_);
    documents_[doc->doc_id] = doc;

    if (auto it = building_.find(key); it != building_.end()) {
        latest_[doc->doc_id] = it->second;
        return jobs_.at(it->second).record;
    }

    Job job;
    job.record.job_id = "job-" + std::to_string(next_job_++);
    job.record.doc_id = doc->doc_id;
    job.doc = doc;
    const std::string id = job.record.job_id;

    if (fs::exists(schema_path(key))) {
        job.record.state = JobState::Done;
        job.record.schema_key = key;
        spdlog::info("{}: cache hit {}", doc->doc_id, key);
    } else {
        job.record.state = JobState::Pending;
        building_[key] = id;
        queue_.push_back(id);
        work_cv_.notify_one();
    }
    latest_[doc->doc_id] = id;
    auto [pos, _] = jobs_.emplace(id, std::move(job));
    return pos->second.record;
}

void SchemaService::worker_loop() {
    for (;;) {
        std::string id;
        {
            std::unique_lock lock(mutex_);
            work_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            id = queue_.front();
            queue_.pop_front();
            jobs_.at(id).record.state = JobState::Running;
            ++active_;
        }
        run_job(id);
        {
            std::lock_guard lock(mutex_);
            --active_;
        }
        idle_cv_.notify_all();
    }
}

void SchemaService::run_job(const std::string& id) {
    std::shared_ptr<const ParsedDocument> doc;
    {
        std::lock_guard lock(mutex_);
        doc = jobs_.at(id).doc;
    }
    const std::string key = cache_key(doc->content_hash, options_);
    std::string error;
    try {
        const std::string bytes = encode_schema(build_schema(*doc, options_, client_.get()));
        write_file_atomic(schema_path(key), bytes);
        spdlog::info("{}: schema {} written ({} bytes)", doc->doc_id, key, bytes.size());
    } catch (const std::exception& e) {
        error = e.what();
        spdlog::error("{}: build failed: {}", doc->doc_id, error);
    }
    std::lock_guard lock(mutex_);
    JobRecord& rec = jobs_.at(id).record;
    if (error.empty()) {
        rec.state = JobState::Done;
        rec.schema_key = key;
    } else {
        rec.state = JobState::Failed;
        rec.error = error;
    }
    building_.erase(key);
}

std::optional<JobRecord> SchemaService::status(const std::string& doc_id) const {
    std::lock_guard lock(mutex_);
    auto it = latest_.find(doc_id);
    if (it == latest_.end()) return std::nullopt;
    return jobs_.at(it->second).record;
}

FetchResult SchemaService::fetch_schema(const std::string& doc_id) const {
    FetchResult out;
    const auto job = status(doc_id);
    if (!job) return out;
    out.job = job;
    if (job->state == JobState::Pending || job->state == JobState::Running) {
        out.status = 202;
        out.body = job_json(*job);
        return out;
    }
    if (job->state == JobState::Failed) {
        out.status = 404;
        out.body = job_json(*job);
        return out;
    }
    auto bytes = read_file(schema_path(job->schema_key));
    if (!bytes) return out;
    out.status = 200;
    out.body = std::move(*bytes);
    std::lock_guard lock(mutex_);
    out.etag = "\"" + documents_.at(doc_id)->content_hash + "\"";
    return out;
}

std::optional<std::string> SchemaService::table_json(const std::string& doc_id, const std::string& table_id) const {
    std::shared_ptr<const ParsedDocument> doc;
    {
        std::lock_guard lock(mutex_);
        auto it = documents_.find(doc_id);
        if (it == documents_.end()) return std::nullopt;
        doc = it->second;
    }
    const Table* t = doc->find_table(table_id);
    if (!t) return std::nullopt;
    const PageInfo& page = doc->page(t->page);
    auto box = [](const NormalizedBox& b) {
        return ordered_json{{"page", b.page}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
    };
    ordered_json cells = ordered_json::array();
    for (const Cell& c : t->cells) {
        cells.push_back(ordered_json{{"id", c.id},
                                     {"row", c.row},
                                     {"col", c.col},
                                     {"row_span", c.row_span},
                                     {"col_span", c.col_span},
                                     {"text", c.text},
                                     {"header", t->is_header_cell(c)},
                                     {"box", box(normalize_box(c.box, page))}});
    }
    ordered_json j{{"id", t->id},
                   {"number", t->number},
                   {"caption", t->caption},
                   {"page", t->page},
                   {"box", box(normalize_box(t->box, page))},
                   {"n_rows", t->n_rows},
                   {"n_cols", t->n_cols},
                   {"header_rows", t->header_rows},
                   {"cells", std::move(cells)}};
    return j.dump();
}

void SchemaService::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [&] { return queue_.empty() && active_ == 0; });
}

void run_http_server(SchemaService& service, const std::string& host, int port, std::stop_token stop) {
    httplib::Server server;
    auto error_body = [](std::string_view code, std::string_view detail) {
        return nlohmann::json{{"error", code}, {"detail", detail}}.dump();
    };

    server.Post("/documents", [&](const httplib::Request& req, httplib::Response& res) {
        try {
            const JobRecord job = service.submit(req.body);
            res.status = job.state == JobState::Done ? 200 : 202;
            res.set_content(job_json(job), "application/json");
        } catch (const ValidationError& e) {
            res.status = 400;
            res.set_content(error_body("invalid-bundle", e.what()), "application/json");
        }
    });
    server.Get(R"(/documents/([^/]+)/schema)", [&](const httplib::Request& req, httplib::Response& res) {
        const FetchResult r = service.fetch_schema(req.matches[1]);
        if (r.status == 200 && req.get_header_value("If-None-Match") == r.etag) {
            res.status = 304;
            res.set_header("ETag", r.etag);
            return;
        }
        res.status = r.status;
        if (r.status == 404 && r.body.empty()) {
            res.set_content(error_body("not-found", req.matches[1].str()), "application/json");
            return;
        }
        if (!r.etag.empty()) res.set_header("ETag", r.etag);
        if (r.status == 202) res.set_header("Retry-After", "1");
        res.set_content(r.body, "application/json");
    });
    server.Get(R"(/documents/([^/]+)/status)", [&](const httplib::Request& req, httplib::Response& res) {
        const auto job = service.status(req.matches[1]);
        if (!job) {
            res.status = 404;
            res.set_content(error_body("not-found", req.matches[1].str()), "application/json");
            return;
        }
        res.set_content(job_json(*job), "application/json");
    });
    server.Get(R"(/documents/([^/]+)/tables/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = service.table_json(req.matches[1], req.matches[2]);
        if (!body) {
            res.status = 404;
            res.set_content(error_body("not-found", req.matches[2].str()), "application/json");
            return;
        }
        res.set_content(*body, "application/json");
    });

    if (!server.bind_to_port(host, port))
        throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
    // stop() is a no-op until the accept loop runs, so poll for both.
    std::atomic<bool> done{false};
    std::thread watcher;
    if (stop.stop_possible()) {
        watcher = std::thread([&] {
            while (!done) {
                if (stop.stop_requested() && server.is_running()) {
                    server.stop();
                    return;
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(5));
            }
        });
    }
    spdlog::info("listening on {}:{}", host, port);
    server.listen_after_bind();
    done = true;
    if (watcher.joinable()) watcher.join();
}

}  // namespace tablink
