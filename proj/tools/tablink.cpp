#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "tablink/document.hpp"
#include "tablink/evaluation.hpp"
#include "tablink/inference.hpp"
#include "tablink/options.hpp"
#include "tablink/schema.hpp"
#include "tablink/service.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

tablink::PipelineOptions options_from(const std::string& config) {
    tablink::PipelineOptions options = config.empty() ? tablink::PipelineOptions{} : tablink::load_options(config);
    tablink::apply_environment(options);
    return options;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link sentences of a parsed paper to the table cells they talk about."};
    app.require_subcommand(1);

    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error, or off")->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "Validate a document bundle and print a summary");
    std::string bundle_path;
    ingest->add_option("bundle", bundle_path, "Document bundle (JSON)")->required()->check(CLI::ExistingFile);

    auto* link = app.add_subcommand("link", "Build the linking schema for a bundle");
    std::string link_bundle, link_out, config;
    link->add_option("bundle", link_bundle, "Document bundle (JSON)")->required()->check(CLI::ExistingFile);
    link->add_option("-o,--output", link_out, "Schema file to write (stdout when omitted)");
    link->add_option("--config", config, "Pipeline config file (JSON)")->check(CLI::ExistingFile);

    auto* eval = app.add_subcommand("eval", "Score a predicted schema against a gold schema");
    std::string pred_path, gold_path, eval_bundle, format = "text";
    eval->add_option("--pred", pred_path, "Predicted schema")->required()->check(CLI::ExistingFile);
    eval->add_option("--gold", gold_path, "Gold schema")->required()->check(CLI::ExistingFile);
    eval->add_option("--bundle", eval_bundle, "Source bundle, for table sizes")->required()->check(CLI::ExistingFile);
    eval->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    double threshold = 0.5;
    eval->add_option("--iou", threshold, "Span IoU needed for a detection match")->capture_default_str();

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    int port = 8080;
    std::string host = "127.0.0.1", data_dir = "data";
    unsigned workers = 1;
    serve->add_option("--port", port, "TCP port")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--data-dir", data_dir, "Directory for cached schema files")->capture_default_str();
    serve->add_option("--workers", workers, "Build threads")->capture_default_str();
    serve->add_option("--config", config, "Pipeline config file (JSON)")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*ingest) {
            const auto doc = tablink::ingest_document(read_file(bundle_path));
            nlohmann::ordered_json j;
            j["doc_id"] = doc.doc_id;
            j["content_hash"] = doc.content_hash;
            j["pages"] = doc.pages.size();
            j["paragraphs"] = doc.paragraphs.size();
            auto tables = nlohmann::ordered_json::array();
            for (const auto& t : doc.tables) {
                tables.push_back({{"id", t.id},
                                  {"number", t.number},
                                  {"rows", t.n_rows},
                                  {"cols", t.n_cols},
                                  {"complexity", std::string(tablink::to_string(tablink::classify_table_complexity(t)))}});
            }
            j["tables"] = std::move(tables);
            std::cout << j.dump(2) << "\n";
        } else if (*link) {
            const auto options = options_from(config);
            const auto client = tablink::make_inference_client(options.remote);
            const auto doc = tablink::ingest_document(read_file(link_bundle));
            const std::string bytes = tablink::encode_schema(tablink::build_schema(doc, options, client.get()));
            if (link_out.empty()) {
                std::cout << bytes;
            } else {
                tablink::write_file_atomic(link_out, bytes);
            }
        } else if (*eval) {
            const auto doc = tablink::ingest_document(read_file(eval_bundle));
            const auto pred = tablink::decode_schema(read_file(pred_path));
            const auto gold = tablink::decode_schema(read_file(gold_path));
            tablink::validate_schema(pred, doc);
            tablink::validate_schema(gold, doc);
            const auto report = tablink::evaluate_schemas(pred, gold, doc, threshold);
            std::cout << (format == "json" ? tablink::report_json(report) : tablink::report_text(report));
        } else if (*serve) {
            auto options = options_from(config);
            std::shared_ptr<tablink::InferenceClient> client = tablink::make_inference_client(options.remote);
            tablink::SchemaService service(data_dir, options, client, workers);
            tablink::run_http_server(service, host, port);
        }
    } catch (const tablink::ValidationError& e) {
        std::cerr << "invalid bundle: " << e.what() << "\n";
        return 2;
    } catch (const tablink::SchemaError& e) {
        std::cerr << "invalid schema: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
