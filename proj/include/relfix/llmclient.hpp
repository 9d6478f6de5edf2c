#pragma once

#include "relfix/relmodel.hpp"

namespace relfix {
namespace llm {

struct ClientConfig {
    std::string endpoint_url;       // e.g. http://host:port/v1/chat/completions
    std::string api_key_env = "RELFIX_API_KEY";
    std::string model_name;
    int parallelism = 4;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::string cache_dir = "cache";
    int max_retries = 5;
    // Test hook: base backoff in milliseconds.
    int backoff_ms = 250;
};

ClientConfig load_config(const std::string& path);

enum class JobStatus { Pending, Done, Failed };

struct QueryJob {
    std::string task_id;
    std::string prompt;
    JobStatus status = JobStatus::Pending;
    std::string response;    // assistant message content when Done
    bool from_cache = false;
    int retries = 0;
};

// Content address of a job under a config: FNV-1a over model, prompt and
// sampling params. Stable across runs.
std::string cache_key(const ClientConfig& cfg, const std::string& prompt);

struct BatchStats {
    int done = 0;
    int failed = 0;
    int cache_hits = 0;
    int network_calls = 0;
};

// Issues chat-completion requests with bounded parallelism and
// exponential-backoff retry; each raw response is cached on disk keyed by
// cache_key. Cache hits never touch the network. A named-but-unset
// api_key_env aborts at startup; set it to "" for open endpoints.
BatchStats run_batch(std::vector<QueryJob>& jobs, const ClientConfig& cfg);

}  // namespace llm
}  // namespace relfix
