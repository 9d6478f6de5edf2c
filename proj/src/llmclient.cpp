#include "relfix/llmclient.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace relfix {
namespace llm {

namespace fs = std::filesystem;
using nlohmann::json;

ClientConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config: " + path);
    json j = json::parse(in);
    ClientConfig c;
    c.endpoint_url = j.at("endpoint_url").get<std::string>();
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.model_name = j.at("model_name").get<std::string>();
    c.parallelism = j.value("parallelism", c.parallelism);
    c.temperature = j.value("temperature", c.temperature);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.cache_dir = j.value("cache_dir", c.cache_dir);
    c.max_retries = j.value("max_retries", c.max_retries);
    return c;
}

namespace {

uint64_t fnv1a(uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct UrlParts {
    std::string host;  // scheme://host:port
    std::string path;
};

UrlParts split_url(const std::string& url) {
    size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw DomainError("bad endpoint url: " + url);
    size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

}  // namespace

std::string cache_key(const ClientConfig& cfg, const std::string& prompt) {
    uint64_t h = 1469598103934665603ull;
    h = fnv1a(h, cfg.model_name);
    h = fnv1a(h, "\x1f");
    h = fnv1a(h, prompt);
    h = fnv1a(h, "\x1f");
    std::ostringstream params;
    params << cfg.temperature << "|" << cfg.max_tokens;
    h = fnv1a(h, params.str());
    // Second pass with a different offset basis to widen the key.
    uint64_t h2 = fnv1a(fnv1a(0xcbf29ce484222325ull ^ 0x5bd1e995ull, prompt), cfg.model_name);
    return hex64(h) + hex64(h2);
}

BatchStats run_batch(std::vector<QueryJob>& jobs, const ClientConfig& cfg) {
    std::string api_key;
    if (!cfg.api_key_env.empty()) {
        const char* v = std::getenv(cfg.api_key_env.c_str());
        if (!v)
            throw DomainError("credential environment variable not set: " + cfg.api_key_env);
        api_key = v;
    }
    fs::create_directories(cfg.cache_dir);

    BatchStats stats;
    std::mutex cache_mutex;  // single writer for cache files
    std::mutex stats_mutex;
    std::atomic<size_t> next{0};

    auto cache_path = [&](const QueryJob& job) {
        return fs::path(cfg.cache_dir) / (cache_key(cfg, job.prompt) + ".json");
    };

    // Warm-cache pass first: cache hits never touch the network.
    std::vector<size_t> uncached;
    for (size_t i = 0; i < jobs.size(); ++i) {
        auto p = cache_path(jobs[i]);
        std::ifstream in(p);
        if (in) {
            json j = json::parse(in);
            jobs[i].response = j.at("content").get<std::string>();
            jobs[i].status = JobStatus::Done;
            jobs[i].from_cache = true;
            ++stats.done;
            ++stats.cache_hits;
        } else {
            uncached.push_back(i);
        }
    }
    if (uncached.empty()) return stats;

    UrlParts url = split_url(cfg.endpoint_url);
    int workers = std::max(1, std::min<int>(cfg.parallelism, static_cast<int>(uncached.size())));

    auto worker = [&]() {
        httplib::Client client(url.host);
        client.set_read_timeout(120, 0);
        while (true) {
            size_t slot = next.fetch_add(1);
            if (slot >= uncached.size()) break;
            QueryJob& job = jobs[uncached[slot]];
            json body;
            body["model"] = cfg.model_name;
            body["messages"] = json::array({{{"role", "user"}, {"content", job.prompt}}});
            body["temperature"] = cfg.temperature;
            body["max_tokens"] = cfg.max_tokens;
            httplib::Headers headers;
            if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

            bool ok = false;
            std::string content;
            for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
                if (attempt > 0) {
                    job.retries = attempt;
                    std::this_thread::sleep_for(
                        std::chrono::milliseconds(cfg.backoff_ms << (attempt - 1)));
                }
                {
                    std::lock_guard<std::mutex> lk(stats_mutex);
                    ++stats.network_calls;
                }
                auto res = client.Post(url.path, headers, body.dump(), "application/json");
                if (!res) continue;
                if (res->status == 429 || res->status >= 500) continue;
                if (res->status != 200) break;
                try {
                    json r = json::parse(res->body);
                    content = r.at("choices").at(0).at("message").at("content").get<std::string>();
                    ok = true;
                } catch (const json::exception&) {
                }
                break;
            }
            if (ok) {
                job.response = content;
                job.status = JobStatus::Done;
                json rec;
                rec["task_id"] = job.task_id;
                rec["model"] = cfg.model_name;
                rec["content"] = content;
                std::lock_guard<std::mutex> lk(cache_mutex);
                std::ofstream out(cache_path(job));
                out << rec.dump() << "\n";
                std::lock_guard<std::mutex> lk2(stats_mutex);
                ++stats.done;
            } else {
                job.status = JobStatus::Failed;
                std::lock_guard<std::mutex> lk(stats_mutex);
                ++stats.failed;
            }
        }
    };

    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return stats;
}

}  // namespace llm
}  // namespace relfix
