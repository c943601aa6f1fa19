#include "bs/cache.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace bs {

namespace fs = std::filesystem;

std::string canonical_hash(const std::vector<std::string>& parts) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    for (const auto& p : parts) {
        std::string len = std::to_string(p.size()) + ":";
        EVP_DigestUpdate(ctx, len.data(), len.size());
        EVP_DigestUpdate(ctx, p.data(), p.size());
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int n = 0;
    EVP_DigestFinal_ex(ctx, md, &n);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < n; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

Cache::Cache(std::string dir) : dir_(std::move(dir)) {
    if (enabled()) fs::create_directories(dir_);
}

std::string Cache::path_of(const std::string& key) const { return (fs::path(dir_) / (key + ".json")).string(); }

std::vector<std::string> Cache::warnings() const { return warnings_; }

std::optional<nlohmann::json> Cache::get(const std::string& key) {
    if (!enabled()) return std::nullopt;
    std::ifstream in(path_of(key));
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    auto j = nlohmann::json::parse(ss.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("value")) {
        std::lock_guard<std::mutex> g(mu_);
        warnings_.push_back("corrupt cache entry " + key + ", recomputing");
        return std::nullopt;
    }
    return j["value"];
}

void Cache::put(const std::string& key, const nlohmann::json& value) {
    if (!enabled()) return;
    fs::create_directories(dir_);
    // write then rename so readers never see a partial file
    std::ostringstream tmp_name;
    tmp_name << path_of(key) << ".tmp." << std::this_thread::get_id();
    {
        std::ofstream out(tmp_name.str(), std::ios::trunc);
        nlohmann::json j{{"key", key}, {"value", value}};
        out << j.dump();
    }
    fs::rename(tmp_name.str(), path_of(key));
}

nlohmann::json Cache::get_or_compute(const std::string& key, const std::function<nlohmann::json()>& producer,
                                     bool* hit) {
    std::promise<nlohmann::json> mine;
    std::shared_future<nlohmann::json> fut;
    bool owner = false;
    {
        std::lock_guard<std::mutex> g(mu_);
        auto it = inflight_.find(key);
        if (it != inflight_.end()) {
            fut = it->second;
        } else {
            fut = mine.get_future().share();
            inflight_.emplace(key, fut);
            owner = true;
        }
    }
    if (!owner) {
        nlohmann::json v = fut.get();
        std::lock_guard<std::mutex> g(mu_);
        ++hits_;
        if (hit) *hit = true;
        return v;
    }
    try {
        if (auto v = get(key)) {
            {
                std::lock_guard<std::mutex> g(mu_);
                ++hits_;
            }
            if (hit) *hit = true;
            mine.set_value(*v);
            std::lock_guard<std::mutex> g(mu_);
            inflight_.erase(key);
            return *v;
        }
        nlohmann::json v = producer();
        put(key, v);
        {
            std::lock_guard<std::mutex> g(mu_);
            ++misses_;
        }
        if (hit) *hit = false;
        mine.set_value(v);
        std::lock_guard<std::mutex> g(mu_);
        inflight_.erase(key);
        return v;
    } catch (...) {
        mine.set_exception(std::current_exception());
        std::lock_guard<std::mutex> g(mu_);
        inflight_.erase(key);
        throw;
    }
}

std::string default_cache_dir() {
    const char* d = std::getenv("BS_CACHE_DIR");
    return d ? std::string(d) : std::string();
}

}  // namespace bs
