#pragma once

#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace bs {

// Hex SHA-256 of the concatenated parts, each length-prefixed.
std::string canonical_hash(const std::vector<std::string>& parts);

// On-disk JSON store, one file per key. An empty directory disables persistence;
// in-process deduplication still applies.
class Cache {
public:
    explicit Cache(std::string dir = {});

    const std::string& dir() const { return dir_; }
    bool enabled() const { return !dir_.empty(); }

    // Exactly one producer run per key among concurrent callers in this process.
    nlohmann::json get_or_compute(const std::string& key, const std::function<nlohmann::json()>& producer,
                                  bool* hit = nullptr);
    std::optional<nlohmann::json> get(const std::string& key);
    void put(const std::string& key, const nlohmann::json& value);

    int hits() const { return hits_; }
    int misses() const { return misses_; }
    std::vector<std::string> warnings() const;

private:
    std::string dir_;
    std::mutex mu_;
    std::map<std::string, std::shared_future<nlohmann::json>> inflight_;
    std::vector<std::string> warnings_;
    int hits_ = 0, misses_ = 0;

    std::string path_of(const std::string& key) const;
};

// Directory named by BS_CACHE_DIR, or empty.
std::string default_cache_dir();

}  // namespace bs
