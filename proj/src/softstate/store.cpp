#include "neuroproxy/softstate/store.hpp"

#include <mutex>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::softstate {

SoftStateStore::SoftStateStore(RefreshParams defaults) : defaults_(defaults)
{
    if (defaults.refresh_interval == 0 || defaults.miss_threshold == 0) {
        throw TimeError("soft-state defaults need interval > 0 and threshold >= 1");
    }
}

bool SoftStateStore::visible(const Entry& e, TimeNs now)
{
    if (now < e.last_refresh) {
        return true;  // refreshed "in the future" relative to a stale reader
    }
    const TimeNs budget =
        e.params.refresh_interval * static_cast<TimeNs>(e.params.miss_threshold);
    return now - e.last_refresh <= budget;
}

RefreshOutcome SoftStateStore::refresh(const std::string& key, std::string value, TimeNs now)
{
    return refresh(key, std::move(value), now, defaults_);
}

RefreshOutcome SoftStateStore::refresh(const std::string& key, std::string value, TimeNs now,
                                       RefreshParams params)
{
    if (params.refresh_interval == 0 || params.miss_threshold == 0) {
        throw TimeError("refresh needs interval > 0 and threshold >= 1");
    }
    std::unique_lock lock(mutex_);
    if (now < watermark_) {
        throw TimeError("refresh time behind the store watermark");
    }
    watermark_ = now;
    auto it = entries_.find(key);
    const bool revived = it == entries_.end() || !visible(it->second, now);
    if (it == entries_.end()) {
        it = entries_.emplace(key, Entry{}).first;
    }
    Entry& e = it->second;
    if (revived) {
        e.created = now;
    }
    e.value = std::move(value);
    e.params = params;
    e.last_refresh = now;
    return revived ? RefreshOutcome::kCreated : RefreshOutcome::kUpdated;
}

std::optional<std::string> SoftStateStore::get(const std::string& key, TimeNs now) const
{
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end() || !visible(it->second, now)) {
        return std::nullopt;
    }
    return it->second.value;
}

std::vector<std::string> SoftStateStore::sweep(TimeNs now)
{
    std::unique_lock lock(mutex_);
    if (now > watermark_) {
        watermark_ = now;
    }
    std::vector<std::string> expired;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (!visible(it->second, now)) {
            expired.push_back(it->first);
            it = entries_.erase(it);
        } else {
            ++it;
        }
    }
    return expired;
}

std::size_t SoftStateStore::size() const
{
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::optional<SoftStateStore::EntryInfo> SoftStateStore::info(const std::string& key,
                                                              TimeNs now) const
{
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end() || !visible(it->second, now)) {
        return std::nullopt;
    }
    return EntryInfo{it->second.last_refresh, it->second.created, it->second.params};
}

}  // namespace neuroproxy::softstate
