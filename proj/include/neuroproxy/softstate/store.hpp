#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "neuroproxy/spike.hpp"

namespace neuroproxy::softstate {

struct RefreshParams {
    TimeNs refresh_interval = 100 * kNsPerMs;  // > 0
    std::uint32_t miss_threshold = 1;          // >= 1

    friend bool operator==(const RefreshParams&, const RefreshParams&) = default;
};

enum class RefreshOutcome { kCreated, kUpdated };

/// Refresh-driven soft-state store. An entry is visible while
/// now - last_refresh <= miss_threshold * refresh_interval (inclusive);
/// expiry is logical, physical removal happens only in sweep or on
/// re-creation. Time is injected, never read from a wall clock.
///
/// Mutations are serialized; readers run concurrently against a
/// consistent view.
class SoftStateStore {
public:
    explicit SoftStateStore(RefreshParams defaults = {});

    /// Creates or refreshes an entry at `now` with the store defaults.
    RefreshOutcome refresh(const std::string& key, std::string value, TimeNs now);

    /// Creates or refreshes an entry with per-entry parameters. Refreshing
    /// an entry that has silently expired re-creates it. Throws TimeError
    /// if `now` is behind the mutation watermark.
    RefreshOutcome refresh(const std::string& key, std::string value, TimeNs now,
                           RefreshParams params);

    /// Value if the entry is visible at `now`; absent otherwise. Never
    /// mutates the store.
    std::optional<std::string> get(const std::string& key, TimeNs now) const;

    /// Physically removes entries no longer visible at `now`; returns
    /// their keys in ascending order.
    std::vector<std::string> sweep(TimeNs now);

    std::size_t size() const;

    struct EntryInfo {
        TimeNs last_refresh = 0;
        TimeNs created = 0;
        RefreshParams params;
    };
    /// Bookkeeping for a live (non-expired) entry.
    std::optional<EntryInfo> info(const std::string& key, TimeNs now) const;

private:
    struct Entry {
        std::string value;
        RefreshParams params;
        TimeNs last_refresh = 0;
        TimeNs created = 0;
    };

    static bool visible(const Entry& e, TimeNs now);

    RefreshParams defaults_;
    std::map<std::string, Entry> entries_;
    TimeNs watermark_ = 0;
    mutable std::shared_mutex mutex_;
};

}  // namespace neuroproxy::softstate
