#include "neuroproxy/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace neuroproxy {

LogLevel log_level()
{
    static const LogLevel level = [] {
        const char* env = std::getenv("NEUROPROXY_LOG");
        if (env == nullptr) {
            return LogLevel::kError;
        }
        if (std::strcmp(env, "debug") == 0) {
            return LogLevel::kDebug;
        }
        if (std::strcmp(env, "info") == 0) {
            return LogLevel::kInfo;
        }
        return LogLevel::kError;
    }();
    return level;
}

void log_message(LogLevel level, const std::string& message)
{
    if (level > log_level()) {
        return;
    }
    static std::mutex mutex;
    const char* tag = level == LogLevel::kError ? "error"
                      : level == LogLevel::kInfo ? "info"
                                                 : "debug";
    std::lock_guard lock(mutex);
    std::fprintf(stderr, "[neuroproxy %s] %s\n", tag, message.c_str());
}

}  // namespace neuroproxy
