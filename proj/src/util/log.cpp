#include "automesc/util/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <mutex>

namespace automesc::util {

namespace {

int threshold()
{
    static const int level = [] {
        const char* env = std::getenv("AUTOMESC_LOG");
        std::string_view v = env ? env : "info";
        if (v == "debug")
            return 0;
        if (v == "warn")
            return 2;
        if (v == "error")
            return 3;
        if (v == "off")
            return 4;
        return 1;
    }();
    return level;
}

} // namespace

void log(LogLevel level, std::string_view message)
{
    static const char* names[] = {"debug", "info", "warn", "error"};
    static std::mutex mu;
    if (static_cast<int>(level) < threshold())
        return;
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
    std::lock_guard lock(mu);
    std::fprintf(stderr, "%s %s %.*s\n", stamp, names[static_cast<int>(level)], static_cast<int>(message.size()),
                 message.data());
}

} // namespace automesc::util
