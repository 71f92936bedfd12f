#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace pat {

// Warning channel for recoverable conditions (zero rows, skipped classes).
// The default handler writes to stderr. Handlers may be called from worker
// threads; calls are serialized.
using WarningHandler = std::function<void(std::string_view)>;

/// Installs `handler` and returns the previous one. An empty handler mutes warnings.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

/// Collects warnings for the lifetime of the object, restoring the previous
/// handler on destruction.
class ScopedWarningCapture {
public:
    ScopedWarningCapture();
    ~ScopedWarningCapture();
    ScopedWarningCapture(const ScopedWarningCapture&) = delete;
    ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

    const std::vector<std::string>& messages() const { return messages_; }

private:
    std::vector<std::string> messages_;
    WarningHandler previous_;
};

} // namespace pat
