#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netmix {

/// Failure classes surfaced by ingestion, persistence and the CLI.
enum class ErrorKind { Usage, Config, MissingFile, Parse, Dimension, Checksum, Archive };

std::string_view to_string(ErrorKind kind);

class NetmixError : public std::runtime_error {
public:
    NetmixError(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace netmix
