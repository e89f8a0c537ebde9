#pragma once

#include <stdexcept>
#include <string>

namespace crsense {

/// A run was asked to use trained artifacts that are not available.
struct MissingArtifactError : std::runtime_error {
    explicit MissingArtifactError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace crsense
