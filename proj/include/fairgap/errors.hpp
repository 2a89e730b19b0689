#pragma once

#include <stdexcept>
#include <string>

namespace fairgap {

// Bad arguments to a library call (shape mismatch, empty input, invalid params).
struct InputError : std::invalid_argument {
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// CSV ingestion failure; message carries row/column location.
struct IngestError : std::runtime_error {
    explicit IngestError(const std::string& what) : std::runtime_error(what) {}
};

// Split planning failure (e.g. a fold cannot contain both groups).
struct SplitError : std::runtime_error {
    explicit SplitError(const std::string& what) : std::runtime_error(what) {}
};

// A loss was requested on a batch where a required group rate is undefined.
struct ObjectiveError : std::runtime_error {
    explicit ObjectiveError(const std::string& what) : std::runtime_error(what) {}
};

// Training run failed (divergence); carries the epoch where it happened.
struct RunError : std::runtime_error {
    RunError(const std::string& what, int epoch_index)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch_index) + ")"),
          epoch(epoch_index) {}
    int epoch;
};

}  // namespace fairgap
