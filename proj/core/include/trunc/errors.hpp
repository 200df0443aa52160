#pragma once

#include <stdexcept>
#include <string>

namespace trunctest {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct EmptyInterval : Error {
    using Error::Error;
};

struct TooFewSamples : Error {
    using Error::Error;
};

struct RejectionExhausted : Error {
    RejectionExhausted(const std::string& body, std::size_t attempts)
        : Error("rejection sampler exhausted " + std::to_string(attempts) +
                " attempts for body " + body),
          body_kind(body),
          attempts(attempts) {}
    std::string body_kind;
    std::size_t attempts;
};

struct RootNotBracketed : Error {
    using Error::Error;
};

}  // namespace trunctest
