#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace egorank {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- event parsing ---

class MalformedRecord : public Error {
public:
    using Error::Error;
};

class UnknownInteractionType : public Error {
public:
    using Error::Error;
};

class SelfInteraction : public Error {
public:
    using Error::Error;
};

class NegativeTimestamp : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// One rejected input line: 1-based line number plus the parse failure text.
struct ParseIssue {
    std::size_t line = 0;
    std::string message;
};

/// Aggregate of all bad lines in a strict-mode load.
class ParseErrors : public Error {
public:
    ParseErrors(std::string what, std::vector<ParseIssue> issues)
        : Error(std::move(what)), issues_(std::move(issues)) {}

    const std::vector<ParseIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ParseIssue> issues_;
};

// --- scoring ---

class TimestampBeforeEpoch : public Error {
public:
    using Error::Error;
};

// --- tournament / colley ---

class UnknownFriend : public Error {
public:
    using Error::Error;
};

class EmptyFriendSet : public Error {
public:
    using Error::Error;
};

class SolveFailure : public Error {
public:
    using Error::Error;
};

// --- circles ---

class DuplicateFriend : public Error {
public:
    using Error::Error;
};

// --- synth ---

class BadTierSpec : public Error {
public:
    using Error::Error;
};

class FriendSetMismatch : public Error {
public:
    using Error::Error;
};

// --- cli / state ---

class ConfigError : public Error {
public:
    using Error::Error;
};

class OutOfOrderBatch : public Error {
public:
    using Error::Error;
};

class StateCorrupt : public Error {
public:
    using Error::Error;
};

} // namespace egorank
