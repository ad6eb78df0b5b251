#pragma once

#include <stdexcept>
#include <string>

namespace qmine {

// Unreadable/unwritable files and other OS-level failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally invalid input: non-WARC file, checksum mismatch,
// unsupported on-disk format version, corrupt model file.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Caller broke a documented precondition (count < 1, mismatched
// signature widths, unknown doc id, empty training class).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace qmine
