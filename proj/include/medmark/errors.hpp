#pragma once

#include <stdexcept>
#include <string>

namespace medmark {

// Unreadable/unwritable files, missing directories.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Recognized file that violates its format (bad magic, bad header, truncation).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller passed values outside an operation's contract.
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Payload does not fit in the image; carries both sides of the comparison.
class CapacityError : public std::runtime_error {
public:
    CapacityError(std::size_t capacity_bits, std::size_t payload_bits)
        : std::runtime_error("payload needs " + std::to_string(payload_bits) +
                             " bits but image capacity is " + std::to_string(capacity_bits)),
          capacity(capacity_bits),
          payload(payload_bits) {}

    std::size_t capacity;
    std::size_t payload;
};

// Numerical routine failed to converge or produced non-finite output.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace medmark
