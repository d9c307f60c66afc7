#pragma once

#include <stdexcept>
#include <string>

namespace lesionbench {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimsMismatchError : Error {
    explicit DimsMismatchError(const std::string& msg) : Error(msg) {}
};

struct DegenerateAffineError : Error {
    explicit DegenerateAffineError(const std::string& msg) : Error(msg) {}
};

struct ZeroVarianceError : Error {
    explicit ZeroVarianceError(const std::string& msg) : Error(msg) {}
};

struct InvalidArgumentError : Error {
    explicit InvalidArgumentError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace lesionbench
