#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmpr {

/// Broad failure class; the CLI maps these onto exit codes.
enum class ErrorClass
{
    usage,      // bad configuration or arguments
    data,       // malformed or degenerate input data
    numerical,  // factorization or solver breakdown
};

class Error : public std::runtime_error
{
public:
    Error(ErrorClass cls, std::string kind, const std::string& msg)
        : std::runtime_error(msg), cls_(cls), kind_(std::move(kind))
    {}

    ErrorClass error_class() const noexcept { return cls_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    ErrorClass cls_;
    std::string kind_;
};

class InvalidConfig : public Error
{
public:
    explicit InvalidConfig(const std::string& msg)
        : Error(ErrorClass::usage, "InvalidConfig", msg) {}
};

class DimensionMismatch : public Error
{
public:
    explicit DimensionMismatch(const std::string& msg)
        : Error(ErrorClass::data, "DimensionMismatch", msg) {}
};

class LengthMismatch : public Error
{
public:
    LengthMismatch(std::size_t a, std::size_t b)
        : Error(ErrorClass::data, "LengthMismatch",
                "vector lengths differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class ConstantColumn : public Error
{
public:
    explicit ConstantColumn(std::size_t k)
        : Error(ErrorClass::data, "ConstantColumn",
                "column " + std::to_string(k) + " has zero norm after centering"),
          column(k) {}
    std::size_t column;
};

class ScaleMismatch : public Error
{
public:
    explicit ScaleMismatch(const std::string& msg)
        : Error(ErrorClass::data, "ScaleMismatch", msg) {}
};

class WrongDimension : public Error
{
public:
    explicit WrongDimension(const std::string& msg)
        : Error(ErrorClass::data, "WrongDimension", msg) {}
};

class NotPositiveDefinite : public Error
{
public:
    explicit NotPositiveDefinite(const std::string& msg)
        : Error(ErrorClass::numerical, "NotPositiveDefinite", msg) {}
};

class MissingColumn : public Error
{
public:
    explicit MissingColumn(const std::string& name)
        : Error(ErrorClass::data, "MissingColumn", "column not found: " + name), column(name) {}
    std::string column;
};

class NonNumericCell : public Error
{
public:
    NonNumericCell(std::size_t row, const std::string& col, const std::string& text)
        : Error(ErrorClass::data, "NonNumericCell",
                "non-numeric value '" + text + "' at row " + std::to_string(row) +
                ", column " + col),
          row(row), column(col) {}
    std::size_t row;
    std::string column;
};

class MissingValue : public Error
{
public:
    MissingValue(std::size_t row, const std::string& col)
        : Error(ErrorClass::data, "MissingValue",
                "missing value at row " + std::to_string(row) + ", column " + col),
          row(row), column(col) {}
    std::size_t row;
    std::string column;
};

} // namespace mmpr
