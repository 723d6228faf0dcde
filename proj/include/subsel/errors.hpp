#ifndef SUBSEL_ERRORS_HPP
#define SUBSEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace subsel {

// Error categories map onto CLI exit codes: config -> 2, data -> 3, numeric -> 4.

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a logistic fit diverges or the data are completely separated.
class separation_error : public numeric_error {
public:
    explicit separation_error(const std::string& msg) : numeric_error(msg) {}
};

// Thrown when a cross-fitting training complement lacks one treatment arm.
class fold_error : public data_error {
public:
    explicit fold_error(const std::string& msg) : data_error(msg) {}
};

} // namespace subsel

#endif
