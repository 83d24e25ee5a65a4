#pragma once

#include <stdexcept>
#include <string>

namespace tbp {

// Evaluation at (or too close to) a singular point of the potential.
class CollisionError : public std::domain_error {
public:
    CollisionError(const std::string& body, const std::string& what)
        : std::domain_error(what), body_(body) {}
    const std::string& body() const { return body_; }

private:
    std::string body_;
};

class UnsupportedInvolution : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Root finding, integration or frame construction failed to meet tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A runtime contract on a constructed object failed; `clause` names which one.
class ContractError : public std::runtime_error {
public:
    ContractError(const std::string& clause, const std::string& what)
        : std::runtime_error(what), clause_(clause) {}
    const std::string& clause() const { return clause_; }

private:
    std::string clause_;
};

class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace tbp
