#ifndef RESPATH_ERRORS_HPP
#define RESPATH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace respath {

// Input value outside its documented domain (e.g. coordinate not in [0,1]).
class DomainError : public std::invalid_argument {
public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Matrix/vector shapes do not compose.
class StructuralError : public std::invalid_argument {
public:
  explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

// A size guard was exceeded (path enumeration, construction width, ...).
class CapacityError : public std::invalid_argument {
public:
  explicit CapacityError(const std::string& what) : std::invalid_argument(what) {}
};

// Structurally valid input on which the operation is undefined (all-zero rep, zero matrix).
class DegenerateInputError : public std::invalid_argument {
public:
  explicit DegenerateInputError(const std::string& what) : std::invalid_argument(what) {}
};

// Training produced a non-finite objective.
class DivergenceError : public std::runtime_error {
public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration or model file.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace respath

#endif
