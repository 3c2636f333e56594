#ifndef INFOMECH_ERRORS_HPP
#define INFOMECH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace infomech {

// Base class for all solver-raised conditions. Input/parse problems use
// InputError (CLI exit code 2); numeric trouble uses NumericFailure (exit
// code 3); everything else signals a violated precondition of the operation
// that raised it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what) {}
};

// Simplex stalled past the iteration cap or a linear system could not be
// solved to tolerance.
class NumericFailure : public Error {
 public:
  explicit NumericFailure(const std::string& what) : Error(what) {}
};

// A candidate enumeration exceeded the configured size guard.
class ComplexityLimit : public Error {
 public:
  explicit ComplexityLimit(const std::string& what) : Error(what) {}
};

// Signal impossible for the requested type: 1^t D_theta q = 0.
class ZeroMass : public Error {
 public:
  explicit ZeroMass(const std::string& what) : Error(what) {}
};

// The prior vanishes on a support coordinate, so the ray decomposition
// through the prior is undefined.
class DegeneratePrior : public Error {
 public:
  explicit DegeneratePrior(const std::string& what) : Error(what) {}
};

class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& what) : Error(what) {}
};

// rank(mu) < |Theta|: the full-surplus payment system has no solution.
class RankDeficient : public Error {
 public:
  explicit RankDeficient(const std::string& what) : Error(what) {}
};

// recover_transfers needs strictly slack constraints before blending.
class SlackRequired : public Error {
 public:
  explicit SlackRequired(const std::string& what) : Error(what) {}
};

// The mappings transform of a protocol tree only exists for independent mu.
class RequiresIndependence : public Error {
 public:
  explicit RequiresIndependence(const std::string& what) : Error(what) {}
};

// A strategy left a reachable decision node uncovered during evaluation.
class MissingDecision : public Error {
 public:
  explicit MissingDecision(const std::string& what) : Error(what) {}
};

// A perturbed joint distribution left the probability simplex.
class InvalidPerturbation : public Error {
 public:
  explicit InvalidPerturbation(const std::string& what) : Error(what) {}
};

}  // namespace infomech

#endif  // INFOMECH_ERRORS_HPP
