#pragma once

#include <stdexcept>
#include <string>

namespace nthdigit {

/// Two moduli (or a value and its modulus) share a factor where the
/// algorithm needs them coprime. Always a caller bug or a bad factor list.
class NotCoprime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A modulus reached 2^96, the widest lane the residue kernel supports.
class ModulusOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class UnknownConstant : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace nthdigit
