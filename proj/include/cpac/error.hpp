// SPDX-License-Identifier: Apache-2.0
//
// Error types shared by every cpac module.

#pragma once

#include <stdexcept>
#include <string>

namespace cpac {

/// Base class of every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable kind, used by the CLI error record.
  virtual const char* kind() const noexcept { return "Error"; }
};

#define CPAC_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return #Name; }   \
  }

// A refinement loop hit its precision cap without resolving.
CPAC_DEFINE_ERROR(PrecisionExhausted);
// An extended-real approximant sequence satisfies neither disjunct.
CPAC_DEFINE_ERROR(InvalidPresentation);
CPAC_DEFINE_ERROR(DuplicateElement);
// A program used as an index point did not halt within the step budget.
CPAC_DEFINE_ERROR(IndexNotHalting);
CPAC_DEFINE_ERROR(NotRealizableWithinBudget);
CPAC_DEFINE_ERROR(BudgetExhaustedBeforeCount);
CPAC_DEFINE_ERROR(EnumerationTooShort);
CPAC_DEFINE_ERROR(NonpositiveBound);
CPAC_DEFINE_ERROR(WitnessViolation);
CPAC_DEFINE_ERROR(CoverGap);
CPAC_DEFINE_ERROR(ConfigError);

#undef CPAC_DEFINE_ERROR

}  // namespace cpac
