#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace msd {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define MSD_ERROR(Name)                        \
  class Name : public Error {                  \
  public:                                      \
    using Error::Error;                        \
  }

MSD_ERROR(SingularMatrix);
MSD_ERROR(SingularKey);
MSD_ERROR(NonPowerOfTwo);
MSD_ERROR(NotOrthogonal);
MSD_ERROR(AmbiguousOrder);
MSD_ERROR(Infeasible);
MSD_ERROR(ExhaustedRetries);
MSD_ERROR(DimensionMismatch);
MSD_ERROR(InfeasibleXi);
MSD_ERROR(NotAdmissible);
MSD_ERROR(LengthMismatch);
MSD_ERROR(InvalidQ);
MSD_ERROR(EmptyCandidateSet);
MSD_ERROR(FormatError);

#undef MSD_ERROR

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class SpaceTooLarge : public Error {
public:
  SpaceTooLarge(double cardinality, double cap)
      : Error("search space has " + std::to_string(static_cast<long double>(cardinality)) +
              " candidates, above the cap of " + std::to_string(static_cast<long double>(cap))),
        cardinality_(cardinality) {}
  double cardinality() const { return cardinality_; }

private:
  double cardinality_;
};

}  // namespace msd
