#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bandlab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

// Error hierarchy. Every failure the library reports derives from Error so
// callers that only care about "this trial failed" can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error { using Error::Error; };
class DegenerateProfile : public Error { using Error::Error; };
class SingularOperator : public Error { using Error::Error; };
class SpectrumProximity : public Error { using Error::Error; };
class BranchAmbiguity : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class DecompositionFailure : public Error { using Error::Error; };
class EmptyInput : public Error { using Error::Error; };
class UsageError : public Error { using Error::Error; };
class HypothesisError : public UsageError { using UsageError::UsageError; };
class IoError : public Error { using Error::Error; };

}  // namespace bandlab
