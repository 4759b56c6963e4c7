#pragma once

#include <stdexcept>
#include <string>

namespace texgeo {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TEXGEO_DEFINE_ERROR(Name, Base)    \
  class Name : public Base {               \
   public:                                 \
    using Base::Base;                      \
  };

// Numerics
TEXGEO_DEFINE_ERROR(DomainError, Error)
TEXGEO_DEFINE_ERROR(ConvergenceError, Error)
TEXGEO_DEFINE_ERROR(NoConvergence, ConvergenceError)
TEXGEO_DEFINE_ERROR(DegenerateSample, Error)
TEXGEO_DEFINE_ERROR(SingularMetric, Error)
TEXGEO_DEFINE_ERROR(LeftDomain, Error)
TEXGEO_DEFINE_ERROR(QuadratureFailure, Error)

// Graphs and signatures
TEXGEO_DEFINE_ERROR(StructureMismatch, Error)
TEXGEO_DEFINE_ERROR(NegativeCycle, Error)

// Images and features
TEXGEO_DEFINE_ERROR(IoError, Error)
TEXGEO_DEFINE_ERROR(DecodeError, Error)
TEXGEO_DEFINE_ERROR(UnsupportedFormat, Error)
TEXGEO_DEFINE_ERROR(ImageTooSmall, Error)
TEXGEO_DEFINE_ERROR(DegenerateSubband, Error)

// Datasets and persistence
TEXGEO_DEFINE_ERROR(EmptyDataset, Error)
TEXGEO_DEFINE_ERROR(MissingSignatures, Error)
TEXGEO_DEFINE_ERROR(VersionMismatch, Error)
TEXGEO_DEFINE_ERROR(CorruptFile, Error)
TEXGEO_DEFINE_ERROR(ConfigError, Error)

#undef TEXGEO_DEFINE_ERROR

}  // namespace texgeo
