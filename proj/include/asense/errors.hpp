#pragma once

#include <stdexcept>
#include <string>

namespace asense {

// Base class for all library errors. Subcommands map these to exit code 1.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define ASENSE_DEFINE_ERROR(NAME)                                    \
  class NAME : public Error {                                        \
  public:                                                            \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
  }

// signal_gen
ASENSE_DEFINE_ERROR(InvalidSpec);
ASENSE_DEFINE_ERROR(InvalidBand);
ASENSE_DEFINE_ERROR(InvalidFraction);

// virtual_actuator
ASENSE_DEFINE_ERROR(RateMismatch);
ASENSE_DEFINE_ERROR(UnstableFilter);
ASENSE_DEFINE_ERROR(InvalidState);
ASENSE_DEFINE_ERROR(ExternalTooShort);

// features
ASENSE_DEFINE_ERROR(MixedSampleRates);
ASENSE_DEFINE_ERROR(TargetTooLong);
ASENSE_DEFINE_ERROR(TooShort);

// models
ASENSE_DEFINE_ERROR(EmptyData);
ASENSE_DEFINE_ERROR(KTooLarge);
ASENSE_DEFINE_ERROR(WrongTargetType);
ASENSE_DEFINE_ERROR(DimMismatch);
ASENSE_DEFINE_ERROR(SingleClass);
ASENSE_DEFINE_ERROR(TooFewPerClass);

// eval
ASENSE_DEFINE_ERROR(ClassTooSmall);
ASENSE_DEFINE_ERROR(MissingTarget);

// dataset_io
ASENSE_DEFINE_ERROR(IoFailure);
ASENSE_DEFINE_ERROR(UnsupportedRate);
ASENSE_DEFINE_ERROR(MissingAudio);
ASENSE_DEFINE_ERROR(SchemaMismatch);
ASENSE_DEFINE_ERROR(CorruptAudio);

#undef ASENSE_DEFINE_ERROR

}  // namespace asense
