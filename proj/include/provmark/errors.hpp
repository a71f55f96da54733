#pragma once

#include <stdexcept>
#include <string>

namespace provmark {

/// Base class for all errors raised by the toolkit. The `code()` string is
/// stable and machine-checkable; `what()` adds context.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define PROVMARK_DEFINE_ERROR(Name)                              \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& message)                \
            : Error(#Name, message) {}                           \
    }

PROVMARK_DEFINE_ERROR(EmptyFeatureSet);
PROVMARK_DEFINE_ERROR(DuplicateFeatureName);
PROVMARK_DEFINE_ERROR(KeyTooShort);
PROVMARK_DEFINE_ERROR(LengthMismatch);
PROVMARK_DEFINE_ERROR(UnsupportedChannelCount);
PROVMARK_DEFINE_ERROR(ImageTooSmall);
PROVMARK_DEFINE_ERROR(ShapeMismatch);
PROVMARK_DEFINE_ERROR(WindowTooLarge);
PROVMARK_DEFINE_ERROR(ZeroMeanChannel);
PROVMARK_DEFINE_ERROR(CapacityExceeded);
PROVMARK_DEFINE_ERROR(NotRGB);
PROVMARK_DEFINE_ERROR(DimensionsTooSmall);
PROVMARK_DEFINE_ERROR(NonPositiveEntry);
PROVMARK_DEFINE_ERROR(SignatureTooShort);
PROVMARK_DEFINE_ERROR(DuplicateDevice);
PROVMARK_DEFINE_ERROR(StorageFailure);
PROVMARK_DEFINE_ERROR(CorruptRecord);
PROVMARK_DEFINE_ERROR(IoFailure);
PROVMARK_DEFINE_ERROR(PolicyViolation);
PROVMARK_DEFINE_ERROR(BadHexString);
PROVMARK_DEFINE_ERROR(UnsupportedImageFormat);
PROVMARK_DEFINE_ERROR(BadFeatureDocument);
PROVMARK_DEFINE_ERROR(BadMatrixFile);

#undef PROVMARK_DEFINE_ERROR

} // namespace provmark
