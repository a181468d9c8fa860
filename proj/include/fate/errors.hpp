#pragma once

#include <stdexcept>
#include <string>

namespace fate {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FATE_DEFINE_ERROR(NAME)                                                \
    class NAME : public Error {                                                \
    public:                                                                    \
        using Error::Error;                                                    \
    }

FATE_DEFINE_ERROR(SchemaError);
FATE_DEFINE_ERROR(EmptyDatasetError);
FATE_DEFINE_ERROR(ParseError);
FATE_DEFINE_ERROR(InvalidFoldError);
FATE_DEFINE_ERROR(DegenerateGroupError);
FATE_DEFINE_ERROR(SingleClassError);
FATE_DEFINE_ERROR(NumericError);
FATE_DEFINE_ERROR(ShapeError);
FATE_DEFINE_ERROR(UndefinedMetricError);
FATE_DEFINE_ERROR(InvalidSampleError);
FATE_DEFINE_ERROR(ConfigError);

#undef FATE_DEFINE_ERROR

// Raised when a pipeline step fails; carries the zero-based step index.
class PipelineStepError : public Error {
public:
    PipelineStepError(int step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

    int step() const { return step_; }

private:
    int step_;
};

}  // namespace fate
