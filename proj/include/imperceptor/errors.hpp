#pragma once

#include <stdexcept>
#include <string>

namespace imperceptor {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tensor/layer/image dimension disagreements.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Missing files, unwritable directories, short reads.
class IoError : public Error {
public:
    using Error::Error;
};

// Parsable bytes that do not match the expected file format (PPM, CSV).
class FormatError : public Error {
public:
    using Error::Error;
};

// Manifest-level problems: non-contiguous identity ids, missing splits.
class ManifestError : public Error {
public:
    using Error::Error;
};

// Invalid parameter values (labels out of range, bad configs).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Weight-file load failures keep the failure kind for targeted handling.
class WeightFileError : public Error {
public:
    enum class Kind { bad_magic, bad_version, truncated, bad_checksum };

    WeightFileError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Loss went non-finite during training; carries where it happened.
class TrainingDivergedError : public Error {
public:
    TrainingDivergedError(int epoch, int batch, const std::string& msg)
        : Error(msg), epoch_(epoch), batch_(batch) {}
    int epoch() const { return epoch_; }
    int batch() const { return batch_; }

private:
    int epoch_;
    int batch_;
};

}  // namespace imperceptor
