#ifndef SODA_ERRORS_HPP
#define SODA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace soda {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration value (sample rate, split spec, epochs, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed on-disk artifact (IQ file, model file, feature file).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input dimensions do not match what the operation expects.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Value cannot be represented in the target field.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Frame checksum mismatch; carries both checksums.
class ParityError : public Error {
public:
    ParityError(uint32_t computed, uint32_t stored)
        : Error("parity mismatch: computed 0x" + to_hex6(computed) +
                ", stored 0x" + to_hex6(stored)),
          computed_(computed), stored_(stored) {}
    uint32_t computed() const { return computed_; }
    uint32_t stored() const { return stored_; }

private:
    static std::string to_hex6(uint32_t v);
    uint32_t computed_;
    uint32_t stored_;
};

/// Frame carries a downlink format other than 17.
class UnsupportedFormat : public Error {
public:
    using Error::Error;
};

/// Signal has no energy where some is required.
class DegenerateSignal : public Error {
public:
    using Error::Error;
};

/// Metric denominator is empty (no positives or no negatives).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// Claimed ICAO address is not part of the trained class index.
class UnknownAircraft : public Error {
public:
    using Error::Error;
};

}  // namespace soda

#endif
