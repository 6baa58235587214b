#ifndef HETERO_ERRORS_HPP
#define HETERO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hetero {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// CSV / ingestion
class MissingColumn : public Error { public: using Error::Error; };
class MalformedCsv : public Error { public: using Error::Error; };
class EmptyPanel : public Error { public: using Error::Error; };

// preprocessing
class RateNotFound : public Error { public: using Error::Error; };

// zonotope
class SubsetCapExceeded : public Error { public: using Error::Error; };
class ZeroDiagonal : public Error { public: using Error::Error; };
class InvalidRange : public Error { public: using Error::Error; };

// entropy
class EmptyCluster : public Error { public: using Error::Error; };

// ME regression
class OutOfDomain : public Error { public: using Error::Error; };
class SingularJacobian : public Error { public: using Error::Error; };
class NotConverged : public Error { public: using Error::Error; };
class DegenerateVariance : public Error { public: using Error::Error; };

// I/O
class IoFailure : public Error { public: using Error::Error; };

} // namespace hetero

#endif // HETERO_ERRORS_HPP
