#ifndef WLAB_ERRORS_HPP
#define WLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wlab {

/// Base class for all failures raised by the library.
struct LabError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grid does not satisfy the sampling requirements (even, >= 8 per axis).
struct GridError : LabError {
    using LabError::LabError;
};

/// The induced metric degenerates (det g below threshold) at some node.
struct DegenerateImmersion : LabError {
    using LabError::LabError;
};

/// A point passed through (or too close to) the pole of a conformal map.
struct PoleSingularity : LabError {
    using LabError::LabError;
};

/// Sobolev order outside the supported set {-1, 0, 1, 2}.
struct UnsupportedOrder : LabError {
    using LabError::LabError;
};

/// Right-hand side has mass in Ker(laplacian + 2); the solve is obstructed.
struct KernelObstruction : LabError {
    using LabError::LabError;
};

/// Surface is not graph-like over the reference torus.
struct NotGraphLike : LabError {
    using LabError::LabError;
};

/// Cross-covariance of the alignment problem is numerically singular.
struct SingularCovariance : LabError {
    using LabError::LabError;
};

/// Point cloud is rank-deficient; no unique hyperplane fit exists.
struct DegenerateCloud : LabError {
    using LabError::LabError;
};

/// Point cloud is empty.
struct EmptyCloud : LabError {
    using LabError::LabError;
};

/// Experiment configuration is invalid; message carries field diagnostics.
struct ConfigError : LabError {
    using LabError::LabError;
};

} // namespace wlab

#endif
