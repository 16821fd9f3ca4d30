#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace dsparse {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// Raised for malformed configuration or topology input. `path` names the
/// offending field (e.g. "graph.edges[3]") when known.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what, std::string path = {})
        : std::invalid_argument(path.empty() ? what : path + ": " + what),
          path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Raised when a linear solve or factorization breaks down.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::ptrdiff_t sensor = -1,
                   double condition = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), sensor_(sensor), condition_(condition) {}

    std::ptrdiff_t sensor() const noexcept { return sensor_; }
    double condition() const noexcept { return condition_; }

private:
    std::ptrdiff_t sensor_;
    double condition_;
};

/// Smallest and largest eigenvalue of a symmetric matrix.
template <class Scalar>
struct Spectrum {
    Scalar min;
    Scalar max;
};

template <class Derived>
Spectrum<typename Derived::Scalar> extreme_eigenvalues(const Eigen::MatrixBase<Derived>& sym)
{
    using Scalar = typename Derived::Scalar;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

template <class Derived>
typename Derived::Scalar lambda_min(const Eigen::MatrixBase<Derived>& sym)
{
    return extreme_eigenvalues(sym).min;
}

template <class Derived>
typename Derived::Scalar lambda_max(const Eigen::MatrixBase<Derived>& sym)
{
    return extreme_eigenvalues(sym).max;
}

} // namespace dsparse
