#pragma once

#include <string>
#include <vector>

namespace ghostproj {

/// A desired image expressed as a dimensionless transmission coefficient,
/// with its spatial moments cached.
class Image {
public:
    Image() = default;
    Image(int rows, int cols, std::vector<double> values);
    Image(int rows, int cols, double fill = 0.0);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    long pixels() const noexcept { return static_cast<long>(rows_) * cols_; }

    double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * cols_ + j]; }
    double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<double>& values() const noexcept { return v_; }
    std::vector<double>& values() noexcept { return v_; }

    double mean() const;
    double second_moment() const;
    bool zero_centered() const; // |E[I]| < 1e-12

    /// Affine rescale so the result has exactly the requested mean and
    /// second moment. Fails if the image is constant and a non-trivial
    /// variance is requested.
    Image rescaled(double target_mean, double target_second_moment) const;
    Image zero_centered_copy() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> v_;
};

/// Stack of c image channels sharing one geometry.
class ColorImage {
public:
    explicit ColorImage(std::vector<Image> channels);

    int channels() const noexcept { return static_cast<int>(ch_.size()); }
    const Image& channel(int c) const { return ch_.at(static_cast<size_t>(c)); }
    int rows() const { return ch_.front().rows(); }
    int cols() const { return ch_.front().cols(); }

    /// Channel-pooled moments.
    double mean() const;
    double second_moment() const;

private:
    std::vector<Image> ch_;
};

/// Deterministic 4-quadrant test pattern: dots of 1-4 px (peaks and
/// troughs), high-contrast bands of shrinking pitch, two linear gradients
/// and a sinusoid. Raw values lie in [0, 1]; rescale afterwards for a
/// specific contrast.
Image phantom(int rows, int cols);

/// contrast_mode: "raw", "zero-centered", or "moments:<mean>:<e2>" which
/// rescales to the given mean / second moment.
Image phantom(int rows, int cols, const std::string& contrast_mode);

} // namespace ghostproj
