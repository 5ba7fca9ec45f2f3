#include "ghostproj/image.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ghostproj {

Image::Image(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), v_(std::move(values))
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("Image: dimensions must be >= 1");
    if (v_.size() != static_cast<size_t>(rows) * cols)
        throw std::invalid_argument("Image: value count does not match dimensions");
}

Image::Image(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill)
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("Image: dimensions must be >= 1");
}

double Image::mean() const
{
    double s = 0.0;
    for (double x : v_)
        s += x;
    return s / static_cast<double>(v_.size());
}

double Image::second_moment() const
{
    double s = 0.0;
    for (double x : v_)
        s += x * x;
    return s / static_cast<double>(v_.size());
}

bool Image::zero_centered() const
{
    return std::fabs(mean()) < 1e-12;
}

Image Image::rescaled(double target_mean, double target_second_moment) const
{
    const double m = mean();
    const double e2 = second_moment();
    const double var = e2 - m * m;
    const double target_var = target_second_moment - target_mean * target_mean;
    if (target_var < 0.0)
        throw std::invalid_argument("rescaled: E[I^2] < E[I]^2 is impossible");
    // var is computed as a difference of near-equal sums, so a constant
    // image can show a tiny nonzero value; test it relative to E[I^2].
    const bool constant = var <= 1e-12 * std::max(e2, 1e-300);
    if (constant && target_var > 0.0)
        throw std::invalid_argument("rescaled: constant image cannot gain variance");
    const double a = constant ? 0.0 : std::sqrt(std::max(target_var, 0.0) / var);
    std::vector<double> out(v_.size());
    for (size_t i = 0; i < v_.size(); ++i)
        out[i] = target_mean + a * (v_[i] - m);
    return Image(rows_, cols_, std::move(out));
}

Image Image::zero_centered_copy() const
{
    const double m = mean();
    std::vector<double> out(v_.size());
    for (size_t i = 0; i < v_.size(); ++i)
        out[i] = v_[i] - m;
    return Image(rows_, cols_, std::move(out));
}

ColorImage::ColorImage(std::vector<Image> channels) : ch_(std::move(channels))
{
    if (ch_.empty())
        throw std::invalid_argument("ColorImage: needs at least one channel");
    for (const auto& c : ch_)
        if (c.rows() != ch_.front().rows() || c.cols() != ch_.front().cols())
            throw std::invalid_argument("ColorImage: channels must share dimensions");
}

double ColorImage::mean() const
{
    double s = 0.0;
    for (const auto& c : ch_)
        s += c.mean();
    return s / channels();
}

double ColorImage::second_moment() const
{
    double s = 0.0;
    for (const auto& c : ch_)
        s += c.second_moment();
    return s / channels();
}

} // namespace ghostproj
