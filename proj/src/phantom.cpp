#include "ghostproj/image.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ghostproj {

namespace {

void stamp_square(Image& img, int i0, int j0, int size, double value)
{
    for (int i = i0; i < i0 + size && i < img.rows(); ++i)
        for (int j = j0; j < j0 + size && j < img.cols(); ++j)
            img(i, j) = value;
}

} // namespace

Image phantom(int rows, int cols)
{
    if (rows < 8 || cols < 8)
        throw std::invalid_argument("phantom: needs at least 8x8 pixels");

    Image img(rows, cols, 0.5);
    const int hr = rows / 2;
    const int hc = cols / 2;

    // Upper-left: dots of 1..4 px, peaks above and troughs below background.
    {
        int i = 1, j = 1;
        for (int size = 1; size <= 4; ++size) {
            if (i + size >= hr)
                break;
            stamp_square(img, i, j, size, 1.0);
            if (j + 2 * size + 2 < hc)
                stamp_square(img, i, j + size + 2, size, 0.0);
            i += size + 2;
        }
    }

    // Lower-left: high-contrast bands with shrinking pitch.
    {
        int pitch = 4;
        int i = hr;
        while (i < rows && pitch >= 1) {
            for (int di = 0; di < pitch && i < rows; ++di, ++i)
                for (int j = 0; j < hc; ++j)
                    img(i, j) = ((j / pitch) % 2 == 0) ? 1.0 : 0.0;
            --pitch;
        }
    }

    // Upper-right: two linear gradients, one rising and one falling.
    for (int i = 0; i < hr; ++i)
        for (int j = hc; j < cols; ++j) {
            const double t = static_cast<double>(j - hc) / std::max(1, cols - hc - 1);
            img(i, j) = (i < hr / 2) ? t : 1.0 - t;
        }

    // Lower-right: sinusoid.
    for (int i = hr; i < rows; ++i)
        for (int j = hc; j < cols; ++j) {
            const double u = 2.0 * M_PI * (j - hc) / std::max(1, cols - hc);
            const double v = 2.0 * M_PI * (i - hr) / std::max(1, rows - hr);
            img(i, j) = 0.5 + 0.5 * std::sin(u) * std::cos(v);
        }

    return img;
}

Image phantom(int rows, int cols, const std::string& contrast_mode)
{
    Image base = phantom(rows, cols);
    if (contrast_mode.empty() || contrast_mode == "raw")
        return base;
    if (contrast_mode == "zero-centered")
        return base.zero_centered_copy();
    if (contrast_mode.rfind("moments:", 0) == 0) {
        std::istringstream ss(contrast_mode.substr(8));
        double mean = 0.0, e2 = 0.0;
        char sep = 0;
        if (!(ss >> mean >> sep >> e2) || sep != ':')
            throw std::invalid_argument("phantom: bad moments spec '" + contrast_mode + "'");
        return base.rescaled(mean, e2);
    }
    throw std::invalid_argument("phantom: unknown contrast mode '" + contrast_mode + "'");
}

} // namespace ghostproj
