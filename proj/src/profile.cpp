#include "cdnozzle/profile.hpp"

#include <algorithm>
#include <stdexcept>

namespace cdnozzle {

Profile::Profile(std::vector<double> coeffs, double origin, double scale)
    : c_(std::move(coeffs)), origin_(origin), scale_(scale)
{
    if (c_.empty())
        c_.push_back(0.0);
    if (!(scale_ > 0.0))
        throw std::invalid_argument("Profile: scale must be positive");
}

Profile Profile::constant(double value, double origin, double scale)
{
    return Profile({value}, origin, scale);
}

double Profile::derivative(double x, int order) const
{
    const int n = static_cast<int>(c_.size());
    if (order >= n)
        return 0.0;
    const double t = (x - origin_) / scale_;
    // Horner on the order-th derivative coefficients
    double acc = 0.0;
    for (int k = n - 1; k >= order; --k) {
        double f = c_[k];
        for (int l = 0; l < order; ++l)
            f *= (k - l);
        acc = acc * t + f;
    }
    for (int l = 0; l < order; ++l)
        acc /= scale_;
    return acc;
}

int Profile::degree() const
{
    for (int k = static_cast<int>(c_.size()) - 1; k > 0; --k)
        if (c_[k] != 0.0)
            return k;
    return 0;
}

Profile Profile::operator+(const Profile& other) const
{
    if (other.origin_ != origin_ || other.scale_ != scale_)
        throw std::invalid_argument("Profile: mismatched variables");
    std::vector<double> c(std::max(c_.size(), other.c_.size()), 0.0);
    for (size_t k = 0; k < c_.size(); ++k)
        c[k] += c_[k];
    for (size_t k = 0; k < other.c_.size(); ++k)
        c[k] += other.c_[k];
    return Profile(std::move(c), origin_, scale_);
}

Profile Profile::operator-(const Profile& other) const
{
    return *this + other * -1.0;
}

Profile Profile::operator*(double s) const
{
    std::vector<double> c = c_;
    for (double& v : c)
        v *= s;
    return Profile(std::move(c), origin_, scale_);
}

Profile Profile::reflected() const
{
    std::vector<double> c = c_;
    for (size_t k = 1; k < c.size(); k += 2)
        c[k] = -c[k];
    return Profile(std::move(c), -origin_, scale_);
}

}  // namespace cdnozzle
