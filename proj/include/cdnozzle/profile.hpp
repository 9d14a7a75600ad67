#pragma once

#include <vector>

namespace cdnozzle {

// f(x) = sum_k c_k t^k with t = (x - origin) / scale
class Profile {
public:
    Profile() = default;
    explicit Profile(std::vector<double> coeffs, double origin = 0.0, double scale = 1.0);

    static Profile constant(double value, double origin = 0.0, double scale = 1.0);

    double value(double x) const { return derivative(x, 0); }
    double operator()(double x) const { return derivative(x, 0); }
    double derivative(double x, int order) const;

    // highest derivative order that is not identically zero
    int degree() const;
    bool is_constant() const { return degree() <= 0; }

    const std::vector<double>& coeffs() const { return c_; }
    double origin() const { return origin_; }
    double scale() const { return scale_; }

    Profile operator+(const Profile& other) const;
    Profile operator-(const Profile& other) const;
    Profile operator*(double s) const;

    // x -> f(-x)
    Profile reflected() const;

private:
    std::vector<double> c_{0.0};
    double origin_ = 0.0;
    double scale_ = 1.0;
};

}  // namespace cdnozzle
