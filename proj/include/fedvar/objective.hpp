#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedvar/vecops.hpp"

namespace fedvar {

// Differentiable objective with a known infimum and smoothness constant.
// Immutable after construction; safe to evaluate concurrently.
class Objective {
public:
    virtual ~Objective() = default;

    double value(std::span<const double> x) const {
        check_dim(x.size());
        return do_value(x);
    }
    void gradient(std::span<const double> x, std::span<double> out) const {
        check_dim(x.size());
        check_dim(out.size());
        do_gradient(x, out);
    }

    double value(const Point& x) const { return value(std::span<const double>(x)); }
    Point gradient(const Point& x) const {
        Point g(x.size());
        gradient(std::span<const double>(x), std::span<double>(g));
        return g;
    }

    int dimension() const { return dim_; }
    double f_inf() const { return f_inf_; }
    double smoothness() const { return smoothness_; }
    std::optional<double> pl_constant() const { return pl_; }
    const std::string& kind() const { return kind_; }

protected:
    Objective(std::string kind, int dim, double f_inf, double smoothness,
              std::optional<double> pl = std::nullopt)
        : kind_(std::move(kind)), dim_(dim), f_inf_(f_inf), smoothness_(smoothness), pl_(pl) {
        if (dim_ < 1) throw std::invalid_argument("objective dimension must be >= 1");
    }

    virtual double do_value(std::span<const double> x) const = 0;
    virtual void do_gradient(std::span<const double> x, std::span<double> out) const = 0;

private:
    void check_dim(std::size_t got) const {
        if (static_cast<int>(got) != dim_)
            throw std::invalid_argument("dimension mismatch: objective '" + kind_ + "' expects " +
                                        std::to_string(dim_) + ", got " + std::to_string(got));
    }

    std::string kind_;
    int dim_;
    double f_inf_;
    double smoothness_;
    std::optional<double> pl_;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

// Coordinate-wise Huber loss around `center`: u^2/2 inside the unit radius,
// |u| - 1/2 outside. C^1 everywhere, L = 1, infimum 0 at the center.
class HuberObjective final : public Objective {
public:
    explicit HuberObjective(Point center);
    const Point& center() const { return center_; }

protected:
    double do_value(std::span<const double> x) const override;
    void do_gradient(std::span<const double> x, std::span<double> out) const override;

private:
    Point center_;
};

// Coordinate-wise softplus ln(1 + e^u) with u = x_j - shift + 1; the paper's
// agent family f_i uses shift = i. Infimum 0 (not attained), L = 1/4.
class SoftplusObjective final : public Objective {
public:
    SoftplusObjective(double shift, int dim);
    double shift() const { return shift_; }

protected:
    double do_value(std::span<const double> x) const override;
    void do_gradient(std::span<const double> x, std::span<double> out) const override;

private:
    double shift_;
};

// (a/2) * ||x - center||^2 with a > 0; L = a, PL constant a.
// f(x) = x^2 is QuadraticObjective(2.0, {0.0}).
class QuadraticObjective final : public Objective {
public:
    QuadraticObjective(double a, Point center);
    double curvature() const { return a_; }
    const Point& center() const { return center_; }

protected:
    double do_value(std::span<const double> x) const override;
    void do_gradient(std::span<const double> x, std::span<double> out) const override;

private:
    double a_;
    Point center_;
};

// Equal-weight average (1/m) * sum f_j. Smoothness is the mean of component
// constants (valid for an average). The infimum is not derivable from the
// components; pass it if known, otherwise certify it separately.
class AverageObjective final : public Objective {
public:
    AverageObjective(std::vector<ObjectivePtr> components, std::optional<double> f_inf);
    const std::vector<ObjectivePtr>& components() const { return components_; }

protected:
    double do_value(std::span<const double> x) const override;
    void do_gradient(std::span<const double> x, std::span<double> out) const override;

private:
    std::vector<ObjectivePtr> components_;
};

// scale * f(x) + offset with scale > 0.
class AffineObjective final : public Objective {
public:
    AffineObjective(ObjectivePtr inner, double scale, double offset);
    const Objective& inner() const { return *inner_; }

protected:
    double do_value(std::span<const double> x) const override;
    void do_gradient(std::span<const double> x, std::span<double> out) const override;

private:
    ObjectivePtr inner_;
    double scale_;
    double offset_;
};

ObjectivePtr make_huber(Point center);
ObjectivePtr make_softplus(double shift, int dim = 1);
ObjectivePtr make_quadratic(double a, Point center);
ObjectivePtr make_average(std::vector<ObjectivePtr> components,
                          std::optional<double> f_inf = std::nullopt);
ObjectivePtr make_affine(ObjectivePtr inner, double scale, double offset);

}  // namespace fedvar
