#include "fedvar/objective.hpp"

#include <algorithm>
#include <cmath>

namespace fedvar {

namespace {

double huber1(double u) {
    const double a = std::abs(u);
    return a < 1.0 ? 0.5 * u * u : a - 0.5;
}

double huber1_grad(double u) { return std::clamp(u, -1.0, 1.0); }

// ln(1 + e^u) without overflow for large u.
double softplus1(double u) {
    if (u > 30.0) return u + std::log1p(std::exp(-u));
    return std::log1p(std::exp(u));
}

double logistic(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

double mean_smoothness(const std::vector<ObjectivePtr>& cs) {
    double s = 0.0;
    for (const auto& c : cs) s += c->smoothness();
    return s / static_cast<double>(cs.size());
}

// Mean of component infima lower-bounds the average; callers that need the
// true infimum certify it and pass f_inf explicitly.
double mean_f_inf(const std::vector<ObjectivePtr>& cs) {
    double s = 0.0;
    for (const auto& c : cs) s += c->f_inf();
    return s / static_cast<double>(cs.size());
}

}  // namespace

HuberObjective::HuberObjective(Point center)
    : Objective("huber", static_cast<int>(center.size()), 0.0, 1.0), center_(std::move(center)) {}

double HuberObjective::do_value(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += huber1(x[j] - center_[j]);
    return s;
}

void HuberObjective::do_gradient(std::span<const double> x, std::span<double> out) const {
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = huber1_grad(x[j] - center_[j]);
}

SoftplusObjective::SoftplusObjective(double shift, int dim)
    : Objective("softplus", dim, 0.0, 0.25), shift_(shift) {}

double SoftplusObjective::do_value(std::span<const double> x) const {
    double s = 0.0;
    for (double xj : x) s += softplus1(xj - shift_ + 1.0);
    return s;
}

void SoftplusObjective::do_gradient(std::span<const double> x, std::span<double> out) const {
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = logistic(x[j] - shift_ + 1.0);
}

QuadraticObjective::QuadraticObjective(double a, Point center)
    : Objective("quadratic", static_cast<int>(center.size()), 0.0, a, a),
      a_(a),
      center_(std::move(center)) {
    if (a_ <= 0.0) throw std::invalid_argument("quadratic curvature must be positive");
}

double QuadraticObjective::do_value(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double u = x[j] - center_[j];
        s += u * u;
    }
    return 0.5 * a_ * s;
}

void QuadraticObjective::do_gradient(std::span<const double> x, std::span<double> out) const {
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = a_ * (x[j] - center_[j]);
}

AverageObjective::AverageObjective(std::vector<ObjectivePtr> components,
                                   std::optional<double> f_inf)
    : Objective("average", components.front()->dimension(),
                f_inf.value_or(mean_f_inf(components)), mean_smoothness(components)),
      components_(std::move(components)) {}

double AverageObjective::do_value(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& c : components_) s += c->value(x);
    return s / static_cast<double>(components_.size());
}

void AverageObjective::do_gradient(std::span<const double> x, std::span<double> out) const {
    fill(out, 0.0);
    Point g(out.size());
    const double w = 1.0 / static_cast<double>(components_.size());
    for (const auto& c : components_) {
        c->gradient(x, std::span<double>(g));
        axpy(w, std::span<const double>(g), out);
    }
}

AffineObjective::AffineObjective(ObjectivePtr inner, double scale, double offset)
    : Objective("affine", inner->dimension(), scale * inner->f_inf() + offset,
                scale * inner->smoothness(),
                inner->pl_constant() ? std::optional<double>(scale * *inner->pl_constant())
                                     : std::nullopt),
      inner_(std::move(inner)),
      scale_(scale),
      offset_(offset) {
    if (scale_ <= 0.0) throw std::invalid_argument("affine scale must be positive");
}

double AffineObjective::do_value(std::span<const double> x) const {
    return scale_ * inner_->value(x) + offset_;
}

void AffineObjective::do_gradient(std::span<const double> x, std::span<double> out) const {
    inner_->gradient(x, out);
    for (auto& v : out) v *= scale_;
}

ObjectivePtr make_huber(Point center) {
    return std::make_shared<HuberObjective>(std::move(center));
}

ObjectivePtr make_softplus(double shift, int dim) {
    return std::make_shared<SoftplusObjective>(shift, dim);
}

ObjectivePtr make_quadratic(double a, Point center) {
    return std::make_shared<QuadraticObjective>(a, std::move(center));
}

ObjectivePtr make_average(std::vector<ObjectivePtr> components, std::optional<double> f_inf) {
    if (components.empty()) throw std::invalid_argument("average of zero objectives");
    const int dim = components.front()->dimension();
    for (const auto& c : components)
        if (c->dimension() != dim)
            throw std::invalid_argument("average components must share dimension");
    return std::make_shared<AverageObjective>(std::move(components), f_inf);
}

ObjectivePtr make_affine(ObjectivePtr inner, double scale, double offset) {
    if (!inner) throw std::invalid_argument("affine of null objective");
    return std::make_shared<AffineObjective>(std::move(inner), scale, offset);
}

}  // namespace fedvar
