#include "fedvar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fedvar {

namespace {

class ExactOracle final : public GradientOracle {
public:
    ExactOracle(ObjectivePtr obj, std::optional<AbcClaim> claim)
        : GradientOracle(std::move(obj), "exact", claim) {}

    void sample(std::span<const double> x, std::span<double> g,
                const NoiseStream&) const override {
        objective().gradient(x, g);
    }
    bool finite_support() const override { return true; }
    std::vector<SupportAtom> support(std::span<const double> x) const override {
        Point g(x.size());
        objective().gradient(x, std::span<double>(g));
        return {{1.0, std::move(g)}};
    }
};

class SignPerturbationOracle final : public GradientOracle {
public:
    SignPerturbationOracle(ObjectivePtr obj, MagnitudeRule rule, Point center,
                           std::optional<AbcClaim> claim)
        : GradientOracle(std::move(obj), "sign_perturbation", claim),
          rule_(rule),
          center_(std::move(center)) {}

    double magnitude(std::span<const double> x) const {
        if (rule_ == MagnitudeRule::SqrtAbsDeviation) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double u = x[j] - center_[j];
                s += u * u;
            }
            return std::sqrt(std::sqrt(s));  // sqrt(||x - center||)
        }
        const double gap = std::max(objective().value(x) - objective().f_inf(), 0.0);
        return std::sqrt(gap);
    }

    void sample(std::span<const double> x, std::span<double> g,
                const NoiseStream& stream) const override {
        objective().gradient(x, g);
        const double m = magnitude(x);
        const double sign = stream.coin(0) ? -1.0 : 1.0;  // exactly one counter per draw
        const double per_coord = sign * m / std::sqrt(static_cast<double>(x.size()));
        for (auto& v : g) v += per_coord;
    }
    bool finite_support() const override { return true; }
    std::vector<SupportAtom> support(std::span<const double> x) const override {
        Point base(x.size());
        objective().gradient(x, std::span<double>(base));
        const double per_coord = magnitude(x) / std::sqrt(static_cast<double>(x.size()));
        Point plus = base;
        Point minus = base;
        for (std::size_t j = 0; j < base.size(); ++j) {
            plus[j] += per_coord;
            minus[j] -= per_coord;
        }
        return {{0.5, std::move(plus)}, {0.5, std::move(minus)}};
    }

private:
    MagnitudeRule rule_;
    Point center_;
};

class FiniteSumOracle final : public GradientOracle {
public:
    FiniteSumOracle(std::vector<ObjectivePtr> components, SamplingStrategy strategy, int batch,
                    std::optional<AbcClaim> claim)
        : GradientOracle(make_average(components),
                         strategy == SamplingStrategy::WithReplacement
                             ? "finite_sum_with_replacement"
                             : "finite_sum_without_replacement",
                         claim),
          components_(std::move(components)),
          strategy_(strategy),
          batch_(batch) {
        const int m = static_cast<int>(components_.size());
        if (batch_ < 1 || batch_ > m)
            throw std::invalid_argument("batch size must satisfy 1 <= b <= m");
    }

    void sample(std::span<const double> x, std::span<double> g,
                const NoiseStream& stream) const override {
        const int m = static_cast<int>(components_.size());
        fill(g, 0.0);
        Point work(g.size());
        const double w = 1.0 / static_cast<double>(batch_);
        if (strategy_ == SamplingStrategy::WithReplacement) {
            // counter values 0..b-1, one per index draw
            for (int k = 0; k < batch_; ++k) {
                const int j = std::min(m - 1, static_cast<int>(stream.uniform(k) * m));
                components_[j]->gradient(x, std::span<double>(work));
                axpy(w, std::span<const double>(work), g);
            }
        } else {
            // selection sampling; counter value j decides component j
            int needed = batch_;
            for (int j = 0; j < m && needed > 0; ++j) {
                const double p = static_cast<double>(needed) / static_cast<double>(m - j);
                if (stream.uniform(j) < p) {
                    components_[j]->gradient(x, std::span<double>(work));
                    axpy(w, std::span<const double>(work), g);
                    --needed;
                }
            }
        }
    }

    bool finite_support() const override { return true; }

    std::vector<SupportAtom> support(std::span<const double> x) const override {
        const int m = static_cast<int>(components_.size());
        std::vector<Point> grads(m, Point(x.size()));
        for (int j = 0; j < m; ++j) components_[j]->gradient(x, std::span<double>(grads[j]));

        std::vector<SupportAtom> atoms;
        const double w = 1.0 / static_cast<double>(batch_);
        if (strategy_ == SamplingStrategy::WithReplacement) {
            // all m^b ordered tuples, equally likely
            const double tuples = std::pow(static_cast<double>(m), batch_);
            if (tuples > 1e6) throw std::invalid_argument("support too large to enumerate");
            const auto count = static_cast<std::uint64_t>(tuples);
            const double prob = 1.0 / tuples;
            for (std::uint64_t t = 0; t < count; ++t) {
                Point g(x.size(), 0.0);
                std::uint64_t rem = t;
                for (int k = 0; k < batch_; ++k) {
                    const int j = static_cast<int>(rem % m);
                    rem /= m;
                    axpy(w, std::span<const double>(grads[j]), std::span<double>(g));
                }
                atoms.push_back({prob, std::move(g)});
            }
        } else {
            // all b-subsets, equally likely
            std::vector<int> comb(batch_);
            for (int k = 0; k < batch_; ++k) comb[k] = k;
            double subsets = 1.0;
            for (int k = 0; k < batch_; ++k) subsets = subsets * (m - k) / (k + 1);
            if (subsets > 1e6) throw std::invalid_argument("support too large to enumerate");
            const double prob = 1.0 / subsets;
            while (true) {
                Point g(x.size(), 0.0);
                for (int j : comb) axpy(w, std::span<const double>(grads[j]), std::span<double>(g));
                atoms.push_back({prob, std::move(g)});
                int k = batch_ - 1;
                while (k >= 0 && comb[k] == m - batch_ + k) --k;
                if (k < 0) break;
                ++comb[k];
                for (int l = k + 1; l < batch_; ++l) comb[l] = comb[l - 1] + 1;
            }
        }
        return atoms;
    }

private:
    std::vector<ObjectivePtr> components_;
    SamplingStrategy strategy_;
    int batch_;
};

class AdditiveGaussianOracle final : public GradientOracle {
public:
    AdditiveGaussianOracle(ObjectivePtr obj, double variance, std::optional<AbcClaim> claim)
        : GradientOracle(std::move(obj), "additive_gaussian", claim), variance_(variance) {
        if (variance_ < 0.0) throw std::invalid_argument("variance must be >= 0");
    }

    void sample(std::span<const double> x, std::span<double> g,
                const NoiseStream& stream) const override {
        objective().gradient(x, g);
        const double sd = std::sqrt(variance_);
        for (std::size_t j = 0; j < g.size(); ++j) g[j] += sd * stream.gaussian(j);
    }
    bool finite_support() const override { return false; }
    std::vector<SupportAtom> support(std::span<const double>) const override {
        throw std::invalid_argument(
            "additive_gaussian has no finite support; use the analytic formula "
            "E||g||^2 = ||grad f||^2 + dim * variance");
    }

private:
    double variance_;
};

}  // namespace

OraclePtr make_exact_oracle(ObjectivePtr obj, std::optional<AbcClaim> claim) {
    return std::make_shared<ExactOracle>(std::move(obj), claim);
}

OraclePtr make_sign_perturbation_oracle(ObjectivePtr obj, std::optional<MagnitudeRule> rule,
                                        std::optional<AbcClaim> claim) {
    const MagnitudeRule r = rule.value_or(obj->kind() == "huber" ? MagnitudeRule::SqrtAbsDeviation
                                                                 : MagnitudeRule::SqrtValueGap);
    Point center(obj->dimension(), 0.0);
    if (r == MagnitudeRule::SqrtAbsDeviation) {
        const auto* huber = dynamic_cast<const HuberObjective*>(obj.get());
        if (!huber)
            throw std::invalid_argument("sqrt_abs_deviation magnitude requires a huber objective");
        center = huber->center();
    }
    return std::make_shared<SignPerturbationOracle>(std::move(obj), r, std::move(center), claim);
}

OraclePtr make_finite_sum_oracle(std::vector<ObjectivePtr> components, SamplingStrategy strategy,
                                 int batch, std::optional<AbcClaim> claim) {
    if (components.empty()) throw std::invalid_argument("finite sum needs components");
    return std::make_shared<FiniteSumOracle>(std::move(components), strategy, batch, claim);
}

OraclePtr make_additive_gaussian_oracle(ObjectivePtr obj, double variance,
                                        std::optional<AbcClaim> claim) {
    return std::make_shared<AdditiveGaussianOracle>(std::move(obj), variance, claim);
}

double exact_second_moment(const GradientOracle& oracle, const Point& x) {
    const auto atoms = oracle.support(std::span<const double>(x));
    double s = 0.0;
    for (const auto& a : atoms) s += a.prob * norm_sq(std::span<const double>(a.grad));
    return s;
}

AbcReport verify_abc(const GradientOracle& oracle, double C, double D,
                     const std::vector<Point>& probe_points, int n_samples,
                     const NoiseStream& stream) {
    if (C < 0.0 || D < 0.0) throw std::invalid_argument("C and D must be >= 0");
    if (probe_points.empty()) throw std::invalid_argument("no probe points");
    const bool exact = oracle.finite_support();
    if (!exact && n_samples < 100)
        throw std::invalid_argument("sampled verification needs n_samples >= 100");

    AbcReport report;
    report.min_slack = std::numeric_limits<double>::infinity();
    const Objective& f = oracle.objective();
    for (std::size_t pi = 0; pi < probe_points.size(); ++pi) {
        const Point& x = probe_points[pi];
        const Point grad = f.gradient(x);
        const double bound = C * (f.value(x) - f.f_inf()) + D;
        double variance = 0.0;
        double margin = 0.0;
        if (exact) {
            for (const auto& a : oracle.support(std::span<const double>(x))) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < grad.size(); ++j) {
                    const double dv = a.grad[j] - grad[j];
                    d2 += dv * dv;
                }
                variance += a.prob * d2;
            }
        } else {
            // mean and standard error of ||g - grad f||^2 over n_samples draws
            double mean = 0.0;
            double m2 = 0.0;
            Point g(x.size());
            for (int k = 0; k < n_samples; ++k) {
                const NoiseStream draw =
                    stream.at_step(static_cast<std::uint64_t>(pi))
                        .at_trial(static_cast<std::uint64_t>(k));
                oracle.sample(std::span<const double>(x), std::span<double>(g), draw);
                double d2 = 0.0;
                for (std::size_t j = 0; j < g.size(); ++j) {
                    const double dv = g[j] - grad[j];
                    d2 += dv * dv;
                }
                const double delta = d2 - mean;
                mean += delta / (k + 1);
                m2 += delta * (d2 - mean);
            }
            variance = mean;
            const double sd = std::sqrt(m2 / std::max(1, n_samples - 1));
            margin = 4.0 * sd / std::sqrt(static_cast<double>(n_samples));
        }
        const bool pass = variance <= bound + margin;
        report.min_slack = std::min(report.min_slack, bound + margin - variance);
        report.pass = report.pass && pass;
        report.probes.push_back({x, variance, bound, margin, exact, pass});
    }
    return report;
}

UnbiasednessReport check_unbiasedness(const GradientOracle& oracle, const Point& x, int n_samples,
                                      const NoiseStream& stream) {
    if (n_samples < 1000) throw std::invalid_argument("check_unbiasedness needs n_samples >= 1e3");
    const Point grad = oracle.objective().gradient(x);
    if (oracle.finite_support()) {
        Point mean(x.size(), 0.0);
        for (const auto& a : oracle.support(std::span<const double>(x)))
            axpy(a.prob, std::span<const double>(a.grad), std::span<double>(mean));
        double err = 0.0;
        for (std::size_t j = 0; j < mean.size(); ++j)
            err = std::max(err, std::abs(mean[j] - grad[j]));
        const double tol = 1e-12 * (1.0 + norm(std::span<const double>(grad)));
        return {true, err, tol, err <= tol};
    }
    // Welford per coordinate
    Point mean(x.size(), 0.0);
    Point m2(x.size(), 0.0);
    Point g(x.size());
    for (int k = 0; k < n_samples; ++k) {
        oracle.sample(std::span<const double>(x), std::span<double>(g),
                      stream.at_trial(static_cast<std::uint64_t>(k)));
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double delta = g[j] - mean[j];
            mean[j] += delta / (k + 1);
            m2[j] += delta * (g[j] - mean[j]);
        }
    }
    double worst_err = 0.0;
    double worst_tol = 0.0;
    bool pass = true;
    for (std::size_t j = 0; j < mean.size(); ++j) {
        const double err = std::abs(mean[j] - grad[j]);
        const double sd = std::sqrt(m2[j] / std::max(1, n_samples - 1));
        const double tol = 4.0 * sd / std::sqrt(static_cast<double>(n_samples));
        if (err > worst_err) {
            worst_err = err;
            worst_tol = tol;
        }
        pass = pass && err <= tol;
    }
    return {false, worst_err, worst_tol, pass};
}

std::optional<GrowthWitness> refute_relaxed_growth(const GradientOracle& oracle, double sigma2,
                                                   double eta2) {
    if (sigma2 < 0.0 || eta2 < 0.0) throw std::invalid_argument("sigma2 and eta2 must be >= 0");
    if (sigma2 == 0.0 && eta2 == 0.0)
        throw std::invalid_argument("sigma2 and eta2 cannot both be zero");
    const Objective& f = oracle.objective();
    if (f.dimension() != 1)
        throw std::invalid_argument("refute_relaxed_growth is implemented for 1-D families");

    auto witness_at = [&](double x) -> std::optional<GrowthWitness> {
        if (!oracle.finite_support()) return std::nullopt;
        const Point p{x};
        const double lhs = exact_second_moment(oracle, p);
        const double g = f.gradient(p)[0];
        const double rhs = sigma2 + (eta2 + 1.0) * g * g;
        if (lhs > rhs) return GrowthWitness{x, lhs, rhs};
        return std::nullopt;
    };

    if (oracle.noise_kind() == "sign_perturbation") {
        if (const auto* sp = dynamic_cast<const SoftplusObjective*>(&f)) {
            // closed form: the violation holds for all x with
            // x - shift + 1 >= ln(e^(eta2+sigma2) - 1); probe one unit past it
            const double threshold = std::log(std::expm1(eta2 + sigma2));
            const double xw = threshold + sp->shift();
            if (auto w = witness_at(xw)) return w;
        }
    }

    // grid fallback: the huber agent's variance grows unboundedly while its
    // gradient stays bounded, so log-spaced probes find a witness
    for (double x = 1.0; x <= 1e6; x *= 1.5) {
        if (auto w = witness_at(x)) return w;
        if (auto w = witness_at(-x)) return w;
    }
    return std::nullopt;
}

}  // namespace fedvar
