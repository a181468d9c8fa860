#include <cmath>

#include "fate/errors.hpp"
#include "fate/kernels.hpp"
#include "fate/models.hpp"

namespace fate::detail {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kProbEps = 1e-12;

}  // namespace

double logistic_loss(const Dataset& ds, const std::vector<double>& weights, double intercept,
                     double l2) {
    const double total_w = kernels::sum(ds.w.data(), ds.n());
    double loss = 0.0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const double z = kernels::dot(ds.x.row(i), weights.data(), ds.d()) + intercept;
        const double p = std::clamp(sigmoid(z), kProbEps, 1.0 - kProbEps);
        loss += ds.w[i] * (ds.y[i] ? -std::log(p) : -std::log(1.0 - p));
    }
    loss /= total_w;
    loss += 0.5 * l2 * kernels::dot(weights.data(), weights.data(), weights.size());
    return loss;
}

void logistic_gradient(const Dataset& ds, const std::vector<double>& weights, double intercept,
                       double l2, std::vector<double>& grad_w, double& grad_b) {
    const double total_w = kernels::sum(ds.w.data(), ds.n());
    grad_w.assign(ds.d(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const double z = kernels::dot(ds.x.row(i), weights.data(), ds.d()) + intercept;
        const double r = ds.w[i] * (sigmoid(z) - ds.y[i]) / total_w;
        kernels::axpy(r, ds.x.row(i), grad_w.data(), ds.d());
        grad_b += r;
    }
    kernels::axpy(l2, weights.data(), grad_w.data(), ds.d());
}

// Full-batch (sub)gradient descent; hinge=false gives logistic regression,
// hinge=true the linear SVC on +/-1 labels. Instance weights scale each
// row's loss contribution; the objective is normalized by total weight so
// duplicating a row equals doubling its weight.
TrainedModel train_linear(const ClassifierSpec& spec, const Dataset& ds, bool hinge) {
    const std::size_t n = ds.n();
    const std::size_t d = ds.d();
    const double total_w = kernels::sum(ds.w.data(), n);

    TrainedModel m;
    m.family = spec.family;
    m.d = d;
    m.weights.assign(d, 0.0);
    m.intercept = 0.0;

    std::vector<double> grad(d);
    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        grad.assign(d, 0.0);
        double grad_b = 0.0;
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = kernels::dot(ds.x.row(i), m.weights.data(), d) + m.intercept;
            if (hinge) {
                const double t = ds.y[i] ? 1.0 : -1.0;
                const double margin = t * z;
                if (margin < 1.0) {
                    const double r = -ds.w[i] * t / total_w;
                    kernels::axpy(r, ds.x.row(i), grad.data(), d);
                    grad_b += r;
                    loss += ds.w[i] * (1.0 - margin);
                }
            } else {
                const double p = sigmoid(z);
                const double r = ds.w[i] * (p - ds.y[i]) / total_w;
                kernels::axpy(r, ds.x.row(i), grad.data(), d);
                grad_b += r;
                const double pc = std::clamp(p, kProbEps, 1.0 - kProbEps);
                loss += ds.w[i] * (ds.y[i] ? -std::log(pc) : -std::log(1.0 - pc));
            }
        }
        kernels::axpy(spec.l2, m.weights.data(), grad.data(), d);
        loss = loss / total_w +
               0.5 * spec.l2 * kernels::dot(m.weights.data(), m.weights.data(), d);

        kernels::axpy(-spec.learning_rate, grad.data(), m.weights.data(), d);
        m.intercept -= spec.learning_rate * grad_b;
        m.loss_trace.push_back(loss);
    }
    m.epochs_run = spec.epochs;
    return m;
}

}  // namespace fate::detail
