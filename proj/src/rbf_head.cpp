#include "rbfnet/rbf_head.hpp"

#include <cmath>

#include "rbfnet/errors.hpp"

namespace rbfnet {

RbfHead make_rbf_head(std::size_t num_classes, std::size_t proto_dim, double lambda,
                      double exponent) {
    if (num_classes < 1) throw InputError("rbf head needs at least one class");
    if (proto_dim < 1) throw InputError("rbf head needs prototype dimension >= 1");
    RbfHead head;
    head.prototypes = Tensor({num_classes, proto_dim});
    head.lambda = lambda;
    head.exponent = exponent;
    validate_head(head);
    return head;
}

void validate_head(const RbfHead& head) {
    if (head.prototypes.ndim() != 2) {
        throw ShapeError("rbf prototypes must be a class-by-dimension matrix, got " +
                         shape_to_string(head.prototypes.shape));
    }
    if (!(head.lambda > 0.0) || !std::isfinite(head.lambda)) {
        throw InputError("rbf margin lambda must be positive and finite");
    }
    if (!(head.exponent >= 1.0) || !std::isfinite(head.exponent)) {
        throw InputError("rbf exponent must be >= 1 and finite");
    }
    head.prototypes.check_finite("rbf prototypes");
    if (head.has_projection()) {
        if (head.projection.ndim() != 2 || head.projection.dim(1) != head.proto_dim()) {
            throw ShapeError("rbf projection " + shape_to_string(head.projection.shape) +
                             " does not map onto prototype dimension " +
                             std::to_string(head.proto_dim()));
        }
        head.projection.check_finite("rbf projection");
    }
    if (head.has_offset()) {
        if (head.offset.ndim() != 1 || head.offset.dim(0) != head.proto_dim()) {
            throw ShapeError("rbf offset " + shape_to_string(head.offset.shape) +
                             " does not match prototype dimension " +
                             std::to_string(head.proto_dim()));
        }
        head.offset.check_finite("rbf offset");
    }
}

double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Tensor rbf_distances(const Tensor& features, const RbfHead& head) {
    if (features.ndim() != 2) {
        throw ShapeError("rbf_distances expects an NxD feature matrix, got " +
                         shape_to_string(features.shape));
    }
    validate_head(head);
    const std::size_t N = features.dim(0), d = features.dim(1);
    const std::size_t c = head.num_classes(), l = head.proto_dim();
    const std::size_t expect = head.has_projection() ? head.projection.dim(0) : l;
    if (d != expect) {
        throw ShapeError("feature dimension " + std::to_string(d) + " does not match head (" +
                         std::to_string(expect) + ")");
    }
    Tensor out({N, c});
    std::vector<double> u(l);
    for (std::size_t n = 0; n < N; ++n) {
        const double* f = features.data.data() + n * d;
        const double* x = f;
        if (head.has_projection()) {
            for (std::size_t j = 0; j < l; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < d; ++i) acc += head.projection[i * l + j] * f[i];
                u[j] = acc;
            }
            x = u.data();
        } else if (head.has_offset()) {
            for (std::size_t j = 0; j < l; ++j) u[j] = f[j];
            x = u.data();
        }
        if (head.has_offset()) {
            for (std::size_t j = 0; j < l; ++j) u[j] = x[j] + head.offset[j];
            x = u.data();
        }
        for (std::size_t k = 0; k < c; ++k) {
            const double* w = head.prototypes.data.data() + k * l;
            double phi = 0.0;
            if (head.exponent == 2.0) {
                for (std::size_t j = 0; j < l; ++j) {
                    const double diff = x[j] - w[j];
                    phi += diff * diff;
                }
            } else if (head.exponent == 1.0) {
                for (std::size_t j = 0; j < l; ++j) phi += std::fabs(x[j] - w[j]);
            } else {
                for (std::size_t j = 0; j < l; ++j) {
                    phi += std::pow(std::fabs(x[j] - w[j]), head.exponent);
                }
            }
            out[n * c + k] = phi;
        }
    }
    out.check_finite("rbf distances");
    return out;
}

namespace {

void check_phi(const std::vector<double>& phi, double lambda) {
    if (phi.empty()) throw InputError("distance vector is empty");
    for (double v : phi) {
        if (!std::isfinite(v)) throw NumericError("non-finite value in distance vector");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InputError("rbf margin lambda must be positive and finite");
    }
}

}  // namespace

double softml_loss(const std::vector<double>& phi, std::size_t y, double lambda) {
    check_phi(phi, lambda);
    if (y >= phi.size()) {
        throw InputError("label " + std::to_string(y) + " out of range for " +
                         std::to_string(phi.size()) + " classes");
    }
    double loss = phi[y];
    for (std::size_t j = 0; j < phi.size(); ++j) {
        if (j != y) loss += softplus(lambda - phi[j]);
    }
    return loss;
}

std::vector<double> softml_grad(const std::vector<double>& phi, std::size_t y, double lambda) {
    check_phi(phi, lambda);
    if (y >= phi.size()) {
        throw InputError("label " + std::to_string(y) + " out of range for " +
                         std::to_string(phi.size()) + " classes");
    }
    std::vector<double> grad(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) {
        grad[j] = j == y ? 1.0 : -logistic(lambda - phi[j]);
    }
    return grad;
}

std::vector<double> class_probabilities(const std::vector<double>& phi, double lambda) {
    check_phi(phi, lambda);
    double total = 0.0;  // sum_j softplus(lambda - phi_j)
    for (double v : phi) total += softplus(lambda - v);
    std::vector<double> probs(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        probs[k] = std::exp(-phi[k] + softplus(lambda - phi[k]) - total);
    }
    return probs;
}

double rejection_probability(const std::vector<double>& phi, double lambda) {
    check_phi(phi, lambda);
    double total = 0.0;
    for (double v : phi) total += softplus(lambda - v);
    return std::exp(-total);
}

std::size_t predict(const std::vector<double>& phi) {
    if (phi.empty()) throw InputError("distance vector is empty");
    std::size_t best = 0;
    for (std::size_t k = 1; k < phi.size(); ++k) {
        if (phi[k] < phi[best]) best = k;
    }
    return best;
}

std::vector<std::size_t> predict_rows(const Tensor& distances) {
    if (distances.ndim() != 2) {
        throw ShapeError("predict_rows expects an NxC matrix, got " +
                         shape_to_string(distances.shape));
    }
    std::vector<std::size_t> out(distances.dim(0));
    for (std::size_t n = 0; n < distances.dim(0); ++n) {
        out[n] = predict(tensor_row(distances, n));
    }
    return out;
}

std::vector<double> tensor_row(const Tensor& t, std::size_t row) {
    if (t.ndim() != 2) throw ShapeError("tensor_row expects a matrix, got " + shape_to_string(t.shape));
    if (row >= t.dim(0)) throw InputError("row " + std::to_string(row) + " out of range");
    const std::size_t w = t.dim(1);
    return std::vector<double>(t.data.begin() + row * w, t.data.begin() + (row + 1) * w);
}

HeadBatchResult softml_batch(const Tensor& features, const std::vector<std::size_t>& labels,
                             const RbfHead& head) {
    if (!head.euclidean()) {
        throw StateError("softml_batch trains only the euclidean head configuration");
    }
    if (features.ndim() != 2) {
        throw ShapeError("softml_batch expects an NxD feature matrix, got " +
                         shape_to_string(features.shape));
    }
    const std::size_t N = features.dim(0), d = features.dim(1);
    if (labels.size() != N) {
        throw InputError("got " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(N) + " samples");
    }
    const std::size_t c = head.num_classes();
    Tensor dists = rbf_distances(features, head);
    HeadBatchResult res;
    res.dfeatures = Tensor({N, d});
    res.dprototypes = Tensor(head.prototypes.shape);
    for (std::size_t n = 0; n < N; ++n) {
        const std::vector<double> phi = tensor_row(dists, n);
        const std::size_t y = labels[n];
        res.loss += softml_loss(phi, y, head.lambda);
        if (predict(phi) == y) res.correct += 1;
        const std::vector<double> g = softml_grad(phi, y, head.lambda);
        const double* f = features.data.data() + n * d;
        double* df = res.dfeatures.data.data() + n * d;
        for (std::size_t k = 0; k < c; ++k) {
            const double gk = g[k];
            if (gk == 0.0) continue;
            const double* w = head.prototypes.data.data() + k * d;
            double* dw = res.dprototypes.data.data() + k * d;
            for (std::size_t i = 0; i < d; ++i) {
                const double diff2 = 2.0 * (f[i] - w[i]);
                df[i] += gk * diff2;
                dw[i] -= gk * diff2;
            }
        }
    }
    return res;
}

}  // namespace rbfnet
