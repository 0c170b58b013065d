#include "rbfnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "rbfnet/errors.hpp"
#include "rbfnet/model.hpp"
#include "rbfnet/rng.hpp"

namespace rbfnet {

SoftmaxHead make_softmax_head(std::size_t feature_dim, std::size_t num_classes,
                              std::uint64_t seed) {
    if (feature_dim < 1 || num_classes < 1) {
        throw InputError("softmax head needs feature_dim >= 1 and num_classes >= 1");
    }
    SoftmaxHead head;
    head.weight = Tensor({feature_dim, num_classes});
    head.bias = Tensor({num_classes});
    Rng rng(derive_seed(seed, "softmax-head"));
    const double limit = std::sqrt(6.0 / static_cast<double>(feature_dim + num_classes));
    for (double& v : head.weight.data) v = rng.uniform(-limit, limit);
    return head;
}

Tensor softmax_logits(const Tensor& features, const SoftmaxHead& head) {
    if (features.ndim() != 2) {
        throw ShapeError("softmax_logits expects an NxD feature matrix, got " +
                         shape_to_string(features.shape));
    }
    const std::size_t N = features.dim(0), d = features.dim(1), c = head.num_classes();
    if (d != head.feature_dim()) {
        throw ShapeError("feature dimension " + std::to_string(d) +
                         " does not match softmax head (" + std::to_string(head.feature_dim()) +
                         ")");
    }
    Tensor out({N, c});
    for (std::size_t n = 0; n < N; ++n) {
        double* row = out.data.data() + n * c;
        for (std::size_t k = 0; k < c; ++k) row[k] = head.bias[k];
        const double* f = features.data.data() + n * d;
        for (std::size_t i = 0; i < d; ++i) {
            const double a = f[i];
            const double* w = head.weight.data.data() + i * c;
            for (std::size_t k = 0; k < c; ++k) row[k] += a * w[k];
        }
    }
    return out;
}

XentResult softmax_cross_entropy(const std::vector<double>& logits, std::size_t y) {
    if (logits.empty()) throw InputError("logit vector is empty");
    if (y >= logits.size()) {
        throw InputError("label " + std::to_string(y) + " out of range for " +
                         std::to_string(logits.size()) + " classes");
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - mx);
    const double lse = mx + std::log(sum);
    XentResult res;
    res.loss = lse - logits[y];
    res.dlogits.resize(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        res.dlogits[k] = std::exp(logits[k] - lse) - (k == y ? 1.0 : 0.0);
    }
    return res;
}

SoftmaxBatchResult softmax_xent_batch(const Tensor& features,
                                      const std::vector<std::size_t>& labels,
                                      const SoftmaxHead& head) {
    const Tensor logits = softmax_logits(features, head);
    const std::size_t N = features.dim(0), d = features.dim(1), c = head.num_classes();
    if (labels.size() != N) {
        throw InputError("got " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(N) + " samples");
    }
    SoftmaxBatchResult res;
    res.dfeatures = Tensor({N, d});
    res.dweight = Tensor(head.weight.shape);
    res.dbias = Tensor(head.bias.shape);
    std::vector<double> row(c);
    for (std::size_t n = 0; n < N; ++n) {
        std::copy(logits.data.begin() + n * c, logits.data.begin() + (n + 1) * c, row.begin());
        const XentResult xr = softmax_cross_entropy(row, labels[n]);
        res.loss += xr.loss;
        std::size_t best = 0;
        for (std::size_t k = 1; k < c; ++k) {
            if (row[k] > row[best]) best = k;
        }
        if (best == labels[n]) res.correct += 1;
        const double* f = features.data.data() + n * d;
        double* df = res.dfeatures.data.data() + n * d;
        for (std::size_t k = 0; k < c; ++k) res.dbias[k] += xr.dlogits[k];
        for (std::size_t i = 0; i < d; ++i) {
            const double a = f[i];
            const double* w = head.weight.data.data() + i * c;
            double* dw = res.dweight.data.data() + i * c;
            double acc = 0.0;
            for (std::size_t k = 0; k < c; ++k) {
                dw[k] += a * xr.dlogits[k];
                acc += w[k] * xr.dlogits[k];
            }
            df[i] = acc;
        }
    }
    return res;
}

PcaModel pca_fit(const Tensor& x, std::size_t target_dim, std::uint64_t seed) {
    if (x.ndim() != 2) {
        throw ShapeError("pca_fit expects an NxD matrix, got " + shape_to_string(x.shape));
    }
    const std::size_t N = x.dim(0), d = x.dim(1);
    if (N < 2) throw InputError("pca needs at least 2 samples");
    if (target_dim > d) {
        throw InputError("pca target dimension " + std::to_string(target_dim) +
                         " exceeds data dimension " + std::to_string(d));
    }
    if (target_dim == 0) throw InputError("pca target dimension must be >= 1");

    PcaModel pca;
    pca.mean = Tensor({d});
    for (std::size_t n = 0; n < N; ++n) {
        const double* row = x.data.data() + n * d;
        for (std::size_t i = 0; i < d; ++i) pca.mean[i] += row[i];
    }
    for (std::size_t i = 0; i < d; ++i) pca.mean[i] /= static_cast<double>(N);

    // sample covariance, symmetric d x d
    Tensor cov({d, d});
    std::vector<double> centered(d);
    for (std::size_t n = 0; n < N; ++n) {
        const double* row = x.data.data() + n * d;
        for (std::size_t i = 0; i < d; ++i) centered[i] = row[i] - pca.mean[i];
        for (std::size_t i = 0; i < d; ++i) {
            const double a = centered[i];
            if (a == 0.0) continue;
            double* crow = cov.data.data() + i * d;
            for (std::size_t j = 0; j < d; ++j) crow[j] += a * centered[j];
        }
    }
    for (double& v : cov.data) v /= static_cast<double>(N - 1);

    pca.components = Tensor({target_dim, d});
    Rng rng(derive_seed(seed, "pca"));
    std::vector<double> v(d), next(d);
    for (std::size_t comp = 0; comp < target_dim; ++comp) {
        for (double& e : v) e = rng.normal();
        double lambda = 0.0;
        for (std::size_t it = 0; it < 1000; ++it) {
            // project out previously found directions so near-zero
            // eigenvalues still yield an orthonormal basis
            for (std::size_t pc = 0; pc < comp; ++pc) {
                const double* c = pca.components.data.data() + pc * d;
                double dot = 0.0;
                for (std::size_t i = 0; i < d; ++i) dot += v[i] * c[i];
                for (std::size_t i = 0; i < d; ++i) v[i] -= dot * c[i];
            }
            double norm = 0.0;
            for (double e : v) norm += e * e;
            norm = std::sqrt(norm);
            if (norm < 1e-300) {
                for (double& e : v) e = rng.normal();
                continue;
            }
            for (double& e : v) e /= norm;
            for (std::size_t i = 0; i < d; ++i) {
                const double* crow = cov.data.data() + i * d;
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += crow[j] * v[j];
                next[i] = acc;
            }
            double new_lambda = 0.0;
            for (std::size_t i = 0; i < d; ++i) new_lambda += v[i] * next[i];
            double next_norm = 0.0;
            for (double e : next) next_norm += e * e;
            next_norm = std::sqrt(next_norm);
            if (next_norm < 1e-300) {
                lambda = 0.0;
                break;  // v lies in the null space; keep it as the component
            }
            // stop once the normalized iterate is stationary; the distance
            // between successive unit vectors bounds the remaining error far
            // more tightly than an alignment test on the cosine
            double diff2 = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double u = next[i] / next_norm;
                diff2 += (u - v[i]) * (u - v[i]);
                v[i] = u;
            }
            lambda = new_lambda;
            if (diff2 < 1e-13 * 1e-13 && it > 2) break;
        }
        // final cleanup: orthogonalize and normalize once more
        for (std::size_t pc = 0; pc < comp; ++pc) {
            const double* c = pca.components.data.data() + pc * d;
            double dot = 0.0;
            for (std::size_t i = 0; i < d; ++i) dot += v[i] * c[i];
            for (std::size_t i = 0; i < d; ++i) v[i] -= dot * c[i];
        }
        double norm = 0.0;
        for (double e : v) norm += e * e;
        norm = std::sqrt(norm);
        if (norm < 1e-300) {
            // degenerate direction; fall back to a unit basis vector not yet used
            std::fill(v.begin(), v.end(), 0.0);
            v[comp % d] = 1.0;
        } else {
            for (double& e : v) e /= norm;
        }
        // deterministic sign: largest-magnitude entry positive
        std::size_t arg = 0;
        for (std::size_t i = 1; i < d; ++i) {
            if (std::fabs(v[i]) > std::fabs(v[arg])) arg = i;
        }
        if (v[arg] < 0.0) {
            for (double& e : v) e = -e;
        }
        std::copy(v.begin(), v.end(), pca.components.data.begin() + comp * d);
        pca.eigenvalues.push_back(std::max(0.0, lambda));
        // deflate
        for (std::size_t i = 0; i < d; ++i) {
            const double vi = v[i];
            if (vi == 0.0) continue;
            double* crow = cov.data.data() + i * d;
            for (std::size_t j = 0; j < d; ++j) crow[j] -= lambda * vi * v[j];
        }
    }
    return pca;
}

Tensor pca_project(const PcaModel& pca, const Tensor& x) {
    if (x.ndim() != 2 || x.dim(1) != pca.mean.dim(0)) {
        throw ShapeError("pca_project input " + shape_to_string(x.shape) +
                         " does not match fitted dimension " + std::to_string(pca.mean.dim(0)));
    }
    const std::size_t N = x.dim(0), d = x.dim(1), r = pca.components.dim(0);
    Tensor out({N, r});
    for (std::size_t n = 0; n < N; ++n) {
        const double* row = x.data.data() + n * d;
        for (std::size_t c = 0; c < r; ++c) {
            const double* comp = pca.components.data.data() + c * d;
            double acc = 0.0;
            for (std::size_t i = 0; i < d; ++i) acc += (row[i] - pca.mean[i]) * comp[i];
            out[n * r + c] = acc;
        }
    }
    return out;
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

struct LloydRun {
    std::vector<std::size_t> assignments;
    Tensor centroids;
    double sse = 0.0;
};

LloydRun lloyd_once(const Tensor& x, std::size_t k, std::size_t max_iters, Rng& rng) {
    const std::size_t N = x.dim(0), d = x.dim(1);
    LloydRun run;
    run.centroids = Tensor({k, d});

    // k-means++ seeding
    std::vector<double> min_d2(N, 0.0);
    std::size_t first = static_cast<std::size_t>(rng.uniform_int(0, N - 1));
    std::copy(x.data.begin() + first * d, x.data.begin() + (first + 1) * d,
              run.centroids.data.begin());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            double best = sq_dist(x.data.data() + n * d, run.centroids.data.data(), d);
            for (std::size_t pc = 1; pc < c; ++pc) {
                best = std::min(best,
                                sq_dist(x.data.data() + n * d,
                                        run.centroids.data.data() + pc * d, d));
            }
            min_d2[n] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = static_cast<std::size_t>(rng.uniform_int(0, N - 1));
        } else {
            const double target = rng.next_double() * total;
            double acc = 0.0;
            pick = N - 1;
            for (std::size_t n = 0; n < N; ++n) {
                acc += min_d2[n];
                if (acc >= target) {
                    pick = n;
                    break;
                }
            }
        }
        std::copy(x.data.begin() + pick * d, x.data.begin() + (pick + 1) * d,
                  run.centroids.data.begin() + c * d);
    }

    run.assignments.assign(N, 0);
    std::vector<std::size_t> counts(k);
    for (std::size_t it = 0; it < max_iters; ++it) {
        bool changed = false;
        for (std::size_t n = 0; n < N; ++n) {
            std::size_t best = 0;
            double best_d = sq_dist(x.data.data() + n * d, run.centroids.data.data(), d);
            for (std::size_t c = 1; c < k; ++c) {
                const double dist = sq_dist(x.data.data() + n * d,
                                            run.centroids.data.data() + c * d, d);
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            if (run.assignments[n] != best) {
                run.assignments[n] = best;
                changed = true;
            }
        }
        if (!changed && it > 0) break;
        std::fill(run.centroids.data.begin(), run.centroids.data.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t n = 0; n < N; ++n) {
            counts[run.assignments[n]] += 1;
            const double* row = x.data.data() + n * d;
            double* cen = run.centroids.data.data() + run.assignments[n] * d;
            for (std::size_t i = 0; i < d; ++i) cen[i] += row[i];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // re-seed an empty cluster to the point farthest from its centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t n = 0; n < N; ++n) {
                    const double dist =
                        sq_dist(x.data.data() + n * d,
                                run.centroids.data.data() + run.assignments[n] * d, d);
                    if (dist > far_d) {
                        far_d = dist;
                        far = n;
                    }
                }
                std::copy(x.data.begin() + far * d, x.data.begin() + (far + 1) * d,
                          run.centroids.data.begin() + c * d);
                continue;
            }
            double* cen = run.centroids.data.data() + c * d;
            for (std::size_t i = 0; i < d; ++i) cen[i] /= static_cast<double>(counts[c]);
        }
    }
    run.sse = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        run.sse += sq_dist(x.data.data() + n * d,
                           run.centroids.data.data() + run.assignments[n] * d, d);
    }
    return run;
}

}  // namespace

KmeansResult kmeans(const Tensor& x, std::size_t k, std::size_t restarts,
                    std::size_t max_iters, std::uint64_t seed) {
    if (x.ndim() != 2) {
        throw ShapeError("kmeans expects an NxD matrix, got " + shape_to_string(x.shape));
    }
    const std::size_t N = x.dim(0);
    if (k == 0) throw InputError("kmeans needs k >= 1");
    if (N < k) {
        throw InputError("kmeans got " + std::to_string(N) + " points for k=" +
                         std::to_string(k));
    }
    if (restarts == 0) restarts = 1;
    KmeansResult best;
    bool have = false;
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, "kmeans-restart", r));
        LloydRun run = lloyd_once(x, k, max_iters, rng);
        if (!have || run.sse < best.sse) {
            best.assignments = std::move(run.assignments);
            best.centroids = std::move(run.centroids);
            best.sse = run.sse;
            have = true;
        }
    }
    return best;
}

std::vector<std::uint8_t> activation_clustering_clean(const Model& model, const Dataset& train,
                                                      const AcConfig& config) {
    validate_dataset(train);
    if (train.label_kind != LabelKind::ClassIndex) {
        throw InputError("activation clustering needs class labels");
    }
    if (config.clusters < 2) throw InputError("activation clustering needs >= 2 clusters");
    if (config.reduced_dim < 1) throw InputError("reduced dimension must be >= 1");
    std::size_t num_classes = 0;
    if (model.head_kind == HeadKind::Rbf) {
        num_classes = model.rbf.num_classes();
    } else {
        num_classes = model.softmax.num_classes();
    }
    const std::size_t n = train.size();
    std::vector<std::uint8_t> flags(n, 0);
    for (std::size_t k = 0; k < num_classes; ++k) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i) {
            if (train.class_labels[i] == k) idx.push_back(i);
        }
        if (idx.size() < 2) {
            std::cerr << "warning: class " << k << " has " << idx.size()
                      << " samples, skipping activation clustering for it\n";
            continue;
        }
        const Tensor feats = dataset_features(model, train, idx);
        const std::size_t reduced = std::min(config.reduced_dim, feats.dim(1));
        const PcaModel pca = pca_fit(feats, reduced, derive_seed(config.seed, "ac-pca", k));
        const Tensor proj = pca_project(pca, feats);
        const KmeansResult km = kmeans(proj, config.clusters, config.restarts,
                                       config.max_iters, derive_seed(config.seed, "ac-kmeans", k));
        std::vector<std::size_t> counts(config.clusters, 0);
        for (std::size_t a : km.assignments) counts[a] += 1;
        // flag the strictly smallest cluster; any tie for smallest flags nothing
        std::size_t smallest = 0;
        for (std::size_t c = 1; c < counts.size(); ++c) {
            if (counts[c] < counts[smallest]) smallest = c;
        }
        bool tie = false;
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (c != smallest && counts[c] == counts[smallest]) tie = true;
        }
        if (tie) continue;
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (km.assignments[j] == smallest) flags[idx[j]] = 1;
        }
    }
    return flags;
}

}  // namespace rbfnet
