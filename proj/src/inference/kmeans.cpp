#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "pact/inference/inference.hpp"

namespace pact::inference {
namespace {

constexpr std::size_t kMaxIterations = 300;

double squared_distance(const Distribution& a, const Distribution& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

struct Run {
    std::vector<Distribution> centers;
    double inertia{std::numeric_limits<double>::infinity()};
};

std::vector<Distribution> seed_centers(const std::vector<Distribution>& points, std::size_t k,
                                       std::mt19937_64& rng) {
    std::vector<Distribution> centers;
    std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
    centers.push_back(points[first(rng)]);
    std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points[i], centers.back()));
            total += nearest[i];
        }
        if (total <= 0.0) {
            // every point already coincides with a center
            centers.push_back(points[first(rng)]);
            continue;
        }
        std::uniform_real_distribution<double> pick(0.0, total);
        double target = pick(rng);
        std::size_t chosen = points.size() - 1;
        for (std::size_t i = 0; i < points.size(); ++i) {
            target -= nearest[i];
            if (target <= 0.0 && nearest[i] > 0.0) {
                chosen = i;
                break;
            }
        }
        centers.push_back(points[chosen]);
    }
    return centers;
}

Run lloyd(const std::vector<Distribution>& points, std::vector<Distribution> centers) {
    const std::size_t k = centers.size();
    const std::size_t dim = points.front().size();
    std::vector<std::size_t> assignment(points.size(), k);
    Run run;
    for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
        bool changed = false;
        std::vector<double> dist(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::size_t best = 0;
            double best_d = squared_distance(points[i], centers[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = squared_distance(points[i], centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            dist[i] = best_d;
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }

        std::vector<Distribution> sums(k, Distribution(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            ++counts[assignment[i]];
            for (std::size_t d = 0; d < dim; ++d) sums[assignment[i]][d] += points[i][d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // relocate an empty cluster onto the worst-fit point
                const auto far = static_cast<std::size_t>(
                    std::max_element(dist.begin(), dist.end()) - dist.begin());
                if (dist[far] > 0.0) {
                    centers[c] = points[far];
                    dist[far] = 0.0;
                    changed = true;
                }
                continue;
            }
            for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
        if (!changed && iter > 0) break;
    }
    run.inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) best_d = std::min(best_d, squared_distance(points[i], c));
        run.inertia += best_d;
    }
    run.centers = std::move(centers);
    return run;
}

}  // namespace

ClusterResult cluster_distributions(const std::vector<Distribution>& points, std::size_t k,
                                    std::span<const double> valuations, std::uint64_t rng_seed,
                                    std::size_t restarts) {
    if (k == 0) throw ModelError("cluster_distributions: k must be at least 1");
    if (points.empty()) throw ModelError("cluster_distributions: no points");
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim) throw ModelError("cluster_distributions: ragged points");
    if (valuations.size() != dim) throw ModelError("cluster_distributions: valuation dimension mismatch");

    ClusterResult result;
    result.requested_k = k;
    if (points.size() < k) {
        k = points.size();
        result.k_reduced = true;
    }

    std::mt19937_64 rng(rng_seed);
    Run best;
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        Run run = lloyd(points, seed_centers(points, k, rng));
        if (run.inertia < best.inertia) best = std::move(run);
    }

    for (auto& c : best.centers) {
        double total = 0.0;
        for (auto& v : c) {
            v = std::max(v, 0.0);
            total += v;
        }
        for (auto& v : c) v /= total;
    }
    std::stable_sort(best.centers.begin(), best.centers.end(),
                     [&](const Distribution& a, const Distribution& b) {
                         return dot(a, valuations) < dot(b, valuations);
                     });
    result.centers = std::move(best.centers);
    result.inertia = best.inertia;
    return result;
}

}  // namespace pact::inference
