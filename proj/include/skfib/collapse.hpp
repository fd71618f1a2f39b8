// Metric geometry near the discriminant: orbifold comparison metrics,
// uniformizing maps, path-length and distinguished-boundary bounds, covering
// counts with decay products, and graph-geodesic meshes.
//
// A ModelMetric evaluator returns the Hermitian matrix G of the *real*
// metric: the squared length of a real tangent vector with complex
// representative zeta is Re(zeta^dag G zeta).  For a Kahler metric with
// coefficient matrix g_{i jbar} this is G = 2 g; the Euclidean model is
// G = I (length element |dw|).
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "skfib/errors.hpp"
#include "skfib/nilpotent_orbit.hpp"

namespace skfib {

struct ModelMetric {
    int n = 0;
    std::vector<int> divisor; // coordinate indices where the metric may be singular
    std::function<Eigen::MatrixXcd(const Eigen::VectorXcd&)> eval;

    Eigen::MatrixXcd operator()(const Eigen::VectorXcd& w) const { return eval(w); }

    double length_element(const Eigen::VectorXcd& w, const Eigen::VectorXcd& tangent) const {
        Eigen::MatrixXcd G = eval(w);
        cd q = tangent.adjoint() * (G * tangent);
        double v = q.real();
        if (!(v >= 0.0) || !std::isfinite(v)) throw domain_error("metric not positive at point", v);
        return std::sqrt(v);
    }
};

inline ModelMetric euclidean_metric(int n) {
    ModelMetric m;
    m.n = n;
    m.eval = [n](const Eigen::VectorXcd&) { return Eigen::MatrixXcd::Identity(n, n).eval(); };
    return m;
}

// Orbifold comparison model: G_ii = |w_i|^{-2(1 - 1/m_i)} on the first k
// coordinates, 1 elsewhere.  An optional factor C (1 - sum_k log|w_k|)^e
// multiplies the whole matrix (the log-correction comparison option).
inline ModelMetric orbifold_model_metric(int n, const std::vector<int>& orders, double log_C = 0.0,
                                         double log_exp = 0.0) {
    const int k = static_cast<int>(orders.size());
    if (k > n) throw shape_error("orbifold_model_metric: more orders than coordinates");
    for (int m : orders)
        if (m < 1) throw model_error("orbifold_model_metric: orders must be positive");
    ModelMetric m;
    m.n = n;
    for (int i = 0; i < k; ++i) m.divisor.push_back(i);
    m.eval = [n, k, orders, log_C, log_exp](const Eigen::VectorXcd& w) {
        Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(n, n);
        for (int i = 0; i < k; ++i) {
            double r = std::abs(w(i));
            if (r <= 0.0) throw domain_error("orbifold metric evaluated on the divisor");
            G(i, i) = std::pow(r, -2.0 * (1.0 - 1.0 / orders[i]));
        }
        if (log_C > 0.0) {
            double s = 1.0;
            for (int i = 0; i < k; ++i) s -= std::log(std::abs(w(i)));
            G *= log_C * std::pow(s, log_exp);
        }
        return G;
    };
    return m;
}

// The local uniformizing map q(w) = (w_1^{m_1}, .., w_k^{m_k}, w_{k+1}, ..).
inline Eigen::VectorXcd uniformize(const std::vector<int>& orders, const Eigen::VectorXcd& w) {
    Eigen::VectorXcd q = w;
    for (size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] < 1) throw model_error("uniformize: orders must be positive");
        cd v(1.0, 0.0);
        for (int e = 0; e < orders[i]; ++e) v *= w(static_cast<Eigen::Index>(i));
        q(static_cast<Eigen::Index>(i)) = v;
    }
    return q;
}

// Jacobian congruence pullback of a metric by the uniformizing map:
// G~(w) = J^dag G(q(w)) J with J = diag(m_i w_i^{m_i - 1}; 1).
inline ModelMetric pullback_by_uniformizing(const ModelMetric& base, const std::vector<int>& orders) {
    ModelMetric m;
    m.n = base.n;
    for (size_t i = 0; i < orders.size(); ++i) m.divisor.push_back(static_cast<int>(i));
    m.eval = [base, orders](const Eigen::VectorXcd& w) {
        Eigen::VectorXcd q = uniformize(orders, w);
        Eigen::MatrixXcd G = base.eval(q);
        Eigen::MatrixXcd J = Eigen::MatrixXcd::Identity(base.n, base.n);
        for (size_t i = 0; i < orders.size(); ++i) {
            cd p(1.0, 0.0);
            for (int e = 0; e < orders[i] - 1; ++e) p *= w(static_cast<Eigen::Index>(i));
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = static_cast<double>(orders[i]) * p;
        }
        return (J.adjoint() * G * J).eval();
    };
    return m;
}

// Metric induced by a degeneration model: G = 2 g_{i jbar}(t), optionally
// precomposed with the uniformizing map of the model's orbifold orders.
inline ModelMetric degeneration_metric(const NilpotentOrbitModel& model, bool through_uniformizing_map = false) {
    ModelMetric m;
    m.n = model.n;
    for (int i = 0; i < model.k; ++i) m.divisor.push_back(i);
    NilpotentOrbitModel local = model;
    m.eval = [local](const Eigen::VectorXcd& t) { return (2.0 * base_metric_coeffs(local, t)).eval(); };
    if (through_uniformizing_map) {
        std::vector<int> orders = model.orbifold_orders;
        ModelMetric base = m;
        return pullback_by_uniformizing(base, orders);
    }
    return m;
}

// Composite chord-midpoint length of a parameterized curve.  For endpoints
// on the divisor the caller clips the parameter (integrable singularities
// converge under the refinement check below).
inline double path_length(const ModelMetric& metric, const std::function<Eigen::VectorXcd(double)>& curve,
                          int steps) {
    if (steps < 1) throw shape_error("path_length: need at least one step");
    double len = 0.0;
    Eigen::VectorXcd prev = curve(0.0);
    for (int s = 1; s <= steps; ++s) {
        double u = static_cast<double>(s) / steps;
        Eigen::VectorXcd next = curve(u);
        Eigen::VectorXcd mid = 0.5 * (prev + next);
        len += metric.length_element(mid, next - prev);
        prev = next;
    }
    return len;
}

// Length with a convergence certificate: refine until two successive
// doublings agree to rel_tol, flagging non-integrable divergence.
inline double path_length_converged(const ModelMetric& metric, const std::function<Eigen::VectorXcd(double)>& curve,
                                    int initial_steps = 256, double rel_tol = 1e-8, int max_doublings = 12) {
    double prev = path_length(metric, curve, initial_steps);
    int steps = initial_steps;
    for (int d = 0; d < max_doublings; ++d) {
        steps *= 2;
        double cur = path_length(metric, curve, steps);
        if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) return cur;
        if (cur > 1e12) throw resolution_error("path_length: quadrature diverging (non-integrable singularity?)");
        prev = cur;
    }
    throw resolution_error("path_length: quadrature did not converge under refinement");
}

// ---------------------------------------------------------------------------
// Graph meshes.

struct MetricMesh {
    std::vector<Eigen::VectorXcd> vertices;
    std::vector<std::vector<std::pair<int, double>>> adj; // (neighbor, edge length)

    int size() const { return static_cast<int>(vertices.size()); }

    void add_edge(int a, int b, double len) {
        if (!(len > 0.0) || !std::isfinite(len)) throw resolution_error("mesh edge with nonpositive length");
        adj[a].emplace_back(b, len);
        adj[b].emplace_back(a, len);
    }

    std::vector<double> dijkstra(int src) const {
        std::vector<double> dist(vertices.size(), std::numeric_limits<double>::infinity());
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        dist[src] = 0.0;
        pq.emplace(0.0, src);
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (d > dist[v]) continue;
            for (auto [u, len] : adj[v]) {
                double nd = d + len;
                if (nd < dist[u]) {
                    dist[u] = nd;
                    pq.emplace(nd, u);
                }
            }
        }
        return dist;
    }

    double distance(int a, int b) const {
        double d = dijkstra(a)[b];
        if (!std::isfinite(d)) throw resolution_error("mesh_distance: vertices not connected");
        return d;
    }

    // Graph diameter; for large meshes subsample sources with the stride.
    double diameter(int source_stride = 1) const {
        double best = 0.0;
        for (int s = 0; s < size(); s += source_stride) {
            auto dist = dijkstra(s);
            for (double d : dist) {
                if (!std::isfinite(d)) throw resolution_error("mesh diameter: mesh not connected");
                best = std::max(best, d);
            }
        }
        return best;
    }

    double diameter_from_sources(const std::vector<int>& sources) const {
        double best = 0.0;
        for (int s : sources) {
            auto dist = dijkstra(s);
            for (double d : dist) {
                if (!std::isfinite(d)) throw resolution_error("mesh diameter: mesh not connected");
                best = std::max(best, d);
            }
        }
        return best;
    }
};

// Polar annulus mesh around the puncture of a 1-complex-dimensional chart:
// geometric radii r_min..r_max, uniform angles, 8-connected (radial,
// angular, diagonal), chord lengths by the metric midpoint rule.
inline MetricMesh polar_annulus_mesh(const ModelMetric& metric, double r_min, double r_max, int n_r, int n_theta) {
    if (metric.n != 1) throw shape_error("polar_annulus_mesh: 1-dimensional charts only");
    if (n_r < 2 || n_theta < 3) throw resolution_error("polar_annulus_mesh: resolution too small");
    MetricMesh mesh;
    mesh.vertices.reserve(static_cast<size_t>(n_r) * n_theta);
    for (int i = 0; i < n_r; ++i) {
        double f = static_cast<double>(i) / (n_r - 1);
        double r = r_min * std::pow(r_max / r_min, f);
        for (int j = 0; j < n_theta; ++j) {
            double th = 2.0 * std::numbers::pi * j / n_theta;
            Eigen::VectorXcd w(1);
            w(0) = std::polar(r, th);
            mesh.vertices.push_back(w);
        }
    }
    mesh.adj.resize(mesh.vertices.size());
    auto vid = [&](int i, int j) { return i * n_theta + ((j % n_theta) + n_theta) % n_theta; };
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < n_theta; ++j)
            for (int di = 0; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj <= 0) continue; // each undirected edge once
                    int i2 = i + di;
                    if (i2 >= n_r) continue;
                    int a = vid(i, j), b = vid(i2, j + dj);
                    Eigen::VectorXcd pa = mesh.vertices[a], pb = mesh.vertices[b];
                    Eigen::VectorXcd mid = 0.5 * (pa + pb);
                    mesh.add_edge(a, b, metric.length_element(mid, pb - pa));
                }
    return mesh;
}

// Axis-aligned rectangle mesh (flat charts, test plumbing).
inline MetricMesh rect_mesh(const ModelMetric& metric, double x0, double x1, double y0, double y1, int nx, int ny) {
    if (metric.n != 1) throw shape_error("rect_mesh: 1-dimensional charts only");
    MetricMesh mesh;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            Eigen::VectorXcd w(1);
            w(0) = cd(x0 + (x1 - x0) * i / (nx - 1), y0 + (y1 - y0) * j / (ny - 1));
            mesh.vertices.push_back(w);
        }
    mesh.adj.resize(mesh.vertices.size());
    auto vid = [&](int i, int j) { return i * ny + j; };
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int di = 0; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj <= 0) continue;
                    int i2 = i + di, j2 = j + dj;
                    if (i2 < 0 || i2 >= nx || j2 < 0 || j2 >= ny) continue;
                    int a = vid(i, j), b = vid(i2, j2);
                    Eigen::VectorXcd pa = mesh.vertices[a], pb = mesh.vertices[b];
                    Eigen::VectorXcd mid = 0.5 * (pa + pb);
                    mesh.add_edge(a, b, metric.length_element(mid, pb - pa));
                }
    return mesh;
}

// Distinguished boundary S(rho/2) = { |w_j| = rho/2 } as an n-torus mesh in
// the angle coordinates; graph diameter under the induced metric.
inline double boundary_diameter(const ModelMetric& metric, double rho, int resolution) {
    const int n = metric.n;
    const double r = rho / 2.0;
    if (n == 1) {
        // Circle: exact intrinsic diameter from arc-length prefix sums.
        int N = resolution;
        std::vector<double> seg(N);
        double total = 0.0;
        for (int j = 0; j < N; ++j) {
            double a0 = 2.0 * std::numbers::pi * j / N;
            double a1 = 2.0 * std::numbers::pi * (j + 1) / N;
            Eigen::VectorXcd pa(1), pb(1);
            pa(0) = std::polar(r, a0);
            pb(0) = std::polar(r, a1);
            Eigen::VectorXcd mid = 0.5 * (pa + pb);
            seg[j] = metric.length_element(mid, pb - pa);
            total += seg[j];
        }
        // Diameter of a circle graph: max over pairs of min(cw, ccw).
        double best = 0.0;
        double acc = 0.0;
        for (int j = 0; j < N; ++j) {
            acc += seg[j];
            // distance from vertex 0 to vertex j+1
            double d = std::min(acc, total - acc);
            best = std::max(best, d);
        }
        return best;
    }
    // n-torus in angles with 3^n - 1 neighbor offsets.
    if (n > 3) throw shape_error("boundary_diameter: tori beyond n = 3 not supported");
    int N = resolution;
    long count = 1;
    for (int i = 0; i < n; ++i) count *= N;
    MetricMesh mesh;
    mesh.vertices.reserve(count);
    auto vertex_at = [&](const std::vector<int>& idx) {
        Eigen::VectorXcd w(n);
        for (int i = 0; i < n; ++i) w(i) = std::polar(r, 2.0 * std::numbers::pi * idx[i] / N);
        return w;
    };
    std::vector<int> idx(n, 0);
    for (long v = 0; v < count; ++v) {
        long rem = v;
        for (int i = 0; i < n; ++i) {
            idx[i] = static_cast<int>(rem % N);
            rem /= N;
        }
        mesh.vertices.push_back(vertex_at(idx));
    }
    mesh.adj.resize(count);
    long offsets = 1;
    for (int i = 0; i < n; ++i) offsets *= 3;
    for (long v = 0; v < count; ++v) {
        long rem = v;
        for (int i = 0; i < n; ++i) {
            idx[i] = static_cast<int>(rem % N);
            rem /= N;
        }
        for (long o = 1; o < offsets; ++o) {
            long orem = o;
            std::vector<int> nb = idx;
            for (int i = 0; i < n; ++i) {
                nb[i] = (nb[i] + static_cast<int>(orem % 3) - 1 + N) % N;
                orem /= 3;
            }
            long u = 0;
            for (int i = n - 1; i >= 0; --i) u = u * N + nb[i];
            if (u <= v) continue;
            Eigen::VectorXcd pa = mesh.vertices[v], pb = mesh.vertices[u];
            Eigen::VectorXcd mid = 0.5 * (pa + pb);
            mesh.add_edge(static_cast<int>(v), static_cast<int>(u), metric.length_element(mid, pb - pa));
        }
    }
    return mesh.diameter(std::max<long>(1, count / 256));
}

// ---------------------------------------------------------------------------
// Covering counts.

struct DivisorComponent {
    int coord = 0; // hyperplane {w_coord = 0}
    int order = 1; // orbifold order m along it
};

struct StratumCount {
    std::vector<int> component_indices;
    long boxes = 0;
};

struct CoveringReport {
    double rho = 0.0;
    long count = 0; // N(rho)
    std::vector<StratumCount> strata;
    std::vector<double> betas;
    std::vector<double> products; // rho^{2n-2+beta} N(rho)
    double box_dimension_hint = 0.0;
};

namespace detail {

// Centers on a square grid of pitch rho*sqrt(2) covering the unit disc.
inline long disc_cover_count(double rho) {
    double pitch = rho * std::numbers::sqrt2;
    long half = static_cast<long>(std::floor(1.0 / pitch)) + 1;
    long cnt = 0;
    for (long i = -half; i <= half; ++i)
        for (long j = -half; j <= half; ++j) {
            double cx = i * pitch, cy = j * pitch;
            if (cx * cx + cy * cy <= (1.0 + rho) * (1.0 + rho)) ++cnt;
        }
    return cnt;
}

} // namespace detail

// Boxes in the style of the divisor neighborhoods: around each stratum of
// the normal crossings configuration, polydiscs of radius rho^{m_j} in the
// divisor directions and rho in the free directions; counts per stratum and
// the decay products rho^{2n-2+beta} N(rho).
inline CoveringReport covering_report(int n, const std::vector<DivisorComponent>& components, double rho,
                                      std::vector<double> betas = {0.1, 0.5}) {
    if (!(rho > 0.0 && rho < 1.0)) throw domain_error("covering_report: need 0 < rho < 1", rho);
    if (components.empty()) throw shape_error("covering_report: empty divisor");
    for (const auto& c : components)
        if (c.coord < 0 || c.coord >= n) throw shape_error("covering_report: component coordinate out of range");

    CoveringReport rep;
    rep.rho = rho;
    rep.betas = betas;

    const int mu = static_cast<int>(components.size());
    long per_free = detail::disc_cover_count(rho);
    for (int mask = 1; mask < (1 << mu); ++mask) {
        StratumCount sc;
        long boxes = 1;
        int p = 0;
        for (int c = 0; c < mu; ++c)
            if (mask & (1 << c)) {
                sc.component_indices.push_back(c);
                ++p;
            }
        // Free complex directions: coordinates not pinned to zero.
        int free_dims = n - p;
        for (int f = 0; f < free_dims; ++f) boxes *= per_free;
        sc.boxes = boxes;
        rep.strata.push_back(sc);
        rep.count += boxes;
    }
    for (double beta : betas)
        rep.products.push_back(std::pow(rho, 2.0 * n - 2.0 + beta) * static_cast<double>(rep.count));
    return rep;
}

struct CoveringSweep {
    std::vector<CoveringReport> reports;
    bool products_decreasing = true;
    double fitted_dimension = 0.0; // slope of log N against log(1/rho)
};

inline CoveringSweep covering_sweep(int n, const std::vector<DivisorComponent>& components,
                                    const std::vector<double>& rhos, std::vector<double> betas = {0.1, 0.5}) {
    CoveringSweep sweep;
    for (double rho : rhos) sweep.reports.push_back(covering_report(n, components, rho, betas));
    for (size_t b = 0; b < betas.size(); ++b)
        for (size_t i = 0; i + 1 < sweep.reports.size(); ++i)
            if (!(sweep.reports[i + 1].products[b] < sweep.reports[i].products[b]))
                sweep.products_decreasing = false;
    // Box-dimension estimate of E from the covering counts.
    if (rhos.size() >= 2) {
        double mx = 0, my = 0;
        std::vector<double> xs, ys;
        for (const auto& r : sweep.reports) {
            xs.push_back(std::log(1.0 / r.rho));
            ys.push_back(std::log(static_cast<double>(r.count)));
        }
        for (size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= xs.size();
        my /= ys.size();
        double num = 0, den = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        sweep.fitted_dimension = den > 0 ? num / den : 0.0;
        for (auto& r : sweep.reports) r.box_dimension_hint = sweep.fitted_dimension;
    }
    return sweep;
}

// Least-squares fit of L(rho) ~= C rho (-log rho)^e over a sweep; the
// exponent is fitted, not assumed.
struct LogLengthFit {
    double C = 0.0;
    double exponent = 0.0;
};

inline LogLengthFit fit_log_length(const std::vector<double>& rhos, const std::vector<double>& lengths) {
    if (rhos.size() != lengths.size() || rhos.size() < 2) throw shape_error("fit_log_length: need matched sweeps");
    std::vector<double> xs, ys;
    for (size_t i = 0; i < rhos.size(); ++i) {
        xs.push_back(std::log(-std::log(rhos[i])));
        ys.push_back(std::log(lengths[i] / rhos[i]));
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    LogLengthFit fit;
    fit.exponent = den > 0 ? num / den : 0.0;
    double c = 0.0;
    for (size_t i = 0; i < rhos.size(); ++i)
        c = std::max(c, lengths[i] / (rhos[i] * std::pow(-std::log(rhos[i]), fit.exponent)));
    fit.C = c;
    return fit;
}

} // namespace skfib
