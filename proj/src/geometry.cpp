#include "snn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "snn/errors.hpp"

namespace snn {

namespace {

constexpr double kSingularTol = 1e-10;  // smallest singular value cutoff
constexpr double kMergeTol = 1e-9;      // vertex dedup distance
constexpr double kTightTol = 1e-9;      // wall tightness tolerance
constexpr double kConeTol = 1e-10;      // cone coefficient slack

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc = acc * (n - i) / (i + 1);
    return acc;
}

// Lexicographic size-k subsets of {0, ..., n-1}.
bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

Vec wall_normal(const Mat& F, int wall) {
    const int row = std::abs(wall) - 1;
    Vec normal = F.row(row).transpose();
    if (wall < 0) normal = -normal;
    return normal;
}

void sort_walls(ActiveSet& walls) {
    std::sort(walls.begin(), walls.end(), [](int a, int b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
        return a > b;  // +i before -i
    });
}

struct CellCandidate {
    Vec u_ideal;
    ActiveSet subset;
    Vec z;
};

}  // namespace

ActiveSet active_walls(const Mat& F, const Vec& u, double eta, SpikeMode mode,
                       double tol) {
    if (u.size() != F.cols())
        throw DimensionMismatch("active_walls: u length != m");
    if (!(tol > 0.0)) throw ConfigError("active_walls: tol must be > 0");
    ActiveSet walls;
    const Vec fu = F * u;
    for (Eigen::Index i = 0; i < fu.size(); ++i) {
        if (std::abs(fu[i] - eta) <= tol) walls.push_back(static_cast<int>(i) + 1);
        if (mode == SpikeMode::Signed && std::abs(-fu[i] - eta) <= tol)
            walls.push_back(-(static_cast<int>(i) + 1));
    }
    sort_walls(walls);
    return walls;
}

VertexEnumeration enumerate_vertices(const Mat& F, double eta,
                                     long long enumeration_cap) {
    const int n = static_cast<int>(F.rows());
    const int m = static_cast<int>(F.cols());
    if (n < m) throw ConfigError("vertex enumeration requires n >= m");
    const double systems = binomial(n, m) * std::pow(2.0, m);
    if (systems > static_cast<double>(enumeration_cap))
        throw EnumerationCapExceeded("C(n,m)*2^m = " + std::to_string(systems) +
                                     " exceeds cap");

    VertexEnumeration out;
    std::vector<int> subset(m);
    for (int i = 0; i < m; ++i) subset[i] = i;
    do {
        Mat rows(m, m);
        for (int i = 0; i < m; ++i) rows.row(i) = F.row(subset[i]);
        Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.singularValues()[m - 1] < kSingularTol) {
            out.singular_systems += (1LL << m);
            continue;
        }
        Eigen::PartialPivLU<Mat> lu(rows);
        for (int mask = 0; mask < (1 << m); ++mask) {
            Vec sigma(m);
            for (int i = 0; i < m; ++i) sigma[i] = (mask >> i) & 1 ? 1.0 : -1.0;
            const Vec vertex = lu.solve(eta * sigma);
            bool duplicate = false;
            for (const Vec& seen : out.vertices) {
                if ((seen - vertex).norm() <= kMergeTol) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) out.vertices.push_back(vertex);
        }
    } while (next_combination(subset, n));
    return out;
}

NicenessReport niceness(const Mat& F, long long enumeration_cap) {
    const int n = static_cast<int>(F.rows());
    const int m = static_cast<int>(F.cols());
    if (n < m) throw ConfigError("niceness requires n >= m");
    for (int i = 0; i < n; ++i) {
        if (std::abs(F.row(i).norm() - 1.0) > 1e-9)
            throw RowsNotNormalized("row " + std::to_string(i) +
                                    " does not have unit norm");
    }
    const double systems = binomial(n, m) * std::pow(2.0, m);
    if (systems > static_cast<double>(enumeration_cap))
        throw EnumerationCapExceeded("C(n,m)*2^m = " + std::to_string(systems) +
                                     " exceeds cap");

    NicenessReport report;
    report.enumerated_systems = static_cast<long long>(systems);
    report.gamma_nondegen = std::numeric_limits<double>::infinity();
    report.gamma_coeff = std::numeric_limits<double>::infinity();

    struct VertexInfo {
        Vec point;
        std::vector<int> subset;
        std::vector<int> sign;
    };
    std::vector<VertexInfo> vertices;

    std::vector<int> subset(m);
    for (int i = 0; i < m; ++i) subset[i] = i;
    do {
        Mat rows(m, m);
        for (int i = 0; i < m; ++i) rows.row(i) = F.row(subset[i]);

        // condition (1): distance of each row to the span of the others
        for (int i = 0; i < m; ++i) {
            double dist;
            const Vec fi = rows.row(i).transpose();
            if (m == 1) {
                dist = fi.norm();
            } else {
                Mat others(m, m - 1);
                int c = 0;
                for (int j = 0; j < m; ++j)
                    if (j != i) others.col(c++) = rows.row(j).transpose();
                const Vec coeffs = others.colPivHouseholderQr().solve(fi);
                dist = (fi - others * coeffs).norm();
            }
            if (dist < report.gamma_nondegen) {
                report.gamma_nondegen = dist;
                report.nondegen_subset = subset;
                report.nondegen_row = subset[i];
            }
        }

        Eigen::JacobiSVD<Mat> svd(rows);
        if (svd.singularValues()[m - 1] < kSingularTol) {
            report.degenerate_subset = true;
            report.gamma_vertex = 0.0;
            report.gamma_coeff = 0.0;
            if (report.coeff_subset.empty()) {
                report.coeff_subset = subset;
                report.coeff_sign.assign(m, 1);
                report.coeff_index = subset[0];
            }
            continue;
        }

        Eigen::PartialPivLU<Mat> lu(rows);
        Eigen::PartialPivLU<Mat> lu_t(rows.transpose());
        for (int mask = 0; mask < (1 << m); ++mask) {
            Vec sigma(m);
            std::vector<int> sign(m);
            for (int i = 0; i < m; ++i) {
                sign[i] = (mask >> i) & 1 ? 1 : -1;
                sigma[i] = sign[i];
            }
            // condition (2) raw material: the vertex F_G u = sigma
            vertices.push_back({lu.solve(sigma), subset, sign});
            // condition (3): expansion coefficients F_G^T z = sigma
            const Vec z = lu_t.solve(sigma);
            for (int i = 0; i < m; ++i) {
                if (std::abs(z[i]) < report.gamma_coeff) {
                    report.gamma_coeff = std::abs(z[i]);
                    report.coeff_subset = subset;
                    report.coeff_sign = sign;
                    report.coeff_index = subset[i];
                }
            }
        }
    } while (next_combination(subset, n));

    if (!report.degenerate_subset) {
        if (vertices.size() > 20000)
            throw EnumerationCapExceeded("too many vertices for pairwise scan");
        // merge duplicates, then take the minimum pairwise distance
        std::vector<VertexInfo> unique_vertices;
        for (const auto& cand : vertices) {
            bool seen = false;
            for (const auto& kept : unique_vertices) {
                if ((kept.point - cand.point).norm() <= kMergeTol) {
                    seen = true;
                    break;
                }
            }
            if (!seen) unique_vertices.push_back(cand);
        }
        report.gamma_vertex = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < unique_vertices.size(); ++a) {
            for (std::size_t b = a + 1; b < unique_vertices.size(); ++b) {
                const double dist =
                    (unique_vertices[a].point - unique_vertices[b].point).norm();
                if (dist < report.gamma_vertex) {
                    report.gamma_vertex = dist;
                    report.vertex_subset_a = unique_vertices[a].subset;
                    report.vertex_sign_a = unique_vertices[a].sign;
                    report.vertex_subset_b = unique_vertices[b].subset;
                    report.vertex_sign_b = unique_vertices[b].sign;
                }
            }
        }
        if (!std::isfinite(report.gamma_vertex)) report.gamma_vertex = 0.0;
    }

    if (!std::isfinite(report.gamma_nondegen)) report.gamma_nondegen = 0.0;
    if (!std::isfinite(report.gamma_coeff)) report.gamma_coeff = 0.0;
    // values at round-off scale are genuine degeneracies
    if (report.gamma_nondegen < 1e-12) report.gamma_nondegen = 0.0;
    if (report.gamma_vertex < 1e-12) report.gamma_vertex = 0.0;
    if (report.gamma_coeff < 1e-12) report.gamma_coeff = 0.0;
    report.gamma = std::min({report.gamma_nondegen, report.gamma_vertex,
                             report.gamma_coeff});
    return report;
}

IdealCoupling ideal_coupling(const Mat& F, const Vec& u, double eta,
                             double tau_cpl, SpikeMode mode,
                             long long enumeration_cap) {
    if (u.size() != F.cols())
        throw DimensionMismatch("ideal_coupling: u length != m");
    if (!(tau_cpl > 0.0 && tau_cpl < 1.0))
        throw ConfigError("ideal_coupling: tau_cpl must be in (0, 1)");
    const double violation = dual_feasibility_violation({F, Vec::Zero(F.cols())},
                                                        u, eta, mode);
    if (violation > kTightTol)
        throw PointOutsidePolytope("u violates the eta-polytope by " +
                                   std::to_string(violation));

    const int n = static_cast<int>(F.rows());
    const int m = static_cast<int>(F.cols());
    const double target = (1.0 - tau_cpl) * eta;

    std::vector<int> walls;
    for (int i = 1; i <= n; ++i) {
        walls.push_back(i);
        if (mode == SpikeMode::Signed) walls.push_back(-i);
    }
    const int w_total = static_cast<int>(walls.size());
    double subset_count = 0.0;
    for (int k = 0; k <= m; ++k) subset_count += binomial(w_total, k);
    if (subset_count > static_cast<double>(enumeration_cap))
        throw EnumerationCapExceeded("ideal_coupling subset count exceeds cap");

    auto wall_value = [&](int wall, const Vec& point) {
        return wall_normal(F, wall).dot(point);
    };

    std::vector<CellCandidate> accepted;
    auto try_subset = [&](const std::vector<int>& chosen) {
        const int k = static_cast<int>(chosen.size());
        Vec z = Vec::Zero(k);
        Vec u_ideal = u;
        if (k > 0) {
            Mat W(k, m);
            for (int i = 0; i < k; ++i)
                W.row(i) = wall_normal(F, chosen[i]).transpose();
            const Mat gram = W * W.transpose();
            Eigen::FullPivLU<Mat> lu(gram);
            lu.setThreshold(1e-12);
            if (lu.rank() < k) return;  // degenerate wall combination
            Vec rhs = W * u;
            rhs.array() -= target;
            z = lu.solve(rhs);
            if (z.minCoeff() < -kConeTol) return;
            u_ideal = u - W.transpose() * z;
        }
        for (int wall : walls) {
            if (std::find(chosen.begin(), chosen.end(), wall) != chosen.end())
                continue;
            if (wall_value(wall, u_ideal) > target + kTightTol) return;
        }
        ActiveSet subset(chosen.begin(), chosen.end());
        accepted.push_back({u_ideal, subset, z});
    };

    try_subset({});
    for (int k = 1; k <= m; ++k) {
        if (k > w_total) break;
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        do {
            std::vector<int> chosen(k);
            bool paired = false;
            for (int i = 0; i < k; ++i) chosen[i] = walls[idx[i]];
            for (int i = 0; i < k && !paired; ++i)
                for (int j = i + 1; j < k; ++j)
                    if (chosen[i] == -chosen[j]) paired = true;
            if (!paired) try_subset(chosen);
        } while (next_combination(idx, w_total));
    }

    if (accepted.empty())
        throw NoCellFound("no cell of the shrunken polytope contains u");

    // Candidates that land on the same u_ideal are the same cell reached
    // through nested wall subsets; genuinely different u_ideal points mean
    // the partition is ambiguous (degenerate F).
    const CellCandidate* best = &accepted.front();
    for (const auto& cand : accepted) {
        if ((cand.u_ideal - best->u_ideal).norm() > 1e-8)
            throw MultipleCells("u matches several cells; F looks degenerate");
        if (cand.subset.size() < best->subset.size()) best = &cand;
    }

    IdealCoupling result;
    result.u_ideal = best->u_ideal;
    result.tau_cpl = tau_cpl;
    // canonical active set: every wall tight at u_ideal, zero-padded z
    result.gamma_set = active_walls(F, best->u_ideal, target, mode, kTightTol);
    result.z = Vec::Zero(static_cast<Eigen::Index>(result.gamma_set.size()));
    for (std::size_t i = 0; i < result.gamma_set.size(); ++i) {
        for (std::size_t j = 0; j < best->subset.size(); ++j) {
            if (best->subset[j] == result.gamma_set[i]) {
                result.z[static_cast<Eigen::Index>(i)] =
                    std::max(0.0, best->z[static_cast<Eigen::Index>(j)]);
            }
        }
    }
    return result;
}

Vec ideal_solution(const Mat& F, const Vec& x, const ActiveSet& gamma_set) {
    if (x.size() != F.cols())
        throw DimensionMismatch("ideal_solution: x length != m");
    const int n = static_cast<int>(F.rows());
    Vec r = Vec::Zero(n);
    const int k = static_cast<int>(gamma_set.size());
    if (k == 0) return r;

    // Columns of the cone generators.
    Mat A(F.cols(), k);
    for (int j = 0; j < k; ++j) A.col(j) = wall_normal(F, gamma_set[j]);

    // Lawson-Hanson active-set iteration with exact normal-equation solves.
    constexpr double kKktTol = 1e-10;
    Vec y = Vec::Zero(k);
    std::vector<bool> passive(k, false);
    const int max_outer = 10 * k + 20;
    for (int outer = 0; outer < max_outer; ++outer) {
        const Vec dual = A.transpose() * (x - A * y);
        int best = -1;
        double best_val = kKktTol;
        for (int j = 0; j < k; ++j) {
            if (!passive[j] && dual[j] > best_val) {
                best_val = dual[j];
                best = j;
            }
        }
        if (best < 0) break;  // KKT satisfied
        passive[best] = true;

        for (;;) {
            std::vector<int> pidx;
            for (int j = 0; j < k; ++j)
                if (passive[j]) pidx.push_back(j);
            Mat Ap(F.cols(), pidx.size());
            for (std::size_t c = 0; c < pidx.size(); ++c)
                Ap.col(static_cast<Eigen::Index>(c)) = A.col(pidx[c]);
            const Vec zp = Ap.colPivHouseholderQr().solve(x);
            if (zp.minCoeff() > 0.0) {
                y.setZero();
                for (std::size_t c = 0; c < pidx.size(); ++c)
                    y[pidx[c]] = zp[static_cast<Eigen::Index>(c)];
                break;
            }
            // shrink toward the feasible segment and drop a zeroed variable
            double scale = 1.0;
            for (std::size_t c = 0; c < pidx.size(); ++c) {
                const double zc = zp[static_cast<Eigen::Index>(c)];
                if (zc <= 0.0) {
                    const double yc = y[pidx[c]];
                    const double candidate = yc / (yc - zc);
                    if (candidate < scale) scale = candidate;
                }
            }
            Vec y_new = y;
            for (std::size_t c = 0; c < pidx.size(); ++c) {
                const Eigen::Index ci = static_cast<Eigen::Index>(c);
                y_new[pidx[c]] = y[pidx[c]] + scale * (zp[ci] - y[pidx[c]]);
            }
            y = y_new;
            for (int j = 0; j < k; ++j) {
                if (passive[j] && y[j] <= 1e-14) {
                    y[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }

    for (int j = 0; j < k; ++j) {
        const int wall = gamma_set[j];
        r[std::abs(wall) - 1] += (wall > 0 ? 1.0 : -1.0) * y[j];
    }
    return r;
}

}  // namespace snn
