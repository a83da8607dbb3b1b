#pragma once

#include <vector>

#include "snn/linalg.hpp"
#include "snn/problems.hpp"

namespace snn {

// Wall indices are 1-based and signed: +i is the wall F_i^T u = eta, -i is
// the mirror wall -F_i^T u = eta (signed mode only).
using ActiveSet = std::vector<int>;

// Walls tight at u within tol.
ActiveSet active_walls(const Mat& F, const Vec& u, double eta, SpikeMode mode,
                       double tol);

struct VertexEnumeration {
    std::vector<Vec> vertices;        // deduplicated within 1e-9
    long long singular_systems = 0;   // size-m subsets skipped as singular
};

// All solutions of F_G u = eta * sigma over size-m row subsets G and sign
// vectors sigma in {-1,1}^m.
VertexEnumeration enumerate_vertices(const Mat& F, double eta,
                                     long long enumeration_cap = 1000000);

struct NicenessReport {
    double gamma_nondegen = 0.0;
    double gamma_vertex = 0.0;
    double gamma_coeff = 0.0;
    double gamma = 0.0;
    long long enumerated_systems = 0;
    bool degenerate_subset = false;

    // arg-min witnesses (0-based row indices, signs in {-1,+1})
    std::vector<int> nondegen_subset;
    int nondegen_row = -1;
    std::vector<int> vertex_subset_a, vertex_sign_a;
    std::vector<int> vertex_subset_b, vertex_sign_b;
    std::vector<int> coeff_subset, coeff_sign;
    int coeff_index = -1;
};

// The three geometric non-degeneracy quantities and their minimum gamma(F).
// Requires unit-norm rows; vertices are taken at eta = 1.
NicenessReport niceness(const Mat& F, long long enumeration_cap = 1000000);

struct IdealCoupling {
    Vec u_ideal;
    ActiveSet gamma_set;  // walls tight at u_ideal in the shrunken polytope
    Vec z;                // cone coefficients, aligned with gamma_set, z >= 0
    double tau_cpl = 0.0;
};

// Unique representative of u in the polytope shrunk by (1 - tau_cpl):
// u = u_ideal + sum_w z_w n_w with z >= 0 and exactly gamma_set tight.
IdealCoupling ideal_coupling(const Mat& F, const Vec& u, double eta,
                             double tau_cpl, SpikeMode mode,
                             long long enumeration_cap = 1000000);

// Conic projection of x onto the cone of the walls in gamma_set: minimizer
// of 0.5 ||x - F^T r||^2 with support confined to gamma_set and the sign of
// each r_i fixed by the wall's sign. Empty set gives the zero vector.
Vec ideal_solution(const Mat& F, const Vec& x, const ActiveSet& gamma_set);

}  // namespace snn
