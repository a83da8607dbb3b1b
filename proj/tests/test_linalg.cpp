#include "snn/linalg.hpp"

#include <cmath>

#include <doctest.h>

#include "snn/errors.hpp"
#include "snn/rng.hpp"
#include "test_util.hpp"

using namespace snn;
using namespace snn::testutil;

TEST_CASE("spectral: diagonal Gram") {
    Mat F(2, 2);
    F << 2.0, 0.0, 0.0, 1.0;
    const SpectralData sd = spectral(F);
    CHECK(sd.lambda_max == doctest::Approx(4.0));
    CHECK(sd.lambda_min_nz == doctest::Approx(1.0));
    CHECK(sd.kappa == doctest::Approx(4.0));
    CHECK(sd.rank == 2);
}

TEST_CASE("spectral: 1x1 identity") {
    Mat F(1, 1);
    F << 1.0;
    const SpectralData sd = spectral(F);
    CHECK(sd.lambda_max == doctest::Approx(1.0));
    CHECK(sd.lambda_min_nz == doctest::Approx(1.0));
    CHECK(sd.kappa == doctest::Approx(1.0));
    CHECK(sd.rank == 1);
}

TEST_CASE("spectral: three-neuron example") {
    // FF^T has eigenpairs (1,-1,0)->1, (1,1,sqrt2)->2, (1,1,-sqrt2)->0,
    // checked by direct multiplication.
    const SpectralData sd = spectral(three_neuron_f());
    CHECK(sd.lambda_min_nz == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sd.lambda_max == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sd.kappa == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sd.rank == 2);
}

TEST_CASE("spectral: rejects the all-zero matrix") {
    CHECK_THROWS_AS(spectral(Mat::Zero(3, 2)), AllZeroMatrix);
}

TEST_CASE("project_rowspace examples") {
    SUBCASE("full rank keeps x") {
        Rng rng(11);
        const Mat F = random_matrix(rng, 4, 3);
        const Vec x = rng.gaussian_vector(3);
        CHECK((project_rowspace(F, x) - x).norm() < 1e-10);
    }
    SUBCASE("single row projects to the axis") {
        Mat F(1, 2);
        F << 1.0, 0.0;
        Vec x(2);
        x << 3.0, 4.0;
        const Vec xf = project_rowspace(F, x);
        CHECK(xf[0] == doctest::Approx(3.0));
        CHECK(xf[1] == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("three-neuron rank equals m") {
        Vec x(2);
        x << 1.0, 2.0;
        CHECK((project_rowspace(three_neuron_f(), x) - x).norm() < 1e-10);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(project_rowspace(three_neuron_f(), Vec::Zero(3)),
                        DimensionMismatch);
    }
}

TEST_CASE("gram_norm examples") {
    SUBCASE("identity gives the euclidean norm") {
        Rng rng(5);
        const Vec r = rng.gaussian_vector(4);
        CHECK(gram_norm(Mat::Identity(4, 4), r) == doctest::Approx(r.norm()));
    }
    SUBCASE("zero vector") {
        CHECK(gram_norm(three_neuron_f(), Vec::Zero(3)) == 0.0);
    }
    SUBCASE("three-neuron r=(1,1,0)") {
        Vec r(3);
        r << 1.0, 1.0, 0.0;
        CHECK(gram_norm(three_neuron_f(), r) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("pinv_gram_norm examples") {
    SUBCASE("rank-deficient explicit pseudo-inverse") {
        Mat F(2, 2);
        F << 1.0, 0.0, 0.0, 0.0;
        Vec w(2);
        w << 3.0, 4.0;
        CHECK(pinv_gram_norm(F, w) == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("zero vector") {
        CHECK(pinv_gram_norm(three_neuron_f(), Vec::Zero(3)) == 0.0);
    }
    SUBCASE("identity") {
        Rng rng(9);
        const Vec w = rng.gaussian_vector(3);
        CHECK(pinv_gram_norm(Mat::Identity(3, 3), w) == doctest::Approx(w.norm()));
    }
}

TEST_CASE("residual_l2 examples") {
    SUBCASE("exact solution") {
        Mat F = Mat::Identity(2, 2);
        Vec x(2);
        x << 1.0, 2.0;
        CHECK(residual_l2(F, x, x) == doctest::Approx(0.0));
        CHECK(residual_l2(F, x, Vec::Zero(2)) ==
              doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    }
    SUBCASE("three-neuron r=(0,1,sqrt2)") {
        Vec r(3);
        r << 0.0, 1.0, std::sqrt(2.0);
        Vec x(2);
        x << 1.0, 2.0;
        CHECK(residual_l2(three_neuron_f(), x, r) < 1e-12);
    }
}

TEST_CASE("matrix norm identities on random inputs") {
    Rng rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(6));
        const int m = 1 + static_cast<int>(rng.below(4));
        const Mat F = random_matrix(rng, n, m);
        if (F.norm() == 0.0) continue;
        const Vec r = rng.gaussian_vector(n);
        const Vec x = rng.gaussian_vector(m);
        const Mat gram = F * F.transpose();

        const double lhs1 = gram_norm(F, r);
        const double rhs1 = (F.transpose() * r).norm();
        CHECK(std::abs(lhs1 - rhs1) <= 1e-10 * (1.0 + rhs1));

        const double lhs2 = pinv_gram_norm(F, gram * r);
        CHECK(close_rel(lhs2, lhs1, 1e-9));

        const double lhs3 = pinv_gram_norm(F, F * x);
        const double rhs3 = project_rowspace(F, x).norm();
        CHECK(close_rel(lhs3, rhs3, 1e-9));
    }
}

TEST_CASE("project_rowspace is idempotent") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(5));
        const int m = 1 + static_cast<int>(rng.below(5));
        const Mat F = random_matrix(rng, n, m);
        if (F.norm() == 0.0) continue;
        const Vec x = rng.gaussian_vector(m);
        const Vec xf = project_rowspace(F, x);
        CHECK((project_rowspace(F, xf) - xf).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("Cauchy-Schwarz sanity anchor") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec a = rng.gaussian_vector(6);
        const Vec b = rng.gaussian_vector(6);
        CHECK(std::abs(a.dot(b)) <= a.norm() * b.norm() + 1e-12);
    }
}
