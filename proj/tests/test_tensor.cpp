#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <rmtc/rng.hpp>
#include <rmtc/tensor.hpp>
#include <vector>

using namespace rmtc;

namespace {

DenseTensor random_tensor(std::vector<std::size_t> dims, SplitMix64& rng) {
    DenseTensor t(std::move(dims));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 2.0 * rng.next_double() - 1.0;
    return t;
}

}  // namespace

TEST_CASE("unfold of the 2x2x2 example") {
    // x111=1 x211=2 x121=3 x221=4 x112=5 x212=6 x122=7 x222=8
    const DenseTensor t({2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
    const Unfolding u = unfold(t, 0);
    REQUIRE(u.values.rows() == 2);
    REQUIRE(u.values.cols() == 4);
    const std::vector<double> row0 = {1, 3, 5, 7};
    const std::vector<double> row1 = {2, 4, 6, 8};
    for (int j = 0; j < 4; ++j) {
        REQUIRE(u.values(0, j) == row0[static_cast<std::size_t>(j)]);
        REQUIRE(u.values(1, j) == row1[static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("mode-0 unfolding of a matrix is the matrix itself") {
    SplitMix64 rng(1);
    const DenseTensor t = random_tensor({4, 6}, rng);
    const Unfolding u = unfold(t, 0);
    REQUIRE(u.values.rows() == 4);
    REQUIRE(u.values.cols() == 6);
    for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t r = 0; r < 4; ++r)
            REQUIRE(u.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) ==
                    t[r + 4 * c]);
}

TEST_CASE("unfolding an order-1 tensor gives an n x 1 matrix") {
    const DenseTensor t({5}, {1, 2, 3, 4, 5});
    const Unfolding u = unfold(t, 0);
    REQUIRE(u.values.rows() == 5);
    REQUIRE(u.values.cols() == 1);
    for (int r = 0; r < 5; ++r) REQUIRE(u.values(r, 0) == t[static_cast<std::size_t>(r)]);
}

TEST_CASE("refold inverts unfold bitwise for random tensors") {
    SplitMix64 rng(7);
    const std::vector<std::vector<std::size_t>> shapes = {
        {6, 4}, {3, 5, 2}, {2, 3, 2, 4}, {1, 7}, {4, 1, 3}};
    for (const auto& dims : shapes) {
        const DenseTensor t = random_tensor(dims, rng);
        for (int mode = 0; mode < static_cast<int>(dims.size()); ++mode) {
            const DenseTensor back = refold(unfold(t, mode));
            REQUIRE(back.dims() == t.dims());
            REQUIRE(back.values() == t.values());  // exact
        }
    }
}

TEST_CASE("refolding the 2x4 example recovers the original tensor") {
    Unfolding u;
    u.mode = 0;
    u.parent_dims = {2, 2, 2};
    u.values.resize(2, 4);
    u.values << 1, 3, 5, 7, 2, 4, 6, 8;
    const DenseTensor t = refold(u);
    const std::vector<double> expected = {1, 2, 3, 4, 5, 6, 7, 8};
    REQUIRE(t.values() == expected);
}

TEST_CASE("scalar tensor round trip") {
    const DenseTensor t({1}, {3.25});
    const DenseTensor back = refold(unfold(t, 0));
    REQUIRE(back.values() == t.values());
}

TEST_CASE("unfolding isometry") {
    SplitMix64 rng(11);
    const DenseTensor t = random_tensor({4, 3, 5}, rng);
    const double n = norm(t);
    for (int mode = 0; mode < 3; ++mode) {
        const double f = unfold(t, mode).values.norm();
        REQUIRE(std::abs(f - n) <= 1e-12 * n);
    }
}

TEST_CASE("mode multiply by identity and zero") {
    SplitMix64 rng(3);
    const DenseTensor t = random_tensor({3, 4, 2}, rng);
    for (int mode = 0; mode < 3; ++mode) {
        const auto n = static_cast<Eigen::Index>(t.dims()[static_cast<std::size_t>(mode)]);
        const DenseTensor same = mode_multiply(t, mode, Eigen::MatrixXd::Identity(n, n));
        for (std::size_t i = 0; i < t.size(); ++i)
            REQUIRE(same[i] == Catch::Approx(t[i]).margin(1e-15));
        const DenseTensor zero = mode_multiply(t, mode, Eigen::MatrixXd::Zero(n, n));
        for (std::size_t i = 0; i < t.size(); ++i) REQUIRE(zero[i] == 0.0);
    }
}

TEST_CASE("mode multiply swaps slices with a permutation matrix") {
    const DenseTensor t({2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
    Eigen::MatrixXd y(2, 2);
    y << 0, 1, 1, 0;
    const DenseTensor swapped = mode_multiply(t, 0, y);
    // Swapping the two mode-0 slices exchanges adjacent value pairs.
    const std::vector<double> expected = {2, 1, 4, 3, 6, 5, 8, 7};
    REQUIRE(swapped.values() == expected);
}

TEST_CASE("mode multiply agrees with unfolding algebra") {
    SplitMix64 rng(19);
    const DenseTensor t = random_tensor({3, 4, 2}, rng);
    for (int mode = 0; mode < 3; ++mode) {
        const auto n = static_cast<Eigen::Index>(t.dims()[static_cast<std::size_t>(mode)]);
        Eigen::MatrixXd y(n + 1, n);
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = 2.0 * rng.next_double() - 1.0;
        const DenseTensor z = mode_multiply(t, mode, y);
        REQUIRE(z.dims()[static_cast<std::size_t>(mode)] == static_cast<std::size_t>(n + 1));
        const Eigen::MatrixXd direct = y * unfold(t, mode).values;
        const Eigen::MatrixXd via = unfold(z, mode).values;
        REQUIRE((direct - via).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("inner and norm") {
    const DenseTensor t({2, 2}, {1, 2, 3, 4});
    REQUIRE(norm(t) == Catch::Approx(std::sqrt(30.0)).epsilon(1e-14));
    REQUIRE(inner(t, t) == Catch::Approx(norm(t) * norm(t)).epsilon(1e-12));
    const DenseTensor zero({2, 2});
    REQUIRE(inner(t, zero) == 0.0);
}

TEST_CASE("argument validation") {
    const DenseTensor t({2, 3}, {1, 2, 3, 4, 5, 6});
    REQUIRE_THROWS_AS(unfold(t, -1), std::invalid_argument);
    REQUIRE_THROWS_AS(unfold(t, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(mode_multiply(t, 0, Eigen::MatrixXd::Identity(3, 3)),
                      std::invalid_argument);
    const DenseTensor other({3, 2});
    REQUIRE_THROWS_AS(inner(t, other), std::invalid_argument);
    REQUIRE_THROWS_AS(DenseTensor({2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(DenseTensor({0, 2}), std::invalid_argument);
    REQUIRE_THROWS_AS(DenseTensor(std::vector<std::size_t>{}), std::invalid_argument);

    Unfolding u = unfold(t, 0);
    u.parent_dims = {4, 3};
    REQUIRE_THROWS_AS(refold(u), std::invalid_argument);
}
