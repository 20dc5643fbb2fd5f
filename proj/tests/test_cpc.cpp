#include <numbers>

#include "doctest.h"
#include "ktensors/cpc.hpp"
#include "ktensors/projection.hpp"
#include "ktensors/simgen.hpp"
#include "support.hpp"

using namespace kt;

namespace {

PsdMatrix two_one() {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  return make_psd(m);
}

PsdMatrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) d(i++) = x;
  return make_psd(d.asDiagonal().toDenseMatrix());
}

// Family sharing eigenvectors u with random spectra.
std::vector<PsdMatrix> commuting_family(const Matrix& u, int n, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.5, 6.0);
  std::vector<PsdMatrix> out;
  for (int i = 0; i < n; ++i) {
    Vector l(u.cols());
    for (int j = 0; j < l.size(); ++j) l(j) = unif(rng);
    out.push_back(make_psd(u * l.asDiagonal() * u.transpose()));
  }
  return out;
}

std::vector<PsdMatrix> random_sample(int p, int n, Rng& rng) {
  std::vector<PsdMatrix> out;
  for (int i = 0; i < n; ++i) out.push_back(random_psd(p, 0.1, 5.0, rng));
  return out;
}

}  // namespace

TEST_SUITE("cpc") {

TEST_CASE("cpc_objective on analytic samples") {
  const std::vector<PsdMatrix> diagonal{diag({1, 2}), diag({3, 4})};
  CHECK(cpc_objective(diagonal, OrthonormalFrame::identity(2)) == 0.0);
  const std::vector<PsdMatrix> single{two_one()};
  CHECK(cpc_objective(single, sym_eigen(two_one()).vectors) < 1e-24);
  const std::vector<PsdMatrix> mixed{two_one(), diag({3, 1})};
  CHECK(cpc_objective(mixed, OrthonormalFrame::identity(2)) == doctest::Approx(1.0));
}

TEST_CASE("fg on a single matrix is its eigendecomposition") {
  const std::vector<PsdMatrix> single{two_one()};
  const CpcSolution s = fg_cpc(single);
  CHECK(s.stationarity_residual < 1e-8);
  CHECK(frame_angle(s.frame, sym_eigen(two_one()).vectors) < 1e-8);
}

TEST_CASE("fg recovers exact common eigenvectors") {
  Rng rng(31);
  const OrthonormalFrame u = random_orthonormal(4, rng);
  const auto sample = commuting_family(u.matrix(), 12, rng);
  const CpcSolution s = fg_cpc(sample, {}, OrthonormalFrame::identity(4));
  CHECK(s.converged);
  CHECK(frame_angle(s.frame, u) < 1e-6);
  CHECK(frame_angle(s.frame, fast_cpc(sample).frame) < 1e-6);
}

TEST_CASE("fg matches a rotation-angle grid search in two dimensions") {
  Matrix a(2, 2), b(2, 2);
  a << 3.0, 1.0, 1.0, 2.0;
  b << 1.5, -0.4, -0.4, 4.0;
  const std::vector<PsdMatrix> sample{make_psd(a), make_psd(b)};

  double best_theta = 0, best_value = -1;
  for (double theta = 0; theta < std::numbers::pi / 2; theta += 1e-4) {
    const Matrix r = testing::rotation2(theta);
    double value = 0;
    for (const auto& m : sample) {
      const Matrix t = r.transpose() * m.matrix() * r;
      value += t(0, 0) * t(0, 0) + t(1, 1) * t(1, 1);
    }
    if (value > best_value) {
      best_value = value;
      best_theta = theta;
    }
  }
  const CpcSolution s = fg_cpc(sample);
  CHECK(frame_angle(s.frame, OrthonormalFrame::make(testing::rotation2(best_theta))) < 1e-3);
}

TEST_CASE("fg objective never increases and stationarity is reached") {
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    const auto sample = random_sample(4, 30, rng);
    const CpcSolution s = fg_cpc(sample, {}, random_orthonormal(4, rng));
    CHECK(s.converged);
    CHECK(s.stationarity_residual < 1e-7);
    CHECK(testing::non_increasing(s.objective_trace, 1e-12));
    CHECK(s.objective <= fast_cpc(sample).objective + 1e-12);
  }
}

TEST_CASE("one fg sweep reduces stationarity from a random frame") {
  Rng rng(23);
  const auto sample = random_sample(3, 8, rng);
  const OrthonormalFrame start = random_orthonormal(3, rng);
  const double before = stationarity_residual(sample, start);
  CHECK(before > 0);
  FgOptions one;
  one.max_sweeps = 1;
  const CpcSolution s = fg_cpc(sample, one, start);
  CHECK(stationarity_residual(sample, s.frame) < before);
}

TEST_CASE("fg is equivariant under joint rotation") {
  Rng rng(41);
  const auto sample = random_sample(3, 10, rng);
  const OrthonormalFrame init = random_orthonormal(3, rng);
  const Matrix q = random_orthonormal(3, rng).matrix();
  std::vector<PsdMatrix> rotated;
  for (const auto& m : sample) rotated.push_back(make_psd(q * m.matrix() * q.transpose()));
  const CpcSolution base = fg_cpc(sample, {}, init);
  const CpcSolution turned = fg_cpc(rotated, {}, OrthonormalFrame::make(q * init.matrix()));
  CHECK(frame_angle(turned.frame, OrthonormalFrame::make(q * base.frame.matrix())) < 1e-6);
}

TEST_CASE("fast_cpc uses eigenvectors of the sum") {
  const std::vector<PsdMatrix> sample{diag({1, 2}), diag({3, 4})};
  const Matrix f = fast_cpc(sample).frame.matrix();
  CHECK(std::abs(f(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(f(0, 1)) == doctest::Approx(1.0));
  const std::vector<PsdMatrix> single{two_one()};
  CHECK(frame_angle(fast_cpc(single).frame, sym_eigen(two_one()).vectors) < 1e-10);
}

TEST_CASE("fast_cpc approaches the Wishart scale eigenvectors") {
  Rng rng(55);
  const OrthonormalFrame u = random_orthonormal(4, rng);
  Vector d(4);
  d << 8, 4, 2, 1;
  const Matrix scale = u.matrix() * d.asDiagonal() * u.matrix().transpose();
  std::vector<PsdMatrix> sample;
  for (int i = 0; i < 200; ++i) sample.push_back(sample_wishart(scale, 50, rng));
  CHECK(frame_angle(fast_cpc(sample).frame, u) < 0.1);
}

TEST_CASE("stationarity residual vanishes at shared eigenvectors") {
  const std::vector<PsdMatrix> single{two_one()};
  CHECK(stationarity_residual(single, sym_eigen(two_one()).vectors) < 1e-12);
  Rng rng(3);
  const OrthonormalFrame u = random_orthonormal(5, rng);
  const auto family = commuting_family(u.matrix(), 6, rng);
  CHECK(stationarity_residual(family, u) < 1e-10);
}

TEST_CASE("flury criterion") {
  const std::vector<PsdMatrix> single{two_one()};
  CHECK(flury_criterion(single, OrthonormalFrame::identity(2)) == doctest::Approx(std::log(4.0) - std::log(3.0)));
  CHECK(std::abs(flury_criterion(single, sym_eigen(two_one()).vectors)) < 1e-12);
  Rng rng(7);
  for (int t = 0; t < 40; ++t) {
    const auto sample = random_sample(3, 4, rng);
    CHECK(flury_criterion(sample, random_orthonormal(3, rng)) >= -1e-12);
  }
}

TEST_CASE("empty sample is rejected") {
  const std::vector<PsdMatrix> none;
  CHECK_THROWS_AS(fg_cpc(none), Error);
  CHECK_THROWS_AS(fast_cpc(none), Error);
}

}
