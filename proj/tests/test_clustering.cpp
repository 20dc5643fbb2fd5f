#include <numbers>

#include "doctest.h"
#include "ktensors/clustering.hpp"
#include "ktensors/evalbench.hpp"
#include "ktensors/projection.hpp"
#include "ktensors/simgen.hpp"
#include "support.hpp"

using namespace kt;

namespace {

LabeledSample cook(double noise, double separation, std::uint64_t seed, int n = 20) {
  ScenarioConfig c;
  c.generator = Generator::kCook;
  c.noise_level = noise;
  c.separation = separation;
  c.n_per_cluster = n;
  c.seed = seed;
  return gen_cook(c);
}

FitConfig config(Algorithm a, int k = 2, std::uint64_t seed = 1, int restarts = 10) {
  FitConfig f;
  f.algorithm = a;
  f.k = k;
  f.seed = seed;
  f.restarts = restarts;
  return f;
}

constexpr Algorithm kAll[] = {Algorithm::kLloyd, Algorithm::kFast, Algorithm::kHartigan};

}  // namespace

TEST_SUITE("clustering") {

TEST_CASE("assign_all with exact frames") {
  const LabeledSample s = cook(0.0, 0.8, 3);
  const Assignment a = assign_all(s.matrices, s.frames);
  CHECK(a.loss < 1e-10);
  CHECK(accuracy(a.labels, s.labels, 2) == 1.0);

  const std::vector<OrthonormalFrame> one{OrthonormalFrame::identity(5)};
  const Assignment b = assign_all(s.matrices, one);
  double expected = 0;
  for (const auto& m : s.matrices) expected += residual_distance_sq(m, one[0]);
  CHECK(b.loss == doctest::Approx(expected));
  for (int l : b.labels) CHECK(l == 0);
}

TEST_CASE("assign_all matches per-observation brute force in two dimensions") {
  Rng rng(12);
  const std::vector<OrthonormalFrame> frames{OrthonormalFrame::identity(2),
                                             OrthonormalFrame::make(testing::rotation2(std::numbers::pi / 4))};
  std::vector<PsdMatrix> sample;
  std::uniform_real_distribution<double> unif(0.5, 4.0);
  for (int i = 0; i < 40; ++i) {
    const Matrix& u = frames[static_cast<std::size_t>(i % 2)].matrix();
    Vector l(2);
    l << unif(rng), unif(rng);
    Matrix noise = 0.2 * testing::random_symmetric(2, rng);
    sample.push_back(make_psd(u * l.asDiagonal() * u.transpose() + noise, true));
  }
  const Assignment a = assign_all(sample, frames);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Matrix& m = sample[i].matrix();
    const double off_identity = 2 * m(0, 1) * m(0, 1);
    const Matrix r = frames[1].matrix().transpose() * m * frames[1].matrix();
    const double off_rotated = 2 * r(0, 1) * r(0, 1);
    CHECK(a.labels[i] == (off_rotated < off_identity ? 1 : 0));
  }
}

TEST_CASE("total loss on analytic input and monotone in the frame set") {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const std::vector<PsdMatrix> sample{make_psd(m)};
  const std::vector<OrthonormalFrame> id{OrthonormalFrame::identity(2)};
  CHECK(total_loss(sample, id) == doctest::Approx(2.0));

  const LabeledSample s = cook(0.3, 0.5, 8);
  Rng rng(8);
  std::vector<OrthonormalFrame> frames{random_orthonormal(5, rng)};
  double previous = total_loss(s.matrices, frames);
  for (int h = 0; h < 4; ++h) {
    frames.push_back(random_orthonormal(5, rng));
    const double now = total_loss(s.matrices, frames);
    CHECK(now <= previous);
    previous = now;
  }
}

TEST_CASE("every variant recovers zero-noise clusters") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const LabeledSample s = cook(0.0, 0.5, seed);
    for (Algorithm a : kAll) {
      const ClusterModel m = fit(s.matrices, config(a, 2, seed));
      CHECK(m.loss < 1e-10);
      CHECK(accuracy(m.assignments, s.labels, 2) == 1.0);
    }
  }
}

TEST_CASE("single cluster reduces to one cpc fit") {
  const LabeledSample s = cook(0.2, 0.5, 4);
  const ClusterModel m = fit(s.matrices, config(Algorithm::kLloyd, 1));
  const CpcSolution direct = fg_cpc(s.matrices);
  CHECK(m.loss == doctest::Approx(direct.objective * static_cast<double>(s.matrices.size())).epsilon(1e-8));
}

TEST_CASE("saturated model has zero loss") {
  const LabeledSample s = cook(0.4, 0.5, 5, 3);
  for (Algorithm a : kAll) {
    const ClusterModel m = fit(s.matrices, config(a, static_cast<int>(s.matrices.size()), 1, 1));
    CHECK(m.loss <= 1e-10);
  }
}

TEST_CASE("fast and lloyd agree on commuting clusters") {
  const LabeledSample s = cook(0.0, 0.6, 9);
  const ClusterModel f = fit(s.matrices, config(Algorithm::kFast, 2, 3));
  const ClusterModel l = fit(s.matrices, config(Algorithm::kLloyd, 2, 3));
  CHECK(accuracy(f.assignments, l.assignments, 2) == 1.0);
}

TEST_CASE("batch loss traces never increase") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LabeledSample s = cook(0.5, 0.3, 100 + seed);
    for (Algorithm a : {Algorithm::kFast, Algorithm::kLloyd}) {
      const ClusterModel m = fit(s.matrices, config(a, 3, seed, 1));
      CHECK(testing::non_increasing(m.loss_trace, 1e-12));
    }
  }
}

TEST_CASE("hartigan moves strictly decrease the objective") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LabeledSample s = cook(0.5, 0.3, 200 + seed);
    const ClusterModel m = fit(s.matrices, config(Algorithm::kHartigan, 3, seed, 1));
    for (std::size_t t = 1; t < m.loss_trace.size(); ++t) CHECK(m.loss_trace[t] < m.loss_trace[t - 1]);
  }
}

TEST_CASE("hartigan fixed point and adversarial start") {
  const LabeledSample s = cook(0.0, 0.5, 6);
  const ClusterModel still = fit_from_partition(s.matrices, s.labels, config(Algorithm::kHartigan));
  CHECK(still.moves == 0);
  CHECK(still.iterations == 1);
  CHECK(still.loss < 1e-10);

  std::vector<int> alternating(s.labels.size());
  for (std::size_t i = 0; i < alternating.size(); ++i) alternating[i] = static_cast<int>(i % 2);
  const ClusterModel moved = fit_from_partition(s.matrices, alternating, config(Algorithm::kHartigan));
  CHECK(moved.loss < 1e-10);
  CHECK(accuracy(moved.assignments, s.labels, 2) == 1.0);
}

TEST_CASE("relabelling the initial partition relabels the result") {
  const LabeledSample s = cook(0.4, 0.4, 12);
  Rng rng(12);
  const std::vector<int> init = random_partition(s.matrices.size(), 3, rng);
  std::vector<int> permuted(init.size());
  const int perm[3] = {2, 0, 1};
  for (std::size_t i = 0; i < init.size(); ++i) permuted[i] = perm[init[i]];
  for (Algorithm a : kAll) {
    const ClusterModel x = fit_from_partition(s.matrices, init, config(a, 3));
    const ClusterModel y = fit_from_partition(s.matrices, permuted, config(a, 3));
    CHECK(x.loss == doctest::Approx(y.loss).epsilon(1e-10));
    for (std::size_t i = 0; i < init.size(); ++i) CHECK(y.assignments[i] == perm[x.assignments[i]]);
  }
}

TEST_CASE("fits are equivariant under joint rotation") {
  const LabeledSample s = cook(0.4, 0.4, 14);
  Rng rng(14);
  const std::vector<int> init = random_partition(s.matrices.size(), 2, rng);
  const Matrix q = random_orthonormal(5, rng).matrix();
  std::vector<PsdMatrix> rotated;
  for (const auto& m : s.matrices) rotated.push_back(make_psd(q * m.matrix() * q.transpose()));
  for (Algorithm a : kAll) {
    const ClusterModel x = fit_from_partition(s.matrices, init, config(a));
    const ClusterModel y = fit_from_partition(rotated, init, config(a));
    CHECK(std::abs(x.loss - y.loss) < 1e-8);
    CHECK(x.assignments == y.assignments);
  }
}

TEST_CASE("best of restarts is no worse than any single restart") {
  const LabeledSample s = cook(0.5, 0.3, 15);
  for (Algorithm a : kAll) {
    FitConfig c = config(a, 3, 77, 5);
    const ClusterModel best = fit(s.matrices, c);
    for (int r = 0; r < 5; ++r) {
      Rng rng(derive_seed(77, static_cast<std::uint64_t>(r)));
      const std::vector<int> init = random_partition(s.matrices.size(), 3, rng);
      CHECK(best.loss <= fit_from_partition(s.matrices, init, config(a, 3)).loss + 1e-12);
    }
  }
}

TEST_CASE("lloyd with fg frames reaches stationarity per cluster") {
  const LabeledSample s = cook(0.3, 0.5, 16);
  const ClusterModel m = fit(s.matrices, config(Algorithm::kLloyd));
  for (double r : cluster_stationarity(s.matrices, m)) CHECK(r < 1e-7);
}

TEST_CASE("configuration errors") {
  const LabeledSample s = cook(0.0, 0.5, 1, 2);
  CHECK_THROWS_AS(fit(s.matrices, config(Algorithm::kFast, 0)), Error);
  CHECK_THROWS_AS(fit(s.matrices, config(Algorithm::kFast, 5)), Error);
  CHECK(parse_algorithm("hartigan") == Algorithm::kHartigan);
  CHECK_THROWS_AS(parse_algorithm("nope"), Error);
}

}
