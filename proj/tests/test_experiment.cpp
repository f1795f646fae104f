#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dirl/experiment.hpp"
#include "dirl/random.hpp"

using namespace dirl;

namespace {

ExperimentConfig small_config(std::size_t inits, std::uint64_t seed) {
  ExperimentConfig c;
  c.num_inits = inits;
  c.seed = seed;
  return c;
}

std::size_t count_of(const EscapeSummary& s, const std::string& label) {
  for (const auto& [name, n] : s.counts)
    if (name == label) return n;
  return 0;
}

}  // namespace

TEST(StreamRng, DeterministicAndIndependent) {
  StreamRng a(1, "init", 5), b(1, "init", 5), c(1, "init", 6), d(1, "other", 5);
  const std::uint64_t va = a.next();
  EXPECT_EQ(va, b.next());
  EXPECT_NE(va, c.next());
  EXPECT_NE(va, d.next());
}

TEST(StreamRng, UniformMoments) {
  StreamRng rng(42, "moments", 0);
  const int n = 200000;
  double sum = 0, sq = 0, nsum = 0, nsq = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
    const double z = rng.normal();
    nsum += z;
    nsq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - 0.25, 1.0 / 12.0, 0.005);
  EXPECT_NEAR(nsum / n, 0.0, 0.01);
  EXPECT_NEAR(nsq / n, 1.0, 0.02);
}

TEST(ExperimentConfig, JsonRoundTrip) {
  const Json j = Json::parse(R"({"problem": "benchmark2d", "solver": {"algorithm": "DIRL2", "beta": 5},
      "num_inits": 12, "seed": 9, "init_box": {"lower": -1, "upper": [2, 3]},
      "perturbation": {"scale": 0.05}})");
  const ExperimentConfig c = experiment_from_json(j);
  EXPECT_EQ(c.solver.algorithm, Algorithm::DIRL2);
  EXPECT_EQ(c.solver.beta, 5.0);
  EXPECT_EQ(c.num_inits, 12u);
  EXPECT_EQ(c.init_upper.size(), 2);
  ASSERT_TRUE(c.perturbation_scale.has_value());
  const ExperimentConfig back = experiment_from_json(experiment_to_json(c));
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(*back.perturbation_scale, 0.05);
  EXPECT_THROW(experiment_from_json(Json::parse(R"({"init_box": [1, 2]})")), ParseError);
  EXPECT_THROW(experiment_from_json(Json::parse(R"({"saddle_radius": 0})")), ParseError);
}

TEST(ExperimentInit, InsideBoxAndSeeded) {
  ExperimentConfig c = small_config(10, 4);
  for (std::size_t i = 0; i < 100; ++i) {
    const Vector x = experiment_init(c, i, 2);
    EXPECT_TRUE((x.array() >= -3.0).all() && (x.array() < 3.0).all());
    EXPECT_EQ(x, experiment_init(c, i, 2));
  }
  c.init_lower = Vector::Constant(1, 1.0);
  c.init_upper = Vector::Constant(1, 1.0);
  EXPECT_THROW(experiment_init(c, 0, 2), ArgumentError);
}

TEST(Escape, AllRunsReachGlobalMin) {
  for (Algorithm alg : {Algorithm::DIRL1, Algorithm::DIRL2}) {
    ExperimentConfig c = small_config(40, 17);
    c.solver = default_config(alg);
    const EscapeSummary s = run_escape(c, 2);
    EXPECT_EQ(s.records.size(), 40u);
    EXPECT_EQ(s.fraction_at_saddle, 0.0);
    EXPECT_EQ(count_of(s, "global_min"), 40u) << algorithm_name(alg);
    EXPECT_EQ(count_of(s, "failed"), 0u);
    for (const InitRecord& r : s.records) {
      EXPECT_TRUE(r.converged);
      EXPECT_LE(r.max_increase, 1e-10 * 5.0);
      EXPECT_GE(r.telescope_gap, -1e-8 * static_cast<double>(r.iterations));
      EXPECT_LE(r.fixed_point_residual, 1e-9);
    }
  }
}

TEST(Escape, IndependentOfWorkerCount) {
  const ExperimentConfig c = small_config(16, 5);
  const Json a = escape_to_json(run_escape(c, 1));
  const Json b = escape_to_json(run_escape(c, 4));
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Escape, InitsNearSaddleEscape) {
  ExperimentConfig c = small_config(8, 2);
  const double s = (std::sqrt(2.0) - 1.0) / 2.0;
  c.init_lower = (Vector(2) << -1e-3, s * s - 1e-3).finished();
  c.init_upper = (Vector(2) << 1e-3, s * s + 1e-3).finished();
  const EscapeSummary sum = run_escape(c, 1);
  EXPECT_EQ(count_of(sum, "saddle"), 0u);
}

TEST(Escape, PerturbedProblemClassifiesLimits) {
  ExperimentConfig c = small_config(20, 7);
  c.perturbation_scale = 0.05;
  const EscapeSummary s = run_escape(c, 2);
  EXPECT_EQ(s.perturbation.size(), 2);
  EXPECT_GT(s.perturbation.norm(), 0.0);
  EXPECT_EQ(s.degenerate_limits, 0u);
  std::set<std::string> labels;
  for (const KnownLimit& k : s.known_points) {
    EXPECT_FALSE(k.analytic);
    labels.insert(k.label);
  }
  for (const InitRecord& r : s.records) EXPECT_TRUE(labels.count(r.nearest_known_point)) << r.nearest_known_point;
}

TEST(Escape, RejectsZeroInits) {
  EXPECT_THROW(run_escape(small_config(0, 1)), ArgumentError);
}
