#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "flexbench/scenario/boxcox.hpp"
#include "flexbench/scenario/generator.hpp"
#include "flexbench/scenario/model_io.hpp"

using namespace flexbench;

namespace {

std::vector<Timestamp> lattice(const char* start, std::size_t n, int minutes = 15) {
  std::vector<Timestamp> t(n);
  const auto t0 = parse_iso8601(start);
  for (std::size_t k = 0; k < n; ++k) t[k] = t0 + std::chrono::minutes{static_cast<long>(k) * minutes};
  return t;
}

std::vector<int> hours_of(const std::vector<Timestamp>& t) {
  std::vector<int> h;
  for (auto ts : t) h.push_back(hour_of_day(ts));
  return h;
}

}  // namespace

TEST(BoxCox, ForwardExamples) {
  EXPECT_DOUBLE_EQ(boxcox_forward(5, {1, 0}), 4);
  EXPECT_NEAR(boxcox_forward(std::numbers::e, {0, 0}), 1, 1e-15);
  EXPECT_DOUBLE_EQ(boxcox_forward(4, {0.5, 0}), 2);
  EXPECT_THROW(boxcox_forward(-1, {1, 0}), DomainError);
  EXPECT_THROW(boxcox_forward(0, {0, 0}), DomainError);
}

TEST(BoxCox, InverseExamples) {
  EXPECT_DOUBLE_EQ(boxcox_inverse(4, {1, 0}), 5);
  EXPECT_NEAR(boxcox_inverse(1, {0, 0}), std::numbers::e, 1e-15);
  EXPECT_THROW(boxcox_inverse(-3, {0.5, 0}), DomainError);
}

TEST(BoxCox, RoundTripProperty) {
  Rng rng(1);
  double worst = 0;
  for (double lambda : kBoxCoxLambdaGrid) {
    for (int k = 0; k < 1000; ++k) {
      const double shift = 5 * rng.uniform();
      const double x = std::exp(8 * rng.uniform() - 4) - shift + 1e-9;
      BoxCoxTransform tf{lambda, shift};
      const double back = boxcox_inverse(boxcox_forward(x, tf), tf);
      worst = std::max(worst, std::abs(back - x) / std::max(std::abs(x), 1.0));
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(BoxCox, ForwardIsIncreasing) {
  for (double lambda : kBoxCoxLambdaGrid) {
    double prev = -1e300;
    for (double x = 0.01; x < 50; x += 0.37) {
      const double y = boxcox_forward(x, {lambda, 0});
      EXPECT_GT(y, prev);
      prev = y;
    }
  }
}

TEST(BoxCox, FitSelectsLambda) {
  Rng rng(2);
  std::vector<double> gauss, lognormal, negative;
  for (int k = 0; k < 5000; ++k) {
    gauss.push_back(rng.normal(10, 2));
    lognormal.push_back(std::exp(rng.normal(1, 0.8)));
    negative.push_back(rng.normal(20, 5));
  }
  negative[17] = -10;
  EXPECT_EQ(fit_boxcox(gauss).lambda, 1.0);
  EXPECT_EQ(fit_boxcox(lognormal).lambda, 0.0);
  EXPECT_GE(fit_boxcox(negative).shift, 10.001 - 1e-12);
  EXPECT_THROW(fit_boxcox(std::vector<double>(200, 3.0)), FitError);
  EXPECT_THROW(fit_boxcox(std::vector<double>(50, 3.0)), FitError);
}

TEST(Armax, RecoversAr1) {
  Rng rng(3);
  const std::size_t n = 10000;
  auto times = lattice("2024-01-01T00:00:00", n);
  std::vector<double> x(n);
  double z = 0;
  for (std::size_t t = 0; t < n; ++t) {
    z = 0.8 * z + rng.normal();
    x[t] = z + 3.0 * std::sin(hour_of_day(times[t]) / 24.0 * 2 * std::numbers::pi);
  }
  auto m = fit_armax(x, hours_of(times), 1, 0);
  EXPECT_EQ(m.boxcox.lambda, 1.0);
  EXPECT_NEAR(m.ar[0], 0.8, 0.05);
  EXPECT_NEAR(m.noise_std, 1.0, 0.05);
}

TEST(Armax, WhiteNoiseGivesSmallPhi) {
  Rng rng(4);
  const std::size_t n = 10000;
  auto times = lattice("2024-03-01T00:00:00", n);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal(50, 4);
  auto m = fit_armax(x, hours_of(times), 1, 0);
  EXPECT_LE(std::abs(m.ar[0]), 0.1);
}

TEST(Armax, ZeroNoiseSeasonalSeries) {
  const std::size_t n = 2000;
  auto times = lattice("2024-01-01T00:00:00", n);
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = 30 + hour_of_day(times[t]);
  auto m = fit_armax(x, hours_of(times), 2, 1);
  EXPECT_LT(m.noise_std, 1e-6);
  EXPECT_GT(m.noise_std, 0.0);
}

TEST(Armax, Arma21WithMaTerm) {
  Rng rng(5);
  const std::size_t n = 20000;
  auto times = lattice("2024-01-01T00:00:00", n);
  std::vector<double> x(n);
  double z1 = 0, z2 = 0, e1 = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double e = rng.normal();
    const double z = 0.5 * z1 + 0.2 * z2 + 0.4 * e1 + e;
    z2 = z1, z1 = z, e1 = e;
    x[t] = 40 + 2 * z;
  }
  auto m = fit_armax(x, hours_of(times), 2, 1);
  EXPECT_NEAR(m.ar[0], 0.5, 0.08);
  EXPECT_NEAR(m.ar[1], 0.2, 0.08);
  EXPECT_NEAR(m.ma[0], 0.4, 0.08);
}

TEST(Armax, MissingHourNamesRegressor) {
  const std::size_t n = 500;
  std::vector<double> x(n);
  std::vector<int> hours(n);
  Rng rng(6);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = rng.normal(10, 1);
    hours[t] = static_cast<int>(t % 23);  // hour 23 never observed
  }
  try {
    fit_armax(x, hours, 1, 0);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("hour_of_day=23"), std::string::npos);
  }
  EXPECT_THROW(fit_armax(std::span(x).first(100), std::span(hours).first(100), 2, 1), FitError);
}

TEST(Armax, DegenerateSimulationIsConstant) {
  ArmaxModel m;
  m.ar = {0.0};
  m.exo.assign(24, 7.5);
  m.noise_std = 1e-300;
  m.boxcox = {1.0, 0.0};
  Rng rng(7);
  std::vector<double> seed{1, 2, 3};
  std::vector<int> seed_hours{0, 1, 2}, future(40, 5);
  for (double v : simulate_armax(m, seed, seed_hours, future, rng)) EXPECT_NEAR(v, 8.5, 1e-12);
}

TEST(Armax, SimulationDeterministicAndUnbiased) {
  Rng fit_rng(8);
  const std::size_t n = 5000;
  auto times = lattice("2024-01-01T00:00:00", n);
  std::vector<double> x(n);
  double z = 0;
  for (std::size_t t = 0; t < n; ++t) {
    z = 0.6 * z + fit_rng.normal();
    x[t] = 20 + z;
  }
  auto hours = hours_of(times);
  auto m = fit_armax(x, hours, 1, 0);
  std::vector<int> future(10000);
  for (std::size_t k = 0; k < future.size(); ++k) future[k] = static_cast<int>((k / 4) % 24);
  Rng a(9), b(9);
  auto s1 = simulate_armax(m, x, hours, future, a);
  auto s2 = simulate_armax(m, x, hours, future, b);
  EXPECT_EQ(s1, s2);
  double mean = 0, exo_mean = 0;
  for (double v : s1) mean += v;
  mean /= static_cast<double>(s1.size());
  for (double e : m.exo) exo_mean += boxcox_inverse(e, m.boxcox);
  exo_mean /= 24.0;
  // AR(1) long-run variance inflates the standard error by sqrt((1+phi)/(1-phi)).
  const double phi = m.ar[0];
  const double se = m.noise_std / std::sqrt(1 - phi * phi) * std::sqrt((1 + phi) / (1 - phi)) / std::sqrt(1e4);
  EXPECT_NEAR(mean, exo_mean, 3 * se);
}

TEST(Markov, ConstantZeroHistory) {
  auto times = lattice("2024-01-01T00:00:00", 96 * 40);
  std::vector<double> u(times.size(), 0.0);
  auto m = fit_markov(u, times, 5);
  for (int c = 0; c < kTimeOfDayBuckets; ++c) {
    EXPECT_GT(m.prob(c, 0, 0), 0.99);
    for (int i = 0; i < 5; ++i) {
      double s = 0;
      for (int j = 0; j < 5; ++j) s += m.prob(c, i, j);
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
  EXPECT_FALSE(m.has_context(kTimeOfDayBuckets));  // spring absent
}

TEST(Markov, AlternatingIsOffDiagonal) {
  auto times = lattice("2024-01-01T00:00:00", 96 * 20);
  std::vector<double> u(times.size());
  for (std::size_t t = 0; t < u.size(); ++t) u[t] = t % 2 ? 1.0 : 0.0;
  auto m = fit_markov(u, times, 2);
  for (int c = 0; c < kTimeOfDayBuckets; ++c) {
    EXPECT_GT(m.prob(c, 0, 1), 0.99);
    EXPECT_GT(m.prob(c, 1, 0), 0.99);
    // 320 transitions per context, half from each state: (160 + 1) / (160 + 2)
    EXPECT_NEAR(m.prob(c, 0, 1), 161.0 / 162.0, 1e-12);
  }
}

TEST(Markov, MissingContextsAreListed) {
  std::vector<double> u(2000, 0.5);
  std::vector<int> ctx(2000, 0);
  try {
    fit_markov(u, ctx, 5, {0, 3});
    FAIL();
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("winter 12-16h"), std::string::npos);
  }
  EXPECT_THROW(fit_markov(std::span(u).first(300), std::span(ctx).first(300), 5, {0}), FitError);
}

TEST(Markov, RefitKnownMatrix) {
  const std::vector<double> truth{0.7, 0.2, 0.1, 0.3, 0.5, 0.2, 0.25, 0.25, 0.5};
  auto model = MarkovDeploymentModel::uniform_contexts(3, truth);
  Rng rng(10);
  std::vector<int> ctx(100000, 0);
  auto path = simulate_markov(model, 0, ctx, rng);
  auto fit = fit_markov(path, ctx, 3, {0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(fit.prob(0, i, j), truth[static_cast<std::size_t>(i * 3 + j)], 0.02);
}

TEST(Markov, IdentityAndStationary) {
  auto ident = MarkovDeploymentModel::uniform_contexts(3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  Rng rng(11);
  for (double v : simulate_markov(ident, 2, parse_iso8601("2024-05-01T00:00"), 15, 200, rng))
    EXPECT_DOUBLE_EQ(v, ident.state_value(2));

  // P = [[0.9, 0.1], [0.3, 0.7]] has stationary distribution (0.75, 0.25).
  auto two = MarkovDeploymentModel::uniform_contexts(2, {0.9, 0.1, 0.3, 0.7});
  Rng a(12), b(12);
  auto s1 = simulate_markov(two, 0, parse_iso8601("2024-05-01T00:00"), 15, 100000, a);
  auto s2 = simulate_markov(two, 0, parse_iso8601("2024-05-01T00:00"), 15, 100000, b);
  EXPECT_EQ(s1, s2);
  double low = 0;
  for (double v : s1) low += v < 0.5;
  EXPECT_NEAR(low / 1e5, 0.75, 0.02);
}

namespace {

MarketHistory synthetic_history(std::size_t days, std::uint64_t seed, const char* start = "2024-01-01T00:00:00") {
  MarketHistory h;
  auto times = lattice(start, days * 96);
  Rng rng(seed);
  double a = 0, b = 0, c = 0;
  double uu = 0.2, du = 0.2;
  for (auto ts : times) {
    const double hour = hour_of_day(ts);
    a = 0.7 * a + rng.normal(0, 4);
    b = 0.7 * b + rng.normal(0, 4);
    c = 0.7 * c + rng.normal(0, 6);
    uu = std::clamp(uu + rng.normal(0, 0.15), 0.0, 1.0);
    du = std::clamp(du + rng.normal(0, 0.15), 0.0, 1.0);
    h.push_back(ts, 32 + 8 * std::sin(hour / 24 * 6.28), 45 + a, 15 + b, 32 + c, uu, du);
  }
  return h;
}

}  // namespace

TEST(Generator, RealizationDeterministicAndValid) {
  auto hist = synthetic_history(60, 13);
  auto models = fit_scenario_models(hist);
  const std::size_t cut = 50 * 96 + 76;  // session starts 19:00
  auto before = hist.slice(0, cut);
  TimeGrid grid(15, 48, hist.time[cut]);
  std::vector<double> da(12, 32.0);
  auto r1 = generate_realization(models, before, da, grid, 99);
  auto r2 = generate_realization(models, before, da, grid, 99);
  auto r3 = generate_realization(models, before, da, grid, 100);
  EXPECT_EQ(r1, r2);
  EXPECT_NE(r1, r3);
  EXPECT_NO_THROW(r1.validate(grid));
  EXPECT_EQ(r1.da_price, da);
  EXPECT_THROW(generate_realization(models, hist.slice(0, cut - 1), da, grid, 1), std::invalid_argument);
}

TEST(Generator, ZeroNoiseRealizationFollowsProfile) {
  auto hist = synthetic_history(60, 14);
  auto models = fit_scenario_models(hist);
  for (auto* m : {&models.up_price, &models.down_price, &models.imbalance_price}) {
    m->noise_std = 0;
    std::fill(m->ar.begin(), m->ar.end(), 0.0);
    std::fill(m->ma.begin(), m->ma.end(), 0.0);
  }
  const std::size_t cut = 50 * 96;
  TimeGrid grid(15, 48, hist.time[cut]);
  auto r = generate_realization(models, hist.slice(0, cut), std::vector<double>(12, 30.0), grid, 5);
  for (int t = 0; t < 48; ++t) {
    const int h = hour_of_day(grid.time_of(t));
    EXPECT_NEAR(r.up_price[static_cast<std::size_t>(t)],
                boxcox_inverse(models.up_price.exo[static_cast<std::size_t>(h)], models.up_price.boxcox), 1e-9);
  }
}

TEST(Generator, ForecastsKeepPrefixAndQualityIsMonotone) {
  auto hist = synthetic_history(60, 15);
  auto models = fit_scenario_models(hist);
  const std::size_t cut = 55 * 96 + 76;
  auto before = hist.slice(0, cut);
  TimeGrid grid(15, 48, hist.time[cut]);
  auto real = generate_realization(models, before, std::vector<double>(12, 32.0), grid, 7);
  ForecastConfig cfg;
  cfg.n_forecasts = 10;
  cfg.rng_seed = 42;
  for (int t_now : {0, 1, 20, 47}) {
    auto f = generate_forecasts(real, before, t_now, cfg, models, grid);
    ASSERT_EQ(f.size(), 10u);
    EXPECT_NO_THROW(f.validate(grid));
    for (const auto& s : f.scenarios) {
      for (int t = 0; t < t_now; ++t) {
        EXPECT_EQ(s.up_price[static_cast<std::size_t>(t)], real.up_price[static_cast<std::size_t>(t)]);
        EXPECT_EQ(s.down_usage[static_cast<std::size_t>(t)], real.down_usage[static_cast<std::size_t>(t)]);
      }
      EXPECT_EQ(s.da_price, real.da_price);
    }
    double prev = 1e300;
    for (int q : {1, 2, 4, 8}) {
      cfg.quality_q = q;
      auto fq = generate_forecasts(real, before, t_now, cfg, models, grid);
      double mean = 0;
      for (const auto& s : fq.scenarios) mean += scenario_error(s, real, t_now, cfg.error_decay, models);
      mean /= 10;
      EXPECT_LE(mean, prev + 1e-12);
      prev = mean;
    }
    cfg.quality_q = 1;
  }
}

TEST(Generator, SelectionFindsPlantedTruth) {
  TimeGrid grid(15, 8);
  auto real = MarketRealization::constant(grid, 30, 40, 10, 30, 0.3, 0.2);
  std::vector<MarketRealization> pool;
  std::vector<double> errors;
  const double scales[3] = {1, 1, 1};
  Rng rng(16);
  for (int k = 0; k < 50; ++k) {
    auto c = real;
    if (k != 37)
      for (auto& p : c.up_price) p += rng.normal(0, 5);
    errors.push_back(scenario_error(c, real, 0, 0.95, scales));
    pool.push_back(c);
  }
  auto best = select_best(pool, errors, 3);
  EXPECT_EQ(best.scenarios[0], real);
  EXPECT_DOUBLE_EQ(scenario_error(best.scenarios[0], real, 0, 0.95, scales), 0.0);
}

TEST(Generator, ScenarioErrorWeighting) {
  TimeGrid grid(15, 8);
  auto real = MarketRealization::constant(grid, 30, 40, 10, 30, 0.3, 0.2);
  const double scales[3] = {1, 1, 1};
  EXPECT_EQ(scenario_error(real, real, 0, 0.9, scales), 0.0);
  auto early = real, late = real, two = real;
  early.up_price[0] += 1;
  late.up_price[7] += 1;
  EXPECT_GT(scenario_error(early, real, 0, 0.9, scales), scenario_error(late, real, 0, 0.9, scales));
  two.up_price[2] += 1;
  EXPECT_NEAR(scenario_error(two, real, 0, 0.9, scales) / scenario_error(early, real, 0, 0.9, scales), 0.81, 1e-12);
}

TEST(Generator, BulkRealizationsStayValid) {
  auto hist = synthetic_history(120, 17);
  auto models = fit_scenario_models(hist);
  int count = 0;
  for (int day = 20; day < 115; ++day) {
    const std::size_t cut = static_cast<std::size_t>(day) * 96 + 76;
    auto before = hist.slice(0, cut);
    TimeGrid grid(15, 48, hist.time[cut]);
    for (std::uint64_t s = 0; s < 10; ++s) {
      auto r = generate_realization(models, before, std::vector<double>(12, 32.0), grid, s);
      EXPECT_NO_THROW(r.validate(grid));
      ++count;
    }
  }
  EXPECT_EQ(count, 950);
}

TEST(ModelIo, RoundTripIsExact) {
  auto models = fit_scenario_models(synthetic_history(40, 18));
  std::stringstream ss;
  write_models(ss, models);
  auto back = read_models(ss);
  EXPECT_EQ(back, models);
  std::stringstream again;
  write_models(again, back);
  std::stringstream first;
  write_models(first, models);
  EXPECT_EQ(again.str(), first.str());
}

TEST(ModelIo, RejectsBadFiles) {
  std::istringstream wrong_version("flexbench-model 2\n");
  EXPECT_THROW(read_models(wrong_version), DataError);
  std::istringstream truncated("flexbench-model 1\nptu_minutes 15\narmax up_price\n lambda 1\n");
  EXPECT_THROW(read_models(truncated), DataError);
}
