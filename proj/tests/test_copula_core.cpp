#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "asymcop/copula.hpp"
#include "asymcop/generators.hpp"
#include "asymcop/rng.hpp"
#include "support/oracles.hpp"

using asymcop::Copula;
using asymcop::Family;
using asymcop::GeneratorSpec;
using Catch::Approx;

TEST_CASE("clayton cdf matches closed form", "[copula_core]") {
  // (u^-a + v^-a - 1)^(-1/a); frozen values computed independently.
  CHECK(asymcop::clayton_cdf(0.5, 0.5, 2.0) ==
        Approx(0.3779644730092273).epsilon(1e-12));
  CHECK(asymcop::clayton_cdf(0.3, 0.7, 1.24) ==
        Approx(0.2728163020113945).epsilon(1e-12));
}

TEST_CASE("gumbel cdf matches closed form and diagonal power law",
          "[copula_core]") {
  CHECK(asymcop::gumbel_cdf(0.5, 0.5, 0.5) ==
        Approx(0.3752142272464818).epsilon(1e-12));
  CHECK(asymcop::gumbel_cdf(0.2, 0.8, 0.57) ==
        Approx(0.1943881030909487).epsilon(1e-12));
  // C(u, u) = u^(2^alpha)
  for (double a : {0.3, 0.57, 0.9}) {
    for (double u : {0.05, 0.4, 0.9}) {
      CHECK(asymcop::gumbel_cdf(u, u, a) ==
            Approx(std::pow(u, std::pow(2.0, a))).epsilon(1e-12));
    }
  }
}

TEST_CASE("plackett cdf matches closed form across the parameter range",
          "[copula_core]") {
  CHECK(asymcop::plackett_cdf(0.5, 0.5, 1.0) ==
        Approx(0.2928932188134524).epsilon(1e-12));
  CHECK(asymcop::plackett_cdf(0.3, 0.6, 6.76) ==
        Approx(0.2633660027538339).epsilon(1e-12));
  CHECK(asymcop::plackett_cdf(0.4, 0.7, -0.5) ==
        Approx(0.2446221994724902).epsilon(1e-12));
  // alpha = -1 is the countermonotone bound max(u + v - 1, 0).
  CHECK(asymcop::plackett_cdf(0.8, 0.7, -1.0) == Approx(0.5).margin(1e-12));
  CHECK(asymcop::plackett_cdf(0.2, 0.3, -1.0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("clayton survival reflects the clayton cdf", "[copula_core]") {
  CHECK(asymcop::clayton_survival_cdf(0.3, 0.4, 1.24) ==
        Approx(0.1870193929072908).epsilon(1e-12));
  CHECK(asymcop::clayton_survival_cdf(0.9, 0.85, 2.34) ==
        Approx(0.8370698969391434).epsilon(1e-12));
  // Direct identity against the base family.
  for (double u : {0.1, 0.45, 0.8}) {
    for (double v : {0.2, 0.6, 0.95}) {
      double expect = u + v - 1.0 + asymcop::clayton_cdf(1 - u, 1 - v, 2.0);
      CHECK(asymcop::clayton_survival_cdf(u, v, 2.0) ==
            Approx(expect).margin(1e-12));
    }
  }
}

TEST_CASE("parameters at the independence limit collapse exactly",
          "[copula_core]") {
  for (double u : {0.1, 0.5, 0.9}) {
    for (double v : {0.25, 0.75}) {
      CHECK(asymcop::plackett_cdf(u, v, 0.0) == Approx(u * v).margin(1e-14));
      CHECK(asymcop::plackett_cdf(u, v, 5e-11) == Approx(u * v).margin(1e-14));
      CHECK(asymcop::clayton_cdf(u, v, 5e-11) == Approx(u * v).margin(1e-14));
      CHECK(asymcop::gumbel_cdf(u, v, 1.0) == Approx(u * v).margin(1e-14));
      CHECK(asymcop::gumbel_cdf(u, v, 1.0 - 5e-11) ==
            Approx(u * v).margin(1e-14));
    }
  }
  CHECK(Copula::plackett(0.0).family() == Family::Independence);
  CHECK(Copula::gumbel(1.0).family() == Family::Independence);
}

TEST_CASE("base families satisfy the copula axioms on a grid",
          "[copula_core]") {
  std::vector<Copula> models = {
      Copula::independence(),    Copula::plackett(6.76),
      Copula::plackett(-0.7),    Copula::clayton(0.3),
      Copula::clayton(5.0),      Copula::clayton_survival(1.24),
      Copula::gumbel(0.57),      Copula::gumbel(0.15),
  };
  for (const auto& c : models) {
    INFO(c.describe());
    CHECK(oracle::worst_margin_error(c) <= 1e-9);
    CHECK(oracle::worst_rectangle_volume(c) >= -1e-12);
  }
}

TEST_CASE("analytic densities agree with the finite-difference oracle",
          "[copula_core]") {
  std::vector<Copula> models = {
      Copula::plackett(6.76), Copula::plackett(-0.5), Copula::clayton(1.24),
      Copula::clayton_survival(2.34), Copula::gumbel(0.57),
      Copula::gumbel(0.46)};
  asymcop::Rng rng(7);
  for (const auto& c : models) {
    INFO(c.describe());
    for (int i = 0; i < 25; ++i) {
      double u = rng.uniform(0.05, 0.95);
      double v = rng.uniform(0.05, 0.95);
      double want = oracle::fd_density(c, u, v);
      double got = c.density(u, v);
      CHECK(got == Approx(want).epsilon(5e-4).margin(5e-6));
    }
  }
}

TEST_CASE("analytic conditionals agree with the finite-difference oracle",
          "[copula_core]") {
  std::vector<Copula> models = {
      Copula::plackett(9.27), Copula::clayton(1.47),
      Copula::clayton_survival(1.24), Copula::gumbel(0.51),
      Copula::independence()};
  asymcop::Rng rng(11);
  for (const auto& c : models) {
    INFO(c.describe());
    for (int i = 0; i < 25; ++i) {
      double u = rng.uniform(0.05, 0.95);
      double v = rng.uniform(0.05, 0.95);
      CHECK(c.conditional_cdf(u, v) ==
            Approx(oracle::fd_partial_u(c, u, v)).epsilon(1e-5).margin(1e-7));
      CHECK(c.conditional_cdf_given_v(u, v) ==
            Approx(oracle::fd_partial_v(c, u, v)).epsilon(1e-5).margin(1e-7));
    }
  }
}

TEST_CASE("conditional cdf is a proper distribution in v", "[copula_core]") {
  std::vector<Copula> models = {Copula::plackett(3.0), Copula::clayton(2.0),
                                Copula::clayton_survival(1.5),
                                Copula::gumbel(0.4)};
  for (const auto& c : models) {
    INFO(c.describe());
    for (double u : {0.1, 0.5, 0.9}) {
      CHECK(c.conditional_cdf(u, 1.0) == Approx(1.0).margin(1e-9));
      CHECK(c.conditional_cdf(u, 1e-12) == Approx(0.0).margin(1e-6));
      double prev = 0.0;
      for (double v = 0.05; v < 1.0; v += 0.05) {
        double cur = c.conditional_cdf(u, v);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
      }
    }
  }
}

TEST_CASE("densities integrate to one by Monte Carlo", "[copula_core]") {
  std::vector<Copula> models = {Copula::plackett(6.76), Copula::clayton(1.24),
                                Copula::clayton_survival(2.34),
                                Copula::gumbel(0.57)};
  for (const auto& c : models) {
    INFO(c.describe());
    CHECK(oracle::mc_density_mass(c, 400000, 13) == Approx(1.0).margin(0.01));
  }
}

TEST_CASE("log-domain cdf evaluation matches the plain domain and stays "
          "stable in deep tails",
          "[copula_core]") {
  std::vector<Copula> models = {Copula::plackett(4.0), Copula::clayton(1.24),
                                Copula::clayton_survival(2.0),
                                Copula::gumbel(0.57),
                                Copula::independence()};
  for (const auto& c : models) {
    INFO(c.describe());
    for (double a : {0.1, 1.0, 3.0}) {
      for (double b : {0.2, 2.5}) {
        double direct = -std::log(c.cdf(std::exp(-a), std::exp(-b)));
        CHECK(c.neg_log_cdf_exp(a, b) == Approx(direct).epsilon(1e-9));
      }
    }
  }
  // Deep tail: Clayton -log C(e^-t, e^-t) -> t + log(2 - e^(-alpha t))/alpha,
  // finite-difference-free closed form.
  double alpha = 1.24;
  Copula cl = Copula::clayton(alpha);
  for (double t : {50.0, 500.0, 5000.0}) {
    double expect = t + std::log(2.0 - std::exp(-alpha * t)) / alpha;
    CHECK(cl.neg_log_cdf_exp(t, t) == Approx(expect).epsilon(1e-12));
  }
  // Survival reflection deep tail: C(u,u) ~ (1+alpha) u^2 gives
  // -log C(e^-t, e^-t) -> 2t - log(1+alpha).
  Copula cs = Copula::clayton_survival(1.5);
  for (double t : {25.0, 300.0, 2000.0}) {
    CHECK(cs.neg_log_cdf_exp(t, t) ==
          Approx(2.0 * t - std::log(2.5)).epsilon(1e-6));
  }
}

TEST_CASE("evaluation contracts reject invalid arguments", "[copula_core]") {
  Copula c = Copula::clayton(1.0);
  CHECK_THROWS_AS(c.density(0.0, 0.5), asymcop::domain_error);
  CHECK_THROWS_AS(c.density(0.5, 1.0), asymcop::domain_error);
  CHECK_THROWS_AS(c.conditional_cdf(1.0, 0.5), asymcop::domain_error);
  CHECK_THROWS_AS(c.neg_log_cdf_exp(-0.1, 1.0), asymcop::domain_error);
  CHECK_THROWS_AS(Copula::clayton(-0.5), asymcop::domain_error);
  CHECK_THROWS_AS(Copula::gumbel(1.5), asymcop::domain_error);
  CHECK_THROWS_AS(Copula::gumbel(0.0), asymcop::domain_error);
  CHECK_THROWS_AS(Copula::plackett(-1.5), asymcop::domain_error);
  CHECK(std::isnan(std::nan("")));
  CHECK_THROWS_AS(c.cdf(std::nan(""), 0.5), asymcop::numeric_error);
}

TEST_CASE("generator specs invert each other", "[copula_core]") {
  std::vector<GeneratorSpec> gens = {GeneratorSpec::gamma_lt(0.19),
                                     GeneratorSpec::gamma_lt(2.5),
                                     GeneratorSpec::positive_stable_lt(0.48),
                                     GeneratorSpec::positive_stable_lt(1.0)};
  for (const auto& g : gens) {
    CHECK(g.phi_inverse(0.0) == Approx(1.0).margin(1e-15));
    double prev = 1.0;
    for (double t : {0.5, 1.0, 4.0, 50.0}) {
      double s = g.phi_inverse(t);
      CHECK(s < prev);
      prev = s;
      CHECK(g.phi(s) == Approx(t).epsilon(1e-12));
    }
    for (double s : {0.05, 0.3, 0.9}) {
      CHECK(g.phi_inverse(g.phi(s)) == Approx(s).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(GeneratorSpec::gamma_lt(0.0), asymcop::domain_error);
  CHECK_THROWS_AS(GeneratorSpec::positive_stable_lt(1.4),
                  asymcop::domain_error);
  CHECK_THROWS_AS(GeneratorSpec::gamma_lt(1.0).phi(0.0),
                  asymcop::domain_error);
}

TEST_CASE("cdf stays inside the Frechet band", "[copula_core]") {
  std::vector<Copula> models = {Copula::plackett(993.0), Copula::plackett(-1.0),
                                Copula::clayton(80.0), Copula::gumbel(0.05)};
  for (const auto& c : models) {
    INFO(c.describe());
    for (double u = 0.05; u < 1.0; u += 0.09) {
      for (double v = 0.05; v < 1.0; v += 0.09) {
        double x = c.cdf(u, v);
        CHECK(x >= std::max(0.0, u + v - 1.0) - 1e-15);
        CHECK(x <= std::min(u, v) + 1e-15);
      }
    }
  }
}
