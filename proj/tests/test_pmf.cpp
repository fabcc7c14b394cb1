#include <doctest.h>

#include <cmath>

#include "seclat/pmf.hpp"
#include "seclat/rng.hpp"
#include "test_util.hpp"

using namespace seclat;
using namespace seclat::testutil;

TEST_CASE("from_masses basics") {
  const Pmf point = Pmf::from_masses(0, {1.0});
  CHECK(point.mass_at(0) == 1.0);
  CHECK(point.tail_mass() == 0.0);

  const Pmf z = Pmf::from_masses(-1, {0.75, 0.25});
  CHECK(z.offset() == -1);
  CHECK(z.mass_at(-1) == 0.75);
  CHECK(z.tail_mass() == doctest::Approx(0.0).epsilon(1e-12));

  const Pmf partial = Pmf::from_masses(0, {0.4, 0.4});
  CHECK(partial.tail_mass() == doctest::Approx(0.2).epsilon(1e-12));

  CHECK_THROWS_AS(Pmf::from_masses(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf::from_masses(0, {-0.1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf::from_masses(0, {0.7, 0.7}), std::invalid_argument);

  // Negative-zero artifacts are normalized away, not rejected.
  const Pmf tiny = Pmf::from_masses(0, {1.0, -1e-17});
  CHECK(tiny.mass_at(1) == 0.0);
}

TEST_CASE("convolve identities and small cases") {
  const Pmf delta = Pmf::point(0);
  Rng rng(2024, 0);
  const Pmf p = random_pmf(rng, 20);
  const Pmf conv_id = convolve(delta, p);
  CHECK(max_entry_diff(conv_id, p) == doctest::Approx(0.0).epsilon(1e-15));

  const Pmf bern = Pmf::from_masses(0, {0.5, 0.5});
  const Pmf sq = convolve(bern, bern);
  CHECK(sq.mass_at(0) == doctest::Approx(0.25));
  CHECK(sq.mass_at(1) == doctest::Approx(0.5));
  CHECK(sq.mass_at(2) == doctest::Approx(0.25));
}

TEST_CASE("convolve matches the direct double sum") {
  Rng rng(7, 0);
  const Pmf a = random_pmf(rng, 50, -3);
  const Pmf b = random_pmf(rng, 50, 2);
  const auto ref = brute_convolve(a.masses(), b.masses());
  const Pmf c = convolve(a, b, 0.0);
  REQUIRE(c.offset() == -1);
  for (size_t i = 0; i < ref.size(); ++i) {
    CHECK(std::fabs(c.mass_at(-1 + static_cast<int>(i)) - ref[i]) <= 1e-14);
  }
}

TEST_CASE("convolution is commutative and associative") {
  Rng rng(11, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Pmf a = random_pmf(rng, 8 + static_cast<int>(rng.below(20)));
    const Pmf b = random_pmf(rng, 8 + static_cast<int>(rng.below(20)), -2);
    const Pmf c = random_pmf(rng, 8 + static_cast<int>(rng.below(20)), 1);
    CHECK(max_entry_diff(convolve(a, b), convolve(b, a)) <= 1e-12);
    CHECK(max_entry_diff(convolve(convolve(a, b), c),
                         convolve(a, convolve(b, c))) <= 1e-12);
  }
}

TEST_CASE("every operation keeps mass accounted for") {
  Rng rng(13, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const Pmf a = random_pmf(rng, 30);
    const Pmf b = random_pmf(rng, 30);
    auto check_norm = [](const Pmf& p) {
      double sum = p.tail_mass();
      for (double m : p.masses()) sum += m;
      CHECK(std::fabs(sum - 1.0) <= 1e-9);
    };
    check_norm(convolve(a, b));
    check_norm(power_convolve(a, 4));
    check_norm(a.truncated(1e-6));
  }
}

TEST_CASE("power_convolve") {
  Rng rng(17, 0);
  const Pmf p = random_pmf(rng, 12);

  CHECK(max_entry_diff(power_convolve(p, 0), Pmf::point(0)) == 0.0);
  CHECK(max_entry_diff(power_convolve(p, 1), p) == 0.0);
  CHECK_THROWS_AS(power_convolve(p, -1), std::invalid_argument);

  SUBCASE("geometric power equals the negative binomial") {
    std::vector<double> g;
    for (int i = 0; i < 40; ++i) g.push_back(geometric_ref(0.9, i));
    const Pmf geo = Pmf::from_masses(0, std::move(g));
    const Pmf six = power_convolve(geo, 6);
    for (int i = 0; i <= six.last_support(); ++i) {
      CHECK(std::fabs(six.mass_at(i) - neg_binomial_ref(6, 0.9, i)) <= 1e-12);
    }
  }

  SUBCASE("exponent additivity") {
    for (int m = 0; m <= 3; ++m) {
      for (int n = 1; n <= 3; ++n) {
        const Pmf lhs = power_convolve(p, m + n);
        const Pmf rhs = convolve(power_convolve(p, m), power_convolve(p, n));
        CHECK(max_entry_diff(lhs, rhs) <= 1e-10);
      }
    }
  }
}

TEST_CASE("ccdf") {
  const Pmf delta = Pmf::point(0);
  CHECK(delta.ccdf(0) == 1.0);
  CHECK(delta.ccdf(1) == 0.0);
  CHECK(delta.ccdf(-5) == 1.0);

  std::vector<double> g;
  for (int i = 0; i < 200 && geometric_ref(0.9, i) > 1e-18; ++i) {
    g.push_back(geometric_ref(0.9, i));
  }
  const Pmf geo = Pmf::from_masses(0, std::move(g));
  CHECK(geo.ccdf(2) == doctest::Approx(0.01).epsilon(1e-12));

  SUBCASE("ccdf differences recover the masses") {
    Rng rng(19, 0);
    const Pmf p = random_pmf(rng, 40, -7);
    double prev = p.ccdf(p.offset());
    for (int x = p.offset(); x <= p.last_support(); ++x) {
      const double next = p.ccdf(x + 1);
      CHECK(prev >= next);  // monotone non-increasing
      CHECK(std::fabs((prev - next) - p.mass_at(x)) <= 1e-12);
      prev = next;
    }
  }

  SUBCASE("certified bracket") {
    Rng rng(23, 0);
    const Pmf p = random_pmf(rng, 60).truncated(1e-3);
    CHECK(p.tail_mass() > 0.0);
    for (int x = 0; x <= p.last_support() + 2; ++x) {
      CHECK(p.ccdf_lower(x) <= p.ccdf(x));
      CHECK(p.ccdf(x) - p.ccdf_lower(x) == doctest::Approx(p.tail_mass()));
    }
  }
}

TEST_CASE("mean") {
  CHECK(Pmf::point(5).mean() == 5.0);

  std::vector<double> g;
  for (int i = 0; i < 400 && geometric_ref(0.9, i) > 1e-19; ++i) {
    g.push_back(geometric_ref(0.9, i));
  }
  const Pmf geo = Pmf::from_masses(0, std::move(g));
  CHECK(geo.mean() == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
  CHECK(geo.mean_reliable());

  const Pmf heavy = Pmf::from_masses(0, {0.5, 0.3});  // 0.2 in the tail
  CHECK_FALSE(heavy.mean_reliable());
  CHECK(heavy.mean_slack(10) == doctest::Approx(0.2 * 9));
}

TEST_CASE("shift and truncate") {
  Rng rng(29, 0);
  const Pmf p = random_pmf(rng, 25);
  const Pmf s = p.shifted(-4);
  CHECK(s.offset() == p.offset() - 4);
  CHECK(s.mean() == doctest::Approx(p.mean() - 4.0));

  std::vector<double> decaying;
  for (int i = 0; i < 40; ++i) decaying.push_back(geometric_ref(0.5, i));
  const Pmf geo = Pmf::from_masses(0, std::move(decaying));
  const Pmf t = geo.truncated(1e-3);
  CHECK(t.size() < geo.size());
  CHECK(t.tail_mass() <= 1e-3 + 1e-15);
  // The cut moves mass into the tail, never drops it.
  double total = t.tail_mass();
  for (double m : t.masses()) total += m;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
