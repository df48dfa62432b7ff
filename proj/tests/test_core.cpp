#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "snstf/core.hpp"

using namespace snstf;

namespace {

// ln y = 2 atanh((y-1)/(y+1)), summed as a series in long double after
// reducing y into [sqrt(1/2), sqrt(2)) by powers of two.
long double series_ln_reduced(long double y) {
  const long double z = (y - 1.0L) / (y + 1.0L);
  long double term = z, sum = 0.0L;
  for (int k = 0; k < 200; ++k) {
    sum += term / (2 * k + 1);
    term *= z * z;
  }
  return 2.0L * sum;
}

long double series_ln(long double y) {
  static const long double ln2 = series_ln_reduced(2.0L);
  int e = 0;
  while (y > 1.4142135623730950488L) {
    y /= 2.0L;
    ++e;
  }
  while (y < 0.7071067811865475244L) {
    y *= 2.0L;
    --e;
  }
  return e * ln2 + series_ln_reduced(y);
}

double entropy_oracle(double x) {
  const long double ln2 = series_ln(2.0L);
  const long double lx = x;
  return static_cast<double>(-(lx * series_ln(lx) + (1.0L - lx) * series_ln(1.0L - lx)) / ln2);
}

}  // namespace

TEST_CASE("transmittance examples") {
  CHECK(transmittance(0.0) == 1.0);
  CHECK(transmittance(10.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(transmittance(106.0) == doctest::Approx(2.512e-11).epsilon(1e-3));
  CHECK_THROWS_AS(transmittance(-0.1), std::invalid_argument);
}

TEST_CASE("transmittance is multiplicative in loss") {
  for (double a = 0.0; a <= 120.0; a += 7.3)
    for (double b = 0.0; b <= 60.0; b += 5.9) {
      const double lhs = transmittance(a + b);
      const double rhs = transmittance(a) * transmittance(b);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
    }
}

TEST_CASE("binary entropy examples") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  // Frozen from a 40-digit evaluation: 0.56722918015506135...
  CHECK(entropy_oracle(0.1336) == doctest::Approx(0.5672291801550614).epsilon(1e-14));
  CHECK(binary_entropy(0.1336) == doctest::Approx(entropy_oracle(0.1336)).epsilon(1e-13));
  CHECK(std::abs(binary_entropy(0.1336) - 0.5673) < 1e-4);
  CHECK_THROWS_AS(binary_entropy(-1e-9), std::invalid_argument);
  CHECK_THROWS_AS(binary_entropy(1.0 + 1e-9), std::invalid_argument);
}

TEST_CASE("binary entropy agrees with the series oracle on a grid") {
  for (int i = 1; i < 200; ++i) {
    const double x = i / 200.0;
    CHECK(binary_entropy(x) == doctest::Approx(entropy_oracle(x)).epsilon(1e-12));
  }
}

TEST_CASE("binary entropy is symmetric and concave") {
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    CHECK(binary_entropy(x) == doctest::Approx(binary_entropy(1.0 - x)).epsilon(1e-12));
  }
  for (int i = 0; i <= 50; ++i)
    for (int j = 0; j <= 50; ++j) {
      const double x = i / 50.0, y = j / 50.0;
      CHECK(binary_entropy(0.5 * (x + y)) >=
            0.5 * (binary_entropy(x) + binary_entropy(y)) - 1e-15);
    }
}

TEST_CASE("default models validate") {
  CHECK_NOTHROW(LinkModel{}.validate());
  CHECK_NOTHROW(DetectorModel{}.validate());
  CHECK_NOTHROW(SourceParams{}.validate());
  CHECK_NOTHROW(SecurityParams{}.validate());
}

TEST_CASE("validation names the offending field") {
  auto message = [](auto&& f) -> std::string {
    try {
      f();
    } catch (const std::invalid_argument& e) {
      return e.what();
    }
    return "";
  };
  LinkModel link;
  link.noise_per_pulse = 1.0;
  CHECK(message([&] { link.validate(); }).find("link.noise_per_pulse") != std::string::npos);

  SourceParams src;
  src.mu2 = src.mu1;
  CHECK(message([&] { src.validate(); }).find("source.mu2") != std::string::npos);
  src = SourceParams{};
  src.p_vac += 0.1;
  CHECK(message([&] { src.validate(); }).find("source.p_vac") != std::string::npos);
  src = SourceParams{};
  src.p_signal_window = 0.9;
  CHECK(message([&] { src.validate(); }).find("p_signal_window") != std::string::npos);

  SecurityParams sec;
  sec.f_ec = 0.9;
  CHECK(message([&] { sec.validate(); }).find("security.f_ec") != std::string::npos);
  sec = SecurityParams{};
  sec.eps_pa = 1.0;
  CHECK(message([&] { sec.validate(); }).find("security.eps_pa") != std::string::npos);

  DetectorModel det;
  det.gate_ns = 0.0;
  CHECK(message([&] { det.validate(); }).find("detector.gate_ns") != std::string::npos);
}

TEST_CASE("dark counts fold into a per-pulse probability") {
  DetectorModel det;
  CHECK(det.dark_per_pulse() == doctest::Approx(4.0 * 0.3e-9));
  CHECK(with_dark_noise(LinkModel{}, det).noise_per_pulse == doctest::Approx(1.2e-9));
}

TEST_CASE("phase jitter reproduces the misalignment error") {
  SourceParams src;
  const double s = src.phase_sigma();
  CHECK(0.5 * (1.0 - std::exp(-0.5 * s * s)) == doctest::Approx(src.misalignment).epsilon(1e-12));
  src.misalignment = 0.0;
  CHECK(src.phase_sigma() == 0.0);
}

TEST_CASE("658.7 km link loss") {
  const LinkModel link;
  CHECK(link.total_length_km() == doctest::Approx(658.7));
  CHECK(link.total_length_km() * link.atten_db_per_km == doctest::Approx(106.05).epsilon(1e-4));
  const LinkModel half = link.with_total_length(200.0);
  CHECK(half.length_a_km == 100.0);
  CHECK(half.length_b_km == 100.0);
  CHECK(half.noise_per_pulse == link.noise_per_pulse);
}
