#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "fsqkd/link_model.hpp"
#include "fsqkd/presets.hpp"
#include "fsqkd/quantum_sim.hpp"

using namespace fsqkd;

namespace {

LinkParams link(double mu, double eta_opt_value, double c, double clock = 1e6) {
  LinkParams lp;
  lp.tx.mu = mu;
  lp.tx.clock_rate_hz = clock;
  lp.ch.eta_trans = 1.0;
  lp.ch.eta_geo = eta_opt_value;
  lp.ch.background_c = c;
  return lp;
}

struct Sifted {
  std::size_t n = 0;
  std::size_t errors = 0;
  std::size_t singles = 0;
};

// Sifting straight from the two raw records.
Sifted sift_by_hand(const TransmissionOutcome& o) {
  Sifted s;
  for (const auto& d : o.detections) {
    if (d.multi) continue;
    ++s.singles;
    const auto& p = o.pulses[d.slot];
    if (detector_basis(d.detector) != p.basis) continue;
    ++s.n;
    if (detector_bit(d.detector) != p.bit) ++s.errors;
  }
  return s;
}

}  // namespace

TEST(Simulate, DeterministicInSeed) {
  const auto lp = link(0.3, 0.03, 5);
  const auto a = simulate_transmission(lp, 99);
  const auto b = simulate_transmission(lp, 99);
  const auto c = simulate_transmission(lp, 100);
  EXPECT_EQ(a.pulses, b.pulses);
  EXPECT_EQ(a.detections, b.detections);
  EXPECT_NE(a.detections, c.detections);
  EXPECT_EQ(a.seed, 99u);
}

TEST(Simulate, RecordShape) {
  const auto o = simulate_transmission(link(0.5, 0.05, 5), 3);
  ASSERT_EQ(o.pulses.size(), 1'000'000u);
  for (std::size_t i = 0; i < o.pulses.size(); i += 9973) EXPECT_EQ(o.pulses[i].slot, i);
  for (std::size_t i = 1; i < o.detections.size(); ++i) {
    EXPECT_LT(o.detections[i - 1].slot, o.detections[i].slot);
  }
  EXPECT_EQ(o.single_detections() + o.multi_detections(), o.detections.size());
}

TEST(Simulate, DarkAndSilentChannelHasNoDetections) {
  const auto o = simulate_transmission(link(0.0, 0.05, 0.0), 1);
  EXPECT_TRUE(o.detections.empty());
}

TEST(Simulate, NoBackgroundMeansNoErrors) {
  for (double mu : {0.1, 0.5, 0.9}) {
    for (double eta : {0.01, 0.3, 1.0}) {
      const auto o = simulate_transmission(link(mu, eta, 0.0, 1e5), 17);
      const auto s = sift_by_hand(o);
      EXPECT_EQ(s.errors, 0u) << mu << " " << eta;
      EXPECT_GT(s.n, 0u);
    }
  }
}

TEST(Simulate, BackgroundFireProbability) {
  EXPECT_DOUBLE_EQ(background_fire_probability(link(0.3, 0.05, 5)), 20e-6);
  EXPECT_THROW(background_fire_probability(link(0.3, 0.05, 5, 10)), std::invalid_argument);
}

TEST(Simulate, SiftFractionMatchesModel) {
  // signal dominated: eta_opt/C = 0.33
  const auto lp = link(0.14, 0.066, 0.2);
  const double p = sift_probability(lp);
  const int seeds = 30;
  double total = 0;
  for (int s = 0; s < seeds; ++s) total += static_cast<double>(sift_by_hand(simulate_transmission(lp, 1000 + s)).n);
  const double trials = seeds * 1e6;
  const double se = std::sqrt(trials * p * (1 - p));
  EXPECT_NEAR(total, trials * p, 3 * se);
}

TEST(Simulate, SiftedShareOfRawIsHalfWithoutBackground) {
  const auto lp = link(0.5, 0.05, 0.0, 2e5);
  double n = 0, raw = 0;
  for (int s = 0; s < 100; ++s) {
    const auto r = sift_by_hand(simulate_transmission(lp, 500 + s));
    n += static_cast<double>(r.n);
    raw += static_cast<double>(r.singles);
  }
  EXPECT_NEAR(n / raw, 0.5, 3 * std::sqrt(0.25 / raw));
}

TEST(Simulate, BerMatchesModelPerPreset) {
  const auto& presets = builtin_presets();
  for (const char* name : {"full_daylight", "reduced_daylight", "night"}) {
    const auto& lp = find_preset(presets, name).link;
    const int seeds = 60;
    double n = 0, e = 0;
    for (int s = 0; s < seeds; ++s) {
      const auto r = sift_by_hand(simulate_transmission(lp, 7000 + s));
      n += static_cast<double>(r.n);
      e += static_cast<double>(r.errors);
    }
    const double ber = e / n;
    const double se = std::sqrt(ber * (1 - ber) / n);
    // Background also feeds n: 4C errors against 1e6 P_sif + 8C sifted bits.
    const double c = lp.ch.background_c;
    const double exact = 4 * c / (lp.tx.clock_rate_hz * sift_probability(lp) + 8 * c);
    EXPECT_NEAR(ber, exact, 3 * se + 1e-3 * exact) << name;
    if (std::string(name) == "night") {
      EXPECT_NEAR(ber, expected_ber(lp).value, 3 * se) << name;
    }
  }
}

TEST(Calibration, SingleRunAtFive) {
  const auto o = simulate_transmission(link(0.0, 0.05, 5), 42);
  const auto cal = empirical_background_c(o);
  EXPECT_GE(cal.c_estimate, 2.0);
  EXPECT_LE(cal.c_estimate, 8.0);
  double mean = 0;
  for (auto v : cal.sifted_errors) mean += static_cast<double>(v);
  EXPECT_DOUBLE_EQ(cal.c_estimate, mean / 4);
}

TEST(Calibration, ZeroDetections) {
  const auto cal = empirical_background_c(simulate_transmission(link(0.0, 0.05, 0.0), 1));
  EXPECT_EQ(cal.c_estimate, 0.0);
}

TEST(Calibration, RequiresMuZero) {
  EXPECT_THROW(empirical_background_c(simulate_transmission(link(0.1, 0.05, 5, 1e4), 1)), std::logic_error);
}

TEST(Calibration, MonteCarloMeans) {
  for (double c : {5.0, 50.0}) {
    const double tol = c == 5.0 ? 0.3 : 2.0;
    std::array<double, 4> counts{};
    double mean = 0, singles = 0, matched = 0;
    for (int s = 0; s < 100; ++s) {
      const auto o = simulate_transmission(link(0.0, 0.05, c), 10'000 + s);
      const auto cal = empirical_background_c(o);
      mean += cal.c_estimate;
      for (int d = 0; d < 4; ++d) counts[d] += static_cast<double>(cal.detections[d]);
      const auto hand = sift_by_hand(o);
      singles += static_cast<double>(hand.singles);
      matched += static_cast<double>(hand.n);
    }
    EXPECT_NEAR(mean / 100, c, tol) << c;

    // detectors fire equally often: chi-square, 3 dof, 0.001 level
    const double expect = std::accumulate(counts.begin(), counts.end(), 0.0) / 4;
    double chi2 = 0;
    for (double k : counts) chi2 += (k - expect) * (k - expect) / expect;
    EXPECT_LT(chi2, 16.27) << c;

    // about half of the background lands in the wrong basis
    EXPECT_NEAR(matched / singles, 0.5, 3 * std::sqrt(0.25 / singles)) << c;
  }
}

TEST(OutcomeDump, RoundTrip) {
  const auto o = simulate_transmission(link(0.3, 0.05, 5, 5e4), 8);
  std::stringstream ss;
  write_outcome(ss, o);
  const auto back = read_outcome(ss);
  EXPECT_EQ(back.seed, o.seed);
  EXPECT_EQ(back.pulses, o.pulses);
  EXPECT_EQ(back.detections, o.detections);
  EXPECT_EQ(back.link.tx.mu, o.link.tx.mu);
  EXPECT_EQ(back.link.ch.background_c, o.link.ch.background_c);
}

TEST(Detectors, BasisAndBitMapping) {
  EXPECT_EQ(detector_for(Basis::Rectilinear, false), Detector::H);
  EXPECT_EQ(detector_for(Basis::Rectilinear, true), Detector::V);
  EXPECT_EQ(detector_for(Basis::Diagonal, false), Detector::P45);
  EXPECT_EQ(detector_for(Basis::Diagonal, true), Detector::M45);
  for (auto d : {Detector::H, Detector::V, Detector::P45, Detector::M45}) {
    EXPECT_EQ(detector_for(detector_basis(d), detector_bit(d)), d);
  }
}
