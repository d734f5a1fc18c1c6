#include <cmath>

#include <doctest.h>

#include "ricciflow/analysis.hpp"
#include "ricciflow/flow.hpp"
#include "test_support.hpp"

using namespace ricciflow;

TEST_CASE("threshold detection") {
  SUBCASE("ordered SU2 data certifies from the start") {
    const auto traj = integrate(BianchiClass::SU2, {0.0, 1.0, 1.0, 1.0}, 5.0);
    const auto cert =
        detect_tau(BianchiClass::SU2, traj, Convention::ComponentLiteral);
    CHECK(cert.tau == 0.0);
    CHECK(cert.holds_to_end);
    REQUIRE(cert.predicates.size() == 2);
    for (const auto& p : cert.predicates) CHECK(p.min_margin >= 0.0);
  }
  SUBCASE("Heisenberg with B0 >= C0 certifies from the start") {
    const auto traj =
        integrate(BianchiClass::Heisenberg, normalized({0.0, 1.0, 1.1, 0.9}),
                  5.0);
    const auto cert = detect_tau(BianchiClass::Heisenberg, traj,
                                 Convention::ComponentLiteral);
    CHECK(cert.tau == 0.0);
  }
  SUBCASE("pinched SU2 data needs a positive threshold") {
    // A0 > B0 + C0 makes the middle ordering fail until the pinching
    // relaxes; tau sits near the sign change of (B+C)^2 - A^2.
    const MetricState init = normalized({0.0, 4.0, 0.6, 0.4});
    const auto traj = integrate(BianchiClass::SU2, init, 10.0);
    const auto cert =
        detect_tau(BianchiClass::SU2, traj, Convention::ComponentLiteral);
    CHECK(cert.tau > 0.0);
    CHECK(cert.holds_to_end);
    const MetricState at_tau = traj.at(cert.tau);
    const MetricState before = traj.at(std::max(0.0, cert.tau - 0.02));
    CHECK((at_tau.b + at_tau.c) * (at_tau.b + at_tau.c) >=
          at_tau.a * at_tau.a * (1.0 - 1e-6));
    CHECK((before.b + before.c) * (before.b + before.c) <
          before.a * before.a * (1.0 + 1e-6));
  }
  SUBCASE("threshold is stable under grid refinement") {
    const MetricState init = normalized({0.0, 4.0, 0.6, 0.4});
    IntegratorControls coarse, fine;
    coarse.sample_spacing = 0.01;
    fine.sample_spacing = 0.005;
    const double t1 = detect_tau(BianchiClass::SU2,
                                 integrate(BianchiClass::SU2, init, 10.0, coarse),
                                 Convention::ComponentLiteral)
                          .tau;
    const double t2 = detect_tau(BianchiClass::SU2,
                                 integrate(BianchiClass::SU2, init, 10.0, fine),
                                 Convention::ComponentLiteral)
                          .tau;
    CHECK(std::abs(t1 - t2) <= 0.01 + 1e-12);
  }
  SUBCASE("no threshold when an ordering fails at the horizon") {
    // With A0 < B0 the SU2 flow preserves A < B, so q1 >= q2 never holds.
    const auto traj =
        integrate(BianchiClass::SU2, normalized({0.0, 0.9, 1.2, 1.0}), 2.0);
    CHECK_THROWS_WITH_AS(
        detect_tau(BianchiClass::SU2, traj, Convention::ComponentLiteral),
        doctest::Contains("q1>=q2"), NoTauError);
  }
  SUBCASE("class errors") {
    const auto traj = integrate(BianchiClass::SU2, {0.0, 1.0, 1.0, 1.0}, 1.0);
    CHECK_THROWS_AS(
        detect_tau(BianchiClass::SL2R, traj, Convention::ComponentLiteral),
        ClassError);
    const auto flat =
        integrate(BianchiClass::Euclidean3, {0.0, 1.0, 1.0, 1.0}, 1.0);
    CHECK_THROWS_AS(detect_tau(BianchiClass::Euclidean3, flat,
                               Convention::ComponentLiteral),
                    ClassError);
  }
}

TEST_CASE("lemma verification") {
  SUBCASE("SU2 clauses hold on ordered data") {
    const auto traj =
        integrate(BianchiClass::SU2, normalized({0.0, 1.2, 1.0, 0.85}), 25.0);
    const auto rep = verify_lemma(LemmaId::L4_1, traj);
    CHECK(rep.pass);
    REQUIRE(rep.clauses.size() == 3);  // horizon long enough for convergence
    for (const auto& cl : rep.clauses) CHECK(cl.pass);
  }
  SUBCASE("SU2 fixed point is a degenerate pass") {
    const auto traj = integrate(BianchiClass::SU2, {0.0, 1.0, 1.0, 1.0}, 25.0);
    CHECK(verify_lemma(LemmaId::L4_1, traj).pass);
  }
  SUBCASE("SL2R clauses hold when B0 > C0") {
    const auto traj =
        integrate(BianchiClass::SL2R, normalized({0.0, 1.0, 1.2, 0.9}), 20.0);
    const auto rep = verify_lemma(LemmaId::L5_1, traj);
    CHECK(rep.pass);
    REQUIRE(rep.clauses.size() == 7);
  }
  SUBCASE("E11 clauses hold, including the A0 = B0 degenerate case") {
    const auto traj =
        integrate(BianchiClass::E11, normalized({0.0, 1.4, 0.9, 1.0}), 20.0);
    CHECK(verify_lemma(LemmaId::L7_1, traj).pass);
    const auto equal =
        integrate(BianchiClass::E11, normalized({0.0, 1.1, 1.1, 1.0}), 20.0);
    // A0 = B0 sits exactly on the C and A+B upper boundaries, so allow
    // the integration error a little more room than the default.
    const auto rep = verify_lemma(LemmaId::L7_1, equal, 1e-7);
    CHECK(rep.pass);
    for (const auto& s : equal.samples())
      CHECK(std::abs(s.a - s.b) < 1e-10);
  }
  SUBCASE("E2 clauses hold and the flow flattens") {
    const auto traj =
        integrate(BianchiClass::E2, normalized({0.0, 1.3, 0.9, 1.0}), 25.0);
    const auto rep = verify_lemma(LemmaId::L8_1, traj);
    CHECK(rep.pass);
    REQUIRE(rep.clauses.size() == 5);
  }
  SUBCASE("precondition and class mismatches are rejected") {
    const auto su2 =
        integrate(BianchiClass::SU2, normalized({0.0, 0.9, 1.2, 1.0}), 1.0);
    CHECK_THROWS_AS(verify_lemma(LemmaId::L4_1, su2), PreconditionError);
    CHECK_THROWS_AS(verify_lemma(LemmaId::L5_1, su2), ClassError);
    const auto sl2r =
        integrate(BianchiClass::SL2R, normalized({0.0, 1.0, 0.9, 1.2}), 1.0);
    CHECK_THROWS_AS(verify_lemma(LemmaId::L5_1, sl2r), PreconditionError);
    const auto e2 =
        integrate(BianchiClass::E2, normalized({0.0, 0.9, 1.3, 1.0}), 1.0);
    CHECK_THROWS_AS(verify_lemma(LemmaId::L8_1, e2), PreconditionError);
  }
}

TEST_CASE("monotonicity checks") {
  TimeSeries constant;
  for (int i = 0; i <= 10; ++i) {
    constant.times.push_back(0.1 * i);
    constant.values.push_back(2.0);
  }
  CHECK(check_monotone(constant, Direction::NonDecreasing, 0.0).pass);
  CHECK(check_monotone(constant, Direction::NonIncreasing, 0.0).pass);

  TimeSeries decay;
  for (int i = 0; i <= 10; ++i) {
    decay.times.push_back(0.1 * i);
    decay.values.push_back(std::exp(-0.1 * i));
  }
  CHECK(check_monotone(decay, Direction::NonIncreasing, 1e-12).pass);
  const auto bad = check_monotone(decay, Direction::NonDecreasing, 1e-12);
  CHECK(!bad.pass);
  REQUIRE(bad.first_violation.has_value());
  CHECK(*bad.first_violation == doctest::Approx(0.1));

  TimeSeries tiny;
  tiny.times = {0.0};
  tiny.values = {1.0};
  CHECK_THROWS_AS(check_monotone(tiny, Direction::NonDecreasing, 0.0),
                  DomainError);
  TimeSeries misaligned;
  misaligned.times = {0.0, 1.0};
  misaligned.values = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(check_monotone(misaligned, Direction::NonDecreasing, 0.0),
                  DomainError);
}
