#include <doctest.h>

#include "test_helpers.hpp"

using namespace lssid;

TEST_CASE("validate accepts a minimal dataset") {
    SampledDataset d;
    d.t = (Vec(2) << 0.0, 0.01).finished();
    d.u = Mat::Zero(2, 1);
    d.y = Mat::Zero(2, 1);
    CHECK_NOTHROW(validate(d));
}

TEST_CASE("validate rejects non-monotone timestamps") {
    SampledDataset d;
    d.t = (Vec(2) << 0.01, 0.0).finished();
    d.u = Mat::Zero(2, 1);
    d.y = Mat::Zero(2, 1);
    try {
        validate(d);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.kind == ValidationError::Kind::NonMonotoneTimestamps);
    }
}

TEST_CASE("validate rejects length mismatches distinctly") {
    SampledDataset d;
    d.t = (Vec(3) << 0.0, 0.01, 0.02).finished();
    d.u = Mat::Zero(3, 1);
    d.y = Mat::Zero(2, 1);
    try {
        validate(d);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.kind == ValidationError::Kind::DimensionMismatch);
    }
}

TEST_CASE("validate rejects N < 2") {
    SampledDataset d;
    d.t = Vec::Zero(1);
    d.u = Mat::Zero(1, 1);
    d.y = Mat::Zero(1, 1);
    try {
        validate(d);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.kind == ValidationError::Kind::TooShort);
    }
}

TEST_CASE("switched system validation enforces matching mode dimensions") {
    SwitchedSystem s = benchmark_system();
    CHECK_NOTHROW(s.validate());
    s.A[1] = Mat::Zero(3, 3);
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("markov mode loss is symmetric off-diagonal for K = 2") {
    const ModeLossSpec loss = markov_mode_loss(2, 0.1, 1e-6);
    CHECK(loss.trans_cost(0, 1) == doctest::Approx(loss.trans_cost(1, 0)).epsilon(1e-15));
    CHECK(loss.trans_cost(0, 0) == doctest::Approx(loss.trans_cost(1, 1)).epsilon(1e-15));
}

TEST_CASE("fit config invariants") {
    FitConfig c;
    c.mode_loss = markov_mode_loss(2, 0.1, 1e-6);
    CHECK_NOTHROW(c.validate());
    c.alpha = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}
