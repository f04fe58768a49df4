#include "jost/channels.hpp"
#include "jost/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

using namespace jost;

namespace {

ChannelSet benchmark() { return ChannelSet({{0.0, 1.0, 0}, {0.1, 1.0, 0}}); }

}  // namespace

TEST_CASE("channel momenta on the physical sheet") {
    const auto cs = benchmark();
    const auto k = channel_momenta(cs, {5.0, 0.0}, physical_sheet(cs));
    CHECK(std::abs(k[0] - std::sqrt(10.0)) < 1e-14);
    CHECK(std::abs(k[1] - std::sqrt(9.8)) < 1e-14);

    const auto kb = channel_momenta(cs, {-2.314391, 0.0}, physical_sheet(cs));
    CHECK(std::abs(kb[0] - cplx{0.0, 2.1514604}) < 1e-7);
    CHECK(kb[1].imag() > kb[0].imag());
    CHECK(kb[0].real() == 0.0);

    // between the thresholds: channel 1 open, channel 2 closed
    const auto km = channel_momenta(cs, {0.05, 0.0}, physical_sheet(cs));
    CHECK(km[0].imag() == 0.0);
    CHECK(km[0].real() > 0.0);
    CHECK(km[1].real() == 0.0);
    CHECK(km[1].imag() > 0.0);
}

TEST_CASE("sheet signs flip the momenta") {
    const auto cs = benchmark();
    const cplx e{4.7, -0.3};
    const auto kp = channel_momenta(cs, e, SheetSelector::parse("++"));
    const auto km = channel_momenta(cs, e, SheetSelector::parse("-+"));
    CHECK(km[0] == -kp[0]);
    CHECK(km[1] == kp[1]);
    for (const auto& k : kp) CHECK(k.imag() >= 0.0);
    for (std::size_t n = 0; n < 2; ++n) CHECK(std::abs(kp[n] * kp[n] - cs.momentum_squared(n, e)) < 1e-13);
}

TEST_CASE("upper_sqrt branch") {
    CHECK(upper_sqrt({4.0, 0.0}) == cplx{2.0, 0.0});
    CHECK(upper_sqrt({-4.0, 0.0}) == cplx{0.0, 2.0});
    CHECK(upper_sqrt({-4.0, -0.0}) == cplx{0.0, 2.0});
    CHECK(upper_sqrt({0.0, 0.0}) == cplx{0.0, 0.0});
    const cplx w = upper_sqrt({-3.0, -1e-300});
    CHECK(w.imag() > 0.0);
    for (cplx z : {cplx{1.0, 1.0}, cplx{1.0, -1.0}, cplx{-1.0, -1.0}, cplx{-1.0, 1.0}}) {
        const cplx r = upper_sqrt(z);
        CHECK(r.imag() >= 0.0);
        CHECK(std::abs(r * r - z) < 1e-15);
    }
}

TEST_CASE("momentum squared includes mass and hbar") {
    const ChannelSet cs({{0.5, 2.0, 1}}, 0.5);
    CHECK(std::abs(cs.momentum_squared(0, {1.5, 0.0}) - cplx{16.0, 0.0}) < 1e-14);
    CHECK(cs.max_threshold() == 0.5);
}

TEST_CASE("sheet selectors") {
    const auto s = SheetSelector::parse("+-");
    CHECK(s.size() == 2);
    CHECK(s[0] == 1);
    CHECK(s[1] == -1);
    CHECK(!s.is_physical());
    CHECK(s.flipped().to_string() == "-+");
    CHECK(SheetSelector::parse("++").is_physical());
    CHECK(s == SheetSelector({1, -1}));

    const auto all = enumerate_sheets(benchmark());
    REQUIRE(all.size() == 4);
    CHECK(all[0].to_string() == "++");
    CHECK(all[1].to_string() == "-+");
    CHECK(all[2].to_string() == "+-");
    CHECK(all[3].to_string() == "--");
    std::set<std::string> distinct;
    for (const auto& sh : all) distinct.insert(sh.to_string());
    CHECK(distinct.size() == 4);
}

TEST_CASE("invalid channel input is rejected") {
    CHECK_THROWS_AS(ChannelSet({}), InvalidArgument);
    CHECK_THROWS_AS(ChannelSet({{0.0, 1.0, 0}}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(ChannelSet({{0.0, -1.0, 0}}), InvalidArgument);
    CHECK_THROWS_AS(ChannelSet({{0.0, 1.0, -1}}), InvalidArgument);
    CHECK_THROWS_AS(ChannelSet({{NAN, 1.0, 0}}), InvalidArgument);
    CHECK_THROWS_AS(SheetSelector({1, 0}), InvalidArgument);
    CHECK_THROWS_AS(SheetSelector::parse("+x"), InvalidArgument);
    CHECK_THROWS_AS(SheetSelector::parse(""), InvalidArgument);
    CHECK_THROWS_AS(channel_momenta(benchmark(), {1.0, 0.0}, SheetSelector::parse("+")), InvalidArgument);
    std::vector<Channel> many(17);
    CHECK_THROWS_AS(enumerate_sheets(ChannelSet(many)), InvalidArgument);
}
