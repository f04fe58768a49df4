#include "jost/errors.hpp"
#include "jost/expansion.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

using namespace jost;

namespace {

ChannelSet benchmark() { return ChannelSet({{0.0, 1.0, 0}, {0.1, 1.0, 0}}); }

double rel_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
}

const ExpansionTable& table5() {
    static const ExpansionTable t =
        integrate_coefficients(benchmark(), NoroTaylorPotential{}, {5.0, 0.0}, 5, SolverSettings{});
    return t;
}

}  // namespace

TEST_CASE("zero potential expansion gives half the identity everywhere") {
    const ChannelSet cs({{0.0, 1.0, 0}, {0.2, 1.5, 1}});
    const auto table = integrate_coefficients(cs, ZeroPotential(2), {1.0, 0.0}, 3, SolverSettings{});
    for (cplx e : {cplx{1.0, 0.0}, cplx{3.0, -1.0}, cplx{0.5, 0.5}}) {
        const auto jp = jost_from_expansion(table, e, SheetSelector::parse("+-"));
        CHECK((jp.F_in - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((jp.F_out - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("expansion matches the direct solver at its centre") {
    const auto cs = benchmark();
    const NoroTaylorPotential p;
    for (const auto& sheet : enumerate_sheets(cs)) {
        const auto e = jost_from_expansion(table5(), cs, {5.0, 0.0}, sheet);
        const auto d = integrate_direct(cs, p, {5.0, 0.0}, sheet, SolverSettings{});
        CHECK(rel_diff(e.F_in, d.F_in) < 1e-9);
        CHECK(rel_diff(e.F_out, d.F_out) < 1e-9);
        CHECK(e.sheet == sheet);
    }
}

TEST_CASE("expansion error shrinks with the order") {
    const auto cs = benchmark();
    const NoroTaylorPotential p;
    const cplx e{5.3, -0.2};
    const auto sheet = SheetSelector::parse("--");
    const Matrix exact = integrate_direct(cs, p, e, sheet, SolverSettings{}).F_in;
    double previous = 1.0;
    for (int m : {1, 3, 5}) {
        const double err = rel_diff(jost_from_expansion(table5().truncated(m), e, sheet).F_in, exact);
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 5e-3);
}

TEST_CASE("expansion rejects mismatched channels") {
    const ChannelSet other({{0.0, 1.0, 0}, {0.2, 1.0, 0}});
    CHECK_THROWS_AS(jost_from_expansion(table5(), other, {5.0, 0.0}, physical_sheet(other)), InvalidArgument);
    ExpansionTable empty = table5();
    empty.a.clear();
    CHECK_THROWS_AS(jost_from_expansion(empty, {5.0, 0.0}, physical_sheet(benchmark())), InvalidArgument);
}

TEST_CASE("domain D of the benchmark") {
    const auto cs = benchmark();
    const NoroTaylorPotential p;
    CHECK(domain_d_contains(cs, p, {5.0, 0.0}).inside);
    CHECK(!domain_d_contains(cs, p, {-1.0, 0.0}).inside);
    CHECK(!domain_d_contains(cs, p, {5.0, 5.0}).inside);
    CHECK(std::abs(domain_d_contains(cs, p, {-1.0, 0.0}).margin - (1.0 - 2.0 * std::sqrt(2.2))) < 1e-12);

    const auto crossings = domain_real_axis_crossings(cs, p, -1.0, 12.0);
    REQUIRE(crossings.size() == 1);
    CHECK(std::abs(crossings[0] - (-0.025)) < 1e-10);

    const auto edge = domain_upper_edge(cs, p, 5.0, 10.0);
    REQUIRE(edge.has_value());
    CHECK(*edge > 0.0);
    CHECK(std::abs(domain_d_contains(cs, p, {5.0, *edge}).margin) < 1e-9);
    CHECK(!domain_upper_edge(cs, p, -1.0, 10.0).has_value());
    CHECK(domain_d_contains(cs, ZeroPotential(2), {-100.0, 50.0}).inside);
    CHECK_THROWS_AS(domain_real_axis_crossings(cs, p, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("energy grid ordering") {
    const EnergyGrid g{4.0, 6.0, -1.0, 1.0, 3, 2};
    CHECK(g.size() == 6);
    CHECK(g.point(0) == cplx{4.0, -1.0});
    CHECK(g.point(1) == cplx{5.0, -1.0});
    CHECK(g.point(3) == cplx{4.0, 1.0});
    CHECK(g.point(5) == cplx{6.0, 1.0});
    CHECK_THROWS_AS((EnergyGrid{1.0, 0.0, 0.0, 0.0, 2, 2}.validate()), InvalidArgument);
    CHECK_THROWS_AS((EnergyGrid{0.0, 1.0, 0.0, 1.0, 0, 2}.validate()), InvalidArgument);
}

TEST_CASE("accuracy map") {
    const auto cs = benchmark();
    const NoroTaylorPotential p;
    const EnergyGrid grid{4.9, 5.1, -0.1, 0.1, 3, 3};
    const auto sheet = SheetSelector::parse("--");
    const auto map = accuracy_map(table5(), cs, p, grid, sheet, SolverSettings{}, 2);
    REQUIRE(map.rel_err.size() == 9);
    REQUIRE(map.rel_err[4].has_value());
    CHECK(*map.rel_err[4] < 1e-8);
    CHECK(map.count_below(1e-2) == 9);
    CHECK(map.count_below(0.0) == 0);

    std::ostringstream os;
    write_accuracy_csv(os, map);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "re_E,im_E,rel_err");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 9);

    std::vector<std::optional<cplx>> dets(9);
    const auto blank = accuracy_map(table5(), grid, sheet, dets);
    CHECK(blank.count_below(1.0) == 0);
    dets.pop_back();
    CHECK_THROWS_AS(accuracy_map(table5(), grid, sheet, dets), InvalidArgument);
}
