#include <doctest.h>

#include <numbers>

#include "irs/optimizer.hpp"
#include "test_support.hpp"

using namespace irs;
using std::numbers::pi;

namespace {

const LinkBudget kUnit{1.0, 1.0};

ChannelSet scalar_channels(cplx h_r, cplx h_v, cplx h_d)
{
    ChannelSet ch;
    ch.h_r = CMatrix(1, 1);
    ch.h_r(0, 0) = h_r;
    ch.h_v = {h_v};
    ch.h_d = {h_d};
    return ch;
}

bool non_decreasing(const std::vector<double>& trace)
{
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i] < trace[i - 1])
            return false;
    return true;
}

// No single-element substitution raises the gain.
bool coordinate_optimal(const ChannelSet& ch, const PhaseConfig& p)
{
    const double base = test::naive_gain(ch, p);
    PhaseConfig q = p;
    for (std::size_t n = 0; n < p.size(); ++n) {
        for (int l = 0; l < p.levels; ++l) {
            q.indices[n] = l;
            if (test::naive_gain(ch, q) > base * (1 + 1e-12))
                return false;
        }
        q.indices[n] = p.indices[n];
    }
    return true;
}

} // namespace

TEST_CASE("phase_set")
{
    CHECK(phase_set(1) == std::vector<double>{0.0});
    CHECK(phase_set(2) == std::vector<double>{0.0, pi});
    const auto f4 = phase_set(4);
    REQUIRE(f4.size() == 4);
    CHECK(f4[1] == doctest::Approx(pi / 2));
    CHECK(f4[3] == doctest::Approx(3 * pi / 2));
    CHECK_THROWS_AS(phase_set(0), std::invalid_argument);
}

TEST_CASE("quantize_phase uses circular distance")
{
    CHECK(quantize_phase(0.0, 4) == 0);
    CHECK(quantize_phase(-pi / 3, 4) == 3);
    CHECK(quantize_phase(pi / 4, 4) == 0);
    CHECK(quantize_phase(3 * pi / 4, 4) == 1);
    CHECK(quantize_phase(2 * pi - 0.01, 4) == 0);
    CHECK(quantize_phase(-pi, 2) == 1);
    CHECK(quantize_phase(1.234, 1) == 0);
    CHECK(quantize_phase(100 * pi + 0.1, 8) == 0);

    CHECK(circular_distance(0.1, 2 * pi - 0.1) == doctest::Approx(0.2));
    CHECK(circular_distance(0.0, pi) == doctest::Approx(pi));
    CHECK(circular_distance(-pi / 3, 3 * pi / 2) == doctest::Approx(pi / 6));
}

TEST_CASE("successive refinement on the scalar example")
{
    const auto ch = scalar_channels(std::polar(1.0, pi / 3), 1, 1);
    const RefinementOptions opt{4, 1e-6, 100};
    const auto rep = successive_refinement(ch, kUnit, opt);
    CHECK(rep.final_phases.indices == std::vector<int>{3});
    CHECK(channel_gain(ch, rep.final_phases) == doctest::Approx(3.7320508075688776).epsilon(1e-14));
    CHECK(rep.converged);
    CHECK(rep.iterations <= 2);
    CHECK(rep.rate_trace.front() == doctest::Approx(std::log2(4.0)));

    const auto bf = brute_force(ch, 4, kUnit);
    CHECK(bf.phases == rep.final_phases);
    CHECK(bf.gain == doctest::Approx(3.7320508075688776).epsilon(1e-14));
}

TEST_CASE("phase-independent objective leaves the initialization")
{
    // Orthogonal cascade columns, no direct path: A diagonal, b = 0.
    ChannelSet ch;
    ch.h_r = CMatrix(3, 3);
    ch.h_r(0, 0) = 1;
    ch.h_r(1, 1) = {0, 2};
    ch.h_r(2, 2) = -3;
    ch.h_v = {{1, 1}, {0.5, 0}, {0, -1}};
    ch.h_d = CVector(3);
    const PhaseConfig init{{2, 1, 3}, 4};
    const auto rep = successive_refinement(ch, kUnit, {4, 1e-6, 100}, init);
    CHECK(rep.final_phases == init);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
}

TEST_CASE("refinement invariants on random instances")
{
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto ch = test::random_channels(4, 6, seed);
        const auto rep = successive_refinement(ch, kUnit, {2, 1e-6, 100});
        CHECK(non_decreasing(rep.rate_trace));
        CHECK(rep.iterations <= 100);
        CHECK(rep.converged);
        CHECK(coordinate_optimal(ch, rep.final_phases));
        CHECK(rep.final_rate() == doctest::Approx(rate(ch, rep.final_phases, kUnit)).epsilon(1e-12));

        const auto bf = brute_force(ch, 2, kUnit);
        CHECK(bf.gain >= channel_gain(ch, rep.final_phases) * (1 - 1e-12));
        CHECK(rep.final_rate() >= rate(ch, PhaseConfig::zeros(6, 2), kUnit) - 1e-12);
    }
}

TEST_CASE("random initialization is seeded and valid")
{
    const auto a = random_phases(50, 8, 3), b = random_phases(50, 8, 3), c = random_phases(50, 8, 4);
    CHECK(a == b);
    CHECK(a != c);
    CHECK_NOTHROW(a.validate());

    const auto ch = test::random_channels(2, 50, 12);
    const auto rep = successive_refinement(ch, kUnit, {8, 1e-9, 100}, a);
    CHECK(rep.rate_trace.front() == doctest::Approx(rate(ch, a, kUnit)).epsilon(1e-12));
    CHECK(non_decreasing(rep.rate_trace));
    CHECK_THROWS_AS(successive_refinement(ch, kUnit, {4, 1e-6, 100}, a), std::invalid_argument);
    CHECK_THROWS_AS(successive_refinement(ch, kUnit, {8, 1e-6, 100}, random_phases(49, 8, 1)), DimensionError);
}

TEST_CASE("iteration cap is honoured")
{
    const auto ch = test::random_channels(4, 64, 2);
    const auto rep = successive_refinement(ch, kUnit, {4, 1e-300, 1});
    CHECK(rep.iterations == 1);
    CHECK(rep.rate_trace.size() == 2);
    CHECK_THROWS_AS(successive_refinement(ch, kUnit, {4, 0.0, 10}), std::invalid_argument);
}

TEST_CASE("argmax is invariant to joint scalings")
{
    const auto ch = test::random_channels(4, 16, 31);
    const auto ref = successive_refinement(ch, {0.1, 2e-12}, {4, 1e-9, 100});
    // P and N0 scaled together.
    CHECK(successive_refinement(ch, {0.1 * 37, 2e-12 * 37}, {4, 1e-9, 100}).final_phases == ref.final_phases);

    // h_v and h_d scaled together scale A by s^2 and b by s, hence the gain by s^2.
    ChannelSet scaled = ch;
    for (auto& z : scaled.h_v)
        z *= 4.0;
    for (auto& z : scaled.h_d)
        z *= 4.0;
    CHECK(successive_refinement(scaled, {0.1, 2e-12}, {4, 1e-9, 100}).final_phases == ref.final_phases);
}

TEST_CASE("brute force")
{
    SUBCASE("L = 1 has a single configuration")
    {
        const auto ch = test::random_channels(2, 5, 1);
        const auto bf = brute_force(ch, 1, kUnit);
        CHECK(bf.phases == PhaseConfig::zeros(5, 1));
        CHECK(bf.gain == doctest::Approx(test::naive_gain(ch, bf.phases)).epsilon(1e-12));
    }
    SUBCASE("flat objective returns the lexicographically first config")
    {
        auto ch = test::random_channels(2, 4, 1);
        ch.h_v.assign(4, cplx{});
        CHECK(brute_force(ch, 4, kUnit).phases == PhaseConfig::zeros(4, 4));
    }
    SUBCASE("matches an independent enumeration")
    {
        const auto ch = test::random_channels(3, 5, 9);
        double best = -1;
        PhaseConfig p = PhaseConfig::zeros(5, 3);
        for (int code = 0; code < 243; ++code) {
            int rest = code;
            for (int i = 4; i >= 0; --i) {
                p.indices[i] = rest % 3;
                rest /= 3;
            }
            best = std::max(best, test::naive_gain(ch, p));
        }
        CHECK(test::rel_err(brute_force(ch, 3, kUnit).gain, best) <= 1e-12);
    }
    SUBCASE("budget")
    {
        const auto ch = test::random_channels(1, 11, 1);
        CHECK_THROWS_AS(brute_force(ch, 4, kUnit), std::length_error);
        try {
            brute_force(ch, 4, kUnit);
        } catch (const std::length_error& e) {
            CHECK(std::string(e.what()).find("4^11") != std::string::npos);
        }
        CHECK_NOTHROW(brute_force(test::random_channels(1, 10, 1), 2, kUnit, 1024));
        CHECK_THROWS_AS(brute_force(test::random_channels(1, 10, 1), 2, kUnit, 1023), std::length_error);
    }
}

TEST_CASE("grouping")
{
    SUBCASE("validation and reduced shape")
    {
        CHECK(GroupingSpec{2, 2}.reduced_shape({6, 6}) == ArrayShape{3, 3});
        CHECK_THROWS_AS((GroupingSpec{3, 1}.validate_for(ArrayShape{16, 16})), std::invalid_argument);
        CHECK_THROWS_AS((GroupingSpec{0, 1}.validate_for(ArrayShape{16, 16})), std::invalid_argument);
    }
    SUBCASE("group columns are sums of member columns")
    {
        const ArrayShape irs{4, 6};
        const auto ch = test::random_channels(3, 24, 5);
        const auto phi = cascade_matrix(ch);
        const auto g = grouped_cascade(phi, irs, {2, 3});
        REQUIRE(g.cols() == 4);
        for (int gr = 0; gr < 2; ++gr)
            for (int gc = 0; gc < 2; ++gc)
                for (std::size_t m = 0; m < 3; ++m) {
                    cplx sum{};
                    for (int r = 0; r < 2; ++r)
                        for (int c = 0; c < 3; ++c)
                            sum += phi(m, (gr * 2 + r) * 6 + gc * 3 + c);
                    CHECK(std::abs(g(m, gr * 2 + gc) - sum) < 1e-13);
                }

        const auto full = expand_grouped_phases(PhaseConfig{{0, 1, 2, 3}, 4}, irs, {2, 3});
        CHECK(full.indices == std::vector<int>{0, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1,
                                               2, 2, 2, 3, 3, 3, 2, 2, 2, 3, 3, 3});
    }
    SUBCASE("1x1 grouping is bit-identical to full CSI")
    {
        const auto ch = test::random_channels(4, 64, 8);
        const RefinementOptions opt{4, 1e-6, 100};
        const auto g = optimize_grouped(ch, {8, 8}, {1, 1}, {0.1, 2e-12}, opt);
        const auto f = successive_refinement(ch, {0.1, 2e-12}, opt);
        CHECK(g.final_phases == f.final_phases);
        CHECK(g.rate_trace == f.rate_trace);
    }
    SUBCASE("one group reduces to a single variable")
    {
        const ArrayShape irs{3, 3};
        const auto ch = test::random_channels(2, 9, 6);
        const auto rep = optimize_grouped(ch, irs, {3, 3}, kUnit, {8, 1e-9, 100});
        ChannelSet reduced;
        reduced.h_r = grouped_cascade(cascade_matrix(ch), irs, {3, 3});
        reduced.h_v = {cplx{1, 0}};
        reduced.h_d = ch.h_d;
        const auto bf = brute_force(reduced, 8, kUnit);
        CHECK(rep.final_phases == expand_grouped_phases(bf.phases, irs, {3, 3}));
        CHECK(test::rel_err(channel_gain(ch, rep.final_phases), bf.gain) <= 1e-12);
    }
}

TEST_CASE("position-based scheme")
{
    Scenario s;
    s.irs = {4, 4};
    const RefinementOptions opt{4, 1e-6, 100};

    SUBCASE("exact LOS gives the full-CSI result")
    {
        s.beta_r = s.beta_v = s.beta_d = KFactor::infinite();
        const auto ch = los_channels(s);
        const auto pb = optimize_position_based(s, ch, opt);
        const auto full = successive_refinement(ch, LinkBudget::of(s), opt);
        CHECK(pb.final_phases == full.final_phases);
        CHECK(pb.final_rate() == full.final_rate());
    }
    SUBCASE("never beats full CSI on the same draw")
    {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            Rng rng(seed);
            const auto ch = rician_channels(s, rng);
            const auto pb = optimize_position_based(s, ch, opt);
            const auto full = successive_refinement(ch, LinkBudget::of(s), opt);
            CHECK(pb.final_rate() == doctest::Approx(rate(ch, pb.final_phases, LinkBudget::of(s))).epsilon(1e-12));
            CHECK(non_decreasing(pb.estimate_trace));
            // Not a theorem for a local method; holds on these draws with a generous margin.
            CHECK(pb.final_rate() <= full.final_rate() + 1e-9);
        }
    }
    SUBCASE("dimension mismatch")
    {
        const auto ch = test::random_channels(8, 15, 1);
        CHECK_THROWS_AS(optimize_position_based(s, ch, opt), DimensionError);
    }
}
