#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "obstrukt/error.hpp"
#include "obstrukt/pairmaps.hpp"
#include "test_support.hpp"

using namespace obstrukt;
using testing_support::Gen;

namespace {

RealVector e_last(std::size_t n, double value) {
    RealVector out(n, 0.0);
    out.back() = value;
    return out;
}

// A point of the closed disk in R^{2n-2}, sometimes pushed onto its boundary.
RealVector disk_point(Gen& g, std::size_t n) {
    RealVector s = g.coin() ? g.on_sphere(2 * n - 2) : g.in_ball(2 * n - 2);
    return s;
}

}  // namespace

TEST_CASE("eval_alpha examples") {
    const RealVector v{1.0, 0.0}, w{0.0, 0.0};
    CHECK(max_abs_diff(eval_alpha(AlphaVariant::Sphere, v, w), RealVector{0, 0, 1}) == 0.0);

    const double r = 1.0 / std::sqrt(2.0);
    const RealVector vr{r * r, 0.0}, wr{r * r, 0.0};
    // |v|^2 + |w|^2 = 1/2 here, so evaluate the closed form on the unit sphere
    // point v = w = (1/sqrt2, 0).
    const RealVector vs{r, 0.0}, ws{r, 0.0};
    CHECK(max_abs_diff(eval_alpha(AlphaVariant::Sphere, vs, ws), RealVector{r, 0.0, 0.0}) <= 1e-15);
    CHECK_THROWS_AS(eval_alpha(AlphaVariant::Sphere, vr, wr), DomainError);

    const RealVector z{0.0, 0.0};
    CHECK(eval_alpha(AlphaVariant::Half, z, z) == RealVector{0, 0, 1});
    CHECK(eval_alpha(AlphaVariant::NegHalf, z, z) == RealVector{0, 0, -1});
}

TEST_CASE("eval_alpha domain errors") {
    const RealVector big{1.0, 0.1}, z{0.0, 0.0};
    CHECK_THROWS_AS(eval_alpha(AlphaVariant::Half, big, z), DomainError);
    CHECK_THROWS_AS(eval_alpha(AlphaVariant::NegHalf, big, z), DomainError);
    CHECK_THROWS_AS(eval_alpha(AlphaVariant::Sphere, z, z), DomainError);
    const RealVector slack{1.0 + 4e-13, 0.0};
    CHECK_NOTHROW(eval_alpha(AlphaVariant::Half, slack, z));
    const RealVector short_w{0.0};
    CHECK_THROWS_AS(eval_alpha(AlphaVariant::Half, z, short_w), ShapeError);
}

TEST_CASE("eval_alpha matches the closed forms") {
    Gen g(3);
    for (std::size_t n : {2u, 3u, 4u, 6u}) {
        for (int t = 0; t < 100; ++t) {
            const RealVector p = g.in_ball(2 * n - 2);
            const RealVector v(p.begin(), p.begin() + static_cast<long>(n - 1));
            const RealVector w(p.begin() + static_cast<long>(n - 1), p.end());
            const double vv = norm2(v) * norm2(v), ww = norm2(w) * norm2(w);
            RealVector half(n), neg(n);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                half[i] = w[i] + ww * (v[i] - w[i]);
                neg[i] = v[i] + vv * (w[i] - v[i]);
            }
            half.back() = 1.0 - 2.0 * ww;
            neg.back() = 2.0 * vv - 1.0;
            CHECK(max_abs_diff(eval_alpha(AlphaVariant::Half, v, w), half) <= 1e-15);
            CHECK(max_abs_diff(eval_alpha(AlphaVariant::NegHalf, v, w), neg) <= 1e-15);
        }
    }
}

TEST_CASE("alpha never vanishes on the sphere") {
    Gen g(4);
    for (std::size_t n : {2u, 3u, 5u}) {
        for (int t = 0; t < 1000; ++t) {
            const RealVector p = g.on_sphere(2 * n - 2);
            const std::span<const double> sp(p);
            CHECK(norm2(eval_alpha(AlphaVariant::Sphere, sp.subspan(0, n - 1), sp.subspan(n - 1))) > 0.0);
        }
    }
}

TEST_CASE("half variants restrict to alpha on the boundary sphere") {
    Gen g(5);
    for (std::size_t n : {2u, 3u, 4u}) {
        for (int t = 0; t < 1000; ++t) {
            const RealVector p = g.on_sphere(2 * n - 2);
            const std::span<const double> sp(p);
            const auto v = sp.subspan(0, n - 1), w = sp.subspan(n - 1);
            const RealVector a = eval_alpha(AlphaVariant::Sphere, v, w);
            CHECK(max_abs_diff(eval_alpha(AlphaVariant::Half, v, w), a) <= 1e-12);
            CHECK(max_abs_diff(eval_alpha(AlphaVariant::NegHalf, v, w), a) <= 1e-12);
            // Hence the boundary values of the generator family satisfy
            // F(x1,x2) + F(x2,x3) + F(x3,x1) = 0 there.
            RealVector sum = eval_generator(n, p, 0, 1);
            const RealVector b = eval_generator(n, p, 1, 2), c = eval_generator(n, p, 2, 0);
            for (std::size_t i = 0; i < n; ++i) sum[i] += b[i] + c[i];
            CHECK(max_norm(sum) <= 1e-12);
        }
    }
}

TEST_CASE("eval_generator examples") {
    for (std::size_t n : {2u, 3u, 5u}) {
        const RealVector s(2 * n - 2, 0.0);
        CHECK(eval_generator(n, s, 0, 1) == e_last(n, 0.5));
        CHECK(eval_generator(n, s, 1, 2) == e_last(n, 1.0));
        CHECK(eval_generator(n, s, 2, 1) == e_last(n, -1.0));
        CHECK(eval_generator(n, s, 2, 0) == e_last(n, 0.5));
        CHECK_THROWS_AS(eval_generator(n, s, 1, 1), DomainError);
        CHECK_THROWS_AS(eval_generator(n, s, 0, 3), InputError);
    }
    const RealVector outside{1.0, 0.0, 0.5, 0.0};
    CHECK_THROWS_AS(eval_generator(3, outside, 0, 1), DomainError);
}

TEST_CASE("built-in pair maps are antisymmetric") {
    Gen g(6);
    for (std::size_t n : {2u, 3u, 4u}) {
        const PairMapSpec family = generator_family(n);
        for (int t = 0; t < 1000; ++t) {
            const RealVector s = disk_point(g, n);
            const std::size_t i = g.index(3);
            const std::size_t j = (i + 1 + g.index(2)) % 3;
            RealVector sum = family.evaluate(i, j, s);
            const RealVector back = family.evaluate(j, i, s);
            for (std::size_t k = 0; k < n; ++k) sum[k] += back[k];
            CHECK(norm2(sum) <= 1e-12);
        }
    }
    for (int t = 0; t < 1000; ++t) {
        const std::size_t m = 1 + g.index(3);
        std::vector<RealVector> pts;
        for (int k = 0; k < 4; ++k) pts.push_back(g.gaussian(m));
        const PairMapSpec diff = difference_map(PointConfig(m, pts), m + g.index(2));
        const std::size_t i = g.index(4), j = (i + 1 + g.index(3)) % 4;
        RealVector sum = diff.evaluate(i, j);
        const RealVector back = diff.evaluate(j, i);
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += back[k];
        CHECK(norm2(sum) <= 1e-12);
    }
    for (const char* name : {"circle", "figure_eight", "limacon"}) {
        const Chart chart = named_chart(name, 3);
        for (int t = 0; t < 1000; ++t) {
            const double a = g.uniform(0.0, chart.period), b = g.uniform(0.0, chart.period);
            const RealVector fa = chart.eval(a), fb = chart.eval(b);
            RealVector d1(3), d2(3);
            for (std::size_t k = 0; k < 3; ++k) {
                d1[k] = fa[k] - fb[k];
                d2[k] = fb[k] - fa[k];
                d1[k] += d2[k];
            }
            CHECK(norm2(d1) <= 1e-12);
        }
    }
}

TEST_CASE("check_isovariance examples") {
    SUBCASE("triangle difference map") {
        const PointConfig tri(2, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}});
        const IsovarianceReport r = check_isovariance(difference_map(tri, 2), 100);
        CHECK(r.passed);
        CHECK(r.max_antisymmetry_defect == 0.0);
        CHECK(r.min_norm == doctest::Approx(1.0));
    }
    SUBCASE("generator family") {
        const IsovarianceReport r = check_isovariance(generator_family(3), 500);
        CHECK(r.passed);
        CHECK(r.max_antisymmetry_defect <= 1e-12);
        CHECK(r.min_norm > 0.0);
        const PairMapSpec at_origin = generator_at(3, RealVector(4, 0.0));
        CHECK(at_origin.evaluate(1, 2) == RealVector{0, 0, 1});
        CHECK(check_isovariance(at_origin, 10).passed);
    }
    SUBCASE("constant map fails with defect 2") {
        const PairMapSpec c = custom_pair_map("constant", 3, 3, [](std::size_t, std::size_t, std::span<const double>) {
            return RealVector{1.0, 0.0, 0.0};
        });
        const IsovarianceReport r = check_isovariance(c, 10);
        CHECK_FALSE(r.passed);
        CHECK(r.max_antisymmetry_defect == doctest::Approx(2.0));
    }
    SUBCASE("a vanishing value fails") {
        const PairMapSpec z = custom_pair_map("zero", 2, 2, [](std::size_t, std::size_t, std::span<const double>) {
            return RealVector{0.0, 0.0};
        });
        const IsovarianceReport r = check_isovariance(z, 10);
        CHECK_FALSE(r.passed);
        CHECK(r.min_norm == 0.0);
    }
    SUBCASE("charts") {
        CHECK(check_isovariance(named_chart("circle"), 200).passed);
        CHECK(check_isovariance(named_chart("figure_eight"), 200).passed);
    }
    SUBCASE("evaluation failures propagate") {
        const PairMapSpec bad = custom_pair_map("bad", 2, 2, [](std::size_t, std::size_t, std::span<const double>) -> RealVector {
            throw DomainError("no value");
        });
        CHECK_THROWS_AS(check_isovariance(bad, 10), DomainError);
    }
    SUBCASE("zero samples are rejected") {
        CHECK_THROWS_AS(check_isovariance(generator_family(3), 0), InputError);
    }
}

TEST_CASE("sampling is deterministic") {
    const IsovarianceReport a = check_isovariance(generator_family(4), 300);
    const IsovarianceReport b = check_isovariance(generator_family(4), 300);
    CHECK(a.max_antisymmetry_defect == b.max_antisymmetry_defect);
    CHECK(a.min_norm == b.min_norm);
    CHECK(a.pairs_checked == b.pairs_checked);
    const RealVector p1{0.0, 0.0, 0.5};
    CHECK(sample_min_distance(AlphaVariant::Sphere, 3, p1, 5000) ==
          sample_min_distance(AlphaVariant::Sphere, 3, p1, 5000));
    HaltonSequence h1(3), h2(3);
    for (int i = 0; i < 20; ++i) CHECK(h1.next() == h2.next());
}

TEST_CASE("halton points lie in the unit cube") {
    HaltonSequence h(5);
    CHECK(h.dimension() == 5);
    for (int i = 0; i < 1000; ++i)
        for (double c : h.next()) CHECK((c >= 0.0 && c < 1.0));
}

TEST_CASE("sample_min_distance examples") {
    const RealVector p1{0.0, 0.0, 0.5};
    CHECK(sample_min_distance(AlphaVariant::Sphere, 3, p1, 100000) > 1e-3);
    CHECK(sample_min_distance(AlphaVariant::Half, 3, p1, 100000) > 1e-3);
    const RealVector pole{0.0, 0.0, 1.0};
    CHECK(sample_min_distance(AlphaVariant::Sphere, 3, pole, 100000) <= 1e-6);
    CHECK_THROWS_AS(sample_min_distance(AlphaVariant::Sphere, 3, p1, 999), InputError);
}

TEST_CASE("point configurations must be distinct") {
    CHECK_THROWS_AS(PointConfig(2, {{0.0, 0.0}, {0.0, 0.0}}), InputError);
    CHECK_THROWS_AS(PointConfig(2, {{0.0, 0.0}, {1.0}}), InputError);
    const PointConfig c(1, {{0.0}, {3.0}, {1.0}});
    CHECK(c.min_distance() == 1.0);
}
