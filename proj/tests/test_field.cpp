#include <cmath>

#include "doctest.h"
#include "pdmsym/field.hpp"

using namespace pdm;

namespace {

Binding no_binding;

double val_d(const std::string& src, const Binding& b, std::array<double, 3> p,
             int ord = 0) {
    return eval_field<double>(parse_field(src), b, p, ord).value();
}

}  // namespace

TEST_CASE("parsing and free names") {
    auto e = parse_field("r^2 / F(phi, theta)");
    auto [params, slots] = free_names(e);
    CHECK(params.empty());
    CHECK(slots == std::set<std::string>{"F"});

    auto poly = parse_field("c1*x2^2*x3^2 + c2*x1^2*x3^2 + c3*x1^2*x2^2");
    auto [p2, s2] = free_names(poly);
    CHECK(p2 == std::set<std::string>{"c1", "c2", "c3"});
    CHECK(s2.empty());

    CHECK_THROWS_WITH_AS(parse_field("x1 + "), "expected expression at offset 5",
                         ParseError);
    CHECK_THROWS_AS(parse_field("x1(2)"), ParseError);
    CHECK_THROWS_AS(parse_field("sqrt(x1, x2)"), ParseError);
    CHECK_THROWS_AS(parse_field("2.5*x1"), ParseError);
    CHECK_THROWS_AS(parse_field(""), ParseError);

    // "p/q" folds to a single exact literal.
    auto half = parse_field("1/2");
    REQUIRE(half->kind == FieldKind::Num);
    CHECK(half->num == rat(1, 2));
}

TEST_CASE("print parse round-trip") {
    const char* cases[] = {
        "x1 + x2*x3",
        "r^2/F(phi, theta)",
        "-(x1 - x2)^3",
        "(c1*rt + c2*x2 - c3*rt*x1^2)/(x1^2*rt)",
        "1/2*x1 - 5/7",
        "F(rt + x2, rt - x2) + G(zp)",
        "x1^-2",
        "sqrt(exp(ln(sin(cos(tan(atan(x1)))))))",
        "-x1^2",
        "x1 - (x2 - x3)",
        "x1/(x2*x3)",
    };
    for (const auto* src : cases) {
        auto a = parse_field(src);
        auto b = parse_field(print_field(a));
        CHECK_MESSAGE(field_equal(a, b), src, " -> ", print_field(a));
    }
}

TEST_CASE("evaluation basics") {
    CHECK(val_d("r", no_binding, {3, 4, 0}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(val_d("phi", no_binding, {1, 1, 0}) ==
          doctest::Approx(M_PI / 4).epsilon(1e-15));

    auto q = eval_field<Rat>(parse_field("x1^2+x2^2+x3^2"), no_binding,
                             {Rat(1), Rat(2), Rat(3)}, 2);
    CHECK(q.value() == 14);
    CHECK(extract_partial(q, {1, 0, 0}) == 2);
    CHECK(extract_partial(q, {0, 1, 0}) == 4);
    CHECK(extract_partial(q, {0, 0, 1}) == 6);
    CHECK(extract_partial(q, {2, 0, 0}) == 2);
    CHECK(extract_partial(q, {0, 2, 0}) == 2);
    CHECK(extract_partial(q, {0, 0, 2}) == 2);
}

TEST_CASE("binding-aware free names") {
    auto v = parse_field("(W(zp)+K(zm))/(F(zp)+G(zm))");
    Binding b;
    b.slots["zp"] = {{}, parse_field("rt + x2")};
    b.slots["zm"] = {{}, parse_field("rt - x2")};
    auto [params, slots] = free_names(v, b);
    CHECK(params.empty());
    CHECK(slots == std::set<std::string>{"W", "K", "F", "G"});

    auto [p0, s0] = free_names(v);
    CHECK(p0 == std::set<std::string>{"zp", "zm"});
    CHECK(s0 == std::set<std::string>{"W", "K", "F", "G"});
}

TEST_CASE("slot application substitutes hygienically") {
    Binding b;
    b.params["c1"] = rat(1, 2);
    b.slots["F"] = {{"u"}, parse_field("u^2 + c1")};
    b.slots["zp"] = {{}, parse_field("x1 + x2")};

    CHECK(val_d("F(x3)", b, {0, 0, 3}) == doctest::Approx(9.5));
    CHECK(val_d("F(zp)", b, {1, 2, 0}) == doctest::Approx(9.5));
    // The formal name 'u' leaks nowhere: an outer u is a parameter, and an
    // unbound one errors.
    CHECK_THROWS_AS(val_d("u + F(x1)", b, {1, 0, 0}), EvalError);

    Binding nested;
    nested.slots["F"] = {{"u"}, parse_field("G(u) + u")};
    nested.slots["G"] = {{"v"}, parse_field("v^2")};
    CHECK(val_d("F(x1)", nested, {3, 0, 0}) == doctest::Approx(12.0));

    Binding cyc;
    cyc.slots["F"] = {{"u"}, parse_field("F(u)")};
    CHECK_THROWS_AS(val_d("F(x1)", cyc, {1, 0, 0}), EvalError);
}

TEST_CASE("built-in identities at sample points") {
    const std::array<double, 3> pts[] = {
        {0.75, -0.5, 1.25}, {-1.5, 0.25, -0.75}, {2.0, 1.0, 0.5}, {-0.5, -1.0, 2.0}};
    for (const auto& p : pts) {
        auto r2 = eval_field<double>(parse_field("r^2 - rt^2 - x3^2"), no_binding, p, 2);
        for (const auto& c : r2.c) CHECK(std::abs(c) < 1e-12);
        auto tp = eval_field<double>(parse_field("tan(phi) - x2/x1"), no_binding, p, 2);
        for (const auto& c : tp.c) CHECK(std::abs(c) < 1e-12);
        auto tt = eval_field<double>(parse_field("tan(theta) - rt/x3"), no_binding, p, 2);
        for (const auto& c : tt.c) CHECK(std::abs(c) < 1e-12);
    }
}

TEST_CASE("phi branch matches atan2 with smooth derivatives") {
    auto j = eval_field<double>(parse_field("phi"), no_binding, {-1.0, 1.0, 0.0}, 1);
    CHECK(j.value() == doctest::Approx(3 * M_PI / 4).epsilon(1e-15));
    CHECK(extract_partial(j, {1, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK(extract_partial(j, {0, 1, 0}) == doctest::Approx(-0.5).epsilon(1e-13));

    auto a = eval_field<double>(parse_field("phi"), no_binding, {1.0, 1.0, 0.0}, 1);
    CHECK(extract_partial(a, {1, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK(extract_partial(a, {0, 1, 0}) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("rational mode agrees with float mode on rational expressions") {
    Binding b;
    b.params["c1"] = rat(2, 3);
    auto e = parse_field("(c1*x1^2 - x2^-2 + 7/5)/(x3 + 2) + x1*x2*x3");
    const std::array<Rat, 3> qp{rat(1, 2), rat(-3, 4), rat(5, 8)};
    const std::array<double, 3> dp{0.5, -0.75, 0.625};
    auto jq = eval_field<Rat>(e, b, qp, 3);
    auto jd = eval_field<double>(e, b, dp, 3);
    for (size_t k = 0; k < jq.c.size(); ++k) {
        const double exact = rat_d(jq.c[k]);
        CHECK(std::abs(jd.c[k] - exact) <= 1e-12 * (1.0 + std::abs(exact)));
    }
}

TEST_CASE("rational mode rejects transcendentals") {
    const std::array<Rat, 3> qp{Rat(1), Rat(2), Rat(3)};
    for (const auto* src : {"sqrt(x1)", "exp(x1)", "r", "rt", "phi", "theta", "sin(x2)"})
        CHECK_THROWS_AS(eval_field<Rat>(parse_field(src), no_binding, qp, 1), EvalError);
    CHECK_THROWS_AS(eval_field<Rat>(parse_field("1/(x1 - 1)"), no_binding, qp, 1),
                    EvalError);
    CHECK_THROWS_AS(eval_field<double>(parse_field("cw"), no_binding, {1, 1, 1}, 0),
                    EvalError);
}

TEST_CASE("symbolic derivative matches jet coefficients") {
    const char* exprs[] = {
        "x1^2*x2 - x3^5 + 7",
        "(x1 + 2*x2)/(x3^2 + 1)",
        "r^2 - rt^2",
        "sqrt(x1^2 + x2^4)",
        "exp(x3)*sin(x1) + ln(x2^2 + 1)",
        "atan(x2/x1) - phi",
        "tan(x1/4) + cos(rt)",
        "theta",
        "x1^-3 + (x2 - x3)^-1",
    };
    const std::array<double, 3> pts[] = {
        {0.7, -0.4, 0.9}, {1.3, 0.6, -0.8}, {-0.9, 1.1, 0.5}};
    Binding b;
    for (const auto* src : exprs) {
        auto e = parse_field(src);
        for (int axis = 1; axis <= 3; ++axis) {
            auto de = field_derivative(e, axis);
            // re-parse of the printed derivative must evaluate identically
            auto rp = parse_field(print_field(de));
            for (const auto& p : pts) {
                auto base = eval_field<double>(e, b, p, 1);
                MIdx unit{axis == 1, axis == 2, axis == 3};
                const double from_jet = base.c[base.table().index_of(unit)];
                const double sym = eval_field<double>(de, b, p, 0).value();
                CHECK(sym == doctest::Approx(from_jet).epsilon(1e-11));
                CHECK(eval_field<double>(rp, b, p, 0).value() ==
                      doctest::Approx(sym).epsilon(1e-13));
            }
        }
    }

    // parameters differentiate to zero
    Binding bc;
    bc.params["c1"] = rat(3, 2);
    auto e = parse_field("c1*x1^2");
    auto d2 = field_derivative(e, 2);
    CHECK(eval_field<double>(d2, bc, {0.3, 0.4, 0.5}, 0).value() == 0.0);

    // unresolved slots refuse to differentiate
    CHECK_THROWS_AS(field_derivative(parse_field("F(x1)"), 1), EvalError);
}

TEST_CASE("slot substitution produces slot-free trees") {
    Binding b;
    b.slots["F"] = Slot{{"u"}, parse_field("2 + u^2/2")};
    b.slots["G"] = Slot{{}, parse_field("F(x3) - c1")};
    b.params["c1"] = rat(1, 4);

    auto e = parse_field("F(x1 + x2) - G/x3");
    auto s = substitute_slots(e, b);
    auto [params, slots] = free_names(s);
    CHECK(slots.empty());
    CHECK(params == std::set<std::string>{"c1"});

    // substituted tree evaluates exactly like the original
    for (auto p : {std::array<double, 3>{0.4, -1.2, 0.7},
                   std::array<double, 3>{1.1, 0.2, -0.6}}) {
        CHECK(eval_field<double>(s, b, p, 2).value() ==
              doctest::Approx(eval_field<double>(e, b, p, 2).value())
                  .epsilon(1e-14));
    }

    // and the substituted form differentiates
    auto ds = field_derivative(s, 1);
    auto base = eval_field<double>(s, b, {0.4, -1.2, 0.7}, 1);
    CHECK(eval_field<double>(ds, b, {0.4, -1.2, 0.7}, 0).value() ==
          doctest::Approx(base.c[base.table().index_of(MIdx{1, 0, 0})])
              .epsilon(1e-12));

    CHECK_THROWS_AS(substitute_slots(parse_field("K(x1)"), b), EvalError);
}
