#include <cmath>

#include "doctest.h"
#include "pdmsym/op.hpp"
#include "pdmsym/transform.hpp"

using namespace pdm;

namespace {

std::shared_ptr<const Binding> bind(std::map<std::string, Rat> params = {}) {
    auto b = std::make_shared<Binding>();
    b->params = std::move(params);
    return b;
}

const std::vector<P3q>& qpts() {
    static const std::vector<P3q> pts = {
        {rat(5, 8), rat(-3, 4), rat(7, 8)},
        {rat(-2, 3), rat(1, 2), rat(-3, 5)},
        {rat(1), rat(2), rat(3)},
        {rat(-3, 2), rat(5, 4), rat(-7, 6)},
    };
    return pts;
}

const std::vector<P3d>& dpts() {
    static const std::vector<P3d> pts = {
        {0.75, -0.5, 0.375},   {-0.625, 0.875, 0.5},    {0.5, 1.25, -0.75},
        {1.5, -0.875, 0.625},  {-1.25, -1.125, 0.875},  {0.375, 0.75, 1.375},
        {1.125, 0.5, -0.5},    {-0.875, -0.625, -1.125},
    };
    return pts;
}

bool exactly_equal(const DiffOperator& a, const DiffOperator& b) {
    return op_exact_zero(op_sub(a, b), qpts());
}

CRat coeff_at_q(const DiffOperator& op, const MIdx& m, const P3q& p) {
    const CJet<Rat> v = op.coeff(m).eval(p, 0);
    return CRat(v.re.value(), v.im.value());
}

DiffOperator gen(Generator g) { return op_from_generator(g); }

}  // namespace

TEST_CASE("generator coefficients") {
    const P3q p{rat(1), rat(2), rat(0)};

    auto l3 = gen(Generator::L3);
    CHECK(coeff_at_q(l3, {0, 1, 0}, p) == CRat(Rat(0), Rat(-1)));
    CHECK(coeff_at_q(l3, {1, 0, 0}, p) == CRat(Rat(0), Rat(2)));
    CHECK(coeff_at_q(l3, {0, 0, 1}, p).is_zero());
    CHECK(coeff_at_q(l3, {0, 0, 0}, p).is_zero());

    auto d = gen(Generator::D);
    CHECK(coeff_at_q(d, {0, 0, 0}, p) == CRat(Rat(0), rat(-3, 2)));
    CHECK(coeff_at_q(d, {1, 0, 0}, p) == CRat(Rat(0), Rat(-1)));
    CHECK(coeff_at_q(d, {0, 1, 0}, p) == CRat(Rat(0), Rat(-2)));

    auto p3 = gen(Generator::P3);
    CHECK(coeff_at_q(p3, {0, 0, 1}, p) == CRat(Rat(0), Rat(-1)));
    CHECK(p3.order() == 1);

    const P3q k{rat(1), rat(2), rat(3)};
    auto k3 = gen(Generator::K3);
    CHECK(coeff_at_q(k3, {0, 0, 1}, k) == CRat(Rat(0), Rat(4)));
    CHECK(coeff_at_q(k3, {1, 0, 0}, k) == CRat(Rat(0), Rat(6)));
    CHECK(coeff_at_q(k3, {0, 1, 0}, k) == CRat(Rat(0), Rat(12)));
    CHECK(coeff_at_q(k3, {0, 0, 0}, k) == CRat(Rat(0), Rat(9)));
}

TEST_CASE("conformal commutation relations are exact in rational mode") {
    const auto p3 = gen(Generator::P3);
    const auto zero = DiffOperator();

    CHECK(exactly_equal(commutator(p3, gen(Generator::P1)), zero));
    CHECK(exactly_equal(commutator(p3, gen(Generator::P2)), zero));
    CHECK(exactly_equal(commutator(p3, gen(Generator::D)),
                        op_scale(p3, CRat::i(-1))));
    CHECK(exactly_equal(commutator(p3, gen(Generator::L1)),
                        op_scale(gen(Generator::P2), CRat::i(1))));
    CHECK(exactly_equal(commutator(p3, gen(Generator::L2)),
                        op_scale(gen(Generator::P1), CRat::i(-1))));
    CHECK(exactly_equal(commutator(p3, gen(Generator::L3)), zero));
    CHECK(exactly_equal(commutator(p3, gen(Generator::K3)),
                        op_scale(gen(Generator::D), CRat::i(2))));
    CHECK(exactly_equal(commutator(p3, gen(Generator::K1)),
                        op_scale(gen(Generator::L2), CRat::i(-2))));
    CHECK(exactly_equal(commutator(p3, gen(Generator::K2)),
                        op_scale(gen(Generator::L1), CRat::i(2))));
}

TEST_CASE("kinetic and zeroth-order terms of the hamiltonian") {
    auto b = bind();

    SUBCASE("unit mass gives the free laplacian") {
        auto h = hamiltonian(parse_field("1"), parse_field("0"), b);
        for (const auto& p : qpts()) {
            CHECK(coeff_at_q(h, {2, 0, 0}, p) == CRat(Rat(-1), Rat(0)));
            CHECK(coeff_at_q(h, {0, 2, 0}, p) == CRat(Rat(-1), Rat(0)));
            CHECK(coeff_at_q(h, {0, 0, 2}, p) == CRat(Rat(-1), Rat(0)));
            CHECK(coeff_at_q(h, {1, 0, 0}, p).is_zero());
            CHECK(coeff_at_q(h, {0, 0, 0}, p).is_zero());
            CHECK(coeff_at_q(h, {1, 1, 0}, p).is_zero());
        }
    }

    SUBCASE("radial quadratic mass has constant zeroth term") {
        auto h = hamiltonian(parse_field("x1^2+x2^2+x3^2"), parse_field("0"), b);
        for (const auto& p : qpts()) {
            CHECK(coeff_at_q(h, {0, 0, 0}, p) == CRat(Rat(-2), Rat(0)));
            CHECK(coeff_at_q(h, {1, 0, 0}, p) == CRat(Rat(-2) * p[0], Rat(0)));
            CHECK(coeff_at_q(h, {0, 0, 2}, p) ==
                  CRat(-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]), Rat(0)));
        }
    }

    SUBCASE("derived-symbol masses are float-only") {
        auto h = hamiltonian(parse_field("r^2"), parse_field("0"), b);
        CHECK_THROWS_AS(h.coeff(MIdx{0, 0, 0}).eval(qpts()[0], 0), EvalError);
        auto v = h.coeff(MIdx{0, 0, 0}).eval(P3d{0.5, 0.25, 0.75}, 0);
        CHECK(v.re.value() == doctest::Approx(-2.0).epsilon(1e-12));
    }
}

TEST_CASE("direct zeroth-order form matches after the mass correction term") {
    auto b = bind({{"c1", rat(5, 3)}});
    auto h1 = hamiltonian(parse_field("x1^4"), parse_field("c1*x2"), b);
    // (grad f)^2/(4f) - (lap f)/2 = -2 x1^2 for f = x1^4
    auto h2 = hamiltonian_alt(parse_field("x1^4"), parse_field("c1*x2 - 2*x1^2"), b);
    CHECK(exactly_equal(h1, h2));

    auto alt = hamiltonian_alt(parse_field("x1^2"), parse_field("0"), b);
    for (const auto& p : qpts())
        CHECK(coeff_at_q(alt, {1, 0, 0}, p) == CRat(Rat(-2) * p[0], Rat(0)));
}

TEST_CASE("products follow the generalized Leibniz rule") {
    auto b = bind();

    SUBCASE("derivative past a multiplication operator") {
        DiffOperator d1;
        d1.set_coeff(MIdx{1, 0, 0}, Coeff::constant(CRat(Rat(1), Rat(0))));
        auto x1 = op_mult(Coeff::from_field(parse_field("x1"), b));
        auto prod = op_mul(d1, x1);
        for (const auto& p : qpts()) {
            CHECK(coeff_at_q(prod, {1, 0, 0}, p) == CRat(p[0], Rat(0)));
            CHECK(coeff_at_q(prod, {0, 0, 0}, p) == CRat(Rat(1), Rat(0)));
        }
        CHECK(exactly_equal(commutator(d1, x1), op_identity()));
    }

    SUBCASE("associativity is coefficient-exact") {
        auto a = gen(Generator::P1), l = gen(Generator::L3), d = gen(Generator::D);
        CHECK(exactly_equal(op_mul(op_mul(a, l), d), op_mul(a, op_mul(l, d))));
        auto k = gen(Generator::K2);
        CHECK(exactly_equal(op_mul(op_mul(k, a), l), op_mul(k, op_mul(a, l))));
    }

    SUBCASE("order overflow is rejected") {
        auto h = hamiltonian(parse_field("1"), parse_field("0"), b);
        auto h2 = op_mul(h, h);
        CHECK(h2.order() == 4);
        CHECK_THROWS_AS(op_mul(h2, h), std::invalid_argument);
        CHECK_THROWS_AS(commutator(h2, h), std::invalid_argument);
    }
}

TEST_CASE("commutators of symmetric operators vanish exactly") {
    auto b = bind();

    auto h = hamiltonian(parse_field("x1^2+x2^2+x3^2"), parse_field("0"), b);
    auto comm = commutator(h, gen(Generator::L3));
    CHECK(comm.order() <= 3);
    CHECK(op_exact_zero(comm, qpts()));

    auto hs = hamiltonian(parse_field("x1^2"), parse_field("x1^2"), b);
    CHECK(op_exact_zero(commutator(hs, gen(Generator::P3)), qpts()));
    CHECK(op_exact_zero(commutator(hs, gen(Generator::P2)), qpts()));
}

TEST_CASE("sqrt-sandwich expansion") {
    auto b = bind({{"c1", rat(2, 7)}});
    auto lap = hamiltonian(parse_field("1"), parse_field("0"), b);

    SUBCASE("unit weight is the identity conjugation") {
        auto h = hamiltonian(parse_field("x1^2"), parse_field("c1*x2"), b);
        CHECK(exactly_equal(conjugate_sqrt(parse_field("1"), h, b), h));
    }

    SUBCASE("conjugating the identity multiplies by the weight") {
        auto r = conjugate_sqrt(parse_field("x1*x2"), op_identity(), b);
        CHECK(r.order() == 0);
        for (const auto& p : qpts())
            CHECK(coeff_at_q(r, {0, 0, 0}, p) == CRat(p[0] * p[1], Rat(0)));
    }

    SUBCASE("quadratic weight against the free laplacian") {
        auto r = conjugate_sqrt(parse_field("x3^2"), lap, b);
        for (const auto& p : qpts()) {
            const Rat x3 = p[2];
            CHECK(coeff_at_q(r, {2, 0, 0}, p) == CRat(-x3 * x3, Rat(0)));
            CHECK(coeff_at_q(r, {0, 0, 2}, p) == CRat(-x3 * x3, Rat(0)));
            CHECK(coeff_at_q(r, {0, 0, 1}, p) == CRat(Rat(-2) * x3, Rat(0)));
            CHECK(coeff_at_q(r, {1, 0, 0}, p).is_zero());
            CHECK(coeff_at_q(r, {0, 0, 0}, p).is_zero());
        }
    }

    SUBCASE("linear in the weight") {
        auto n = parse_field("x2^4-x1^2");
        auto scaled = parse_field("(x2^4-x1^2)*7/3");
        CHECK(exactly_equal(conjugate_sqrt(scaled, lap, b),
                            op_scale(conjugate_sqrt(n, lap, b),
                                     CRat(rat(7, 3), Rat(0)))));
    }

    SUBCASE("negative weights stay well-defined") {
        auto r = conjugate_sqrt(parse_field("-1-x1^2"), lap, b);
        const P3q p{rat(1, 2), rat(3, 8), rat(5, 8)};
        CHECK(coeff_at_q(r, {0, 0, 0}, p) == CRat(rat(4, 5), Rat(0)));
        CHECK(coeff_at_q(r, {2, 0, 0}, p) == CRat(rat(5, 4), Rat(0)));
    }

    SUBCASE("needs order at most two") {
        auto cubic = op_mul(gen(Generator::P1), op_mul(gen(Generator::P2),
                                                       gen(Generator::P3)));
        CHECK_THROWS_AS(conjugate_sqrt(parse_field("x1"), cubic, b),
                        std::invalid_argument);
    }
}

TEST_CASE("formal adjoint") {
    auto b = bind();

    CHECK(exactly_equal(adjoint(gen(Generator::D)), gen(Generator::D)));
    CHECK(exactly_equal(adjoint(gen(Generator::L2)), gen(Generator::L2)));

    auto h = hamiltonian(parse_field("x1^2*x2^2"), parse_field("x1"), b);
    CHECK(exactly_equal(adjoint(h), h));

    auto a = op_mul(gen(Generator::L3), gen(Generator::P2));
    CHECK(exactly_equal(adjoint(adjoint(a)), a));

    auto ip1 = op_scale(gen(Generator::P1), CRat::i());
    CHECK(adjoint_defect(ip1, dpts()) > 0.1);
    CHECK(adjoint_defect(gen(Generator::K1), dpts()) < 1e-13);
}

TEST_CASE("operator grammar") {
    auto b = bind({{"c1", Rat(1)}, {"c2", Rat(2)}});
    OpEnv env;
    env.binding = b;
    env.hamiltonian = hamiltonian(parse_field("x3^2"), parse_field("0"), b);

    SUBCASE("squares, fields and the sandwich product") {
        auto q = parse_operator("P3^2 + field(c2/x3^2) - dot(c1/x3^2, H)", env);
        auto manual = op_sub(
            op_add(op_mul(gen(Generator::P3), gen(Generator::P3)),
                   op_mult(Coeff::from_field(parse_field("c2/x3^2"), b))),
            conjugate_sqrt(parse_field("c1/x3^2"), *env.hamiltonian, b));
        CHECK(exactly_equal(q, manual));
    }

    SUBCASE("anticommutator braces") {
        auto q = parse_operator("anti{P3,D}", env);
        CHECK(exactly_equal(q, anticommutator(gen(Generator::P3),
                                              gen(Generator::D))));
        for (const auto& p : qpts()) {
            CHECK(coeff_at_q(q, {0, 0, 2}, p) == CRat(Rat(-2) * p[2], Rat(0)));
            CHECK(coeff_at_q(q, {0, 0, 1}, p) == CRat(Rat(-4), Rat(0)));
        }
    }

    SUBCASE("scalars and precedence") {
        CHECK(exactly_equal(parse_operator("3/2*P1^2", env),
                            op_scale(op_mul(gen(Generator::P1), gen(Generator::P1)),
                                     CRat(rat(3, 2), Rat(0)))));
        CHECK(exactly_equal(parse_operator("-P3^2", env),
                            op_neg(op_mul(gen(Generator::P3), gen(Generator::P3)))));
        CHECK(exactly_equal(parse_operator("c2*L3", env),
                            op_scale(gen(Generator::L3), CRat(Rat(2), Rat(0)))));
    }

    SUBCASE("named operators resolve") {
        env.named.emplace("Q1", op_mul(gen(Generator::P1), gen(Generator::P1)));
        env.named.emplace("Q2", op_mul(gen(Generator::P2), gen(Generator::P2)));
        auto s = parse_operator("Q1 + Q2", env);
        CHECK(exactly_equal(s, op_add(env.named.at("Q1"), env.named.at("Q2"))));
    }

    SUBCASE("realness gate rejects skew operators") {
        CHECK_THROWS_AS(parse_operator("i*P1", env), EvalError);
        CHECK_NOTHROW(parse_operator("dot(x1, P1)", env));
    }

    SUBCASE("syntax errors carry offsets") {
        CHECK_THROWS_AS(parse_operator("x1 + P1", env), ParseError);
        CHECK_THROWS_AS(parse_operator("P3 +", env), ParseError);
        CHECK_THROWS_AS(parse_operator("anti{P3 D}", env), ParseError);
        CHECK_THROWS_AS(parse_operator("", env), ParseError);
        CHECK_THROWS_WITH(parse_operator("P0 + P1", env),
                          doctest::Contains("unknown name 'P0'"));
    }
}

TEST_CASE("shift-invariant system commutes and perturbations do not") {
    auto b = bind();
    // mass and potential of the first shift-invariant family with
    // F = x1^2, G = x2^4, F~ = x1, G~ = x2.  The commuting partner pairs
    // N = G - F with H symmetrically and carries the reordering potential
    // mu^{ab} f_a f_b / (4 f^2) that the symmetrization produces.
    auto f = parse_field("1/(x1^2+x2^4)");
    auto v = parse_field("(x1+x2)/(x1^2+x2^4)");
    OpEnv env;
    env.binding = b;
    env.hamiltonian = hamiltonian(f, v, b);

    const std::string qsrc =
        "P1^2 - P2^2 + field(x1 - x2) + 1/2 * anti{field(x2^4 - x1^2), H} "
        "+ field((4*x2^6 - x1^2)/((x1^2 + x2^4)*(x1^2 + x2^4)))";
    auto q = parse_operator(qsrc, env);
    CHECK(q.rational_capable());
    auto comm = commutator(*env.hamiltonian, q);
    CHECK(residual_norm(comm, dpts(), *env.hamiltonian, q) < 1e-12);
    CHECK(op_exact_zero(comm, qpts()));

    // dropping the reordering potential leaves a visible defect
    const std::string qsrc_bare =
        "P1^2 - P2^2 + field(x1 - x2) + 1/2 * anti{field(x2^4 - x1^2), H}";
    auto qb = parse_operator(qsrc_bare, env);
    auto commb = commutator(*env.hamiltonian, qb);
    CHECK(residual_norm(commb, dpts(), *env.hamiltonian, qb) > 1e-4);

    OpEnv env2;
    env2.binding = b;
    env2.hamiltonian =
        hamiltonian(f, parse_field("(x1+x2)/(x1^2+x2^4) + x1"), b);
    auto q2 = parse_operator(qsrc, env2);
    auto comm2 = commutator(*env2.hamiltonian, q2);
    CHECK(residual_norm(comm2, dpts(), *env2.hamiltonian, q2) > 1e-3);
}

TEST_CASE("point transforms") {
    auto b = bind();

    SUBCASE("exact quarter turn") {
        auto t = PointTransform::rotation(3, Rat(90));
        CHECK(t.rational_capable());
        CHECK(exactly_equal(pullback(gen(Generator::P1), t),
                            op_neg(gen(Generator::P2))));
        CHECK(exactly_equal(pullback(gen(Generator::P2), t), gen(Generator::P1)));
        CHECK(exactly_equal(pullback(gen(Generator::L3), t), gen(Generator::L3)));
        const P3q y = t.apply(P3q{rat(1), rat(2), rat(3)});
        CHECK(y[0] == Rat(-2));
        CHECK(y[1] == Rat(1));
        CHECK(y[2] == Rat(3));
    }

    SUBCASE("generic rotations compose to the identity") {
        auto t = PointTransform::rotation(1, Rat(37));
        CHECK(!t.rational_capable());
        auto l3 = gen(Generator::L3);
        auto back = pullback(pullback(l3, t), t.inverse());
        const double n = op_norm(op_sub(back, l3), dpts());
        CHECK(n / (1.0 + op_norm(l3, dpts())) < 1e-10);
    }

    SUBCASE("shifts and dilatations act on the affine generators") {
        auto s = PointTransform::shift({Rat(1), Rat(-2), rat(1, 2)});
        CHECK(exactly_equal(pullback(gen(Generator::P1), s), gen(Generator::P1)));
        auto dil = PointTransform::dilatation(Rat(3));
        CHECK(exactly_equal(pullback(gen(Generator::P1), dil),
                            op_scale(gen(Generator::P1), CRat(rat(1, 3), Rat(0)))));
        CHECK(exactly_equal(pullback(gen(Generator::D), dil), gen(Generator::D)));
    }

    SUBCASE("weighted inversion is the conformal flip") {
        auto inv = PointTransform::inversion();
        CHECK(exactly_equal(pullback(gen(Generator::D), inv),
                            op_neg(gen(Generator::D))));
        CHECK(exactly_equal(pullback(gen(Generator::P3), inv), gen(Generator::K3)));
        CHECK(exactly_equal(pullback(gen(Generator::K1), inv), gen(Generator::P1)));
        CHECK(exactly_equal(pullback(gen(Generator::L3), inv), gen(Generator::L3)));

        auto h = hamiltonian(parse_field("x1^2"), parse_field("x2"), b);
        CHECK(exactly_equal(pullback(pullback(h, inv), inv), h));
    }

    SUBCASE("unweighted inversion transports only the derivatives") {
        auto inv = PointTransform::inversion(false);
        auto d = pullback(gen(Generator::D), inv);
        for (const auto& p : qpts()) {
            CHECK(coeff_at_q(d, {1, 0, 0}, p) == CRat(Rat(0), p[0]));
            CHECK(coeff_at_q(d, {0, 0, 0}, p) == CRat(Rat(0), rat(-3, 2)));
        }
        CHECK(exactly_equal(pullback(d, inv), gen(Generator::D)));
    }

    SUBCASE("scale-covariant mass is inversion invariant") {
        auto h = hamiltonian(parse_field("x3^2"), parse_field("0"), b);
        auto inv = PointTransform::inversion();
        CHECK(exactly_equal(pullback(h, inv), h));
    }
}
