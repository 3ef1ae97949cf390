#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "ptinv/errors.hpp"
#include "ptinv/exprparse.hpp"

using ptinv::DomainError;
using ptinv::ParseError;
using ptinv::expr::Expr;
using ptinv::expr::Jet2;

namespace {

std::size_t parse_error_offset(const std::string& src) {
    try {
        Expr::parse(src);
    } catch (const ParseError& e) {
        return e.offset();
    }
    ADD_FAILURE() << "no parse error for '" << src << "'";
    return std::string::npos;
}

// Random smooth expressions in t. Arguments of log/sqrt and bases of
// fractional powers are wrapped to stay positive; denominators stay away from 0.
std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> c(0.2, 2.0);
    auto num = [&] { return std::to_string(c(rng)); };
    switch (pick(rng)) {
        case 0: return "t";
        case 1: return num();
        case 2: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
        case 3: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1) + ")";
        case 5: return "(" + random_expr(rng, depth - 1) + " / (2 + sin(" + random_expr(rng, depth - 1) + ")))";
        case 6: return "sin(" + random_expr(rng, depth - 1) + ")";
        case 7: return "cos(" + random_expr(rng, depth - 1) + ")";
        case 8: return "log(1.5 + tanh(" + random_expr(rng, depth - 1) + "))";
        default: return "sqrt(1 + (" + random_expr(rng, depth - 1) + ")^2)^" + num();
    }
}

}  // namespace

TEST(ExprParse, PrecedenceExamples) {
    EXPECT_DOUBLE_EQ(Expr::parse("1+2*3").eval(0.4), 7.0);
    EXPECT_DOUBLE_EQ(Expr::parse("2^3^2").eval(0.0), 512.0);      // right associative
    EXPECT_DOUBLE_EQ(Expr::parse("-2^2").eval(0.0), -4.0);        // ^ binds tighter than unary minus
    EXPECT_DOUBLE_EQ(Expr::parse("8/4/2").eval(0.0), 1.0);        // left associative
    EXPECT_DOUBLE_EQ(Expr::parse("10 - 4 - 3").eval(0.0), 3.0);
    EXPECT_DOUBLE_EQ(Expr::parse(" 2 *\t( 1 + t ) ").eval(1.0), 4.0);
    EXPECT_NO_THROW(Expr::parse("sin(2*t)"));
    EXPECT_NEAR(Expr::parse("pi").eval(0.0), M_PI, 1e-15);
}

TEST(ExprParse, ErrorOffsets) {
    EXPECT_EQ(parse_error_offset("2*"), 2u);
    EXPECT_EQ(parse_error_offset("1 + foo(t)"), 4u);
    EXPECT_EQ(parse_error_offset("(1 + t"), 6u);
    EXPECT_EQ(parse_error_offset("1 $ 2"), 2u);
    EXPECT_EQ(parse_error_offset("x"), 0u);
    EXPECT_EQ(parse_error_offset(""), 0u);
}

TEST(ExprParse, JetExamples) {
    auto check = [](const char* src, double t, Jet2 want) {
        Jet2 j = Expr::parse(src).eval_jet2(t);
        EXPECT_NEAR(j.value, want.value, 1e-15) << src;
        EXPECT_NEAR(j.d1, want.d1, 1e-15) << src;
        EXPECT_NEAR(j.d2, want.d2, 1e-15) << src;
    };
    check("t^2", 3.0, {9.0, 6.0, 2.0});
    check("sin(t)", 0.0, {0.0, 1.0, 0.0});
    check("exp(0.5*t)", 0.0, {1.0, 0.5, 0.25});
}

TEST(ExprParse, DomainErrors) {
    EXPECT_THROW(Expr::parse("log(t - 5)").eval(0.0), DomainError);
    EXPECT_THROW(Expr::parse("sqrt(t - 5)").eval(0.0), DomainError);
    EXPECT_THROW(Expr::parse("1/(t - 1)").eval(1.0), DomainError);
    EXPECT_THROW(Expr::parse("(t - 2)^0.5").eval(1.0), DomainError);
    EXPECT_NO_THROW(Expr::parse("(t - 2)^3").eval(1.0));
    try {
        Expr::parse("1 + log(t)").eval(-1.0);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("offset 4"), std::string::npos) << e.what();
    }
}

TEST(ExprParse, FirstDerivativeMatchesFiniteDifferences) {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> tt(-2.0, 2.0);
    const double h = 1e-5;
    for (int n = 0; n < 300; ++n) {
        Expr e = Expr::parse(random_expr(rng, 4));
        const double t = tt(rng);
        const double d1 = (e.eval(t + h) - e.eval(t - h)) / (2 * h);
        const double want = e.eval_jet2(t).d1;
        EXPECT_LT(std::abs(d1 - want) / std::max(1.0, std::abs(want)), 1e-6) << e.source() << " at " << t;
    }
}

TEST(ExprParse, SecondDerivativeMatchesDifferenceOfFirst) {
    // A plain second difference at h = 1e-5 carries ~eps/h^2 = 1e-6 of rounding, so
    // d2 is checked through the central difference of the (exact) first derivative.
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> tt(-2.0, 2.0);
    const double h = 1e-5;
    for (int n = 0; n < 300; ++n) {
        Expr e = Expr::parse(random_expr(rng, 4));
        const double t = tt(rng);
        const double d2 = (e.eval_jet2(t + h).d1 - e.eval_jet2(t - h).d1) / (2 * h);
        const double want = e.eval_jet2(t).d2;
        EXPECT_LT(std::abs(d2 - want) / std::max(1.0, std::abs(want)), 1e-6) << e.source();
    }
}

TEST(ExprParse, PrintRoundTrip) {
    std::mt19937_64 rng(22);
    for (int n = 0; n < 200; ++n) {
        Expr a = Expr::parse(random_expr(rng, 4));
        std::string p1 = a.print();
        Expr b = Expr::parse(p1);
        EXPECT_EQ(b.print(), p1);
        EXPECT_EQ(b.eval(0.3), a.eval(0.3));
    }
    EXPECT_EQ(Expr::parse("-2^2").print(), Expr::parse(Expr::parse("-2^2").print()).print());
}

TEST(ExprParse, ConstantDetection) {
    EXPECT_TRUE(Expr::parse("1 + 2*sin(pi/4)").is_constant());
    EXPECT_FALSE(Expr::parse("1 + 0*t").is_constant());
    EXPECT_TRUE(Expr::constant(2.5).is_constant());
    EXPECT_DOUBLE_EQ(Expr::constant(2.5).eval(7.0), 2.5);
}
