#include <doctest.h>

#include <random>

#include "crystal/crystal.hpp"
#include "crystal/perfect.hpp"

using namespace crystal;

namespace {

auto a2() { return std::make_shared<const RootData>(AffineType{Family::A1, 2}); }

// Direct substitution into the tensor rule, kept separate from the library.
ExtInt rule_eps(ExtInt e1, ExtInt e2, int wt1) { return max(e1, e2 - wt1); }
ExtInt rule_phi(ExtInt p1, ExtInt p2, int wt2) { return max(p2, p1 + wt2); }

}  // namespace

TEST_SUITE("crystal_core") {
  TEST_CASE("ExtInt arithmetic") {
    ExtInt inf = ExtInt::neg_inf();
    CHECK((inf + 5).is_neg_inf());
    CHECK((inf - 5).is_neg_inf());
    CHECK(max(inf, ExtInt(-7)) == ExtInt(-7));
    CHECK(ExtInt(3) > inf);
    CHECK(inf.str() == "-inf");
  }

  TEST_CASE("tensor statistics on B_1") {
    auto rd = a2();
    auto b1 = std::make_shared<const PerfectCrystalA>(rd, 1);
    auto t = tensor({b1, b1});
    Elem e1{1, 0, 0}, e2{0, 1, 0};
    CHECK(t->eps(TensorCrystal::pair(e2, e2), 1) == ExtInt(2));
    CHECK(t->f(TensorCrystal::pair(e1, e1), 1) == std::optional<Elem>(TensorCrystal::pair(e2, e1)));
    CHECK_FALSE(t->e(TensorCrystal::pair(e1, e1), 1).has_value());
  }

  TEST_CASE("T factors are absorbed by the max") {
    auto rd = a2();
    auto b2 = std::make_shared<const PerfectCrystalA>(rd, 2);
    Weight lam{1, 0, 2};
    auto tl = std::make_shared<const TCrystal>(rd, lam);
    auto left = tensor({tl, b2});
    auto right = tensor({b2, std::make_shared<const TCrystal>(rd, -lam)});
    for (const auto& b : b2->elements())
      for (int i = 0; i < 3; ++i) {
        Elem x = TensorCrystal::pair(Elem{}, b);
        CHECK(left->eps(x, i) == b2->eps(b, i) - lam[i]);
        CHECK(left->phi(x, i) == b2->phi(b, i));
        auto fb = b2->f(b, i);
        auto fx = left->f(x, i);
        CHECK(fx.has_value() == fb.has_value());
        if (fb) CHECK(*fx == TensorCrystal::pair(Elem{}, *fb));
        Elem y = TensorCrystal::pair(b, Elem{});
        CHECK(right->phi(y, i) == b2->phi(b, i) - lam[i]);
      }
  }

  TEST_CASE("tensor rule against direct substitution") {
    auto rd = a2();
    auto b2 = std::make_shared<const PerfectCrystalA>(rd, 2);
    auto b1 = std::make_shared<const PerfectCrystalA>(rd, 1);
    auto t = tensor({b2, b1});
    for (const auto& x : b2->elements())
      for (const auto& y : b1->elements())
        for (int i = 0; i < 3; ++i) {
          Elem p = TensorCrystal::pair(x, y);
          CHECK(t->eps(p, i) == rule_eps(b2->eps(x, i), b1->eps(y, i), b2->wt(x)[i]));
          CHECK(t->phi(p, i) == rule_phi(b2->phi(x, i), b1->phi(y, i), b1->wt(y)[i]));
          CHECK(t->wt(p) == b2->wt(x) + b1->wt(y));
          bool e_left = b2->phi(x, i) >= b1->eps(y, i);
          auto e = t->e(p, i);
          auto expect_e = e_left ? b2->e(x, i) : b1->e(y, i);
          REQUIRE(e.has_value() == expect_e.has_value());
          if (e) CHECK(*e == (e_left ? TensorCrystal::pair(*expect_e, y) : TensorCrystal::pair(x, *expect_e)));
          bool f_left = b2->phi(x, i) > b1->eps(y, i);
          auto f = t->f(p, i);
          auto expect_f = f_left ? b2->f(x, i) : b1->f(y, i);
          REQUIRE(f.has_value() == expect_f.has_value());
          if (f) CHECK(*f == (f_left ? TensorCrystal::pair(*expect_f, y) : TensorCrystal::pair(x, *expect_f)));
        }
  }

  TEST_CASE("seminormal_check") {
    auto rd = a2();
    auto b1 = std::make_shared<const PerfectCrystalA>(rd, 1);
    CHECK(seminormal_check(*b1, Elem{0, 1, 0}, 1).ok);
    TCrystal t(rd, Weight{1, 0, 0});
    auto r = seminormal_check(t, Elem{}, 0);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == "minus-infinity string");
  }

  TEST_CASE("axioms hold on random walks in a three-fold tensor") {
    auto rd = a2();
    auto b1 = std::make_shared<const PerfectCrystalA>(rd, 1);
    auto b2 = std::make_shared<const PerfectCrystalA>(rd, 2);
    auto b3 = std::make_shared<const PerfectCrystalA>(rd, 3);
    auto t = tensor({b2, b1, b3});
    std::mt19937 rng(7);
    Elem x = TensorCrystal::pair(TensorCrystal::pair(Elem{2, 0, 0}, Elem{1, 0, 0}), Elem{0, 3, 0});
    for (int step = 0; step < 2000; ++step) {
      int i = static_cast<int>(rng() % 3);
      CHECK(axiom_violation(*t, x, i).empty());
      CHECK(seminormal_check(*t, x, i).ok);
      auto y = (rng() % 2) ? t->f(x, i) : t->e(x, i);
      if (y) x = *y;
    }
  }

  TEST_CASE("element serialization") {
    auto rd = a2();
    auto b1 = std::make_shared<const PerfectCrystalA>(rd, 1);
    auto tl = std::make_shared<const TCrystal>(rd, Weight{1, 0, 0});
    auto t = tensor({tl, b1});
    Elem x = TensorCrystal::pair(Elem{}, Elem{0, 1, 0});
    CHECK(t->to_json(x) == json::parse(R"([{"t":[1,0,0]},[0,1,0]])"));
    CHECK(t->from_json(t->to_json(x)) == x);
    CHECK_THROWS(t->from_json(json::parse(R"([{"t":[0,1,0]},[0,1,0]])")));
  }
}
