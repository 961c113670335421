#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "doctest.h"
#include "mrgp/serialize.hpp"
#include "mrgp/symreg.hpp"

using namespace mrgp;
using symreg::Dataset;
using symreg::Problem;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("relative squared error") {
  SUBCASE("perfect predictions score zero") {
    const double y[] = {1.0, 2.0, 3.0};
    CHECK(symreg::rse(y, y) == 0.0);
  }

  SUBCASE("predicting the mean scores one") {
    const double y[] = {1.0, 2.0, 3.0};
    const double yhat[] = {2.0, 2.0, 2.0};
    CHECK(symreg::rse(y, yhat) == 1.0);
  }

  SUBCASE("hand-computed case") {
    // num = (3-4)^2 = 1, den = 1 + 0 + 1 = 2
    const double y[] = {1.0, 2.0, 3.0};
    const double yhat[] = {1.0, 2.0, 4.0};
    CHECK(symreg::rse(y, yhat) == 0.5);
  }

  SUBCASE("constant targets") {
    const double y[] = {5.0, 5.0};
    const double exact[] = {5.0, 5.0};
    const double off[] = {5.0, 6.0};
    CHECK(symreg::rse(y, exact) == 0.0);
    CHECK(symreg::rse(y, off) == std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("synthetic problems match their generating formulas") {
  Rng rng(401);

  SUBCASE("nguyen4") {
    const Problem p = symreg::generate_synthetic("nguyen4", rng);
    CHECK(p.train.rows() == 20);
    CHECK(p.test.rows() == 1000);
    CHECK(p.train.num_features == 1);
    for (const Dataset* d : {&p.train, &p.test})
      for (std::size_t i = 0; i < d->rows(); ++i) {
        const double x = d->row(i)[0];
        CHECK(x >= -1.0);
        CHECK(x <= 1.0);
        const double fx = x * x * x * x * x * x + x * x * x * x * x + x * x * x * x +
                          x * x * x + x * x + x;
        CHECK(d->y[i] == doctest::Approx(fx).epsilon(1e-12));
      }
    // x^6 + ... + x at x = 1 is 6
    CHECK(p.prims.find_function("sin") != nullptr);
    CHECK(p.prims.num_features() == 1);
  }

  SUBCASE("keijzer11") {
    const Problem p = symreg::generate_synthetic("keijzer11", rng);
    CHECK(p.train.rows() == 100);
    CHECK(p.test.rows() == 900);
    CHECK(p.train.num_features == 2);
    for (std::size_t i = 0; i < p.train.rows(); ++i) {
      const double x = p.train.row(i)[0], y = p.train.row(i)[1];
      CHECK(p.train.y[i] == doctest::Approx(x * y + std::sin((x - 1.0) * (y - 1.0))).epsilon(1e-12));
    }
  }

  SUBCASE("r1") {
    const Problem p = symreg::generate_synthetic("r1", rng);
    CHECK(p.train.rows() == 20);
    CHECK(p.test.rows() == 1000);
    for (std::size_t i = 0; i < p.train.rows(); ++i) {
      const double x = p.train.row(i)[0];
      CHECK(x >= -2.0);
      CHECK(x <= 2.0);
      const double fx = std::pow(x + 1.0, 3) / (x * x - x + 1.0);
      CHECK(p.train.y[i] == doctest::Approx(fx).epsilon(1e-12));
    }
  }

  SUBCASE("unknown names are rejected") {
    CHECK_THROWS_AS(symreg::generate_synthetic("nguyen99", rng), std::invalid_argument);
  }

  SUBCASE("different seeds sample different points") {
    Rng r1(1), r2(2);
    const Problem a = symreg::generate_synthetic("nguyen4", r1);
    const Problem b = symreg::generate_synthetic("nguyen4", r2);
    CHECK(a.train.x != b.train.x);
    Rng r3(1);
    const Problem c = symreg::generate_synthetic("nguyen4", r3);
    CHECK(a.train.x == c.train.x);
  }
}

TEST_CASE("csv problems") {
  SUBCASE("split size uses round-half-even on 506 rows") {
    std::string csv = "a,b,target\n";
    for (int i = 0; i < 506; ++i)
      csv += std::to_string(i) + "," + std::to_string(i % 7) + "," + std::to_string(3 * i) + "\n";
    const auto path = write_temp("mrgp_test_506.csv", csv);
    Rng rng(11);
    const Problem p = symreg::load_csv(path, rng);
    CHECK(p.train.rows() == 380);  // nearbyint(0.75 * 506) = 380 (379.5 rounds to even)
    CHECK(p.test.rows() == 126);
    CHECK(p.train.num_features == 2);

    // every (a, b, y) row of the original file appears exactly once
    std::multiset<double> seen;
    for (const Dataset* d : {&p.train, &p.test})
      for (std::size_t i = 0; i < d->rows(); ++i) {
        CHECK(d->y[i] == 3.0 * d->row(i)[0]);
        seen.insert(d->row(i)[0]);
      }
    CHECK(seen.size() == 506);
    std::filesystem::remove(path);
  }

  SUBCASE("explicit target column by header name") {
    const auto path = write_temp("mrgp_test_target.csv", "y,x\n10,1\n20,2\n30,3\n40,4\n");
    Rng rng(12);
    const Problem p = symreg::load_csv(path, rng, "y", 0.5);
    CHECK(p.train.rows() == 2);
    CHECK(p.test.rows() == 2);
    for (std::size_t i = 0; i < p.train.rows(); ++i)
      CHECK(p.train.y[i] == 10.0 * p.train.row(i)[0]);
    std::filesystem::remove(path);
  }

  SUBCASE("headerless files are detected") {
    const auto path = write_temp("mrgp_test_nohdr.csv", "1,2\n3,6\n5,10\n7,14\n");
    Rng rng(13);
    const Problem p = symreg::load_csv(path, rng, "", 0.5);
    CHECK(p.train.rows() + p.test.rows() == 4);
    for (std::size_t i = 0; i < p.train.rows(); ++i)
      CHECK(p.train.y[i] == 2.0 * p.train.row(i)[0]);
    std::filesystem::remove(path);
  }

  SUBCASE("malformed rows are reported with their line number") {
    const auto path = write_temp("mrgp_test_bad.csv", "a,b\n1,2\n3,oops\n");
    Rng rng(14);
    try {
      symreg::load_csv(path, rng);
      FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
      const std::string msg = e.what();
      CHECK(msg.find(":3:") != std::string::npos);
    }
    std::filesystem::remove(path);
  }

  SUBCASE("unknown target names are rejected") {
    const auto path = write_temp("mrgp_test_tgt2.csv", "a,b\n1,2\n3,4\n");
    Rng rng(15);
    CHECK_THROWS_AS(symreg::load_csv(path, rng, "c"), std::runtime_error);
    std::filesystem::remove(path);
  }

  SUBCASE("missing files are rejected") {
    Rng rng(16);
    CHECK_THROWS_AS(symreg::load_csv("/nonexistent/f.csv", rng), std::runtime_error);
  }
}

TEST_CASE("backend scoring") {
  Rng rng(421);
  Problem p = symreg::generate_synthetic("nguyen4", rng);
  symreg::Backend backend(std::move(p));

  SUBCASE("the ground-truth tree scores exactly zero on train and test") {
    // x^6+x^5+x^4+x^3+x^2+x, grouped exactly as the generator computes it
    const TreeIndividual exact = parse_tree(
        "(* (+ (* (+ (* (+ (* (+ (* (+ x1 1) x1) 1) x1) 1) x1) 1) x1) 1) x1)",
        backend.primitives());
    const Individual ind = exact;
    CHECK(backend.evaluate(ind) == 0.0);
    CHECK(backend.test(ind) == 0.0);
  }

  SUBCASE("an equivalent linear program scores the same as the tree") {
    const TreeIndividual tree = parse_tree("(+ (* x1 x1) x1)", backend.primitives());
    const LinearIndividual prog = parse_linear(
        "R[1] = *(x1, x1)\n"
        "R[7] = /(x1, x1)\n"  // intron: R[7] is never read
        "R[0] = +(R[1], x1)\n",
        backend.primitives(), 8);
    const Individual a = tree;
    const Individual b = prog;
    CHECK(backend.evaluate(a) == backend.evaluate(b));
    CHECK(backend.test(a) == backend.test(b));
  }

  SUBCASE("evaluation is pure") {
    const TreeIndividual t = parse_tree("(sin x1)", backend.primitives());
    const Individual ind = t;
    const double first = backend.evaluate(ind);
    for (int i = 0; i < 5; ++i) CHECK(backend.evaluate(ind) == first);
  }
}
