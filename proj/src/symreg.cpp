#include "mrgp/symreg.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mrgp::symreg {

double rse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size() || y.empty())
    throw std::invalid_argument("rse: size mismatch or empty targets");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    den += (y[i] - mean) * (y[i] - mean);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

namespace {

struct SyntheticSpec {
  int num_features;
  double lo, hi;
  std::size_t train_n, test_n;
  double (*f)(std::span<const double>);
};

double nguyen4_f(std::span<const double> v) {
  const double x = v[0];
  // x^6 + x^5 + x^4 + x^3 + x^2 + x
  return (((((x + 1) * x + 1) * x + 1) * x + 1) * x + 1) * x;
}

double keijzer11_f(std::span<const double> v) {
  const double x = v[0], y = v[1];
  return x * y + std::sin((x - 1.0) * (y - 1.0));
}

double r1_f(std::span<const double> v) {
  const double x = v[0];
  const double n = (x + 1.0) * (x + 1.0) * (x + 1.0);
  return n / (x * x - x + 1.0);
}

SyntheticSpec spec_for(const std::string& name) {
  if (name == "nguyen4") return {1, -1.0, 1.0, 20, 1000, nguyen4_f};
  if (name == "keijzer11") return {2, -1.0, 1.0, 100, 900, keijzer11_f};
  if (name == "r1") return {1, -2.0, 2.0, 20, 1000, r1_f};
  throw std::invalid_argument("unknown synthetic problem '" + name +
                              "' (expected nguyen4, keijzer11 or r1)");
}

Dataset sample_dataset(const SyntheticSpec& s, std::size_t n, Rng& rng) {
  Dataset d;
  d.num_features = s.num_features;
  d.x.reserve(n * static_cast<std::size_t>(s.num_features));
  d.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < s.num_features; ++j) d.x.push_back(rng.uniform(s.lo, s.hi));
    d.y.push_back(s.f(d.row(i)));
  }
  return d;
}

}  // namespace

Problem generate_synthetic(const std::string& name, Rng& rng) {
  const SyntheticSpec s = spec_for(name);
  Dataset train = sample_dataset(s, s.train_n, rng);
  Dataset test = sample_dataset(s, s.test_n, rng);
  return Problem{name, std::move(train), std::move(test), symreg_primitive_set(s.num_features)};
}

Problem load_csv(const std::filesystem::path& path, Rng& rng, const std::string& target,
                 double train_fraction) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw std::invalid_argument("train fraction must be in (0, 1)");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  auto parse_cell = [](const std::string& cell, double& out) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e && b != e;
  };

  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    std::vector<double> vals(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size(); ++i) numeric = numeric && parse_cell(cells[i], vals[i]);
    if (!numeric) {
      if (line_no == 1) {
        header = std::move(cells);  // header row
        continue;
      }
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": non-numeric value");
    }
    if (width == 0) width = vals.size();
    if (vals.size() != width)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(width) + " columns, got " +
                               std::to_string(vals.size()));
    rows.push_back(std::move(vals));
  }
  if (rows.size() < 2) throw std::runtime_error(path.string() + ": need at least two data rows");
  if (width < 2) throw std::runtime_error(path.string() + ": need at least two columns");

  std::size_t target_col = width - 1;
  if (!target.empty()) {
    bool found = false;
    for (std::size_t i = 0; i < header.size() && !found; ++i)
      if (header[i] == target) {
        target_col = i;
        found = true;
      }
    if (!found) {
      double idx;
      if (parse_cell(target, idx) && idx >= 0 && idx < static_cast<double>(width)) {
        target_col = static_cast<std::size_t>(idx);
      } else {
        throw std::runtime_error(path.string() + ": target column '" + target + "' not found");
      }
    }
  }

  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  // round half to even so a 0.75 split of 506 rows yields exactly 380
  const auto train_n = static_cast<std::size_t>(
      std::nearbyint(train_fraction * static_cast<double>(rows.size())));
  if (train_n == 0 || train_n >= rows.size())
    throw std::runtime_error(path.string() + ": split leaves an empty train or test set");

  const int nf = static_cast<int>(width - 1);
  Dataset train, test;
  train.num_features = test.num_features = nf;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    Dataset& d = k < train_n ? train : test;
    const auto& r = rows[order[k]];
    for (std::size_t c = 0; c < width; ++c)
      if (c != target_col) d.x.push_back(r[c]);
    d.y.push_back(r[target_col]);
  }
  return Problem{path.stem().string(), std::move(train), std::move(test),
                 symreg_primitive_set(nf)};
}

double Backend::score(const Individual& ind, const Dataset& data) const {
  std::vector<double> yhat(data.rows());
  if (const auto* lin = std::get_if<LinearIndividual>(&ind)) {
    // evaluate only the effective code; semantics on R[0] are unchanged
    const LinearIndividual compact = strip_introns(*lin);
    for (std::size_t i = 0; i < data.rows(); ++i) yhat[i] = eval_linear(compact, data.row(i));
  } else {
    const auto& t = std::get<TreeIndividual>(ind);
    for (std::size_t i = 0; i < data.rows(); ++i) yhat[i] = eval_tree(t, data.row(i));
  }
  return rse(data.y, yhat);
}

}  // namespace mrgp::symreg
