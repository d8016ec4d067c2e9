#include "dem/plugins.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "dem/error.hpp"

namespace dem {
namespace {

std::int64_t scaled(double fraction, std::int64_t n) {
  return static_cast<std::int64_t>(std::llround(fraction * static_cast<double>(n)));
}

class BallsInBinsState final : public Process {
 public:
  explicit BallsInBinsState(std::int64_t n) : n_(n), occupied_(static_cast<std::size_t>(n), 0) {
    empty_[0] = n;
  }

  std::span<const std::int64_t> observe() const override { return empty_; }

  void drift(std::span<double> out) const override {
    out[0] = -static_cast<double>(empty_[0]) / static_cast<double>(n_);
  }

  bool mean_abs_step(std::span<double> out) const override {
    out[0] = static_cast<double>(empty_[0]) / static_cast<double>(n_);
    return true;
  }

  bool exceedance_probability(double beta, std::span<double> out) const override {
    out[0] = beta < 1.0 ? static_cast<double>(empty_[0]) / static_cast<double>(n_) : 0.0;
    return true;
  }

  void step(ChoiceSource& choices) override {
    const auto bin = choices.uniform(static_cast<std::uint64_t>(n_));
    if (!occupied_[bin]) {
      occupied_[bin] = 1;
      --empty_[0];
    }
  }

  std::unique_ptr<Process> clone() const override {
    return std::make_unique<BallsInBinsState>(*this);
  }

  std::string key() const override {
    std::string s(occupied_.size(), '0');
    for (std::size_t b = 0; b < occupied_.size(); ++b) s[b] = occupied_[b] ? '1' : '0';
    return s;
  }

 private:
  std::int64_t n_;
  std::vector<std::uint8_t> occupied_;
  std::array<std::int64_t, 1> empty_{};
};

class DegreeState final : public Process {
 public:
  DegreeState(std::int64_t n, int max_degree)
      : n_(n),
        max_degree_(max_degree),
        degree_(static_cast<std::size_t>(n), 0),
        count_(static_cast<std::size_t>(max_degree) + 1, 0) {
    count_[0] = n;
  }

  std::span<const std::int64_t> observe() const override { return count_; }

  void drift(std::span<double> out) const override {
    const double n = static_cast<double>(n_);
    for (int k = 0; k <= max_degree_; ++k) {
      const double below = k > 0 ? static_cast<double>(count_[k - 1]) : 0.0;
      out[k] = 2.0 * (below - static_cast<double>(count_[k])) / n;
    }
  }

  bool mean_abs_step(std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    for_each_class_pair([&](double p, std::span<const int> delta) {
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += p * std::abs(delta[k]);
    });
    return true;
  }

  bool exceedance_probability(double beta, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    for_each_class_pair([&](double p, std::span<const int> delta) {
      for (std::size_t k = 0; k < out.size(); ++k) {
        if (std::abs(delta[k]) > beta) out[k] += p;
      }
    });
    return true;
  }

  void step(ChoiceSource& choices) override {
    const auto n = static_cast<std::uint64_t>(n_);
    const auto u = choices.uniform(n);
    auto v = choices.uniform(n - 1);
    if (v >= u) ++v;
    bump(u);
    bump(v);
  }

  std::unique_ptr<Process> clone() const override { return std::make_unique<DegreeState>(*this); }

  std::string key() const override {
    std::string s;
    for (auto d : degree_) s += std::to_string(d) + ',';
    return s;
  }

 private:
  void bump(std::uint64_t vertex) {
    const auto d = degree_[vertex]++;
    if (d <= max_degree_) --count_[static_cast<std::size_t>(d)];
    if (d + 1 <= max_degree_) ++count_[static_cast<std::size_t>(d + 1)];
  }

  // Degree classes 0..K plus "above K"; calls f(probability, dY) for every
  // ordered pair of classes of the two endpoints.
  template <typename F>
  void for_each_class_pair(F&& f) const {
    const int classes = max_degree_ + 2;
    std::vector<double> size(static_cast<std::size_t>(classes));
    std::int64_t tracked = 0;
    for (int c = 0; c <= max_degree_; ++c) {
      size[c] = static_cast<double>(count_[c]);
      tracked += count_[c];
    }
    size[classes - 1] = static_cast<double>(n_ - tracked);
    const double pairs = static_cast<double>(n_) * static_cast<double>(n_ - 1);
    std::vector<int> delta(static_cast<std::size_t>(max_degree_) + 1);
    for (int cu = 0; cu < classes; ++cu) {
      for (int cv = 0; cv < classes; ++cv) {
        const double p = size[cu] * (size[cv] - (cu == cv ? 1.0 : 0.0)) / pairs;
        if (p <= 0.0) continue;
        std::fill(delta.begin(), delta.end(), 0);
        for (int c : {cu, cv}) {
          if (c <= max_degree_) --delta[c];
          if (c + 1 <= max_degree_) ++delta[c + 1];
        }
        f(p, std::span<const int>(delta));
      }
    }
  }

  std::int64_t n_;
  int max_degree_;
  std::vector<std::int64_t> degree_;
  std::vector<std::int64_t> count_;
};

class GreedyMatchingState final : public Process {
 public:
  explicit GreedyMatchingState(std::int64_t n) : free_(static_cast<std::size_t>(n)) {
    for (std::size_t v = 0; v < free_.size(); ++v) free_[v] = static_cast<std::int64_t>(v);
    unmatched_[0] = n;
  }

  std::span<const std::int64_t> observe() const override { return unmatched_; }

  void drift(std::span<double> out) const override { out[0] = unmatched_[0] >= 2 ? -2.0 : 0.0; }

  bool mean_abs_step(std::span<double> out) const override {
    out[0] = unmatched_[0] >= 2 ? 2.0 : 0.0;
    return true;
  }

  bool exceedance_probability(double beta, std::span<double> out) const override {
    out[0] = (unmatched_[0] >= 2 && beta < 2.0) ? 1.0 : 0.0;
    return true;
  }

  void step(ChoiceSource& choices) override {
    if (free_.size() < 2) return;
    take(choices.uniform(free_.size()));
    take(choices.uniform(free_.size()));
    unmatched_[0] -= 2;
  }

  std::unique_ptr<Process> clone() const override {
    return std::make_unique<GreedyMatchingState>(*this);
  }

  std::string key() const override {
    std::string s;
    for (auto v : free_) s += std::to_string(v) + ',';
    return s;
  }

 private:
  void take(std::uint64_t slot) {
    free_[slot] = free_.back();
    free_.pop_back();
  }

  std::vector<std::int64_t> free_;
  std::array<std::int64_t, 1> unmatched_{};
};

class ConstantState final : public Process {
 public:
  ConstantState(std::size_t a, std::int64_t value) : y_(a, value) {}
  std::span<const std::int64_t> observe() const override { return y_; }
  void drift(std::span<double> out) const override { std::fill(out.begin(), out.end(), 0.0); }
  bool mean_abs_step(std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    return true;
  }
  bool exceedance_probability(double, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    return true;
  }
  void step(ChoiceSource&) override {}
  std::unique_ptr<Process> clone() const override {
    return std::make_unique<ConstantState>(*this);
  }
  std::string key() const override { return std::to_string(y_.front()); }

 private:
  std::vector<std::int64_t> y_;
};

class FairCoinState final : public Process {
 public:
  explicit FairCoinState(std::int64_t start) { y_[0] = start; }
  std::span<const std::int64_t> observe() const override { return y_; }
  void drift(std::span<double> out) const override { out[0] = 0.0; }
  bool mean_abs_step(std::span<double> out) const override {
    out[0] = 1.0;
    return true;
  }
  bool exceedance_probability(double beta, std::span<double> out) const override {
    out[0] = beta < 1.0 ? 1.0 : 0.0;
    return true;
  }
  void step(ChoiceSource& choices) override { y_[0] += choices.uniform(2) == 0 ? -1 : 1; }
  std::unique_ptr<Process> clone() const override {
    return std::make_unique<FairCoinState>(*this);
  }
  std::string key() const override { return std::to_string(y_[0]); }

 private:
  std::array<std::int64_t, 1> y_{};
};

// JSON parameter helpers.

int max_degree_param(const nlohmann::json& params) {
  const int K = params.value("K", 3);
  if (K < 0 || K > 64) throw SchemaError("degree-process parameter K must lie in [0, 64]");
  return K;
}

std::size_t dimension_param(const nlohmann::json& params) {
  const auto a = params.value("a", std::int64_t{1});
  if (a < 1) throw SchemaError("parameter a must be at least 1");
  return static_cast<std::size_t>(a);
}

Drift linear_drift(const nlohmann::json& params) {
  if (!params.contains("A") || !params["A"].is_array() || params["A"].empty()) {
    throw SchemaError("linear drift needs a nonempty square matrix 'A'");
  }
  const auto A = params["A"].get<std::vector<std::vector<double>>>();
  const std::size_t a = A.size();
  for (const auto& row : A) {
    if (row.size() != a) throw SchemaError("linear drift matrix 'A' must be square");
  }
  std::vector<double> c(a, 0.0);
  if (params.contains("c")) {
    c = params["c"].get<std::vector<double>>();
    if (c.size() != a) throw SchemaError("linear drift offset 'c' has wrong length");
  }
  return Drift("linear", params, a, [A, c](double, std::span<const double> y, std::span<double> out) {
    for (std::size_t k = 0; k < A.size(); ++k) {
      double s = c[k];
      for (std::size_t l = 0; l < A.size(); ++l) s += A[k][l] * y[l];
      out[k] = s;
    }
  });
}

}  // namespace

std::unique_ptr<Process> BallsInBins::start(std::int64_t n) const {
  if (n < 1) throw InstanceError("balls-in-bins needs n >= 1");
  return std::make_unique<BallsInBinsState>(n);
}

DegreeProcess::DegreeProcess(int max_degree) : max_degree_(max_degree) {
  if (max_degree < 0) throw InstanceError("degree-process needs K >= 0");
}

std::unique_ptr<Process> DegreeProcess::start(std::int64_t n) const {
  if (n < 2) throw InstanceError("degree-process needs n >= 2");
  return std::make_unique<DegreeState>(n, max_degree_);
}

std::unique_ptr<Process> GreedyMatching::start(std::int64_t n) const {
  if (n < 1) throw InstanceError("greedy-matching needs n >= 1");
  return std::make_unique<GreedyMatchingState>(n);
}

ConstantProcess::ConstantProcess(std::size_t dimension, double fraction)
    : dimension_(dimension), fraction_(fraction) {
  if (dimension == 0) throw InstanceError("constant process needs a >= 1");
}

std::unique_ptr<Process> ConstantProcess::start(std::int64_t n) const {
  return std::make_unique<ConstantState>(dimension_, scaled(fraction_, n));
}

FairCoin::FairCoin(double fraction) : fraction_(fraction) {}

std::unique_ptr<Process> FairCoin::start(std::int64_t n) const {
  return std::make_unique<FairCoinState>(scaled(fraction_, n));
}

void register_builtins(Registry& registry) {
  registry.add_drift("balls-in-bins", [](const nlohmann::json& params) {
    return Drift("balls-in-bins", params, 1,
                 [](double, std::span<const double> y, std::span<double> out) { out[0] = -y[0]; });
  });
  registry.add_drift("degree-process", [](const nlohmann::json& params) {
    const int K = max_degree_param(params);
    return Drift("degree-process", params, static_cast<std::size_t>(K) + 1,
                 [](double, std::span<const double> y, std::span<double> out) {
                   for (std::size_t k = 0; k < y.size(); ++k) {
                     out[k] = 2.0 * ((k > 0 ? y[k - 1] : 0.0) - y[k]);
                   }
                 });
  });
  registry.add_drift("greedy-matching", [](const nlohmann::json& params) {
    return Drift("greedy-matching", params, 1,
                 [](double, std::span<const double>, std::span<double> out) { out[0] = -2.0; });
  });
  registry.add_drift("zero", [](const nlohmann::json& params) {
    return Drift("zero", params, dimension_param(params),
                 [](double, std::span<const double>, std::span<double> out) {
                   std::fill(out.begin(), out.end(), 0.0);
                 });
  });
  registry.add_drift("linear", linear_drift);

  registry.add_process("balls-in-bins", [](const nlohmann::json&) {
    return std::make_shared<const BallsInBins>();
  });
  registry.add_process("degree-process", [](const nlohmann::json& params) {
    return std::make_shared<const DegreeProcess>(max_degree_param(params));
  });
  registry.add_process("greedy-matching", [](const nlohmann::json&) {
    return std::make_shared<const GreedyMatching>();
  });
  registry.add_process("constant", [](const nlohmann::json& params) {
    return std::make_shared<const ConstantProcess>(dimension_param(params),
                                                   params.value("fraction", 0.5));
  });
  registry.add_process("fair-coin", [](const nlohmann::json& params) {
    return std::make_shared<const FairCoin>(params.value("fraction", 0.5));
  });
}

const Registry& builtin_registry() {
  static const Registry registry = [] {
    Registry r;
    register_builtins(r);
    return r;
  }();
  return registry;
}

std::shared_ptr<const ProcessPlugin> resolve_process(const ProcessSpec& spec,
                                                     const Registry& registry) {
  if (spec.process()) return registry.make_process(spec.process()->name, spec.process()->params);
  const auto& name = spec.drift().plugin();
  if (!registry.has_process(name)) {
    throw SchemaError("spec names no process plugin and drift '" + name +
                      "' has no process of the same name");
  }
  return registry.make_process(name, spec.drift().params());
}

}  // namespace dem
