#include <cstdio>

#include "doctest.h"

#include "dalab/net.hpp"
#include "dalab/rng.hpp"

using namespace dalab;

namespace {
Tensor random_batch(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Tensor x({n, d});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.normal();
  return x;
}
}  // namespace

TEST_CASE("split consistency: encode then predict equals full forward") {
  LayeredNet net = LayeredNet::mlp({4, 8, 8, 8, 3}, 21);
  Tensor x = random_batch(7, 4, 2);
  Tensor full = net.predict_proba(x);
  for (std::size_t i = 1; i < net.depth(); ++i) {
    SplitView view(net, i);
    Tensor via = view.predict_proba_from_latent(view.encode(x));
    REQUIRE(via.size() == full.size());
    for (std::size_t k = 0; k < via.size(); ++k) CHECK(via[k] == full[k]);
  }
  CHECK_THROWS(SplitView(net, 0));
  CHECK_THROWS(SplitView(net, net.depth()));
}

TEST_CASE("forward_activations records every layer") {
  LayeredNet net = LayeredNet::mlp({3, 5, 2}, 4);
  Tensor x = random_batch(6, 3, 3);
  auto acts = net.forward_activations(x);
  REQUIRE(acts.size() == net.depth());
  Tensor manual = net.forward_range(x, 0, 1);
  for (std::size_t k = 0; k < manual.size(); ++k) CHECK(acts[0][k] == manual[k]);
}

TEST_CASE("zero_one_risk hand cases") {
  // net that computes label = argmax of (x0, -x0): classifies sign of x0
  LayeredNet net({{1, 1, false}, {1, 2, false}}, 1);
  net.params()[LayeredNet::weight_name(0)] = Tensor({1, 1}, {1.0});
  net.params()[LayeredNet::bias_name(0)] = Tensor({1}, {0.0});
  net.params()[LayeredNet::weight_name(1)] = Tensor({1, 2}, {-1.0, 1.0});
  net.params()[LayeredNet::bias_name(1)] = Tensor({2}, {0.0, 0.0});

  DomainDataset ds;
  ds.features = Tensor({4, 1}, {-1.0, -2.0, 3.0, 4.0});
  ds.labels = {0, 0, 1, 0};  // one deliberate misfit
  CHECK(zero_one_risk(net, ds) == 0.25);

  DomainDataset empty;
  CHECK_THROWS(zero_one_risk(net, empty));

  // constant predictor on balanced labels
  net.params()[LayeredNet::weight_name(1)] = Tensor({1, 2}, {0.0, 0.0});
  ds.labels = {0, 0, 1, 1};
  CHECK(zero_one_risk(net, ds) == 0.5);  // ties break to class 0
}

TEST_CASE("disagreement hand cases and risk identity") {
  CHECK(disagreement(std::vector<int>{0, 1, 0}, std::vector<int>{0, 1, 0}) == 0.0);
  CHECK(disagreement(std::vector<int>{0, 1, 1, 0}, std::vector<int>{1, 0, 0, 1}) == 1.0);
  std::vector<int> a = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  std::vector<int> b = {0, 0, 0, 1, 1, 1, 1, 1, 1, 0};
  CHECK(disagreement(a, b) == 0.3);

  LayeredNet net = LayeredNet::mlp({2, 6, 2}, 8);
  DomainDataset ds;
  ds.features = random_batch(20, 2, 5);
  ds.labels.assign(20, 0);
  for (std::size_t i = 0; i < 20; i += 2) ds.labels[i] = 1;
  CHECK(zero_one_risk(net, ds) == disagreement(net.predict(ds.features), ds.labels));
}

TEST_CASE("discriminator width is validated at construction") {
  CHECK_NOTHROW(Discriminator(8, 1, 3, {16}));
  LayeredNet net = LayeredNet::mlp({2, 8, 2}, 1);
  Discriminator d(8, 1, 3, {16});
  CHECK(d.net.input_dim() == 8);
  CHECK(d.net.num_classes() == 2);
}

TEST_CASE("checkpoint roundtrip is exact") {
  LayeredNet net = LayeredNet::mlp({3, 7, 4, 2}, 99);
  const char* path = "test_model_tmp.net";
  net.save(path);
  LayeredNet back = LayeredNet::load(path);
  REQUIRE(back.depth() == net.depth());
  for (const auto& [name, t] : net.params()) {
    const Tensor& u = back.params().at(name);
    REQUIRE(u.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(u[i] == t[i]);
  }
  std::remove(path);
}
