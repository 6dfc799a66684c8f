#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"

#include "dalab/dataset.hpp"

using namespace dalab;

namespace {
double label1_freq(const DomainDataset& d) { return d.label_frequency(1); }
}  // namespace

TEST_CASE("figure1_toy marginals track the 2*eps construction") {
  {
    auto [src, tgt] = generate_figure1_toy({0.0, 4000, 4.0, 0.25}, 3);
    double band = 3.0 * std::sqrt(0.25 / 4000.0);  // 3 binomial stds
    CHECK(std::abs(label1_freq(src) - label1_freq(tgt)) <= 2.0 * band);
  }
  {
    auto [src, tgt] = generate_figure1_toy({0.1, 2000, 4.0, 0.25}, 5);
    double gap = label1_freq(src) - label1_freq(tgt);
    CHECK(gap >= 0.2 - 0.03);
    CHECK(gap <= 0.2 + 0.03);
  }
}

TEST_CASE("generators are pure functions of (params, seed)") {
  auto [a_src, a_tgt] = generate_figure1_toy({0.1, 500, 4.0, 0.25}, 9);
  auto [b_src, b_tgt] = generate_figure1_toy({0.1, 500, 4.0, 0.25}, 9);
  CHECK(a_src.labels == b_src.labels);
  CHECK(a_tgt.labels == b_tgt.labels);
  for (std::size_t i = 0; i < a_src.features.size(); ++i)
    CHECK(a_src.features[i] == b_src.features[i]);
  auto [c_src, c_tgt] = generate_moons_shift({30.0, 0.0, 300, 0.1}, 4);
  auto [d_src, d_tgt] = generate_moons_shift({30.0, 0.0, 300, 0.1}, 4);
  for (std::size_t i = 0; i < c_tgt.features.size(); ++i)
    CHECK(c_tgt.features[i] == d_tgt.features[i]);
}

TEST_CASE("figure1_toy supports are disjoint at zero noise") {
  auto [src, tgt] = generate_figure1_toy({0.1, 200, 4.0, 0.0}, 1);
  CHECK(min_cross_distance(src, tgt) > 0.0);
}

TEST_CASE("invalid generator params are rejected") {
  CHECK_THROWS(generate_figure1_toy({0.5, 100, 4.0, 0.25}, 1));
  CHECK_THROWS(generate_figure1_toy({0.1, 0, 4.0, 0.25}, 1));
}

TEST_CASE("csv happy path, forced ragged-row error, roundtrip") {
  const char* path = "test_data_tmp.csv";
  {
    std::ofstream out(path);
    out << "label,f0,f1,f2,f3\n";
    out << "0,1,2,3,4\n1,0.5,0.25,0.125,0.0625\n1,-1,-2,-3,-4\n";
  }
  DomainDataset d = load_csv(path);
  CHECK(d.size() == 3);
  CHECK(d.dim() == 4);
  CHECK(d.labels == std::vector<int>{0, 1, 1});

  {
    std::ofstream out(path);
    out << "label,f0,f1,f2,f3\n0,1,2,3\n";
  }
  CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("line 2"), ParseError);

  auto [src, tgt] = generate_figure1_toy({0.1, 100, 4.0, 0.25}, 2);
  save_csv(src, path);
  DomainDataset back = load_csv(path);
  CHECK(back.labels == src.labels);
  for (std::size_t i = 0; i < src.features.size(); ++i)
    CHECK(back.features[i] == src.features[i]);  // %.17g is lossless
  std::remove(path);
}

TEST_CASE("train_val_split partitions the multiset deterministically") {
  auto [src, tgt] = generate_figure1_toy({0.1, 100, 4.0, 0.25}, 8);
  auto [tr, va] = train_val_split(src, 0.1, 17);
  CHECK(tr.size() == 90);
  CHECK(va.size() == 10);
  auto [tr2, va2] = train_val_split(src, 0.1, 17);
  CHECK(tr.labels == tr2.labels);
  CHECK(va.labels == va2.labels);

  // union of rows equals the original multiset
  auto key = [](const DomainDataset& d, std::size_t r) {
    std::string k = std::to_string(d.labels[r]);
    for (std::size_t c = 0; c < d.dim(); ++c) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%.17g", d.features.at(r, c));
      k += buf;
    }
    return k;
  };
  std::multiset<std::string> original, split_union;
  for (std::size_t r = 0; r < src.size(); ++r) original.insert(key(src, r));
  for (std::size_t r = 0; r < tr.size(); ++r) split_union.insert(key(tr, r));
  for (std::size_t r = 0; r < va.size(); ++r) split_union.insert(key(va, r));
  CHECK(original == split_union);

  CHECK_THROWS(train_val_split(src, 0.0, 1));
  CHECK_THROWS(train_val_split(src, 1.0, 1));
}
