#include "disf/reduction.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace disf;

namespace {

// Forest built directly from a label map; tree k is rooted at its first
// pixel in raster order and carries the given per-pixel L values.
Forest<double> forest_from_labels(const LabelMap& labels, const std::vector<double>& L,
                                  std::size_t trees) {
  const int h = int(labels.rows()), w = int(labels.cols());
  Forest<double> f(w, h, trees);
  std::vector<Index> root(trees, kNoPred);
  for (Index p = 0; p < Index(w) * h; ++p) {
    const Index k = labels.data()[p];
    f.label[p] = k;
    if (root[std::size_t(k)] == kNoPred) root[std::size_t(k)] = p;
    f.pred[p] = root[std::size_t(k)] == p ? kNoPred : root[std::size_t(k)];
    f.root[p] = root[std::size_t(k)];
    f.trees[std::size_t(k)].size += 1;
    f.trees[std::size_t(k)].color_sum += Eigen::Vector3d(L[std::size_t(p)], 0, 0);
  }
  for (std::size_t k = 0; k < trees; ++k) f.seed_ids[k] = SeedId(k);
  return f;
}

}  // namespace

TEST_CASE("tree_adjacency fixtures") {
  SUBCASE("single tree") {
    LabelMap labels = LabelMap::Zero(4, 4);
    const auto f = forest_from_labels(labels, std::vector<double>(16, 0), 1);
    CHECK(tree_adjacency(f, PixelGraph(4, 4)).pairs().empty());
  }
  SUBCASE("left/right halves") {
    LabelMap labels(4, 4);
    labels << 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1;
    const auto f = forest_from_labels(labels, std::vector<double>(16, 0), 2);
    const auto pairs = tree_adjacency(f, PixelGraph(4, 4)).pairs();
    CHECK(pairs == std::vector<std::pair<Index, Index>>{{0, 1}});
  }
  SUBCASE("2x2 quadrants: diagonal corners touch under 8-adjacency") {
    LabelMap labels(4, 4);
    labels << 0, 0, 1, 1, 0, 0, 1, 1, 2, 2, 3, 3, 2, 2, 3, 3;
    const auto f = forest_from_labels(labels, std::vector<double>(16, 0), 4);
    const auto pairs = tree_adjacency(f, PixelGraph(4, 4)).pairs();
    const std::vector<std::pair<Index, Index>> all{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    CHECK(pairs == all);
  }
}

TEST_CASE("tree_adjacency is symmetric, irreflexive and exact on random forests") {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> dim(2, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = dim(rng), h = dim(rng);
    const auto img = testing::random_lab(w, h, rng);
    std::uniform_int_distribution<int> count(1, std::min(w * h, 9));
    const SeedSet seeds = testing::random_seeds(w, h, count(rng), rng);
    const auto f = run_ift(img, PixelGraph(img), seeds, CostPolicy::DynamicMean);
    const auto adj = tree_adjacency(f, PixelGraph(img));

    std::set<std::pair<Index, Index>> brute;
    for (Index p = 0; p < f.size(); ++p)
      for (Index q = 0; q < f.size(); ++q)
        if (std::max(std::abs(p % w - q % w), std::abs(p / w - q / w)) == 1 && f.label[p] != f.label[q])
          brute.emplace(f.label[p], f.label[q]);
    for (Index a = 0; a < Index(seeds.size()); ++a) {
      CHECK_FALSE(adj.contains(a, a));
      for (Index b = 0; b < Index(seeds.size()); ++b) {
        CHECK(adj.contains(a, b) == adj.contains(b, a));
        CHECK(adj.contains(a, b) == (brute.count({a, b}) == 1));
      }
    }
  }
}

TEST_CASE("relevance fixtures") {
  SUBCASE("two halves differing by delta") {
    LabelMap labels(2, 4);
    labels << 0, 0, 1, 1, 0, 0, 1, 1;
    std::vector<double> L{10, 10, 17, 17, 10, 10, 17, 17};
    const auto f = forest_from_labels(labels, L, 2);
    const auto adj = tree_adjacency(f, PixelGraph(4, 2));
    CHECK(relevance(f, adj, 0, 8) == doctest::Approx(0.5 * 7));
    CHECK(relevance(f, adj, 1, 8) == doctest::Approx(0.5 * 7));
  }
  SUBCASE("one pixel of a hundred, neighbor distance 10") {
    LabelMap labels = LabelMap::Ones(10, 10);
    labels(0, 0) = 0;
    std::vector<double> L(100, 0);
    L[0] = 10;
    const auto f = forest_from_labels(labels, L, 2);
    const auto adj = tree_adjacency(f, PixelGraph(10, 10));
    CHECK(relevance(f, adj, 0, 100) == doctest::Approx(0.1));
  }
  SUBCASE("chain A-B-C with means 0, 5, 100") {
    // 10 columns x 10 rows: column 0 = A, column 1 = B, columns 2..9 = C.
    LabelMap labels(10, 10);
    std::vector<double> L(100);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) {
        labels(y, x) = x == 0 ? 0 : (x == 1 ? 1 : 2);
        L[std::size_t(y * 10 + x)] = x == 0 ? 0 : (x == 1 ? 5 : 100);
      }
    const auto f = forest_from_labels(labels, L, 3);
    const auto adj = tree_adjacency(f, PixelGraph(10, 10));
    CHECK_FALSE(adj.contains(0, 2));
    CHECK(relevance(f, adj, 1, 100) == doctest::Approx(0.5));
    CHECK(relevance(f, adj, 0, 100) == doctest::Approx(0.5));
    CHECK(relevance(f, adj, 2, 100) == doctest::Approx(0.8 * 95));
  }
  SUBCASE("single tree is never removable") {
    LabelMap labels = LabelMap::Zero(3, 3);
    const auto f = forest_from_labels(labels, std::vector<double>(9, 1), 1);
    const auto adj = tree_adjacency(f, PixelGraph(3, 3));
    CHECK(std::isinf(relevance(f, adj, 0, 9)));
  }
}

TEST_CASE("relevance is unchanged by 2x nearest-neighbor upsampling") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    LabelMap small(4, 5);
    // Vertical stripes keep the label classes connected under any upsampling.
    for (int x = 0; x < 5; ++x) small.col(x).setConstant(x < 2 ? 0 : (x < 4 ? 1 : 2));
    std::vector<double> L(20);
    for (auto& v : L) v = std::uniform_real_distribution<double>(0, 100)(rng);

    LabelMap big(8, 10);
    std::vector<double> Lb(80);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 10; ++x) {
        big(y, x) = small(y / 2, x / 2);
        Lb[std::size_t(y * 10 + x)] = L[std::size_t((y / 2) * 5 + x / 2)];
      }
    const auto fs = forest_from_labels(small, L, 3);
    const auto fb = forest_from_labels(big, Lb, 3);
    const auto as = tree_adjacency(fs, PixelGraph(5, 4));
    const auto ab = tree_adjacency(fb, PixelGraph(10, 8));
    for (Index k = 0; k < 3; ++k) CHECK(relevance(fs, as, k, 20) == doctest::Approx(relevance(fb, ab, k, 80)));
  }
}

TEST_CASE("schedule") {
  CHECK(schedule(8000, 20, 0) == 8000);
  CHECK(schedule(37, 5, 0) == 37);
  CHECK(schedule(8000, 20, 3) == 398);
  CHECK(schedule(8000, 100, 5) == 100);
  CHECK_THROWS_AS(schedule(10, 11, 0), std::invalid_argument);
  CHECK_THROWS_AS(schedule(10, 0, 0), std::invalid_argument);

  std::mt19937 rng(4);
  std::uniform_int_distribution<long long> n0d(1, 100000);
  for (int trial = 0; trial < 500; ++trial) {
    const long long n0 = n0d(rng);
    const long long nf = std::uniform_int_distribution<long long>(1, n0)(rng);
    const int bound = int(std::ceil(std::log(double(n0) / double(nf)))) + 1;
    bool reached = false;
    for (int i = 0; i <= bound; ++i) {
      const long long m = schedule(n0, nf, i);
      CHECK(m >= nf);
      CHECK(schedule(n0, nf, i + 1) <= m);
      if (m > nf) CHECK(schedule(n0, nf, i + 1) < m);
      reached = reached || m == nf;
    }
    CHECK(reached);
  }
}

TEST_CASE("select_seeds") {
  LabelMap labels(1, 3);
  labels << 0, 1, 2;
  const auto f = forest_from_labels(labels, {0, 0, 0}, 3);

  RelevanceTable<double> table;
  table.ids = {0, 1, 2};
  table.values = {3, 1, 2};
  const SeedSet top2 = select_seeds(table, f, 2);
  REQUIRE(top2.size() == 2);
  CHECK(top2[0] == Seed{0, 0});
  CHECK(top2[1] == Seed{2, 2});

  CHECK(select_seeds(table, f, 3).size() == 3);
  CHECK_THROWS_AS(select_seeds(table, f, 4), std::invalid_argument);

  auto tied = forest_from_labels(labels, {0, 0, 0}, 3);
  tied.seed_ids = {5, 9, 12};
  RelevanceTable<double> equal;
  equal.ids = {5, 9, 12};
  equal.values = {1, 1, 1};
  const SeedSet kept = select_seeds(equal, tied, 2);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == 5);
  CHECK(kept[1].id == 9);
  CHECK(kept[0].pixel == 0);
  CHECK(kept[1].pixel == 1);
}

TEST_CASE("select_seeds keeps positions: output is a subset of the input seeds") {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto img = testing::random_lab(9, 8, rng);
    const SeedSet seeds = testing::random_seeds(9, 8, 7, rng);
    const auto f = run_ift(img, PixelGraph(img), seeds, CostPolicy::DynamicMean);
    const auto table = relevance_table(f, tree_adjacency(f, PixelGraph(img)));
    const SeedSet kept = select_seeds(table, f, 3);
    for (const auto& s : kept) CHECK(std::find(seeds.begin(), seeds.end(), s) != seeds.end());
  }
}
