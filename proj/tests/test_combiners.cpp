#include <doctest.h>

#include "dnspe/combiners.hpp"

using namespace dnspe;

namespace {

InterestLayout reference_layout() {
  return build_layout(10, 2,
                      {{{1, 2, 3, 4, 5}, 3}, {{4, 5, 6, 7}, 2}},
                      std::vector<int>(10, 3), std::vector<int>(10, 2));
}

// Random connected topology: a ring plus extra random chords.
Topology random_topology(int n, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int k = 0; k < n; ++k) edges.emplace_back(k, (k + 1) % n);
  const int extra = static_cast<int>(rng.uniform() * n);
  for (int e = 0; e < extra; ++e) {
    const int a = static_cast<int>(rng.uniform() * n);
    const int b = static_cast<int>(rng.uniform() * n);
    if (a != b) edges.emplace_back(a, b);
  }
  return topology_from_edges(n, edges);
}

InterestLayout random_layout(Rng& rng) {
  const int n = 2 + static_cast<int>(rng.uniform() * 4);
  const int mg = 1 + static_cast<int>(rng.uniform() * 2);
  std::vector<std::pair<std::vector<int>, int>> clusters;
  const int num_clusters = static_cast<int>(rng.uniform() * 3);
  for (int j = 0; j < num_clusters; ++j) {
    std::vector<int> members;
    for (int k = 0; k < n; ++k)
      if (rng.uniform() < 0.6) members.push_back(k);
    if (members.empty()) members.push_back(static_cast<int>(rng.uniform() * n));
    clusters.emplace_back(members, 1 + static_cast<int>(rng.uniform() * 2));
  }
  std::vector<int> local(n), obs(n, 2);
  for (int k = 0; k < n; ++k) local[k] = 1 + static_cast<int>(rng.uniform() * 2);
  return build_layout(n, mg, clusters, local, obs);
}

// Random row-stochastic weights on the support the topology allows.
CombinationPolicy random_policy(const Topology& t, const InterestLayout& layout,
                                Rng& rng) {
  CombinationPolicy p = uniform_policy(t, layout);
  auto randomize = [&rng](Matrix& w) {
    for (Eigen::Index k = 0; k < w.rows(); ++k) {
      double total = 0.0;
      for (Eigen::Index l = 0; l < w.cols(); ++l)
        if (w(k, l) != 0.0) {
          w(k, l) = 0.1 + rng.uniform();
          total += w(k, l);
        }
      w.row(k) /= total;
    }
  };
  randomize(p.cw);
  randomize(p.aw);
  for (auto& m : p.cs) randomize(m);
  for (auto& m : p.as) randomize(m);
  return p;
}

}  // namespace

TEST_CASE("uniform weights over neighborhoods and cluster intersections") {
  const InterestLayout layout = build_layout(4, 1, {{{0, 1, 2}, 1}},
                                             {1, 1, 1, 1}, {1, 1, 1, 1});
  const Topology t = topology_from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const CombinationPolicy p = uniform_policy(t, layout);
  // Node 1 has neighbors {0, 1, 2}.
  CHECK(p.cw(1, 0) == doctest::Approx(1.0 / 3));
  CHECK(p.cw(1, 3) == 0.0);
  // Node 0 in the cluster reaches only {0, 1} of {0, 1, 2}.
  CHECK(p.cs[0](0, 0) == doctest::Approx(0.5));
  CHECK(p.cs[0](0, 1) == doctest::Approx(0.5));
  CHECK(p.cs[0](0, 2) == 0.0);
  CHECK(validate_policy(p, t, layout).ok());
}

TEST_CASE("uniform_policy requires a reachable cluster peer") {
  // Node 3 in the cluster but its neighborhood misses every member incl.
  // itself is impossible (self-loop), so empty intersections cannot happen
  // for members. A cluster is always self-reachable.
  const InterestLayout layout = build_layout(3, 1, {{{0, 2}, 1}},
                                             {1, 1, 1}, {1, 1, 1});
  const Topology t = topology_from_edges(3, {{0, 1}, {1, 2}});
  const CombinationPolicy p = uniform_policy(t, layout);
  // {0,2} are not adjacent: each only combines with itself for the common task.
  CHECK(p.cs[0](0, 0) == doctest::Approx(1.0));
  CHECK(p.cs[0](0, 1) == 0.0);
}

TEST_CASE("validate_policy flags support and row-sum violations") {
  const InterestLayout layout = build_layout(3, 1, {{{0, 1}, 1}},
                                             {1, 1, 1}, {1, 1, 1});
  const Topology t = topology_from_edges(3, {{0, 1}, {1, 2}});
  CombinationPolicy p = uniform_policy(t, layout);
  CHECK(validate_policy(p, t, layout).ok());
  p.cw(0, 2) = 0.1;  // 0 and 2 are not neighbors, and the row sum breaks
  const auto diag = validate_policy(p, t, layout);
  CHECK_FALSE(diag.ok());
  CHECK(diag.violations.size() >= 2);
}

TEST_CASE("grouped counters match direct evaluation") {
  // With M_g = 2, the second node's global copy starts right after the first:
  // zero-based offset (k=1)*M_g = 2.
  const InterestLayout small = build_layout(2, 2, {}, {1, 1}, {1, 1});
  CHECK(small.grouped_global_offset(1) == 2);
  // Reference network: locals start after 10*2 global entries and
  // 5*3 + 4*2 = 23 common entries.
  const InterestLayout layout = reference_layout();
  CHECK(layout.grouped_local_offset(0) == 43);
  CHECK(layout.grouped_global_offset(0) == 0);
  CHECK(layout.grouped_common_offset(1, 0) == 20);
  CHECK(layout.grouped_common_offset(4, 1) == 20 + 15);
  CHECK(layout.grouped_common_offset(5, 1) == 20 + 15 + 2);
}

TEST_CASE("permutation is the identity for a single node") {
  const InterestLayout layout = build_layout(1, 2, {{{0}, 1}}, {2}, {2});
  const Matrix perm = build_permutation(layout);
  CHECK((perm - Matrix::Identity(5, 5)).norm() == 0.0);
}

TEST_CASE("permutation is orthogonal on the reference network") {
  const InterestLayout layout = reference_layout();
  const Matrix perm = build_permutation(layout);
  CHECK((perm * perm.transpose() - Matrix::Identity(73, 73)).norm() == 0.0);
  // Every row and column holds exactly one 1.
  for (int i = 0; i < 73; ++i) {
    CHECK(perm.row(i).sum() == 1.0);
    CHECK(perm.col(i).sum() == 1.0);
  }
}

TEST_CASE("direct and permuted extended matrices agree") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const InterestLayout layout = random_layout(rng);
    const Topology t = random_topology(layout.num_nodes, rng);
    const CombinationPolicy p = random_policy(t, layout, rng);
    const Matrix perm = build_permutation(layout);
    for (PolicySide side : {PolicySide::kCombineFirst, PolicySide::kCombineSecond}) {
      const Matrix direct = extend_policy_direct(side, p, layout);
      const Matrix via_perm = extend_policy_permuted(side, p, layout, perm);
      CHECK((direct - via_perm).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("extended matrices are right-stochastic with identity local rows") {
  Rng rng(9);
  const InterestLayout layout = reference_layout();
  const Topology t = random_topology(layout.num_nodes, rng);
  const CombinationPolicy p = random_policy(t, layout, rng);
  const Matrix ext = extend_policy_direct(PolicySide::kCombineSecond, p, layout);
  const Vector ones = Vector::Ones(layout.total_dim);
  CHECK((ext * ones - ones).cwiseAbs().maxCoeff() < 1e-12);
  for (int k = 0; k < layout.num_nodes; ++k) {
    const int off = layout.local_offset(k);
    const int ml = layout.local_size[k];
    CHECK((ext.block(off, 0, ml, layout.total_dim) -
           Matrix::Identity(layout.total_dim, layout.total_dim)
               .block(off, 0, ml, layout.total_dim))
              .norm() == 0.0);
  }
}

TEST_CASE("identity policy extends to the identity matrix") {
  const InterestLayout layout = reference_layout();
  const CombinationPolicy p = identity_policy(layout);
  const Matrix ext = extend_policy_direct(PolicySide::kCombineFirst, p, layout);
  CHECK((ext - Matrix::Identity(layout.total_dim, layout.total_dim)).norm() == 0.0);
}

TEST_CASE("adaptive weights: equal distances give uniform weights") {
  Eigen::RowVectorXd gamma2 = Eigen::RowVectorXd::Ones(3);
  const std::vector<int> neighbors{0, 1, 2};
  const auto w = adaptive_update(0.1, 1e-8, gamma2, neighbors, {2.0, 2.0, 2.0});
  for (double v : w) CHECK(v == doctest::Approx(1.0 / 3));
  CHECK(gamma2[0] == doctest::Approx(0.9 + 0.1 * 2.0));
}

TEST_CASE("adaptive weights: nu = 1 weights by inverse squared distance") {
  Eigen::RowVectorXd gamma2 = Eigen::RowVectorXd::Ones(2);
  const auto w = adaptive_update(1.0, 1e-8, gamma2, {0, 1}, {1.0, 4.0});
  CHECK(w[0] == doctest::Approx(0.8));
  CHECK(w[1] == doctest::Approx(0.2));
}

TEST_CASE("adaptive weights: the floor keeps zero distances finite") {
  Eigen::RowVectorXd gamma2 = Eigen::RowVectorXd::Ones(2);
  const auto w = adaptive_update(1.0, 1e-8, gamma2, {0, 1}, {0.0, 1.0});
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(w[0] + w[1] == doctest::Approx(1.0));
}

TEST_CASE("adaptive update writes only the touched row of a shared table") {
  Matrix gamma2 = Matrix::Ones(3, 3);
  adaptive_update(0.5, 1e-8, gamma2.row(1), {0, 2}, {3.0, 5.0});
  CHECK(gamma2(1, 0) == doctest::Approx(2.0));
  CHECK(gamma2(1, 1) == 1.0);
  CHECK(gamma2(1, 2) == doctest::Approx(3.0));
  CHECK(gamma2.row(0).sum() == 3.0);
  CHECK(gamma2.row(2).sum() == 3.0);
}
