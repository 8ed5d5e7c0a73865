// Apache License, Version 2.0, refer to LICENSE.txt

#include "fairdiv/samplers.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

#include "fairdiv/errors.hpp"
#include "fairdiv/oracle.hpp"
#include "test_support.hpp"

using namespace fairdiv;

namespace {

LabelDimension halves(int n) {
  std::vector<int> labels(n, 0);
  for (int i = n / 2; i < n; ++i) labels[i] = 1;
  return LabelDimension("gender", labels, 2);
}

LabelDimension one_part(int n) {
  return LabelDimension("all", std::vector<int>(n, 0), 1);
}

}  // namespace

TEST_CASE("uniform sampling edge sizes") {
  Rng rng(1);
  CHECK(sample_uniform(5, 0, rng).empty());
  CHECK(sample_uniform(5, 5, rng) == Subset({0, 1, 2, 3, 4}));
  CHECK_THROWS_AS(sample_uniform(3, 4, rng), InputError);
}

TEST_CASE("uniform sampling hits every pair with the right frequency") {
  Rng rng(7);
  std::map<std::vector<int>, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    ++counts[sample_uniform(6, 2, rng).items];
  }
  CHECK(counts.size() == 15);
  for (const auto& [items, count] : counts) {
    CHECK(std::abs(count / static_cast<double>(draws) - 1.0 / 15.0) < 0.005);
  }
}

TEST_CASE("elementary symmetric polynomial table") {
  const std::vector<double> ones = {1.0, 1.0, 1.0};
  const auto table = elementary_symmetric(ones, 2);
  CHECK(table[2][3] == doctest::Approx(3.0));  // C(3,2)
  CHECK(table[0][0] == 1.0);
  CHECK(table[0][3] == 1.0);

  const std::vector<double> lambda = {0.5, 1.5, 2.0, 3.0};
  // Brute-force oracle: sum over all 6 pairs of products.
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (std::size_t j = i + 1; j < lambda.size(); ++j) {
      pair_sum += lambda[i] * lambda[j];
    }
  }
  const auto table2 = elementary_symmetric(lambda, 2);
  CHECK(table2[2][4] == doctest::Approx(pair_sum).epsilon(1e-14));
}

TEST_CASE("exact kdpp under the identity kernel is uniform") {
  const Kernel k = Kernel::from_matrix(Eigen::MatrixXd::Identity(6, 6));
  const KernelSpectrum spectrum = spectral_decompose(k);
  Rng rng(11);
  std::vector<Subset> draws;
  draws.reserve(50000);
  for (int i = 0; i < 50000; ++i) {
    draws.push_back(sample_kdpp_exact(spectrum, 2, rng));
  }
  const SubsetDistribution uniform = enumerate_kdpp(k, 2);
  CHECK(tv_distance(empirical_distribution(draws), uniform) < 0.02);
}

TEST_CASE("exact kdpp refuses rank-deficient requests") {
  Eigen::VectorXd v(4);
  v << 1, 2, 1, 1;
  const Kernel rank1 = Kernel::from_matrix(v * v.transpose());
  const KernelSpectrum spectrum = spectral_decompose(rank1);
  Rng rng(2);
  CHECK_THROWS_AS(sample_kdpp_exact(spectrum, 2, rng), InfeasibleError);
}

TEST_CASE("exact kdpp matches det-proportional enumeration on 8 items") {
  const Kernel k = testing::random_kernel(8, 6, 808);
  const KernelSpectrum spectrum = spectral_decompose(k);
  Rng rng(33);
  std::vector<Subset> draws;
  draws.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    draws.push_back(sample_kdpp_exact(spectrum, 3, rng));
  }
  const SubsetDistribution truth = enumerate_kdpp(k, 3);
  CHECK(truth.size() == 56);
  CHECK(tv_distance(empirical_distribution(draws), truth) < 0.02);
}

TEST_CASE("kidpp with one part matches the kdpp distribution") {
  const Kernel k = testing::random_kernel(6, 5, 606);
  const QuotaConstraint q(one_part(6), {2});
  Rng rng(3);
  std::vector<Subset> draws;
  draws.reserve(20000);
  for (int i = 0; i < 20000; ++i) {
    draws.push_back(sample_kidpp(k, q, rng));
  }
  CHECK(tv_distance(empirical_distribution(draws), enumerate_kdpp(k, 2)) <
        0.03);
}

TEST_CASE("kidpp honors zero quotas") {
  const Kernel k = testing::random_kernel(6, 5, 17);
  const QuotaConstraint q(halves(6), {2, 0});
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const Subset s = sample_kidpp(k, q, rng);
    CHECK(s.k() == 2);
    for (int id : s.items) CHECK(id < 3);
  }
}

TEST_CASE("kidpp joint frequency factorizes over parts") {
  const Kernel k = testing::random_kernel(8, 6, 414);
  const QuotaConstraint q(halves(8), {1, 1});
  const PartitionSpectra parts = make_partition_spectra(k, q.dimension());

  // Independent oracle: per-part singleton distributions from diagonals.
  double z0 = 0.0, z1 = 0.0;
  for (int i = 0; i < 4; ++i) z0 += k(i, i);
  for (int i = 4; i < 8; ++i) z1 += k(i, i);

  Rng rng(9);
  std::map<std::vector<int>, int> counts;
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) {
    ++counts[sample_kidpp(parts, q, rng).items];
  }
  double tv = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 4; b < 8; ++b) {
      const double expected = (k(a, a) / z0) * (k(b, b) / z1);
      const double seen =
          counts.count({a, b}) ? counts[{a, b}] / static_cast<double>(draws)
                               : 0.0;
      tv += std::abs(expected - seen);
    }
  }
  CHECK(0.5 * tv < 0.02);
}

TEST_CASE("kidpp names the offending part") {
  // Part 1 (items 2..3) is rank one: quota of 2 cannot be drawn.
  Eigen::MatrixXd rows(4, 3);
  rows << 1, 0, 0, 0, 1, 0, 1, 1, 0, 2, 2, 0;
  const Kernel k = build_gram_kernel(FeatureMatrix::create(rows));
  std::vector<int> labels = {0, 0, 1, 1};
  const LabelDimension dim("gender", labels, 2, {"male", "female"});
  const QuotaConstraint q(dim, {0, 2});
  Rng rng(5);
  bool threw = false;
  try {
    sample_kidpp(k, q, rng);
  } catch (const InfeasibleError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("female") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("greedy warm start on the identity breaks ties by lowest id") {
  const Kernel k = Kernel::from_matrix(Eigen::MatrixXd::Identity(6, 6));
  const QuotaConstraint q(halves(6), {1, 1});
  CHECK(greedy_warm_start(k, q) == Subset({0, 3}));
}

TEST_CASE("greedy warm start lands in the feasible determinant range") {
  const Kernel k = testing::random_kernel(6, 4, 2718);
  const QuotaConstraint q(halves(6), {1, 1});
  const Subset s = greedy_warm_start(k, q);
  CHECK(check_quota(s, q));

  // Enumerate all 9 feasible pairs with the closed-form 2x2 determinant.
  std::vector<double> dets;
  double greedy_det = -1.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 3; b < 6; ++b) {
      const double det = k(a, a) * k(b, b) - k(a, b) * k(a, b);
      dets.push_back(det);
      if (Subset({a, b}) == s) greedy_det = det;
    }
  }
  std::sort(dets.begin(), dets.end());
  CHECK(greedy_det >= dets.front());
  CHECK(greedy_det <= dets.back());
  CHECK(greedy_det >= dets[dets.size() / 2]);  // at least the median
}

TEST_CASE("greedy warm start falls back when every choice is singular") {
  // Three copies of one direction in part 0: any second pick there closes
  // the volume, the fallback still fills the quota.
  Eigen::MatrixXd rows(5, 3);
  rows << 1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 1;
  const Kernel k = build_gram_kernel(FeatureMatrix::create(rows));
  std::vector<int> labels = {0, 0, 0, 1, 1};
  const LabelDimension dim("d", labels, 2);
  const QuotaConstraint q(dim, {2, 1});
  const Subset s = greedy_warm_start(k, q);
  CHECK(check_quota(s, q));
  CHECK(log_det_submatrix(k, s).is_singular());

  Rng rng(6);
  CHECK_THROWS_AS(sample_pdpp_mcmc(k, q, 10, rng), InfeasibleError);
}

TEST_CASE("mcmc step rejects quota-violating proposals and counts steps") {
  const Kernel k = Kernel::from_matrix(Eigen::MatrixXd::Identity(3, 3));
  std::vector<int> labels = {0, 1, 1};
  const LabelDimension dim("d", labels, 2);
  const QuotaConstraint q(dim, {1, 1});

  Rng rng(8);
  bool saw_rejection = false;
  for (int trial = 0; trial < 200; ++trial) {
    ChainState st = make_chain_state(k, Subset({0, 1}));
    const ChainState next = mcmc_step(std::move(st), k, q, rng);
    CHECK(next.step_count == 1);
    const bool stayed = next.current == Subset({0, 1});
    const bool moved = next.current == Subset({0, 2});
    CHECK((stayed || moved));  // {1,2} breaks the quota and is unreachable
    if (stayed) saw_rejection = true;
  }
  CHECK(saw_rejection);
}

TEST_CASE("identity kernel accepts feasible swaps with probability 1/2") {
  const Kernel k = Kernel::from_matrix(Eigen::MatrixXd::Identity(6, 6));
  const QuotaConstraint q(one_part(6), {2});
  ChainState st = make_chain_state(k, Subset({0, 1}));
  Rng rng(10);
  const int steps = 40000;
  int moves = 0;
  for (int i = 0; i < steps; ++i) {
    const Subset before = st.current;
    st = mcmc_step(std::move(st), k, q, rng);
    if (!(st.current == before)) ++moves;
  }
  // Every proposal is feasible with det ratio 1; the lazy coin gives 1/2.
  CHECK(std::abs(moves / static_cast<double>(steps) - 0.5) < 0.01);
}

TEST_CASE("singular proposals are never accepted") {
  Eigen::MatrixXd rows(3, 2);
  rows << 1, 0, 0, 1, 0, 1;  // items 1 and 2 identical
  const Kernel k = build_gram_kernel(FeatureMatrix::create(rows));
  const QuotaConstraint q(one_part(3), {2});
  ChainState st = make_chain_state(k, Subset({0, 1}));
  Rng rng(12);
  for (int i = 0; i < 10000; ++i) {
    st = mcmc_step(std::move(st), k, q, rng);
    CHECK(!(st.current == Subset({1, 2})));
  }
}

TEST_CASE("pdpp mcmc on identity 4+4 reaches uniform over cross pairs") {
  const Kernel k = Kernel::from_matrix(Eigen::MatrixXd::Identity(8, 8));
  const QuotaConstraint q(halves(8), {1, 1});
  Rng rng(14);
  std::vector<Subset> draws;
  const int retained = 20000;
  draws.reserve(retained);
  for (int i = 0; i < retained; ++i) {
    draws.push_back(sample_pdpp_mcmc(k, q, 10000, rng));
  }
  const SubsetDistribution truth = enumerate_pdpp(k, q);
  CHECK(truth.size() == 16);
  CHECK(tv_distance(empirical_distribution(draws), truth) < 0.05);
}

TEST_CASE("pdpp mcmc matches the enumeration oracle on 5+5 quotas (2,2)") {
  const Kernel k = testing::random_kernel(10, 7, 5150);
  const QuotaConstraint q(halves(10), {2, 2});
  const long burn_in = default_mixing_steps(10, 4);  // 20 k (n-k)
  Rng rng(15);
  std::vector<Subset> draws;
  const int retained = 20000;
  draws.reserve(retained);
  for (int i = 0; i < retained; ++i) {
    const Subset s = sample_pdpp_mcmc(k, q, burn_in, rng);
    CHECK(check_quota(s, q));
    draws.push_back(s);
  }
  CHECK(tv_distance(empirical_distribution(draws), enumerate_pdpp(k, q)) <
        0.05);
}

TEST_CASE("quotas equal to part sizes leave a single chain state") {
  const Kernel k = testing::random_kernel(4, 4, 88);
  const QuotaConstraint q(halves(4), {2, 2});
  Rng rng(16);
  CHECK(sample_pdpp_mcmc(k, q, 100, rng) == Subset({0, 1, 2, 3}));
}

TEST_CASE("cached log det matches recomputation after many steps") {
  const Kernel k = testing::random_kernel(12, 9, 121);
  const QuotaConstraint q(halves(12), {2, 2});
  ChainState st = make_chain_state(k, greedy_warm_start(k, q));
  Rng rng(18);
  for (int i = 0; i < 100000; ++i) {
    st = mcmc_step(std::move(st), k, q, rng);
  }
  CHECK(st.step_count == 100000);
  const LogDet fresh = log_det_submatrix(k, st.current);
  REQUIRE(!fresh.is_singular());
  CHECK(std::abs(st.logdet.value() - fresh.value()) <= 1e-6);
}

TEST_CASE("detailed balance holds for the swap kernel on 6 items") {
  const Kernel k = testing::random_kernel(6, 5, 333);
  const QuotaConstraint q(halves(6), {1, 1});
  const SubsetDistribution pi = enumerate_pdpp(k, q);
  const int n = 6, kk = 2;
  const double proposal_prob = 1.0 / (kk * (n - kk));

  const auto transition = [&](const Subset& from, const Subset& to) {
    // One swap apart? Otherwise a single step cannot connect them.
    std::vector<int> removed, inserted;
    for (int id : from.items) {
      if (!to.contains(id)) removed.push_back(id);
    }
    for (int id : to.items) {
      if (!from.contains(id)) inserted.push_back(id);
    }
    if (removed.size() != 1 || inserted.size() != 1) return 0.0;
    if (q.dimension().label(removed[0]) != q.dimension().label(inserted[0])) {
      return 0.0;  // constraint rejection
    }
    const double lf = log_det_submatrix(k, from).value();
    const double lt = log_det_submatrix(k, to).value();
    return proposal_prob * 0.5 * std::min(1.0, std::exp(lt - lf));
  };

  for (std::size_t a = 0; a < pi.size(); ++a) {
    for (std::size_t b = 0; b < pi.size(); ++b) {
      if (a == b) continue;
      const double flow_ab =
          pi.probabilities[a] * transition(pi.support[a], pi.support[b]);
      const double flow_ba =
          pi.probabilities[b] * transition(pi.support[b], pi.support[a]);
      CHECK(std::abs(flow_ab - flow_ba) <= 1e-10);
    }
  }
}

TEST_CASE("exact kdpp and single-part pdpp mcmc agree") {
  const Kernel k = testing::random_kernel(8, 6, 999);
  const KernelSpectrum spectrum = spectral_decompose(k);
  const QuotaConstraint q(one_part(8), {3});
  const long burn_in = default_mixing_steps(8, 3);

  Rng rng_exact(21);
  Rng rng_chain(22);
  std::vector<Subset> exact, chain;
  for (int i = 0; i < 20000; ++i) {
    exact.push_back(sample_kdpp_exact(spectrum, 3, rng_exact));
    chain.push_back(sample_pdpp_mcmc(k, q, burn_in, rng_chain));
  }
  CHECK(tv_distance(empirical_distribution(exact),
                    empirical_distribution(chain)) < 0.05);
}

TEST_CASE("identical seeds reproduce identical sample sequences") {
  const Kernel k = testing::random_kernel(8, 6, 246);
  const KernelSpectrum spectrum = spectral_decompose(k);
  const QuotaConstraint q(halves(8), {2, 2});
  const PartitionSpectra parts = make_partition_spectra(k, q.dimension());

  for (int which = 0; which < 4; ++which) {
    Rng a(4242), b(4242);
    for (int i = 0; i < 5; ++i) {
      Subset sa, sb;
      switch (which) {
        case 0:
          sa = sample_uniform(8, 4, a);
          sb = sample_uniform(8, 4, b);
          break;
        case 1:
          sa = sample_kdpp_exact(spectrum, 4, a);
          sb = sample_kdpp_exact(spectrum, 4, b);
          break;
        case 2:
          sa = sample_kidpp(parts, q, a);
          sb = sample_kidpp(parts, q, b);
          break;
        default:
          sa = sample_pdpp_mcmc(k, q, 200, a);
          sb = sample_pdpp_mcmc(k, q, 200, b);
          break;
      }
      CHECK(sa == sb);
    }
  }
}
