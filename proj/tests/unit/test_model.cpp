#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gnat/model.hpp"
#include "gnat/random.hpp"
#include "support.hpp"

namespace gnat {
namespace {

Network two_neurons() {
  Network net;
  net.width = 10.0;
  net.height = 10.0;
  net.neurons = {{{1.0, 1.0}, true}, {{2.0, 2.0}, true}};
  net.synapses = {{0, 1, 3.0, 2.0}};
  return net;
}

TEST(SortAndIndex, OrdersByTimeThenNeuron) {
  auto train = sort_and_index_spikes({{1, 5.0}, {0, 5.0}, {2, 1.0}});
  ASSERT_EQ(train.size(), 3u);
  EXPECT_EQ(train[0], (Spike{2, 1.0}));
  EXPECT_EQ(train[1], (Spike{0, 5.0}));
  EXPECT_EQ(train[2], (Spike{1, 5.0}));
  EXPECT_DOUBLE_EQ(train.duration(), 5.0);
}

TEST(SortAndIndex, EmptyAndSingleton) {
  EXPECT_TRUE(sort_and_index_spikes({}).empty());
  auto one = sort_and_index_spikes({{4, 2.5}});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].neuron, 4u);
}

TEST(SortAndIndex, RejectsBadTimesNamingTheEvent) {
  try {
    sort_and_index_spikes({{0, 1.0}, {3, -1.0}});
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("spike event 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(sort_and_index_spikes({{0, std::numeric_limits<double>::quiet_NaN()}}), InputError);
  EXPECT_THROW(sort_and_index_spikes({{0, std::numeric_limits<double>::infinity()}}), InputError);
  EXPECT_THROW(sort_and_index_spikes({{0, 11.0}}, 10.0), InputError);
}

TEST(SortAndIndex, IdempotentOnRandomTrains) {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    auto train = testing::random_train(rng, 10, 200, 100.0, 0.5);
    std::vector<Spike> again(train.spikes().begin(), train.spikes().end());
    std::reverse(again.begin(), again.end());
    EXPECT_EQ(sort_and_index_spikes(again, train.duration()), train);
    for (std::size_t i = 1; i < train.size(); ++i) EXPECT_TRUE(spike_before(train[i - 1], train[i]) || train[i - 1] == train[i]);
  }
}

TEST(SpikeTrain, ByNeuron) {
  auto train = sort_and_index_spikes({{1, 3.0}, {0, 1.0}, {1, 2.0}});
  auto groups = train.by_neuron(3);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0], (std::vector<SpikeId>{0}));
  EXPECT_EQ(groups[1], (std::vector<SpikeId>{1, 2}));
  EXPECT_TRUE(groups[2].empty());
  EXPECT_EQ(train.neuron_span(), 2u);
}

TEST(ValidateNetwork, ValidTwoNeuronNet) { EXPECT_TRUE(validate_network(two_neurons()).empty()); }

TEST(ValidateNetwork, ShortDelay) {
  auto net = two_neurons();
  net.synapses[0].delay = 0.5;
  auto v = validate_network(net);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::DelayBelowMinimum);
  EXPECT_NE(v[0].message.find("delay below minimum"), std::string::npos);
  EXPECT_NE(v[0].message.find("0->1"), std::string::npos);
}

TEST(ValidateNetwork, DuplicateSynapse) {
  auto net = two_neurons();
  net.synapses.push_back(net.synapses[0]);
  auto v = validate_network(net);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::DuplicateSynapse);
}

TEST(ValidateNetwork, OtherViolations) {
  auto net = two_neurons();
  net.synapses.push_back({1, 1, 1.0, 1.0});
  net.synapses.push_back({1, 0, -1.0, 1.0});
  net.synapses.push_back({0, 5, 1.0, 1.0});
  net.neurons.push_back({{10.0, 0.0}, false});
  auto v = validate_network(net);
  auto has = [&](Violation::Kind k) {
    return std::any_of(v.begin(), v.end(), [k](const Violation& x) { return x.kind == k; });
  };
  EXPECT_TRUE(has(Violation::Kind::SelfSynapse));
  EXPECT_TRUE(has(Violation::Kind::WeightSign));
  EXPECT_TRUE(has(Violation::Kind::NeuronOutOfRange));
  EXPECT_TRUE(has(Violation::Kind::PositionOutOfBounds));
  EXPECT_THROW(require_valid(net), InputError);
}

TEST(IncomingNorm, Examples) {
  Network net;
  net.width = net.height = 10.0;
  net.neurons = {{{0, 0}, true}, {{1, 0}, true}, {{2, 0}, true}, {{3, 0}, false}};
  net.synapses = {{0, 2, 3.0, 1.0}, {1, 2, 4.0, 1.0}, {3, 2, -9.0, 1.0}};
  EXPECT_DOUBLE_EQ(incoming_norm(net, 2, NormKind::L1), 7.0);
  EXPECT_DOUBLE_EQ(incoming_norm(net, 2, NormKind::L2), 5.0);
  EXPECT_DOUBLE_EQ(incoming_norm(net, 0, NormKind::L1), 0.0);
  auto all = incoming_norms(net, NormKind::L1);
  EXPECT_EQ(all, (std::vector<double>{0.0, 0.0, 7.0, 0.0}));
}

TEST(IncomingNorm, PermutationInvariant) {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    // Integer weights keep sums exact under any order.
    auto net = testing::random_network(rng, {.neurons = 15, .connection_p = 0.4});
    for (auto& s : net.synapses) s.weight = std::round(s.weight);
    auto shuffled = net;
    for (std::size_t i = shuffled.synapses.size(); i > 1; --i) std::swap(shuffled.synapses[i - 1], shuffled.synapses[rng.below(i)]);
    for (auto kind : {NormKind::L1, NormKind::L2}) {
      EXPECT_EQ(incoming_norms(net, kind), incoming_norms(shuffled, kind));
    }
  }
}

TEST(NormKind, ParseAndPrint) {
  EXPECT_EQ(parse_norm_kind("l1"), NormKind::L1);
  EXPECT_EQ(parse_norm_kind("l2"), NormKind::L2);
  EXPECT_EQ(to_string(NormKind::L2), "l2");
  EXPECT_THROW(parse_norm_kind("max"), ConfigError);
}

TEST(Fingerprint, IgnoresWeightsButNotStructure) {
  auto net = two_neurons();
  const auto base = structural_fingerprint(net);
  auto reweighted = net;
  reweighted.synapses[0].weight = 9.0;
  EXPECT_EQ(structural_fingerprint(reweighted), base);
  auto redelayed = net;
  redelayed.synapses[0].delay = 3.0;
  EXPECT_NE(structural_fingerprint(redelayed), base);
  auto retagged = net;
  retagged.neurons[1].excitatory = false;
  EXPECT_NE(structural_fingerprint(retagged), base);
}

TEST(Rng, StandardEngineSequence) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, SplitMixReference) {
  // First outputs of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64(0x9E3779B97F4A7C15ULL), 0x6E789E6AA1B965F4ULL);
}

TEST(Rng, ConversionsStayInRange) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.below(7), 7u);
    ASSERT_GE(rng.exponential(2.0), 0.0);
  }
  EXPECT_EQ(rng.below(0), 0u);
}

TEST(Rng, StreamsAreIndependentAndRepeatable) {
  auto a = Rng::stream(3, rng_tag::kPoisson);
  auto b = Rng::stream(3, rng_tag::kPoisson);
  auto c = Rng::stream(3, rng_tag::kPattern);
  const auto xa = a.next();
  EXPECT_EQ(xa, b.next());
  EXPECT_NE(xa, c.next());
}

}  // namespace
}  // namespace gnat
