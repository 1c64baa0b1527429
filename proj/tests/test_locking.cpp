#include "support/oracles.hpp"

#include "saslab/circuits.hpp"
#include "saslab/errors.hpp"
#include "saslab/locking.hpp"

#include <doctest.h>

#include <set>

using namespace saslab;

namespace {

std::vector<Minterm> pick(std::mt19937_64 &rng, unsigned n, unsigned m)
{
	std::set<Minterm> s;
	while (s.size() < m)
		s.insert(rng() & ((Minterm{1} << n) - 1));
	std::vector<Minterm> v(s.begin(), s.end());
	std::shuffle(v.begin(), v.end(), rng);
	return v;
}

// Locked output = original output XOR (block corruption) on the insertion output.
void check_corruption_matches(const LockedCircuit &lc, const Circuit &orig,
	const std::function<bool(Minterm x, std::uint64_t key)> &corrupts)
{
	const auto &slice = lc.input_slice();
	auto table = oracle::corruption_table(lc.circuit, orig, slice);
	for (std::uint64_t k = 0; k < table.size(); ++k)
		for (Minterm x = 0; x < table[k].size(); ++x)
			REQUIRE_MESSAGE(table[k][x] == corrupts(x, k), "key ", k, " minterm ", x);
}

} // namespace

TEST_CASE("partition: disjoint, covering, evenly sized, natural key first")
{
	std::mt19937_64 rng(3);
	for (unsigned n : {3u, 4u, 5u})
		for (unsigned m = 1; m <= (1u << n); m *= 2)
			for (unsigned l = 1; l <= m; l *= 2) {
				Minterm xg = rng() % (1u << n);
				auto crit = pick(rng, n, m);
				Partition p = make_partition(crit, n, m, l, xg, rng());
				REQUIRE(p.blocks.size() == l);
				std::set<Minterm> all;
				for (std::size_t j = 0; j < l; ++j) {
					REQUIRE(p.blocks[j].size() == m / l);
					std::set<Minterm> seen;
					for (std::size_t i = 0; i < p.blocks[j].size(); ++i) {
						const auto &set = p.k1_sets[j][i];
						CHECK(set.size() == (std::size_t{1} << n) / (m / l));
						CHECK(set.front() == (p.blocks[j][i] ^ xg));
						for (Minterm k : set)
							CHECK(seen.insert(k).second);
						all.insert(p.blocks[j][i]);
					}
					CHECK(seen.size() == (std::size_t{1} << n));
				}
				CHECK(all == std::set<Minterm>(crit.begin(), crit.end()));
			}
}

TEST_CASE("partition is deterministic in the seed")
{
	auto a = make_partition({1, 2, 5, 9}, 4, 4, 2, 0, 77);
	auto b = make_partition({9, 5, 2, 1}, 4, 4, 2, 0, 77);
	CHECK(a.k1_sets == b.k1_sets);
	auto c = make_partition({1, 2, 5, 9}, 4, 4, 2, 0, 78);
	CHECK(a.k1_sets != c.k1_sets);
}

TEST_CASE("spec validation")
{
	CHECK_THROWS_AS(make_sas_spec(4, {1, 2, 3}, 1, 0, 1), SpecError);      // m not a power of two
	CHECK_THROWS_AS(make_sas_spec(4, {1, 2}, 4, 0, 1), SpecError);         // l > m
	CHECK_THROWS_AS(make_sas_spec(4, {1, 1}, 1, 0, 1), SpecError);         // duplicate minterm
	CHECK_THROWS_AS(make_sas_spec(4, {1, 16}, 1, 0, 1), SpecError);        // out of range
	CHECK_THROWS_AS(make_sas_spec(4, {1, 2}, 1, 16, 1), SpecError);        // x_g out of range
	SasSpec s = make_sas_spec(4, {1, 2}, 1, 0, 1);
	s.k1_sets[0][0].push_back(s.k1_sets[0][1].front());
	CHECK_THROWS_AS(s.finalize(), SpecError);
	CHECK_THROWS_AS(make_sfll_spec(4, 5, {1}), SpecError);
	CHECK_THROWS_AS(make_sfll_spec(4, 2, {0x1, 0x2}), SpecError); // both cubes have top bits 00
	SfllSpec f = make_sfll_spec(4, 2, {0x1, 0x8});
	f.cubes[1].value = 0x1;
	CHECK_THROWS_AS(f.validate(), SpecError); // value outside the care mask
}

TEST_CASE("SAS and RSAS block netlists follow the reference model")
{
	std::mt19937_64 rng(8);
	for (unsigned n : {3u, 4u})
		for (unsigned m = 1; m <= (1u << n); m *= 2)
			for (unsigned l = 1; l <= m && l <= 2; l *= 2) {
				SasSpec s = make_sas_spec(n, pick(rng, n, m), l, rng() % (1u << n), rng());
				for (std::size_t j = 0; j < l; ++j) {
					Circuit blk = build_sas_block(s, j, false);
					Circuit rblk = build_sas_block(s, j, true);
					std::vector<std::string> names = blk.inputs();
					for (std::uint64_t v = 0; v < (std::uint64_t{1} << (3 * n)); ++v) {
						Minterm x = v >> (2 * n), k1 = (v >> n) & ((1u << n) - 1), k2 = v & ((1u << n) - 1);
						std::map<std::string, bool> a;
						oracle::assign(a, names, v);
						REQUIRE(oracle::eval(blk, a).at("y") == oracle::sas_corrupts(s, j, x, k1, k2));
						REQUIRE(oracle::eval(rblk, a).at("y") == oracle::rsas_block_value(s, j, x, k1, k2));
						REQUIRE(sas_block_output(s, j, x, k1, k2) == oracle::sas_corrupts(s, j, x, k1, k2));
						REQUIRE(rsas_block_output(s, j, x, k1, k2) == oracle::rsas_block_value(s, j, x, k1, k2));
					}
				}
			}
}

TEST_CASE("locked multiplier corrupts exactly per the reference model")
{
	Circuit mult = array_multiplier(4, 4);
	std::mt19937_64 rng(12);
	for (int t = 0; t < 4; ++t) {
		unsigned m = 1u << (rng() % 4);
		SasSpec s = make_sas_spec(4, pick(rng, 4, m), 1, rng() % 16, rng());
		for (Scheme scheme : {Scheme::Sas, Scheme::Rsas}) {
			LockedCircuit lc = scheme == Scheme::Sas ? lock_sas(mult, s, 5) : lock_rsas(mult, s, 5);
			CHECK(lc.input_slice() == std::vector<std::string>{"a3", "a2", "a1", "a0"});
			CHECK(oracle::keys_of(lc.circuit).size() == 8);
			check_corruption_matches(lc, mult, [&](Minterm x, std::uint64_t k) {
				return oracle::sas_corrupts(s, 0, x, k >> 4, k & 15);
			});
			CHECK(check_equivalence(lc.with_key(lc.correct_key), mult, EquivalenceMode::Sat).equal);
		}
	}
}

TEST_CASE("Anti-SAT corrupts exactly X = K1 ^ x_g for K1 != K2")
{
	Circuit mult = array_multiplier(3, 3);
	LockedCircuit lc = lock_antisat(mult, 4, 0x9, "", 2);
	CHECK(lc.scheme == Scheme::AntiSat);
	check_corruption_matches(lc, mult, [&](Minterm x, std::uint64_t k) {
		Minterm k1 = k >> 4, k2 = k & 15;
		return k1 != k2 && (x ^ k1) == 0x9;
	});
}

TEST_CASE("SFLL-flex: strip and restore reference")
{
	Circuit mult = array_multiplier(4, 4);
	std::mt19937_64 rng(4);
	for (unsigned k : {2u, 3u, 4u}) {
		SfllSpec f;
		f.n = 4;
		f.k = k;
		Minterm care = ((1u << k) - 1) << (4 - k);
		std::set<Minterm> values;
		while (values.size() < 2)
			values.insert((rng() % 16) & care);
		for (Minterm v : values)
			f.cubes.push_back({v, care});
		f.c = 2;
		LockedCircuit lc = lock_sfll_flex(mult, f, 0);
		CHECK(check_equivalence(lc.with_key(lc.correct_key), mult, EquivalenceMode::Sat).equal);
		check_corruption_matches(lc, mult, [&](Minterm x, std::uint64_t key) {
			bool strip = false, restore = false;
			for (const auto &cube : f.cubes)
				strip = strip || (x & cube.care) == cube.value;
			for (unsigned i = 0; i < 2; ++i) {
				// Cube i's key bits are its care positions, MSB first.
				Minterm kv = ((key >> ((1 - i) * k)) & ((1u << k) - 1)) << (4 - k);
				restore = restore || (x & care) == kv;
			}
			return strip != restore;
		});
	}
}

TEST_CASE("structural correct-key test agrees with functional equivalence")
{
	Circuit mult = array_multiplier(3, 3);
	SasSpec s = make_sas_spec(3, {1, 6}, 2, 2, 9);
	LockedCircuit lc = lock_sas(mult, s, 1);
	REQUIRE(lc.correct_key.size() == 12);
	for (std::uint64_t k = 0; k < 4096; k += 7) {
		BitVector key = BitVector::from_uint(k, 12);
		bool functional = check_equivalence(lc.with_key(key), mult, EquivalenceMode::Exhaustive).equal;
		CHECK(lc.is_correct_key(key) == functional);
	}
	SfllSpec f = make_sfll_spec(3, 3, {1, 6});
	LockedCircuit lf = lock_sfll_flex(mult, f, 0);
	for (std::uint64_t k = 0; k < 64; ++k) {
		BitVector key = BitVector::from_uint(k, 6);
		CHECK(lf.is_correct_key(key) ==
			check_equivalence(lf.with_key(key), mult, EquivalenceMode::Exhaustive).equal);
	}
}

TEST_CASE("lock rejects bad insertion wires and narrow circuits")
{
	Circuit mult = array_multiplier(2, 2);
	SasSpec s = make_sas_spec(4, {1, 2}, 1, 0, 1, {"nope"});
	CHECK_THROWS(lock_sas(mult, s, 0));
	SasSpec wide = make_sas_spec(5, {1, 2}, 1, 0, 1);
	CHECK_THROWS_AS(lock_sas(mult, wide, 0), SpecError);
	SasSpec cyc = make_sas_spec(4, {1, 2}, 1, 0, 1, {"a1"});
	CHECK_THROWS(lock_sas(mult, cyc, 0));
}

TEST_CASE("key names and binding")
{
	CHECK(key_input_name(7) == "keyinput7");
	Circuit c = parse_bench("INPUT(a)\nINPUT(keyinput1)\nINPUT(keyinput0)\nOUTPUT(y)\ny = AND(a, keyinput0, keyinput1)\n");
	CHECK(key_input_names(c) == std::vector<std::string>{"keyinput0", "keyinput1"});
	Circuit b = bind_key(c, BitVector::from_hex("3", 2));
	CHECK(b.inputs() == std::vector<std::string>{"a"});
	CHECK(oracle::eval(b, {{"a", true}}).at("y"));
	Circuit gap = parse_bench("INPUT(keyinput1)\nOUTPUT(y)\ny = NOT(keyinput1)\n");
	CHECK_THROWS(key_input_names(gap));
}
