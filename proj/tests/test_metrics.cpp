#include "support/oracles.hpp"

#include "saslab/circuits.hpp"
#include "saslab/errors.hpp"
#include "saslab/locking.hpp"
#include "saslab/metrics.hpp"

#include <doctest.h>

using namespace saslab;

namespace {

const char *kToyOriginal = "INPUT(x0)\nINPUT(x1)\nOUTPUT(y)\nnx0 = NOT(x0)\ny = AND(nx0, x1)\n";
const char *kToyLocked = "INPUT(x0)\nINPUT(x1)\nINPUT(keyinput0)\nINPUT(keyinput1)\nOUTPUT(y)\n"
                          "t = XOR(x0, keyinput0)\na = AND(t, x1)\ny = XNOR(a, keyinput1)\n";

} // namespace

TEST_CASE("toy example: e_w = gamma = 2/3")
{
	Circuit orig = parse_bench(kToyOriginal), locked = parse_bench(kToyLocked);
	ErrorProfile p = error_profile(locked, orig, full_input_domain(locked), full_key_domain(2));
	CHECK(p.wrong_keys == 3);
	CHECK(p.e_w() == Rational(2, 3));
	CHECK(p.gamma() == Rational(2, 3));
	auto ref = oracle::averages(oracle::corruption_table(locked, orig, {"x0", "x1"}));
	CHECK(ref.e_w == Rational(2, 3));
	for (Minterm x = 0; x < 4; ++x)
		CHECK(p.ier(x) == ref.ier[x]);
}

TEST_CASE("error profile matches the reference on random locked circuits")
{
	std::mt19937_64 rng(17);
	for (int t = 0; t < 20; ++t) {
		Circuit orig = oracle::random_circuit(rng, 4, 20, 2);
		// Lock by XOR-ing random key bits onto random internal wires.
		Circuit locked = orig;
		for (int k = 0; k < 3; ++k) {
			const auto &g = locked.gates()[rng() % locked.gates().size()];
			if (g.output.starts_with("keyinput"))
				continue;
			locked = insert_xor_at_wire(locked, g.output, "keyinput" + std::to_string(oracle::keys_of(locked).size()));
		}
		auto keys = oracle::keys_of(locked);
		auto table = oracle::corruption_table(locked, orig, orig.inputs());
		for (unsigned threads : {1u, 3u}) {
			ErrorProfile p = error_profile(locked, orig, InputDomain{orig.inputs()}, full_key_domain(keys.size()),
				SweepOptions{threads});
			for (std::uint64_t k = 0; k < table.size(); ++k) {
				std::uint32_t c = 0;
				for (bool b : table[k])
					c += b;
				CHECK(p.key_corruptions[k] == c);
			}
			auto ref = oracle::averages(table);
			if (ref.wrong == 0)
				continue;
			CHECK(p.wrong_keys == ref.wrong);
			CHECK(p.e_w() == ref.e_w);
			CHECK(p.gamma() == ref.gamma);
			auto t2 = average_identity(p);
			CHECK(t2.equal);
		}
	}
}

TEST_CASE("slice domain holds other inputs at zero")
{
	Circuit mult = array_multiplier(3, 3);
	SasSpec s = make_sas_spec(3, {2, 5}, 1, 0, 4);
	LockedCircuit lc = lock_sas(mult, s, 0);
	auto table = oracle::corruption_table(lc.circuit, mult, lc.input_slice());
	ErrorProfile p = error_profile(lc.circuit, mult, slice_domain(lc), full_key_domain(6));
	auto ref = oracle::averages(table);
	CHECK(p.gamma() == ref.gamma);
	CHECK(p.ier(2) == Rational(1, 2));
	CHECK(p.ier(0) == Rational(1, 8));
	CHECK(ier(lc.circuit, mult, 5, slice_domain(lc), full_key_domain(6)) == Rational(1, 2));
	BitVector key = BitVector::from_uint((2u << 3) | 1u, 6);
	std::vector<Minterm> want;
	for (Minterm x = 0; x < 8; ++x)
		if (table[(2u << 3) | 1u][x])
			want.push_back(x);
	CHECK(corrupted_set(lc.circuit, mult, key, slice_domain(lc)) == want);
	CHECK(ker(lc.circuit, mult, key, slice_domain(lc)) == Rational(want.size(), 8));
}

TEST_CASE("Anti-SAT e_w is 2^-n")
{
	Circuit mult = array_multiplier(4, 4);
	for (unsigned n : {2u, 3u, 4u}) {
		LockedCircuit lc = lock_antisat(mult, n, 1, "", 0);
		ErrorProfile p = error_profile(lc.circuit, mult, slice_domain(lc), full_key_domain(2 * n));
		CHECK(p.e_w() == Rational(1, 1u << n));
		CHECK(p.gamma() == p.e_w());
	}
}

TEST_CASE("limits")
{
	Circuit mult = array_multiplier(4, 4);
	InputDomain wide;
	for (int i = 0; i < 21; ++i)
		wide.inputs.push_back("w" + std::to_string(i));
	CHECK_THROWS_AS(error_profile(mult, mult, wide, full_key_domain(0)), LimitError);
	CHECK_THROWS_AS(error_profile(mult, mult, full_input_domain(mult), full_key_domain(25)), SpecError);
}

TEST_CASE("Wilson interval")
{
	auto e = wilson_estimate(50, 100);
	CHECK(e.value == doctest::Approx(0.5));
	CHECK(e.lo == doctest::Approx(0.4038).epsilon(0.001));
	CHECK(e.hi == doctest::Approx(0.5962).epsilon(0.001));
	auto z = wilson_estimate(0, 10);
	CHECK(z.lo == 0.0);
	CHECK(z.hi > 0.0);
}

TEST_CASE("sampled KER and IER cover the exact value at the nominal rate")
{
	Circuit mult = array_multiplier(4, 4);
	SasSpec s = make_sas_spec(4, {3, 6, 9, 12}, 1, 0, 4);
	LockedCircuit lc = lock_sas(mult, s, 0);
	BitVector key = BitVector::from_uint((3u << 4) | 1u, 8);
	double exact_ker = to_double(ker(lc.circuit, mult, key, slice_domain(lc)));
	double exact_ier = to_double(ier(lc.circuit, mult, 3, slice_domain(lc), full_key_domain(8)));
	int ker_hits = 0, ier_hits = 0;
	const int reps = 120;
	for (int r = 0; r < reps; ++r) {
		auto ek = ker_sampled(lc.circuit, mult, key, slice_domain(lc), 400, 1000 + r);
		ker_hits += ek.lo <= exact_ker && exact_ker <= ek.hi;
		auto ei = ier_sampled(lc.circuit, mult, 3, slice_domain(lc), full_key_domain(8),
			[&](const BitVector &k) { return lc.is_correct_key(k); }, 400, 5000 + r);
		ier_hits += ei.lo <= exact_ier && exact_ier <= ei.hi;
	}
	CHECK(ker_hits >= reps * 93 / 100);
	CHECK(ier_hits >= reps * 93 / 100);
}

TEST_CASE("closed forms")
{
	CHECK(expected_iterations(14, 4, 1) == Rational(8194));
	CHECK(expected_iterations(10, 4, 2) == Rational(2 * 1024 + 4, 3));
	CHECK(sas_gamma(4, 2, 1) == (Rational(2) * Rational(1, 2) + Rational(14, 16)) / 16);
	CHECK(sfll_sat_success_prob(1, 4, 10) == doctest::Approx(4.0 / 1024));
	CHECK(sfll_sat_success_prob(1 << 20, 4, 10) == 1.0);
	CHECK(sfll_sat_success_prob(3, 3, 8) == doctest::Approx(3.0 * 4 / 256));
	CHECK(tradeoff_check(0.5, 2.0));
	CHECK_FALSE(tradeoff_check(0.5, 1.9));
	CHECK_THROWS_AS(tradeoff_check(0.0, 1.0), SpecError);
}

TEST_CASE("SFLL-flex rates for disjoint wrong cubes")
{
	Circuit mult = array_multiplier(4, 4);
	SfllSpec f = make_sfll_spec(4, 3, {0x0, 0x4});
	LockedCircuit lc = lock_sfll_flex(mult, f, 0);
	// Wrong cubes 100x and 110x do not overlap the protected 000x, 010x.
	BitVector key = BitVector::from_uint((0b100u << 3) | 0b110u, 6);
	auto r = sfll_rates(lc, mult, key);
	CHECK(r.stripped_only == Rational(2 * 2, 16));
	CHECK(r.corrupted == Rational(2 * 2 * 2, 16));
}
