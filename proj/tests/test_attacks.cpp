#include "support/oracles.hpp"

#include "saslab/attacks.hpp"
#include "saslab/circuits.hpp"
#include "saslab/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace saslab;

TEST_CASE("oracle rejects key inputs and counts queries")
{
	Circuit mult = array_multiplier(2, 2);
	Oracle o(mult);
	Assignment a;
	for (const auto &in : mult.inputs())
		a[in] = true;
	CHECK(o.query(a).to_hex() == "9");
	CHECK(o.queries() == 1);
	LockedCircuit lc = lock_antisat(mult, 2, 0, "", 0);
	CHECK_THROWS(Oracle(lc.circuit));
}

TEST_CASE("SAT attack recovers a functionally correct key")
{
	Circuit mult = array_multiplier(3, 3);
	std::mt19937_64 rng(2);
	for (int t = 0; t < 6; ++t) {
		LockedCircuit lc = t % 3 == 0   ? lock_sas(mult, make_sas_spec(4, {1, 7}, 1, 3, t), t)
		                   : t % 3 == 1 ? lock_rsas(mult, make_sas_spec(4, {2, 9, 11, 14}, 2, 0, t), t)
		                                : lock_sfll_flex(mult, make_sfll_spec(4, 3, {1, 8}), t);
		Oracle o(mult);
		for (bool incremental : {true, false}) {
			AttackOptions opt;
			opt.seed = t;
			opt.incremental = incremental;
			opt.branching = t & 1 ? Branching::Vsids : Branching::InputsFirst;
			AttackResult r = sat_attack(lc.circuit, o, opt);
			CHECK(r.termination == Termination::Exhausted);
			CHECK(r.di_log.size() == r.iterations);
			CHECK(check_equivalence(bind_key(lc.circuit, r.recovered_key), mult, EquivalenceMode::Sat).equal);
			// Every DI is answered by the oracle's function.
			for (const auto &d : r.di_log) {
				std::map<std::string, bool> a;
				for (std::size_t i = 0; i < r.input_names.size(); ++i)
					a[r.input_names[i]] = d.inputs[i];
				auto want = oracle::eval_outputs(mult, a);
				for (std::size_t i = 0; i < want.size(); ++i)
					CHECK(d.outputs[i] == want[i]);
			}
		}
	}
}

TEST_CASE("SAT attack never picks a DI twice and respects the iteration limit")
{
	Circuit mult = array_multiplier(4, 4);
	LockedCircuit lc = lock_sas(mult, make_sas_spec(6, {5, 40}, 1, 0, 1), 1);
	Oracle o(mult);
	AttackOptions opt;
	opt.seed = 4;
	AttackResult r = sat_attack(lc.circuit, o, opt);
	std::set<BitVector> seen;
	for (const auto &d : r.di_log)
		CHECK(seen.insert(d.inputs).second);
	opt.iteration_limit = 3;
	AttackResult cut = sat_attack(lc.circuit, o, opt);
	CHECK(cut.termination == Termination::IterationLimit);
	CHECK(cut.iterations == 3);
}

TEST_CASE("SAT attack writes DIMACS per iteration")
{
	Circuit mult = array_multiplier(2, 2);
	LockedCircuit lc = lock_sas(mult, make_sas_spec(3, {1, 2}, 1, 0, 1), 1);
	auto dir = std::filesystem::temp_directory_path() / "saslab_cnf_test";
	std::filesystem::remove_all(dir);
	AttackOptions opt;
	opt.seed = 1;
	opt.dump_cnf_dir = dir.string();
	Oracle o(mult);
	AttackResult r = sat_attack(lc.circuit, o, opt);
	std::size_t files = 0;
	for (const auto &e : std::filesystem::directory_iterator(dir)) {
		CHECK(e.path().extension() == ".cnf");
		++files;
	}
	CHECK(files >= r.iterations);
	std::filesystem::remove_all(dir);
}

TEST_CASE("approximate attack reports an error estimate")
{
	Circuit mult = array_multiplier(3, 3);
	LockedCircuit lc = lock_sas(mult, make_sas_spec(5, {1, 7, 9, 30}, 1, 0, 1), 1);
	Oracle o(mult);
	auto r = approximate_sat_attack(lc.circuit, o, 2, 2000, 3);
	CHECK(r.attack.iterations <= 2);
	CHECK(r.error.trials == 2000);
	CHECK(r.error.value < 0.2);
}

TEST_CASE("removal: SAS falls, RSAS keeps its critical minterms")
{
	Circuit mult = array_multiplier(4, 4);
	SasSpec s = make_sas_spec(4, {3, 6}, 1, 0, 2);
	LockedCircuit sas = lock_sas(mult, s, 1);
	LockedCircuit rsas = lock_rsas(mult, s, 1);
	auto rs = removal_attack(sas.circuit);
	CHECK(oracle::keys_of(rs.circuit).empty());
	CHECK(check_equivalence(rs.circuit, mult, EquivalenceMode::Sat).equal);
	auto rr = removal_attack(rsas.circuit);
	CHECK(oracle::keys_of(rr.circuit).empty());
	std::vector<Minterm> mism;
	for (Minterm x = 0; x < 16; ++x) {
		std::map<std::string, bool> a;
		for (const auto &in : mult.inputs())
			a[in] = false;
		oracle::assign(a, rsas.input_slice(), x);
		if (oracle::eval_outputs(rr.circuit, a) != oracle::eval_outputs(mult, a))
			mism.push_back(x);
	}
	CHECK(mism == std::vector<Minterm>{3, 6});
	CHECK_FALSE(removal_candidates(sas.circuit).empty());
}

TEST_CASE("iteration statistics")
{
	auto s = summarize_iterations({1, 2, 3, 4});
	CHECK(s.mean == doctest::Approx(2.5));
	CHECK(s.variance == doctest::Approx(5.0 / 3));
	CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 3 / 4)));
	CHECK(s.min == 1);
	CHECK(s.max == 4);
}

TEST_CASE("model attack trace: DIs are distinct and cover every critical minterm")
{
	std::mt19937_64 rng(6);
	for (int t = 0; t < 30; ++t) {
		unsigned n = 5, m = 1u << (rng() % 4), l = 1u << (rng() % 3);
		if (l > m)
			l = m;
		std::set<Minterm> crit;
		while (crit.size() < m)
			crit.insert(rng() % 32);
		SasSpec s = make_sas_spec(n, {crit.begin(), crit.end()}, l, rng() % 32, rng());
		auto trace = model_attack_trace(s, t);
		std::set<Minterm> dis(trace.begin(), trace.end());
		CHECK(dis.size() == trace.size());
		// Every critical minterm appears among the DIs.
		for (Minterm x : crit)
			CHECK(dis.contains(x));
		// Each DI rules out at least one family: no DI is a pure repeat of coverage.
		std::set<std::pair<std::size_t, Minterm>> covered;
		for (Minterm x : trace) {
			bool fresh = false;
			for (std::size_t j = 0; j < l; ++j) {
				int idx = s.critical_index(j, x);
				Minterm k1 = idx >= 0 ? Minterm(~0ull) : x ^ s.x_g;
				if (idx >= 0)
					for (Minterm v : s.k1_sets[j][idx])
						fresh = covered.insert({j, v}).second || fresh;
				else
					fresh = covered.insert({j, k1}).second || fresh;
			}
			CHECK(fresh);
		}
		CHECK(covered.size() == l * 32);
		CHECK(trace.size() >= m);
	}
}

TEST_CASE("model attack: mean near the closed form, deterministic across threads")
{
	SasSpec s = make_sas_spec(8, {1, 50, 77, 200}, 2, 0, 9);
	auto a = model_attack_sim(s, 2000, 3, 1);
	auto b = model_attack_sim(s, 2000, 3, 4);
	CHECK(a.mean == b.mean);
	CHECK(a.histogram == b.histogram);
	double want = to_double(expected_iterations(s));
	CHECK(std::abs(a.mean - want) <= 4 * a.std_error);
}

TEST_CASE("coverage model from a sweep matches the SAS model on small instances")
{
	Circuit mult = array_multiplier(3, 3);
	SasSpec s = make_sas_spec(3, {2, 5}, 1, 0, 3);
	LockedCircuit lc = lock_sas(mult, s, 0);
	CoverageModel cm = coverage_model(lc.circuit, mult, slice_domain(lc), full_key_domain(6));
	CHECK(cm.family_count == 64 - 8);
	auto a = model_attack_sim(cm, 4000, 1, 2);
	auto b = model_attack_sim(s, 4000, 1, 2);
	CHECK(std::abs(a.mean - b.mean) <= 4 * std::hypot(a.std_error, b.std_error));
	CHECK(std::abs(b.mean - to_double(expected_iterations(s))) <= 4 * b.std_error);
}
