#include "support/oracles.hpp"

#include "saslab/sat.hpp"

#include <doctest.h>

using namespace saslab;

namespace {

std::vector<std::vector<int>> random_3sat(std::mt19937_64 &rng, int vars, int clauses)
{
	std::vector<std::vector<int>> f;
	for (int i = 0; i < clauses; ++i) {
		std::vector<int> cl;
		for (int j = 0; j < 3; ++j) {
			int v = 1 + static_cast<int>(rng() % vars);
			cl.push_back(rng() & 1 ? v : -v);
		}
		f.push_back(cl);
	}
	return f;
}

bool satisfies(const SatEngine &s, const std::vector<std::vector<int>> &f)
{
	for (const auto &cl : f) {
		bool ok = false;
		for (int lit : cl)
			ok = ok || s.model_value(std::abs(lit)) == (lit > 0);
		if (!ok)
			return false;
	}
	return true;
}

} // namespace

TEST_CASE("CDCL verdicts match brute force on random 3-SAT")
{
	std::mt19937_64 rng(1);
	for (int t = 0; t < 300; ++t) {
		int vars = 4 + static_cast<int>(rng() % 9);
		auto f = random_3sat(rng, vars, static_cast<int>(vars * (3 + rng() % 3)));
		for (bool replay : {false, true}) {
			std::unique_ptr<SatEngine> s;
			if (replay)
				s = std::make_unique<ReplaySolver>(SolverOptions{std::uint64_t(t), true, -1});
			else
				s = std::make_unique<CdclSolver>(SolverOptions{std::uint64_t(t), bool(t & 1), -1});
			for (int v = 0; v < vars; ++v)
				s->new_var();
			for (const auto &cl : f)
				s->add_clause(cl);
			auto want = oracle::brute_sat(vars, f);
			auto got = s->solve({});
			CHECK((got == SolveResult::Sat) == want.has_value());
			if (got == SolveResult::Sat)
				CHECK(satisfies(*s, f));
		}
	}
}

TEST_CASE("assumptions are incremental and do not stick")
{
	CdclSolver s;
	int a = s.new_var(), b = s.new_var();
	s.add_clause({a, b});
	std::vector<int> both{-a, -b};
	CHECK(s.solve(both) == SolveResult::Unsat);
	std::vector<int> na{-a};
	CHECK(s.solve(na) == SolveResult::Sat);
	CHECK(s.model_value(b));
	CHECK(s.solve({}) == SolveResult::Sat);
	s.add_clause({-b});
	CHECK(s.solve({}) == SolveResult::Sat);
	CHECK(s.model_value(a));
	s.add_clause({-a});
	CHECK(s.solve({}) == SolveResult::Unsat);
}

TEST_CASE("pigeonhole 5 into 4 is unsatisfiable")
{
	CdclSolver s;
	const int P = 5, H = 4;
	auto var = [&](int p, int h) { return p * H + h + 1; };
	for (int i = 0; i < P * H; ++i)
		s.new_var();
	for (int p = 0; p < P; ++p) {
		std::vector<int> cl;
		for (int h = 0; h < H; ++h)
			cl.push_back(var(p, h));
		s.add_clause(cl);
	}
	for (int h = 0; h < H; ++h)
		for (int p = 0; p < P; ++p)
			for (int q = p + 1; q < P; ++q)
				s.add_clause({-var(p, h), -var(q, h)});
	CHECK(s.solve({}) == SolveResult::Unsat);
}

TEST_CASE("conflict budget yields Unknown")
{
	CdclSolver s(SolverOptions{0, false, 0});
	const int P = 8, H = 7;
	auto var = [&](int p, int h) { return p * H + h + 1; };
	for (int i = 0; i < P * H; ++i)
		s.new_var();
	for (int p = 0; p < P; ++p) {
		std::vector<int> cl;
		for (int h = 0; h < H; ++h)
			cl.push_back(var(p, h));
		s.add_clause(cl);
	}
	for (int h = 0; h < H; ++h)
		for (int p = 0; p < P; ++p)
			for (int q = p + 1; q < P; ++q)
				s.add_clause({-var(p, h), -var(q, h)});
	CHECK(s.solve({}) == SolveResult::Unknown);
}

TEST_CASE("invalid literals are rejected")
{
	CdclSolver s;
	s.new_var();
	CHECK_THROWS(s.add_clause({0}));
	CHECK_THROWS(s.add_clause({2}));
	std::vector<int> p{5};
	CHECK_THROWS(s.set_decision_priority(p));
}
